"""Reference shortcut pulse sequences shipped with the package.

All four were designed for the triangular lattice at the reference depth of
5 E_r with the default basis (shell radius 5), quasi-momentum 0.  Durations
are in microseconds as (t_on, t_off) pairs, applied left to right; the
variable-amplitude sequence carries its own per-step depths in E_r.

Aligned-frame fidelities at the reference configuration (regression-tested):

* ``REFERENCE_PI2``   : 0.9832 (half-pi rotation, 5 steps)
* ``REFERENCE_LOAD``  : 0.9946 (plane wave -> S band, 2 steps)
* ``REFERENCE_PI``    : 0.9680 (pi rotation, 2 steps)
* ``REFERENCE_PI_VARIABLE`` : 0.9962 (pi rotation, 5 steps, per-step depths)
"""

from .dynamics import PulseSequence

#: Five-step half-pi (beam-splitter) sequence.
REFERENCE_PI2 = PulseSequence.from_durations(
    [(2.7, 16.8), (21.9, 7.9), (25.0, 6.8), (25.3, 14.2), (11.0, 16.1)]
)

#: Two-step S-band loading sequence (from the zero-momentum plane wave).
REFERENCE_LOAD = PulseSequence.from_durations([(14.0, 27.5), (99.5, 14.5)])

#: Two-step pi (mirror) sequence at fixed depth.
REFERENCE_PI = PulseSequence.from_durations([(34.0, 6.5), (9.0, 78.0)])

#: Five-step pi sequence with per-step depths (variable amplitude).
REFERENCE_PI_VARIABLE = PulseSequence.from_durations(
    [(18.1, 11.8), (5.7, 39.7), (0.3, 20.5), (11.8, 0.1), (85.9, 10.7)],
    depths=[3.6, 5.2, 4.3, 5.1, 3.9],
)

REFERENCE_SEQUENCES = {
    "pi2": REFERENCE_PI2,
    "load": REFERENCE_LOAD,
    "pi": REFERENCE_PI,
    "pi_variable": REFERENCE_PI_VARIABLE,
}
