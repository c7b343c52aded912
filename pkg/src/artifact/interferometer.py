"""Ramsey and echo-Ramsey interferometry over quasi-momentum ensembles.

Sequences (time order, left to right):

* Ramsey:  pi/2 pulse, lattice-on hold for t, pi/2 pulse, measure the D-band
  population P_D.
* Echo:    pi/2, then n repetitions of [hold t/2n, pi pulse, hold t/2n],
  then pi/2; the pi pulses rephase quasi-momentum-dependent phase
  accumulation.

The hold evolution uses the full multi-band lattice-on propagator.  Pulses
come in two models: ideal analytic rotations in the S/D subspace, or real
shortcut pulse sequences.  Sequence operators are phase-locked by default:
each is dressed with the two per-band reference phases from the aligned
fidelity frame (:func:`artifact.shortcut.aligned_fidelity_block`), which is
what makes independently designed pulses compose consistently in a composite
sequence — without it the inter-pulse phases are an artifact of the
eigensolver's phase convention rather than of the pulse design.

Dephasing arises from averaging fringes over a Gaussian quasi-momentum
distribution: the S-D gap varies with q, so ensemble fringes decay.  Two
contrast observables are provided: the per-period windowed contrast
(max-min)/(max+min) of the P_D fringe, and the analysis-phase-scan contrast
(the fringe amplitude obtained by scanning a phase on the D component before
the final pi/2), which remains meaningful when the composite produces a
constant P_D (e.g. a perfect echo).
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dynamics import (
    PulseSequence,
    band_eig,
    bloch_state,
    default_band_pair,
    sequence_operator,
)
from .lattice import (
    Geometry,
    LatticeSpec,
    PlaneWaveBasis,
    angular_frequency_per_Er,
)
from .shortcut import ROTATION_BLOCKS, ObjectiveKind, aligned_fidelity_block

ONE_OVER_E = 1.0 / math.e


class FringeKind(enum.Enum):
    RAMSEY = "ramsey"
    ECHO = "echo"


@dataclass(frozen=True)
class IdealPulses:
    """Perfect analytic pi/2 and pi rotations in the S/D subspace."""


@dataclass(frozen=True)
class SequencePulses:
    """Shortcut pulse sequences as interferometer pulses.

    ``phase_locked`` dresses each sequence operator with its aligned-frame
    phases (recomputed at every quasi-momentum), making the plain overlap
    fidelity equal the aligned fidelity and letting separately designed
    pulses compose.  Disable to use raw operators under the deterministic
    eigenvector phase convention.
    """

    pi2: PulseSequence
    pi: PulseSequence | None = None
    phase_locked: bool = True


PulseModel = IdealPulses | SequencePulses


@dataclass(frozen=True)
class EnsembleSpec:
    """Quasi-momentum distribution and quadrature for ensemble averages."""

    distribution: str = "gaussian"  # "delta" or "gaussian"
    sigma_q: float = 0.0
    quadrature: int = 21
    #: optional piecewise-linear width schedule [(t_us, sigma), ...].
    width_schedule: tuple = ()

    def __post_init__(self) -> None:
        if self.distribution not in ("delta", "gaussian"):
            raise ValueError("distribution must be 'delta' or 'gaussian'")
        if self.sigma_q < 0:
            raise ValueError("sigma_q must be >= 0")
        if self.quadrature % 2 == 0:
            raise ValueError("quadrature must be odd so q = 0 is a node")
        if self.distribution == "gaussian" and self.sigma_q > 0 and self.quadrature < 5:
            raise ValueError("quadrature grid < 5 per axis is too coarse")
        if self.width_schedule:
            ts = [p[0] for p in self.width_schedule]
            if sorted(ts) != ts:
                raise ValueError("width_schedule times must ascend")

    @classmethod
    def from_width(
        cls,
        delta_q: float,
        reading: str = "fwhm",
        quadrature: int = 21,
    ) -> "EnsembleSpec":
        """Build a Gaussian ensemble from a measured distribution width.

        ``reading="fwhm"`` (default) takes delta_q as the full width at half
        maximum, sigma = delta_q / (2 sqrt(2 ln 2)); ``"two_sigma"`` takes
        delta_q = 2 sigma.
        """
        if reading == "fwhm":
            sigma = delta_q / (2.0 * math.sqrt(2.0 * math.log(2.0)))
        elif reading == "two_sigma":
            sigma = delta_q / 2.0
        else:
            raise ValueError("reading must be 'fwhm' or 'two_sigma'")
        return cls(distribution="gaussian", sigma_q=sigma, quadrature=quadrature)


@dataclass(frozen=True)
class FringeCurve:
    """P_D versus hold time."""

    times: np.ndarray = field(repr=False, compare=False)
    p_d: np.ndarray = field(repr=False, compare=False)
    metadata: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.times) != len(self.p_d):
            raise ValueError("times and p_d lengths differ")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly ascending")


@dataclass(frozen=True)
class ContrastCurve:
    """Contrast versus hold time (window centers or sample times)."""

    times: np.ndarray = field(repr=False, compare=False)
    contrast: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.times) != len(self.contrast):
            raise ValueError("times and contrast lengths differ")
        if np.any(self.contrast < -1e-9) or np.any(self.contrast > 1 + 1e-9):
            raise ValueError("contrast must lie in [0, 1]")


@dataclass(frozen=True)
class CoherenceResult:
    """Coherence-time estimates from a contrast curve.

    ``crossing_us`` is the first 1/e crossing (linear interpolation between
    window centers), or None if the curve never crosses 1/e from above.
    ``fit_tau_us``/``fit_amplitude`` are the least-squares parameters of
    A exp(-t/tau) over the whole curve (the secondary estimator).
    """

    crossing_us: float | None
    fit_tau_us: float
    fit_amplitude: float


def ideal_fringe(gap: float, times: np.ndarray, spec: LatticeSpec) -> FringeCurve:
    """Analytic two-level Ramsey fringe (1 + cos(gap * t))/2 for a gap in E_r."""
    if gap <= 0:
        raise ValueError("gap must be positive")
    w = angular_frequency_per_Er(spec)
    times = np.asarray(times, dtype=float)
    p = (1.0 + np.cos(gap * w * times)) / 2.0
    return FringeCurve(times=times, p_d=p, metadata={"kind": "ideal"})


# --------------------------------------------------------------------------
# Pulse operators


def ideal_pulse_operator(
    kind: str, q: np.ndarray, spec: LatticeSpec, basis: PlaneWaveBasis
) -> np.ndarray:
    """Exact S/D-subspace rotation ("pi2" or "pi"), identity elsewhere."""
    s_idx, d_idx = default_band_pair(spec.geometry)
    s = bloch_state(s_idx, q, spec, basis).amplitudes
    d = bloch_state(d_idx, q, spec, basis).amplitudes
    theta = {"pi2": math.pi / 4.0, "pi": math.pi / 2.0}[kind]
    eye = np.eye(basis.size, dtype=complex)
    proj = np.outer(s, s.conj()) + np.outer(d, d.conj())
    swap = np.outer(d, s.conj()) - np.outer(s, d.conj())
    return eye + (math.cos(theta) - 1.0) * proj + math.sin(theta) * swap


def locked_sequence_operator(
    seq: PulseSequence,
    kind: ObjectiveKind,
    q: np.ndarray,
    spec: LatticeSpec,
    basis: PlaneWaveBasis,
) -> np.ndarray:
    """Sequence operator dressed with its aligned-frame per-band phases.

    Applies Z_b R Z_a with Z_theta = 1 + (e^(i theta) - 1)|D><D| and (a, b)
    the phases that maximize the rotation fidelity of R's S/D block against
    the kind's target rotation.  A deterministic, unitary, per-q dressing.
    """
    s_idx, d_idx = default_band_pair(spec.geometry)
    s = bloch_state(s_idx, q, spec, basis).amplitudes
    d = bloch_state(d_idx, q, spec, basis).amplitudes
    r = sequence_operator(seq, q, spec, basis)
    frame = np.stack([s, d], axis=1)
    block = frame.conj().T @ r @ frame
    _, a, b = aligned_fidelity_block(block, ROTATION_BLOCKS[kind])
    dd = np.outer(d, d.conj())
    za = np.eye(basis.size, dtype=complex) + (np.exp(1j * a) - 1.0) * dd
    zb = np.eye(basis.size, dtype=complex) + (np.exp(1j * b) - 1.0) * dd
    return zb @ r @ za


def _operators_at_q(
    pulses: PulseModel,
    q: np.ndarray,
    spec: LatticeSpec,
    basis: PlaneWaveBasis,
    need_pi: bool,
):
    """(energies, states, s, d, R_half, R_pi_or_None) at one quasi-momentum."""
    energies, states = band_eig(q, spec, basis)
    s_idx, d_idx = default_band_pair(spec.geometry)
    s = bloch_state(s_idx, q, spec, basis).amplitudes
    d = bloch_state(d_idx, q, spec, basis).amplitudes
    if isinstance(pulses, IdealPulses):
        r_half = ideal_pulse_operator("pi2", q, spec, basis)
        r_pi = ideal_pulse_operator("pi", q, spec, basis) if need_pi else None
        return energies, states, s, d, r_half, r_pi
    if pulses.phase_locked:
        r_half = locked_sequence_operator(
            pulses.pi2, ObjectiveKind.HALF_PI, q, spec, basis
        )
        r_pi = None
        if need_pi:
            if pulses.pi is None:
                raise ValueError("echo requires a pi sequence")
            r_pi = locked_sequence_operator(
                pulses.pi, ObjectiveKind.PI, q, spec, basis
            )
        return energies, states, s, d, r_half, r_pi
    r_half = sequence_operator(pulses.pi2, q, spec, basis)
    r_pi = None
    if need_pi:
        if pulses.pi is None:
            raise ValueError("echo requires a pi sequence")
        r_pi = sequence_operator(pulses.pi, q, spec, basis)
    return energies, states, s, d, r_half, r_pi


def _fringe_kernel(
    kind: FringeKind,
    pulses: PulseModel,
    times: np.ndarray,
    q: np.ndarray,
    spec: LatticeSpec,
    basis: PlaneWaveBasis,
    n_echo: int,
):
    """Per-quasi-momentum fringe and phase-scan components.

    Returns (p_d, num, den) arrays over times: p_d is the D-band population;
    the analysis-phase-scan contrast at this q is 2|num|/den.
    """
    w = angular_frequency_per_Er(spec)
    energies, states, s, d, r_half, r_pi = _operators_at_q(
        pulses, q, spec, basis, need_pi=(kind is FringeKind.ECHO)
    )
    times = np.asarray(times, dtype=float)
    psi1 = states.conj().T @ (r_half @ s)
    wvec = (states.conj().T @ (r_half.conj().T @ d)).conj()
    rdd = complex(np.vdot(d, r_half @ d))
    d_band = states.conj().T @ d  # D state in the band basis

    if kind is FringeKind.RAMSEY:
        chi = np.exp(-1j * np.outer(energies, w * times)) * psi1[:, None]
    else:
        if n_echo < 1:
            raise ValueError("n_echo must be >= 1")
        tau = times / (2.0 * n_echo)
        ph_tau = np.exp(-1j * np.outer(energies, w * tau))
        ph_2tau = ph_tau * ph_tau
        phi = states.conj().T @ r_pi @ states
        chi = ph_tau * psi1[:, None]
        for j in range(1, n_echo + 1):
            chi = phi @ chi
            if j < n_echo:
                chi = ph_2tau * chi
        chi = ph_tau * chi

    amp = wvec @ chi
    b = (d_band.conj() @ chi) * rdd
    p_d = np.abs(amp) ** 2
    num = np.conj(amp - b) * b
    den = np.abs(amp - b) ** 2 + np.abs(b) ** 2
    return p_d, num, den


def _as_pulse_model(pulses) -> PulseModel:
    if isinstance(pulses, (IdealPulses, SequencePulses)):
        return pulses
    if isinstance(pulses, PulseSequence):
        return SequencePulses(pi2=pulses)
    raise TypeError("pulses must be a PulseModel or a PulseSequence")


def ramsey_pd(
    seq_pi2,
    t_hold: float,
    q: np.ndarray,
    spec: LatticeSpec,
    basis: PlaneWaveBasis,
) -> float:
    """D-band population after pi/2 - hold(t) - pi/2 at one quasi-momentum."""
    if t_hold < 0:
        raise ValueError("t_hold must be >= 0")
    model = _as_pulse_model(seq_pi2)
    p, _, _ = _fringe_kernel(
        FringeKind.RAMSEY, model, np.array([t_hold]), q, spec, basis, 0
    )
    return float(p[0])


def echo_pd(
    seq_pi2,
    seq_pi,
    n_echo: int,
    t_hold: float,
    q: np.ndarray,
    spec: LatticeSpec,
    basis: PlaneWaveBasis,
) -> float:
    """D-band population after the n-echo sequence at one quasi-momentum."""
    if t_hold < 0:
        raise ValueError("t_hold must be >= 0")
    if isinstance(seq_pi2, (IdealPulses, SequencePulses)):
        model = seq_pi2
    else:
        model = SequencePulses(pi2=seq_pi2, pi=seq_pi)
    p, _, _ = _fringe_kernel(
        FringeKind.ECHO, model, np.array([t_hold]), q, spec, basis, n_echo
    )
    return float(p[0])


# --------------------------------------------------------------------------
# Ensembles


def _grid_axes(ens: EnsembleSpec, geometry: Geometry):
    """Per-axis quadrature positions (x, y); y is [0] for 1D geometry."""
    if ens.distribution == "delta" or ens.sigma_q == 0:
        return np.array([0.0]), np.array([0.0])
    x = np.linspace(-3.0 * ens.sigma_q, 3.0 * ens.sigma_q, ens.quadrature)
    if geometry is Geometry.STANDING_WAVE_1D:
        return x, np.array([0.0])
    return x, x


def _weights_for_sigma(xs: np.ndarray, ys: np.ndarray, sigma: float) -> np.ndarray:
    """Unnormalized Gaussian weights on the tensor grid, flattened."""
    if sigma == 0:
        return np.ones(len(xs) * len(ys))
    wx = np.exp(-(xs**2) / (2.0 * sigma**2))
    wy = np.exp(-(ys**2) / (2.0 * sigma**2)) if len(ys) > 1 else np.ones(len(ys))
    return np.outer(wx, wy).ravel()


def _ensemble_components(
    kind: FringeKind,
    pulses: PulseModel,
    times: np.ndarray,
    ens: EnsembleSpec,
    spec: LatticeSpec,
    basis: PlaneWaveBasis,
    n_echo: int,
    threads: int,
):
    """Per-q kernel results plus the (possibly time-dependent) weights."""
    times = np.asarray(times, dtype=float)
    xs, ys = _grid_axes(ens, spec.geometry)
    qs = [np.array([qx, qy]) for qx in xs for qy in ys]

    def work(q):
        return _fringe_kernel(kind, pulses, times, q, spec, basis, n_echo)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, qs))
    else:
        results = [work(q) for q in qs]

    p_d = np.array([r[0] for r in results])
    num = np.array([r[1] for r in results])
    den = np.array([r[2] for r in results])

    if ens.width_schedule:
        ts = np.array([p[0] for p in ens.width_schedule], dtype=float)
        ss = np.array([p[1] for p in ens.width_schedule], dtype=float)
        sig_t = np.interp(times, ts, ss)
        weights = np.empty((len(qs), len(times)))
        for j, sg in enumerate(sig_t):
            weights[:, j] = _weights_for_sigma(xs, ys, float(sg))
    else:
        weights = _weights_for_sigma(xs, ys, ens.sigma_q)[:, None]
    weights = weights / np.sum(weights, axis=0, keepdims=True)
    return p_d, num, den, weights


def ensemble_fringe(
    kind: FringeKind | str,
    pulses,
    times: np.ndarray,
    ens: EnsembleSpec,
    spec: LatticeSpec,
    basis: PlaneWaveBasis,
    n_echo: int = 2,
    threads: int = 1,
) -> FringeCurve:
    """Quasi-momentum-ensemble-averaged fringe P_D(t).

    Pulse operators are recomputed at every grid point (quasi-momentum is
    conserved by the lattice pulses).  The quadrature sum runs in fixed grid
    order regardless of ``threads``, so results are bit-stable across thread
    counts.
    """
    kind = FringeKind(kind)
    model = _as_pulse_model(pulses)
    times = np.asarray(times, dtype=float)
    p_d, _, _, weights = _ensemble_components(
        kind, model, times, ens, spec, basis, n_echo, threads
    )
    avg = np.sum(weights * p_d, axis=0)
    meta = {
        "kind": kind.value,
        "n_echo": n_echo if kind is FringeKind.ECHO else 0,
        "sigma_q": ens.sigma_q,
        "quadrature": ens.quadrature,
        "distribution": ens.distribution,
    }
    return FringeCurve(times=times, p_d=avg, metadata=meta)


def phase_scan_contrast(
    kind: FringeKind | str,
    pulses,
    times: np.ndarray,
    ens: EnsembleSpec,
    spec: LatticeSpec,
    basis: PlaneWaveBasis,
    n_echo: int = 2,
    threads: int = 1,
) -> ContrastCurve:
    """Ensemble contrast from scanning the analysis phase before the last pi/2.

    At each hold time the D-band component acquires a scanned phase phi just
    before the final pi/2; the contrast is (max-min)/(max+min) of P_D over
    phi, evaluated analytically.  For an ideal-pulse Ramsey this equals the
    modulus of the ensemble-averaged fringe phasor; it remains meaningful
    when the fringe itself is constant (perfect echo).
    """
    kind = FringeKind(kind)
    model = _as_pulse_model(pulses)
    times = np.asarray(times, dtype=float)
    _, num, den, weights = _ensemble_components(
        kind, model, times, ens, spec, basis, n_echo, threads
    )
    top = 2.0 * np.abs(np.sum(weights * num, axis=0))
    bottom = np.sum(weights * den, axis=0)
    contrast = np.where(bottom > 0, top / np.maximum(bottom, 1e-300), 0.0)
    return ContrastCurve(times=times, contrast=np.clip(contrast, 0.0, 1.0))


# --------------------------------------------------------------------------
# Contrast and coherence extraction


def contrast_curve(fringe: FringeCurve, period: float) -> ContrastCurve:
    """Per-period fringe contrast (max-min)/(max+min) in period windows."""
    t = fringe.times
    p = fringe.p_d
    if period <= 0:
        raise ValueError("period must be positive")
    span = t[-1] - t[0]
    if span < 2.0 * period:
        raise ValueError("fringe must span at least two periods")
    dt = float(np.median(np.diff(t)))
    if period / dt < 8.0 - 1e-9:
        raise ValueError("need at least 8 samples per period")
    centers, values = [], []
    t0 = t[0]
    while t0 + period <= t[-1] + 1e-9:
        m = (t >= t0 - 1e-12) & (t <= t0 + period + 1e-12)
        hi = float(np.max(p[m]))
        lo = float(np.min(p[m]))
        denom = hi + lo
        centers.append(t0 + period / 2.0)
        values.append((hi - lo) / denom if denom > 0 else 0.0)
        t0 += period
    return ContrastCurve(times=np.array(centers), contrast=np.array(values))


def coherence_time(curve: ContrastCurve) -> CoherenceResult:
    """1/e crossing (primary) and exponential-fit tau (secondary).

    The crossing is the first time the contrast falls through 1/e, linearly
    interpolated between curve samples; None when the curve never crosses
    from above.  The fit is least-squares A exp(-t/tau) over the full curve,
    seeded by log-linear regression; a non-decaying curve reports tau = inf.
    """
    t = np.asarray(curve.times, dtype=float)
    c = np.asarray(curve.contrast, dtype=float)
    if len(t) < 3:
        raise ValueError("need at least 3 contrast samples")

    crossing = None
    if c[0] > ONE_OVER_E:
        below = np.where(c < ONE_OVER_E)[0]
        if len(below) > 0:
            i = int(below[0])
            frac = (c[i - 1] - ONE_OVER_E) / (c[i - 1] - c[i])
            crossing = float(t[i - 1] + frac * (t[i] - t[i - 1]))

    logc = np.log(np.clip(c, 1e-12, None))
    slope, intercept = np.polyfit(t, logc, 1)
    if slope >= -1e-15:
        return CoherenceResult(
            crossing_us=crossing,
            fit_tau_us=math.inf,
            fit_amplitude=float(np.mean(c)),
        )
    from scipy.optimize import curve_fit

    p0 = [float(min(np.exp(intercept), 2.0)), float(-1.0 / slope)]
    try:
        popt, _ = curve_fit(
            lambda tt, a, tau: a * np.exp(-tt / tau), t, c, p0=p0, maxfev=10000
        )
        amp, tau = float(popt[0]), float(popt[1])
    except RuntimeError:
        amp, tau = p0[0], p0[1]
    return CoherenceResult(crossing_us=crossing, fit_tau_us=tau, fit_amplitude=amp)
