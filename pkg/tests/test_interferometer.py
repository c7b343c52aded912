import numpy as np
import pytest

from artifact.interferometer import (
    ContrastCurve,
    EnsembleSpec,
    FringeCurve,
    FringeKind,
    IdealPulses,
    SequencePulses,
    coherence_time,
    contrast_curve,
    echo_pd,
    ensemble_fringe,
    ideal_fringe,
    ideal_pulse_operator,
    locked_sequence_operator,
    phase_scan_contrast,
    ramsey_pd,
)
from artifact.dynamics import band_eig, default_band_pair
from artifact.lattice import fringe_period_us, sd_gap
from artifact.sequences import REFERENCE_PI, REFERENCE_PI2
from artifact.shortcut import (
    ObjectiveKind,
    ROTATION_BLOCKS,
    aligned_fidelity_block,
    build_objective,
    rotation_block,
)


@pytest.fixture(scope="module")
def period(spec, basis):
    return fringe_period_us(spec, basis)


class TestEnsembleSpec:
    def test_quadrature_must_be_odd(self):
        with pytest.raises(ValueError):
            EnsembleSpec(distribution="gaussian", sigma_q=0.3, quadrature=20)

    def test_quadrature_must_not_be_tiny(self):
        with pytest.raises(ValueError):
            EnsembleSpec(distribution="gaussian", sigma_q=0.3, quadrature=3)

    def test_negative_sigma_rejected(self):
        with pytest.raises(ValueError):
            EnsembleSpec(distribution="gaussian", sigma_q=-0.1)

    def test_unknown_distribution_rejected(self):
        with pytest.raises(ValueError):
            EnsembleSpec(distribution="boxcar", sigma_q=0.1)

    def test_from_width_fwhm(self):
        ens = EnsembleSpec.from_width(0.72, reading="fwhm")
        assert ens.sigma_q == pytest.approx(0.72 / 2.3548200450309493, rel=1e-9)

    def test_from_width_two_sigma(self):
        ens = EnsembleSpec.from_width(0.56, reading="two_sigma")
        assert ens.sigma_q == pytest.approx(0.28, rel=1e-12)

    def test_from_width_reading_validated(self):
        with pytest.raises(ValueError):
            EnsembleSpec.from_width(0.5, reading="hwhm")

    def test_width_schedule_times_must_ascend(self):
        with pytest.raises(ValueError):
            EnsembleSpec(
                distribution="gaussian",
                sigma_q=0.3,
                width_schedule=((100.0, 0.3), (50.0, 0.4)),
            )


class TestCurveTypes:
    def test_fringe_lengths_must_match(self):
        with pytest.raises(ValueError):
            FringeCurve(times=np.array([0.0, 1.0]), p_d=np.array([1.0]))

    def test_fringe_times_must_ascend(self):
        with pytest.raises(ValueError):
            FringeCurve(times=np.array([1.0, 0.0]), p_d=np.array([1.0, 1.0]))

    def test_contrast_bounded(self):
        with pytest.raises(ValueError):
            ContrastCurve(times=np.array([0.0]), contrast=np.array([1.5]))


class TestIdealFringe:
    def test_quarter_points(self, spec, basis, period):
        gap = sd_gap(spec, basis)
        t = np.array([0.0, period / 4, period / 2, period])
        curve = ideal_fringe(gap, t, spec)
        assert curve.p_d == pytest.approx([1.0, 0.5, 0.0, 1.0], abs=1e-9)

    def test_gap_must_be_positive(self, spec):
        with pytest.raises(ValueError):
            ideal_fringe(0.0, np.array([0.0]), spec)


class TestIdealOperators:
    def test_unitary(self, spec, basis):
        for kind in ("pi2", "pi"):
            u = ideal_pulse_operator(kind, np.zeros(2), spec, basis)
            assert np.max(np.abs(u.conj().T @ u - np.eye(basis.size))) < 1e-12

    def test_blocks_match_targets(self, spec, basis):
        from artifact.dynamics import bloch_state

        s_idx, d_idx = default_band_pair(spec.geometry)
        q = np.array([0.11, -0.04])
        s = bloch_state(s_idx, q, spec, basis).amplitudes
        d = bloch_state(d_idx, q, spec, basis).amplitudes
        frame = np.stack([s, d], axis=1)
        u2 = ideal_pulse_operator("pi2", q, spec, basis)
        upi = ideal_pulse_operator("pi", q, spec, basis)
        assert np.allclose(
            frame.conj().T @ u2 @ frame,
            ROTATION_BLOCKS[ObjectiveKind.HALF_PI],
            atol=1e-10,
        )
        assert np.allclose(
            frame.conj().T @ upi @ frame,
            ROTATION_BLOCKS[ObjectiveKind.PI],
            atol=1e-10,
        )

    def test_pi2_squared_is_pi(self, spec, basis):
        u2 = ideal_pulse_operator("pi2", np.zeros(2), spec, basis)
        upi = ideal_pulse_operator("pi", np.zeros(2), spec, basis)
        assert np.allclose(u2 @ u2, upi, atol=1e-10)


class TestLockedOperator:
    def test_unitary(self, spec, basis):
        u = locked_sequence_operator(
            REFERENCE_PI2, ObjectiveKind.HALF_PI, np.zeros(2), spec, basis
        )
        assert np.max(np.abs(u.conj().T @ u - np.eye(basis.size))) < 1e-10

    def test_block_is_aligned(self, spec, basis):
        # After dressing, the plain trace overlap must equal the aligned
        # fidelity: the dressing absorbs both reference phases.
        q = np.array([0.07, 0.12])
        obj = build_objective(ObjectiveKind.HALF_PI, spec, basis, q=q)
        raw_block = rotation_block(REFERENCE_PI2, obj)
        f_aligned, _, _ = aligned_fidelity_block(
            raw_block, ROTATION_BLOCKS[ObjectiveKind.HALF_PI]
        )
        u = locked_sequence_operator(
            REFERENCE_PI2, ObjectiveKind.HALF_PI, q, spec, basis
        )
        dressed = obj.band_frame.conj().T @ u @ obj.band_frame
        target = ROTATION_BLOCKS[ObjectiveKind.HALF_PI]
        tr = np.trace(target.conj().T @ dressed) / 2.0
        assert abs(tr) == pytest.approx(f_aligned, abs=1e-9)


class TestPointwiseFringes:
    def test_ideal_ramsey_matches_analytic(self, spec, basis, period):
        gap = sd_gap(spec, basis)
        times = np.linspace(0.0, 2 * period, 9)
        analytic = ideal_fringe(gap, times, spec).p_d
        for t, expected in zip(times, analytic):
            p = ramsey_pd(IdealPulses(), t, np.zeros(2), spec, basis)
            assert p == pytest.approx(expected, abs=1e-9)

    def test_ideal_echo_is_flat_one(self, spec, basis, period):
        for t in (0.0, period / 3, 5 * period):
            p = echo_pd(IdealPulses(), None, 2, t, np.zeros(2), spec, basis)
            assert p == pytest.approx(1.0, abs=1e-9)

    def test_negative_hold_rejected(self, spec, basis):
        with pytest.raises(ValueError):
            ramsey_pd(IdealPulses(), -1.0, np.zeros(2), spec, basis)
        with pytest.raises(ValueError):
            echo_pd(IdealPulses(), None, 2, -1.0, np.zeros(2), spec, basis)

    def test_n_echo_validated(self, spec, basis):
        with pytest.raises(ValueError):
            echo_pd(IdealPulses(), None, 0, 10.0, np.zeros(2), spec, basis)

    def test_echo_needs_pi_sequence(self, spec, basis):
        model = SequencePulses(pi2=REFERENCE_PI2)
        with pytest.raises(ValueError):
            echo_pd(model, None, 2, 10.0, np.zeros(2), spec, basis)

    def test_locked_echo_composite_at_gamma(self, spec, basis):
        model = SequencePulses(pi2=REFERENCE_PI2, pi=REFERENCE_PI)
        p = echo_pd(model, None, 2, 0.0, np.zeros(2), spec, basis)
        assert p == pytest.approx(0.675, abs=5e-3)


class TestEnsembleFringe:
    def test_zero_width_equals_single_q(self, spec, basis, period):
        times = np.linspace(0.0, period, 7)
        ens = EnsembleSpec(distribution="delta")
        curve = ensemble_fringe(
            FringeKind.RAMSEY, IdealPulses(), times, ens, spec, basis
        )
        for t, p in zip(times, curve.p_d):
            assert p == pytest.approx(
                ramsey_pd(IdealPulses(), t, np.zeros(2), spec, basis), abs=1e-12
            )

    def test_thread_count_invariant(self, spec, basis, period):
        times = np.linspace(0.0, 2 * period, 11)
        ens = EnsembleSpec(distribution="gaussian", sigma_q=0.3, quadrature=7)
        c1 = ensemble_fringe(
            FringeKind.RAMSEY, IdealPulses(), times, ens, spec, basis, threads=1
        )
        c4 = ensemble_fringe(
            FringeKind.RAMSEY, IdealPulses(), times, ens, spec, basis, threads=4
        )
        assert np.array_equal(c1.p_d, c4.p_d)

    def test_quadrature_refinement_converged(self, spec, basis):
        times = np.linspace(0.0, 2000.0, 9)
        p = {}
        for n in (21, 31):
            ens = EnsembleSpec(distribution="gaussian", sigma_q=0.3, quadrature=n)
            p[n] = ensemble_fringe(
                FringeKind.RAMSEY, IdealPulses(), times, ens, spec, basis, threads=4
            ).p_d
        assert np.max(np.abs(p[21] - p[31])) < 1e-3

    def test_wider_ensemble_dephases_faster(self, spec, basis, period):
        t_probe = np.array([500.0])
        c = {}
        for sigma in (0.1, 0.3):
            ens = EnsembleSpec(distribution="gaussian", sigma_q=sigma, quadrature=21)
            c[sigma] = phase_scan_contrast(
                FringeKind.RAMSEY, IdealPulses(), t_probe, ens, spec, basis, threads=4
            ).contrast[0]
        assert c[0.3] < c[0.1]

    def test_static_width_schedule_matches_plain(self, spec, basis, period):
        times = np.linspace(0.0, 2 * period, 9)
        plain = EnsembleSpec(distribution="gaussian", sigma_q=0.25, quadrature=7)
        scheduled = EnsembleSpec(
            distribution="gaussian",
            sigma_q=0.25,
            quadrature=7,
            width_schedule=((0.0, 0.25), (times[-1], 0.25)),
        )
        a = ensemble_fringe(
            FringeKind.RAMSEY, IdealPulses(), times, plain, spec, basis
        ).p_d
        b = ensemble_fringe(
            FringeKind.RAMSEY, IdealPulses(), times, scheduled, spec, basis
        ).p_d
        assert np.allclose(a, b, atol=1e-12)


class TestPhaseScan:
    def test_ideal_ramsey_equals_dephasing_factor(self, spec, basis):
        # For ideal pulses the phase-scan contrast must equal the modulus of
        # the ensemble average of exp(-i gap(q) t / hbar).
        from artifact.lattice import angular_frequency_per_Er

        ens = EnsembleSpec(distribution="gaussian", sigma_q=0.3, quadrature=9)
        times = np.array([0.0, 300.0, 900.0])
        curve = phase_scan_contrast(
            FringeKind.RAMSEY, IdealPulses(), times, ens, spec, basis
        )
        s_idx, d_idx = default_band_pair(spec.geometry)
        w = angular_frequency_per_Er(spec)
        sigma = ens.sigma_q
        xs = np.linspace(-3 * sigma, 3 * sigma, ens.quadrature)
        wx = np.exp(-(xs**2) / (2 * sigma**2))
        num = np.zeros(len(times), dtype=complex)
        den = 0.0
        for qx, wa in zip(xs, wx):
            for qy, wb in zip(xs, wx):
                weight = wa * wb
                energies, _ = band_eig(np.array([qx, qy]), spec, basis)
                gap = energies[d_idx - 1] - energies[s_idx - 1]
                num += weight * np.exp(-1j * gap * w * times)
                den += weight
        assert curve.contrast == pytest.approx(np.abs(num) / den, abs=1e-9)

    def test_ideal_echo_contrast_is_one_everywhere(self, spec, basis):
        ens = EnsembleSpec(distribution="gaussian", sigma_q=0.3, quadrature=9)
        times = np.array([0.0, 400.0, 1600.0])
        ramsey = phase_scan_contrast(
            FringeKind.RAMSEY, IdealPulses(), times, ens, spec, basis
        ).contrast
        echo = phase_scan_contrast(
            FringeKind.ECHO, IdealPulses(), times, ens, spec, basis, n_echo=2
        ).contrast
        assert echo == pytest.approx(np.ones_like(times), abs=1e-9)
        assert np.all(echo >= ramsey - 1e-9)


class TestContrastCurve:
    def test_decaying_cosine_envelope(self, period):
        tau = 900.0
        t = np.arange(0.0, 8 * period, period / 24)
        p = 0.5 + 0.5 * np.exp(-t / tau) * np.cos(2 * np.pi * t / period)
        curve = contrast_curve(FringeCurve(times=t, p_d=p), period)
        centers = curve.times
        expected = np.exp(-centers / tau)
        assert curve.contrast == pytest.approx(expected, rel=0.08)

    def test_span_validated(self, period):
        t = np.linspace(0.0, period, 30)
        p = np.full_like(t, 0.5)
        with pytest.raises(ValueError):
            contrast_curve(FringeCurve(times=t, p_d=p), period)

    def test_sampling_validated(self, period):
        t = np.arange(0.0, 10 * period, period / 3)
        p = np.full_like(t, 0.5)
        with pytest.raises(ValueError):
            contrast_curve(FringeCurve(times=t, p_d=p), period)


class TestCoherenceTime:
    def test_recovers_synthetic_tau(self):
        t = np.linspace(0.0, 3000.0, 40)
        tau = 800.0
        curve = ContrastCurve(times=t, contrast=np.exp(-t / tau))
        res = coherence_time(curve)
        assert res.fit_tau_us == pytest.approx(tau, rel=0.02)
        assert res.crossing_us == pytest.approx(tau, rel=0.05)
        assert res.fit_amplitude == pytest.approx(1.0, rel=0.02)

    def test_flat_curve_never_crosses(self):
        t = np.linspace(0.0, 1000.0, 12)
        curve = ContrastCurve(times=t, contrast=np.full_like(t, 0.9))
        res = coherence_time(curve)
        assert res.crossing_us is None
        assert np.isinf(res.fit_tau_us)

    def test_curve_starting_below_threshold_has_no_crossing(self):
        t = np.linspace(0.0, 1000.0, 12)
        curve = ContrastCurve(times=t, contrast=np.full_like(t, 0.2))
        res = coherence_time(curve)
        assert res.crossing_us is None

    def test_needs_three_samples(self):
        curve = ContrastCurve(
            times=np.array([0.0, 1.0]), contrast=np.array([1.0, 0.9])
        )
        with pytest.raises(ValueError):
            coherence_time(curve)


class TestSequenceEnsembleRegression:
    def test_locked_ramsey_contrast_start(self, spec, basis, period):
        # Realistic locked pulses on the reference ensemble: the fringe
        # keeps near-full contrast at short times.
        times = np.arange(0.0, 3 * period, 4.0)
        ens = EnsembleSpec.from_width(0.72, reading="fwhm", quadrature=21)
        model = SequencePulses(pi2=REFERENCE_PI2)
        curve = ensemble_fringe(
            FringeKind.RAMSEY, model, times, ens, spec, basis, threads=4
        )
        contrast = contrast_curve(curve, period)
        assert contrast.contrast[0] > 0.9

    def test_unlocked_pulses_still_run(self, spec, basis):
        model = SequencePulses(pi2=REFERENCE_PI2, phase_locked=False)
        p = ramsey_pd(model, 50.0, np.zeros(2), spec, basis)
        assert 0.0 <= p <= 1.0 + 1e-9
