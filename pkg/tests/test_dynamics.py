import numpy as np
import pytest

from artifact.dynamics import (
    PulseSequence,
    PulseStep,
    QuantumState,
    apply_sequence,
    band_eig,
    band_populations,
    bloch_state,
    default_band_pair,
    propagator,
    sequence_operator,
    solve_bands,
)
from artifact.lattice import (
    Geometry,
    LatticeSpec,
    angular_frequency_per_Er,
    build_basis,
    hamiltonian_off,
    hamiltonian_on,
)
from artifact.sequences import REFERENCE_PI2


class TestBandPair:
    def test_triangular(self):
        assert default_band_pair(Geometry.TRIANGULAR_3BEAM) == (1, 4)

    def test_1d(self):
        assert default_band_pair(Geometry.STANDING_WAVE_1D) == (1, 3)


class TestSolveBands:
    def test_free_spectrum(self, spec, basis):
        sol = solve_bands(hamiltonian_on(basis, spec, np.zeros(2), depth=0.0))
        assert sol.energies[0] == pytest.approx(0.0, abs=1e-12)
        assert np.allclose(sol.energies[1:7], 3.0, atol=1e-12)
        assert sol.energies[7] == pytest.approx(9.0, abs=1e-12)

    def test_orthonormal(self, spec, basis):
        sol = solve_bands(hamiltonian_on(basis, spec, np.array([0.17, 0.05])))
        overlap = sol.states.conj().T @ sol.states
        assert np.allclose(overlap, np.eye(basis.size), atol=1e-10)

    def test_eigen_residual(self, spec, basis):
        h = hamiltonian_on(basis, spec, np.array([0.1, -0.2]))
        sol = solve_bands(h)
        resid = h.matrix @ sol.states - sol.states * sol.energies
        assert np.max(np.abs(resid)) < 1e-10

    def test_deterministic_phases(self, spec, basis):
        sol = solve_bands(hamiltonian_on(basis, spec, np.array([0.07, 0.21])))
        for col in sol.states.T:
            i = np.argmax(np.abs(col))
            assert col[i].real > 0
            assert abs(col[i].imag) < 1e-12

    def test_cache_consistency(self, spec, basis):
        q = np.array([0.123, -0.456])
        e1, v1 = band_eig(q, spec, basis)
        e2, v2 = band_eig(q, spec, basis)
        assert np.array_equal(e1, e2)
        assert np.array_equal(v1, v2)


class TestBlochState:
    def test_normalized(self, spec, basis):
        st = bloch_state(1, np.zeros(2), spec, basis)
        assert np.linalg.norm(st.amplitudes) == pytest.approx(1.0, abs=1e-12)

    def test_band_index_validated(self, spec, basis):
        with pytest.raises(ValueError):
            bloch_state(0, np.zeros(2), spec, basis)
        with pytest.raises(ValueError):
            bloch_state(basis.size + 1, np.zeros(2), spec, basis)

    def test_ground_band_dominated_by_g0(self, spec, basis):
        st = bloch_state(1, np.zeros(2), spec, basis)
        i0 = basis.site_index((0, 0))
        weights = np.abs(st.amplitudes) ** 2
        assert weights[i0] > 0.4
        assert i0 == np.argmax(weights)


class TestPropagator:
    def test_zero_time_identity(self, spec, basis):
        h = hamiltonian_on(basis, spec, np.zeros(2))
        u = propagator(h, 0.0, spec)
        assert np.allclose(u, np.eye(basis.size), atol=1e-12)

    def test_negative_time_rejected(self, spec, basis):
        h = hamiltonian_on(basis, spec, np.zeros(2))
        with pytest.raises(ValueError):
            propagator(h, -1.0, spec)

    def test_unitary(self, spec, basis):
        h = hamiltonian_on(basis, spec, np.array([0.11, 0.07]))
        u = propagator(h, 13.7, spec)
        assert np.max(np.abs(u.conj().T @ u - np.eye(basis.size))) < 1e-10

    def test_semigroup(self, spec, basis):
        h = hamiltonian_on(basis, spec, np.zeros(2))
        u_ab = propagator(h, 9.0, spec)
        u_a = propagator(h, 4.0, spec)
        u_b = propagator(h, 5.0, spec)
        assert np.allclose(u_ab, u_b @ u_a, atol=1e-9)

    def test_small_basis_taylor_oracle(self, spec):
        # Independent matrix exponential: scaling-and-squaring Taylor series
        # on the 9-wave basis, compared elementwise to the package product.
        small = build_basis(spec, 1)
        h = hamiltonian_on(small, spec, np.array([0.2, -0.1]))
        t_us = 7.3
        w = angular_frequency_per_Er(spec)
        a = -1j * w * t_us * h.matrix
        s = 8
        a_scaled = a / 2**s
        term = np.eye(small.size, dtype=complex)
        acc = np.eye(small.size, dtype=complex)
        for k in range(1, 30):
            term = term @ a_scaled / k
            acc = acc + term
        for _ in range(s):
            acc = acc @ acc
        u = propagator(h, t_us, spec)
        assert np.max(np.abs(u - acc)) < 1e-9


class TestPulseStructures:
    def test_negative_durations_rejected(self):
        with pytest.raises(ValueError):
            PulseStep(-1.0, 0.0)
        with pytest.raises(ValueError):
            PulseStep(0.0, -0.5)

    def test_from_durations_roundtrip(self):
        seq = PulseSequence.from_durations([(1.0, 2.0), (3.0, 4.0)])
        assert list(seq.durations) == [1.0, 3.0, 2.0, 4.0]
        assert len(seq.steps) == 2

    def test_from_durations_with_depths(self):
        seq = PulseSequence.from_durations([(1.0, 2.0)], depths=[4.5])
        assert seq.steps[0].depth == 4.5
        with pytest.raises(ValueError):
            PulseSequence.from_durations([(1.0, 2.0)], depths=[4.5, 5.0])

    def test_dict_roundtrip(self):
        seq = PulseSequence.from_durations([(1.5, 2.5), (3.5, 0.0)], depths=[4.0, 5.5])
        back = PulseSequence.from_dict(seq.to_dict())
        assert back == seq

    def test_dict_roundtrip_without_depth(self):
        seq = PulseSequence.from_durations([(1.5, 2.5)])
        data = seq.to_dict()
        assert "depth_Er" not in data["steps"][0]
        assert PulseSequence.from_dict(data) == seq


class TestEvolution:
    def test_zero_duration_sequence_is_identity(self, spec, basis):
        st = bloch_state(1, np.zeros(2), spec, basis)
        seq = PulseSequence.from_durations([(0.0, 0.0)])
        out = apply_sequence(st, seq, spec, basis)
        assert np.allclose(out.amplitudes, st.amplitudes, atol=1e-12)

    def test_sequence_operator_unitary(self, spec, basis):
        op = sequence_operator(REFERENCE_PI2, np.zeros(2), spec, basis)
        assert np.max(np.abs(op.conj().T @ op - np.eye(basis.size))) < 1e-10

    def test_sequence_operator_composes(self, spec, basis):
        q = np.array([0.05, 0.02])
        s1 = PulseSequence.from_durations([(3.0, 4.0)])
        s2 = PulseSequence.from_durations([(5.0, 6.0)])
        both = PulseSequence(steps=s1.steps + s2.steps)
        u1 = sequence_operator(s1, q, spec, basis)
        u2 = sequence_operator(s2, q, spec, basis)
        u = sequence_operator(both, q, spec, basis)
        assert np.allclose(u, u2 @ u1, atol=1e-10)

    def test_norm_preserved(self, spec, basis):
        st = bloch_state(1, np.zeros(2), spec, basis)
        out = apply_sequence(st, REFERENCE_PI2, spec, basis)
        assert np.linalg.norm(out.amplitudes) == pytest.approx(1.0, abs=1e-9)

    def test_per_step_depth_override_changes_result(self, spec, basis):
        flat = PulseSequence.from_durations([(10.0, 5.0)])
        deep = PulseSequence.from_durations([(10.0, 5.0)], depths=[6.0])
        st = bloch_state(1, np.zeros(2), spec, basis)
        out_flat = apply_sequence(st, flat, spec, basis)
        out_deep = apply_sequence(st, deep, spec, basis)
        assert not np.allclose(out_flat.amplitudes, out_deep.amplitudes, atol=1e-6)

    def test_off_segment_uses_free_hamiltonian(self, spec, basis):
        # A pure-off step must equal the free propagator.
        q = np.array([0.03, 0.01])
        seq = PulseSequence.from_durations([(0.0, 8.0)])
        u = sequence_operator(seq, q, spec, basis)
        h = hamiltonian_off(basis, q)
        assert np.allclose(u, propagator(h, 8.0, spec), atol=1e-10)


class TestBandPopulations:
    def test_pure_band_state(self, spec, basis):
        sol = solve_bands(hamiltonian_on(basis, spec, np.zeros(2)))
        st = QuantumState(quasimomentum=np.zeros(2), amplitudes=sol.states[:, 3])
        pops = band_populations(st, sol, 6)
        assert pops[3] == pytest.approx(1.0, abs=1e-12)
        assert sum(pops) == pytest.approx(1.0, abs=1e-12)

    def test_populations_sum_below_one(self, spec, basis):
        sol = solve_bands(hamiltonian_on(basis, spec, np.zeros(2)))
        st = bloch_state(1, np.zeros(2), spec, basis)
        out = apply_sequence(st, REFERENCE_PI2, spec, basis)
        pops = band_populations(out, sol, 6)
        assert 0.0 <= sum(pops) <= 1.0 + 1e-9

    def test_band_count_validated(self, spec, basis):
        sol = solve_bands(hamiltonian_on(basis, spec, np.zeros(2)))
        st = bloch_state(1, np.zeros(2), spec, basis)
        with pytest.raises(ValueError):
            band_populations(st, sol, basis.size + 1)

    def test_half_pi_leaves_mid_bands_empty(self, spec, basis):
        # The shipped half-pi sequence moves population S -> D with
        # negligible transfer into the symmetry-mismatched P bands.
        sol = solve_bands(hamiltonian_on(basis, spec, np.zeros(2)))
        st = bloch_state(1, np.zeros(2), spec, basis)
        out = apply_sequence(st, REFERENCE_PI2, spec, basis)
        pops = band_populations(out, sol, 6)
        assert pops[1] + pops[2] < 1e-8
        assert pops[0] + pops[3] > 0.96
