import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from molfluor import (
    DIM,
    DensityMatrix,
    Level,
    ModelParams,
    build_collapse_ops,
    build_hamiltonian,
    build_liouvillian,
    build_model_liouvillian,
    default_timestep,
    dissipator_apply,
    intensity,
    ket_bra,
    solve_point,
    steady_state,
)

finite_p = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False)


class TestModelParams:
    def test_gamma_d_defaults_to_gamma_b(self):
        assert ModelParams(gamma_b=0.15).gamma_d == 0.15
        assert ModelParams(gamma_b=0.15, gamma_d=1.0).gamma_d == 1.0

    @pytest.mark.parametrize("bad", [
        dict(omega_ab=-0.1), dict(q=-1e-9), dict(omega12=0.0),
        dict(gamma_u=0.0), dict(gamma_b=-1.0), dict(p_u=-1.5), dict(p_v=2.0),
    ])
    def test_validation(self, bad):
        with pytest.raises(ValueError):
            ModelParams(**bad)

    def test_replace_round_trip(self):
        p = ModelParams(omega_ab=0.3, delta_2ph=1.0)
        q = p.replace(delta_2ph=-2.0)
        assert q.delta_2ph == -2.0 and q.omega_ab == 0.3
        assert p.delta_2ph == 1.0  # original untouched


class TestHamiltonian:
    def test_diagonal_without_drives(self):
        p = ModelParams(omega12=6.0, delta_2ph=0.0, delta_1ph=0.0)
        h = build_hamiltonian(p)
        assert np.array_equal(np.diag(h), np.array([3.0, -3.0, 0.0, 0.0, 0.0],
                                                   dtype=complex))

    def test_detuned_diagonal(self):
        p = ModelParams(omega12=6.0, delta_2ph=1.2, delta_1ph=0.3)
        h = build_hamiltonian(p)
        assert h[Level.A1, Level.A1] == pytest.approx(3.0 - 1.2)
        assert h[Level.A2, Level.A2] == pytest.approx(-3.0 - 1.2)
        assert h[Level.B, Level.B] == pytest.approx(-0.6 - 0.3)
        assert h[Level.C, Level.C] == 0.0
        assert h[Level.D, Level.D] == 0.0

    def test_coupling_entries(self):
        p = ModelParams(omega_ab=0.4, omega_bc=0.7, q=0.2)
        h = build_hamiltonian(p)
        assert h[Level.A1, Level.C] == 0.2 and h[Level.A2, Level.C] == 0.2
        assert h[Level.B, Level.C] == 0.7
        assert h[Level.A1, Level.B] == 0.4 and h[Level.A2, Level.B] == 0.4

    @given(st.floats(0, 2), st.floats(0, 2), st.floats(0, 2),
           st.floats(-5, 5), st.floats(-2, 2))
    @settings(max_examples=50, deadline=None)
    def test_always_hermitian(self, oab, obc, q, d2, d1):
        h = build_hamiltonian(ModelParams(omega_ab=oab, omega_bc=obc, q=q,
                                          delta_2ph=d2, delta_1ph=d1))
        assert np.abs(h - h.conj().T).max() == 0.0


class TestCollapseOps:
    def test_channel_count_at_extreme_polarization(self):
        # p_v = 1 removes the antisymmetric visible channel,
        # p_u = -1 removes the symmetric uv channel: 4 operators remain
        ops = build_collapse_ops(ModelParams(p_u=-1.0, p_v=1.0))
        assert len(ops) == 4
        ops = build_collapse_ops(ModelParams(p_u=0.0, p_v=0.0))
        assert len(ops) == 6

    def test_parallel_dipoles_decay_through_symmetric_state(self):
        ops = build_collapse_ops(ModelParams(gamma_v=0.5, p_v=1.0, p_u=-1.0))
        to_b = [op for op in ops if np.abs(op[Level.B]).max() > 0]
        assert len(to_b) == 1
        sym = (ket_bra(Level.B, Level.A1) + ket_bra(Level.B, Level.A2)) / np.sqrt(2)
        assert np.abs(to_b[0] - np.sqrt(2 * 0.5) * sym).max() <= 1e-15

    @given(finite_p, finite_p)
    @settings(max_examples=50, deadline=None)
    def test_total_upper_decay_rate_is_polarization_independent(self, pu, pv):
        p = ModelParams(gamma_u=0.7, gamma_v=0.3, p_u=pu, p_v=pv)
        total = sum(op.conj().T @ op for op in build_collapse_ops(p))
        assert total[Level.A1, Level.A1].real == pytest.approx(1.0)
        assert total[Level.A2, Level.A2].real == pytest.approx(1.0)

    @given(finite_p, finite_p)
    @settings(max_examples=50, deadline=None)
    def test_upper_block_cross_damping(self, pu, pv):
        # The off-diagonal of sum C^dag C on the doublet is the interference
        # cross-damping gamma_u p_u + gamma_v p_v; the block is proportional
        # to the identity exactly when that combination vanishes.
        gu, gv = 0.7, 0.3
        p = ModelParams(gamma_u=gu, gamma_v=gv, p_u=pu, p_v=pv)
        total = sum(op.conj().T @ op for op in build_collapse_ops(p))
        cross = total[Level.A1, Level.A2].real
        assert cross == pytest.approx(gu * pu + gv * pv, abs=1e-12)

    def test_orthogonal_dipoles_reduce_to_independent_decays(self):
        # p = 0: the symmetric/antisymmetric pairs act exactly like four
        # uncorrelated one-level decay channels (oracle: direct dissipators)
        p = ModelParams(gamma_u=0.7, gamma_v=0.3, p_u=0.0, p_v=0.0)
        ops = build_collapse_ops(p)
        independent = [
            np.sqrt(0.3) * ket_bra(Level.B, Level.A1),
            np.sqrt(0.3) * ket_bra(Level.B, Level.A2),
            np.sqrt(0.7) * ket_bra(Level.D, Level.A1),
            np.sqrt(0.7) * ket_bra(Level.D, Level.A2),
            np.sqrt(p.gamma_b) * ket_bra(Level.C, Level.B),
            np.sqrt(p.gamma_d) * ket_bra(Level.C, Level.D),
        ]
        rng = np.random.default_rng(0)
        for _ in range(5):
            a = rng.normal(size=(DIM, DIM)) + 1j * rng.normal(size=(DIM, DIM))
            rho = a + a.conj().T
            lhs = sum(dissipator_apply(c, rho) for c in ops)
            rhs = sum(dissipator_apply(c, rho) for c in independent)
            assert np.abs(lhs - rhs).max() <= 1e-15 * np.abs(rho).max()


class TestIntensity:
    def _state(self, p11, p22, re12):
        m = np.zeros((DIM, DIM), dtype=complex)
        m[0, 0], m[1, 1] = p11, p22
        m[0, 1] = m[1, 0] = re12
        m[3, 3] = 1.0 - p11 - p22
        return DensityMatrix.from_matrix(m)

    def test_perfect_destructive_interference(self):
        rho = self._state(0.1, 0.1, 0.1)
        assert intensity(rho, gamma=0.5, p=-1.0) == 0.0

    def test_orthogonal_dipoles_sum_populations(self):
        rho = self._state(0.1, 0.2, 0.05)
        assert intensity(rho, gamma=0.5, p=0.0) == pytest.approx(0.15)

    def test_weak_two_photon_central_value(self, two_photon_weak_params):
        rho, _ = solve_point(two_photon_weak_params.replace(delta_2ph=0.0))
        # destructive interference leaves ~5.84e-11 on the parallel transition
        assert intensity(rho, 0.5, 1.0) == pytest.approx(5.8437e-11, rel=1e-3)

    def test_validation(self):
        rho = self._state(0.1, 0.1, 0.0)
        with pytest.raises(ValueError, match="p"):
            intensity(rho, gamma=0.5, p=1.5)
        with pytest.raises(ValueError, match="gamma"):
            intensity(rho, gamma=0.0, p=0.5)

    @given(finite_p)
    @settings(max_examples=50, deadline=None)
    def test_nonnegative_for_physical_states(self, p):
        rho = self._state(0.3, 0.1, -0.12)  # valid: |rho12| <= sqrt(p11 p22)
        assert intensity(rho, gamma=1.0, p=p) >= 0.0


class TestSolvePoint:
    def test_undriven_gives_zero_intensity(self):
        _, triple = solve_point(ModelParams())
        assert triple.i_u == 0.0 and triple.i_v == 0.0 and triple.i_p0 == 0.0

    def test_two_photon_resonance_intensity(self, two_photon_weak_params):
        _, triple = solve_point(two_photon_weak_params.replace(delta_2ph=-3.0))
        # gamma_v (4 q^2 + q^2/36.25 + 2 * 0.25 q^2 / 9.0625)
        assert triple.i_v == pytest.approx(2.0414e-8, rel=1e-2)

    def test_cascade_interference_dichotomy(self, cascade_weak_params):
        _, triple = solve_point(cascade_weak_params.replace(delta_2ph=0.0))
        # the antiparallel trace keeps the central resonance, the parallel
        # trace suppresses it
        assert triple.i_u / triple.i_v > 10.0

    def test_symmetric_state_population_identity(self, two_photon_weak_params):
        # for p_v = 1 the visible intensity equals twice the rate times the
        # population of the symmetric combination
        rho, triple = solve_point(two_photon_weak_params.replace(delta_2ph=1.0))
        s = np.zeros(DIM, dtype=complex)
        s[Level.A1] = s[Level.A2] = 1.0 / np.sqrt(2)
        pop_s = float((s.conj() @ rho.matrix @ s).real)
        assert triple.i_v == pytest.approx(2.0 * 0.5 * pop_s, abs=1e-12)

    def test_coherence_bound_and_dark_coherences(self, cascade_weak_params):
        for delta in (-3.0, -1.0, 0.0, 2.0):
            rho, _ = solve_point(cascade_weak_params.replace(delta_2ph=delta))
            r12 = rho.coherence(Level.A1, Level.A2)
            assert abs(r12) ** 2 <= (rho.population(Level.A1)
                                     * rho.population(Level.A2)) + 1e-15
            for i, j in [(Level.C, Level.D), (Level.D, Level.A1),
                         (Level.B, Level.D), (Level.D, Level.A2)]:
                assert abs(rho.coherence(i, j)) <= 1e-12

    def test_d_level_energy_shift_is_unobservable(self, cascade_weak_params):
        # |d> couples only dissipatively; shifting its rotating-frame energy
        # must leave the steady state untouched
        p = cascade_weak_params.replace(delta_2ph=1.3)
        h = build_hamiltonian(p)
        h_shifted = h.copy()
        h_shifted[Level.D, Level.D] = 7.7
        cops = build_collapse_ops(p)
        rho = steady_state(build_liouvillian(h, cops)).rho
        rho_shifted = steady_state(build_liouvillian(h_shifted, cops)).rho
        assert np.abs(rho.matrix - rho_shifted.matrix).max() <= 1e-12

    @pytest.mark.parametrize("factor", [0.1, 10.0])
    def test_gamma_d_insensitivity_in_weak_field(self, cascade_weak_params, factor):
        base = solve_point(cascade_weak_params.replace(delta_2ph=0.0))[1]
        varied = solve_point(cascade_weak_params.replace(
            delta_2ph=0.0, gamma_d=factor * cascade_weak_params.gamma_b))[1]
        for name in ("i_u", "i_v", "i_p0"):
            a, b = getattr(base, name), getattr(varied, name)
            assert abs(a - b) <= 1e-5 * max(a, b)


class TestDefaultTimestep:
    def test_scales_with_largest_magnitude(self):
        p = ModelParams(omega12=6.0)
        assert default_timestep(p) == pytest.approx(0.01 / 6.0)
        p = ModelParams(omega12=6.0, delta_2ph=-12.0)
        assert default_timestep(p) == pytest.approx(0.01 / 12.0)
