import cmath
import math

import numpy as np
import pytest

from bcdimer.bicomplex import Bicomplex, J, K
from bcdimer.model import (
    DimerParams,
    DimerSystem,
    LinearTwoMode,
    residual,
)
from bcdimer.solver import (
    GaugeDegenerate,
    NoConvergence,
    RealSystemView,
    SolveConfig,
    build_seed_lattice,
    canonical_gauge,
    dedup_states,
    find_all_states,
    newton_solve,
    state_distance,
)

R2 = 1.0 / math.sqrt(2.0)
SYSTEM = DimerSystem()
CFG = SolveConfig(jacobian="analytic")


def closed_form_mu(v: float, gamma: float) -> complex:
    return cmath.sqrt(complex(v * v - gamma * gamma, 0.0))


class TestRealView:
    def test_counts(self):
        view = RealSystemView(SYSTEM, DimerParams(v=1.0), CFG)
        assert view.n_unknowns == 12
        assert view.n_equations == 12
        x = view.pack((Bicomplex(R2), Bicomplex(R2)), Bicomplex(1.0))
        assert view.residual_vector(x).shape == (12,)

    def test_complex_seed_has_zero_jk_rows(self):
        p = DimerParams(v=1.0, g=-1.0, gamma=0.3)
        view = RealSystemView(SYSTEM, p, CFG)
        x = view.pack(
            (Bicomplex.from_complex(0.6 + 0.1j), Bicomplex.from_complex(0.7 - 0.2j)),
            Bicomplex.from_complex(0.5 + 0.05j),
        )
        f = view.residual_vector(x)
        # j and k components of both residual rows
        for base in (0, 4):
            assert abs(f[base + 1]) < 1e-15
            assert abs(f[base + 3]) < 1e-15

    def test_dropped_normalization_components_vanish(self):
        # the i and k parts of the normalization residual are identical zeros
        rng = np.random.default_rng(21)
        from bcdimer.model import normalization_residual

        for _ in range(200):
            psi = tuple(Bicomplex(*rng.uniform(-1, 1, 4)) for _ in range(2))
            (psi1, psi2), _mu = canonical_gauge(psi, Bicomplex())
            n = normalization_residual(psi1, psi2)
            assert abs(n.z2) < 1e-14
            assert abs(n.z3) < 1e-14

    def test_gauge_degenerate(self):
        p = DimerParams(v=1.0)
        view = RealSystemView(SYSTEM, p, CFG)
        x = view.pack((Bicomplex(0.0), Bicomplex(1.0)), Bicomplex(0.0))
        with pytest.raises(GaugeDegenerate):
            view.residual_vector(x)

    def test_analytic_matches_central_differences(self):
        rng = np.random.default_rng(3)
        p = DimerParams(v=1.0, g=-1.3, gamma=0.4, s=0.05)
        view = RealSystemView(SYSTEM, p, CFG)
        for _ in range(10):
            x = rng.uniform(-1, 1, 12)
            x[0] += 2.0  # keep the gauge amplitude healthy
            ja = view._analytic_jacobian(x)
            h = 1e-6
            jc = np.empty((12, 12))
            for col in range(12):
                xp, xm = x.copy(), x.copy()
                xp[col] += h
                xm[col] -= h
                jc[:, col] = (
                    view.residual_vector(xp) - view.residual_vector(xm)
                ) / (2 * h)
            scale = max(1.0, np.max(np.abs(jc)))
            assert np.max(np.abs(ja - jc)) / scale < 1e-5


class TestNewton:
    def test_linear_symmetric_pair(self):
        p = DimerParams(v=1.0, g=0.0, gamma=0.5)
        target = closed_form_mu(1.0, 0.5).real
        seed = (
            (Bicomplex(R2), Bicomplex.from_complex(R2 * cmath.exp(0.5j))),
            Bicomplex(0.8),
        )
        st = newton_solve(SYSTEM, p, seed, CFG)
        assert abs(st.mu.z0 - target) < 1e-10
        assert st.residual_norm < CFG.residual_tol
        assert st.is_complex_state and st.is_pt_symmetric

    def test_seed_must_be_finite(self):
        p = DimerParams(v=1.0)
        seed = ((Bicomplex(math.nan), Bicomplex(R2)), Bicomplex(0.0))
        with pytest.raises(NoConvergence):
            newton_solve(SYSTEM, p, seed, CFG)

    def test_result_reverifies_through_model(self):
        p = DimerParams(v=1.0, g=-1.0, gamma=0.4)
        for st in find_all_states(SYSTEM, p, CFG):
            r1, r2 = residual(st.psi1, st.psi2, st.mu, p)
            assert max(r1.max_abs(), r2.max_abs()) < CFG.residual_tol

    def test_bicomplex_state_beyond_tangent(self):
        # continued partner with distinct idempotent components of mu
        g, gam = -1.0, 1.2
        p = DimerParams(v=1.0, g=g, gamma=gam)
        w = math.sqrt(gam * gam - 1.0)
        seed_mu = Bicomplex(-g / 2) - w * J
        seed_psi2 = (1 / math.sqrt(2)) * (Bicomplex(0, 0, gam, 0) - w * J)
        st = newton_solve(SYSTEM, p, ((Bicomplex(R2), seed_psi2), seed_mu), CFG)
        pair = st.mu.to_idempotent()
        assert abs(pair.plus - pair.minus) > 1e-4
        assert not st.is_complex_state
        # matches the closed-form continuation
        assert abs(st.mu.z0 - (-g / 2)) < 1e-10
        assert abs(abs(st.mu.z1) - w) < 1e-10


class TestFindAllStates:
    def test_linear_below_tangent(self):
        p = DimerParams(v=1.0, g=0.0, gamma=0.5)
        states = find_all_states(SYSTEM, p, CFG)
        target = closed_form_mu(1.0, 0.5).real
        cx = [s for s in states if s.is_complex_state]
        assert len(cx) == 2
        assert sorted(abs(s.mu.z0) for s in cx) == pytest.approx(
            [target, target], abs=1e-10
        )
        # the continued picture carries the two k-offset partner states too
        bicx = [s for s in states if not s.is_complex_state]
        assert len(bicx) == 2
        for s in bicx:
            assert abs(abs(s.mu.z3) - target) < 1e-10
            assert abs(s.mu.z0) < 1e-10

    def test_linear_above_tangent(self):
        p = DimerParams(v=1.0, g=0.0, gamma=1.5)
        states = find_all_states(SYSTEM, p, CFG)
        cx = [s for s in states if s.is_complex_state]
        assert len(cx) == 2
        w = math.sqrt(1.5 ** 2 - 1.0)
        for s in cx:
            assert s.is_pt_symmetric is False
            assert abs(s.mu.z0) < 1e-10
            assert abs(abs(s.mu.z2) - w) < 1e-10

    def test_matches_linear_oracle_across_tangent(self):
        lin = LinearTwoMode()
        for gam in (0.25, 0.75, 1.25):
            p = DimerParams(v=1.0, g=0.0, gamma=gam)
            states = find_all_states(SYSTEM, p, CFG)
            oracle = lin.eigenpairs(p)
            assert len(states) == len(oracle) == 4
            for psi1, psi2, mu in oracle:
                best = min(
                    (max((mu - s.mu).max_abs(), 0.0) for s in states)
                )
                assert best < 1e-9

    def test_nonlinear_count_at_gamma_zero(self):
        # two equal-population states mu = -g/2 +- v plus the continued
        # self-trapped pair: four states in the continued picture
        p = DimerParams(v=1.0, g=-1.0, gamma=0.0)
        states = find_all_states(SYSTEM, p, CFG)
        assert len(states) == 4
        cx = sorted(s.mu.z0 for s in states if s.is_complex_state)
        assert cx == pytest.approx([-0.5, 1.5], abs=1e-10)

    def test_nonlinear_count_small_gamma(self):
        p = DimerParams(v=1.0, g=-1.0, gamma=0.1)
        states = find_all_states(SYSTEM, p, CFG)
        assert len(states) == 4
        assert sum(1 for s in states if s.is_complex_state) == 2
        assert sum(1 for s in states if not s.is_complex_state) == 2

    def test_gauge_invariance_of_dedup(self):
        # the same physical state reached through different seeds and gauges
        # collapses to one list entry
        p = DimerParams(v=1.0, g=-1.0, gamma=0.3)
        base = find_all_states(SYSTEM, p, CFG)
        seeds = []
        for st in base:
            for phase in (0.3, 1.2):
                c = cmath.exp(1j * phase) * 1.1
                pair1 = st.psi1.to_idempotent()
                pair2 = st.psi2.to_idempotent()
                um = 1.0 / c.conjugate()
                psi1 = Bicomplex.from_idempotent(pair1.plus * c, pair1.minus * um)
                psi2 = Bicomplex.from_idempotent(pair2.plus * c, pair2.minus * um)
                seeds.append(((psi1, psi2), st.mu))
        found = [newton_solve(SYSTEM, p, s, CFG) for s in seeds]
        merged = dedup_states(list(found) + list(base), CFG.dedup_tol)
        assert len(merged) == len(base)

    def test_sorted_by_re_mu(self):
        p = DimerParams(v=1.0, g=-1.0, gamma=0.4)
        states = find_all_states(SYSTEM, p, CFG)
        keys = [(s.mu.z0, s.mu.z1) for s in states]
        assert keys == sorted(keys)

    def test_coarse_grid_still_finds_complex_pair(self):
        cfg = SolveConfig(jacobian="analytic", multistart_grid="coarse")
        p = DimerParams(v=1.0, g=0.0, gamma=0.5)
        states = find_all_states(SYSTEM, p, cfg)
        assert sum(1 for s in states if s.is_complex_state) == 2


class TestSeedLattice:
    def test_deterministic(self):
        p = DimerParams(v=1.0, g=-1.0, gamma=0.4)
        a = build_seed_lattice(p, CFG)
        b = build_seed_lattice(p, CFG)
        assert len(a) == len(b)
        for (psa, mua), (psb, mub) in zip(a, b):
            assert (mua - mub).max_abs() == 0.0
            assert all((x - y).max_abs() == 0.0 for x, y in zip(psa, psb))

    def test_coarse_is_smaller(self):
        p = DimerParams(v=1.0, g=-1.0, gamma=0.4)
        fine = build_seed_lattice(p, SolveConfig())
        coarse = build_seed_lattice(p, SolveConfig(multistart_grid="coarse"))
        assert len(coarse) < len(fine)


class TestCanonicalGauge:
    def test_idempotent_on_canonical_states(self):
        p = DimerParams(v=1.0, g=-1.0, gamma=1.2)
        for st in find_all_states(SYSTEM, p, CFG):
            psi, mu = canonical_gauge((st.psi1, st.psi2), st.mu)
            assert (psi[0] - st.psi1).max_abs() < 1e-12
            assert (psi[1] - st.psi2).max_abs() < 1e-12
            pair = psi[0].to_idempotent()
            assert abs(pair.plus.imag) < 1e-12
            assert pair.plus.real > 0
            assert abs(abs(pair.plus) - abs(pair.minus)) < 1e-10

    def test_distance_zero_iff_same_state(self):
        p = DimerParams(v=1.0, g=-1.0, gamma=0.7)
        states = find_all_states(SYSTEM, p, CFG)
        for i, a in enumerate(states):
            for j, b in enumerate(states):
                d = state_distance(a, b)
                if i == j:
                    assert d == 0.0
                else:
                    assert d > CFG.dedup_tol
