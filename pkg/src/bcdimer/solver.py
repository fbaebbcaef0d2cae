"""Stationary-state solver for continued systems.

A bicomplex stationary problem with N amplitudes is solved as a square real
system in 4N + 4 unknowns (four real components per amplitude plus four for
the nonlinear eigenvalue mu).  The equation stack is

* 4 real components per amplitude residual,
* 2 real components of the normalization residual (its i and k components
  vanish identically by the conjugation-swap symmetry and are asserted, not
  assumed),
* 2 gauge rows removing the continued phase freedom.

The continued phase group is two-dimensional: a common phase rotation of
both idempotent components and a reciprocal magnitude scaling between them.
The gauge rows pin the phase of one amplitude's plus component and balance
the two component magnitudes.  Bicomplex-only states carry an irreducible
relative phase between their idempotent components, so demanding that both
components be real would make them unreachable; the balance row avoids that.

Solves use damped Newton with a finite-difference (default) or analytic
Jacobian; :func:`find_all_states` runs a deterministic multistart lattice
with gauge-aligned deduplication.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .bicomplex import Bicomplex, J, K
from .model import LinearTwoMode, StationaryState, classify_flags

__all__ = [
    "GaugeDegenerate",
    "NoConvergence",
    "SolveConfig",
    "RealSystemView",
    "newton_solve",
    "find_all_states",
    "canonical_gauge",
    "state_distance",
    "build_seed_lattice",
]


class GaugeDegenerate(RuntimeError):
    """Gauge amplitude too small for the phase constraint to be well posed."""


class NoConvergence(RuntimeError):
    """Newton iteration failed (iteration cap or step-size underflow)."""


@dataclass
class SolveConfig:
    """Solver settings.

    ``multistart_grid`` selects the seed lattice built by
    :func:`build_seed_lattice`: populations over a grid, relative phases
    {0, +-pi/2, pi}, mu seeds from the linear-model eigenvalues with
    g-shifts, plus j/k-perturbed and idempotent-sector-combination seeds
    of magnitude ~0.1 targeting bicomplex-only states.
    """

    residual_tol: float = 1e-11
    max_iter: int = 100
    jacobian: str = "finite-difference"  # or "analytic"
    fd_step: float = 1e-7
    multistart_grid: str = "fine"  # or "coarse"
    dedup_tol: float = 1e-7
    classification_tol: float = 1e-8
    gauge_eps: float = 1e-12

    def __post_init__(self):
        if not self.residual_tol > 0:
            raise ValueError("residual_tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.jacobian not in ("finite-difference", "analytic"):
            raise ValueError(f"unknown jacobian mode {self.jacobian!r}")
        if self.multistart_grid not in ("fine", "coarse"):
            raise ValueError(f"unknown multistart grid {self.multistart_grid!r}")


# -- packing and small linear-algebra helpers ---------------------------


def _pack(psi, mu) -> np.ndarray:
    parts = [c for z in psi for c in z.as_tuple()]
    parts.extend(mu.as_tuple())
    return np.array(parts, dtype=float)


def _unpack(x: np.ndarray, n_amp: int):
    psi = tuple(Bicomplex(*x[4 * k : 4 * k + 4]) for k in range(n_amp))
    mu = Bicomplex(*x[4 * n_amp : 4 * n_amp + 4])
    return psi, mu


def _mult_matrix(b: Bicomplex) -> np.ndarray:
    """Real 4x4 matrix of x -> b*x acting on (z0, z1, z2, z3)."""
    b0, b1, b2, b3 = b.z0, b.z1, b.z2, b.z3
    return np.array(
        [
            [b0, -b1, -b2, b3],
            [b1, b0, -b3, -b2],
            [b2, -b3, b0, -b1],
            [b3, b2, b1, b0],
        ]
    )


_CONJ = np.diag([1.0, 1.0, -1.0, -1.0])


def _modulus_derivative(z: Bicomplex) -> np.ndarray:
    """Derivative of conj(z)*z with respect to the components of z."""
    return _mult_matrix(z) @ _CONJ + _mult_matrix(z.conj())


class RealSystemView:
    """Square real Newton system for one continued system at fixed params."""

    def __init__(self, system, params, cfg: SolveConfig, gauge_site: int = 0):
        self.system = system
        self.params = params
        self.cfg = cfg
        self.gauge_site = gauge_site
        self.n_amp = system.n_amplitudes
        self.n_unknowns = 4 * self.n_amp + 4
        self.n_equations = self.n_unknowns

    def pack(self, psi, mu) -> np.ndarray:
        return _pack(psi, mu)

    def unpack(self, x: np.ndarray):
        return _unpack(x, self.n_amp)

    def residual_vector(self, x: np.ndarray) -> np.ndarray:
        psi, mu = _unpack(x, self.n_amp)
        res = self.system.residual(psi, mu, self.params)
        norm = self.system.normalization_residual(psi)
        scale = max(1.0, max(z.max_abs() for z in psi) ** 2)
        if abs(norm.z2) > 1e-10 * scale or abs(norm.z3) > 1e-10 * scale:
            raise AssertionError(
                "normalization residual left the (1, j) plane; "
                "conjugation-swap symmetry violated"
            )
        zg = psi[self.gauge_site]
        pair = zg.to_idempotent()
        if min(abs(pair.plus), abs(pair.minus)) < self.cfg.gauge_eps:
            raise GaugeDegenerate(
                f"gauge amplitude {self.gauge_site} too small: {zg!r}"
            )
        out = np.empty(self.n_unknowns)
        for k, r in enumerate(res):
            out[4 * k : 4 * k + 4] = r.as_tuple()
        base = 4 * self.n_amp
        out[base] = norm.z0
        out[base + 1] = norm.z1
        # gauge: plus component i-real, idempotent magnitudes balanced
        out[base + 2] = zg.z2 - zg.z1
        out[base + 3] = 4.0 * (zg.z0 * zg.z3 - zg.z1 * zg.z2)
        return out

    def jacobian(self, x: np.ndarray, f0: np.ndarray | None = None) -> np.ndarray:
        if self.cfg.jacobian == "analytic" and hasattr(
            self.system, "residual_jacobian_blocks"
        ):
            return self._analytic_jacobian(x)
        return self._fd_jacobian(x, f0)

    def _fd_jacobian(self, x: np.ndarray, f0: np.ndarray | None) -> np.ndarray:
        if f0 is None:
            f0 = self.residual_vector(x)
        h = self.cfg.fd_step
        n = self.n_unknowns
        jac = np.empty((n, n))
        for col in range(n):
            xp = x.copy()
            xp[col] += h
            jac[:, col] = (self.residual_vector(xp) - f0) / h
        return jac

    def _analytic_jacobian(self, x: np.ndarray) -> np.ndarray:
        psi, mu = _unpack(x, self.n_amp)
        diag, nonlin, v = self.system.residual_jacobian_blocks(psi, mu, self.params)
        n = self.n_unknowns
        base = 4 * self.n_amp
        jac = np.zeros((n, n))
        coupling = v * np.eye(4)
        mod_der = [_modulus_derivative(z) for z in psi]
        for row in range(self.n_amp):
            r0 = 4 * row
            for col in range(self.n_amp):
                c0 = 4 * col
                if row == col:
                    jac[r0 : r0 + 4, c0 : c0 + 4] = (
                        _mult_matrix(diag[row])
                        + _mult_matrix(nonlin[row]) @ mod_der[row]
                    )
                else:
                    jac[r0 : r0 + 4, c0 : c0 + 4] = coupling
            jac[r0 : r0 + 4, base : base + 4] = -_mult_matrix(psi[row])
        for col in range(self.n_amp):
            c0 = 4 * col
            jac[base : base + 2, c0 : c0 + 4] = mod_der[col][0:2, :]
        g0 = 4 * self.gauge_site
        zg = psi[self.gauge_site]
        jac[base + 2, g0 : g0 + 4] = [0.0, -1.0, 1.0, 0.0]
        jac[base + 3, g0 : g0 + 4] = [
            4.0 * zg.z3,
            -4.0 * zg.z2,
            -4.0 * zg.z1,
            4.0 * zg.z0,
        ]
        return jac


# -- gauge alignment and distances ---------------------------------------


def _gauge_transform(psi, factor_plus: complex):
    """Apply the continued phase/boost factor (u+, u-) = (c, 1/conj(c))."""
    u_minus = 1.0 / factor_plus.conjugate()
    out = []
    for z in psi:
        pair = z.to_idempotent()
        out.append(
            Bicomplex.from_idempotent(pair.plus * factor_plus, pair.minus * u_minus)
        )
    return tuple(out)


def canonical_gauge(psi, mu, gauge_eps: float = 1e-12, site_floor: float = 1e-6):
    """Unique gauge representative: one amplitude's plus component real and
    positive, idempotent magnitudes balanced.

    The first amplitude above the floor is the gauge carrier, so the choice
    does not flicker between sites for states with comparable magnitudes.
    """
    best = None
    for k, z in enumerate(psi):
        pair = z.to_idempotent()
        if min(abs(pair.plus), abs(pair.minus)) >= site_floor:
            best = k
            break
    if best is None:
        best_val = -1.0
        for k, z in enumerate(psi):
            pair = z.to_idempotent()
            val = min(abs(pair.plus), abs(pair.minus))
            if val > best_val:
                best, best_val = k, val
        if best is None or best_val < gauge_eps:
            return tuple(psi), mu
    pair = psi[best].to_idempotent()
    t = math.sqrt(abs(pair.minus) / abs(pair.plus))
    c = t * cmath.exp(-1j * cmath.phase(pair.plus))
    return _gauge_transform(psi, c), mu


def state_distance(a: StationaryState, b: StationaryState) -> float:
    """Max-norm distance between gauge-canonical states."""
    d = 0.0
    for za, zb in ((a.psi1, b.psi1), (a.psi2, b.psi2), (a.mu, b.mu)):
        d = max(d, (za - zb).max_abs())
    return d


def _sort_key(state: StationaryState):
    return (
        state.mu.z0,
        state.mu.z1,
        state.mu.z2,
        state.mu.z3,
        state.psi1.z0,
        state.psi1.z1,
        state.psi1.z2,
        state.psi1.z3,
        state.psi2.z0,
    )


def dedup_states(states: list[StationaryState], tol: float) -> list[StationaryState]:
    """Drop near-duplicates, keeping the lowest-residual representative."""
    kept: list[StationaryState] = []
    for st in sorted(states, key=lambda s: s.residual_norm):
        if all(state_distance(st, other) > tol for other in kept):
            kept.append(st)
    kept.sort(key=_sort_key)
    return kept


# -- Newton iteration -----------------------------------------------------

_MAX_HALVINGS = 30
_POLISH_ITERS = 8


def _make_state(view: RealSystemView, x: np.ndarray, rnorm: float) -> StationaryState:
    psi, mu = view.unpack(x)
    psi, mu = canonical_gauge(psi, mu, view.cfg.gauge_eps)
    is_c, is_pt = classify_flags(psi[0], psi[1], mu, view.cfg.classification_tol)
    return StationaryState(
        psi1=psi[0],
        psi2=psi[1],
        mu=mu,
        residual_norm=rnorm,
        is_complex_state=is_c,
        is_pt_symmetric=is_pt,
    )


def newton_solve(system, params, seed, cfg: SolveConfig | None = None,
                 gauge_site: int = 0) -> StationaryState:
    """Damped Newton from one seed; returns a converged stationary state.

    ``seed`` is a (psi1, psi2, mu) triple of Bicomplex values (or a
    StationaryState).  Raises :class:`NoConvergence` on iteration cap or
    after 30 halvings of a damped step, :class:`GaugeDegenerate` when the
    gauge amplitude vanishes at the current iterate.
    """
    if cfg is None:
        cfg = SolveConfig()
    if isinstance(seed, StationaryState):
        seed = ((seed.psi1, seed.psi2), seed.mu)
    psi, mu = seed
    view = RealSystemView(system, params, cfg, gauge_site)
    x = view.pack(psi, mu)
    if not np.all(np.isfinite(x)):
        raise NoConvergence("seed has non-finite entries")
    f = view.residual_vector(x)
    fnorm = float(np.max(np.abs(f)))
    for _ in range(cfg.max_iter):
        if fnorm < cfg.residual_tol:
            x, f, fnorm = _polish(view, x, f, fnorm)
            return _make_state(view, x, fnorm)
        try:
            jac = view.jacobian(x, f)
            step = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence(f"singular jacobian: {exc}") from exc
        if not np.all(np.isfinite(step)):
            raise NoConvergence("non-finite Newton step")
        t = 1.0
        for _halving in range(_MAX_HALVINGS + 1):
            try:
                f_new = view.residual_vector(x + t * step)
                fn_new = float(np.max(np.abs(f_new)))
            except GaugeDegenerate:
                fn_new = math.inf
            if fn_new < fnorm:
                break
            t *= 0.5
        else:
            raise NoConvergence("step-size underflow in damped Newton")
        x = x + t * step
        f, fnorm = f_new, fn_new
    if fnorm < cfg.residual_tol:
        return _make_state(view, x, fnorm)
    raise NoConvergence(f"no convergence after {cfg.max_iter} iterations "
                        f"(residual {fnorm:.3e})")


def _polish(view: RealSystemView, x, f, fnorm):
    """Extra full Newton steps past the tolerance.

    Near-degenerate roots (close to exceptional points) leave a cloud of
    approximate solutions at distance ~sqrt(tol); polishing pulls every
    seed down to the roundoff floor so deduplication can merge them.
    """
    for _ in range(_POLISH_ITERS):
        try:
            jac = view.jacobian(x, f)
            step = np.linalg.solve(jac, -f)
            f_new = view.residual_vector(x + step)
        except (np.linalg.LinAlgError, GaugeDegenerate):
            break
        fn_new = float(np.max(np.abs(f_new)))
        if not fn_new < fnorm:
            break
        x, f, fnorm = x + step, f_new, fn_new
    return x, f, fnorm


# -- multistart -----------------------------------------------------------


def _complex_amplitudes(a: float, phase: float):
    psi1 = Bicomplex(math.sqrt(a))
    psi2 = Bicomplex.from_complex(math.sqrt(1.0 - a) * cmath.exp(1j * phase))
    return psi1, psi2


def build_seed_lattice(params, cfg: SolveConfig):
    """Deterministic seed triples (psi1, psi2, mu) for the multistart."""
    if cfg.multistart_grid == "fine":
        pops = [round(0.1 * k, 1) for k in range(1, 10)]
    else:
        pops = [0.2, 0.5, 0.8]
    phases = [0.0, 0.5 * math.pi, -0.5 * math.pi, math.pi]
    gp = params.gamma.to_idempotent()
    sp = params.s.to_idempotent()
    lam_p = LinearTwoMode.sector_eigenvalues(params.v, gp.plus, sp.plus)
    lam_m = LinearTwoMode.sector_eigenvalues(params.v, gp.minus, sp.minus)
    g0 = params.g.z0
    shifts = sorted({0.0, -g0 / 2.0, -g0})

    mu_seeds: list[Bicomplex] = []
    seen = set()
    for lam in lam_p:
        for sh in shifts:
            val = lam + sh
            key = (round(val.real, 12), round(val.imag, 12))
            if key not in seen:
                seen.add(key)
                mu_seeds.append(Bicomplex.from_complex(val))

    seeds = []
    # plain complex lattice
    for a in pops:
        for ph in phases:
            psi1, psi2 = _complex_amplitudes(a, ph)
            for mu in mu_seeds:
                seeds.append(((psi1, psi2), mu))
    # j/k-perturbed copies targeting bicomplex-only states
    for a in (0.3, 0.5, 0.7):
        for ph in (0.0, 0.5 * math.pi):
            psi1, psi2 = _complex_amplitudes(a, ph)
            for mu in mu_seeds:
                seeds.append(((psi1, psi2 + 0.1 * J), mu + 0.1 * J))
                seeds.append(((psi1, psi2 + 0.1 * K), mu + 0.1 * K))
    # idempotent sector combinations from the linear eigenpairs
    for ip, lp in enumerate(lam_p):
        for im, lm in enumerate(lam_m):
            for sh in shifts:
                rp = (lp + 1j * gp.plus - sp.plus) / params.v
                rm = (lm + 1j * gp.minus - sp.minus) / params.v
                norm = 1 + rm.conjugate() * rp
                if abs(norm) < 1e-9:
                    continue
                scale = 1.0 / norm
                psi1 = Bicomplex.from_idempotent(scale, 1.0)
                psi2 = Bicomplex.from_idempotent(scale * rp, rm)
                mu = Bicomplex.from_idempotent(lp + sh, lm + sh)
                seeds.append(((psi1, psi2), mu))
    # continued branch ansatz: j-valued population imbalance
    g_eff = g0 if g0 != 0.0 else 1.0
    for w in (0.5, 1.5, 3.0):
        for sign in (1.0, -1.0):
            a_plus = complex(0.5, -sign * w / 2.0)
            p1 = cmath.sqrt(a_plus)
            b_plus = 1.0 - a_plus
            mu_plus = -g_eff * a_plus + cmath.sqrt(b_plus / a_plus) * params.v
            for u in (1.0, 1j, -1.0, -1j):
                p2 = cmath.sqrt(b_plus) * u
                psi1 = Bicomplex.from_idempotent(p1, p1.conjugate())
                psi2 = Bicomplex.from_idempotent(p2, p2.conjugate())
                mu = Bicomplex.from_idempotent(mu_plus, mu_plus.conjugate())
                seeds.append(((psi1, psi2), mu))
    return seeds


def find_all_states(system, params, cfg: SolveConfig | None = None) -> list[StationaryState]:
    """Multistart Newton over the seed lattice, deduplicated and sorted.

    Returned states are gauge-canonical; the list is sorted by the real part
    of mu and may be empty.
    """
    if cfg is None:
        cfg = SolveConfig()
    found: list[StationaryState] = []
    for seed in build_seed_lattice(params, cfg):
        try:
            found.append(newton_solve(system, params, seed, cfg))
        except GaugeDegenerate:
            try:
                found.append(newton_solve(system, params, seed, cfg, gauge_site=1))
            except (GaugeDegenerate, NoConvergence):
                continue
        except NoConvergence:
            continue
    return dedup_states(found, cfg.dedup_tol)
