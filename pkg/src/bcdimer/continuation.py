"""Branch following, bifurcation detection and location.

Natural-parameter continuation with a secant predictor and Newton corrector.
Folds in the real parameter terminate a branch; optionally the sweep hops
onto the bicomplex partner branch that continues through the fold, which is
how the continued picture keeps the state count constant across the tangent.

Bifurcation kinds are limited to tangent and pitchfork; anything else is
reported as unclassified with diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .bicomplex import Bicomplex, J
from .model import StationaryState, pt_reflected
from .solver import (
    GaugeDegenerate,
    NoConvergence,
    SolveConfig,
    canonical_gauge,
    find_all_states,
    newton_solve,
    state_distance,
)

__all__ = [
    "Branch",
    "BifurcationPoint",
    "NoMerger",
    "sweep_branch",
    "detect_bifurcations",
    "locate_fold",
    "locate_pitchfork",
    "pitchfork_existence",
    "find_merger",
    "find_tangent",
    "branches_to_csv",
]

_STEP_FLOOR = 1e-9
_GROW_AFTER = 3
_GROW_FACTOR = 1.5


class NoMerger(RuntimeError):
    """The scanned interval contains no pitchfork-disappearance crossing."""


@dataclass
class Branch:
    """One swept solution branch over a real control parameter."""

    parameter: str
    samples: list[tuple[float, StationaryState]] = field(default_factory=list)
    termination: str = "incomplete"
    events: list[dict] = field(default_factory=list)
    branch_id: int = 0

    @property
    def start(self) -> float:
        return self.samples[0][0]

    @property
    def end(self) -> float:
        return self.samples[-1][0]

    def state_at_end(self) -> StationaryState:
        return self.samples[-1][1]


@dataclass
class BifurcationPoint:
    kind: str  # "tangent" | "pitchfork" | "unclassified"
    location: float
    branch_ids: tuple[int, ...]
    coalesced_state: StationaryState
    detection_residual: float
    continuing_branch_id: int | None = None
    diagnostics: str = ""


def _solve_at(system, params, parameter: str, value: float, seed, cfg):
    p = params.with_control(parameter, value, 0.0)
    return newton_solve(system, p, seed, cfg)


def sweep_branch(
    system,
    seed_state: StationaryState,
    params,
    parameter: str,
    stop: float,
    initial_step: float,
    cfg: SolveConfig | None = None,
    follow_continuation: bool = False,
    max_steps: int = 100000,
) -> Branch:
    """Follow one branch from the seed state to ``stop`` (or a fold).

    The seed must solve at the range start (the current value of the chosen
    control in ``params``).  The predictor is the previous state, secant
    after two points; the step halves on corrector failure down to a floor
    of 1e-9 (then the branch terminates) and grows by 1.5x after three
    consecutive successes, capped at the initial step.

    With ``follow_continuation`` the sweep reseeds with a j-perturbed state
    after a fold and keeps going on the bicomplex partner branch.
    """
    if cfg is None:
        cfg = SolveConfig()
    start = params.control(parameter).z0
    direction = 1.0 if stop >= start else -1.0
    step = abs(initial_step)
    branch = Branch(parameter=parameter)
    state = newton_solve(system, params.with_control(parameter, start), seed_state, cfg)
    branch.samples.append((start, state))
    value = start
    successes = 0
    slope = None
    switched = False
    for _ in range(max_steps):
        if (stop - value) * direction <= 1e-15:
            branch.termination = "range_end"
            return branch
        h = min(step, abs(stop - value))
        target = value + direction * h
        prev = branch.samples[-1][1]
        if len(branch.samples) >= 2:
            p2, s2 = branch.samples[-2]
            frac = (target - value) / (value - p2) if value != p2 else 0.0
            seed = _extrapolate(s2, prev, frac)
        else:
            seed = prev
        ok = False
        try:
            new_state = _solve_at(system, params, parameter, target, seed, cfg)
            jump = state_distance(new_state, prev)
            bound = _continuity_bound(h, slope)
            if jump <= bound:
                ok = True
        except (NoConvergence, GaugeDegenerate):
            pass
        if ok:
            slope = max(jump / h, 1e-12) if h > 0 else slope
            branch.samples.append((target, new_state))
            value = target
            successes += 1
            if successes >= _GROW_AFTER:
                step = min(step * _GROW_FACTOR, abs(initial_step))
                successes = 0
            continue
        successes = 0
        if step > _STEP_FLOOR:
            step *= 0.5
            continue
        if follow_continuation and not switched:
            hop = _fold_switch(system, params, parameter, value, direction,
                               abs(initial_step), branch.samples[-1][1], cfg)
            if hop is not None:
                hop_value, hop_state = hop
                branch.events.append(
                    {"kind": "fold_switch", "param": value, "resumed_at": hop_value}
                )
                branch.samples.append((hop_value, hop_state))
                value = hop_value
                step = abs(initial_step) / 4
                slope = None
                switched = False  # allow crossing several folds
                continue
        branch.termination = "step_underflow"
        return branch
    branch.termination = "max_steps"
    return branch


def _continuity_bound(h: float, slope: float | None) -> float:
    if slope is None:
        return 0.5  # first step: only reject wild jumps
    return max(10.0 * h * slope, 1e-8)


def _extrapolate(s_prev: StationaryState, s_last: StationaryState, frac: float):
    def ex(a: Bicomplex, b: Bicomplex) -> Bicomplex:
        return b + frac * (b - a)

    psi = (ex(s_prev.psi1, s_last.psi1), ex(s_prev.psi2, s_last.psi2))
    return (psi, ex(s_prev.mu, s_last.mu))


def _fold_switch(system, params, parameter, value, direction, step0, last, cfg):
    """Reseed past a fold with j-perturbed copies of the last state."""
    for offset in (step0 / 4, step0, 4 * step0):
        target = value + direction * offset
        kick = math.sqrt(max(offset, 1e-12))
        for sign in (1.0, -1.0):
            seed_mu = last.mu + sign * kick * J
            seed = ((last.psi1, last.psi2 + 0.5 * sign * kick * J), seed_mu)
            try:
                st = _solve_at(system, params, parameter, target, seed, cfg)
            except (NoConvergence, GaugeDegenerate):
                continue
            if state_distance(st, last) < 10 * math.sqrt(offset) + 0.1:
                return target, st
    return None


# -- bifurcation location -------------------------------------------------


def locate_fold(
    system,
    params,
    parameter: str,
    state_a: StationaryState,
    state_b: StationaryState,
    value: float,
    cfg: SolveConfig | None = None,
    tol: float = 1e-10,
    max_iter: int = 60,
):
    """Refine the parameter where two branches coalesce.

    The squared distance between the two states vanishes linearly at a fold,
    so the location is found by re-solving both branches ever closer and
    extrapolating d^2 to zero.  Returns (location, coalesced_state,
    final_distance).
    """
    if cfg is None:
        cfg = SolveConfig()
    a, b = state_a, state_b
    d_start = state_distance(a, b)
    if d_start == 0.0:
        return value, a, 0.0
    flags = {(s.is_complex_state, s.is_pt_symmetric) for s in (a, b)}

    def probe(at: float):
        """Resolve both branch states; reject character changes.

        Past a fold the corrector lands on states of a different kind
        (symmetric vs broken, complex vs bicomplex); their classification
        flags expose that and the probe is treated as a failure.
        """
        try:
            ta = _solve_at(system, params, parameter, at, a, cfg)
            tb = _solve_at(system, params, parameter, at, b, cfg)
        except (NoConvergence, GaugeDegenerate):
            return None
        if {(s.is_complex_state, s.is_pt_symmetric) for s in (ta, tb)} != flags:
            return None
        return ta, tb, state_distance(ta, tb)

    # find the descent direction of the pair distance; shrink the probe
    # step when the fold is closer than the first guess
    v1, d1 = value, d_start
    v0 = d0 = None
    for exponent in range(3, 9):
        h = max(abs(v1), 1.0) * 10.0 ** (-exponent)
        for cand in (1.0, -1.0):
            r = probe(v1 + cand * h)
            if r is not None and r[2] < d1:
                a, b = r[0], r[1]
                v0, d0 = v1, d1
                v1, d1 = v1 + cand * h, r[2]
                break
        if v0 is not None:
            break
    if v0 is None:
        return v1, _midpoint_state(a, b), d1

    est = v1
    for _ in range(max_iter):
        denom = d0 * d0 - d1 * d1
        if denom <= 0:
            break
        est = v1 + (v1 - v0) * (d1 * d1) / denom  # root of the linear d^2 fit
        if abs(est - v1) < tol:
            break
        # damped approach, retreating when the fold is overshot
        trial = v1 + 0.95 * (est - v1)
        accepted = None
        for _retry in range(6):
            r = probe(trial)
            if r is not None and r[2] < d1:
                accepted = r
                break
            trial = 0.5 * (v1 + trial)
        if accepted is None:
            break
        a, b = accepted[0], accepted[1]
        v0, d0 = v1, d1
        v1, d1 = trial, accepted[2]
    mid = _midpoint_state(a, b)
    return est, mid, d1


def _midpoint_state(a: StationaryState, b: StationaryState) -> StationaryState:
    def avg(x: Bicomplex, y: Bicomplex) -> Bicomplex:
        return 0.5 * (x + y)

    psi, mu = canonical_gauge((avg(a.psi1, b.psi1), avg(a.psi2, b.psi2)),
                              avg(a.mu, b.mu))
    return StationaryState(
        psi1=psi[0],
        psi2=psi[1],
        mu=mu,
        residual_norm=max(a.residual_norm, b.residual_norm),
        is_complex_state=a.is_complex_state and b.is_complex_state,
        is_pt_symmetric=a.is_pt_symmetric and b.is_pt_symmetric,
    )


def locate_pitchfork(
    system,
    params,
    parameter: str,
    broken_a: StationaryState,
    broken_b: StationaryState,
    value: float,
    cfg: SolveConfig | None = None,
    tol: float = 1e-10,
):
    """Locate where a broken pair coalesces (onto the continuing branch)."""
    return locate_fold(system, params, parameter, broken_a, broken_b, value,
                       cfg, tol)


def _pair_profile(a: Branch, b: Branch):
    """Distances between matched-parameter samples of two branches.

    Samples only match when their parameter values agree within a fraction
    of the local grid spacing, so overlapping-but-offset grids do not
    produce fake profile points.
    """
    out = []
    jb = 0
    bs = b.samples
    for value, state in a.samples:
        while jb + 1 < len(bs) and abs(bs[jb + 1][0] - value) <= abs(bs[jb][0] - value):
            jb += 1
        if jb + 1 < len(bs):
            spacing = abs(bs[jb + 1][0] - bs[jb][0])
        elif jb > 0:
            spacing = abs(bs[jb][0] - bs[jb - 1][0])
        else:
            spacing = 0.0
        window = max(0.25 * spacing, 1e-9)
        if abs(bs[jb][0] - value) <= window:
            out.append((value, state, bs[jb][1]))
    return out


def _merge_candidates(branches: list[Branch], merge_tol: float, sep_tol: float):
    """Branch pairs that coincide on one side of a parameter and split on
    the other: the raw signal of a pitchfork passed by natural continuation."""
    out = []
    for i, a in enumerate(branches):
        for b in branches[i + 1 :]:
            if a.parameter != b.parameter:
                continue
            profile = _pair_profile(a, b)
            if len(profile) < 4:
                continue
            dists = [state_distance(sa, sb) for _, sa, sb in profile]
            merged = [d < merge_tol for d in dists]
            split = [d > sep_tol for d in dists]
            if not (any(merged) and any(split)):
                continue
            # boundary between the merged and split regions
            boundary = None
            for k in range(len(profile) - 1):
                if split[k] != split[k + 1] and (merged[k] or merged[k + 1]):
                    boundary = k
            if boundary is None:
                for k in range(len(profile) - 1):
                    if split[k] != split[k + 1]:
                        boundary = k
            if boundary is None:
                continue
            k_split = boundary if split[boundary] else boundary + 1
            value, sa, sb = profile[k_split]
            out.append(
                {
                    "pair": (a.branch_id, b.branch_id),
                    "value": value,
                    "states": (sa, sb),
                    "separation": dists[k_split],
                }
            )
    return out


def detect_bifurcations(
    branches: list[Branch],
    system,
    params,
    cfg: SolveConfig | None = None,
    cluster_window: float = 0.05,
    merge_tol: float = 1e-6,
    sep_tol: float = 1e-3,
) -> list[BifurcationPoint]:
    """Classify coalescence events among swept branches.

    Tangent: two branches terminate at a common parameter with coalescing
    states (the branch pair folds).  Pitchfork: a branch pair whose mutual
    distance drops to zero at a parameter while a third branch continues
    through the point; natural-parameter sweeps ride straight through a
    pitchfork onto the continuing branch, so the merge of the swept pair is
    the detection signal.  Everything else is reported unclassified.
    """
    if cfg is None:
        cfg = SolveConfig()
    for i, br in enumerate(branches):
        br.branch_id = i
    points: list[BifurcationPoint] = []
    used: set[int] = set()

    # --- folds: terminated pairs ---------------------------------------
    ended = [
        br
        for br in branches
        if br.termination == "step_underflow" and len(br.samples) >= 2
    ]
    for i, bi in enumerate(ended):
        for bj in ended[i + 1 :]:
            if bi.branch_id in used or bj.branch_id in used:
                continue
            if abs(bi.end - bj.end) > cluster_window:
                continue
            d_end = state_distance(bi.state_at_end(), bj.state_at_end())
            if d_end > 0.5:
                continue
            value = 0.5 * (bi.end + bj.end)
            loc, coalesced, resid = locate_fold(
                system, params, bi.parameter,
                bi.state_at_end(), bj.state_at_end(), value, cfg,
            )
            continuing = _find_continuing_branch(
                branches, (bi.branch_id, bj.branch_id), loc, coalesced
            )
            kind = "pitchfork" if continuing is not None else "tangent"
            points.append(
                BifurcationPoint(
                    kind=kind,
                    location=loc,
                    branch_ids=(bi.branch_id, bj.branch_id),
                    coalesced_state=coalesced,
                    detection_residual=resid,
                    continuing_branch_id=continuing,
                )
            )
            used.add(bi.branch_id)
            used.add(bj.branch_id)
    for bi in ended:
        if bi.branch_id in used:
            continue
        points.append(
            BifurcationPoint(
                kind="unclassified",
                location=bi.end,
                branch_ids=(bi.branch_id,),
                coalesced_state=bi.state_at_end(),
                detection_residual=math.nan,
                diagnostics="branch terminated without a coalescing partner",
            )
        )

    # --- pitchforks: merging pairs --------------------------------------
    candidates = _merge_candidates(branches, merge_tol, sep_tol)
    candidates.sort(key=lambda c: (-c["separation"], c["pair"]))
    taken_locations = [pt.location for pt in points]
    for cand in candidates:
        sa, sb = cand["states"]
        loc, coalesced, resid = locate_fold(
            system, params, branches[0].parameter, sa, sb, cand["value"], cfg
        )
        if any(abs(loc - seen) < 1e-4 for seen in taken_locations):
            continue
        continuing = _find_continuing_branch(
            branches, cand["pair"], loc, coalesced
        )
        points.append(
            BifurcationPoint(
                kind="pitchfork",
                location=loc,
                branch_ids=cand["pair"],
                coalesced_state=coalesced,
                detection_residual=resid,
                continuing_branch_id=continuing,
            )
        )
        taken_locations.append(loc)

    points.sort(key=lambda pt: pt.location)
    return points


def _find_continuing_branch(branches, pair_ids, location, coalesced):
    """A branch passing through the location whose state matches there."""
    for br in branches:
        if br.branch_id in pair_ids or len(br.samples) < 2:
            continue
        lo = min(br.start, br.end)
        hi = max(br.start, br.end)
        margin = 1e-6 * max(1.0, abs(location))
        if not (lo - margin <= location <= hi + margin):
            continue
        nearest = min(br.samples, key=lambda sv: abs(sv[0] - location))
        if state_distance(nearest[1], coalesced) < 0.2:
            return br.branch_id
    return None


def pt_partner_check(branch_a: Branch, branch_b: Branch, tol: float = 1e-6) -> bool:
    """True when the two branches are PT reflections of each other."""
    n = min(len(branch_a.samples), len(branch_b.samples))
    for k in range(0, n, max(1, n // 8)):
        pa, sa = branch_a.samples[k]
        pb, sb = branch_b.samples[k]
        if abs(pa - pb) > 1e-9:
            return False
        psi, mu = canonical_gauge(pt_reflected(sa.psi1, sa.psi2, sa.mu)[0:2],
                                  pt_reflected(sa.psi1, sa.psi2, sa.mu)[2])
        d = max(
            (psi[0] - sb.psi1).max_abs(),
            (psi[1] - sb.psi2).max_abs(),
            (mu - sb.mu).max_abs(),
        )
        if d > tol:
            return False
    return True


# -- scenario scans ---------------------------------------------------------


def _broken_states(states: list[StationaryState], pop_tol: float = 1e-4):
    """Complex states with unequal site populations."""
    out = []
    for st in states:
        if not st.is_complex_state:
            continue
        m1 = st.psi1.modulus_squared()
        m2 = st.psi2.modulus_squared()
        if (m1 - m2).max_abs() > pop_tol:
            out.append(st)
    return out


def _probe_broken_pair(system, params, cfg: SolveConfig, pop_tol: float = 1e-4):
    """Cheap targeted multistart for the PT-broken pair at fixed parameters.

    Seeds population-imbalanced complex states around the linear
    eigenvalues; returns the deduplicated broken pair or None.
    """
    import cmath as _cmath

    from .bicomplex import Bicomplex as _B
    from .model import LinearTwoMode as _Lin
    from .solver import dedup_states as _dedup

    gp = params.gamma.to_idempotent()
    lam = _Lin.sector_eigenvalues(params.v, gp.plus)
    g0 = params.g.z0
    mu_seeds = {round((l + sh).real, 10): l + sh
                for l in lam for sh in (0.0, -g0 / 2.0, -g0)}
    found = []
    for a in (0.6, 0.75, 0.9):
        for ph in (0.5 * math.pi, -0.5 * math.pi, 0.25 * math.pi, 0.75 * math.pi):
            psi1 = _B(math.sqrt(a))
            psi2 = _B.from_complex(math.sqrt(1 - a) * _cmath.exp(1j * ph))
            for mu0 in mu_seeds.values():
                try:
                    st = newton_solve(system, params, ((psi1, psi2),
                                                       _B.from_complex(mu0)), cfg)
                except (NoConvergence, GaugeDegenerate):
                    continue
                if st.is_complex_state and not st.is_pt_symmetric:
                    m1 = st.psi1.modulus_squared()
                    m2 = st.psi2.modulus_squared()
                    if (m1 - m2).max_abs() > pop_tol:
                        found.append(st)
    pair = _dedup(found, cfg.dedup_tol)
    return pair if len(pair) >= 2 else None


def locate_pitchfork_gamma(
    system, params, v: float, cfg: SolveConfig | None = None,
    gamma_floor: float = 1e-4, locate_tol: float = 1e-8,
    bracket_resolution: float = 1e-3, refine: bool = True,
):
    """Find the gamma where the PT-broken pair is born, if any in (0, v].

    Returns (gamma_P, coalesced_state) or None when the broken pair either
    never appears below v or already exists at the floor (no coalescence in
    range).  The search brackets the existence boundary of the broken pair
    by bisection and refines with the fold locator; with ``refine=False``
    the bracket end is returned directly (existence probing).
    """
    if cfg is None:
        cfg = SolveConfig()

    def broken_pair_at(gam: float):
        return _probe_broken_pair(system, params.with_control("gamma", gam), cfg)

    probes = [v * (1 - 1e-3), v * 0.95, v * 0.7, v * 0.4, v * 0.15]
    hi = None
    for gam in probes:
        pair = broken_pair_at(gam)
        if pair is not None:
            hi = (gam, pair)
            break
    if hi is None:
        return None
    if broken_pair_at(gamma_floor) is not None:
        return None  # broken pair exists down to the axis: no pitchfork in range
    lo = gamma_floor
    gam_hi, pair = hi
    while gam_hi - lo > bracket_resolution:
        mid = 0.5 * (lo + gam_hi)
        found = broken_pair_at(mid)
        if found is not None:
            gam_hi, pair = mid, found
        else:
            lo = mid
    if not refine:
        return gam_hi, pair[0]
    loc, coalesced, _ = locate_fold(
        system, params, "gamma", pair[0], pair[1], gam_hi, cfg, tol=locate_tol
    )
    return loc, coalesced


def pitchfork_existence(
    g_values, v: float, system, params_base=None, cfg: SolveConfig | None = None
) -> dict[float, bool]:
    """Map g -> whether a pitchfork occurs at some gamma in (0, v]."""
    from .model import DimerParams

    if params_base is None:
        params_base = DimerParams(v=v)
    out = {}
    for g in g_values:
        params = params_base.with_control("g", float(g))
        out[float(g)] = locate_pitchfork_gamma(system, params, v, cfg) is not None
    return out


def find_merger(
    v: float,
    system,
    g_window: tuple[float, float] = (-2.5, -0.1),
    cfg: SolveConfig | None = None,
    g_tol: float = 1e-4,
    gamma_resolution: float = 1e-3,
    params_base=None,
):
    """Critical nonlinearity where the pitchfork leaves the gamma axis.

    Bisection over g on the signed gap between the located pitchfork
    position and the axis: positive while the pitchfork exists at some
    gamma in (0, v], negative (sentinel) once it has disappeared.  Returns
    (g_star, gamma_star) with gamma_star the refined pitchfork position at
    the last bracketing g where it exists.  Raises :class:`NoMerger` when
    the gap does not change sign over the window.
    """
    from .model import DimerParams

    if params_base is None:
        params_base = DimerParams(v=v)
    if cfg is None:
        cfg = SolveConfig()

    def gap(g: float, refine: bool = False):
        found = locate_pitchfork_gamma(
            system, params_base.with_control("g", float(g)), v, cfg,
            bracket_resolution=gamma_resolution, refine=refine,
        )
        if found is None:
            return -1.0
        return found[0]

    g_lo, g_hi = g_window
    gap_lo = gap(g_lo)
    gap_hi = gap(g_hi)
    if (gap_lo < 0) == (gap_hi < 0):
        raise NoMerger(
            f"pitchfork existence does not flip over g in [{g_lo}, {g_hi}]"
        )
    while abs(g_hi - g_lo) > g_tol:
        mid = 0.5 * (g_lo + g_hi)
        gap_mid = gap(mid)
        if (gap_mid < 0) == (gap_lo < 0):
            g_lo, gap_lo = mid, gap_mid
        else:
            g_hi, gap_hi = mid, gap_mid
    g_exists = g_lo if gap_lo >= 0 else g_hi
    gamma_star = gap(g_exists, refine=True)
    return 0.5 * (g_lo + g_hi), gamma_star


def find_tangent(
    system, params, parameter: str = "gamma",
    cfg: SolveConfig | None = None,
):
    """Locate the fold where the two equal-population branches coalesce.

    Seeds the two symmetric branches from the state list at a sub-critical
    parameter and refines with the fold locator.  Returns (location,
    coalesced_state).
    """
    if cfg is None:
        cfg = SolveConfig()
    v = params.v
    start = 0.9 * v
    states = find_all_states(system, params.with_control(parameter, start), cfg)
    sym = [
        st for st in states
        if st.is_complex_state and st.is_pt_symmetric
    ]
    if len(sym) < 2:
        raise NoConvergence("could not seed the two symmetric branches")
    sym.sort(key=lambda s: s.mu.z0)
    loc, coalesced, _ = locate_fold(
        system, params, parameter, sym[0], sym[-1], start, cfg
    )
    return loc, coalesced


# -- export -----------------------------------------------------------------


def _fmt(x: float) -> str:
    return repr(float(x))


_BRANCH_HEADER = (
    "param,branch_id,"
    "psi1_0,psi1_1,psi1_2,psi1_3,"
    "psi2_0,psi2_1,psi2_2,psi2_3,"
    "mu_0,mu_1,mu_2,mu_3,"
    "re_mu_0,re_mu_2,im_mu_0,im_mu_2,"
    "is_complex_state,is_pt_symmetric"
)


def branches_to_csv(branches: list[Branch]) -> str:
    """Branch samples in the interchange schema (one row per sample)."""
    lines = [_BRANCH_HEADER]
    for br in branches:
        for value, st in br.samples:
            re_mu = complex(st.mu.z0, st.mu.z1)
            im_mu = complex(st.mu.z2, st.mu.z3)
            cells = [_fmt(value), str(br.branch_id)]
            for z in (st.psi1, st.psi2, st.mu):
                cells.extend(_fmt(c) for c in z.as_tuple())
            cells.extend(
                [_fmt(re_mu.real), _fmt(re_mu.imag), _fmt(im_mu.real), _fmt(im_mu.imag)]
            )
            cells.append("true" if st.is_complex_state else "false")
            cells.append("true" if st.is_pt_symmetric else "false")
            lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
