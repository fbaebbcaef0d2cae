"""Analytically continued two-mode PT-symmetric condensate model.

The physical model is a two-site matrix equation with on-site nonlinearity
``-g |psi_n|^2``, gain ``-i*gamma`` on site 1, loss ``+i*gamma`` on site 2
and coupling ``v``.  Continuation replaces ``|psi_n|^2`` by
``conj(psi_n)*psi_n`` with bicomplex amplitudes, which makes solution
branches behind the non-analytic modulus accessible.  An optional asymmetry
``s`` enters the diagonal as ``(+s, -s)`` and breaks the remaining site
symmetry; it is the probe parameter for exceptional-point loops.

Two systems implement the small continued-system interface used by the
solver: :class:`DimerSystem` (the full nonlinear model) and
:class:`LinearTwoMode` (the g = 0 model with closed-form eigenpairs, kept as
an independent oracle).
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, replace

from .bicomplex import I as I_UNIT
from .bicomplex import Bicomplex

CONTROL_NAMES = ("gamma", "g", "s")


def _as_bicomplex(value) -> Bicomplex:
    if isinstance(value, Bicomplex):
        return value
    if isinstance(value, (int, float)):
        return Bicomplex(float(value))
    raise TypeError(f"expected real or Bicomplex, got {type(value).__name__}")


@dataclass(frozen=True, slots=True)
class DimerParams:
    """Model controls.

    ``gamma``, ``g`` and ``s`` may carry a j-component during continuation
    loops; physical configurations keep only the real component.  ``v`` sets
    the scale and stays real and positive.
    """

    v: float = 1.0
    g: Bicomplex = Bicomplex()
    gamma: Bicomplex = Bicomplex()
    s: Bicomplex = Bicomplex()

    def __post_init__(self):
        object.__setattr__(self, "g", _as_bicomplex(self.g))
        object.__setattr__(self, "gamma", _as_bicomplex(self.gamma))
        object.__setattr__(self, "s", _as_bicomplex(self.s))
        if not self.v > 0:
            raise ValueError(f"coupling v must be positive, got {self.v}")
        for name in CONTROL_NAMES:
            c = getattr(self, name)
            if c.z2 != 0.0 or c.z3 != 0.0:
                raise ValueError(
                    f"control {name} may only have real and j components, got {c}"
                )

    def control(self, name: str) -> Bicomplex:
        if name not in CONTROL_NAMES:
            raise ValueError(f"unknown control {name!r}, expected one of {CONTROL_NAMES}")
        return getattr(self, name)

    def with_control(self, name: str, real: float, jpart: float = 0.0) -> "DimerParams":
        if name not in CONTROL_NAMES:
            raise ValueError(f"unknown control {name!r}, expected one of {CONTROL_NAMES}")
        return replace(self, **{name: Bicomplex(float(real), float(jpart), 0.0, 0.0)})

    def is_physical(self, tol: float = 0.0) -> bool:
        """True when no control carries a continuation (j) component."""
        return all(abs(getattr(self, name).z1) <= tol for name in CONTROL_NAMES)


@dataclass(frozen=True, slots=True)
class StationaryState:
    """A converged stationary solution of the continued system.

    ``is_complex_state`` marks states that exist without the continuation
    (all j and k components below the classification tolerance, equivalently
    equal idempotent components of mu).  ``is_pt_symmetric`` marks equal site
    populations and is only meaningful for complex states.
    """

    psi1: Bicomplex
    psi2: Bicomplex
    mu: Bicomplex
    residual_norm: float
    is_complex_state: bool
    is_pt_symmetric: bool


@dataclass(frozen=True, slots=True)
class Observables:
    mu: Bicomplex
    e_mf: Bicomplex
    re_part: complex
    im_part: complex


def residual(
    psi1: Bicomplex, psi2: Bicomplex, mu: Bicomplex, p: DimerParams
) -> tuple[Bicomplex, Bicomplex]:
    """Stationary-equation residual of the continued dimer.

    r1 = (-g*conj(psi1)*psi1 - i*gamma + s - mu)*psi1 + v*psi2
    r2 = v*psi1 + (-g*conj(psi2)*psi2 + i*gamma - s - mu)*psi2
    """
    m1 = psi1.conj() * psi1
    m2 = psi2.conj() * psi2
    igamma = I_UNIT * p.gamma
    r1 = (-(p.g * m1) - igamma + p.s - mu) * psi1 + p.v * psi2
    r2 = p.v * psi1 + (-(p.g * m2) + igamma - p.s - mu) * psi2
    return r1, r2


def normalization_residual(psi1: Bicomplex, psi2: Bicomplex) -> Bicomplex:
    """conj(psi1)*psi1 + conj(psi2)*psi2 - 1, a bicomplex-valued constraint."""
    return psi1.modulus_squared() + psi2.modulus_squared() - 1


def populations(psi1: Bicomplex, psi2: Bicomplex) -> tuple[Bicomplex, Bicomplex]:
    return psi1.modulus_squared(), psi2.modulus_squared()


def mean_field_energy(state: StationaryState, p: DimerParams) -> Bicomplex:
    """mu plus the double-counting correction of the -g*|psi|^2 nonlinearity."""
    m1, m2 = populations(state.psi1, state.psi2)
    return state.mu + 0.5 * (p.g * (m1 * m1 + m2 * m2))


def observables(state: StationaryState, p: DimerParams) -> Observables:
    """Mean-field energy and its reconstruction from the idempotent components.

    The two returned coefficients satisfy ``re = (E+ + E-)/2`` and
    ``im = (unit/2)(E+ - E-)`` in the j-unit representation of the idempotent
    coefficients; for complex states both are real numbers.
    """
    e = mean_field_energy(state, p)
    pair = e.to_idempotent()
    plus_j = pair.plus.conjugate()  # coefficient in the j-unit representation
    minus_j = pair.minus
    re = 0.5 * (plus_j + minus_j)
    im = 0.5j * (plus_j - minus_j)
    return Observables(mu=state.mu, e_mf=e, re_part=re, im_part=im)


def pt_classify(state: StationaryState, tol: float = 1e-8) -> bool | None:
    """Equal-population test; None when the state needs the continuation.

    PT classification is only meaningful for states of the original complex
    model, so bicomplex-only states return the not-applicable marker.
    """
    if not state.is_complex_state:
        return None
    m1, m2 = populations(state.psi1, state.psi2)
    return (m1 - m2).max_abs() < tol


def pt_reflected(
    psi1: Bicomplex, psi2: Bicomplex, mu: Bicomplex
) -> tuple[Bicomplex, Bicomplex, Bicomplex]:
    """Site swap combined with conjugation; a symmetry at s = 0."""
    return psi2.conj(), psi1.conj(), mu.conj()


def classify_flags(
    psi1: Bicomplex, psi2: Bicomplex, mu: Bicomplex, tol: float
) -> tuple[bool, bool]:
    is_complex = all(
        abs(z.z1) < tol and abs(z.z3) < tol for z in (psi1, psi2, mu)
    )
    if not is_complex:
        return False, False
    m1, m2 = populations(psi1, psi2)
    return True, (m1 - m2).max_abs() < tol


class DimerSystem:
    """The continued nonlinear dimer behind the generic system interface."""

    n_amplitudes = 2

    def residual(self, psi, mu: Bicomplex, p: DimerParams):
        return residual(psi[0], psi[1], mu, p)

    def normalization_residual(self, psi) -> Bicomplex:
        return normalization_residual(psi[0], psi[1])

    def residual_jacobian_blocks(self, psi, mu: Bicomplex, p: DimerParams):
        """Analytic derivative data for the real-view assembler.

        Returns per-equation lists of (amplitude_index, diagonal_term,
        nonlinear_factor) plus coupling and mu factors; consumed by
        solver._analytic_jacobian.
        """
        m1 = psi[0].modulus_squared()
        m2 = psi[1].modulus_squared()
        igamma = I_UNIT * p.gamma
        d1 = -(p.g * m1) - igamma + p.s - mu
        d2 = -(p.g * m2) + igamma - p.s - mu
        return (d1, d2), (-p.g * psi[0], -p.g * psi[1]), p.v


class LinearTwoMode:
    """Two-level model without nonlinearity, with closed-form eigenpairs.

    Used as an independent oracle: the residual is written out directly and
    the eigenpairs come from the 2x2 characteristic equation, sector by
    sector in the idempotent basis.
    """

    n_amplitudes = 2

    def residual(self, psi, mu: Bicomplex, p: DimerParams):
        igamma = I_UNIT * p.gamma
        r1 = (-igamma + p.s - mu) * psi[0] + p.v * psi[1]
        r2 = p.v * psi[0] + (igamma - p.s - mu) * psi[1]
        return r1, r2

    def normalization_residual(self, psi) -> Bicomplex:
        return psi[0].modulus_squared() + psi[1].modulus_squared() - 1

    @staticmethod
    def sector_eigenvalues(v: float, gamma_sector: complex, s_sector: complex = 0j):
        """Eigenvalues of [[-i*g + s, v], [v, i*g - s]] in one sector."""
        disc = cmath.sqrt(v * v + (1j * gamma_sector - s_sector) ** 2)
        return disc, -disc

    def eigenpairs(self, p: DimerParams):
        """All stationary states as idempotent-sector eigenpair combinations.

        Returns a list of (psi1, psi2, mu) triples, normalized so that the
        continued norm equals one.  Combinations whose normalization is
        singular (at exceptional points) are skipped.
        """
        gp = p.gamma.to_idempotent()
        sp = p.s.to_idempotent()
        lam_plus = self.sector_eigenvalues(p.v, gp.plus, sp.plus)
        lam_minus = self.sector_eigenvalues(p.v, gp.minus, sp.minus)
        states = []
        for lp in lam_plus:
            for lm in lam_minus:
                # row-1 eigenvector (1, (mu + i*gamma - s)/v) per sector
                rp = (lp + 1j * gp.plus - sp.plus) / p.v
                rm = (lm + 1j * gp.minus - sp.minus) / p.v
                norm = 1 + rm.conjugate() * rp
                if abs(norm) < 1e-12:
                    continue
                scale = 1.0 / norm
                psi1 = Bicomplex.from_idempotent(scale, 1.0)
                psi2 = Bicomplex.from_idempotent(scale * rp, rm)
                mu = Bicomplex.from_idempotent(lp, lm)
                states.append((psi1, psi2, mu))
        return states
