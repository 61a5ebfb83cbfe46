"""Divergence functionals between grid densities.

Implemented families, for densities f (model) and g (data) on a shared
grid:

* ``bregman``   -- integral of B(g) - B(f) - B'(f)(g - f) for a convex
  generator B; nonnegative, zero only at f = g.
* ``dpd``       -- density power divergence, the Bregman divergence of
  the generator (y**(1+a) - y)/a in closed form:
  integral of f**(1+a) - (1 + 1/a) f**a g + (1/a) g**(1+a).
* ``kl``        -- Kullback-Leibler divergence, the common a -> 0 limit
  of dpd and ldpd.
* ``ldpd``      -- logarithmic density power divergence
  log I[f**(1+a)] - ((1+a)/a) log I[f**a g] + (1/a) log I[g**(1+a)],
  nonnegative by Holder's inequality.
* ``log_bregman`` -- the general three-term log functional
  a0 log(I0/a0) + a2 log(I2/a2) - a1 log(I1/a1) with
  I0 = I[B'(f) f - B(f)], I1 = I[B'(f) g], I2 = I[B(g)] for a
  standardized generator and an arbitrary positive index triple.  It is
  a proper divergence only for power generators with a matched triple;
  evaluating arbitrary triples is exactly what the characterization lab
  needs.

All functions are pure; values may be +inf where conventions say so.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .density import GridDensity, require_same_grid
from .errors import DegenerateIntegralError
from .generators import ConvexGenerator, StandardizedGenerator, standardize

__all__ = [
    "IndexTriple",
    "DivergenceValue",
    "ldpd_triple",
    "bregman",
    "dpd",
    "kl",
    "ldpd",
    "holder_gap",
    "log_bregman",
    "QUAD_EPS",
    "MIN_ALPHA",
]

# Absolute tolerance for ">= 0" and "= 0 iff equal" claims on default
# grids; trapezoid error dominates float rounding at n ~ 4000.
QUAD_EPS = 1e-9

# dpd/ldpd refuse smaller alphas: the 1/alpha terms would be evaluated
# in a regime of catastrophic cancellation.  Use kl for the limit.
MIN_ALPHA = 1e-6


@dataclass(frozen=True)
class IndexTriple:
    """Positive weights (a0, a1, a2) of the three-term log functional.

    ``beta = a0 + a2 - a1`` and ``C = a0**a0 * a2**a2 / a1**a1`` are
    derived on access, never stored.
    """

    a0: float
    a1: float
    a2: float

    def __post_init__(self):
        for name in ("a0", "a1", "a2"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a positive finite real, got {v}")
        object.__setattr__(self, "a0", float(self.a0))
        object.__setattr__(self, "a1", float(self.a1))
        object.__setattr__(self, "a2", float(self.a2))

    @property
    def beta(self) -> float:
        return self.a0 + self.a2 - self.a1

    @property
    def C(self) -> float:
        return self.a0 ** self.a0 * self.a2 ** self.a2 / self.a1 ** self.a1

    def as_dict(self) -> dict:
        return {"a0": self.a0, "a1": self.a1, "a2": self.a2}


def ldpd_triple(alpha: float) -> IndexTriple:
    """The triple (1, (1+alpha)/alpha, 1/alpha) that turns the log
    functional of the dpd generator into the ldpd."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    return IndexTriple(1.0, (1.0 + alpha) / alpha, 1.0 / alpha)


@dataclass(frozen=True)
class DivergenceValue:
    """Divergence value plus its constituent integrals.

    ``terms`` holds the single integral for one-integral divergences and
    the three constituent integrals for the log-form ones (all of which
    must be positive whenever ``value`` is finite).
    """

    value: float
    terms: tuple[float, ...]
    flag: str | None = None

    def __float__(self) -> float:
        return self.value


def bregman(B: ConvexGenerator | StandardizedGenerator, g: GridDensity,
            f: GridDensity) -> DivergenceValue:
    """Bregman divergence of g from f under generator B.

    The generator is standardized first; that changes nothing (the
    affine part cancels inside the integrand) but keeps the integrand
    exactly zero off the supports.
    """
    B = standardize(B)
    require_same_grid(f, g)
    fv, gv = f.values, g.values
    integrand = B(gv) - B(fv) - B.deriv1(fv) * (gv - fv)
    value = f.integrate(integrand)
    return DivergenceValue(value, (value,))


def dpd(g: GridDensity, f: GridDensity, alpha: float) -> DivergenceValue:
    """Density power divergence at tuning parameter alpha > 0."""
    _check_alpha(alpha)
    require_same_grid(f, g)
    fv, gv = f.values, g.values
    integrand = (fv ** (1.0 + alpha)
                 - (1.0 + 1.0 / alpha) * fv ** alpha * gv
                 + (1.0 / alpha) * gv ** (1.0 + alpha))
    value = f.integrate(integrand)
    return DivergenceValue(value, (value,))


def kl(g: GridDensity, f: GridDensity) -> DivergenceValue:
    """Kullback-Leibler divergence I[g log(g/f)].

    Convention 0 log(0/f) = 0; +inf as soon as g > 0 at a node where
    f = 0.
    """
    require_same_grid(f, g)
    fv, gv = f.values, g.values
    mask = gv > 0.0
    if np.any(mask & (fv == 0.0)):
        return DivergenceValue(math.inf, (math.inf,))
    integrand = np.zeros_like(gv)
    integrand[mask] = gv[mask] * np.log(gv[mask] / fv[mask])
    value = f.integrate(integrand)
    return DivergenceValue(value, (value,))


def _power_integrals(g: GridDensity, f: GridDensity, alpha: float
                     ) -> tuple[float, float, float]:
    fv, gv = f.values, g.values
    i_f = f.integrate(fv ** (1.0 + alpha))
    i_fg = f.integrate(fv ** alpha * gv)
    i_g = f.integrate(gv ** (1.0 + alpha))
    return i_f, i_fg, i_g


def ldpd(g: GridDensity, f: GridDensity, alpha: float) -> DivergenceValue:
    """Logarithmic density power divergence at alpha > 0.

    Disjoint supports make the cross integral vanish and the value +inf
    (flagged); a vanishing own integral, which valid densities cannot
    produce, raises DegenerateIntegralError.
    """
    _check_alpha(alpha)
    require_same_grid(f, g)
    i_f, i_fg, i_g = _power_integrals(g, f, alpha)
    terms = (i_f, i_fg, i_g)
    if i_f <= 0.0:
        raise DegenerateIntegralError("int f**(1+alpha)", i_f)
    if i_g <= 0.0:
        raise DegenerateIntegralError("int g**(1+alpha)", i_g)
    if i_fg <= 0.0:
        return DivergenceValue(math.inf, terms, flag="supports disjoint")
    value = (math.log(i_f)
             - (1.0 + alpha) / alpha * math.log(i_fg)
             + math.log(i_g) / alpha)
    return DivergenceValue(value, terms)


def holder_gap(g: GridDensity, f: GridDensity, alpha: float) -> float:
    """Slack in Holder's inequality for the pair (f**alpha, g).

    Returns (I[f**(1+alpha)])**(alpha/(1+alpha)) *
    (I[g**(1+alpha)])**(1/(1+alpha)) - I[f**alpha g]; nonnegative for
    the trapezoid weights themselves, zero only at f = g nodewise.
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    require_same_grid(f, g)
    i_f, i_fg, i_g = _power_integrals(g, f, alpha)
    return i_f ** (alpha / (1.0 + alpha)) * i_g ** (1.0 / (1.0 + alpha)) - i_fg


def log_bregman(B: ConvexGenerator | StandardizedGenerator, g: GridDensity,
                f: GridDensity, idx: IndexTriple) -> DivergenceValue:
    """Three-term log functional of a generator and an index triple.

    Computes a0 log(I0/a0) + a2 log(I2/a2) - a1 log(I1/a1) with
    I0 = I[B'(f) f - B(f)], I1 = I[B'(f) g], I2 = I[B(g)].  Any
    nonpositive constituent integral raises DegenerateIntegralError
    naming the term.  No restriction is placed on beta: probing invalid
    triples is intentional.
    """
    B = standardize(B)
    require_same_grid(f, g)
    fv, gv = f.values, g.values
    bpf = B.deriv1(fv)
    i0 = f.integrate(bpf * fv - B(fv))
    i1 = f.integrate(bpf * gv)
    i2 = f.integrate(B(gv))
    for name, val in (("int[B'(f)f - B(f)]", i0),
                      ("int B'(f)g", i1),
                      ("int B(g)", i2)):
        if val <= 0.0:
            raise DegenerateIntegralError(name, val)
    value = (idx.a0 * math.log(i0 / idx.a0)
             + idx.a2 * math.log(i2 / idx.a2)
             - idx.a1 * math.log(i1 / idx.a1))
    return DivergenceValue(value, (i0, i1, i2))


def _check_alpha(alpha: float) -> None:
    if not alpha > MIN_ALPHA:
        raise ValueError(
            f"alpha must exceed {MIN_ALPHA:g} (got {alpha}); "
            "use kl() for the small-alpha limit")
