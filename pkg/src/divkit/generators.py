"""Convex generators for Bregman-type divergences.

A generator is a twice differentiable, strictly convex function B on
[0, inf), supplied as evaluation procedures for B, B' and B''.  The
derivative at 0 always means the right-hand derivative.  Built-in
generators carry exact analytic derivatives; user generators may omit
derivatives and fall back to finite differences.

Every generator has an equivalent *standardized* form
``B*(y) = B(y) - B(0) - B'(0) y`` with ``B*(0) = B*'(0) = 0``, which
generates the same Bregman divergence and is the form the divergence
and characterization routines work with.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import NotStandardizableError

__all__ = [
    "ConvexGenerator",
    "StandardizedGenerator",
    "PowerGenerator",
    "TailSlope",
    "PROBE_GRID",
    "standardize",
    "tail_slope",
    "dpd_generator",
    "exp_generator",
    "cosh_generator",
    "shifted_log_generator",
    "generator_from_spec",
    "load_generator",
    "builtin_generator_kinds",
]

# Standard probe points for derivative/convexity spot checks.
PROBE_GRID = (0.1, 0.5, 1.0, 2.0, 5.0, 10.0)

# Finite-difference steps for user generators with missing derivatives.
_FD1_REL_STEP = 1e-6
_FD2_REL_STEP = 1e-5
_RIGHT_DERIV_STEP = 1e-8

ArrayLike = "float | np.ndarray"


def _fd_first(fn: Callable, y: np.ndarray) -> np.ndarray:
    """Central first difference, one-sided with h=1e-8 at the left edge."""
    y = np.asarray(y, dtype=float)
    h = _FD1_REL_STEP * np.maximum(1.0, y)
    h = np.where(y >= h, h, _RIGHT_DERIV_STEP)
    left = np.maximum(y - h, 0.0)
    return (fn(y + h) - fn(left)) / (y + h - left)


def _fd_second(d1: Callable, y: np.ndarray) -> np.ndarray:
    """Central difference of B' with h = 1e-5 * max(1, y), one-sided near 0."""
    y = np.asarray(y, dtype=float)
    h = _FD2_REL_STEP * np.maximum(1.0, y)
    left = np.maximum(y - h, 0.0)
    return (d1(y + h) - d1(left)) / (y + h - left)


class ConvexGenerator:
    """Strictly convex twice differentiable function on [0, inf).

    Parameters
    ----------
    fn : callable
        Evaluates B(y).  Must accept numpy arrays (and scalars).
    d1, d2 : callable, optional
        First and second derivative.  When omitted they are replaced by
        finite differences of the available procedures; analytic
        derivatives are strongly preferred for anything quantitative.
    label : str
        Identifier used in reports and error messages.

    Instances are immutable and safe to evaluate concurrently.
    """

    def __init__(self, fn: Callable, d1: Callable | None = None,
                 d2: Callable | None = None, label: str = "custom"):
        self._fn = fn
        self._d1 = d1
        self._d2 = d2
        self.label = label

    def __call__(self, y: ArrayLike) -> ArrayLike:
        return self._fn(np.asarray(y, dtype=float))

    def deriv1(self, y: ArrayLike) -> ArrayLike:
        """B'(y); the right-hand derivative at y=0."""
        y = np.asarray(y, dtype=float)
        if self._d1 is not None:
            return self._d1(y)
        return _fd_first(self._fn, y)

    def deriv2(self, y: ArrayLike) -> ArrayLike:
        """B''(y); strictly positive wherever the generator is valid."""
        y = np.asarray(y, dtype=float)
        if self._d2 is not None:
            return self._d2(y)
        return _fd_second(self.deriv1, y)

    def standardized(self) -> "StandardizedGenerator":
        """Equivalent generator with value and slope removed at 0."""
        b0 = float(self(0.0))
        bp0 = float(self.deriv1(0.0))
        if not (math.isfinite(b0) and math.isfinite(bp0)):
            raise NotStandardizableError(
                f"generator not standardizable: B(0)={b0}, B'(0)={bp0} "
                f"({self.label})")
        return StandardizedGenerator(self, b0, bp0)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.label})"


class StandardizedGenerator:
    """Generator with its affine part subtracted: B*(0) = B*'(0) = 0.

    Wraps ``inner`` and evaluates ``inner(y) - b0 - bp0 * y``; the value
    and slope at 0 are pinned to exactly 0.  B* is nonnegative, strictly
    increasing on (0, inf), and satisfies ``B*(y) <= y B*'(y)``.
    Subclass-aware constructors may pass exact closed forms via
    ``fn``/``d1`` to avoid cancellation in the generic subtraction.
    """

    def __init__(self, inner: ConvexGenerator, b0: float, bp0: float,
                 fn: Callable | None = None, d1: Callable | None = None,
                 label: str | None = None):
        self.inner = inner
        self.b0 = float(b0)
        self.bp0 = float(bp0)
        self._fn = fn
        self._d1 = d1
        self.label = label if label is not None else f"std({inner.label})"

    def __call__(self, y: ArrayLike) -> ArrayLike:
        y = np.asarray(y, dtype=float)
        if self._fn is not None:
            return self._fn(y)
        return np.where(y == 0.0, 0.0, self.inner(y) - self.b0 - self.bp0 * y)

    def deriv1(self, y: ArrayLike) -> ArrayLike:
        y = np.asarray(y, dtype=float)
        if self._d1 is not None:
            return self._d1(y)
        return np.where(y == 0.0, 0.0, self.inner.deriv1(y) - self.bp0)

    def deriv2(self, y: ArrayLike) -> ArrayLike:
        return self.inner.deriv2(y)

    def standardized(self) -> "StandardizedGenerator":
        """Standardizing twice is the identity."""
        return self

    def scaled(self, factor: float) -> "StandardizedGenerator":
        """Positive multiple K*B*; still standardized and strictly convex."""
        if not factor > 0:
            raise ValueError(f"scale factor must be positive, got {factor}")
        k = float(factor)
        label = f"{k:g}*{self.label}"
        inner = ConvexGenerator(
            lambda y: k * self(y),
            d1=lambda y: k * self.deriv1(y),
            d2=lambda y: k * self.deriv2(y),
            label=label,
        )
        return StandardizedGenerator(
            inner, 0.0, 0.0,
            fn=lambda y: k * self(y),
            d1=lambda y: k * self.deriv1(y),
            label=label,
        )

    def __repr__(self) -> str:
        return f"StandardizedGenerator({self.label})"


class PowerGenerator(ConvexGenerator):
    """Power-family generator ``K y**(1+alpha) + K2 y + K3``.

    The affine coefficients K2, K3 never survive standardization, so all
    members with the same (K, alpha) generate identical divergences.
    """

    def __init__(self, K: float, alpha: float, K2: float = 0.0,
                 K3: float = 0.0, label: str | None = None):
        if not K > 0:
            raise ValueError(f"K must be positive, got {K}")
        if not alpha > 0:
            raise ValueError(f"alpha must be positive, got {alpha}")
        self.K = float(K)
        self.alpha = float(alpha)
        self.K2 = float(K2)
        self.K3 = float(K3)
        k, a, k2, k3 = self.K, self.alpha, self.K2, self.K3
        p = 1.0 + a

        def fn(y):
            return k * y ** p + k2 * y + k3

        def d1(y):
            return k * p * y ** a + k2

        def d2(y):
            # 0**(alpha-1) would warn for alpha < 1; the limit is +inf.
            with np.errstate(divide="ignore"):
                return k * p * a * y ** (a - 1.0)

        if label is None:
            label = f"power(K={k:g},alpha={a:g}"
            if k2 or k3:
                label += f",K2={k2:g},K3={k3:g}"
            label += ")"
        super().__init__(fn, d1, d2, label=label)

    def standardized(self) -> StandardizedGenerator:
        """Exact closed form K y**(1+alpha): no cancellation against K2, K3."""
        k, a = self.K, self.alpha
        p = 1.0 + a
        return StandardizedGenerator(
            self, self.K3, self.K2,
            fn=lambda y: k * y ** p,
            d1=lambda y: k * p * y ** a,
        )


def standardize(gen: ConvexGenerator | StandardizedGenerator) -> StandardizedGenerator:
    """Return B*(y) = B(y) - B(0) - B'(0) y.

    Idempotent: standardized inputs come back unchanged.  Raises
    :class:`~divkit.errors.NotStandardizableError` when B(0) or the
    right derivative B'(0) is not finite (e.g. y*log(y)).
    """
    if isinstance(gen, StandardizedGenerator):
        return gen
    return gen.standardized()


def dpd_generator(alpha: float) -> PowerGenerator:
    """Generator (y**(1+alpha) - y) / alpha of the density power divergence."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    return PowerGenerator(1.0 / alpha, alpha, K2=-1.0 / alpha,
                          label=f"dpd(alpha={alpha:g})")


def exp_generator() -> ConvexGenerator:
    """exp(y) - y - 1; already standardized, superlinear tail."""
    return ConvexGenerator(
        lambda y: np.expm1(y) - y,
        d1=np.expm1,
        d2=np.exp,
        label="exp",
    )


def cosh_generator() -> ConvexGenerator:
    """cosh(y) - 1; already standardized, superlinear tail."""
    return ConvexGenerator(
        lambda y: 2.0 * np.sinh(0.5 * y) ** 2,  # cosh(y)-1 without cancellation
        d1=np.sinh,
        d2=np.cosh,
        label="cosh",
    )


def shifted_log_generator() -> ConvexGenerator:
    """(1+y) log(1+y) - y; already standardized, B'' = 1/(1+y)."""
    return ConvexGenerator(
        lambda y: (1.0 + y) * np.log1p(y) - y,
        d1=np.log1p,
        d2=lambda y: 1.0 / (1.0 + y),
        label="shiftedlog",
    )


@dataclass(frozen=True)
class TailSlope:
    """Classification of lim B(y)/y: finite slope c, or divergent."""

    kind: str  # "finite" | "divergent"
    estimate: float | None = None

    @property
    def divergent(self) -> bool:
        return self.kind == "divergent"


def tail_slope(B: StandardizedGenerator, probe_max: float = 1e6) -> TailSlope:
    """Estimate the limiting slope of a standardized generator.

    Compares the chord slopes B(y)/y at probe_max/2 and probe_max; a
    ratio above 1.5 (or overflow) classifies the tail as divergent,
    otherwise the slope at probe_max is reported as the finite limit.
    """
    if not probe_max > 0:
        raise ValueError(f"probe_max must be positive, got {probe_max}")
    y_half, y_full = 0.5 * probe_max, float(probe_max)
    with np.errstate(over="ignore"):  # overflow just means "divergent"
        s_half = float(B(y_half)) / y_half
        s_full = float(B(y_full)) / y_full
    if not (math.isfinite(s_half) and math.isfinite(s_full)) or s_half <= 0:
        return TailSlope("divergent")
    if s_full / s_half > 1.5:
        return TailSlope("divergent")
    return TailSlope("finite", estimate=s_full)


def builtin_generator_kinds() -> tuple[str, ...]:
    """Kinds accepted in generator spec files."""
    return ("dpd", "power", "exp", "cosh", "shiftedlog")


def generator_from_spec(spec: dict) -> ConvexGenerator:
    """Build a generator from a spec mapping {"kind": ..., "params": {...}}.

    Raises ValueError for unknown kinds or malformed parameters.
    """
    if not isinstance(spec, dict):
        raise ValueError(f"generator spec must be a JSON object, got {type(spec).__name__}")
    kind = spec.get("kind")
    params = spec.get("params", {}) or {}
    if not isinstance(params, dict):
        raise ValueError("generator spec 'params' must be an object")
    extra = set(spec) - {"kind", "params"}
    if extra:
        raise ValueError(f"unexpected generator spec keys: {sorted(extra)}")

    def _only(allowed: set[str]) -> None:
        unknown = set(params) - allowed
        if unknown:
            raise ValueError(f"unexpected params for kind '{kind}': {sorted(unknown)}")

    if kind == "dpd":
        _only({"alpha"})
        if "alpha" not in params:
            raise ValueError("dpd generator requires params.alpha")
        return dpd_generator(float(params["alpha"]))
    if kind == "power":
        _only({"K", "alpha", "K2", "K3"})
        missing = {"K", "alpha"} - set(params)
        if missing:
            raise ValueError(f"power generator requires params {sorted(missing)}")
        return PowerGenerator(float(params["K"]), float(params["alpha"]),
                              K2=float(params.get("K2", 0.0)),
                              K3=float(params.get("K3", 0.0)))
    if kind == "exp":
        _only(set())
        return exp_generator()
    if kind == "cosh":
        _only(set())
        return cosh_generator()
    if kind == "shiftedlog":
        _only(set())
        return shifted_log_generator()
    raise ValueError(
        f"unknown generator kind {kind!r}; expected one of {builtin_generator_kinds()}")


def load_generator(path: str | Path) -> ConvexGenerator:
    """Read a generator spec JSON file."""
    with open(path, "r", encoding="utf-8") as handle:
        try:
            spec = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ValueError(f"malformed generator spec {path}: {exc}") from exc
    return generator_from_spec(spec)
