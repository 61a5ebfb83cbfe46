"""Densities on uniform grids over a finite interval.

Trapezoidal quadrature on the grid stands in for integration against
Lebesgue measure: deterministic, linear in the integrand, exact for
piecewise-linear functions.  Densities with unbounded support must be
truncated by the caller to a declared interval.
"""

from __future__ import annotations

import csv
import warnings
from pathlib import Path

import numpy as np

from .errors import DegenerateDensityError, GridMismatchError

__all__ = [
    "GridDensity",
    "DEFAULT_GRID_N",
    "normalize",
    "uniform_density",
    "bump_mixture",
    "random_bump_density",
    "random_bump_pair",
    "resample",
    "density_from_spec",
    "load_density_csv",
    "save_density_csv",
    "require_same_grid",
]

# Default node count keeps trapezoid error on smooth densities below the
# 1e-6 tolerances used by the quadrature-based checks.
DEFAULT_GRID_N = 4001

_INTEGRAL_ATOL = 1e-9
_SPACING_RTOL = 1e-9
_RAW_INTEGRAL_WARN = 1e-3


class GridDensity:
    """Nonnegative function tabulated on n equispaced nodes of [lo, hi].

    The trapezoidal integral over the interval is 1 (within 1e-9).
    Values are held in a read-only array; instances are immutable and
    safe to share across threads.
    """

    def __init__(self, lo: float, hi: float, values: np.ndarray):
        lo, hi = float(lo), float(hi)
        values = np.array(values, dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise ValueError("density needs a 1-d array of at least 2 values")
        if not hi > lo:
            raise ValueError(f"need hi > lo, got [{lo}, {hi}]")
        if not np.all(np.isfinite(values)):
            raise ValueError("density values must be finite")
        if np.any(values < 0):
            raise ValueError("density values must be nonnegative")
        step = (hi - lo) / (values.size - 1)
        total = float(np.trapezoid(values, dx=step))
        if abs(total - 1.0) > _INTEGRAL_ATOL:
            raise ValueError(
                f"density must integrate to 1 (trapezoid), got {total!r}; "
                "use normalize() for raw values")
        values.setflags(write=False)
        self.lo = lo
        self.hi = hi
        self._values = values
        self._x: np.ndarray | None = None

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def n(self) -> int:
        return self._values.size

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        """Grid nodes (lazily built, read-only)."""
        if self._x is None:
            x = np.linspace(self.lo, self.hi, self.n)
            x.setflags(write=False)
            self._x = x
        return self._x

    def integrate(self, h) -> float:
        """Trapezoidal integral of a grid function tabulated on this grid."""
        h = np.asarray(h, dtype=float)
        if h.shape != self._values.shape:
            raise GridMismatchError(
                f"grid function has shape {h.shape}, expected {self._values.shape}")
        return float(np.trapezoid(h, dx=self.step))

    def compatible_with(self, other: "GridDensity") -> bool:
        """Same node count and (up to rounding) same interval."""
        scale = max(abs(self.lo), abs(self.hi), 1.0)
        return (self.n == other.n
                and abs(self.lo - other.lo) <= 1e-9 * scale
                and abs(self.hi - other.hi) <= 1e-9 * scale)

    def __repr__(self) -> str:
        return f"GridDensity(lo={self.lo:g}, hi={self.hi:g}, n={self.n})"


def require_same_grid(f: GridDensity, g: GridDensity) -> None:
    """Raise GridMismatchError unless f and g share a grid."""
    if not f.compatible_with(g):
        raise GridMismatchError(f"incompatible grids: {f!r} vs {g!r}")


def normalize(values, lo: float, hi: float) -> GridDensity:
    """Scale nonnegative raw values so the trapezoidal integral is 1."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size < 2:
        raise ValueError("need a 1-d array of at least 2 values")
    if not np.all(np.isfinite(values)):
        raise ValueError("raw values must be finite")
    if np.any(values < 0):
        raise ValueError("raw values must be nonnegative")
    step = (float(hi) - float(lo)) / (values.size - 1)
    total = float(np.trapezoid(values, dx=step))
    if total <= 0.0:
        raise DegenerateDensityError("cannot normalize an all-zero density")
    return GridDensity(lo, hi, values / total)


def uniform_density(theta: float, lo: float = 0.0, hi: float | None = None,
                    n: int = DEFAULT_GRID_N) -> GridDensity:
    """Discretized uniform density on (0, 1/theta), value theta on its support.

    The jump to 0 is placed at the grid node nearest 1/theta and the
    plateau rescaled so the trapezoidal integral is exactly 1 (the
    plateau then differs from theta by O(step)).  Without an explicit
    ``hi`` the grid spans the support padded by one step.  The grid must
    cover [0, 1/theta].
    """
    if not theta > 0:
        raise ValueError(f"theta must be positive, got {theta}")
    if n < 3:
        raise ValueError(f"need at least 3 grid nodes, got {n}")
    support = 1.0 / theta
    lo = float(lo)
    if lo > 0.0:
        raise ValueError(f"grid must cover [0, 1/theta]; got lo={lo} > 0")
    if hi is None:
        if lo != 0.0:
            raise ValueError("default grid requires lo == 0")
        hi = support * (n - 1) / (n - 2)  # jump node at 1/theta, one pad step
    hi = float(hi)
    if hi < support:
        raise ValueError(
            f"grid must cover [0, 1/theta] = [0, {support:g}]; got hi={hi:g}")
    step = (hi - lo) / (n - 1)
    first = int(np.ceil(-lo / step - 1e-12)) if lo < 0.0 else 0
    cut = int(round((support - lo) / step))
    cut = min(cut, n - 1)
    if cut <= first:
        raise ValueError(
            f"grid too coarse to resolve support [0, {support:g}] at step {step:g}")
    values = np.zeros(n)
    values[first:cut + 1] = theta
    total = float(np.trapezoid(values, dx=step))
    return GridDensity(lo, hi, values / total)


def bump_mixture(lo: float, hi: float, n: int, means, sigmas, weights) -> GridDensity:
    """Normalized mixture of Gaussian bumps truncated to [lo, hi].

    Values stay strictly positive on the whole grid as long as the
    widths are not absurdly small relative to the interval.
    """
    means = np.asarray(means, dtype=float)
    sigmas = np.asarray(sigmas, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if not (means.shape == sigmas.shape == weights.shape):
        raise ValueError("means, sigmas, weights must have matching shapes")
    if np.any(sigmas <= 0) or np.any(weights <= 0):
        raise ValueError("sigmas and weights must be positive")
    x = np.linspace(float(lo), float(hi), int(n))
    raw = np.zeros_like(x)
    for m, s, w in zip(means, sigmas, weights):
        raw += w * np.exp(-0.5 * ((x - m) / s) ** 2)
    return normalize(raw, lo, hi)


def random_bump_density(rng: np.random.Generator, lo: float = 0.0,
                        hi: float = 1.0, n: int = DEFAULT_GRID_N
                        ) -> tuple[GridDensity, dict]:
    """Draw a two-bump mixture; returns the density and its parameters."""
    width = float(hi) - float(lo)
    means = lo + width * rng.uniform(0.15, 0.85, size=2)
    sigmas = width * rng.uniform(0.05, 0.2, size=2)
    w = rng.uniform(0.25, 0.75)
    weights = np.array([w, 1.0 - w])
    spec = {
        "family": "bump-mixture",
        "grid": {"lo": float(lo), "hi": float(hi), "n": int(n)},
        "means": [float(v) for v in means],
        "sigmas": [float(v) for v in sigmas],
        "weights": [float(v) for v in weights],
    }
    return bump_mixture(lo, hi, n, means, sigmas, weights), spec


def random_bump_pair(rng: np.random.Generator, lo: float = 0.0, hi: float = 1.0,
                     n: int = DEFAULT_GRID_N) -> tuple[GridDensity, GridDensity]:
    """Two independent random bump mixtures on a shared grid."""
    f, _ = random_bump_density(rng, lo, hi, n)
    g, _ = random_bump_density(rng, lo, hi, n)
    return f, g


def density_from_spec(spec: dict) -> GridDensity:
    """Rebuild a density from a descriptor produced by this package."""
    if not isinstance(spec, dict):
        raise ValueError("density spec must be a mapping")
    family = spec.get("family")
    grid = spec.get("grid", {})
    lo, hi, n = float(grid["lo"]), float(grid["hi"]), int(grid["n"])
    if family == "uniform":
        return uniform_density(float(spec["theta"]), lo=lo, hi=hi, n=n)
    if family == "bump-mixture":
        return bump_mixture(lo, hi, n, spec["means"], spec["sigmas"], spec["weights"])
    raise ValueError(f"unknown density family {family!r}")


def resample(d: GridDensity, lo: float, hi: float, n: int
             ) -> tuple[GridDensity, float]:
    """Linear-interpolation resample onto a new grid, then renormalize.

    Returns the resampled density and the raw-integral drift
    |integral - 1| before renormalization, so callers can report the
    interpolation residual.
    """
    x_new = np.linspace(float(lo), float(hi), int(n))
    raw = np.interp(x_new, d.x, d.values, left=0.0, right=0.0)
    step = (float(hi) - float(lo)) / (int(n) - 1)
    total = float(np.trapezoid(raw, dx=step))
    if total <= 0.0:
        raise DegenerateDensityError("resampled density is all zero on the new grid")
    return GridDensity(lo, hi, raw / total), abs(total - 1.0)


def save_density_csv(d: GridDensity, path: str | Path) -> None:
    """Write ``x,value`` rows with full round-trip float precision."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write("x,value\n")
        for xi, vi in zip(d.x.tolist(), d.values.tolist()):
            handle.write(f"{xi!r},{vi!r}\n")


def load_density_csv(path: str | Path) -> GridDensity:
    """Read a ``x,value`` CSV density file.

    Validates strictly increasing, uniformly spaced x (1e-9 relative)
    and nonnegative values, then normalizes; a deviation of the raw
    integral from 1 beyond 1e-3 triggers a warning.
    """
    xs: list[float] = []
    vs: list[float] = []
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or [c.strip().lower() for c in header[:2]] != ["x", "value"]:
            raise ValueError(f"{path}: expected header 'x,value', got {header}")
        for row in reader:
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) < 2:
                raise ValueError(f"{path}: malformed row {row!r}")
            xs.append(float(row[0]))
            vs.append(float(row[1]))
    if len(xs) < 2:
        raise ValueError(f"{path}: need at least 2 rows")
    x = np.asarray(xs)
    v = np.asarray(vs)
    steps = np.diff(x)
    if np.any(steps <= 0):
        raise ValueError(f"{path}: x must be strictly increasing")
    step = (x[-1] - x[0]) / (len(x) - 1)
    if np.max(np.abs(steps / step - 1.0)) > _SPACING_RTOL:
        raise ValueError(f"{path}: x spacing is not uniform to 1e-9 relative")
    if np.any(v < 0):
        raise ValueError(f"{path}: density values must be nonnegative")
    total = float(np.trapezoid(v, dx=step))
    if abs(total - 1.0) > _RAW_INTEGRAL_WARN:
        warnings.warn(
            f"{path}: raw integral {total:.6g} deviates from 1 by more than "
            f"{_RAW_INTEGRAL_WARN:g}; normalizing", stacklevel=2)
    return normalize(v, x[0], x[-1])
