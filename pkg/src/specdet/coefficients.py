"""Complex-valued operator coefficients on [0, 1] and their midpoint symmetry.

The differential operator carries an ordered list p_1..p_n of coefficient
functions.  The symmetry class that makes the characteristic determinant
collapse couples each p_m to its reflection through x = 1/2 with the sign
(-1)^m, so this module also provides the reflection map, a residual that
measures how far a set is from the symmetric class, and the projection onto
that class.

Coefficients are closed-form or interpolated-sample objects rather than bare
callables so that reflection is exact within each representation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "CoefficientFunction",
    "CoefficientSet",
    "make_coefficient",
    "reflect_negate",
    "symmetry_residual",
    "symmetrize",
]

KINDS = ("zero", "polynomial", "cosine-series", "piecewise-samples")


def _is_finite(z: complex) -> bool:
    return math.isfinite(z.real) and math.isfinite(z.imag)


@dataclass(frozen=True)
class CoefficientFunction:
    """One coefficient function on [0, 1].

    kind selects the representation:

    ``zero``
        identically zero; ``params`` must be empty.
    ``polynomial``
        p(x) = sum_j params[j] * x**j.
    ``cosine-series``
        p(x) = sum_q params[q-1] * cos(2*pi*q*x), q = 1..len(params).
    ``piecewise-samples``
        ``params`` are values on the uniform grid over [0, 1] (at least two
        points, endpoints included); evaluation interpolates linearly.

    Instances are immutable after construction and safe for concurrent reads.
    """

    kind: str
    params: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown coefficient kind {self.kind!r}")
        params = tuple(complex(v) for v in self.params)
        object.__setattr__(self, "params", params)
        if not all(_is_finite(v) for v in params):
            raise ValueError("coefficient params must be finite")
        if self.kind == "zero":
            if params:
                raise ValueError("'zero' coefficient takes no params")
        elif not params:
            raise ValueError(f"{self.kind!r} coefficient needs at least one param")
        if self.kind == "piecewise-samples" and len(params) < 2:
            raise ValueError("'piecewise-samples' needs at least 2 grid values")

    def __call__(self, x):
        """Evaluate at ``x`` (scalar or ndarray with values in [0, 1])."""
        if self.kind == "zero":
            if np.ndim(x) == 0:
                return 0j
            return np.zeros(np.shape(x), dtype=complex)
        if self.kind == "polynomial":
            acc = 0j if np.ndim(x) == 0 else np.zeros(np.shape(x), dtype=complex)
            for c in reversed(self.params):
                acc = acc * x + c
            return acc
        if self.kind == "cosine-series":
            acc = 0j if np.ndim(x) == 0 else np.zeros(np.shape(x), dtype=complex)
            for q, a in enumerate(self.params, start=1):
                acc = acc + a * np.cos((2.0 * math.pi * q) * np.asarray(x))
            return acc
        # piecewise-samples
        vals = np.asarray(self.params)
        grid = np.linspace(0.0, 1.0, len(vals))
        re = np.interp(x, grid, vals.real)
        im = np.interp(x, grid, vals.imag)
        return re + 1j * im

    @property
    def breakpoints(self) -> tuple:
        """Interior kink locations (empty for the smooth kinds)."""
        if self.kind == "piecewise-samples":
            grid = np.linspace(0.0, 1.0, len(self.params))
            return tuple(float(t) for t in grid[1:-1])
        return ()


def make_coefficient(kind: str, params=()) -> CoefficientFunction:
    """Build a coefficient function from its kind and parameter list.

    Raises ValueError for malformed input (unknown kind, empty or non-finite
    params, sample grids shorter than two points).
    """
    return CoefficientFunction(kind, tuple(params))


@dataclass(frozen=True)
class CoefficientSet:
    """Ordered coefficients p_1..p_n of an operator of even order n = 2*nu."""

    n: int
    functions: tuple

    def __post_init__(self):
        if self.n < 2 or self.n % 2 != 0:
            raise ValueError("operator order n must be even and >= 2")
        functions = tuple(self.functions)
        object.__setattr__(self, "functions", functions)
        if len(functions) != self.n:
            raise ValueError(
                f"need exactly n={self.n} coefficient functions, got {len(functions)}"
            )
        if not all(isinstance(f, CoefficientFunction) for f in functions):
            raise ValueError("all entries must be CoefficientFunction instances")

    @property
    def nu(self) -> int:
        return self.n // 2

    @classmethod
    def zeros(cls, n: int) -> "CoefficientSet":
        """All-zero coefficient set (trivially symmetric)."""
        return cls(n, tuple(CoefficientFunction("zero") for _ in range(n)))

    def breakpoints(self) -> tuple:
        """Sorted union of interior kinks over all coefficients."""
        pts = set()
        for f in self.functions:
            pts.update(f.breakpoints)
        return tuple(sorted(pts))


def reflect_negate(m: int, p: CoefficientFunction) -> CoefficientFunction:
    """Return q with q(x) = (-1)^m * p(1 - x), staying in p's representation.

    ``m`` is the 1-based slot of the coefficient; the sign alternates with it.
    """
    s = -1.0 if m % 2 else 1.0
    if p.kind == "zero":
        return p
    if p.kind == "polynomial":
        c = p.params
        deg = len(c) - 1
        out = []
        for i in range(deg + 1):
            acc = 0j
            for j in range(i, deg + 1):
                acc += c[j] * math.comb(j, i)
            out.append(s * ((-1) ** i) * acc)
        return CoefficientFunction("polynomial", tuple(out))
    if p.kind == "cosine-series":
        # cos(2*pi*q*(1-x)) = cos(2*pi*q*x), so reflection only applies the sign
        return CoefficientFunction("cosine-series", tuple(s * a for a in p.params))
    # piecewise-samples: the uniform grid maps onto itself under x -> 1-x
    return CoefficientFunction("piecewise-samples", tuple(s * v for v in p.params[::-1]))


def symmetry_residual(c: CoefficientSet, grid_size: int = 1001) -> list:
    """Per-coefficient residual max_x |p_m(x) - (-1)^m p_m(1-x)| on a grid.

    The maximum is over ``grid_size`` uniform points in [0, 1]; entry m-1
    vanishes exactly when p_m lies in the symmetric class (up to rounding).
    """
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    xs = np.linspace(0.0, 1.0, grid_size)
    out = []
    for m, p in enumerate(c.functions, start=1):
        s = -1.0 if m % 2 else 1.0
        diff = p(xs) - s * p(1.0 - xs)
        out.append(float(np.max(np.abs(diff))))
    return out


def _average(p: CoefficientFunction, q: CoefficientFunction) -> CoefficientFunction:
    """Parameter-wise mean of two same-kind coefficients."""
    if p.kind != q.kind:
        raise ValueError("cannot average coefficients of different kinds")
    if p.kind == "zero":
        return p
    a, b = p.params, q.params
    if p.kind == "piecewise-samples" and len(a) != len(b):
        raise ValueError("sample grids must match")
    width = max(len(a), len(b))
    a = a + (0j,) * (width - len(a))
    b = b + (0j,) * (width - len(b))
    return CoefficientFunction(p.kind, tuple(0.5 * (u + v) for u, v in zip(a, b)))


def symmetrize(c: CoefficientSet) -> CoefficientSet:
    """Project onto the symmetric class: p_m <- (p_m(x) + (-1)^m p_m(1-x))/2.

    Idempotent; the result has zero symmetry residual up to rounding.
    """
    out = []
    for m, p in enumerate(c.functions, start=1):
        out.append(_average(p, reflect_negate(m, p)))
    return CoefficientSet(c.n, tuple(out))
