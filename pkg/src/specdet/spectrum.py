"""Eigenvalue location: contour counts, Newton refinement, grid scans.

The characteristic determinant is an entire function of lambda, so the
number of eigenvalues inside a rectangle equals the winding number
(1/2*pi*i) * contour integral of Delta'/Delta.  The contour is split into
composite Gauss-Legendre panels per edge; Delta' comes from central finite
differences.  A deliberately conservative guard rejects contours that pass
too close to a zero, inflating the rectangle slightly before giving up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .determinant import SpectralProblem, char_det_many

__all__ = [
    "Rectangle",
    "ZeroCountReport",
    "ContourError",
    "SpectrumFillsPlaneError",
    "RootNotFoundError",
    "count_zeros",
    "refine_root",
    "scan_grid",
]


class ContourError(RuntimeError):
    """The winding integral could not be trusted on this rectangle."""


class SpectrumFillsPlaneError(RuntimeError):
    """Delta vanishes identically; zero counting is meaningless."""


class RootNotFoundError(RuntimeError):
    """Newton refinement did not converge to a zero of Delta."""


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned search region in the complex lambda plane."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError("rectangle needs re_min < re_max and im_min < im_max")

    @property
    def corners(self):
        """Counterclockwise corner list starting at the lower-left."""
        return (
            complex(self.re_min, self.im_min),
            complex(self.re_max, self.im_min),
            complex(self.re_max, self.im_max),
            complex(self.re_min, self.im_max),
        )

    def inflate(self, factor: float) -> "Rectangle":
        """Scale both extents by ``factor`` about the center."""
        cr = 0.5 * (self.re_min + self.re_max)
        ci = 0.5 * (self.im_min + self.im_max)
        hw = 0.5 * (self.re_max - self.re_min) * factor
        hh = 0.5 * (self.im_max - self.im_min) * factor
        return Rectangle(cr - hw, cr + hw, ci - hh, ci + hh)

    def contains(self, z: complex) -> bool:
        return self.re_min <= z.real <= self.re_max and self.im_min <= z.imag <= self.im_max


@dataclass(frozen=True)
class ZeroCountReport:
    """Outcome of an argument-principle count over one rectangle."""

    rect: Rectangle
    winding: int
    quad_error: float
    roots: tuple
    boundary_min_abs: float

    def __post_init__(self):
        if self.winding < 0:
            raise ValueError("winding must be >= 0")
        if not self.quad_error < 0.5:
            raise ValueError("quad_error must be < 0.5 for an accepted count")
        object.__setattr__(self, "roots", tuple(complex(r) for r in self.roots))
        if len(self.roots) > self.winding:
            raise ValueError("cannot refine more roots than the winding count")


_MIN_ABS_FACTOR = 1e-8
_INFLATE = 1.01
_MAX_RETRIES = 5
_FD_SCALE = 1e-6


def _gauss_contour(rect: Rectangle, panels: int, nodes: int):
    """Contour quadrature nodes and complex weights (weight includes dz)."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    corners = rect.corners
    zs = []
    wz = []
    for e in range(4):
        za, zb = corners[e], corners[(e + 1) % 4]
        seg = (zb - za) / panels
        for p in range(panels):
            a = za + p * seg
            zs.append(a + (x + 1.0) * 0.5 * seg)
            wz.append(w * 0.5 * seg)
    return np.concatenate(zs), np.concatenate(wz)


def count_zeros(
    prob: SpectralProblem,
    rect: Rectangle,
    panels_per_edge: int = 16,
    nodes_per_panel: int = 8,
) -> ZeroCountReport:
    """Count zeros of Delta inside ``rect`` by the argument principle.

    The winding number is rounded from the contour integral; ``quad_error``
    is the distance between the raw integral and that integer, and the count
    is rejected (ContourError) when it reaches 0.5.  If the contour runs too
    close to a zero the rectangle is inflated by 1% up to five times first.

    At d = +/-1 with symmetric coefficients Delta vanishes identically, so
    counting is refused outright (SpectrumFillsPlaneError).
    """
    if panels_per_edge < 1 or nodes_per_panel < 2:
        raise ValueError("need panels_per_edge >= 1 and nodes_per_panel >= 2")
    bnd = prob.boundary
    if bnd.kind == "degenerate" and (abs(bnd.d - 1) < 1e-12 or abs(bnd.d + 1) < 1e-12):
        raise SpectrumFillsPlaneError(
            "Delta ≡ 0 at d = ±1: the spectrum is the whole complex plane; "
            "use eigenspace_rank instead of zero counting"
        )

    current = rect
    for attempt in range(_MAX_RETRIES + 1):
        zs, wz = _gauss_contour(current, panels_per_edge, nodes_per_panel)
        hs = _FD_SCALE * np.maximum(1.0, np.abs(zs))
        lams = np.concatenate([zs, zs + hs, zs - hs])
        deltas, _ = char_det_many(prob, lams)
        k = zs.shape[0]
        d0, dp, dm = deltas[:k], deltas[k : 2 * k], deltas[2 * k :]

        min_abs = float(np.min(np.abs(d0)))
        scale = max(1.0, float(np.max(np.abs(d0))))
        if min_abs < _MIN_ABS_FACTOR * scale:
            current = current.inflate(_INFLATE)
            continue

        dprime = (dp - dm) / (2.0 * hs)
        integral = complex(np.sum(wz * dprime / d0)) / (2j * math.pi)
        winding = int(round(integral.real))
        quad_error = abs(integral - winding)
        if winding < 0 or quad_error >= 0.5:
            raise ContourError(
                f"winding integral {integral:.4f} is not close to a nonnegative "
                f"integer (quad_error {quad_error:.3f}); refine the contour"
            )
        roots = _refine_inside(prob, current, winding) if winding else ()
        return ZeroCountReport(current, winding, quad_error, roots, min_abs)

    raise ContourError(
        f"contour stays within {_MIN_ABS_FACTOR:g}*scale of a zero of Delta "
        f"after {_MAX_RETRIES} rectangle inflations"
    )


def _refine_inside(prob: SpectralProblem, rect: Rectangle, winding: int):
    """Newton-polish up to ``winding`` distinct roots found by a coarse scan.

    Seeds are the local minima of |Delta| on an interior lattice (one per
    basin), topped up with the globally smallest samples; each seed is
    polished and deduplicated.  Fewer than ``winding`` roots may survive.
    """
    nx = max(9, 4 * winding + 3)
    ny = max(9, winding + 4)
    xs = np.linspace(rect.re_min, rect.re_max, nx + 2)[1:-1]
    ys = np.linspace(rect.im_min, rect.im_max, ny + 2)[1:-1]
    grid = xs[None, :] + 1j * ys[:, None]
    deltas, _ = char_det_many(prob, grid.ravel())
    vals = np.abs(deltas).reshape(ny, nx)

    padded = np.pad(vals, 1, constant_values=np.inf)
    is_min = np.ones_like(vals, dtype=bool)
    for di, dj in ((0, 1), (0, -1), (1, 0), (-1, 0)):
        neighbor = padded[1 + di : 1 + di + ny, 1 + dj : 1 + dj + nx]
        is_min &= vals <= neighbor
    minima = [(vals[i, j], grid[i, j]) for i, j in zip(*np.nonzero(is_min))]
    minima.sort(key=lambda t: t[0])
    seeds = [z for _, z in minima]
    flat_order = np.argsort(vals, axis=None)
    seeds += [grid.ravel()[i] for i in flat_order[: 4 * winding]]

    roots = []
    for seed in seeds[: 16 * winding + 16]:
        if len(roots) == winding:
            break
        try:
            root = refine_root(prob, complex(seed))
        except RootNotFoundError:
            continue
        if not rect.contains(root):
            continue
        if any(abs(root - r) <= 1e-5 * (1.0 + abs(r)) for r in roots):
            continue
        roots.append(root)
    roots.sort(key=lambda z: (z.real, z.imag))
    return tuple(roots)


def refine_root(
    prob: SpectralProblem,
    lam0: complex,
    tol: float = 1e-8,
    max_iter: int = 50,
) -> complex:
    """Newton-refine a zero of Delta from the initial guess ``lam0``.

    The derivative is a central finite difference with step
    1e-6 * max(1, |lambda|).  Success means |Delta| <= tol * scale with
    scale = max(1, |Delta(lam0)|).  Divergence, a numerically flat Delta
    (the symmetric degenerate situation away from d = +/-1), or running out
    of iterations raise RootNotFoundError.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    lam = complex(lam0)
    scale = None
    escape = 10.0 * (1.0 + abs(lam0)) + 1e3
    for _ in range(max_iter):
        h = _FD_SCALE * max(1.0, abs(lam))
        deltas, _ = char_det_many(prob, [lam, lam + h, lam - h])
        d0, dp, dm = deltas
        if scale is None:
            scale = max(1.0, abs(d0))
        if abs(d0) <= tol * scale:
            return lam
        if abs(dp - dm) <= 1e-11 * max(abs(d0), abs(dp), abs(dm), 1e-300):
            raise RootNotFoundError(
                f"Delta is numerically constant near lambda={lam:.6g}; no root found"
            )
        lam = lam - d0 / ((dp - dm) / (2.0 * h))
        if abs(lam) > escape:
            raise RootNotFoundError(f"Newton iteration diverged from {lam0}")
    raise RootNotFoundError(f"no root within {max_iter} iterations from {lam0}")


def scan_grid(prob: SpectralProblem, rect: Rectangle, nx: int, ny: int):
    """Sample Delta on an nx-by-ny lattice over the rectangle.

    Returns a list of ``ny`` rows, each a list of ``nx`` CharDetSample
    objects, row-major with the real axis varying fastest.  The lattice
    includes the rectangle corners; ``ny = 1`` samples the horizontal
    midline instead (a degenerate line scan).

    Integration failures at single lattice points are marked with NaN
    samples rather than aborting the scan.
    """
    from .determinant import CharDetSample
    from .integrator import StiffnessError

    if nx < 2 or ny < 1:
        raise ValueError("need nx >= 2 and ny >= 1")
    xs = np.linspace(rect.re_min, rect.re_max, nx)
    if ny == 1:
        ys = np.array([0.5 * (rect.im_min + rect.im_max)])
    else:
        ys = np.linspace(rect.im_min, rect.im_max, ny)
    lams = (xs[None, :] + 1j * ys[:, None]).ravel()
    try:
        deltas, errs = char_det_many(prob, lams)
    except StiffnessError:
        deltas = np.empty(lams.shape[0], dtype=complex)
        errs = np.empty(lams.shape[0], dtype=float)
        for i, lam in enumerate(lams):
            try:
                one, one_err = char_det_many(prob, [lam])
                deltas[i], errs[i] = one[0], one_err[0]
            except StiffnessError:
                deltas[i], errs[i] = complex(np.nan, np.nan), np.inf

    grid = []
    flat = 0
    for _ in range(len(ys)):
        row = []
        for _ in range(nx):
            row.append(
                CharDetSample(complex(lams[flat]), complex(deltas[flat]), float(errs[flat]))
            )
            flat += 1
        grid.append(row)
    return grid
