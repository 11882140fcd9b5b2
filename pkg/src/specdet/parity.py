"""Midpoint-parity solution combinations and eigenspace measurements.

Fundamental solutions normalized at x = 1/2 are parity-definite when the
coefficients are midpoint-symmetric: u_k(1-x) = (-1)^k u_k(x).  Linear
combinations over odd indices are odd about the midpoint and solve the
degenerate boundary conditions at d = -1; even-index combinations are even
and solve them at d = +1 (attribution fixed by the n = 2 trigonometric
oracle).  This module builds such combinations, measures how well the
reflection and boundary identities hold, and reports the eigenspace
dimension at a given lambda.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .determinant import SpectralProblem, bc_matrix
from .integrator import solve_initial_value

__all__ = [
    "ParityCombination",
    "parity_combination",
    "reflection_residual",
    "bc_residual",
    "eigenspace_rank",
]

PARITIES = ("odd", "even")


@dataclass(frozen=True)
class ParityCombination:
    """A solution combination with definite parity data at the midpoint.

    ``constants[k]`` multiplies the fundamental solution with index 2k+1
    (odd) or 2k (even).  ``trace[i, j]`` samples the j-th derivative of the
    combination at ``xs[i]``; the grid is uniform over [0, 1] and symmetric
    about 1/2.
    """

    parity: str
    constants: tuple
    xs: np.ndarray
    trace: np.ndarray

    def __post_init__(self):
        if self.parity not in PARITIES:
            raise ValueError(f"parity must be one of {PARITIES}")
        object.__setattr__(self, "constants", tuple(complex(v) for v in self.constants))
        for name in ("xs", "trace"):
            a = np.asarray(getattr(self, name))
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        if self.trace.shape[0] != self.xs.shape[0]:
            raise ValueError("trace and xs lengths differ")


def parity_combination(
    prob: SpectralProblem,
    lam: complex,
    parity: str,
    constants,
    grid_size: int = 101,
) -> ParityCombination:
    """Integrate the combination sum_k constants[k] * u_{2k+parity_offset}.

    The midpoint data places each constant in its parity-appropriate
    derivative slot (odd indices for ``"odd"``, even for ``"even"``), zeros
    elsewhere, and the combination is propagated across [0, 1] on a uniform
    grid of odd size (so x = 1/2 is a sample point).

    The parity identities hold only for midpoint-symmetric coefficients, but
    the combination solves the equation and may be built for any set, e.g.
    to show the identities failing off the symmetric class.
    """
    if parity not in PARITIES:
        raise ValueError(f"parity must be one of {PARITIES}")
    n = prob.coefficients.n
    nu = n // 2
    constants = tuple(complex(v) for v in constants)
    if len(constants) != nu:
        raise ValueError(f"need exactly nu={nu} constants, got {len(constants)}")
    if all(v == 0 for v in constants):
        raise ValueError("constants must not all vanish")
    if grid_size < 3 or grid_size % 2 == 0:
        raise ValueError("grid_size must be odd and >= 3")

    y0 = np.zeros(n, dtype=complex)
    offset = 1 if parity == "odd" else 0
    for k, v in enumerate(constants):
        y0[2 * k + offset] = v

    xs = np.linspace(0.0, 1.0, grid_size)
    trace = solve_initial_value(prob.coefficients, lam, y0, xs, prob.integ)
    return ParityCombination(parity, constants, xs, trace)


def reflection_residual(pc: ParityCombination) -> float:
    """max_x |u(x) - s*u(1-x)| over the sample grid, s = -1 odd / +1 even.

    Grid symmetry makes the reflected value another stored sample, so no
    re-integration happens here.
    """
    s = -1.0 if pc.parity == "odd" else 1.0
    vals = pc.trace[:, 0]
    return float(np.max(np.abs(vals - s * vals[::-1])))


def bc_residual(prob: SpectralProblem, pc: ParityCombination) -> float:
    """Largest boundary-form value of the combination, scale-normalized.

    Evaluates B_j(u) = u^(n-j)(0) + d*(-1)^(j+1)*u^(n-j)(1) from the trace
    endpoints and divides by the largest endpoint derivative magnitude, so
    the residual is invariant under scaling of the constants.
    """
    if prob.boundary.kind != "degenerate":
        raise ValueError("bc_residual needs the degenerate boundary form")
    n = prob.coefficients.n
    d = prob.boundary.d
    e0 = pc.trace[0]
    e1 = pc.trace[-1]
    worst = 0.0
    for j in range(1, n + 1):
        worst = max(worst, abs(e0[n - j] + d * (-1.0) ** (j + 1) * e1[n - j]))
    denom = max(float(np.max(np.abs(e0))), float(np.max(np.abs(e1))), 1e-300)
    return worst / denom


def eigenspace_rank(prob: SpectralProblem, lam: complex, tol: float = 1e-6) -> int:
    """Dimension of the solution space of the boundary problem at lambda.

    Singular values of the boundary-condition matrix below tol * s_max are
    treated as zero; the result is n minus the surviving numerical rank, so
    it is positive exactly when lambda is an eigenvalue.
    """
    M = bc_matrix(prob, lam)
    s = np.linalg.svd(M, compute_uv=False)
    smax = float(s[0]) if s.size else 0.0
    rank = 0 if smax == 0.0 else int(np.sum(s > tol * smax))
    return prob.coefficients.n - rank
