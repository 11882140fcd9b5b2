"""Independent ground-truth generators for tests and value derivation.

Nothing here shares stepping or elimination code with the adaptive machinery:
the constant-coefficient fundamental system comes from closed forms (power
series or exponential sums over the n-th roots of lambda), the classical
reference spectrum is analytic, and the brute-force determinant marches a
fixed-step classical RK4 at high resolution and finishes with numpy's
determinant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .determinant import SpectralProblem
from .integrator import FundamentalMatrixPair

__all__ = [
    "OracleResult",
    "const_coeff_fundamental",
    "dirichlet_reference",
    "brute_force_det",
]


@dataclass(frozen=True)
class OracleResult:
    """A labeled reference value (scalar or matrix)."""

    description: str
    value: object

    def __post_init__(self):
        a = np.asarray(self.value, dtype=complex)
        if not np.all(np.isfinite(a.view(float))):
            raise ValueError("oracle values must be finite")


def _series_matrix(n: int, lam: complex, t: float) -> np.ndarray:
    """V[ord, k] = d^ord u_k / dx^ord at midpoint offset t, by power series.

    u_k(t) = sum_m lam^m t^(k+nm) / (k+nm)!; reliable for small |lam| where
    the terms never grow (used below for |lam| <= 1, including lam = 0).
    """
    V = np.empty((n, n), dtype=complex)
    for order in range(n):
        for k in range(n):
            acc = 0j
            m = 0 if k >= order else int(math.ceil((order - k) / n))
            while True:
                e = k + n * m - order
                term = lam**m * t**e / math.factorial(e)
                acc += term
                if abs(term) <= 1e-22 * (1.0 + abs(acc)) or m > 300:
                    break
                m += 1
            V[order, k] = acc
    return V


def _exponential_matrix(n: int, lam: complex, t: float) -> np.ndarray:
    """Same matrix via the n-th roots of lambda (for |lam| > 1).

    With r_j the n-th roots of lambda, u_k(t) = (1/n) sum_j r_j^(-k) e^(r_j t),
    so the derivative matrix is a Vandermonde sandwich around diag(e^(r_j t)).
    """
    mu = lam ** (1.0 / n)
    roots = mu * np.exp(2j * math.pi * np.arange(n) / n)
    R = roots[None, :] ** np.arange(n)[:, None]
    S = roots[:, None] ** (-np.arange(n)[None, :]) / n
    return R @ (np.exp(roots * t)[:, None] * S)


def const_coeff_fundamental(n: int, lam: complex) -> FundamentalMatrixPair:
    """Exact midpoint-normalized fundamental system of u^(n) = lambda*u.

    At lambda = 0 the power series degenerates to the polynomial limit
    u_k = (x - 1/2)^k / k!.
    """
    if n < 2 or n % 2 != 0:
        raise ValueError("n must be even and >= 2")
    lam = complex(lam)
    build = _series_matrix if abs(lam) <= 1.0 else _exponential_matrix
    return FundamentalMatrixPair(n, build(n, lam, -0.5), build(n, lam, 0.5), 0.0)


def dirichlet_reference(k: int) -> complex:
    """k-th eigenvalue of u'' = lambda*u with u(0) = u(1) = 0: -(k*pi)^2."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return complex(-((k * math.pi) ** 2))


def brute_force_det(prob: SpectralProblem, lam: complex, steps: int = 100_000) -> complex:
    """Characteristic determinant recomputed end to end on a separate path.

    A fixed-step classical RK4 march (``steps`` stage points split between
    the two midpoint-to-endpoint sweeps, no adaptivity) rebuilds the endpoint
    matrices, the boundary matrix is assembled from its definition, and the
    determinant comes from numpy.  Used to certify derived values before
    trusting the adaptive path.
    """
    if steps < 1000:
        raise ValueError("steps must be >= 1000")
    lam = complex(lam)
    n = prob.coefficients.n
    funcs = [
        (m, p) for m, p in enumerate(prob.coefficients.functions, start=1)
        if p.kind != "zero"
    ]

    def rhs(pvals, Y):
        out = np.empty_like(Y)
        out[:-1] = Y[1:]
        acc = lam * Y[0]
        for m, v in pvals:
            acc = acc - v * Y[n - m]
        out[-1] = acc
        return out

    def march(x_to: float) -> np.ndarray:
        count = steps // 2
        h = (x_to - 0.5) / count
        Y = np.eye(n, dtype=complex)
        for i in range(count):
            x = 0.5 + i * h
            pv0 = [(m, complex(p(x))) for m, p in funcs]
            pvm = [(m, complex(p(x + 0.5 * h))) for m, p in funcs]
            pv1 = [(m, complex(p(x + h))) for m, p in funcs]
            k1 = rhs(pv0, Y)
            k2 = rhs(pvm, Y + (0.5 * h) * k1)
            k3 = rhs(pvm, Y + (0.5 * h) * k2)
            k4 = rhs(pv1, Y + h * k3)
            Y = Y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        return Y

    U1 = march(1.0)
    U0 = march(0.0)

    bnd = prob.boundary
    if bnd.kind == "degenerate":
        M = np.empty((n, n), dtype=complex)
        for j in range(1, n + 1):
            M[j - 1] = U0[n - j] + bnd.d * (-1.0) ** (j + 1) * U1[n - j]
    else:
        M = bnd.a @ U0 + bnd.b @ U1
    return complex(np.linalg.det(M))
