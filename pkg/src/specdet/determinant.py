"""Boundary-condition matrices and the characteristic determinant.

Two boundary descriptions are supported: the one-parameter degenerate family
B_j(u) = u^(n-j)(0) + d * (-1)^(j+1) * u^(n-j)(1), j = 1..n, and a general
two-point form B_j(u) = sum_ord A[j][ord] u^(ord)(0) + B[j][ord] u^(ord)(1).
Applying the forms to the midpoint-normalized fundamental system gives an
n x n matrix whose determinant Delta(lambda) vanishes exactly at the
eigenvalues.

For coefficient sets in the midpoint-symmetric class and degenerate boundary
data, Delta collapses to a lambda-independent constant

    Delta = sigma_n * (1 - d^2)^nu * exp(int_0^(1/2) p_1),

where sigma_n = (-1)^(n(n-1)/2) is the sign of the row reversal that maps the
boundary row order (derivative orders n-1 down to 0) onto the order-sorted
Wronskian matrix.  The per-column mechanism behind the collapse is that
column k of the boundary matrix acquires the scalar factor 1 - d * (-1)^k
(even columns vanish at d = +1, odd ones at d = -1); this attribution is
fixed by the n = 2 trigonometric oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .coefficients import CoefficientSet, symmetry_residual
from .integrator import (
    IntegratorConfig,
    integrate_fundamental,
    integrate_fundamental_many,
    wronskian_predicted,
)

__all__ = [
    "BoundaryForm",
    "SpectralProblem",
    "CharDetSample",
    "bc_matrix",
    "char_det",
    "char_det_many",
    "predicted_delta",
    "factorization_check",
]

SYMMETRY_GATE = 1e-9


@dataclass(frozen=True, eq=False)
class BoundaryForm:
    """Two-point boundary conditions, degenerate or general.

    Use the ``degenerate`` / ``general`` constructors.  The general form
    stores endpoint weight matrices (row j, column = derivative order) and
    must have full row rank as an n x 2n block.
    """

    kind: str
    d: complex | None = None
    a: np.ndarray | None = None
    b: np.ndarray | None = None

    @classmethod
    def degenerate(cls, d) -> "BoundaryForm":
        return cls(kind="degenerate", d=complex(d))

    @classmethod
    def general(cls, a, b) -> "BoundaryForm":
        a = np.array(a, dtype=complex)
        b = np.array(b, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape != b.shape:
            raise ValueError("A and B must be square matrices of equal shape")
        n = a.shape[0]
        if np.linalg.matrix_rank(np.hstack([a, b])) < n:
            raise ValueError("boundary block (A|B) must have full row rank")
        a.setflags(write=False)
        b.setflags(write=False)
        return cls(kind="general", a=a, b=b)

    @property
    def dimension(self) -> int | None:
        """Operator order implied by the form (None when any order fits)."""
        return None if self.kind == "degenerate" else self.a.shape[0]

    def to_general(self, n: int) -> "BoundaryForm":
        """Materialize the degenerate family as explicit (A, B) matrices."""
        if self.kind == "general":
            return self
        a = np.zeros((n, n), dtype=complex)
        b = np.zeros((n, n), dtype=complex)
        for j in range(1, n + 1):
            a[j - 1, n - j] = 1.0
            b[j - 1, n - j] = self.d * (-1.0) ** (j + 1)
        return BoundaryForm.general(a, b)


@dataclass(frozen=True)
class SpectralProblem:
    """An operator (coefficients), its boundary conditions, and solver knobs."""

    coefficients: CoefficientSet
    boundary: BoundaryForm
    integ: IntegratorConfig = field(default_factory=IntegratorConfig)

    def __post_init__(self):
        dim = self.boundary.dimension
        if dim is not None and dim != self.coefficients.n:
            raise ValueError(
                f"boundary dimension {dim} does not match operator order "
                f"{self.coefficients.n}"
            )

    @property
    def n(self) -> int:
        return self.coefficients.n


@dataclass(frozen=True)
class CharDetSample:
    """Characteristic determinant value at one lambda."""

    lam: complex
    delta: complex
    est_error: float

    def __post_init__(self):
        if self.est_error < 0.0:
            raise ValueError("est_error must be >= 0")


def _assemble(boundary: BoundaryForm, U0: np.ndarray, U1: np.ndarray) -> np.ndarray:
    n = U0.shape[0]
    if boundary.kind == "degenerate":
        signs = boundary.d * (-1.0) ** np.arange(n)
        return U0[::-1] + signs[:, None] * U1[::-1]
    return boundary.a @ U0 + boundary.b @ U1


def bc_matrix(prob: SpectralProblem, lam: complex) -> np.ndarray:
    """Boundary-condition matrix at lambda.

    Row j (1-based) applies the j-th boundary form; column k holds its value
    on the k-th fundamental solution.  For the degenerate family row j reads
    U0[n-j, k] + d * (-1)^(j+1) * U1[n-j, k].
    """
    pair = integrate_fundamental(prob.coefficients, lam, prob.integ)
    return _assemble(prob.boundary, pair.U0, pair.U1)


def _plu_det(M: np.ndarray) -> complex:
    """Determinant by Gaussian elimination with partial pivoting."""
    A = np.array(M, dtype=complex)
    n = A.shape[0]
    det = 1 + 0j
    for k in range(n):
        piv = k + int(np.argmax(np.abs(A[k:, k])))
        if A[piv, k] == 0:
            return 0j
        if piv != k:
            A[[k, piv]] = A[[piv, k]]
            det = -det
        det *= A[k, k]
        A[k + 1 :, k + 1 :] -= np.outer(A[k + 1 :, k] / A[k, k], A[k, k + 1 :])
    return complex(det)


def _det_error_bound(M: np.ndarray, entry_err: float) -> float:
    """Crude first-order bound: n * (n max |M|)^(n-1) * entry error."""
    n = M.shape[0]
    scale = float(np.max(np.abs(M)))
    return n * max(1.0, n * scale) ** (n - 1) * entry_err


def char_det(prob: SpectralProblem, lam: complex) -> CharDetSample:
    """Characteristic determinant Delta(lambda); zero exactly at eigenvalues."""
    pair = integrate_fundamental(prob.coefficients, lam, prob.integ)
    M = _assemble(prob.boundary, pair.U0, pair.U1)
    delta = _plu_det(M)
    return CharDetSample(complex(lam), delta, _det_error_bound(M, pair.est_error))


def char_det_many(prob: SpectralProblem, lams):
    """Delta at many lambda values in one batched integration.

    Returns (deltas, est_errors) as 1-d arrays aligned with ``lams``.
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    U0, U1, est = integrate_fundamental_many(prob.coefficients, lams, prob.integ)
    deltas = np.empty(lams.shape[0], dtype=complex)
    errs = np.empty(lams.shape[0], dtype=float)
    for i in range(lams.shape[0]):
        M = _assemble(prob.boundary, U0[i], U1[i])
        deltas[i] = _plu_det(M)
        errs[i] = _det_error_bound(M, float(est[i]))
    return deltas, errs


def _sigma(n: int) -> float:
    """Sign of reversing n rows: (-1)^(n(n-1)/2)."""
    return -1.0 if (n * (n - 1) // 2) % 2 else 1.0


def _predicted_value(prob: SpectralProblem) -> complex:
    if prob.boundary.kind != "degenerate":
        raise ValueError("the collapsed determinant needs the degenerate form")
    c = prob.coefficients
    d = prob.boundary.d
    return _sigma(c.n) * (1 - d * d) ** c.nu * wronskian_predicted(c, 0.0)


def predicted_delta(prob: SpectralProblem) -> complex:
    """Lambda-independent determinant value for the symmetric class.

    Requires the degenerate boundary form and coefficients whose symmetry
    residual is at most 1e-9; raises ValueError otherwise.
    """
    resid = symmetry_residual(prob.coefficients)
    if max(resid) > SYMMETRY_GATE:
        raise ValueError(
            f"coefficients are not midpoint-symmetric (residual {max(resid):.3e})"
        )
    return _predicted_value(prob)


def factorization_check(prob: SpectralProblem, lam: complex) -> float:
    """Relative gap between Delta(lambda) and its collapsed prediction.

    |char_det - predicted| / max(1, |predicted|).  The prediction formula is
    evaluated unconditionally so the check can quantify how badly it fails
    for coefficient sets outside the symmetric class.
    """
    value = _predicted_value(prob)
    sample = char_det(prob, lam)
    return float(abs(sample.delta - value) / max(1.0, abs(value)))
