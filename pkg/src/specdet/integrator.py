"""Adaptive complex ODE integration of the companion first-order system.

The scalar equation u^(n) + sum_m p_m(x) u^(n-m) = lambda*u is integrated as
a first-order system for the derivative stack y = (u, u', ..., u^(n-1)).
The fundamental system is pinned by identity derivative data at the midpoint
x = 1/2 and propagated to both endpoints with an embedded Dormand-Prince 5(4)
pair; all n columns (and, internally, any number of lambda values) advance in
lockstep through one step controller, so a full endpoint matrix costs a single
sweep per direction.

Step points are snapped to coefficient breakpoints so that piecewise-linear
sample coefficients do not degrade the order of the pair.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .coefficients import CoefficientSet

__all__ = [
    "IntegratorConfig",
    "FundamentalMatrixPair",
    "StiffnessError",
    "QuadratureError",
    "companion_rhs",
    "integrate_fundamental",
    "integrate_fundamental_many",
    "solve_initial_value",
    "wronskian_predicted",
]


class StiffnessError(RuntimeError):
    """Step-size underflow or step budget exhausted during integration."""

    def __init__(self, message: str, lam, x: float):
        super().__init__(f"{message} (lambda={lam}, x={x:.6g})")
        self.lam = lam
        self.x = x


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to converge."""


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances and budgets for the adaptive stepper.

    ``max_abs_lambda`` caps |lambda|; the stepper is not meant for the
    boundary-layer regime beyond it.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_steps: int = 1_000_000
    min_step: float = 1e-13
    max_abs_lambda: float = 1e6

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "min_step", "max_abs_lambda"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
        if self.max_steps < 10:
            raise ValueError("max_steps must be >= 10")


_DEFAULT_CONFIG = IntegratorConfig()


@dataclass(frozen=True)
class FundamentalMatrixPair:
    """Endpoint derivative matrices of the midpoint-normalized system.

    ``U0[ord, k]`` and ``U1[ord, k]`` hold the ord-th derivative of the k-th
    fundamental solution at x = 0 and x = 1; by construction the same matrix
    evaluated at x = 1/2 is the identity.  ``est_error`` accumulates the step
    controller's accepted local error estimates over both sweeps.
    """

    n: int
    U0: np.ndarray
    U1: np.ndarray
    est_error: float

    def __post_init__(self):
        for name in ("U0", "U1"):
            a = np.array(getattr(self, name), dtype=complex)
            if a.shape != (self.n, self.n):
                raise ValueError(f"{name} must be {self.n}x{self.n}")
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        if self.est_error < 0.0:
            raise ValueError("est_error must be >= 0")


def companion_rhs(c: CoefficientSet, lam: complex, x: float, y) -> np.ndarray:
    """Right-hand side of the companion system at a single point.

    out[i] = y[i+1] for i < n-1 and out[n-1] = lambda*y[0] - sum_m p_m(x)*y[n-m].
    """
    n = c.n
    y = np.asarray(y, dtype=complex)
    if y.shape != (n,):
        raise ValueError(f"state must have length n={n}")
    if not np.all(np.isfinite(y.view(float))):
        raise ValueError("state must be finite")
    out = np.empty(n, dtype=complex)
    out[:-1] = y[1:]
    acc = lam * y[0]
    for m, p in enumerate(c.functions, start=1):
        pv = complex(p(x))
        if not (np.isfinite(pv.real) and np.isfinite(pv.imag)):
            raise ValueError(f"coefficient p_{m} evaluates non-finite at x={x}")
        acc = acc - pv * y[n - m]
    out[-1] = acc
    return out


# Dormand-Prince 5(4) tableau (FSAL: the 7th stage sits at the accepted
# 5th-order solution and seeds the next step).
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
)
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)
_E = _B5 - _B4
_SAFETY = 0.9
_FAC_MIN = 0.2
_FAC_MAX = 5.0


def _stage_rhs(lams: np.ndarray, pvals_at_x: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Companion RHS for a batch: Y has shape (B, n, m), lams shape (B,)."""
    n = Y.shape[1]
    dY = np.empty_like(Y)
    dY[:, :-1, :] = Y[:, 1:, :]
    last = lams[:, None] * Y[:, 0, :]
    for m in range(1, n + 1):
        pv = pvals_at_x[m - 1]
        if pv != 0:
            last = last - pv * Y[:, n - m, :]
    dY[:, -1, :] = last
    return dY


def _march(c, lams, Y, x0, x1, cfg, err_acc, h_rec=None):
    """Advance the batched state Y (B, n, m) from x0 to x1, either direction.

    Returns (Y, h_rec) where h_rec is the controller's step recommendation,
    reusable when chaining consecutive legs.  ``err_acc`` (shape (B,))
    accumulates accepted local error estimates in absolute max-norm.
    """
    if x1 == x0:
        return Y, h_rec
    direction = 1.0 if x1 > x0 else -1.0
    span = abs(x1 - x0)

    lo, hi = min(x0, x1), max(x0, x1)
    stops = [t for t in c.breakpoints() if lo < t < hi]
    stops.sort(reverse=direction < 0)
    stops.append(x1)

    n = c.n
    nonzero = [(m, p) for m, p in enumerate(c.functions, start=1) if p.kind != "zero"]

    x = x0
    if h_rec is None:
        h_rec = min(0.05, span)
    rtol, atol = cfg.rel_tol, cfg.abs_tol
    steps = 0
    stop_idx = 0
    f_first = None  # FSAL cache, valid at the current (x, Y)

    while direction * (x1 - x) > 0:
        while direction * (stops[stop_idx] - x) <= 0:
            stop_idx += 1
        next_stop = stops[stop_idx]
        if steps >= cfg.max_steps:
            raise StiffnessError("step budget exhausted", lams, x)
        if h_rec < cfg.min_step:
            raise StiffnessError("step size underflow", lams, x)
        steps += 1

        capped = h_rec >= abs(next_stop - x)
        h = direction * h_rec if not capped else next_stop - x

        xs_stage = x + h * _C
        pvals = np.zeros((n, 7), dtype=complex)
        for m, p in nonzero:
            pvals[m - 1] = p(xs_stage)

        if f_first is None:
            f_first = _stage_rhs(lams, pvals[:, 0], Y)
        K = [f_first, None, None, None, None, None]
        for i in range(1, 6):
            Yi = Y + (h * _A[i][0]) * K[0]
            for j in range(1, i):
                aij = _A[i][j]
                if aij != 0.0:
                    Yi = Yi + (h * aij) * K[j]
            K[i] = _stage_rhs(lams, pvals[:, i], Yi)

        Y5 = Y + h * (
            _B5[0] * K[0]
            + _B5[2] * K[2]
            + _B5[3] * K[3]
            + _B5[4] * K[4]
            + _B5[5] * K[5]
        )
        K6 = _stage_rhs(lams, pvals[:, 6], Y5)
        err_vec = h * (
            _E[0] * K[0]
            + _E[2] * K[2]
            + _E[3] * K[3]
            + _E[4] * K[4]
            + _E[5] * K[5]
            + _E[6] * K6
        )

        scale = atol + rtol * np.maximum(np.abs(Y), np.abs(Y5))
        ratio = np.abs(err_vec) / scale
        per_batch = ratio.reshape(ratio.shape[0], -1).max(axis=1)
        tot = float(per_batch.max(initial=0.0))
        if not np.isfinite(tot):
            tot = np.inf

        if tot <= 1.0:
            x = next_stop if capped else x + h
            Y = Y5
            f_first = K6
            abs_err = np.abs(err_vec).reshape(err_vec.shape[0], -1).max(axis=1)
            err_acc += abs_err
            fac = _FAC_MAX if tot == 0.0 else min(_FAC_MAX, _SAFETY * tot ** -0.2)
            if not capped:
                h_rec = abs(h) * max(_FAC_MIN, fac)
            # on a capped accepted step keep the previous recommendation
        else:
            fac = max(_FAC_MIN, min(1.0, _SAFETY * tot ** -0.2))
            h_rec = abs(h) * fac
            # FSAL cache still valid: the base point did not move

    return Y, h_rec


def _check_lambda(lams, cfg):
    if np.any(np.abs(lams) > cfg.max_abs_lambda):
        raise ValueError(
            f"|lambda| exceeds the configured cap {cfg.max_abs_lambda:g}"
        )


def integrate_fundamental_many(c, lams, cfg: IntegratorConfig = _DEFAULT_CONFIG):
    """Endpoint matrices for many lambda values in one batched sweep.

    Returns (U0, U1, est) with shapes (B, n, n), (B, n, n), (B,).  All lambda
    values share the step sequence, so each is integrated at least as
    accurately as a standalone run.
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    _check_lambda(lams, cfg)
    n = c.n
    B = lams.shape[0]
    U0 = np.empty((B, n, n), dtype=complex)
    U1 = np.empty((B, n, n), dtype=complex)
    est = np.empty(B, dtype=float)
    chunk = 4096
    for a in range(0, B, chunk):
        b = min(a + chunk, B)
        batch = lams[a:b]
        eye = np.broadcast_to(np.eye(n, dtype=complex), (b - a, n, n)).copy()
        err = np.zeros(b - a)
        right, _ = _march(c, batch, eye.copy(), 0.5, 1.0, cfg, err)
        left, _ = _march(c, batch, eye, 0.5, 0.0, cfg, err)
        U0[a:b] = left
        U1[a:b] = right
        est[a:b] = err
    return U0, U1, est


def integrate_fundamental(
    c: CoefficientSet, lam: complex, cfg: IntegratorConfig = _DEFAULT_CONFIG
) -> FundamentalMatrixPair:
    """Fundamental system with identity derivative data at x = 1/2.

    Column k of the returned matrices is the k-th fundamental solution;
    integration runs twice, from the midpoint to each endpoint.
    """
    U0, U1, est = integrate_fundamental_many(c, [complex(lam)], cfg)
    return FundamentalMatrixPair(c.n, U0[0], U1[0], float(est[0]))


def solve_initial_value(
    c: CoefficientSet,
    lam: complex,
    y0,
    xs,
    cfg: IntegratorConfig = _DEFAULT_CONFIG,
) -> np.ndarray:
    """Propagate derivative data ``y0`` given at x = 1/2 to the points ``xs``.

    ``xs`` must be sorted ascending within [0, 1].  Returns an array of shape
    (len(xs), n) whose row i holds (u, u', ..., u^(n-1)) at xs[i].
    """
    lam = complex(lam)
    _check_lambda(np.array([lam]), cfg)
    n = c.n
    y0 = np.asarray(y0, dtype=complex)
    if y0.shape != (n,):
        raise ValueError(f"initial data must have length n={n}")
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 1 or len(xs) == 0:
        raise ValueError("xs must be a non-empty 1-d array")
    if np.any(np.diff(xs) <= 0):
        raise ValueError("xs must be strictly increasing")
    if xs[0] < 0.0 or xs[-1] > 1.0:
        raise ValueError("xs must lie within [0, 1]")

    lams = np.array([lam])
    out = np.empty((len(xs), n), dtype=complex)
    err = np.zeros(1)

    # Rightward pass over targets >= 1/2, then leftward over the rest.
    right_idx = [i for i, t in enumerate(xs) if t >= 0.5]
    left_idx = [i for i, t in enumerate(xs) if t < 0.5]
    Y = y0.reshape(1, n, 1).copy()
    pos, h = 0.5, None
    for i in right_idx:
        Y, h = _march(c, lams, Y, pos, float(xs[i]), cfg, err, h)
        pos = float(xs[i])
        out[i] = Y[0, :, 0]
    Y = y0.reshape(1, n, 1).copy()
    pos, h = 0.5, None
    for i in reversed(left_idx):
        Y, h = _march(c, lams, Y, pos, float(xs[i]), cfg, err, h)
        pos = float(xs[i])
        out[i] = Y[0, :, 0]
    return out


def wronskian_predicted(c: CoefficientSet, x: float, rel_tol: float = 1e-10) -> complex:
    """Wronskian of the midpoint-normalized system at ``x`` via the trace rule.

    The companion matrix has trace -p_1, so the determinant of the
    order-sorted derivative matrix is exp(-int_{1/2}^{x} p_1(t) dt), computed
    here by adaptive quadrature (independent of the stepper above).
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    p1 = c.functions[0]
    if x == 0.5 or p1.kind == "zero":
        return 1 + 0j
    lo, hi = min(0.5, x), max(0.5, x)
    pts = [t for t in p1.breakpoints if lo < t < hi] or None

    def _component(part):
        res = quad(
            lambda t: getattr(complex(p1(t)), part),
            0.5,
            x,
            points=pts,
            epsabs=1e-14,
            epsrel=rel_tol,
            limit=200,
            full_output=True,
        )
        if len(res) > 3:
            raise QuadratureError(f"quadrature of p_1 did not converge: {res[3]}")
        return res[0]

    integral = complex(_component("real"), _component("imag"))
    return cmath.exp(-integral)
