"""Conjugate-gradient solver for symmetric positive definite systems.

The coefficient update of the ADMM loop repeatedly solves systems of the form
(2*lam*I + rho*A) c = b where A is a kernel matrix.  The matrix is only ever
needed through products M @ v, so the solver accepts either a dense symmetric
matrix or a callable implementing the product.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DefinitenessError, InputError


@dataclass(frozen=True)
class CgResult:
    x: np.ndarray
    iters: int
    residual_norm: float
    converged: bool


def _as_operator(op):
    if callable(op):
        return op
    mat = np.asarray(op, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise InputError("dense operator must be a square matrix")
    return lambda v: mat @ v


def cg_solve(op, b, x0, tol, max_iter) -> CgResult:
    """Solve M x = b for symmetric positive definite M.

    Stops when ||b - M x|| <= tol * ||b||.  Raises DefinitenessError when a
    search direction d has d^T M d <= 0, which certifies that M is not
    positive definite.  If the iteration cap is reached first, the iterate
    with the smallest residual seen so far is returned with converged=False.
    """
    if tol < 0:
        raise InputError("cg tolerance must be nonnegative")
    if max_iter < 1:
        raise InputError("cg iteration cap must be at least 1")
    apply_m = _as_operator(op)
    b = np.asarray(b, dtype=float)
    x = np.array(x0, dtype=float, copy=True)
    if b.ndim != 1 or x.shape != b.shape:
        raise InputError("right-hand side and initial guess must be 1-D vectors of equal length")

    bnorm = float(np.linalg.norm(b))
    if bnorm == 0.0:
        # The unique solution of a definite system with zero right-hand side.
        return CgResult(np.zeros_like(b), 0, 0.0, True)
    threshold = tol * bnorm

    r = b - apply_m(x)
    d = r.copy()
    rs = float(r @ r)
    best_x = x.copy()
    best_res = np.sqrt(rs)
    iters = 0
    while np.sqrt(rs) > threshold:
        if iters >= max_iter:
            return CgResult(best_x, iters, best_res, False)
        md = apply_m(d)
        dmd = float(d @ md)
        if dmd <= 0.0:
            # At extreme tolerances the quadratic form can underflow once the
            # residual reaches the machine floor; that is convergence, not
            # indefiniteness.
            if rs <= (16.0 * np.finfo(float).eps * bnorm) ** 2:
                return CgResult(x, iters, float(np.sqrt(rs)), True)
            raise DefinitenessError(
                f"operator is not positive definite (d^T M d = {dmd:.6e})"
            )
        step = rs / dmd
        x = x + step * d
        r = r - step * md
        rs_new = float(r @ r)
        d = r + (rs_new / rs) * d
        rs = rs_new
        iters += 1
        res = np.sqrt(rs)
        if res < best_res:
            best_res = res
            best_x = x.copy()
    return CgResult(x, iters, float(np.sqrt(rs)), True)
