"""Kernel functions and kernel (Gram) matrices.

Two strictly positive definite translation-invariant kernels are provided:

* ``gaussian``:  k(x, x') = exp(-sigma * ||x - x'||_2^2)
* ``matern1``:   k(x, x') = exp(-sigma * ||x - x'||_1)

Both take values in (0, 1] and equal 1 exactly when x = x'.  The kernel
matrix of distinct points is symmetric positive definite; repeated points
make it singular, so they are rejected by default.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist, pdist, squareform

from .errors import DefinitenessError, DuplicatePointError, InputError
from .linalg import cg_solve

logger = logging.getLogger(__name__)

KERNEL_FAMILIES = ("gaussian", "matern1")

#: Diagonal shift applied when gram() is asked to regularize a singular matrix.
JITTER = 1e-8

_METRIC = {"gaussian": "sqeuclidean", "matern1": "cityblock"}


@dataclass(frozen=True)
class KernelSpec:
    family: str
    sigma: float

    def __post_init__(self):
        if self.family not in KERNEL_FAMILIES:
            raise InputError(
                f"unknown kernel family {self.family!r}; choose from {KERNEL_FAMILIES}"
            )
        if not (self.sigma > 0 and np.isfinite(self.sigma)):
            raise InputError(f"kernel width sigma must be positive, got {self.sigma}")


@dataclass
class GramMatrix:
    """Dense symmetric kernel matrix."""

    entries: np.ndarray

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=float)
        if self.entries.ndim != 2 or self.entries.shape[0] != self.entries.shape[1]:
            raise InputError("kernel matrix must be square")

    @property
    def size(self) -> int:
        return self.entries.shape[0]


def eval_kernel(spec: KernelSpec, x, xp) -> float:
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    if x.ndim != 1 or xp.ndim != 1 or x.shape != xp.shape:
        raise InputError("kernel arguments must be 1-D vectors of equal dimension")
    diff = x - xp
    if spec.family == "gaussian":
        dist = float(diff @ diff)
    else:
        dist = float(np.abs(diff).sum())
    return float(np.exp(-spec.sigma * dist))


def cross_gram(spec: KernelSpec, points, others) -> np.ndarray:
    """Rectangular kernel matrix k(points_i, others_j)."""
    pts = np.asarray(points, dtype=float)
    oth = np.asarray(others, dtype=float)
    if pts.ndim != 2 or oth.ndim != 2 or pts.shape[1] != oth.shape[1]:
        raise InputError("point sets must be 2-D with matching feature dimension")
    return np.exp(-spec.sigma * cdist(pts, oth, metric=_METRIC[spec.family]))


def gram(spec: KernelSpec, points, *, jitter: bool = False) -> GramMatrix:
    """Kernel matrix of a point set.

    Each unordered pair is evaluated once and mirrored, so the result is
    exactly symmetric with a unit diagonal.  Identical points are rejected
    with an error naming the offending pair unless ``jitter`` is set, in
    which case JITTER is added to the diagonal instead (breaking the unit
    diagonal, which is logged).
    """
    pts = np.ascontiguousarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise InputError("points must be a nonempty 2-D array")
    if not np.all(np.isfinite(pts)):
        raise InputError("points must be finite")
    n = pts.shape[0]
    if n == 1:
        entries = np.ones((1, 1))
    else:
        cond = pdist(pts, metric=_METRIC[spec.family])
        if not jitter:
            zero = np.flatnonzero(cond == 0.0)
            if zero.size:
                iu, ju = np.triu_indices(n, k=1)
                i, j = int(iu[zero[0]]), int(ju[zero[0]])
                raise DuplicatePointError(
                    f"points {i} and {j} are identical; the kernel matrix would be "
                    f"singular (pass jitter=True to regularize)"
                )
        entries = np.exp(-spec.sigma * squareform(cond))
    if jitter:
        entries[np.diag_indices(n)] += JITTER
        logger.warning(
            "added %g to the kernel matrix diagonal; diagonal entries are now 1 + %g",
            JITTER,
            JITTER,
        )
    return GramMatrix(entries)


def min_eigenvalue(A: GramMatrix, tol: float) -> float:
    """Smallest eigenvalue of a symmetric positive definite matrix.

    Inverse power iteration; each inverse application is a conjugate-gradient
    solve, so no factorization of A is formed.  Stops when two successive
    Rayleigh quotients agree to relative tolerance ``tol`` (cap 500 sweeps).
    Raises DefinitenessError when the estimate is not positive, or falls
    below the numerical noise floor size * eps * max|A|, in which case A
    cannot be certified positive definite at working precision.
    """
    if not (tol > 0):
        raise InputError("tolerance must be positive")
    m = A.entries
    n = A.size
    floor = n * np.finfo(float).eps * float(np.abs(m).max())
    rng = np.random.default_rng(0)
    x = rng.standard_normal(n)
    x /= np.linalg.norm(x)
    mu_prev = None
    mu = None
    for _ in range(500):
        try:
            sol = cg_solve(m, x, np.zeros(n), tol=1e-12, max_iter=max(4 * n, 16))
        except DefinitenessError as exc:
            raise DefinitenessError(f"matrix is not positive definite: {exc}") from exc
        y = sol.x
        ny = float(np.linalg.norm(y))
        if ny == 0.0 or not np.isfinite(ny):
            raise DefinitenessError("inverse iteration produced a degenerate vector")
        y = y / ny
        mu = float(y @ (m @ y))
        if mu <= floor:
            raise DefinitenessError(
                f"estimated smallest eigenvalue {mu:.3e} is at or below the "
                f"numerical noise floor {floor:.3e}; matrix is numerically singular"
            )
        if mu_prev is not None and abs(mu - mu_prev) <= tol * abs(mu):
            return mu
        mu_prev = mu
        x = y
    return mu
