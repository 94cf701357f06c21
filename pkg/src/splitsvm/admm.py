"""ADMM splitting loop for kernel SVM training with piecewise margin losses.

The finite-dimensional training problem in the coefficient vector c is

    minimize  F(A c) + lam * c^T A c,    F(t) = (1/n) sum_i L(y_i, t_i),

with A the kernel matrix.  Introducing a split variable alpha = A c and a
multiplier gamma gives the augmented Lagrangian

    F(alpha) + lam * c^T A c + gamma^T (alpha - A c)
    + (rho / 2) * ||alpha - A c||^2.

One iteration performs

  1. alpha update: n independent scalar subproblems with anchors
     (A c)_i - gamma_i / rho, solved exactly (losses.prox_vector);
  2. c update: solve (2 lam I + rho A) c = rho alpha + gamma by warm-started
     conjugate gradients;
  3. multiplier update: gamma = 2 lam c, the closed form the exact c update
     implies for an invertible A.

The loop stops when ||alpha - A c||_2 < eps0.  When rho exceeds the
threshold 4 lam / lambda_min(A) the augmented Lagrangian is guaranteed to
decrease every iteration, and the iterates are bounded; both facts are
monitored as diagnostics rather than assumed.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from ._io import write_text_atomic
from .errors import DefinitenessError, InputError
from .kernels import GramMatrix
from .linalg import cg_solve
from .losses import MarginLoss, margin_value, prox_vector

#: Allowed uphill movement of the augmented Lagrangian before a warning.
DESCENT_SLACK = 1e-9

RHO_POLICIES = ("off", "warn", "error")


@dataclass(frozen=True)
class AdmmConfig:
    lam: float
    rho: float
    eps0: float = 1e-12
    max_iter: int = 10000
    # Two decades below the default eps0: with a looser inner solve the outer
    # residual can floor fractionally above eps0 and never stop.
    cg_tol: float = 1e-14
    check_descent: bool = True
    enforce_rho_condition: str = "warn"

    def __post_init__(self):
        if not (self.lam > 0 and np.isfinite(self.lam)):
            raise InputError(f"regularization weight lam must be positive, got {self.lam}")
        if not (self.rho > 0 and np.isfinite(self.rho)):
            raise InputError(f"penalty rho must be positive, got {self.rho}")
        if not (self.eps0 > 0):
            raise InputError(f"stopping threshold eps0 must be positive, got {self.eps0}")
        if self.max_iter < 1:
            raise InputError(f"iteration cap must be at least 1, got {self.max_iter}")
        if not (0 <= self.cg_tol < 1):
            raise InputError(f"cg_tol must lie in [0, 1), got {self.cg_tol}")
        if self.enforce_rho_condition not in RHO_POLICIES:
            raise InputError(
                f"enforce_rho_condition must be one of {RHO_POLICIES}, "
                f"got {self.enforce_rho_condition!r}"
            )


@dataclass
class AdmmState:
    alpha: np.ndarray
    c: np.ndarray
    gamma: np.ndarray
    k: int


@dataclass(frozen=True)
class TraceRecord:
    k: int
    lagrangian: float
    objective: float
    residual: float
    step_norm_H: float


@dataclass
class IterationTrace:
    records: list = field(default_factory=list)

    def append(self, rec: TraceRecord) -> None:
        self.records.append(rec)

    @property
    def final(self) -> TraceRecord:
        return self.records[-1]

    def __len__(self) -> int:
        return len(self.records)

    def to_csv(self, extra_cumulative_step_norm: bool = False) -> str:
        header = "k,lagrangian,objective,residual,step_norm_H"
        if extra_cumulative_step_norm:
            header += ",cum_step_norm_H"
        lines = [header]
        cum = 0.0
        for rec in self.records:
            row = (
                f"{rec.k},{rec.lagrangian:.17g},{rec.objective:.17g},"
                f"{rec.residual:.17g},{rec.step_norm_H:.17g}"
            )
            if extra_cumulative_step_norm:
                cum += rec.step_norm_H
                row += f",{cum:.17g}"
            lines.append(row)
        return "\n".join(lines) + "\n"

    def write_csv(self, path: str, extra_cumulative_step_norm: bool = False) -> None:
        write_text_atomic(path, self.to_csv(extra_cumulative_step_norm))


@dataclass
class AdmmRunResult:
    state: AdmmState
    coeffs: np.ndarray
    trace: IterationTrace
    status: str  # "converged" | "max_iter"


def initial_state(A: GramMatrix, cfg: AdmmConfig, rng: np.random.Generator) -> AdmmState:
    """Random start: c ~ Uniform[-10, 10]^n with alpha and gamma consistent."""
    c0 = rng.uniform(-10.0, 10.0, A.size)
    return AdmmState(alpha=A.entries @ c0, c=c0, gamma=2.0 * cfg.lam * c0, k=0)


def _risk(loss, labels, t) -> float:
    return float(np.mean(margin_value(loss, labels * t)))


def _lagrangian_given_ac(loss, labels, cfg, st, ac) -> float:
    res = st.alpha - ac
    return (
        _risk(loss, labels, st.alpha)
        + cfg.lam * float(st.c @ ac)
        + float(st.gamma @ res)
        + 0.5 * cfg.rho * float(res @ res)
    )


def lagrangian(loss, labels, A: GramMatrix, cfg: AdmmConfig, st: AdmmState) -> float:
    """Augmented Lagrangian at the given state."""
    labels = np.asarray(labels, dtype=float)
    return _lagrangian_given_ac(loss, labels, cfg, st, A.entries @ st.c)


def objective_value(loss, labels, A: GramMatrix, cfg: AdmmConfig, c) -> float:
    """Training objective F(A c) + lam c^T A c at a coefficient vector."""
    labels = np.asarray(labels, dtype=float)
    c = np.asarray(c, dtype=float)
    ac = A.entries @ c
    return _risk(loss, labels, ac) + cfg.lam * float(c @ ac)


def admm_step(loss: MarginLoss, labels, A: GramMatrix, cfg: AdmmConfig, st: AdmmState) -> AdmmState:
    """One full iteration (alpha, c, gamma); the input state is not modified."""
    labels = np.asarray(labels, dtype=float)
    n = A.size
    if labels.shape != (n,):
        raise InputError("labels must match the kernel matrix size")
    anchors = A.entries @ st.c - st.gamma / cfg.rho
    alpha = prox_vector(loss, cfg.rho, n, labels, anchors)
    b = cfg.rho * alpha + st.gamma
    m = A.entries

    def op(w):
        return 2.0 * cfg.lam * w + cfg.rho * (m @ w)

    sol = cg_solve(op, b, st.c, tol=cfg.cg_tol, max_iter=max(4 * n, 16))
    c = sol.x
    return AdmmState(alpha=alpha, c=c, gamma=2.0 * cfg.lam * c, k=st.k + 1)


def rkhs_step_norm(A: GramMatrix, c_new, c_old) -> float:
    """Function-space distance between successive classifiers.

    For s = sum_i c_i k(x_i, .), the squared distance between the functions
    for c_new and c_old is (c_new - c_old)^T A (c_new - c_old).
    """
    d = np.asarray(c_new, dtype=float) - np.asarray(c_old, dtype=float)
    q = float(d @ (A.entries @ d))
    if q < -1e-12:
        raise DefinitenessError(
            f"kernel matrix quadratic form is negative ({q:.3e}); matrix is not PSD"
        )
    return float(np.sqrt(max(q, 0.0)))


def check_rho_condition(cfg: AdmmConfig, lambda_min: float):
    """Whether rho clears the descent threshold 4 lam / lambda_min."""
    if not (lambda_min > 0):
        raise InputError(f"lambda_min must be positive, got {lambda_min}")
    threshold = 4.0 * cfg.lam / lambda_min
    return cfg.rho > threshold, threshold


def stationarity_residual(loss, labels, A: GramMatrix, cfg: AdmmConfig, st: AdmmState) -> float:
    """Max-norm violation of the fixed-point equations at a state.

    Zero exactly when alpha = A c and alpha solves the subproblems anchored
    at A c - gamma / rho, i.e. when the state is a stationary point.
    """
    labels = np.asarray(labels, dtype=float)
    ac = A.entries @ st.c
    split = float(np.max(np.abs(st.alpha - ac))) if A.size else 0.0
    anchors = ac - st.gamma / cfg.rho
    fixed = prox_vector(loss, cfg.rho, A.size, labels, anchors)
    return max(split, float(np.max(np.abs(st.alpha - fixed))))


def admm_run(
    loss: MarginLoss,
    labels,
    A: GramMatrix,
    cfg: AdmmConfig,
    init: AdmmState,
    lambda_min: float | None = None,
) -> AdmmRunResult:
    """Iterate from ``init`` until ||alpha - A c|| < eps0 or the cap.

    ``lambda_min`` is the smallest eigenvalue of A when the caller knows it;
    it gates the rho-condition policy and the monotone-descent diagnostic
    (both are skipped when the eigenvalue is unknown, since the descent
    guarantee only applies above the threshold).
    """
    labels = np.asarray(labels, dtype=float)
    condition_ok = None
    if lambda_min is not None:
        condition_ok, threshold = check_rho_condition(cfg, lambda_min)
        if not condition_ok and cfg.enforce_rho_condition == "error":
            raise InputError(
                f"rho = {cfg.rho} does not exceed the descent threshold "
                f"4*lam/lambda_min = {threshold:.6g}"
            )
        if not condition_ok and cfg.enforce_rho_condition == "warn":
            warnings.warn(
                f"rho = {cfg.rho} is at or below the descent threshold "
                f"{threshold:.6g}; monotone descent is not guaranteed",
                RuntimeWarning,
                stacklevel=2,
            )
    monitor_descent = bool(cfg.check_descent and condition_ok)

    st = init
    trace = IterationTrace()
    prev_c = init.c
    prev_lag = None
    status = "max_iter"
    for _ in range(cfg.max_iter):
        st = admm_step(loss, labels, A, cfg, st)
        ac = A.entries @ st.c
        res = st.alpha - ac
        resid = float(np.linalg.norm(res))
        lag = _lagrangian_given_ac(loss, labels, cfg, st, ac)
        obj = _risk(loss, labels, ac) + cfg.lam * float(st.c @ ac)
        step_norm = rkhs_step_norm(A, st.c, prev_c)
        trace.append(TraceRecord(st.k, lag, obj, resid, step_norm))
        if monitor_descent and prev_lag is not None and lag > prev_lag + DESCENT_SLACK:
            warnings.warn(
                f"augmented Lagrangian rose by {lag - prev_lag:.3e} at iteration "
                f"{st.k} despite rho clearing the descent threshold",
                RuntimeWarning,
                stacklevel=2,
            )
        prev_lag = lag
        prev_c = st.c
        if resid < cfg.eps0:
            status = "converged"
            break
    return AdmmRunResult(state=st, coeffs=st.c, trace=trace, status=status)
