"""Trained classifiers: prediction, multi-start training, persistence.

A trained model is the coefficient vector of a kernel expansion
s(x) = sum_i c_i k(x_i, x); the predicted label is the sign of s(x) with
ties going to +1.  Training runs several independently seeded ADMM starts
and keeps the coefficients with the smallest training objective.

Model files are plain text (format documented in the README): a version
line, the kernel, hyperparameters and run metadata, an optional feature
scaling block, then one row per training point holding its features and
coefficient.  All floats are written with 17 significant digits so a
save/load round trip is bit-exact.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from ._io import write_text_atomic
from .admm import AdmmConfig, IterationTrace, admm_run, check_rho_condition, initial_state
from .data import Dataset
from .errors import (
    DefinitenessError,
    FormatVersionError,
    InputError,
    ParseError,
    TrainingError,
)
from .kernels import GramMatrix, KernelSpec, cross_gram, gram, min_eigenvalue
from .losses import MarginLoss

FORMAT_NAME = "splitsvm-model"
FORMAT_VERSION = 1

#: Relative tolerance used when deciding the rho-condition advisory.
EIG_TOL = 1e-2


@dataclass(frozen=True)
class ModelMeta:
    loss_name: str
    rho: float
    converged: bool
    final_residual: float
    objective: float
    start_index: int = 0


@dataclass(frozen=True)
class FeatureScaling:
    means: np.ndarray
    scales: np.ndarray

    def apply(self, x: np.ndarray) -> np.ndarray:
        return (x - self.means) / self.scales


@dataclass
class TrainedModel:
    kernel: KernelSpec
    lam: float
    inputs: np.ndarray
    coeffs: np.ndarray
    meta: ModelMeta
    scaling: FeatureScaling | None = None

    def __post_init__(self):
        self.inputs = np.asarray(self.inputs, dtype=float)
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.inputs.ndim != 2:
            raise InputError("model inputs must be a 2-D array")
        if self.coeffs.shape != (self.inputs.shape[0],):
            raise InputError(
                f"coefficient count {self.coeffs.shape} does not match "
                f"{self.inputs.shape[0]} training points"
            )


def _prepare(m: TrainedModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    squeeze = x.ndim == 1
    pts = x[None, :] if squeeze else x
    if pts.ndim != 2 or pts.shape[1] != m.inputs.shape[1]:
        raise InputError(
            f"expected points with {m.inputs.shape[1]} features, got shape {x.shape}"
        )
    if not np.all(np.isfinite(pts)):
        raise InputError("prediction inputs must be finite")
    if m.scaling is not None:
        pts = m.scaling.apply(pts)
    return pts, squeeze


def decision_values(m: TrainedModel, points) -> np.ndarray:
    pts, _ = _prepare(m, points)
    return cross_gram(m.kernel, pts, m.inputs) @ m.coeffs


def decision_value(m: TrainedModel, x) -> float:
    pts, squeeze = _prepare(m, x)
    if not squeeze:
        raise InputError("decision_value expects a single point; use decision_values")
    return float((cross_gram(m.kernel, pts, m.inputs) @ m.coeffs)[0])


def classify(m: TrainedModel, x) -> int:
    return 1 if decision_value(m, x) >= 0.0 else -1


def predict_labels(m: TrainedModel, points) -> np.ndarray:
    dv = decision_values(m, points)
    return np.where(dv >= 0.0, 1.0, -1.0)


def rkhs_norm_sq(A: GramMatrix, c) -> float:
    """Squared function-space norm c^T A c of the kernel expansion."""
    c = np.asarray(c, dtype=float)
    q = float(c @ (A.entries @ c))
    if q < -1e-12:
        raise DefinitenessError(
            f"kernel matrix quadratic form is negative ({q:.3e}); matrix is not PSD"
        )
    return max(q, 0.0)


@dataclass
class StartSummary:
    index: int
    objective: float | None
    iterations: int | None
    residual: float | None
    converged: bool | None
    trace: IterationTrace | None = None
    error: str | None = None


def train_multistart(
    data: Dataset,
    kernel_spec: KernelSpec,
    loss: MarginLoss,
    cfg: AdmmConfig,
    starts: int,
    seed: int,
    *,
    gram_matrix: GramMatrix | None = None,
    lambda_min: float | None = None,
):
    """Run ``starts`` seeded ADMM starts; keep the lowest final objective.

    Start s draws its initial point from a generator seeded with seed + s.
    Ties in the final objective resolve to the lowest start index.  Returns
    (TrainedModel, [StartSummary...]); the chosen start's trace is in its
    summary and the model metadata records which start won.
    """
    if starts < 1:
        raise InputError(f"need at least one start, got {starts}")
    A = gram_matrix if gram_matrix is not None else gram(kernel_spec, data.X)
    if A.size != data.n:
        raise InputError("kernel matrix size does not match the dataset")

    if lambda_min is None and cfg.enforce_rho_condition != "off":
        try:
            lambda_min = min_eigenvalue(A, EIG_TOL)
        except DefinitenessError as exc:
            if cfg.enforce_rho_condition == "error":
                raise
            warnings.warn(
                f"could not verify the rho condition: {exc}",
                RuntimeWarning,
                stacklevel=2,
            )
    if lambda_min is not None and cfg.enforce_rho_condition == "error":
        ok, threshold = check_rho_condition(cfg, lambda_min)
        if not ok:
            raise InputError(
                f"rho = {cfg.rho} does not exceed the descent threshold "
                f"4*lam/lambda_min = {threshold:.6g}"
            )

    summaries = []
    best = None
    for s in range(starts):
        rng = np.random.default_rng(seed + s)
        init = initial_state(A, cfg, rng)
        try:
            run = admm_run(loss, data.y, A, cfg, init, lambda_min=lambda_min)
        except DefinitenessError as exc:
            summaries.append(
                StartSummary(s, None, None, None, None, error=str(exc))
            )
            continue
        rec = run.trace.final
        summary = StartSummary(
            s, rec.objective, run.state.k, rec.residual,
            run.status == "converged", trace=run.trace,
        )
        summaries.append(summary)
        if best is None or rec.objective < best[1].objective:
            best = (run, summary)
    if best is None:
        detail = "; ".join(f"start {s.index}: {s.error}" for s in summaries)
        raise TrainingError(f"all {starts} training starts failed: {detail}")
    run, summary = best
    meta = ModelMeta(
        loss_name=loss.name,
        rho=cfg.rho,
        converged=run.status == "converged",
        final_residual=summary.residual,
        objective=summary.objective,
        start_index=summary.index,
    )
    model = TrainedModel(kernel_spec, cfg.lam, data.X, run.coeffs, meta)
    return model, summaries


def _fmt(v: float) -> str:
    return f"{float(v):.17g}"


def save_model(m: TrainedModel, path: str) -> None:
    n, d = m.inputs.shape
    lines = [
        f"{FORMAT_NAME} {FORMAT_VERSION}",
        f"kernel {m.kernel.family} {_fmt(m.kernel.sigma)}",
        f"lambda {_fmt(m.lam)}",
        f"loss {m.meta.loss_name}",
        f"rho {_fmt(m.meta.rho)}",
        f"converged {1 if m.meta.converged else 0}",
        f"residual {_fmt(m.meta.final_residual)}",
        f"objective {_fmt(m.meta.objective)}",
        f"start {m.meta.start_index}",
    ]
    if m.scaling is not None:
        lines.append("scaling 1")
        lines.append("means " + " ".join(_fmt(v) for v in m.scaling.means))
        lines.append("scales " + " ".join(_fmt(v) for v in m.scaling.scales))
    else:
        lines.append("scaling 0")
    lines.append(f"data {n} {d}")
    for i in range(n):
        row = " ".join(_fmt(v) for v in m.inputs[i])
        lines.append(f"{row} {_fmt(m.coeffs[i])}")
    write_text_atomic(path, "\n".join(lines) + "\n")


class _Reader:
    def __init__(self, path):
        self.path = path
        with open(path, encoding="utf-8") as fh:
            self.lines = fh.read().splitlines()
        self.pos = 0

    def next(self, what):
        if self.pos >= len(self.lines):
            raise ParseError(f"{self.path}: unexpected end of file, expected {what}")
        self.pos += 1
        return self.lines[self.pos - 1], self.pos

    def keyed(self, key, count=None):
        line, ln = self.next(f"'{key}' line")
        parts = line.split()
        if not parts or parts[0] != key:
            raise ParseError(f"{self.path}: line {ln}: expected '{key} ...', got {line!r}")
        if count is not None and len(parts) != count + 1:
            raise ParseError(
                f"{self.path}: line {ln}: '{key}' needs {count} values, got {len(parts) - 1}"
            )
        return parts[1:], ln

    def floats(self, raw, ln):
        try:
            return [float(v) for v in raw]
        except ValueError:
            raise ParseError(f"{self.path}: line {ln}: expected numbers, got {raw}") from None


def load_model(path: str) -> TrainedModel:
    r = _Reader(path)
    head, ln = r.next("format header")
    parts = head.split()
    if len(parts) != 2 or parts[0] != FORMAT_NAME:
        raise ParseError(f"{path}: line {ln}: not a {FORMAT_NAME} file")
    if parts[1] != str(FORMAT_VERSION):
        raise FormatVersionError(
            f"{path}: unsupported format version {parts[1]} (supported: {FORMAT_VERSION})"
        )
    kraw, ln = r.keyed("kernel", 2)
    family = kraw[0]
    (sigma,) = r.floats(kraw[1:], ln)
    kernel = KernelSpec(family, sigma)
    (lam,) = r.floats(*r.keyed("lambda", 1))
    loss_name = r.keyed("loss", 1)[0][0]
    (rho,) = r.floats(*r.keyed("rho", 1))
    (conv,) = r.floats(*r.keyed("converged", 1))
    (residual,) = r.floats(*r.keyed("residual", 1))
    (objective,) = r.floats(*r.keyed("objective", 1))
    (start_index,) = r.floats(*r.keyed("start", 1))
    (has_scaling,) = r.floats(*r.keyed("scaling", 1))
    scaling = None
    if has_scaling not in (0.0, 1.0):
        raise ParseError(f"{path}: scaling flag must be 0 or 1, got {has_scaling}")
    if has_scaling == 1.0:
        means_raw, ln_m = r.keyed("means")
        scales_raw, ln_s = r.keyed("scales")
        means = np.array(r.floats(means_raw, ln_m))
        scales = np.array(r.floats(scales_raw, ln_s))
        if means.shape != scales.shape:
            raise ParseError(f"{path}: means and scales lengths differ")
        scaling = FeatureScaling(means, scales)
    sizes_raw, ln = r.keyed("data", 2)
    try:
        n, d = int(sizes_raw[0]), int(sizes_raw[1])
    except ValueError:
        raise ParseError(f"{path}: line {ln}: data sizes must be integers") from None
    if n < 1 or d < 1:
        raise ParseError(f"{path}: line {ln}: data sizes must be positive")
    if scaling is not None and scaling.means.shape != (d,):
        raise ParseError(f"{path}: scaling vectors must have {d} entries")
    inputs = np.empty((n, d))
    coeffs = np.empty(n)
    for i in range(n):
        line, ln = r.next(f"data row {i + 1} of {n}")
        parts = line.split()
        if len(parts) != d + 1:
            raise ParseError(
                f"{path}: line {ln}: expected {d} features + 1 coefficient, "
                f"got {len(parts)} fields"
            )
        vals = r.floats(parts, ln)
        inputs[i] = vals[:d]
        coeffs[i] = vals[d]
    if r.pos < len(r.lines) and any(s.strip() for s in r.lines[r.pos:]):
        raise ParseError(f"{path}: trailing content after {n} data rows")
    meta = ModelMeta(
        loss_name=loss_name,
        rho=rho,
        converged=bool(conv),
        final_residual=residual,
        objective=objective,
        start_index=int(start_index),
    )
    return TrainedModel(kernel, lam, inputs, coeffs, meta, scaling=scaling)
