"""Command-line interface.

Subcommands:
  gen-data    write synthetic train/test CSVs
  train       fit a classifier and save the model file
  predict     label a feature-only CSV with a saved model
  evaluate    accuracy of a saved model on a labeled CSV
  reproduce   run a canned benchmark (t1 | t2 | fig3)

All hyperparameters are validated before any data is read, and output files
are written atomically, so a failing invocation leaves no partial files.
Exit status is 0 exactly when the command succeeded.
"""

import argparse
import sys
from dataclasses import dataclass

import numpy as np

from . import experiments
from .admm import AdmmConfig, check_rho_condition
from .data import (
    Dataset,
    generate_synthetic,
    load_csv,
    load_features_csv,
    save_csv,
    save_labeled_features,
    standardize,
)
from .errors import DefinitenessError, SplitSvmError
from .kernels import KernelSpec, gram, min_eigenvalue
from .losses import LOSSES, get_loss
from .model import (
    EIG_TOL,
    FeatureScaling,
    TrainedModel,
    load_model,
    predict_labels,
    save_model,
    train_multistart,
)


@dataclass
class RunConfig:
    command: str
    loss: str = "hinge"
    kernel: str = "gaussian"
    sigma: float = 1.0
    lam: float = 0.1
    rho: float = 0.05
    eps0: float = 1e-12
    max_iter: int = 10000
    starts: int = 20
    seed: int = 0
    train_path: str | None = None
    test_path: str | None = None
    model_path: str | None = None
    trace_path: str | None = None
    data_path: str | None = None
    output_path: str | None = None
    n_train: int = 300
    n_test: int = 120
    standardize: bool = False
    check_rho: str = "warn"
    table: str | None = None


def _add_hyper_flags(p):
    p.add_argument("--loss", choices=sorted(LOSSES), default="hinge")
    p.add_argument("--kernel", choices=("gaussian", "matern1"), default="gaussian")
    p.add_argument("--sigma", type=float, default=1.0, help="kernel width (default 1)")
    p.add_argument("--lambda", dest="lam", type=float, default=0.1,
                   help="regularization weight (default 0.1)")
    p.add_argument("--rho", type=float, default=0.05,
                   help="splitting penalty (default 0.05)")
    p.add_argument("--eps0", type=float, default=1e-12,
                   help="stopping threshold on ||alpha - A c|| (default 1e-12)")
    p.add_argument("--max-iter", type=int, default=10000)
    p.add_argument("--starts", type=int, default=20,
                   help="independent random starts (default 20)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="splitsvm",
        description="Binary kernel SVM training with nonconvex margin losses "
        "via ADMM splitting.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="write synthetic train/test CSVs")
    p.add_argument("--n-train", type=int, default=300)
    p.add_argument("--n-test", type=int, default=120)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train", dest="train_path", required=True, help="output train CSV")
    p.add_argument("--test", dest="test_path", required=True, help="output test CSV")

    p = sub.add_parser("train", help="fit a classifier")
    _add_hyper_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train", dest="train_path", required=True, help="labeled train CSV")
    p.add_argument("--model", dest="model_path", required=True, help="output model file")
    p.add_argument("--trace", dest="trace_path", help="optional per-iteration CSV")
    p.add_argument("--standardize", action="store_true",
                   help="z-score features by training statistics")
    p.add_argument("--check-rho", choices=("off", "warn", "error"), default="warn",
                   help="policy for the descent threshold on rho (default warn)")

    p = sub.add_parser("predict", help="label a feature-only CSV")
    p.add_argument("--model", dest="model_path", required=True)
    p.add_argument("--data", dest="data_path", required=True, help="feature-only CSV")
    p.add_argument("--output", dest="output_path", required=True,
                   help="output CSV (features + predicted label)")

    p = sub.add_parser("evaluate", help="accuracy on a labeled CSV")
    p.add_argument("--model", dest="model_path", required=True)
    p.add_argument("--data", dest="data_path", required=True, help="labeled CSV")

    p = sub.add_parser("reproduce", help="run a canned benchmark")
    p.add_argument("table", choices=("t1", "t2", "fig3"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", dest="output_path", required=True, help="output CSV")

    return parser


def parse_args(argv=None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    cfg = RunConfig(command=ns.command)
    for name, value in vars(ns).items():
        if name != "command" and hasattr(cfg, name):
            setattr(cfg, name, value)
    return cfg


def _admm_config(rc: RunConfig) -> AdmmConfig:
    return AdmmConfig(
        lam=rc.lam,
        rho=rc.rho,
        eps0=rc.eps0,
        max_iter=rc.max_iter,
        enforce_rho_condition=rc.check_rho,
    )


def cmd_gen_data(rc: RunConfig) -> int:
    train, test = generate_synthetic(rc.n_train, rc.n_test, rc.seed)
    save_csv(train, rc.train_path)
    save_csv(test, rc.test_path)
    print(f"wrote {train.n} training points to {rc.train_path}")
    print(f"wrote {test.n} test points to {rc.test_path}")
    return 0


def cmd_train(rc: RunConfig) -> int:
    cfg = _admm_config(rc)  # validates the hyperparameters up front
    spec = KernelSpec(rc.kernel, rc.sigma)
    train = load_csv(rc.train_path)
    scaling = None
    if rc.standardize:
        train, _, means, scales = standardize(train)
        scaling = FeatureScaling(means, scales)
    A = gram(spec, train.X)

    lambda_min = None
    if rc.check_rho != "off":
        try:
            lambda_min = min_eigenvalue(A, EIG_TOL)
            ok, threshold = check_rho_condition(cfg, lambda_min)
            verdict = "satisfied" if ok else "NOT satisfied"
            print(
                f"rho condition: rho = {cfg.rho:g} vs threshold "
                f"4*lam/lambda_min = {threshold:.6g} ({verdict})"
            )
        except DefinitenessError as exc:
            print(f"rho condition: not verifiable ({exc})")
            if rc.check_rho == "error":
                print("error: --check-rho=error requires a verifiable kernel matrix",
                      file=sys.stderr)
                return 1

    loss = get_loss(rc.loss)
    model, summaries = train_multistart(
        train, spec, loss, cfg, rc.starts, rc.seed,
        gram_matrix=A, lambda_min=lambda_min,
    )
    model.scaling = scaling

    print(f"{'start':>5} {'objective':>24} {'iters':>7} {'residual':>12} {'converged':>9}")
    for s in summaries:
        if s.error is not None:
            print(f"{s.index:>5} failed: {s.error}")
        else:
            print(
                f"{s.index:>5} {s.objective:>24.16g} {s.iterations:>7} "
                f"{s.residual:>12.3e} {str(bool(s.converged)):>9}"
            )
    print(f"selected start {model.meta.start_index} "
          f"(objective {model.meta.objective:.16g})")

    save_model(model, rc.model_path)
    print(f"wrote model to {rc.model_path}")
    if rc.trace_path:
        summaries[model.meta.start_index].trace.write_csv(rc.trace_path)
        print(f"wrote trace to {rc.trace_path}")
    return 0


def cmd_predict(rc: RunConfig) -> int:
    model = load_model(rc.model_path)
    feats = load_features_csv(rc.data_path)
    labels = predict_labels(model, feats)
    save_labeled_features(feats, labels, rc.output_path)
    print(f"wrote {feats.shape[0]} predictions to {rc.output_path}")
    return 0


def cmd_evaluate(rc: RunConfig) -> int:
    model = load_model(rc.model_path)
    ds = load_csv(rc.data_path)
    correct = int(np.sum(predict_labels(model, ds.X) == ds.y))
    print(f"{correct}/{ds.n} accuracy: {100.0 * correct / ds.n:.1f}%")
    return 0


def cmd_reproduce(rc: RunConfig) -> int:
    if rc.table == "fig3":
        result = experiments.convergence_trace(rc.seed)
        result.run.trace.write_csv(rc.output_path, extra_cumulative_step_norm=True)
        rec = result.run.trace.final
        print(f"status: {result.run.status} after {result.run.state.k} iterations")
        print(f"final residual: {rec.residual:.3e}, objective: {rec.objective:.12g}")
        print(f"wrote trace to {rc.output_path}")
        return 0
    if rc.table == "t2":
        rows = experiments.loss_kernel_table(rc.seed)
        include_seconds = False
    else:
        rows = experiments.size_scaling_table(rc.seed)
        include_seconds = True
    from ._io import write_text_atomic

    write_text_atomic(rc.output_path, experiments.rows_to_csv(rows, include_seconds))
    print(experiments.rows_to_markdown(rows, include_seconds), end="")
    print(f"wrote table to {rc.output_path}")
    return 0


_COMMANDS = {
    "gen-data": cmd_gen_data,
    "train": cmd_train,
    "predict": cmd_predict,
    "evaluate": cmd_evaluate,
    "reproduce": cmd_reproduce,
}


def main(argv=None) -> int:
    rc = parse_args(argv)
    try:
        return _COMMANDS[rc.command](rc)
    except SplitSvmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
