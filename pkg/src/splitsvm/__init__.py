"""Binary kernel SVM training with nonconvex margin losses via ADMM splitting."""

from .admm import (
    AdmmConfig,
    AdmmState,
    IterationTrace,
    TraceRecord,
    admm_run,
    admm_step,
    check_rho_condition,
    initial_state,
    lagrangian,
    objective_value,
    rkhs_step_norm,
    stationarity_residual,
)
from .data import Dataset, generate_synthetic, load_csv, save_csv, standardize
from .errors import (
    DefinitenessError,
    DuplicatePointError,
    FormatVersionError,
    InputError,
    ParseError,
    SplitSvmError,
    TrainingError,
)
from .kernels import GramMatrix, KernelSpec, eval_kernel, gram, min_eigenvalue
from .linalg import CgResult, cg_solve
from .losses import (
    HINGE,
    LOSSES,
    PL2,
    RAMP,
    TLOG,
    MarginLoss,
    ProxParams,
    get_loss,
    loss_value,
    prox,
    prox_vector,
)
from .model import (
    TrainedModel,
    classify,
    decision_value,
    decision_values,
    load_model,
    predict_labels,
    rkhs_norm_sq,
    save_model,
    train_multistart,
)

__version__ = "0.1.0"
