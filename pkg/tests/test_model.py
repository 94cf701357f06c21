import numpy as np
import pytest

from splitsvm.admm import AdmmConfig, admm_run, initial_state
from splitsvm.data import Dataset, generate_synthetic, standardize
from splitsvm.errors import (
    FormatVersionError,
    InputError,
    ParseError,
    TrainingError,
)
from splitsvm.kernels import GramMatrix, KernelSpec, gram
from splitsvm.losses import HINGE, RAMP, TLOG
from splitsvm.model import (
    FeatureScaling,
    ModelMeta,
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


def toy_model(coeffs=(2.0,), inputs=((0.0, 0.0),), scaling=None, sigma=1.0):
    meta = ModelMeta("hinge", 1.0, True, 0.0, 0.0)
    return TrainedModel(
        KernelSpec("gaussian", sigma),
        0.1,
        np.array(inputs, dtype=float),
        np.array(coeffs, dtype=float),
        meta,
        scaling=scaling,
    )


# ---------------------------------------------------------------------------
# prediction
# ---------------------------------------------------------------------------


def test_decision_value_at_training_point():
    m = toy_model(coeffs=(2.0,))
    assert decision_value(m, [0.0, 0.0]) == 2.0
    assert decision_value(m, [1.0, 0.0]) == pytest.approx(2.0 * np.exp(-1.0))


def test_decision_values_at_training_points_equal_gram_product(rng):
    pts = rng.uniform(-2.0, 2.0, size=(12, 3))
    coeffs = rng.normal(size=12)
    m = toy_model(coeffs=coeffs, inputs=pts)
    A = gram(m.kernel, pts).entries
    np.testing.assert_allclose(decision_values(m, pts), A @ coeffs, rtol=1e-12, atol=1e-14)


def test_decision_values_linear_in_coefficients(rng):
    pts = rng.normal(size=(6, 2))
    q = rng.normal(size=(4, 2))
    coeffs = rng.normal(size=6)
    base = decision_values(toy_model(coeffs=coeffs, inputs=pts), q)
    doubled = decision_values(toy_model(coeffs=2.0 * coeffs, inputs=pts), q)
    np.testing.assert_allclose(doubled, 2.0 * base, rtol=1e-14)


def test_classify_tie_goes_positive():
    m = toy_model(coeffs=(0.0,))
    assert classify(m, [5.0, 5.0]) == 1
    assert decision_value(m, [5.0, 5.0]) == 0.0


def test_classify_signs():
    m = toy_model(coeffs=(-3.0,))
    assert classify(m, [0.0, 0.0]) == -1
    assert predict_labels(m, [[0.0, 0.0], [50.0, 50.0]]).tolist() == [-1.0, 1.0]


def test_decision_value_rejects_batches():
    m = toy_model()
    with pytest.raises(InputError):
        decision_value(m, [[0.0, 0.0], [1.0, 1.0]])


def test_prediction_input_validation():
    m = toy_model()
    with pytest.raises(InputError):
        decision_values(m, [[1.0, 2.0, 3.0]])  # wrong dimension
    with pytest.raises(InputError):
        decision_values(m, [[np.nan, 0.0]])


def test_scaling_applied_before_kernel():
    scaling = FeatureScaling(np.array([1.0, 1.0]), np.array([2.0, 2.0]))
    m = toy_model(coeffs=(1.0,), inputs=((0.0, 0.0),), scaling=scaling)
    # the raw point (1, 1) scales to the stored input (0, 0)
    assert decision_value(m, [1.0, 1.0]) == 1.0


def test_model_shape_validation():
    with pytest.raises(InputError):
        toy_model(coeffs=(1.0, 2.0), inputs=((0.0, 0.0),))


def test_rkhs_norm_sq():
    A = GramMatrix(np.array([[1.0, 0.5], [0.5, 1.0]]))
    assert rkhs_norm_sq(A, [1.0, 0.0]) == 1.0
    assert rkhs_norm_sq(A, [1.0, 1.0]) == pytest.approx(3.0)
    assert rkhs_norm_sq(A, [0.0, 0.0]) == 0.0


# ---------------------------------------------------------------------------
# multi-start training
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def small_split():
    return generate_synthetic(40, 16, seed=21)


def test_single_start_equals_direct_run(small_split):
    train, _ = small_split
    cfg = AdmmConfig(lam=0.5, rho=5.0, eps0=1e-10, max_iter=2000,
                     enforce_rho_condition="off")
    spec = KernelSpec("gaussian", 1.0)
    A = gram(spec, train.X)
    model, summaries = train_multistart(train, spec, HINGE, cfg, starts=1, seed=77)
    init = initial_state(A, cfg, np.random.default_rng(77))
    direct = admm_run(HINGE, train.y, A, cfg, init)
    np.testing.assert_array_equal(model.coeffs, direct.coeffs)
    assert summaries[0].iterations == direct.state.k
    assert model.meta.start_index == 0
    assert model.meta.loss_name == "hinge"


def test_multistart_keeps_lowest_objective(small_split):
    train, _ = small_split
    cfg = AdmmConfig(lam=0.1, rho=1.0, eps0=1e-10, max_iter=3000,
                     enforce_rho_condition="off")
    spec = KernelSpec("gaussian", 1.0)
    model, summaries = train_multistart(train, spec, RAMP, cfg, starts=4, seed=5)
    objectives = [s.objective for s in summaries]
    assert len(objectives) == 4
    assert model.meta.objective == min(objectives)
    assert model.meta.start_index == int(np.argmin(objectives))
    chosen = summaries[model.meta.start_index]
    assert chosen.trace is not None
    assert chosen.trace.final.objective == model.meta.objective


def test_multistart_accepts_precomputed_gram(small_split):
    train, _ = small_split
    cfg = AdmmConfig(lam=0.5, rho=5.0, eps0=1e-8, max_iter=1000,
                     enforce_rho_condition="off")
    spec = KernelSpec("matern1", 1.0)
    A = gram(spec, train.X)
    m1, _ = train_multistart(train, spec, HINGE, cfg, starts=2, seed=3)
    m2, _ = train_multistart(train, spec, HINGE, cfg, starts=2, seed=3, gram_matrix=A)
    np.testing.assert_array_equal(m1.coeffs, m2.coeffs)


def test_multistart_gram_size_mismatch(small_split):
    train, _ = small_split
    cfg = AdmmConfig(lam=0.5, rho=5.0, enforce_rho_condition="off")
    wrong = GramMatrix(np.eye(3))
    with pytest.raises(InputError):
        train_multistart(train, KernelSpec("gaussian", 1.0), HINGE, cfg,
                         starts=1, seed=0, gram_matrix=wrong)


def test_multistart_requires_a_start(small_split):
    train, _ = small_split
    cfg = AdmmConfig(lam=0.5, rho=5.0, enforce_rho_condition="off")
    with pytest.raises(InputError):
        train_multistart(train, KernelSpec("gaussian", 1.0), HINGE, cfg,
                         starts=0, seed=0)


def test_multistart_enforces_rho_condition(separated_instance):
    data, spec, _ = separated_instance
    cfg = AdmmConfig(lam=0.5, rho=1.0, enforce_rho_condition="error")
    with pytest.raises(InputError, match="descent threshold"):
        train_multistart(data, spec, HINGE, cfg, starts=1, seed=0)


def test_multistart_reports_all_failed_starts(small_split):
    train, _ = small_split
    # An indefinite "kernel" matrix makes every start's inner solve fail.
    n = train.n
    bad = np.eye(n)
    bad[0, 1] = bad[1, 0] = 2.0
    cfg = AdmmConfig(lam=0.1, rho=1.0, max_iter=50, enforce_rho_condition="off")
    with pytest.raises(TrainingError, match="all 2 training starts failed"):
        train_multistart(train, KernelSpec("gaussian", 1.0), HINGE, cfg,
                         starts=2, seed=0, gram_matrix=GramMatrix(bad))


def test_multistart_convex_seeds_agree(separated_instance):
    data, spec, A = separated_instance
    cfg = AdmmConfig(lam=0.5, rho=5.0, eps0=1e-12, max_iter=2000)
    m1, _ = train_multistart(data, spec, HINGE, cfg, starts=2, seed=101,
                             gram_matrix=A, lambda_min=1.0)
    m2, _ = train_multistart(data, spec, HINGE, cfg, starts=2, seed=202,
                             gram_matrix=A, lambda_min=1.0)
    assert m1.meta.objective == pytest.approx(m2.meta.objective, abs=1e-8)


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------


def trained_small_model(with_scaling=False):
    train, _ = generate_synthetic(20, 4, seed=9)
    scaling = None
    if with_scaling:
        scaled, _, means, scales = standardize(train)
        train = scaled
        scaling = FeatureScaling(means, scales)
    cfg = AdmmConfig(lam=0.5, rho=5.0, eps0=1e-10, max_iter=1000,
                     enforce_rho_condition="off")
    model, _ = train_multistart(train, KernelSpec("gaussian", 1.0), TLOG, cfg,
                                starts=2, seed=13)
    model.scaling = scaling
    return model


@pytest.mark.parametrize("with_scaling", [False, True])
def test_save_load_round_trip(tmp_path, with_scaling):
    model = trained_small_model(with_scaling)
    path = tmp_path / "model.txt"
    save_model(model, str(path))
    back = load_model(str(path))
    assert back.kernel == model.kernel
    assert back.lam == model.lam
    np.testing.assert_array_equal(back.inputs, model.inputs)
    np.testing.assert_array_equal(back.coeffs, model.coeffs)
    assert back.meta == model.meta
    if with_scaling:
        np.testing.assert_array_equal(back.scaling.means, model.scaling.means)
        np.testing.assert_array_equal(back.scaling.scales, model.scaling.scales)
    else:
        assert back.scaling is None
    # identical predictions on fresh points
    q = np.random.default_rng(0).uniform(-5, 5, size=(7, 2))
    np.testing.assert_array_equal(decision_values(back, q), decision_values(model, q))


def test_saved_file_round_trips_bytes(tmp_path):
    model = trained_small_model()
    p1, p2 = tmp_path / "a.txt", tmp_path / "b.txt"
    save_model(model, str(p1))
    save_model(load_model(str(p1)), str(p2))
    assert p1.read_bytes() == p2.read_bytes()


def test_model_file_is_versioned_text(tmp_path):
    model = trained_small_model()
    path = tmp_path / "model.txt"
    save_model(model, str(path))
    first = path.read_text().splitlines()[0]
    assert first == "splitsvm-model 1"


def write_model_file(tmp_path, mutate):
    model = trained_small_model()
    path = tmp_path / "model.txt"
    save_model(model, str(path))
    lines = path.read_text().splitlines()
    lines = mutate(lines)
    bad = tmp_path / "bad.txt"
    bad.write_text("\n".join(lines) + "\n")
    return str(bad)


def test_load_rejects_wrong_magic(tmp_path):
    path = write_model_file(tmp_path, lambda ls: ["something-else 1"] + ls[1:])
    with pytest.raises(ParseError, match="not a splitsvm-model file"):
        load_model(path)


def test_load_rejects_future_version(tmp_path):
    path = write_model_file(tmp_path, lambda ls: ["splitsvm-model 2"] + ls[1:])
    with pytest.raises(FormatVersionError, match="version 2"):
        load_model(path)


def test_load_rejects_truncated_file(tmp_path):
    path = write_model_file(tmp_path, lambda ls: ls[:-3])
    with pytest.raises(ParseError, match="expected data row"):
        load_model(path)


def test_load_rejects_trailing_content(tmp_path):
    path = write_model_file(tmp_path, lambda ls: ls + ["0.0 0.0 0.0"])
    with pytest.raises(ParseError, match="trailing content"):
        load_model(path)


def test_load_rejects_bad_row_arity(tmp_path):
    def chop(ls):
        ls[-1] = " ".join(ls[-1].split()[:-1])
        return ls

    path = write_model_file(tmp_path, chop)
    with pytest.raises(ParseError, match="coefficient"):
        load_model(path)


def test_load_rejects_missing_key(tmp_path):
    def drop_rho(ls):
        return [l for l in ls if not l.startswith("rho ")]

    path = write_model_file(tmp_path, drop_rho)
    with pytest.raises(ParseError, match="'rho"):
        load_model(path)


def test_load_rejects_non_numeric(tmp_path):
    def poison(ls):
        ls[2] = "lambda abc"
        return ls

    path = write_model_file(tmp_path, poison)
    with pytest.raises(ParseError, match="numbers"):
        load_model(path)


def test_load_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_model(str(tmp_path / "absent.txt"))
