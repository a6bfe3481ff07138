import json
import math

import numpy as np
import pytest

import graphsumm.autodiff as ad
from graphsumm.autodiff import Tensor, finite_diff_check
from graphsumm.corpus import CorpusSplit
from graphsumm.errors import ContractError, DataError
from graphsumm.models import ModelConfig
from graphsumm.synthetic import SyntheticSpec, generate_synthetic
from graphsumm.training import (Adam, RunResult, TrainConfig, aggregate_runs,
                                bce_loss, default_pos_weight, run_training_job,
                                train, train_single)

from conftest import make_meeting


@pytest.fixture(scope="module")
def small_corpus():
    spec = SyntheticSpec(n_meetings=8, nodes_min=12, nodes_max=18,
                         embedding_dim=6, seed=21)
    return generate_synthetic(spec)


def _quick_train_cfg(**kw):
    base = dict(max_epochs=6, patience=2, seeds=(1,))
    base.update(kw)
    return TrainConfig(**base)


def test_train_config_validation():
    with pytest.raises(ContractError):
        TrainConfig(learning_rate=0.0)
    with pytest.raises(ContractError):
        TrainConfig(patience=11, max_epochs=10)
    with pytest.raises(ContractError):
        TrainConfig(seeds=())
    with pytest.raises(ContractError):
        TrainConfig(pos_weight=0.5)


def test_bce_loss_half_scores_is_ln2():
    scores = Tensor(np.full((4, 1), 0.5))
    loss = bce_loss(scores, [1, 1, 0, 0], pos_weight=1.0)
    assert loss.data.item() == pytest.approx(math.log(2.0))


def test_bce_loss_perfect_scores_near_zero():
    scores = Tensor(np.array([[1.0], [0.0], [1.0]]))
    loss = bce_loss(scores, [1, 0, 1], pos_weight=3.0)
    assert 0.0 < loss.data.item() <= 1e-6 * 3.0


def test_bce_loss_pos_weight_one_is_plain_bce():
    rng = np.random.Generator(np.random.PCG64(2))
    s = rng.uniform(0.05, 0.95, size=(10, 1))
    y = rng.integers(0, 2, size=10)
    loss = bce_loss(Tensor(s), y, pos_weight=1.0).data.item()
    manual = -np.mean(y * np.log(s[:, 0]) + (1 - y) * np.log(1 - s[:, 0]))
    assert loss == pytest.approx(manual)


def test_bce_loss_length_mismatch():
    with pytest.raises(ContractError):
        bce_loss(Tensor(np.full((3, 1), 0.5)), [1, 0])


def test_bce_loss_gradient_matches_finite_differences():
    rng = np.random.Generator(np.random.PCG64(5))
    y = rng.integers(0, 2, size=6)
    logits0 = Tensor(rng.normal(size=(6, 1)), requires_grad=True)

    def f(logits):
        return bce_loss(ad.sigmoid(logits), y, pos_weight=2.0)

    assert finite_diff_check(f, logits0, eps=1e-5) < 1e-4


def test_adam_first_step_is_signed_lr():
    p = Tensor(np.zeros((1, 2)), requires_grad=True)
    opt = Adam({"p": p}, lr=0.1)
    p.grad = np.array([[3.0, -7.0]])
    opt.step()
    step = 0.1 * 1.0 / (1.0 + 1e-8 / np.sqrt(0.001 / (1 - 0.999)))
    np.testing.assert_allclose(p.data, [[-0.1, 0.1]], atol=1e-6)
    assert opt.t == 1


def test_adam_skips_gradless_params():
    p = Tensor(np.ones((1, 1)), requires_grad=True)
    opt = Adam({"p": p})
    opt.step()
    np.testing.assert_array_equal(p.data, [[1.0]])


def test_default_pos_weight_clamps_at_one():
    mostly_pos = make_meeting(["a", "b", "c"], [1, 1, 0])
    assert default_pos_weight([mostly_pos]) == 1.0
    balanced = make_meeting(["a", "b", "c", "d"], [1, 0, 0, 0])
    assert default_pos_weight([balanced]) == 3.0


def test_default_pos_weight_no_positives():
    with pytest.raises(DataError):
        default_pos_weight([make_meeting(["a", "b"], [0, 0])])


def test_patience_zero_trains_one_epoch(small_corpus):
    c = small_corpus
    cfg = ModelConfig(kind="MLP", input_dim=6, n_layers=1, hidden_dim=4)
    run = train_single(cfg, TrainConfig(max_epochs=10, patience=0, seeds=(1,)),
                       seed=1, meetings=c.meetings, graphs=c.graphs,
                       embeddings=c.embeddings, split=c.split)
    assert len(run.train_loss) == 1
    assert run.best_epoch == 1


def test_train_single_is_deterministic(small_corpus):
    c = small_corpus
    cfg = ModelConfig(kind="RGCN", input_dim=6, n_layers=2, hidden_dim=8)
    kw = dict(meetings=c.meetings, graphs=c.graphs, embeddings=c.embeddings,
              split=c.split)
    a = train_single(cfg, _quick_train_cfg(), seed=7, **kw)
    b = train_single(cfg, _quick_train_cfg(), seed=7, **kw)
    assert a.train_loss == b.train_loss
    assert a.val_f1 == b.val_f1
    assert a.test == b.test
    assert a.best_epoch == b.best_epoch


def test_early_stop_restores_best_checkpoint(small_corpus):
    c = small_corpus
    cfg = ModelConfig(kind="MLP", input_dim=6, n_layers=1, hidden_dim=4)
    run = train_single(cfg, TrainConfig(max_epochs=12, patience=3, seeds=(1,)),
                       seed=3, meetings=c.meetings, graphs=c.graphs,
                       embeddings=c.embeddings, split=c.split)
    assert run.best_epoch <= len(run.val_f1)
    assert run.val_f1[run.best_epoch - 1] == max(run.val_f1)
    # stopped within patience epochs of the best
    assert len(run.val_f1) - run.best_epoch <= 3


def test_divergent_run_is_marked_failed(small_corpus):
    c = small_corpus
    cfg = ModelConfig(kind="MLP", input_dim=6, n_layers=2, hidden_dim=4)
    with pytest.warns(UserWarning, match="diverged"):
        run = train_single(cfg, _quick_train_cfg(learning_rate=1e200), seed=1,
                           meetings=c.meetings, graphs=c.graphs,
                           embeddings=c.embeddings, split=c.split)
    assert run.failed
    agg = aggregate_runs([run])
    assert agg["n_failed"] == 1
    assert "f1_mean" not in agg


def test_train_refuses_empty_split_portion(small_corpus):
    c = small_corpus
    cfg = ModelConfig(kind="MLP", input_dim=6)
    bad = CorpusSplit(train=c.split.train, validation=c.split.validation, test=())
    with pytest.raises(ContractError, match="empty"):
        train(cfg, _quick_train_cfg(), c.meetings, c.graphs, c.embeddings, bad)


def test_train_refuses_failing_meetings(small_corpus):
    c = small_corpus
    cfg = ModelConfig(kind="RGCN", input_dim=6, n_layers=1, hidden_dim=4)
    graphs = dict(c.graphs)
    del graphs[c.split.train[0]]
    with pytest.raises(DataError, match="validation failed"):
        train(cfg, _quick_train_cfg(), c.meetings, graphs, c.embeddings, c.split)


def test_aggregate_runs_mean_and_sigma():
    from graphsumm.metrics import PRF
    runs = [
        RunResult(1, 1, (0.5,), (0.5,), (0.4,), PRF(1.0, 0.5, 2 / 3), 0.3),
        RunResult(2, 1, (0.5,), (0.5,), (0.6,), PRF(0.5, 0.5, 0.5), 0.5),
    ]
    agg = aggregate_runs(runs)
    assert agg["f1_mean"] == pytest.approx((2 / 3 + 0.5) / 2)
    assert agg["f1_std"] == pytest.approx(np.std([2 / 3, 0.5]))
    assert agg["n_failed"] == 0


def test_run_training_job_writes_artifacts(tmp_path, small_corpus):
    c = small_corpus
    cfg = ModelConfig(kind="MLP", input_dim=6, n_layers=1, hidden_dim=4)
    tcfg = _quick_train_cfg(seeds=(1, 2))
    runs = run_training_job(cfg, tcfg, c.meetings, c.graphs, c.embeddings,
                            c.split, tmp_path / "run")
    assert len(runs) == 2
    payload = json.loads((tmp_path / "run" / "metrics.json").read_text())
    assert {r["seed"] for r in payload["runs"]} == {1, 2}
    assert "f1_mean" in payload["aggregate"]
    assert (tmp_path / "run" / "seed1.json").exists()
    assert (tmp_path / "run" / "seed1.bin").exists()


def test_metrics_json_byte_identical(tmp_path, small_corpus):
    c = small_corpus
    cfg = ModelConfig(kind="RGCN", input_dim=6, n_layers=1, hidden_dim=4)
    tcfg = _quick_train_cfg()
    run_training_job(cfg, tcfg, c.meetings, c.graphs, c.embeddings, c.split,
                     tmp_path / "a")
    run_training_job(cfg, tcfg, c.meetings, c.graphs, c.embeddings, c.split,
                     tmp_path / "b")
    assert (tmp_path / "a" / "metrics.json").read_bytes() == \
        (tmp_path / "b" / "metrics.json").read_bytes()
