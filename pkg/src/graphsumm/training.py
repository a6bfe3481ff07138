"""Full-batch-per-meeting training with Adam, early stopping on validation
F1, and the seeded multi-run protocol (mean and sigma over seeds)."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from . import autodiff as ad
from .autodiff import Tape, Tensor
from .corpus import CorpusSplit, EmbeddingMatrix, Meeting, validate_corpus
from .errors import ContractError, DataError
from .graphs import DiscourseGraph
from .metrics import PRF, prf1, write_json
from .models import GraphOperators, ModelConfig, RelationBasis, forward_scores, init_params, save_checkpoint

DEFAULT_SEEDS = (11, 12, 13, 14, 15)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    max_epochs: int = 100
    patience: int = 10
    pos_weight: float | None = None
    seeds: tuple[int, ...] = DEFAULT_SEEDS
    threshold: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "seeds", tuple(self.seeds))
        if self.learning_rate <= 0:
            raise ContractError("learning_rate must be > 0")
        if not 0 <= self.patience <= self.max_epochs:
            raise ContractError("need 0 <= patience <= max_epochs")
        if not self.seeds:
            raise ContractError("seeds must be non-empty")
        if self.pos_weight is not None and self.pos_weight < 1.0:
            raise ContractError("pos_weight must be >= 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["seeds"] = list(self.seeds)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        return cls(**{k: (tuple(v) if k == "seeds" else v) for k, v in d.items()})


@dataclass(frozen=True)
class RunResult:
    seed: int
    best_epoch: int
    train_loss: tuple[float, ...]
    val_loss: tuple[float, ...]
    val_f1: tuple[float, ...]
    test: PRF
    test_loss: float
    failed: bool = False
    params: dict = field(default_factory=dict, repr=False, compare=False)


def bce_loss(scores: Tensor, labels, pos_weight: float = 1.0) -> Tensor:
    """Mean over nodes of -[pos_weight*y*log(s) + (1-y)*log(1-s)], scores
    clamped to [1e-7, 1-1e-7]."""
    y = np.asarray(labels, dtype=np.float64).reshape(-1, 1)
    if scores.shape != y.shape:
        raise ContractError(f"scores {scores.shape} vs labels {y.shape}")
    n = y.shape[0]
    s = ad.clip(scores, 1e-7, 1.0 - 1e-7)
    ones = Tensor(np.ones_like(y))
    pos_term = ad.mul(Tensor(pos_weight * y), ad.log(s))
    neg_term = ad.mul(Tensor(1.0 - y), ad.log(ad.add(ones, ad.scale(s, -1.0))))
    return ad.scale(ad.sum_all(ad.add(pos_term, neg_term)), -1.0 / n)


class Adam:
    """Adaptive moment estimation with bias correction."""

    def __init__(self, params: dict[str, Tensor], lr: float = 1e-3,
                 betas: tuple[float, float] = (0.9, 0.999), eps: float = 1e-8):
        self.params = params
        self.lr = lr
        self.b1, self.b2 = betas
        self.eps = eps
        self.t = 0
        self.m = {k: np.zeros_like(p.data) for k, p in params.items()}
        self.v = {k: np.zeros_like(p.data) for k, p in params.items()}

    def step(self) -> None:
        self.t += 1
        for name, p in self.params.items():
            g = p.grad
            if g is None:
                continue
            m = self.m[name] = self.b1 * self.m[name] + (1 - self.b1) * g
            v = self.v[name] = self.b2 * self.v[name] + (1 - self.b2) * g * g
            m_hat = m / (1 - self.b1 ** self.t)
            v_hat = v / (1 - self.b2 ** self.t)
            p.data -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)

    def zero_grad(self) -> None:
        for p in self.params.values():
            p.zero_grad()


def default_pos_weight(meetings: list[Meeting]) -> float:
    """Negative/positive label ratio over the given meetings, clamped >= 1."""
    pos = sum(sum(m.gold_labels) for m in meetings)
    total = sum(len(m) for m in meetings)
    if pos == 0:
        raise DataError("no positive labels; pos_weight undefined")
    return max(1.0, (total - pos) / pos)


def _evaluate(cfg: ModelConfig, params, meetings, graphs, embeddings, ops_cache,
              pos_weight: float, threshold: float) -> tuple[float, PRF]:
    losses = []
    preds, golds = [], []
    for m in meetings:
        scores = forward_scores(cfg, params, embeddings[m.meeting_id].values,
                                graphs.get(m.meeting_id), ops=ops_cache.get(m.meeting_id))
        y = np.asarray(m.gold_labels, dtype=np.float64)
        losses.append(bce_loss(scores, y, pos_weight).data[0, 0] * len(m))
        preds.append((scores.data[:, 0] >= threshold).astype(np.int64))
        golds.append(np.asarray(m.gold_labels, dtype=np.int64))
    n = sum(len(m) for m in meetings)
    loss = float(sum(losses) / n)
    return loss, prf1(np.concatenate(preds), np.concatenate(golds))


def _clone_params(params: dict[str, Tensor]) -> dict[str, Tensor]:
    return {k: Tensor(p.data.copy(), requires_grad=True) for k, p in params.items()}


def train_single(model_cfg: ModelConfig, train_cfg: TrainConfig, seed: int,
                 meetings: dict[str, Meeting], graphs: dict[str, DiscourseGraph],
                 embeddings: dict[str, EmbeddingMatrix], split: CorpusSplit,
                 basis: RelationBasis | None = None,
                 ops_cache: dict[str, GraphOperators] | None = None) -> RunResult:
    """One seeded run: per-epoch meeting shuffle, one Adam step per meeting,
    early stop when validation F1 has not improved for `patience` epochs."""
    basis = basis or RelationBasis()
    train_ids = sorted(split.train)
    val_ids = sorted(split.validation)
    test_ids = sorted(split.test)
    train_meetings = [meetings[i] for i in train_ids]
    val_meetings = [meetings[i] for i in val_ids]
    test_meetings = [meetings[i] for i in test_ids]

    if ops_cache is None:
        ops_cache = {i: GraphOperators(graphs[i], basis, model_cfg.adjacency_norm)
                     for i in train_ids + val_ids + test_ids if i in graphs}

    pos_weight = train_cfg.pos_weight
    if pos_weight is None:
        pos_weight = default_pos_weight(train_meetings)

    params = init_params(model_cfg, seed, basis)
    opt = Adam(params, lr=train_cfg.learning_rate)
    rng = np.random.Generator(np.random.PCG64(seed))

    best_f1 = -1.0
    best_epoch = 0
    best_params = _clone_params(params)
    since_best = 0
    train_losses: list[float] = []
    val_losses: list[float] = []
    val_f1s: list[float] = []

    try:
        for epoch in range(1, train_cfg.max_epochs + 1):
            order = rng.permutation(len(train_meetings))
            epoch_loss = 0.0
            n_nodes = 0
            for k in order:
                m = train_meetings[int(k)]
                with Tape() as tape:
                    tape.watch(*params.values())
                    scores = forward_scores(model_cfg, params,
                                            embeddings[m.meeting_id].values,
                                            graphs.get(m.meeting_id),
                                            ops=ops_cache.get(m.meeting_id))
                    loss = bce_loss(scores, m.gold_labels, pos_weight)
                    tape.backward(loss)
                opt.step()
                opt.zero_grad()
                epoch_loss += loss.data[0, 0] * len(m)
                n_nodes += len(m)
            train_losses.append(float(epoch_loss / n_nodes))

            v_loss, v_prf = _evaluate(model_cfg, params, val_meetings, graphs,
                                      embeddings, ops_cache, pos_weight,
                                      train_cfg.threshold)
            val_losses.append(v_loss)
            val_f1s.append(v_prf.f1)
            if v_prf.f1 > best_f1:
                best_f1 = v_prf.f1
                best_epoch = epoch
                best_params = _clone_params(params)
                since_best = 0
            else:
                since_best += 1
            if since_best >= train_cfg.patience:
                break
    except DataError as exc:
        warnings.warn(f"seed {seed} diverged: {exc}")
        nan = float("nan")
        return RunResult(seed, best_epoch, tuple(train_losses), tuple(val_losses),
                         tuple(val_f1s), PRF(nan, nan, nan), nan, failed=True)

    t_loss, t_prf = _evaluate(model_cfg, best_params, test_meetings, graphs,
                              embeddings, ops_cache, pos_weight, train_cfg.threshold)
    return RunResult(seed, best_epoch, tuple(train_losses), tuple(val_losses),
                     tuple(val_f1s), t_prf, t_loss, params=best_params)


def train(model_cfg: ModelConfig, train_cfg: TrainConfig,
          meetings: dict[str, Meeting], graphs: dict[str, DiscourseGraph],
          embeddings: dict[str, EmbeddingMatrix], split: CorpusSplit,
          basis: RelationBasis | None = None) -> list[RunResult]:
    """The multi-seed protocol. Refuses meetings that fail corpus validation."""
    basis = basis or RelationBasis()
    for portion in ("train", "validation", "test"):
        if not getattr(split, portion):
            raise ContractError(f"split portion {portion!r} is empty")
    split.resolve(meetings)
    wanted = split.all_ids()
    subset = {i: meetings[i] for i in wanted}
    report = validate_corpus(subset, {i: g for i, g in graphs.items() if i in wanted},
                             {i: e for i, e in embeddings.items() if i in wanted})
    if not report.ok:
        raise DataError(f"corpus validation failed for {sorted(report.failing_ids())}")

    needs_graph = model_cfg.kind in ("GCN", "RGCN", "MixHop")
    if needs_graph:
        no_graph = sorted(i for i in wanted if i not in graphs)
        if no_graph:
            raise ContractError(f"{model_cfg.kind} needs graphs; missing for {no_graph}")

    ops_cache = {i: GraphOperators(graphs[i], basis, model_cfg.adjacency_norm)
                 for i in sorted(wanted) if i in graphs}
    return [train_single(model_cfg, train_cfg, seed, meetings, graphs, embeddings,
                         split, basis=basis, ops_cache=ops_cache)
            for seed in train_cfg.seeds]


def aggregate_runs(runs: list[RunResult]) -> dict:
    """Mean/sigma of test metrics over non-failed runs (population sigma)."""
    ok = [r for r in runs if not r.failed]
    out: dict = {"n_runs": len(runs), "n_failed": len(runs) - len(ok)}
    if not ok:
        return out
    for name in ("precision", "recall", "f1"):
        vals = np.array([getattr(r.test, name) for r in ok], dtype=np.float64)
        out[f"{name}_mean"] = float(vals.mean())
        out[f"{name}_std"] = float(vals.std())
    out["test_loss_mean"] = float(np.mean([r.test_loss for r in ok]))
    out["best_epochs"] = [r.best_epoch for r in ok]
    return out


def run_metrics_payload(model_cfg: ModelConfig, train_cfg: TrainConfig,
                        runs: list[RunResult]) -> dict:
    return {
        "model": model_cfg.to_dict(),
        "train": train_cfg.to_dict(),
        "runs": [
            {
                "seed": r.seed,
                "best_epoch": r.best_epoch,
                "failed": r.failed,
                "test": (None if r.failed else r.test.to_dict()),
                "test_loss": (None if r.failed or math.isnan(r.test_loss) else r.test_loss),
                "epochs_trained": len(r.train_loss),
            }
            for r in runs
        ],
        "aggregate": aggregate_runs(runs),
    }


def run_training_job(model_cfg: ModelConfig, train_cfg: TrainConfig,
                     meetings, graphs, embeddings, split: CorpusSplit,
                     out_dir, basis: RelationBasis | None = None) -> list[RunResult]:
    """train() plus artifacts: per-seed checkpoints and metrics.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    basis = basis or RelationBasis()
    runs = train(model_cfg, train_cfg, meetings, graphs, embeddings, split, basis=basis)
    for r in runs:
        if not r.failed:
            save_checkpoint(str(out / f"seed{r.seed}"), model_cfg, r.params,
                            basis=basis, seed=r.seed)
    write_json(out / "metrics.json", run_metrics_payload(model_cfg, train_cfg, runs))
    return runs
