"""Classifier family: LogReg, MLP, GCN, RGCN, MixHop, all ending in a
per-node sigmoid score.

The relational layers follow mean-per-relation neighbor aggregation with a
dedicated self-loop weight; every declared relation is split into a forward
and an inverse effective relation so information flows both ways while
staying direction-aware.
"""
from __future__ import annotations

from dataclasses import dataclass, field, asdict

import numpy as np
import scipy.sparse as sp

from . import autodiff as ad
from .autodiff import Tensor
from .errors import ContractError, ShapeError
from .graphs import DiscourseGraph, Edge, RelationType

MODEL_KINDS = ("LogReg", "MLP", "GCN", "RGCN", "MixHop")


@dataclass(frozen=True)
class ModelConfig:
    kind: str
    input_dim: int
    n_layers: int = 3
    hidden_dim: int = 128
    hop_set: tuple[int, ...] = (0, 1, 2)
    adjacency_norm: str = "sym"

    def __post_init__(self):
        object.__setattr__(self, "hop_set", tuple(self.hop_set))
        if self.kind not in MODEL_KINDS:
            raise ContractError(f"unknown model kind {self.kind!r}")
        if self.n_layers < 1 or self.hidden_dim < 1 or self.input_dim < 1:
            raise ContractError("n_layers, hidden_dim and input_dim must be >= 1")
        hops = self.hop_set
        if not hops or list(hops) != sorted(set(hops)) or min(hops) < 0:
            raise ContractError(f"hop_set must be sorted, unique, non-negative: {hops}")
        if self.adjacency_norm not in ("sym", "rw"):
            raise ContractError(f"adjacency_norm must be 'sym' or 'rw', got {self.adjacency_norm!r}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hop_set"] = list(self.hop_set)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        return cls(**{k: (tuple(v) if k == "hop_set" else v) for k, v in d.items()})


@dataclass(frozen=True)
class RelationBasis:
    """Effective relation ids for an RGCN: forward/inverse per declared
    relation plus one shared self-loop pseudo-relation."""

    declared: tuple[RelationType, ...] = field(default_factory=lambda: tuple(RelationType))

    def __post_init__(self):
        object.__setattr__(self, "declared", tuple(self.declared))
        if len(set(self.declared)) != len(self.declared):
            raise ContractError("duplicate relation in basis")

    @property
    def n_effective(self) -> int:
        return 2 * len(self.declared) + 1

    @property
    def self_id(self) -> int:
        return 2 * len(self.declared)

    def forward_id(self, rel: RelationType) -> int:
        return 2 * self._index(rel)

    def inverse_id(self, rel: RelationType) -> int:
        return 2 * self._index(rel) + 1

    def _index(self, rel: RelationType) -> int:
        try:
            return self.declared.index(rel)
        except ValueError:
            raise ContractError(f"relation {rel.value} not declared in basis") from None


def build_relation_aggregates(g: DiscourseGraph, basis: RelationBasis) -> dict[int, sp.csr_matrix]:
    """Mean-aggregation matrix per effective relation with at least one edge.

    Entry (i, j) of matrix r is 1/|N_i^r| when j is an r-neighbor of i, so
    ``M_r @ h`` is the per-node neighbor mean under r.
    """
    by_rel: dict[int, tuple[list[int], list[int]]] = {}
    for e in g.edges:
        fid = basis.forward_id(e.relation)
        rows, cols = by_rel.setdefault(fid, ([], []))
        rows.append(e.dst)
        cols.append(e.src)
        iid = basis.inverse_id(e.relation)
        rows, cols = by_rel.setdefault(iid, ([], []))
        rows.append(e.src)
        cols.append(e.dst)
    n = g.n_nodes
    out: dict[int, sp.csr_matrix] = {}
    for rid, (rows, cols) in by_rel.items():
        counts = np.bincount(rows, minlength=n).astype(np.float64)
        data = 1.0 / counts[rows]
        out[rid] = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
    return out


def build_normalized_adjacency(g: DiscourseGraph, norm: str = "sym") -> sp.csr_matrix:
    """Self-looped adjacency of the undirected simplification, normalized.

    ``sym`` gives D^-1/2 (A+I) D^-1/2, ``rw`` gives D^-1 (A+I).
    """
    n = g.n_nodes
    pairs = g.undirected_pairs()
    rows = [a for a, b in pairs] + [b for a, b in pairs] + list(range(n))
    cols = [b for a, b in pairs] + [a for a, b in pairs] + list(range(n))
    data = np.ones(len(rows), dtype=np.float64)
    a_tilde = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
    deg = np.asarray(a_tilde.sum(axis=1)).reshape(-1)
    if norm == "sym":
        inv_sqrt = 1.0 / np.sqrt(deg)
        d_half = sp.diags(inv_sqrt)
        return (d_half @ a_tilde @ d_half).tocsr()
    if norm == "rw":
        return (sp.diags(1.0 / deg) @ a_tilde).tocsr()
    raise ContractError(f"unknown adjacency norm {norm!r}")


class GraphOperators:
    """Per-graph cache of the propagation matrices used by the conv layers."""

    def __init__(self, g: DiscourseGraph, basis: RelationBasis | None = None, norm: str = "sym"):
        self.graph = g
        self.basis = basis or RelationBasis()
        self.norm = norm
        self._rel_agg: dict[int, sp.csr_matrix] | None = None
        self._a_hat: sp.csr_matrix | None = None

    @property
    def rel_agg(self) -> dict[int, sp.csr_matrix]:
        if self._rel_agg is None:
            self._rel_agg = build_relation_aggregates(self.graph, self.basis)
        return self._rel_agg

    @property
    def a_hat(self) -> sp.csr_matrix:
        if self._a_hat is None:
            self._a_hat = build_normalized_adjacency(self.graph, self.norm)
        return self._a_hat


def glorot(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=(fan_in, fan_out))


def _layer_dims(cfg: ModelConfig) -> list[tuple[int, int]]:
    dims = []
    width_in = cfg.input_dim
    for _ in range(cfg.n_layers):
        dims.append((width_in, cfg.hidden_dim))
        width_in = cfg.hidden_dim * (len(cfg.hop_set) if cfg.kind == "MixHop" else 1)
    return dims

def head_input_dim(cfg: ModelConfig) -> int:
    if cfg.kind == "LogReg":
        return cfg.input_dim
    if cfg.kind == "MixHop":
        return cfg.hidden_dim * len(cfg.hop_set)
    return cfg.hidden_dim


def init_params(cfg: ModelConfig, seed: int, basis: RelationBasis | None = None) -> dict[str, Tensor]:
    """Seeded Glorot-uniform weights, zero biases, in stable name order."""
    rng = np.random.Generator(np.random.PCG64(seed))
    basis = basis or RelationBasis()
    params: dict[str, Tensor] = {}

    def w(name, fan_in, fan_out):
        params[name] = Tensor(glorot(rng, fan_in, fan_out), requires_grad=True)

    if cfg.kind != "LogReg":
        for l, (d_in, d_out) in enumerate(_layer_dims(cfg)):
            if cfg.kind == "MLP":
                w(f"layer{l}.w", d_in, d_out)
                params[f"layer{l}.b"] = Tensor(np.zeros((1, d_out)), requires_grad=True)
            elif cfg.kind == "GCN":
                w(f"layer{l}.w", d_in, d_out)
            elif cfg.kind == "RGCN":
                for rid in range(basis.n_effective):
                    w(f"layer{l}.rel{rid}.w", d_in, d_out)
            elif cfg.kind == "MixHop":
                for p in cfg.hop_set:
                    w(f"layer{l}.hop{p}.w", d_in, d_out)
    w("head.w", head_input_dim(cfg), 1)
    params["head.b"] = Tensor(np.zeros((1, 1)), requires_grad=True)
    return params


def rgcn_layer_forward(h: Tensor, g: DiscourseGraph, weights: dict[int, Tensor],
                       basis: RelationBasis, apply_relu: bool = True,
                       ops: GraphOperators | None = None) -> Tensor:
    """One relational conv step: sum over effective relations of the
    neighbor mean times that relation's weights, plus the self-loop term.

    Relations with no neighbors contribute nothing (no division by zero).
    """
    if h.shape[0] != g.n_nodes:
        raise ShapeError(f"{h.shape[0]} feature rows for {g.n_nodes} nodes")
    ops = ops or GraphOperators(g, basis)
    out = ad.matmul(h, weights[basis.self_id])
    for rid in sorted(ops.rel_agg):
        pooled = ad.spmm(ops.rel_agg[rid], h)
        out = ad.add(out, ad.matmul(pooled, weights[rid]))
    return ad.relu(out) if apply_relu else out


def gcn_layer_forward(h: Tensor, g: DiscourseGraph, w: Tensor, apply_relu: bool = True,
                      ops: GraphOperators | None = None) -> Tensor:
    """Relation-agnostic conv: normalized-adjacency propagation, then weights."""
    if h.shape[0] != g.n_nodes:
        raise ShapeError(f"{h.shape[0]} feature rows for {g.n_nodes} nodes")
    ops = ops or GraphOperators(g)
    out = ad.matmul(ad.spmm(ops.a_hat, h), w)
    return ad.relu(out) if apply_relu else out


def mixhop_layer_forward(h: Tensor, g: DiscourseGraph, weights: dict[int, Tensor],
                         hop_set: tuple[int, ...], apply_relu: bool = True,
                         ops: GraphOperators | None = None) -> Tensor:
    """Column-concatenation over adjacency powers: [A^p h W_p for p in hops]."""
    if h.shape[0] != g.n_nodes:
        raise ShapeError(f"{h.shape[0]} feature rows for {g.n_nodes} nodes")
    ops = ops or GraphOperators(g)
    parts = []
    cur = h
    max_p = max(hop_set)
    for p in range(max_p + 1):
        if p in hop_set:
            parts.append(ad.matmul(cur, weights[p]))
        if p < max_p:
            cur = ad.spmm(ops.a_hat, cur)
    out = ad.concat_cols(parts)
    return ad.relu(out) if apply_relu else out


def _as_feature_tensor(h0) -> Tensor:
    if isinstance(h0, Tensor):
        return h0
    values = getattr(h0, "values", h0)
    return Tensor(np.asarray(values, dtype=np.float64))


def forward_scores(cfg: ModelConfig, params: dict[str, Tensor], h0, g: DiscourseGraph | None,
                   basis: RelationBasis | None = None,
                   ops: GraphOperators | None = None) -> Tensor:
    """Sigmoid scores as an (N, 1) tensor; records on the active tape."""
    h = _as_feature_tensor(h0)
    if h.shape[1] != cfg.input_dim:
        raise ContractError(f"h0 has dim {h.shape[1]}, config says {cfg.input_dim}")
    if cfg.kind in ("GCN", "RGCN", "MixHop"):
        if g is None:
            raise ContractError(f"{cfg.kind} needs a discourse graph")
        basis = basis or (ops.basis if ops else RelationBasis())
        ops = ops or GraphOperators(g, basis, cfg.adjacency_norm)

    missing = [k for k in ("head.w", "head.b") if k not in params]
    if missing:
        raise ContractError(f"params missing {missing}")

    if cfg.kind == "MLP":
        for l in range(cfg.n_layers):
            h = ad.relu(ad.add(ad.matmul(h, params[f"layer{l}.w"]), params[f"layer{l}.b"]))
    elif cfg.kind == "GCN":
        for l in range(cfg.n_layers):
            h = gcn_layer_forward(h, g, params[f"layer{l}.w"],
                                  apply_relu=l < cfg.n_layers - 1, ops=ops)
    elif cfg.kind == "RGCN":
        for l in range(cfg.n_layers):
            weights = {rid: params[f"layer{l}.rel{rid}.w"] for rid in range(basis.n_effective)}
            h = rgcn_layer_forward(h, g, weights, basis,
                                   apply_relu=l < cfg.n_layers - 1, ops=ops)
    elif cfg.kind == "MixHop":
        for l in range(cfg.n_layers):
            weights = {p: params[f"layer{l}.hop{p}.w"] for p in cfg.hop_set}
            h = mixhop_layer_forward(h, g, weights, cfg.hop_set,
                                     apply_relu=l < cfg.n_layers - 1, ops=ops)
    logits = ad.add(ad.matmul(h, params["head.w"]), params["head.b"])
    return ad.sigmoid(logits)


def model_forward(cfg: ModelConfig, params: dict[str, Tensor], h0, g: DiscourseGraph | None,
                  basis: RelationBasis | None = None,
                  ops: GraphOperators | None = None) -> np.ndarray:
    """Per-node scores in (0, 1) as a plain vector (inference path)."""
    return forward_scores(cfg, params, h0, g, basis=basis, ops=ops).data[:, 0]


def permute_graph(g: DiscourseGraph, perm) -> DiscourseGraph:
    """Relabel node i as perm[i]."""
    perm = list(perm)
    edges = tuple(Edge(perm[e.src], perm[e.dst], e.relation) for e in g.edges)
    return DiscourseGraph(n_nodes=g.n_nodes, edges=edges)


def permute_rows(values: np.ndarray, perm) -> np.ndarray:
    out = np.empty_like(values)
    out[list(perm)] = values
    return out


def save_checkpoint(prefix: str, cfg: ModelConfig, params: dict[str, Tensor],
                    basis: RelationBasis | None = None, seed: int | None = None) -> None:
    basis = basis or RelationBasis()
    extra = {
        "model": cfg.to_dict(),
        "relations": [r.value for r in basis.declared],
        "seed": seed,
    }
    ad.save_parameters(prefix, params, extra)


def load_checkpoint(prefix: str) -> tuple[ModelConfig, dict[str, Tensor], RelationBasis, dict]:
    params, manifest = ad.load_parameters(prefix)
    cfg = ModelConfig.from_dict(manifest["model"])
    basis = RelationBasis(tuple(RelationType(name) for name in manifest["relations"]))
    return cfg, params, basis, manifest
