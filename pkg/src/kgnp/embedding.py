"""Margin-based embedding of fixed-length attribute-triplet records.

Whole records embed as weighted sums of per-attribute triplet vectors; a
hinge loss pushes true records toward their label vector and corrupted
ones away.  A single-threaded trainer and a lock-free multi-worker
variant (which touches only a sampled dimension subset of the true
sample's vectors) share one code path.  Unseen records classify through a
synthesized virtual vector and a kNN vote over the stored record index.
"""

from __future__ import annotations

import json
import struct
import threading
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DataError, EngineError
from .mtuples import (
    CARDIO_WEIGHTS,
    NEGATIVE,
    POSITIVE,
    UNKNOWN,
    DatasetSchema,
    MTuple,
)
from .terms import Atom, Num, Triplet

_MAGIC = b"KGNPVEC1"
_FORMAT_VERSION = 1


@dataclass
class EmbedConfig:
    m: int
    n: int = 64
    weights: Optional[Sequence[float]] = None
    margin: float = 1.0
    learning_rate: float = 0.001
    norm: str = "L1"
    c: float = 0.04
    epochs: int = 50
    seed: int = 0
    j_range: Tuple[int, int] = (1, 1)
    threads: int = 1
    dim_sample: Optional[int] = None  # per-worker dimension subset size v

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise DataError("m and n must be positive")
        if not 0.0 < self.c < 1.0:
            raise DataError("sampling coefficient c must lie in (0, 1)")
        if self.margin <= 0:
            raise DataError("margin must be positive")
        if self.norm not in ("L1", "L2"):
            raise DataError("norm must be 'L1' or 'L2'")
        if self.threads < 1:
            raise DataError("threads must be >= 1")
        v = self.dim_sample
        if v is not None and not 1 <= v <= self.n:
            raise DataError("dimension sample size must lie in [1, n]")
        lo, hi = self.j_range
        if not 1 <= lo <= hi <= self.m:
            raise DataError("corruption count range must lie in [1, m]")
        w = self.weights
        if w is None:
            w = CARDIO_WEIGHTS if self.m == len(CARDIO_WEIGHTS) else (1.0,) * self.m
        w = np.asarray(w, dtype=float)
        if w.shape != (self.m,) or np.any(w <= 0):
            raise DataError("need %d positive weights" % self.m)
        self.weights = tuple(w / w.sum())


@dataclass
class HHEntry:
    attr_idx: Optional[Tuple[int, ...]]  # rows into the per-attribute tables
    combined: np.ndarray  # sum of weighted local vectors
    label: str


@dataclass
class AttributeSlot:
    """One attribute position: its distinct (relation, tail) values and
    their vectors, one row per distinct value."""

    name: str
    finite: bool
    interval: Optional[Tuple[float, float]]
    keys: List[tuple] = field(default_factory=list)
    vectors: Optional[np.ndarray] = None
    index: Dict[tuple, int] = field(default_factory=dict)

    def row(self, key: tuple) -> int:
        if key not in self.index:
            raise DataError("unknown value %r for attribute %r" % (key, self.name))
        return self.index[key]


@dataclass
class VirtualVector:
    vector: np.ndarray
    contributing: Tuple[Tuple[str, ...], ...]  # per attribute, source keys used
    subject: str


@dataclass
class EmbeddingSpace:
    n: int
    m: int
    norm: str
    weights: np.ndarray
    attributes: List[AttributeSlot]
    label_vectors: Dict[str, np.ndarray]
    hh: Dict[str, HHEntry] = field(default_factory=dict)
    provenance: str = "trained-transmeth"
    loss_log: List[float] = field(default_factory=list)

    def combined_of(self, attr_idx: Sequence[int]) -> np.ndarray:
        out = np.zeros(self.n)
        for i, row in enumerate(attr_idx):
            out += self.weights[i] * self.attributes[i].vectors[row]
        return out

    def weighted_locals(self, entry: HHEntry) -> List[np.ndarray]:
        if entry.attr_idx is None:
            raise DataError("imported spaces carry no local vectors")
        return [
            self.weights[i] * self.attributes[i].vectors[row]
            for i, row in enumerate(entry.attr_idx)
        ]


def _tail_value(t: Triplet):
    if isinstance(t.tail, Num):
        return t.tail.value
    if isinstance(t.tail, Atom):
        return t.tail.name
    raise DataError("unsupported tail %s in attribute triplet" % t.tail)


def _key(t: Triplet) -> tuple:
    return (t.relation, _tail_value(t))


def _record_idx(space: EmbeddingSpace, mt: MTuple) -> Tuple[int, ...]:
    if len(mt.triplets) != space.m:
        raise DataError("record %s has %d attributes, space needs %d"
                        % (mt.id, len(mt.triplets), space.m))
    return tuple(space.attributes[i].row(_key(t)) for i, t in enumerate(mt.triplets))


def initialize(
    dataset: Sequence[MTuple],
    config: EmbedConfig,
    schema: Optional[DatasetSchema] = None,
) -> EmbeddingSpace:
    """Scan the dataset for distinct per-attribute values, then draw every
    vector i.i.d. uniform on [-6/sqrt(n), 6/sqrt(n)] with the config seed."""
    if not dataset:
        raise DataError("cannot initialize a space from an empty dataset")
    m, n = config.m, config.n
    names = (
        list(schema.attributes)
        if schema is not None
        else [t.relation for t in dataset[0].triplets]
    )
    if len(names) != m:
        raise DataError("schema lists %d attributes, config says %d" % (len(names), m))
    slots = []
    for i, name in enumerate(names):
        finite = schema is not None and name in schema.finite
        interval = schema.interval(name) if schema is not None else None
        slots.append(AttributeSlot(name=name, finite=finite, interval=interval))
    for mt in dataset:
        if len(mt.triplets) != m:
            raise DataError("record %s has %d attributes, expected %d"
                            % (mt.id, len(mt.triplets), m))
        for i, t in enumerate(mt.triplets):
            k = _key(t)
            slot = slots[i]
            if k not in slot.index:
                slot.index[k] = len(slot.keys)
                slot.keys.append(k)
    rng = np.random.default_rng(config.seed)
    bound = 6.0 / np.sqrt(n)
    for slot in slots:
        slot.vectors = rng.uniform(-bound, bound, size=(len(slot.keys), n))
    label_vectors = {
        POSITIVE: rng.uniform(-bound, bound, size=n),
        NEGATIVE: rng.uniform(-bound, bound, size=n),
    }
    return EmbeddingSpace(
        n=n,
        m=m,
        norm=config.norm,
        weights=np.asarray(config.weights),
        attributes=slots,
        label_vectors=label_vectors,
    )


# -- distance and the hinge loss ----------------------------------------


def distance(u: np.ndarray, norm: str) -> float:
    if norm == "L1":
        return float(np.abs(u).sum())
    return float(np.linalg.norm(u))


def _dgrad(u: np.ndarray, norm: str) -> np.ndarray:
    """Subgradient of d at u (sign convention: d(u) increases along it)."""
    if norm == "L1":
        return np.sign(u)
    nrm = np.linalg.norm(u)
    if nrm == 0.0:
        return np.zeros_like(u)
    return u / nrm


def _loss_parts(
    space: EmbeddingSpace,
    pos_idx: Sequence[int],
    pos_label: str,
    neg_idx: Sequence[int],
    neg_label: str,
    margin: float,
):
    u = space.combined_of(pos_idx) - space.label_vectors[pos_label]
    up = space.combined_of(neg_idx) - space.label_vectors[neg_label]
    loss = margin + distance(u, space.norm) - distance(up, space.norm)
    return max(0.0, loss), u, up


def margin_loss(pos: MTuple, neg: MTuple, space: EmbeddingSpace, config: EmbedConfig) -> float:
    loss, _, _ = _loss_parts(
        space, _record_idx(space, pos), pos.label, _record_idx(space, neg), neg.label,
        config.margin,
    )
    return loss


# -- corruption ----------------------------------------------------------


def _flip(label: str) -> str:
    if label == POSITIVE:
        return NEGATIVE
    if label == NEGATIVE:
        return POSITIVE
    raise DataError("cannot corrupt an unlabelled record")


def _corrupt_idx(space: EmbeddingSpace, attr_idx, label, k, rng):
    """Replace k random positions with a different same-attribute value and
    flip the label.  Single-valued positions are skipped in favour of
    another; if fewer than k positions are replaceable at all, error."""
    replaceable = [i for i in range(space.m) if len(space.attributes[i].keys) > 1]
    if len(replaceable) < k:
        raise DataError("cannot corrupt %d attributes: only %d have alternatives"
                        % (k, len(replaceable)))
    chosen = rng.choice(len(replaceable), size=k, replace=False)
    out = list(attr_idx)
    for c in chosen:
        i = replaceable[c]
        size = len(space.attributes[i].keys)
        row = int(rng.integers(size - 1))
        if row >= out[i]:
            row += 1  # anything but the current value
        out[i] = row
    return tuple(out), _flip(label)


def corrupt(space: EmbeddingSpace, t: MTuple, k: int, rng) -> MTuple:
    if not 1 <= k <= space.m:
        raise DataError("corruption count %d out of [1, %d]" % (k, space.m))
    idx, label = _corrupt_idx(space, _record_idx(space, t), t.label, k, rng)
    triplets = []
    for i, row in enumerate(idx):
        relation, tail = space.attributes[i].keys[row]
        tail_term = Num(tail) if isinstance(tail, (int, float)) else Atom(tail)
        triplets.append(Triplet(t.triplets[i].head, relation, tail_term))
    return MTuple(t.id, tuple(triplets), label)


# -- training ------------------------------------------------------------


def _normalize_all(space: EmbeddingSpace):
    for slot in space.attributes:
        norms = np.linalg.norm(slot.vectors, axis=1, keepdims=True)
        norms[norms == 0.0] = 1.0
        slot.vectors /= norms
    for label, vec in space.label_vectors.items():
        nrm = np.linalg.norm(vec)
        if nrm > 0.0:
            space.label_vectors[label] = vec / nrm


def _sgd_step(space, config, pos_idx, pos_label, neg_idx, neg_label, dims, pos_only):
    loss, u, up = _loss_parts(space, pos_idx, pos_label, neg_idx, neg_label, config.margin)
    if loss <= 0.0:
        return loss
    lr = config.learning_rate
    gu = _dgrad(u, space.norm)
    gup = _dgrad(up, space.norm)
    if dims is not None:
        mask = np.zeros(space.n, dtype=bool)
        mask[dims] = True
        gu = np.where(mask, gu, 0.0)
        gup = np.where(mask, gup, 0.0)
    for i, row in enumerate(pos_idx):
        space.attributes[i].vectors[row] -= lr * space.weights[i] * gu
    space.label_vectors[pos_label] = space.label_vectors[pos_label] + lr * gu
    if not pos_only:
        for i, row in enumerate(neg_idx):
            space.attributes[i].vectors[row] += lr * space.weights[i] * gup
        space.label_vectors[neg_label] = space.label_vectors[neg_label] - lr * gup
    return loss


def _epoch_pairs(records, b, rng):
    if not records:
        return []
    take = min(b, len(records))
    picked = rng.choice(len(records), size=take, replace=False)
    return [records[i] for i in picked]


def _train(dataset, config, schema, pos_only, provenance):
    positives = [mt for mt in dataset if mt.label == POSITIVE]
    negatives = [mt for mt in dataset if mt.label == NEGATIVE]
    if not positives or not negatives:
        raise DataError("training needs both positive and negative examples")
    space = initialize(dataset, config, schema)
    space.provenance = provenance
    idx_of = {mt.id: _record_idx(space, mt) for mt in dataset}
    pos_items = [(idx_of[mt.id], mt.label) for mt in positives]
    neg_items = [(idx_of[mt.id], mt.label) for mt in negatives]
    b1 = max(1, round(config.c * len(positives)))
    b2 = max(1, round(config.c * len(negatives)))
    p = config.threads
    v = config.dim_sample if config.dim_sample is not None else config.n
    base = np.random.SeedSequence(config.seed)
    worker_rngs = [np.random.default_rng(s) for s in base.spawn(p)]
    jl, jh = config.j_range

    def run_worker(rng, share1, share2, barrier, losses, slot):
        for _ in range(config.epochs):
            if barrier is not None:
                barrier.wait()  # wait for the epoch-start normalization
            dims = None
            if v < config.n:
                dims = rng.choice(config.n, size=v, replace=False)
            total, count = 0.0, 0
            for items, b in ((pos_items, share1), (neg_items, share2)):
                for attr_idx, label in _epoch_pairs(items, b, rng):
                    k = int(rng.integers(jl, jh + 1))
                    neg_idx, neg_label = _corrupt_idx(space, attr_idx, label, k, rng)
                    total += _sgd_step(
                        space, config, attr_idx, label, neg_idx, neg_label, dims, pos_only
                    )
                    count += 1
            losses[slot] += total
            losses[-1] += count
            if barrier is not None:
                barrier.wait()  # epoch done; main thread renormalizes

    if p == 1:
        rng = worker_rngs[0]
        for _ in range(config.epochs):
            _normalize_all(space)
            dims = None
            if v < config.n:
                dims = rng.choice(config.n, size=v, replace=False)
            total, count = 0.0, 0
            for items, b in ((pos_items, b1), (neg_items, b2)):
                for attr_idx, label in _epoch_pairs(items, b, rng):
                    k = int(rng.integers(jl, jh + 1))
                    neg_idx, neg_label = _corrupt_idx(space, attr_idx, label, k, rng)
                    total += _sgd_step(
                        space, config, attr_idx, label, neg_idx, neg_label, dims, pos_only
                    )
                    count += 1
            space.loss_log.append(total / max(1, count))
    else:
        barrier = threading.Barrier(p + 1)
        losses = [0.0] * p + [0]
        threads = [
            threading.Thread(
                target=run_worker,
                args=(worker_rngs[j], max(1, b1 // p), max(1, b2 // p), barrier, losses, j),
                daemon=True,
            )
            for j in range(p)
        ]
        for t in threads:
            t.start()
        for _ in range(config.epochs):
            _normalize_all(space)
            start = (sum(losses[:p]), losses[-1])
            barrier.wait()  # release workers into the epoch
            barrier.wait()  # all workers finished the epoch
            end = (sum(losses[:p]), losses[-1])
            done = end[1] - start[1]
            space.loss_log.append((end[0] - start[0]) / max(1, done))
        for t in threads:
            t.join()
    _normalize_all(space)
    for mt in dataset:
        attr_idx = idx_of[mt.id]
        space.hh[mt.id] = HHEntry(attr_idx, space.combined_of(attr_idx), mt.label)
    return space


def train_transmeth(
    dataset: Sequence[MTuple],
    config: EmbedConfig,
    schema: Optional[DatasetSchema] = None,
) -> EmbeddingSpace:
    cfg = EmbedConfig(
        m=config.m, n=config.n, weights=config.weights, margin=config.margin,
        learning_rate=config.learning_rate, norm=config.norm, c=config.c,
        epochs=config.epochs, seed=config.seed, j_range=config.j_range,
        threads=1, dim_sample=config.n,
    )
    return _train(dataset, cfg, schema, pos_only=False, provenance="trained-transmeth")


def train_transcmeth(
    dataset: Sequence[MTuple],
    config: EmbedConfig,
    schema: Optional[DatasetSchema] = None,
) -> EmbeddingSpace:
    v = config.dim_sample if config.dim_sample is not None else config.n
    # The degenerate single-worker full-dimension case is the sequential
    # algorithm itself, including its two-sided updates.
    pos_only = not (config.threads == 1 and v == config.n)
    return _train(
        dataset, config, schema, pos_only=pos_only, provenance="trained-transcmeth"
    )


# -- virtual vectors and kNN ---------------------------------------------


def construct_virtual_vector(space: EmbeddingSpace, record: MTuple, j: int) -> VirtualVector:
    """Per attribute: reject the record outright when the value is outside
    the attribute's normal interval; average the j nearest stored vectors
    (infinite domains, tail distance scaled by interval width) or the exact
    matches up to j (finite domains, failing when none match).  The result
    is the weighted sum of the per-attribute syntheses."""
    if j < 1:
        raise DataError("J must be >= 1")
    if not space.attributes or space.attributes[0].vectors is None:
        raise DataError("space carries no local vectors")
    parts = []
    contributing = []
    for i, t in enumerate(record.triplets):
        slot = space.attributes[i]
        value = _tail_value(t)
        if slot.interval is not None and isinstance(value, (int, float)):
            lo, hi = slot.interval
            if not lo <= value <= hi:
                raise DataError(
                    "abnormal value %s for attribute %r (normal interval [%g, %g])"
                    % (value, slot.name, lo, hi)
                )
        if slot.finite:
            rows = [r for r, key in enumerate(slot.keys) if key == (t.relation, value)]
            if not rows:
                raise DataError(
                    "no stored match for finite attribute %r value %r"
                    % (slot.name, value)
                )
            rows = rows[:j]
        else:
            if not isinstance(value, (int, float)):
                raise DataError("attribute %r needs a numeric value" % slot.name)
            width = 1.0
            if slot.interval is not None:
                lo, hi = slot.interval
                width = (hi - lo) or 1.0
            dists = np.array(
                [
                    abs(key[1] - value) / width if isinstance(key[1], (int, float)) else np.inf
                    for key in slot.keys
                ]
            )
            take = min(j, len(slot.keys))
            rows = list(np.argsort(dists, kind="stable")[:take])
        parts.append(space.weights[i] * slot.vectors[rows].mean(axis=0))
        contributing.append(tuple(str(slot.keys[r][1]) for r in rows))
    return VirtualVector(
        vector=np.sum(parts, axis=0), contributing=tuple(contributing), subject=record.id
    )


def knn_neighbors(space: EmbeddingSpace, vector: np.ndarray, k: int) -> List[Tuple[str, str]]:
    """The k HH entries whose combined vectors are nearest under the
    space's norm; ties fall to earlier insertion."""
    if not space.hh:
        raise DataError("empty space")
    if k < 1 or k > len(space.hh):
        raise DataError("K=%d out of range for %d stored records" % (k, len(space.hh)))
    ids = list(space.hh)
    v = np.asarray(vector, dtype=float)
    dists = np.array([distance(space.hh[i].combined - v, space.norm) for i in ids])
    order = np.argsort(dists, kind="stable")[:k]
    return [(ids[i], space.hh[ids[i]].label) for i in order]


def knn_chance(space: EmbeddingSpace, vector: np.ndarray, k: int) -> float:
    neighbors = knn_neighbors(space, vector, k)
    return sum(1 for _, label in neighbors if label == POSITIVE) / k


def classify(space: EmbeddingSpace, record: MTuple, j: int, k: int) -> float:
    """Chance that an unseen record is positive: virtual vector, then kNN."""
    return knn_chance(space, construct_virtual_vector(space, record, j).vector, k)


def gain(acc_1: float, acc_p: float, time_1: float, time_p: float) -> float:
    """Preciseness retained times speedup achieved."""
    if min(acc_1, acc_p, time_1, time_p) <= 0:
        raise DataError("gain needs positive inputs")
    return acc_p * (time_1 / time_p) / acc_1


# -- import of externally produced vectors --------------------------------


def import_vectors(vectors_path, labels_path) -> EmbeddingSpace:
    """CSV of `id,v1,...,vn` plus a label file of `id,label` (1/0 or
    positive/negative).  The result supports kNN queries only."""
    labels: Dict[str, str] = {}
    with open(labels_path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#") or line.lower().startswith("id,"):
                continue
            rid, _, raw = line.partition(",")
            raw = raw.strip().lower()
            if raw in ("1", "positive"):
                labels[rid.strip()] = POSITIVE
            elif raw in ("0", "negative"):
                labels[rid.strip()] = NEGATIVE
            else:
                raise DataError("bad label %r (line %d of %s)" % (raw, lineno, labels_path))
    hh: Dict[str, HHEntry] = {}
    n = None
    with open(vectors_path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#") or line.lower().startswith("id,"):
                continue
            rid, _, rest = line.partition(",")
            rid = rid.strip()
            vec = np.array([float(x) for x in rest.split(",")])
            if n is None:
                n = len(vec)
            elif len(vec) != n:
                raise DataError("dimension mismatch for %r (line %d)" % (rid, lineno))
            if rid not in labels:
                raise DataError("missing label for record %r" % rid)
            hh[rid] = HHEntry(None, vec, labels[rid])
    if not hh:
        raise DataError("no vectors found in %s" % vectors_path)
    return EmbeddingSpace(
        n=n,
        m=0,
        norm="L2",
        weights=np.zeros(0),
        attributes=[],
        label_vectors={},
        hh=hh,
        provenance="imported",
    )


# -- persistence ----------------------------------------------------------


def _w_str(fh, s: str):
    raw = s.encode("utf-8")
    fh.write(struct.pack("<I", len(raw)))
    fh.write(raw)


def _r_str(fh) -> str:
    (k,) = struct.unpack("<I", fh.read(4))
    return fh.read(k).decode("utf-8")


def _w_vec(fh, v: np.ndarray):
    fh.write(np.asarray(v, dtype="<f4").tobytes())


def _r_vec(fh, n: int) -> np.ndarray:
    return np.frombuffer(fh.read(4 * n), dtype="<f4").astype(float)


def save_space(space: EmbeddingSpace, path):
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<III", _FORMAT_VERSION, space.n, space.m))
        _w_str(fh, space.norm)
        _w_str(fh, space.provenance)
        fh.write(np.asarray(space.weights, dtype="<f8").tobytes())
        fh.write(struct.pack("<I", len(space.label_vectors)))
        for label, vec in space.label_vectors.items():
            _w_str(fh, label)
            _w_vec(fh, vec)
        fh.write(struct.pack("<I", len(space.attributes)))
        for slot in space.attributes:
            _w_str(fh, slot.name)
            fh.write(struct.pack("<B", 1 if slot.finite else 0))
            lo, hi = slot.interval if slot.interval is not None else (np.nan, np.nan)
            fh.write(struct.pack("<dd", lo, hi))
            fh.write(struct.pack("<I", len(slot.keys)))
            for relation, tail in slot.keys:
                _w_str(fh, relation)
                if isinstance(tail, str):
                    fh.write(b"s")
                    _w_str(fh, tail)
                else:
                    fh.write(b"n")
                    fh.write(struct.pack("<d", float(tail)))
            _w_vec(fh, slot.vectors.ravel() if len(slot.keys) else np.zeros(0))
        fh.write(struct.pack("<I", len(space.hh)))
        for rid, entry in space.hh.items():
            _w_str(fh, rid)
            _w_str(fh, entry.label)
            if entry.attr_idx is None:
                fh.write(struct.pack("<B", 0))
            else:
                fh.write(struct.pack("<B", 1))
                fh.write(np.asarray(entry.attr_idx, dtype="<u4").tobytes())
            _w_vec(fh, entry.combined)


def load_space(path) -> EmbeddingSpace:
    with open(path, "rb") as fh:
        if fh.read(len(_MAGIC)) != _MAGIC:
            raise DataError("%s is not a vector-space file" % path)
        version, n, m = struct.unpack("<III", fh.read(12))
        if version != _FORMAT_VERSION:
            raise DataError("unsupported vector-space format version %d" % version)
        norm = _r_str(fh)
        provenance = _r_str(fh)
        weights = np.frombuffer(fh.read(8 * m), dtype="<f8").astype(float)
        (nl,) = struct.unpack("<I", fh.read(4))
        label_vectors = {}
        for _ in range(nl):
            label = _r_str(fh)
            label_vectors[label] = _r_vec(fh, n)
        (na,) = struct.unpack("<I", fh.read(4))
        slots = []
        for _ in range(na):
            name = _r_str(fh)
            (finite,) = struct.unpack("<B", fh.read(1))
            lo, hi = struct.unpack("<dd", fh.read(16))
            interval = None if np.isnan(lo) else (lo, hi)
            (nk,) = struct.unpack("<I", fh.read(4))
            keys = []
            for _k in range(nk):
                relation = _r_str(fh)
                kind = fh.read(1)
                if kind == b"s":
                    keys.append((relation, _r_str(fh)))
                else:
                    keys.append((relation, struct.unpack("<d", fh.read(8))[0]))
            vectors = _r_vec(fh, nk * n).reshape(nk, n) if nk else np.zeros((0, n))
            slots.append(
                AttributeSlot(
                    name=name,
                    finite=bool(finite),
                    interval=interval,
                    keys=keys,
                    vectors=vectors,
                    index={k: r for r, k in enumerate(keys)},
                )
            )
        (nh,) = struct.unpack("<I", fh.read(4))
        hh = {}
        for _ in range(nh):
            rid = _r_str(fh)
            label = _r_str(fh)
            (has_idx,) = struct.unpack("<B", fh.read(1))
            attr_idx = None
            if has_idx:
                attr_idx = tuple(
                    int(x) for x in np.frombuffer(fh.read(4 * m), dtype="<u4")
                )
            hh[rid] = HHEntry(attr_idx, _r_vec(fh, n), label)
        return EmbeddingSpace(
            n=n,
            m=m,
            norm=norm,
            weights=weights,
            attributes=slots,
            label_vectors=label_vectors,
            hh=hh,
            provenance=provenance,
        )


def export_jsonl(space: EmbeddingSpace, path):
    """Human-inspectable dump of the stored index, one record per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for rid, entry in space.hh.items():
            fh.write(
                json.dumps(
                    {
                        "id": rid,
                        "label": entry.label,
                        "combined": [round(float(x), 9) for x in entry.combined],
                    }
                )
                + "\n"
            )
