"""Trainable binary filters: per-mention relevance and per-pair redundancy.

Both filters are linear logistic models over embedding-derived features,
trained with plain SGD. The pairwise features carry the surface-similarity
signals (cosine, Jaccard, duplicate/substring flags) that make most redundant
pairs linearly separable; the truly trivial cases never reach the model at
all (see heuristic_redundant).
"""

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .corpus import ALL_TYPES, ArgumentMention, Document
from .features import EmbeddingProvider, cosine
from .textutil import is_boundary_substring, normalize_text, token_jaccard


class ClassifyError(ValueError):
    pass


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    schema_id: str


@dataclass(frozen=True)
class LinearModel:
    weights: np.ndarray
    bias: float
    schema_id: str
    decision_threshold: float = 0.5


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    epochs: int = 100
    l2_penalty: float = 0.0
    seed: int = 0
    shuffle: bool = True
    positive_weight: float = 1.0

    def __post_init__(self):
        if not (0 < self.learning_rate <= 1):
            raise ClassifyError("learning_rate must be in (0, 1]")
        if not (1 <= self.epochs <= 10_000):
            raise ClassifyError("epochs must be in [1, 10000]")
        if self.l2_penalty < 0:
            raise ClassifyError("l2_penalty must be non-negative")


def relevance_schema_id(dim: int) -> str:
    return f"relevance/v1/dim{dim}"


def pair_schema_id(dim: int) -> str:
    return f"pair/v1/dim{dim}"


def _lead_text(doc: Document) -> str:
    lead = (doc.title + " " + (doc.sentences[0] if doc.sentences else "")).strip()
    return lead if lead else doc.text[:64]


def featurize_relevance(
    mention: ArgumentMention, doc: Document, provider: EmbeddingProvider
) -> FeatureVector:
    if mention.doc_id != doc.doc_id:
        raise ClassifyError(f"mention {mention.mention_id} does not belong to {doc.doc_id}")
    emb_m = provider.embed(mention.text)
    emb_s = provider.embed(doc.sentences[mention.sentence_index])
    emb_lead = provider.embed(_lead_text(doc))
    n = len(doc.sentences)
    position = mention.sentence_index / (n - 1) if n > 1 else 0.0
    one_hot = np.zeros(len(ALL_TYPES))
    one_hot[ALL_TYPES.index(mention.arg_type)] = 1.0
    values = np.concatenate(
        [emb_m, emb_s, emb_lead, [cosine(emb_m, emb_lead)], [position], one_hot]
    )
    return FeatureVector(values=values, schema_id=relevance_schema_id(provider.dim))


def featurize_pair(
    a: ArgumentMention, b: ArgumentMention, doc: Document, provider: EmbeddingProvider
) -> FeatureVector:
    if a.doc_id != doc.doc_id or b.doc_id != doc.doc_id:
        raise ClassifyError("pair mentions must belong to the given document")
    if a.arg_type != b.arg_type:
        raise ClassifyError(
            f"pair ({a.mention_id}, {b.mention_id}) mixes argument types"
        )
    emb_a = provider.embed(a.text)
    emb_b = provider.embed(b.text)
    dup = 1.0 if normalize_text(a.text) == normalize_text(b.text) else 0.0
    sub = 1.0 if (dup or is_boundary_substring(a.text, b.text)) else 0.0
    values = np.concatenate(
        [
            emb_a,
            emb_b,
            np.abs(emb_a - emb_b),
            [cosine(emb_a, emb_b), token_jaccard(a.text, b.text), dup, sub],
            provider.embed(_lead_text(doc)),
        ]
    )
    return FeatureVector(values=values, schema_id=pair_schema_id(provider.dim))


def heuristic_redundant(a: str, b: str) -> Optional[int]:
    """Short-circuit for trivially redundant pairs; None means no decision."""
    na, nb = normalize_text(a), normalize_text(b)
    if na and na == nb:
        return 1
    if is_boundary_substring(a, b):
        return 1
    return None


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


def loss_and_grad(
    weights: np.ndarray,
    bias: float,
    X: np.ndarray,
    y: np.ndarray,
    l2_penalty: float = 0.0,
    positive_weight: float = 1.0,
) -> Tuple[float, np.ndarray, float]:
    """Full-batch weighted cross-entropy with L2, plus analytic gradients."""
    z = X @ weights + bias
    p = np.array([_sigmoid(v) for v in z])
    eps = 1e-12
    sample_w = np.where(y == 1, positive_weight, 1.0)
    loss = -np.mean(sample_w * (y * np.log(p + eps) + (1 - y) * np.log(1 - p + eps)))
    loss += 0.5 * l2_penalty * float(weights @ weights)
    resid = sample_w * (p - y) / len(y)
    grad_w = X.T @ resid + l2_penalty * weights
    grad_b = float(np.sum(resid))
    return float(loss), grad_w, grad_b


def _check_schema(examples: Sequence[Tuple[FeatureVector, int]]) -> str:
    if not examples:
        raise ClassifyError("empty example list")
    schema = examples[0][0].schema_id
    length = examples[0][0].values.shape[0]
    for fv, _ in examples:
        if fv.schema_id != schema or fv.values.shape[0] != length:
            raise ClassifyError(
                f"schema mismatch: expected {schema}[{length}], got "
                f"{fv.schema_id}[{fv.values.shape[0]}]"
            )
    return schema


def train_logistic(
    examples: Sequence[Tuple[FeatureVector, int]], config: TrainConfig
) -> LinearModel:
    """SGD on L2-regularized cross-entropy, from zero init, seeded."""
    schema = _check_schema(examples)
    X = np.stack([fv.values for fv, _ in examples])
    y = np.array([label for _, label in examples], dtype=float)
    n, d = X.shape
    weights = np.zeros(d)
    bias = 0.0
    rng = np.random.default_rng(config.seed)
    for _ in range(config.epochs):
        order = rng.permutation(n) if config.shuffle else np.arange(n)
        for i in order:
            p = _sigmoid(float(X[i] @ weights + bias))
            g = p - y[i]
            if y[i] == 1:
                g *= config.positive_weight
            weights -= config.learning_rate * (g * X[i] + config.l2_penalty * weights)
            bias -= config.learning_rate * g
    return LinearModel(weights=weights, bias=bias, schema_id=schema)


def predict_proba(model: LinearModel, features: FeatureVector) -> float:
    if features.schema_id != model.schema_id:
        raise ClassifyError(
            f"schema mismatch: model {model.schema_id}, features {features.schema_id}"
        )
    if features.values.shape[0] != model.weights.shape[0]:
        raise ClassifyError("feature length does not match model weights")
    return _sigmoid(float(model.weights @ features.values + model.bias))


def predict_label(model: LinearModel, features: FeatureVector) -> int:
    return 1 if predict_proba(model, features) >= model.decision_threshold else 0


@dataclass(frozen=True)
class ClassifierReport:
    per_class: Dict[int, Dict[str, float]]
    macro_f1: float
    micro_f1: float


def _prf(tp: int, fp: int, fn: int) -> Dict[str, float]:
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * p * r / (p + r) if p + r else 0.0
    return {"precision": p, "recall": r, "f1": f1}


def evaluate_classifier(
    model: LinearModel, examples: Sequence[Tuple[FeatureVector, int]]
) -> ClassifierReport:
    if not examples:
        raise ClassifyError("empty example list")
    counts = {0: [0, 0, 0], 1: [0, 0, 0]}  # class -> [tp, fp, fn]
    correct = 0
    for fv, gold in examples:
        pred = predict_label(model, fv)
        if pred == gold:
            counts[gold][0] += 1
            correct += 1
        else:
            counts[pred][1] += 1
            counts[gold][2] += 1
    per_class = {c: _prf(*counts[c]) for c in (0, 1)}
    macro = (per_class[0]["f1"] + per_class[1]["f1"]) / 2
    # Single-label binary: pooled TP/FP/FN reduce micro F1 to accuracy.
    micro = correct / len(examples)
    return ClassifierReport(per_class=per_class, macro_f1=macro, micro_f1=micro)


def build_relevance_examples(docs, labels, provider: EmbeddingProvider):
    """Featurized (vector, label) pairs from documents plus mention labels."""
    docs_by_id = {d.doc_id: d for d in docs}
    mention_index = {
        m.mention_id: (m, d) for d in docs for m in d.mentions
    }
    examples = []
    for lab in labels:
        if lab.mention_id not in mention_index:
            raise ClassifyError(f"relevance label for unknown mention {lab.mention_id}")
        mention, doc = mention_index[lab.mention_id]
        if doc.doc_id != lab.doc_id:
            raise ClassifyError(f"label doc_id mismatch for mention {lab.mention_id}")
        examples.append((featurize_relevance(mention, doc, provider), lab.label))
    return examples


def build_pair_examples(docs, pairs, provider: EmbeddingProvider):
    """Featurized (vector, label) pairs from documents plus pair labels."""
    docs_by_id = {d.doc_id: d for d in docs}
    mention_index = {m.mention_id: m for d in docs for m in d.mentions}
    examples = []
    for pair in pairs:
        doc = docs_by_id.get(pair.doc_id)
        if doc is None:
            raise ClassifyError(f"pair {pair.pair_id} references unknown doc {pair.doc_id}")
        try:
            a = mention_index[pair.mention_a]
            b = mention_index[pair.mention_b]
        except KeyError as exc:
            raise ClassifyError(f"pair {pair.pair_id} references unknown mention {exc}")
        examples.append((featurize_pair(a, b, doc, provider), pair.label))
    return examples


def save_model(model: LinearModel, path) -> None:
    payload = {
        "schema_id": model.schema_id,
        "weights": [float(w) for w in model.weights],
        "bias": float(model.bias),
        "decision_threshold": model.decision_threshold,
        "dim": int(model.weights.shape[0]),
    }
    Path(path).write_text(
        json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n",
        encoding="utf-8",
    )


def load_model(path) -> LinearModel:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    weights = np.asarray(obj["weights"], dtype=float)
    if weights.shape[0] != obj["dim"]:
        raise ClassifyError(
            f"{path}: weight length {weights.shape[0]} does not match dim {obj['dim']}"
        )
    return LinearModel(
        weights=weights,
        bias=float(obj["bias"]),
        schema_id=obj["schema_id"],
        decision_threshold=float(obj["decision_threshold"]),
    )
