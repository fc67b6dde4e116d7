"""Pool-based active learning for the redundancy classifier.

Every round: score the unlabeled pool, select the batch (entropy by default,
Monte Carlo expected-error reduction behind a pool cap), collect labels, and
retrain a fresh model from zero initialization on everything labeled so far.
Warm starts are deliberately never used, so the model after any round is a
pure function of (labels, train seed).
"""

import hashlib
import math
import random
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

from .classify import (
    ClassifierReport,
    FeatureVector,
    LinearModel,
    TrainConfig,
    evaluate_classifier,
    predict_proba,
    train_logistic,
)


class LearnError(ValueError):
    pass


@dataclass(frozen=True)
class ALConfig:
    batch_size: int = 50
    strategy: str = "entropy"  # entropy | mc-error-reduction
    patience: int = 2
    mc_pool_cap: int = 200
    seed: int = 0
    improvement_tolerance: float = 1e-4

    def __post_init__(self):
        if self.strategy not in ("entropy", "mc-error-reduction"):
            raise LearnError(f"unknown strategy: {self.strategy!r}")
        if self.batch_size < 1 or self.patience < 1 or self.mc_pool_cap < 1:
            raise LearnError("batch_size, patience and mc_pool_cap must be positive")


@dataclass(frozen=True)
class RoundReport:
    round: int
    selected: Tuple[str, ...]
    dev_f1: float
    model_snapshot_id: str


@dataclass
class Pool:
    unlabeled: Dict[str, FeatureVector]
    labeled: List[Tuple[str, FeatureVector, int]] = field(default_factory=list)
    round: int = 0
    pending: Tuple[str, ...] = ()

    def add_labels(self, new_labels: Sequence[Tuple[str, int]]) -> None:
        """Move labeled pairs from the unlabeled pool; validates ids."""
        seen = set()
        labeled_ids = {pid for pid, _, _ in self.labeled}
        for pair_id, label in new_labels:
            if pair_id in seen or pair_id in labeled_ids:
                raise LearnError(f"duplicate label for pair {pair_id}")
            if pair_id not in self.unlabeled:
                raise LearnError(f"label for unknown pair {pair_id}")
            if self.pending and pair_id not in self.pending:
                raise LearnError(f"pair {pair_id} was not in the selected batch")
            seen.add(pair_id)
        for pair_id, label in new_labels:
            self.labeled.append((pair_id, self.unlabeled.pop(pair_id), int(label)))
        self.pending = ()


def uncertainty_entropy(model: LinearModel, features: FeatureVector) -> float:
    p = predict_proba(model, features)
    eps = 1e-300
    return float(-(p * math.log(p + eps) + (1 - p) * math.log(1 - p + eps)))


def _expected_pool_error(model: LinearModel, pool_items: Sequence[FeatureVector]) -> float:
    return sum(min(p, 1 - p) for p in (predict_proba(model, fv) for fv in pool_items))


def _capped_pool(pool: Pool, config: ALConfig) -> List[Tuple[str, FeatureVector]]:
    items = sorted(pool.unlabeled.items())
    if len(items) <= config.mc_pool_cap:
        return items
    rng = random.Random(config.seed)
    return sorted(rng.sample(items, config.mc_pool_cap))


def mc_expected_error(
    model: LinearModel,
    pool: Pool,
    candidate: str,
    train_config: TrainConfig,
    config: ALConfig,
    capped: Optional[Sequence[Tuple[str, FeatureVector]]] = None,
) -> float:
    """Expected pool error after hypothetically labeling the candidate.

    The candidate itself is excluded from the error sum; it is the item
    being hypothetically moved out of the pool.
    """
    if candidate not in pool.unlabeled:
        raise LearnError(f"unknown candidate pair {candidate}")
    if capped is None:
        capped = _capped_pool(pool, config)
    capped_features = [fv for pid, fv in capped if pid != candidate]
    if not capped_features:
        return 0.0
    cand_features = pool.unlabeled[candidate]
    p1 = predict_proba(model, cand_features)
    total = 0.0
    for y, prob in ((0, 1 - p1), (1, p1)):
        examples = [(fv, label) for _, fv, label in pool.labeled]
        examples.append((cand_features, y))
        retrained = train_logistic(examples, train_config)
        total += prob * _expected_pool_error(retrained, capped_features)
    return total


def select_batch(
    model: LinearModel,
    pool: Pool,
    config: ALConfig,
    train_config: Optional[TrainConfig] = None,
) -> List[str]:
    if not pool.unlabeled:
        raise LearnError("unlabeled pool is empty")
    n = min(config.batch_size, len(pool.unlabeled))
    if config.strategy == "entropy":
        keyed = [
            (-uncertainty_entropy(model, fv), pid) for pid, fv in pool.unlabeled.items()
        ]
    else:
        if train_config is None:
            raise LearnError("mc-error-reduction requires a train config")
        capped = _capped_pool(pool, config)
        keyed = [
            (mc_expected_error(model, pool, pid, train_config, config, capped), pid)
            for pid in pool.unlabeled
        ]
    keyed.sort()
    return [pid for _, pid in keyed[:n]]


def select_random(pool: Pool, n: int, seed: int) -> List[str]:
    """Uniform baseline selector, used to benchmark uncertainty sampling."""
    rng = random.Random(seed)
    ids = sorted(pool.unlabeled)
    return rng.sample(ids, min(n, len(ids)))


def _snapshot_id(model: LinearModel) -> str:
    h = hashlib.blake2b(digest_size=8)
    h.update(model.weights.tobytes())
    h.update(repr(model.bias).encode())
    return h.hexdigest()


def retrain(
    pool: Pool,
    train_config: TrainConfig,
    dev: Sequence[Tuple[FeatureVector, int]],
) -> Tuple[LinearModel, ClassifierReport]:
    if not pool.labeled:
        raise LearnError("cannot train with an empty labeled set")
    examples = [(fv, label) for _, fv, label in pool.labeled]
    model = train_logistic(examples, train_config)
    report = evaluate_classifier(model, dev)
    return model, report


def run_round(
    pool: Pool,
    new_labels: Sequence[Tuple[str, int]],
    train_config: TrainConfig,
    al_config: ALConfig,
    dev: Sequence[Tuple[FeatureVector, int]],
) -> Tuple[LinearModel, RoundReport, Pool]:
    """Absorb a batch of labels, retrain from scratch, evaluate on dev."""
    selected = tuple(pid for pid, _ in new_labels)
    pool.add_labels(new_labels)
    model, report = retrain(pool, train_config, dev)
    pool.round += 1
    round_report = RoundReport(
        round=pool.round,
        selected=selected,
        dev_f1=report.macro_f1,
        model_snapshot_id=_snapshot_id(model),
    )
    return model, round_report, pool


def should_stop(history: Sequence[RoundReport], config: ALConfig) -> bool:
    """True when the best dev F1 has stalled for `patience` rounds."""
    if len(history) <= config.patience:
        return False
    f1s = [r.dev_f1 for r in history]
    improvements = []
    for i in range(1, len(f1s)):
        improvements.append(max(f1s[: i + 1]) - max(f1s[:i]))
    return all(imp <= config.improvement_tolerance for imp in improvements[-config.patience :])
