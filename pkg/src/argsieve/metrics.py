"""Frame-matching evaluation and the top-k ranking baselines.

Match predicate: normalized exact string equality with greedy one-to-one
matching per (document, argument type). Scores from this harness are only
comparable to other runs of this harness; no partial-overlap credit is given.
"""

from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from .corpus import (
    ALL_TYPES,
    ArgumentType,
    Document,
    InformationFrame,
    mentions_by_type,
)
from .features import EmbeddingProvider
from .rank import biased_textrank, build_graph, compute_bias, textrank, top_k
from .sieve import SieveConfig, build_bias_text
from .textutil import normalize_text  # re-exported: the match predicate's normalizer

__all__ = [
    "normalize_text",
    "MatchCounts",
    "EvalReport",
    "match_frames",
    "score_corpus",
    "run_topk_baseline",
]


class EvalError(ValueError):
    pass


@dataclass(frozen=True)
class MatchCounts:
    doc_id: str
    per_type: Dict[ArgumentType, Tuple[int, int, int]]  # type -> (tp, fp, fn)


@dataclass(frozen=True)
class EvalReport:
    per_type: Dict[ArgumentType, Dict[str, float]]
    macro_f1: float
    micro: Dict[str, float]
    totals: Dict[str, int]


def match_frames(pred: InformationFrame, gold: InformationFrame) -> MatchCounts:
    if pred.doc_id != gold.doc_id:
        raise EvalError(f"doc_id mismatch: {pred.doc_id} vs {gold.doc_id}")
    per_type = {}
    for t in ALL_TYPES:
        pred_counts = Counter(normalize_text(s) for s in pred.slots.get(t, []))
        gold_counts = Counter(normalize_text(s) for s in gold.slots.get(t, []))
        tp = sum(min(pred_counts[k], gold_counts[k]) for k in pred_counts)
        fp = sum(pred_counts.values()) - tp
        fn = sum(gold_counts.values()) - tp
        per_type[t] = (tp, fp, fn)
    return MatchCounts(doc_id=pred.doc_id, per_type=per_type)


def _prf(tp: int, fp: int, fn: int) -> Dict[str, float]:
    # Degenerate slices (no predictions, no gold) count as vacuously perfect
    # so that scoring a frame set against itself is all ones.
    p = tp / (tp + fp) if tp + fp else (1.0 if fn == 0 else 0.0)
    r = tp / (tp + fn) if tp + fn else (1.0 if fp == 0 else 0.0)
    f1 = 2 * p * r / (p + r) if p + r else 0.0
    return {"precision": p, "recall": r, "f1": f1}


def score_corpus(
    preds: Sequence[InformationFrame], golds: Sequence[InformationFrame]
) -> EvalReport:
    pred_by_id = {f.doc_id: f for f in preds}
    gold_by_id = {f.doc_id: f for f in golds}
    missing = sorted(set(gold_by_id) - set(pred_by_id))
    extra = sorted(set(pred_by_id) - set(gold_by_id))
    if missing or extra:
        raise EvalError(f"doc_id sets differ; missing={missing} extra={extra}")
    sums = {t: [0, 0, 0] for t in ALL_TYPES}
    for doc_id, pred in pred_by_id.items():
        counts = match_frames(pred, gold_by_id[doc_id])
        for t, (tp, fp, fn) in counts.per_type.items():
            sums[t][0] += tp
            sums[t][1] += fp
            sums[t][2] += fn
    per_type = {t: _prf(*sums[t]) for t in ALL_TYPES}
    macro = sum(per_type[t]["f1"] for t in ALL_TYPES) / len(ALL_TYPES)
    tp = sum(sums[t][0] for t in ALL_TYPES)
    fp = sum(sums[t][1] for t in ALL_TYPES)
    fn = sum(sums[t][2] for t in ALL_TYPES)
    return EvalReport(
        per_type=per_type,
        macro_f1=macro,
        micro=_prf(tp, fp, fn),
        totals={"tp": tp, "fp": fp, "fn": fn},
    )


def report_to_json(report: EvalReport) -> dict:
    return {
        "per_type": {t.value: report.per_type[t] for t in ALL_TYPES},
        "macro_f1": report.macro_f1,
        "micro": report.micro,
        "totals": report.totals,
    }


def format_report(report: EvalReport) -> str:
    lines = [f"{'type':<14}{'P':>8}{'R':>8}{'F1':>8}"]
    for t in ALL_TYPES:
        m = report.per_type[t]
        lines.append(
            f"{t.value:<14}{m['precision']:>8.4f}{m['recall']:>8.4f}{m['f1']:>8.4f}"
        )
    mi = report.micro
    lines.append(f"{'macro-F1':<14}{'':>16}{report.macro_f1:>8.4f}")
    lines.append(f"{'micro':<14}{mi['precision']:>8.4f}{mi['recall']:>8.4f}{mi['f1']:>8.4f}")
    return "\n".join(lines)


def run_topk_baseline(
    docs: Sequence[Document],
    provider: EmbeddingProvider,
    config: SieveConfig,
    k: int,
    biased: bool,
) -> List[InformationFrame]:
    """Rank every mention of a type and take the top k; no sieving at all."""
    if k < 1:
        raise EvalError("k must be >= 1")
    frames = []
    for doc in docs:
        by_type = mentions_by_type(doc)
        slots: Dict[ArgumentType, List[str]] = {t: [] for t in ALL_TYPES}
        for t in ALL_TYPES:
            mentions = by_type[t]
            if not mentions:
                continue
            graph = build_graph(mentions, provider)
            if biased:
                bias = compute_bias(mentions, build_bias_text(t, doc, config), provider)
                scores = biased_textrank(graph, bias, config.rank_config)
            else:
                scores = textrank(graph, config.rank_config)
            chosen = top_k(scores, mentions, k)
            texts, seen = [], set()
            for m in chosen:
                norm = normalize_text(m.text)
                if norm not in seen:
                    seen.add(norm)
                    texts.append(m.text)
            slots[t] = texts
        frames.append(
            InformationFrame(doc_id=doc.doc_id, event_type=doc.event_type, slots=slots)
        )
    return frames
