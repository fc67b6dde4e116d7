"""Per-document aggregation: relevance filter, ranking, redundancy sieve.

Per argument type the flow is:
  1. a single sentence-level mention bypasses every sieve (rule 1);
  2. otherwise keep mentions the relevance filter accepts, rank them by
     biased graph scores, then walk the ranked list dropping anything
     redundant to an already-kept mention;
  3. if nothing survives, restore the top-ranked mention of the original
     list (rule 2).

Models are passed as scorer objects so trained linear models and
planted-label lookup oracles plug into the same pipeline.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Protocol, Sequence, Tuple

import numpy as np

from .classify import (
    LinearModel,
    featurize_pair,
    featurize_relevance,
    heuristic_redundant,
    predict_proba,
)
from .corpus import (
    ALL_TYPES,
    ArgumentMention,
    ArgumentType,
    Document,
    InformationFrame,
    mentions_by_type,
)
from .features import EmbeddingProvider
from .rank import RankConfig, RankScores, biased_textrank, build_graph, compute_bias
from .textutil import normalize_text

DEFAULT_BIAS_TEMPLATES: Dict[ArgumentType, str] = {
    ArgumentType.TIME: "when did the event happen",
    ArgumentType.PLACE: "where did the event happen",
    ArgumentType.CASUALTIES: "people killed injured dead hurt",
    ArgumentType.AFTER_EFFECT: "damage caused consequences after the event",
    ArgumentType.REASON: "why did the event happen cause",
    ArgumentType.PARTICIPANT: "who was involved in the event",
}


class SieveError(ValueError):
    pass


@dataclass(frozen=True)
class SieveConfig:
    relevance_threshold: float = 0.5
    redundancy_threshold: float = 0.5
    bias_templates: Dict[ArgumentType, str] = field(
        default_factory=lambda: dict(DEFAULT_BIAS_TEMPLATES)
    )
    rank_config: RankConfig = field(default_factory=RankConfig)

    def __post_init__(self):
        for t in ALL_TYPES:
            if not self.bias_templates.get(t, "").strip():
                raise SieveError(f"missing bias template for {t.value}")


class RelevanceScorer(Protocol):
    def proba(self, mention: ArgumentMention, doc: Document) -> float: ...


class RedundancyScorer(Protocol):
    def proba(self, a: ArgumentMention, b: ArgumentMention, doc: Document) -> float: ...


class LinearRelevanceScorer:
    def __init__(self, model: LinearModel, provider: EmbeddingProvider):
        self.model = model
        self.provider = provider

    def proba(self, mention: ArgumentMention, doc: Document) -> float:
        return predict_proba(self.model, featurize_relevance(mention, doc, self.provider))


class LinearRedundancyScorer:
    def __init__(self, model: LinearModel, provider: EmbeddingProvider):
        self.model = model
        self.provider = provider

    def proba(self, a: ArgumentMention, b: ArgumentMention, doc: Document) -> float:
        return predict_proba(self.model, featurize_pair(a, b, doc, self.provider))


class LookupRelevanceScorer:
    """Planted-label oracle: mention_id -> 0/1."""

    def __init__(self, labels: Dict[str, int]):
        self.labels = labels

    def proba(self, mention: ArgumentMention, doc: Document) -> float:
        return float(self.labels[mention.mention_id])


class LookupRedundancyScorer:
    """Planted-cluster oracle: same cluster id means redundant."""

    def __init__(self, cluster_of: Dict[str, str]):
        self.cluster_of = cluster_of

    def proba(self, a: ArgumentMention, b: ArgumentMention, doc: Document) -> float:
        return 1.0 if self.cluster_of.get(a.mention_id) == self.cluster_of.get(b.mention_id) else 0.0


@dataclass(frozen=True)
class TraceEntry:
    doc_id: str
    mention_id: str
    disposition: str  # kept | dropped_irrelevant | dropped_redundant_to:<id> | restored_by_rule2
    score: Optional[float] = None


@dataclass(frozen=True)
class SieveTrace:
    entries: Tuple[TraceEntry, ...]
    scores: Dict[ArgumentType, Dict[str, float]]


def build_bias_text(arg_type: ArgumentType, doc: Document, config: SieveConfig) -> str:
    first = doc.sentences[0] if doc.sentences else ""
    parts = [config.bias_templates[arg_type], doc.event_type, doc.title, first]
    return " ".join(p for p in parts if p.strip())


def filter_relevant(
    mentions: Sequence[ArgumentMention],
    doc: Document,
    scorer: RelevanceScorer,
    config: SieveConfig,
) -> Tuple[List[ArgumentMention], List[TraceEntry]]:
    kept, entries = [], []
    for m in mentions:
        if scorer.proba(m, doc) >= config.relevance_threshold:
            kept.append(m)
        else:
            entries.append(TraceEntry(doc.doc_id, m.mention_id, "dropped_irrelevant"))
    return kept, entries


def dedup_ranked(
    ranked: Sequence[Tuple[ArgumentMention, float]],
    doc: Document,
    scorer: RedundancyScorer,
    config: SieveConfig,
) -> Tuple[List[ArgumentMention], List[TraceEntry]]:
    """Walk mentions in descending score order, dropping redundant candidates.

    Candidates are only compared against already-kept mentions, so the
    survivor of any redundant pair is always the higher-scored one.
    """
    kept: List[Tuple[ArgumentMention, float]] = []
    entries: List[TraceEntry] = []
    for candidate, score in ranked:
        survivor = None
        for other, _ in kept:
            if heuristic_redundant(candidate.text, other.text) == 1:
                survivor = other
                break
            if scorer.proba(candidate, other, doc) >= config.redundancy_threshold:
                survivor = other
                break
        if survivor is None:
            kept.append((candidate, score))
            entries.append(TraceEntry(doc.doc_id, candidate.mention_id, "kept", score))
        else:
            entries.append(
                TraceEntry(
                    doc.doc_id,
                    candidate.mention_id,
                    f"dropped_redundant_to:{survivor.mention_id}",
                    score,
                )
            )
    return [m for m, _ in kept], entries


def _ranked_with_scores(
    mentions: Sequence[ArgumentMention],
    arg_type: ArgumentType,
    doc: Document,
    provider: EmbeddingProvider,
    config: SieveConfig,
) -> Tuple[List[Tuple[ArgumentMention, float]], Dict[str, float]]:
    graph = build_graph(mentions, provider)
    bias = compute_bias(mentions, build_bias_text(arg_type, doc, config), provider)
    result = biased_textrank(graph, bias, config.rank_config)
    scores = {m.mention_id: float(s) for m, s in zip(mentions, result.scores)}
    order = sorted(
        range(len(mentions)), key=lambda i: (-result.scores[i], i)
    )
    return [(mentions[i], float(result.scores[i])) for i in order], scores


def aggregate_document(
    doc: Document,
    relevance: RelevanceScorer,
    redundancy: RedundancyScorer,
    provider: EmbeddingProvider,
    config: SieveConfig = SieveConfig(),
) -> Tuple[InformationFrame, SieveTrace]:
    by_type = mentions_by_type(doc)
    slots: Dict[ArgumentType, List[str]] = {t: [] for t in ALL_TYPES}
    all_entries: List[TraceEntry] = []
    all_scores: Dict[ArgumentType, Dict[str, float]] = {}
    for arg_type in ALL_TYPES:
        mentions = by_type[arg_type]
        if not mentions:
            continue
        if len(mentions) == 1:
            # Rule 1: an exclusive single mention enters the frame untouched.
            only = mentions[0]
            slots[arg_type] = [only.text]
            all_entries.append(TraceEntry(doc.doc_id, only.mention_id, "kept"))
            continue
        relevant, rel_entries = filter_relevant(mentions, doc, relevance, config)
        all_entries.extend(rel_entries)
        kept: List[ArgumentMention] = []
        if relevant:
            ranked, scores = _ranked_with_scores(relevant, arg_type, doc, provider, config)
            all_scores.setdefault(arg_type, {}).update(scores)
            kept, dedup_entries = dedup_ranked(ranked, doc, redundancy, config)
            all_entries.extend(dedup_entries)
        if not kept:
            # Rule 2: never leave a populated type empty; restore the
            # top-scored mention of the original list.
            ranked, scores = _ranked_with_scores(mentions, arg_type, doc, provider, config)
            all_scores.setdefault(arg_type, {}).update(scores)
            top_mention, top_score = ranked[0]
            kept = [top_mention]
            all_entries = [
                e
                for e in all_entries
                if not (e.mention_id == top_mention.mention_id and e.doc_id == doc.doc_id)
            ]
            all_entries.append(
                TraceEntry(doc.doc_id, top_mention.mention_id, "restored_by_rule2", top_score)
            )
        texts, seen = [], set()
        for m in kept:
            norm = normalize_text(m.text)
            if norm not in seen:
                seen.add(norm)
                texts.append(m.text)
        slots[arg_type] = texts
    frame = InformationFrame(doc_id=doc.doc_id, event_type=doc.event_type, slots=slots)
    return frame, SieveTrace(entries=tuple(all_entries), scores=all_scores)


def aggregate_corpus(
    docs: Sequence[Document],
    relevance: RelevanceScorer,
    redundancy: RedundancyScorer,
    provider: EmbeddingProvider,
    config: SieveConfig = SieveConfig(),
    fail_fast: bool = True,
) -> Tuple[List[InformationFrame], List[SieveTrace], List[Tuple[str, Exception]]]:
    frames, traces, errors = [], [], []
    for doc in docs:
        try:
            frame, trace = aggregate_document(doc, relevance, redundancy, provider, config)
        except Exception as exc:  # per-document isolation unless fail_fast
            if fail_fast:
                raise
            errors.append((doc.doc_id, exc))
            continue
        frames.append(frame)
        traces.append(trace)
    return frames, traces, errors
