"""Deterministic synthetic news corpus with planted labels.

Each document plants, per argument type, one or more clusters of mutually
redundant mentions (duplicates, boundary-substring extensions, token-reorder
paraphrases) plus optional irrelevant past-event mentions carrying a year
marker. The gold frame holds one representative per relevant cluster: the
member the biased ranking scores highest, i.e. exactly the survivor the
sieve keeps when driven by planted-label oracles.

Generation enforces the separation the sieves rely on: paraphrase pairs have
hashed-ngram cosine > 0.8, and cross-cluster texts never trip the redundancy
short-circuit.
"""

import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .classify import heuristic_redundant
from .corpus import (
    ALL_TYPES,
    ArgumentMention,
    ArgumentType,
    Document,
    InformationFrame,
    LabeledPair,
    RelevanceLabel,
    mentions_by_type,
    validate_document,
)
from .features import EmbeddingProvider, EmbeddingProviderConfig, cosine
from .rank import biased_textrank, build_graph, compute_bias
from .sieve import SieveConfig, build_bias_text


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 0
    n_docs: int = 50
    redundancy_rate: float = 0.5
    irrelevance_rate: float = 0.35
    multi_cluster_rate: float = 0.25
    populated_rate: float = 0.85

    def __post_init__(self):
        if self.n_docs < 1:
            raise ValueError("n_docs must be >= 1")


@dataclass(frozen=True)
class SyntheticCorpus:
    documents: List[Document]
    gold_frames: List[InformationFrame]
    relevance_labels: List[RelevanceLabel]
    pair_labels: List[LabeledPair]
    cluster_of: Dict[str, str]  # mention_id -> planted cluster id

    def relevance_lookup(self) -> Dict[str, int]:
        return {l.mention_id: l.label for l in self.relevance_labels}


EVENT_TYPES = ["flood", "earthquake", "fire", "explosion", "cyclone", "landslide"]

PLACE_NAMES = [
    "Santara", "Veldora", "Korvale", "Mirenta", "Ashdown", "Pellor",
    "Quintara", "Brevik", "Taloma", "Ferrondale", "Lusketa", "Novenia",
    "Ostergate", "Camlin", "Drevona", "Harwick",
]
DAYS = ["Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday"]
DAY_PARTS = ["morning", "afternoon", "evening", "night"]

SENT_TEMPLATES = [
    "Reports confirmed that {x}.",
    "Witnesses said {x}.",
    "Local media reported {x}.",
    "Authorities stated {x}.",
    "Emergency broadcasts mentioned {x}.",
    "Field updates noted {x}.",
]
IRRELEVANT_TEMPLATES = [
    "Officials recalled that a previous {event} {x}.",
    "Long-time residents remembered that {x}.",
]
EXTENSIONS = [
    "near the river crossing",
    "according to district officials",
    "in the northern sector",
    "after the initial impact",
    "as assessments continued",
]


def _time_phrase(rng: random.Random) -> str:
    pattern = rng.choice(["early {day} {part}", "late on {day} {part}", "on {day} {part}"])
    return pattern.format(day=rng.choice(DAYS), part=rng.choice(DAY_PARTS))


def _place_phrase(rng: random.Random) -> str:
    pattern = rng.choice(
        ["the town of {name}", "{name} district", "the {name} valley", "downtown {name}"]
    )
    return pattern.format(name=rng.choice(PLACE_NAMES))


def _casualty_phrase(rng: random.Random) -> str:
    n = rng.randint(3, 97)
    pattern = rng.choice(
        [
            "killed {n} people",
            "{n} people were injured",
            "left {n} workers dead",
            "{n} residents were hospitalized",
        ]
    )
    return pattern.format(n=n)


def _after_effect_phrase(rng: random.Random) -> str:
    n = rng.randint(3, 97)
    pattern = rng.choice(
        [
            "destroyed {n} homes",
            "left {n} families homeless",
            "cut power to {n} households",
            "washed away {n} farm plots",
        ]
    )
    return pattern.format(n=n)


def _reason_phrase(rng: random.Random) -> str:
    return rng.choice(
        [
            "heavy monsoon rainfall",
            "a ruptured gas pipeline",
            "an electrical short circuit",
            "days of torrential rain",
            "a faulty space heater",
            "an overloaded transformer",
            "a collapsed retaining wall",
            "an unattended cooking stove",
        ]
    )


def _participant_phrase(rng: random.Random) -> str:
    return rng.choice(
        [
            "rescue workers",
            "the national disaster response force",
            "local volunteers",
            "coast guard teams",
            "army engineers",
            "fire brigades from nearby towns",
            "medical relief units",
            "municipal repair crews",
        ]
    )


PHRASE_MAKERS = {
    ArgumentType.TIME: _time_phrase,
    ArgumentType.PLACE: _place_phrase,
    ArgumentType.CASUALTIES: _casualty_phrase,
    ArgumentType.AFTER_EFFECT: _after_effect_phrase,
    ArgumentType.REASON: _reason_phrase,
    ArgumentType.PARTICIPANT: _participant_phrase,
}


def _fresh_phrase(
    arg_type: ArgumentType, rng: random.Random, existing: Sequence[str]
) -> str:
    """A phrase that never trips the redundancy short-circuit on existing ones."""
    for _ in range(200):
        phrase = PHRASE_MAKERS[arg_type](rng)
        if all(heuristic_redundant(phrase, other) is None for other in existing):
            return phrase
    raise RuntimeError("could not sample a distinct phrase; pools exhausted")


def _paraphrase(base: str, rng: random.Random, provider: EmbeddingProvider) -> Optional[str]:
    """Token reorder of the base with high hashed-ngram cosine, or None."""
    toks = base.split()
    if len(toks) < 3:
        return None
    candidates = [
        " ".join(toks[1:] + toks[:1]),
        " ".join(toks[-1:] + toks[:-1]),
        " ".join(toks[:1] + toks[2:3] + toks[1:2] + toks[3:]) if len(toks) > 3 else None,
    ]
    rng.shuffle(candidates)
    for cand in candidates:
        if cand is None or heuristic_redundant(base, cand) is not None:
            continue
        if cosine(provider.embed(base), provider.embed(cand)) > 0.8:
            return cand
    return None


def _cluster_texts(
    base: str, size: int, rng: random.Random, provider: EmbeddingProvider
) -> List[str]:
    texts = [base]
    while len(texts) < size:
        kind = rng.choice(["duplicate", "substring", "paraphrase"])
        if kind == "duplicate":
            texts.append(base)
        elif kind == "substring":
            texts.append(base + " " + rng.choice(EXTENSIONS))
        else:
            para = _paraphrase(base, rng, provider)
            texts.append(para if para is not None else base + " " + rng.choice(EXTENSIONS))
    return texts


def _plan_type_clusters(
    arg_type: ArgumentType,
    n_clusters: int,
    config: GeneratorConfig,
    rng: random.Random,
    provider: EmbeddingProvider,
) -> List[List[str]]:
    clusters: List[List[str]] = []
    bases: List[str] = []
    for _ in range(n_clusters):
        base = _fresh_phrase(arg_type, rng, bases)
        size = rng.randint(2, 3) if rng.random() < config.redundancy_rate else 1
        clusters.append(_cluster_texts(base, size, rng, provider))
        bases.append(base)
    return clusters


def _clusters_separated(clusters: List[List[str]]) -> bool:
    """No cross-cluster pair may trip the redundancy short-circuit."""
    for i in range(len(clusters)):
        for j in range(i + 1, len(clusters)):
            for a in clusters[i]:
                for b in clusters[j]:
                    if heuristic_redundant(a, b) is not None:
                        return False
    return True


def _pick_representatives(
    doc: Document,
    relevance: Dict[str, int],
    cluster_of: Dict[str, str],
    provider: EmbeddingProvider,
    config: SieveConfig,
) -> Dict[ArgumentType, List[str]]:
    """One representative per relevant cluster: the top-ranked member.

    Mirrors the sieve's ranking (biased scores, descending, ties by list
    position) without running the sieve itself.
    """
    slots: Dict[ArgumentType, List[str]] = {t: [] for t in ALL_TYPES}
    by_type = mentions_by_type(doc)
    for arg_type in ALL_TYPES:
        mentions = by_type[arg_type]
        if not mentions:
            continue
        if len(mentions) == 1:
            slots[arg_type] = [mentions[0].text]
            continue
        relevant = [m for m in mentions if relevance[m.mention_id] == 1]
        rank_over = relevant if relevant else mentions
        graph = build_graph(rank_over, provider)
        bias = compute_bias(rank_over, build_bias_text(arg_type, doc, config), provider)
        scores = biased_textrank(graph, bias, config.rank_config).scores
        order = sorted(range(len(rank_over)), key=lambda i: (-scores[i], i))
        seen_clusters = set()
        reps = []
        for i in order:
            cid = cluster_of[rank_over[i].mention_id]
            if cid not in seen_clusters:
                seen_clusters.add(cid)
                reps.append(rank_over[i].text)
            if not relevant:
                break  # rule 2 restores exactly the single top-scored mention
        slots[arg_type] = reps
    return slots


def generate_synthetic_corpus(
    config: GeneratorConfig,
    provider: Optional[EmbeddingProvider] = None,
    sieve_config: Optional[SieveConfig] = None,
) -> SyntheticCorpus:
    provider = provider or EmbeddingProvider(EmbeddingProviderConfig())
    sieve_config = sieve_config or SieveConfig()
    rng = random.Random(config.seed)

    documents: List[Document] = []
    gold_frames: List[InformationFrame] = []
    relevance_labels: List[RelevanceLabel] = []
    pair_labels: List[LabeledPair] = []
    cluster_of: Dict[str, str] = {}

    for doc_idx in range(config.n_docs):
        doc_id = f"doc-{config.seed:04d}-{doc_idx:04d}"
        event = rng.choice(EVENT_TYPES)
        headline_place = rng.choice(PLACE_NAMES)
        title = f"{event.capitalize()} hits {headline_place}: rescue operations underway"
        sentences = [
            f"A severe {event} was reported in the {headline_place} area over the weekend."
        ]
        # (arg_type, text, relevant, cluster_id, template)
        planned: List[Tuple[ArgumentType, str, int, str, str]] = []

        for arg_type in ALL_TYPES:
            if rng.random() > config.populated_rate:
                continue
            n_clusters = 2 if rng.random() < config.multi_cluster_rate else 1
            for attempt in range(20):
                clusters = _plan_type_clusters(arg_type, n_clusters, config, rng, provider)
                if _clusters_separated(clusters):
                    break
            else:
                raise RuntimeError(f"could not separate clusters for {arg_type.value}")
            for c, texts in enumerate(clusters):
                cid = f"{doc_id}:{arg_type.value}:c{c}"
                for text in texts:
                    planned.append((arg_type, text, 1, cid, rng.choice(SENT_TEMPLATES)))
            # Irrelevant past-event recaps only join types that already have
            # relevant mentions, so single-mention types stay relevant.
            if rng.random() < config.irrelevance_rate:
                relevant_texts = [t for ts in clusters for t in ts]
                phrase = _fresh_phrase(arg_type, rng, relevant_texts)
                year = rng.randint(1950, 1999)
                text = f"{phrase} back in {year}"
                if all(heuristic_redundant(text, t) is None for t in relevant_texts):
                    cid = f"{doc_id}:{arg_type.value}:irr"
                    planned.append(
                        (arg_type, text, 0, cid,
                         rng.choice(IRRELEVANT_TEMPLATES).replace("{event}", event))
                    )

        rng.shuffle(planned)
        mentions: List[ArgumentMention] = []
        offset = len(sentences[0]) + 1
        for k, (arg_type, text, relevant, cid, template) in enumerate(planned):
            sentence = template.format(x=text, event=event)
            local = sentence.find(text)
            sentence_index = len(sentences)
            sentences.append(sentence)
            mention_id = f"{doc_id}:m{k:03d}"
            mentions.append(
                ArgumentMention(
                    mention_id=mention_id,
                    doc_id=doc_id,
                    arg_type=arg_type,
                    text=text,
                    sentence_index=sentence_index,
                    char_span=(offset + local, offset + local + len(text)),
                )
            )
            cluster_of[mention_id] = cid
            relevance_labels.append(
                RelevanceLabel(mention_id=mention_id, doc_id=doc_id, label=relevant)
            )
            offset += len(sentence) + 1

        doc = Document(
            doc_id=doc_id,
            event_type=event,
            title=title,
            text=" ".join(sentences),
            sentences=tuple(sentences),
            mentions=tuple(mentions),
        )
        validate_document(doc)
        documents.append(doc)

        relevance = {l.mention_id: l.label for l in relevance_labels if l.doc_id == doc_id}
        slots = _pick_representatives(doc, relevance, cluster_of, provider, sieve_config)
        gold_frames.append(
            InformationFrame(doc_id=doc_id, event_type=event, slots=slots)
        )

        by_type = mentions_by_type(doc)
        for arg_type in ALL_TYPES:
            ms = by_type[arg_type]
            for i in range(len(ms)):
                for j in range(i + 1, len(ms)):
                    a, b = ms[i], ms[j]
                    pair_labels.append(
                        LabeledPair(
                            pair_id=f"{doc_id}:p:{a.mention_id.split(':')[-1]}-{b.mention_id.split(':')[-1]}",
                            doc_id=doc_id,
                            mention_a=a.mention_id,
                            mention_b=b.mention_id,
                            label=1 if cluster_of[a.mention_id] == cluster_of[b.mention_id] else 0,
                        )
                    )

    return SyntheticCorpus(
        documents=documents,
        gold_frames=gold_frames,
        relevance_labels=relevance_labels,
        pair_labels=pair_labels,
        cluster_of=cluster_of,
    )
