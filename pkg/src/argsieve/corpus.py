"""Corpus data model: documents, argument mentions, information frames.

All values are immutable after load and validated eagerly, so the rest of
the pipeline can assume well-formed inputs. Files are line-delimited JSON;
writers emit canonical (sorted-key, compact) JSON so that write->read->write
is byte-identical.
"""

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

from .textutil import normalize_text


class CorpusError(ValueError):
    """Raised for malformed records or invariant violations."""


class ArgumentType(Enum):
    TIME = "Time"
    PLACE = "Place"
    CASUALTIES = "Casualties"
    AFTER_EFFECT = "After-Effect"
    REASON = "Reason"
    PARTICIPANT = "Participant"

    @classmethod
    def parse(cls, label: str) -> "ArgumentType":
        for member in cls:
            if member.value == label:
                return member
        raise CorpusError(f"unknown argument type: {label!r}")


ALL_TYPES: Tuple[ArgumentType, ...] = tuple(ArgumentType)


@dataclass(frozen=True)
class ArgumentMention:
    mention_id: str
    doc_id: str
    arg_type: ArgumentType
    text: str
    sentence_index: int
    char_span: Tuple[int, int]


@dataclass(frozen=True)
class Document:
    doc_id: str
    event_type: str
    title: str
    text: str
    sentences: Tuple[str, ...]
    mentions: Tuple[ArgumentMention, ...]


@dataclass(frozen=True)
class InformationFrame:
    doc_id: str
    event_type: str
    slots: Dict[ArgumentType, List[str]]


@dataclass(frozen=True)
class LabeledPair:
    pair_id: str
    doc_id: str
    mention_a: str
    mention_b: str
    label: int


@dataclass(frozen=True)
class RelevanceLabel:
    mention_id: str
    doc_id: str
    label: int


_WS = re.compile(r"\s+")


def _squash(s: str) -> str:
    return _WS.sub(" ", s).strip()


def validate_document(doc: Document) -> None:
    seen_mentions = set()
    for m in doc.mentions:
        if m.mention_id in seen_mentions:
            raise CorpusError(f"doc {doc.doc_id}: duplicate mention_id {m.mention_id}")
        seen_mentions.add(m.mention_id)
        if m.doc_id != doc.doc_id:
            raise CorpusError(f"mention {m.mention_id}: doc_id mismatch")
        if not m.text:
            raise CorpusError(f"mention {m.mention_id}: empty text")
        start, end = m.char_span
        if not (0 <= start < end <= len(doc.text)):
            raise CorpusError(
                f"mention {m.mention_id}: char_span [{start},{end}) outside "
                f"document of length {len(doc.text)}"
            )
        if doc.text[start:end] != m.text:
            raise CorpusError(
                f"mention {m.mention_id}: char_span slice does not equal text"
            )
        if not (0 <= m.sentence_index < len(doc.sentences)):
            raise CorpusError(
                f"mention {m.mention_id}: sentence_index {m.sentence_index} "
                f"out of range for {len(doc.sentences)} sentences"
            )
    if _squash(" ".join(doc.sentences)) != _squash(doc.text):
        raise CorpusError(
            f"doc {doc.doc_id}: sentences do not reconstruct text "
            "(up to whitespace normalization)"
        )


def _mention_from_json(obj: dict, doc_id: str) -> ArgumentMention:
    span = obj["char_span"]
    return ArgumentMention(
        mention_id=obj["mention_id"],
        doc_id=doc_id,
        arg_type=ArgumentType.parse(obj["arg_type"]),
        text=obj["text"],
        sentence_index=int(obj["sentence_index"]),
        char_span=(int(span[0]), int(span[1])),
    )


def _document_from_json(obj: dict) -> Document:
    doc_id = obj["doc_id"]
    doc = Document(
        doc_id=doc_id,
        event_type=obj["event_type"],
        title=obj.get("title", ""),
        text=obj["text"],
        sentences=tuple(obj["sentences"]),
        mentions=tuple(_mention_from_json(m, doc_id) for m in obj["mentions"]),
    )
    validate_document(doc)
    return doc


def _iter_jsonl(path) -> "list[tuple[int, dict]]":
    path = Path(path)
    records = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                records.append((lineno, json.loads(line)))
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: malformed record: {exc}") from exc
    return records


def load_documents(path) -> List[Document]:
    docs = []
    seen = set()
    for lineno, obj in _iter_jsonl(path):
        try:
            doc = _document_from_json(obj)
        except KeyError as exc:
            raise CorpusError(f"{path}:{lineno}: missing field {exc}") from exc
        if doc.doc_id in seen:
            raise CorpusError(f"{path}:{lineno}: duplicate doc_id {doc.doc_id}")
        seen.add(doc.doc_id)
        docs.append(doc)
    return docs


def _frame_from_json(obj: dict) -> InformationFrame:
    slots = {t: [] for t in ALL_TYPES}
    for key, values in obj["slots"].items():
        arg_type = ArgumentType.parse(key)
        seen = set()
        for v in values:
            norm = normalize_text(v)
            if norm in seen:
                raise CorpusError(
                    f"frame {obj['doc_id']}: slot {key} has duplicate entry {v!r}"
                )
            seen.add(norm)
        slots[arg_type] = list(values)
    return InformationFrame(
        doc_id=obj["doc_id"], event_type=obj["event_type"], slots=slots
    )


def load_gold_frames(path) -> List[InformationFrame]:
    frames = []
    seen = set()
    for lineno, obj in _iter_jsonl(path):
        try:
            frame = _frame_from_json(obj)
        except KeyError as exc:
            raise CorpusError(f"{path}:{lineno}: missing field {exc}") from exc
        if frame.doc_id in seen:
            raise CorpusError(f"{path}:{lineno}: duplicate doc_id {frame.doc_id}")
        seen.add(frame.doc_id)
        frames.append(frame)
    return frames


def mentions_by_type(doc: Document) -> Dict[ArgumentType, List[ArgumentMention]]:
    """Partition mentions by type, ordered by (sentence, span start, id)."""
    out: Dict[ArgumentType, List[ArgumentMention]] = {t: [] for t in ALL_TYPES}
    for m in doc.mentions:
        out[m.arg_type].append(m)
    for t in ALL_TYPES:
        out[t].sort(key=lambda m: (m.sentence_index, m.char_span[0], m.mention_id))
    return out


def dumps_canonical(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def write_jsonl(records: Sequence[dict], path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(dumps_canonical(rec))
            fh.write("\n")


def document_to_json(doc: Document) -> dict:
    return {
        "doc_id": doc.doc_id,
        "event_type": doc.event_type,
        "title": doc.title,
        "text": doc.text,
        "sentences": list(doc.sentences),
        "mentions": [
            {
                "mention_id": m.mention_id,
                "arg_type": m.arg_type.value,
                "text": m.text,
                "sentence_index": m.sentence_index,
                "char_span": list(m.char_span),
            }
            for m in doc.mentions
        ],
    }


def frame_to_json(frame: InformationFrame) -> dict:
    return {
        "doc_id": frame.doc_id,
        "event_type": frame.event_type,
        "slots": {t.value: list(frame.slots.get(t, [])) for t in ALL_TYPES},
    }


def write_documents(docs: Sequence[Document], path) -> None:
    write_jsonl([document_to_json(d) for d in docs], path)


def write_frames(frames: Sequence[InformationFrame], path) -> None:
    write_jsonl([frame_to_json(f) for f in frames], path)


def load_relevance_labels(path) -> List[RelevanceLabel]:
    labels = []
    for lineno, obj in _iter_jsonl(path):
        label = int(obj["label"])
        if label not in (0, 1):
            raise CorpusError(f"{path}:{lineno}: label must be 0 or 1")
        labels.append(
            RelevanceLabel(mention_id=obj["mention_id"], doc_id=obj["doc_id"], label=label)
        )
    return labels


def load_pair_labels(path) -> List[LabeledPair]:
    pairs = []
    for lineno, obj in _iter_jsonl(path):
        label = int(obj["label"])
        if label not in (0, 1):
            raise CorpusError(f"{path}:{lineno}: label must be 0 or 1")
        if obj["mention_a"] == obj["mention_b"]:
            raise CorpusError(f"{path}:{lineno}: pair references the same mention twice")
        pairs.append(
            LabeledPair(
                pair_id=obj["pair_id"],
                doc_id=obj["doc_id"],
                mention_a=obj["mention_a"],
                mention_b=obj["mention_b"],
                label=label,
            )
        )
    return pairs


def write_relevance_labels(labels: Sequence[RelevanceLabel], path) -> None:
    write_jsonl(
        [
            {"mention_id": l.mention_id, "doc_id": l.doc_id, "label": l.label}
            for l in labels
        ],
        path,
    )


def write_pair_labels(pairs: Sequence[LabeledPair], path) -> None:
    write_jsonl(
        [
            {
                "pair_id": p.pair_id,
                "doc_id": p.doc_id,
                "mention_a": p.mention_a,
                "mention_b": p.mention_b,
                "label": p.label,
            }
            for p in pairs
        ],
        path,
    )
