"""Shared fixtures: a compact document builder and embedding providers."""

import pytest

from argsieve.corpus import ArgumentMention, ArgumentType, Document, validate_document
from argsieve.features import EmbeddingProvider, EmbeddingProviderConfig


def make_doc(doc_id, mention_specs, event_type="flood", title="Flood hits Santara"):
    """Build a valid document from (arg_type, text) pairs, one per sentence."""
    sentences = [f"A severe {event_type} was reported in the area."]
    mentions = []
    offset = len(sentences[0]) + 1
    for k, (arg_type, text) in enumerate(mention_specs):
        sentence = f"Reports confirmed that {text}."
        local = sentence.find(text)
        mentions.append(
            ArgumentMention(
                mention_id=f"{doc_id}:m{k:03d}",
                doc_id=doc_id,
                arg_type=arg_type,
                text=text,
                sentence_index=len(sentences),
                char_span=(offset + local, offset + local + len(text)),
            )
        )
        sentences.append(sentence)
        offset += len(sentence) + 1
    doc = Document(
        doc_id=doc_id,
        event_type=event_type,
        title=title,
        text=" ".join(sentences),
        sentences=tuple(sentences),
        mentions=tuple(mentions),
    )
    validate_document(doc)
    return doc


@pytest.fixture(scope="session")
def provider():
    return EmbeddingProvider(EmbeddingProviderConfig())


@pytest.fixture(scope="session")
def provider16():
    return EmbeddingProvider(EmbeddingProviderConfig(dim=16))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    try:
        from test_acceptance import CRITERIA
    except ImportError:
        return
    results = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance" not in nodeid:
                continue
            name = nodeid.split("::")[-1]
            if name in CRITERIA:
                results[name] = outcome == "passed"
    if not results:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria:")
    for name, label in CRITERIA.items():
        if name in results:
            verdict = "PASS" if results[name] else "FAIL"
            terminalreporter.write_line(f"  [{verdict}] {label}")
