"""Shared text normalization and surface-similarity helpers.

Both the pairwise classifier features and the frame-matching metric rely on
the same normalization so that "redundant" and "matches gold" mean the same
thing for a given string.
"""

import re
import string

_WS_RUN = re.compile(r"\s+")

# Minimum normalized length for the substring short-circuit; keeps stopwords
# like "a" from matching inside "area".
MIN_SUBSTRING_LEN = 3


def normalize_text(s: str) -> str:
    """Lowercase, collapse whitespace runs, strip surrounding punctuation."""
    s = _WS_RUN.sub(" ", s.strip().lower())
    s = s.strip(string.punctuation + " ")
    return _WS_RUN.sub(" ", s)


def tokens(s: str) -> list:
    """Lowercase whitespace tokens with edge punctuation stripped."""
    out = []
    for tok in s.lower().split():
        tok = tok.strip(string.punctuation)
        if tok:
            out.append(tok)
    return out


def token_jaccard(a: str, b: str) -> float:
    ta, tb = set(tokens(a)), set(tokens(b))
    if not ta and not tb:
        return 1.0
    if not ta or not tb:
        return 0.0
    return len(ta & tb) / len(ta | tb)


def _contains_at_boundary(haystack: str, needle: str) -> bool:
    """True when needle occurs in haystack starting at a token boundary."""
    start = 0
    while True:
        idx = haystack.find(needle, start)
        if idx < 0:
            return False
        if idx == 0 or haystack[idx - 1] == " ":
            return True
        start = idx + 1


def is_boundary_substring(a: str, b: str) -> bool:
    """Token-boundary containment of the shorter normalized text in the longer.

    Symmetric. Covers exact prefixes of longer tokens ("indonesia" in
    "indonesia's main island java") as well as full-token runs ("new york" in
    "new york city apartment building").
    """
    na, nb = normalize_text(a), normalize_text(b)
    if not na or not nb:
        return False
    short, long = (na, nb) if len(na) <= len(nb) else (nb, na)
    if len(short) < MIN_SUBSTRING_LEN:
        return False
    return _contains_at_boundary(long, short)
