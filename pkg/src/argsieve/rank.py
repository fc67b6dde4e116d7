"""Informativeness ranking over per-type argument graphs.

Vertices are argument mentions of one type; edge weights are clamped cosine
similarities. Scores solve the damped fixed point

    R_i = b_i * (1 - d) + d * sum_j (w_ij / sum_k w_jk) * R_j

by power iteration, with a direct Gaussian-elimination solve kept alongside
as an independent oracle.
"""

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from .corpus import ArgumentMention
from .features import EmbeddingProvider, cosine

BIAS_FLOOR = 1e-6


class RankError(ValueError):
    pass


@dataclass(frozen=True)
class ArgumentGraph:
    vertices: Tuple[str, ...]
    weights: np.ndarray  # symmetric, non-negative, zero diagonal

    def __post_init__(self):
        n = len(self.vertices)
        w = self.weights
        if w.shape != (n, n):
            raise RankError(f"weight matrix shape {w.shape} for {n} vertices")
        if np.any(w < 0):
            raise RankError("edge weights must be non-negative")
        if np.any(np.abs(np.diag(w)) > 0):
            raise RankError("diagonal must be zero")
        if np.max(np.abs(w - w.T)) > 1e-12:
            raise RankError("weights must be symmetric")


@dataclass(frozen=True)
class RankConfig:
    damping: float = 0.85
    tolerance: float = 1e-8
    max_iterations: int = 200

    def __post_init__(self):
        if not (0 < self.damping < 1):
            raise RankError("damping must be strictly inside (0, 1)")
        if self.tolerance <= 0 or self.max_iterations < 1:
            raise RankError("invalid tolerance or max_iterations")


@dataclass(frozen=True)
class RankScores:
    scores: np.ndarray
    iterations_used: int
    converged: bool


def build_graph(
    mentions: Sequence[ArgumentMention], provider: EmbeddingProvider
) -> ArgumentGraph:
    if not mentions:
        raise RankError("cannot build a graph over zero mentions")
    types = {m.arg_type for m in mentions}
    if len(types) != 1:
        raise RankError("graph mentions must all share one argument type")
    embs = [provider.embed(m.text) for m in mentions]
    n = len(mentions)
    w = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            w[i, j] = w[j, i] = max(0.0, cosine(embs[i], embs[j]))
    return ArgumentGraph(vertices=tuple(m.mention_id for m in mentions), weights=w)


def compute_bias(
    mentions: Sequence[ArgumentMention], bias_text: str, provider: EmbeddingProvider
) -> np.ndarray:
    if not bias_text.strip():
        raise RankError("bias text must be non-empty")
    emb_bias = provider.embed(bias_text)
    raw = np.array(
        [max(0.0, cosine(provider.embed(m.text), emb_bias)) for m in mentions]
    )
    return apply_bias_floor(raw)


def apply_bias_floor(raw: np.ndarray) -> np.ndarray:
    """Keep the teleport term well-defined: floor at eps, uniform if all-zero."""
    if np.all(raw == 0):
        return np.full(len(raw), 1.0 / len(raw))
    return np.maximum(raw, BIAS_FLOOR)


def _transition_matrix(graph: ArgumentGraph) -> np.ndarray:
    """M[i, j] = w_ij / out_sum_j; dangling vertices contribute no mass."""
    w = graph.weights
    out_sums = w.sum(axis=0)  # symmetric, so column sums = out sums
    M = np.zeros_like(w)
    nonzero = out_sums > 0
    M[:, nonzero] = w[:, nonzero] / out_sums[nonzero]
    return M


def biased_textrank(
    graph: ArgumentGraph, bias: np.ndarray, config: RankConfig = RankConfig()
) -> RankScores:
    bias = np.asarray(bias, dtype=float)
    n = len(graph.vertices)
    if bias.shape[0] != n:
        raise RankError(f"bias length {bias.shape[0]} != vertex count {n}")
    if np.any(bias < 0):
        raise RankError("bias weights must be non-negative")
    M = _transition_matrix(graph)
    teleport = bias * (1.0 - config.damping)
    r = bias.copy()
    for iteration in range(1, config.max_iterations + 1):
        r_next = teleport + config.damping * (M @ r)
        if not np.all(np.isfinite(r_next)):
            raise RankError(f"non-finite scores at iteration {iteration}")
        delta = float(np.max(np.abs(r_next - r)))
        r = r_next
        if delta < config.tolerance:
            return RankScores(scores=r, iterations_used=iteration, converged=True)
    return RankScores(scores=r, iterations_used=config.max_iterations, converged=False)


def textrank(graph: ArgumentGraph, config: RankConfig = RankConfig()) -> RankScores:
    return biased_textrank(graph, np.ones(len(graph.vertices)), config)


def _gaussian_solve(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Gaussian elimination with partial pivoting."""
    A = A.astype(float).copy()
    b = b.astype(float).copy()
    n = A.shape[0]
    for col in range(n):
        pivot = col + int(np.argmax(np.abs(A[col:, col])))
        if abs(A[pivot, col]) < 1e-14:
            raise RankError("singular fixed-point system")
        if pivot != col:
            A[[col, pivot]] = A[[pivot, col]]
            b[[col, pivot]] = b[[pivot, col]]
        for row in range(col + 1, n):
            factor = A[row, col] / A[col, col]
            A[row, col:] -= factor * A[col, col:]
            b[row] -= factor * b[col]
    x = np.zeros(n)
    for row in range(n - 1, -1, -1):
        x[row] = (b[row] - A[row, row + 1 :] @ x[row + 1 :]) / A[row, row]
    return x


def rank_oracle(
    graph: ArgumentGraph, bias: np.ndarray, config: RankConfig = RankConfig()
) -> RankScores:
    """Direct solve of (I - d*M) R = (1-d) b; verification-only, n <= 64."""
    n = len(graph.vertices)
    if n > 64:
        raise RankError("oracle solve is limited to 64 vertices")
    bias = np.asarray(bias, dtype=float)
    if bias.shape[0] != n:
        raise RankError(f"bias length {bias.shape[0]} != vertex count {n}")
    M = _transition_matrix(graph)
    A = np.eye(n) - config.damping * M
    x = _gaussian_solve(A, (1.0 - config.damping) * bias)
    return RankScores(scores=x, iterations_used=0, converged=True)


def top_k(
    scores: RankScores, mentions: Sequence[ArgumentMention], k: int
) -> List[ArgumentMention]:
    """Top-k by score descending; ties keep corpus (input) order."""
    if k < 1:
        raise RankError("k must be >= 1")
    if len(mentions) != scores.scores.shape[0]:
        raise RankError("scores and mentions lengths differ")
    order = sorted(range(len(mentions)), key=lambda i: (-scores.scores[i], i))
    return [mentions[i] for i in order[:k]]
