"""Document-level event-argument aggregation with trainable sieves and
biased graph ranking."""

__version__ = "0.1.0"
