"""Run configuration: one JSON file describing paths and every knob.

Unknown keys are rejected so a typo ("dampening") fails loudly instead of
silently running with defaults.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional

from .corpus import ArgumentType
from .classify import TrainConfig
from .features import EmbeddingProviderConfig
from .learn import ALConfig
from .rank import RankConfig
from .sieve import DEFAULT_BIAS_TEMPLATES, SieveConfig


class ConfigError(ValueError):
    pass


def _check_keys(obj: dict, allowed: set, where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")


PATH_KEYS = {
    "documents", "gold_frames", "relevance_labels", "pair_labels",
    "relevance_model", "redundancy_model", "embeddings", "frames", "trace",
    "report", "scores", "session", "pairs_pool", "seed_labels", "dev_labels",
}


def provider_from_dict(obj: dict) -> EmbeddingProviderConfig:
    _check_keys(obj, {"kind", "dim", "ngram_sizes", "store_path", "endpoint"}, "provider")
    kwargs = dict(obj)
    if "ngram_sizes" in kwargs:
        kwargs["ngram_sizes"] = tuple(kwargs["ngram_sizes"])
    return EmbeddingProviderConfig(**kwargs)


def provider_to_dict(cfg: EmbeddingProviderConfig) -> dict:
    out = {"kind": cfg.kind, "dim": cfg.dim, "ngram_sizes": list(cfg.ngram_sizes)}
    if cfg.store_path:
        out["store_path"] = cfg.store_path
    if cfg.endpoint:
        out["endpoint"] = cfg.endpoint
    return out


def rank_from_dict(obj: dict) -> RankConfig:
    _check_keys(obj, {"damping", "tolerance", "max_iterations"}, "sieve.rank")
    return RankConfig(**obj)


def sieve_from_dict(obj: dict) -> SieveConfig:
    _check_keys(
        obj,
        {"relevance_threshold", "redundancy_threshold", "bias_templates", "rank"},
        "sieve",
    )
    templates = dict(DEFAULT_BIAS_TEMPLATES)
    for key, value in obj.get("bias_templates", {}).items():
        templates[ArgumentType.parse(key)] = value
    return SieveConfig(
        relevance_threshold=obj.get("relevance_threshold", 0.5),
        redundancy_threshold=obj.get("redundancy_threshold", 0.5),
        bias_templates=templates,
        rank_config=rank_from_dict(obj.get("rank", {})),
    )


def sieve_to_dict(cfg: SieveConfig) -> dict:
    return {
        "relevance_threshold": cfg.relevance_threshold,
        "redundancy_threshold": cfg.redundancy_threshold,
        "bias_templates": {t.value: s for t, s in cfg.bias_templates.items()},
        "rank": {
            "damping": cfg.rank_config.damping,
            "tolerance": cfg.rank_config.tolerance,
            "max_iterations": cfg.rank_config.max_iterations,
        },
    }


def train_from_dict(obj: dict) -> TrainConfig:
    _check_keys(
        obj,
        {"learning_rate", "epochs", "l2_penalty", "seed", "shuffle", "positive_weight"},
        "train",
    )
    return TrainConfig(**obj)


def al_from_dict(obj: dict) -> ALConfig:
    _check_keys(
        obj,
        {"batch_size", "strategy", "patience", "mc_pool_cap", "seed",
         "improvement_tolerance"},
        "al",
    )
    return ALConfig(**obj)


@dataclass(frozen=True)
class RunConfig:
    paths: Dict[str, str] = field(default_factory=dict)
    provider: EmbeddingProviderConfig = field(default_factory=EmbeddingProviderConfig)
    sieve: SieveConfig = field(default_factory=SieveConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    al: ALConfig = field(default_factory=ALConfig)
    fail_fast: bool = True
    seed: int = 0

    @classmethod
    def from_dict(cls, obj: dict) -> "RunConfig":
        _check_keys(
            obj, {"paths", "provider", "sieve", "train", "al", "fail_fast", "seed"},
            "config",
        )
        paths = obj.get("paths", {})
        _check_keys(paths, PATH_KEYS, "paths")
        return cls(
            paths=dict(paths),
            provider=provider_from_dict(obj.get("provider", {})),
            sieve=sieve_from_dict(obj.get("sieve", {})),
            train=train_from_dict(obj.get("train", {})),
            al=al_from_dict(obj.get("al", {})),
            fail_fast=obj.get("fail_fast", True),
            seed=obj.get("seed", 0),
        )

    def to_dict(self) -> dict:
        return {
            "paths": dict(self.paths),
            "provider": provider_to_dict(self.provider),
            "sieve": sieve_to_dict(self.sieve),
            "train": {
                "learning_rate": self.train.learning_rate,
                "epochs": self.train.epochs,
                "l2_penalty": self.train.l2_penalty,
                "seed": self.train.seed,
                "shuffle": self.train.shuffle,
                "positive_weight": self.train.positive_weight,
            },
            "al": {
                "batch_size": self.al.batch_size,
                "strategy": self.al.strategy,
                "patience": self.al.patience,
                "mc_pool_cap": self.al.mc_pool_cap,
                "seed": self.al.seed,
                "improvement_tolerance": self.al.improvement_tolerance,
            },
            "fail_fast": self.fail_fast,
            "seed": self.seed,
        }

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            obj = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
        return cls.from_dict(obj)

    def save(self, path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n",
            encoding="utf-8",
        )
