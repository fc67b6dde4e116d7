"""HTTP annotation service driving the active-learning rounds.

One mutating writer: every label batch and retrain goes through a lock and
is persisted to the session file before the response is sent, so a crash
loses at most the in-flight unacknowledged batch. Label submissions carry a
batch id as an idempotency token; replays are acknowledged without being
re-applied.
"""

import hashlib
import json
import threading
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .classify import (
    FeatureVector,
    TrainConfig,
    featurize_pair,
    predict_proba,
)
from .corpus import Document, LabeledPair
from .features import EmbeddingProvider
from .learn import ALConfig, Pool, RoundReport, retrain, select_batch, should_stop


class SessionError(ValueError):
    pass


class AnnotationSession:
    """Owns the pool, the current model and the round history."""

    def __init__(
        self,
        docs: Sequence[Document],
        pool_pairs: Sequence[LabeledPair],
        seed_labels: Sequence[LabeledPair],
        dev_labels: Sequence[LabeledPair],
        provider: EmbeddingProvider,
        train_config: TrainConfig,
        al_config: ALConfig,
        session_path: Optional[str] = None,
    ):
        self.provider = provider
        self.train_config = train_config
        self.al_config = al_config
        self.session_path = Path(session_path) if session_path else None
        self.lock = threading.Lock()

        docs_by_id = {d.doc_id: d for d in docs}
        mentions = {m.mention_id: m for d in docs for m in d.mentions}
        self.pair_info: Dict[str, dict] = {}
        features: Dict[str, FeatureVector] = {}
        for pair in list(pool_pairs) + list(seed_labels):
            if pair.pair_id in features:
                continue
            doc = docs_by_id[pair.doc_id]
            a, b = mentions[pair.mention_a], mentions[pair.mention_b]
            features[pair.pair_id] = featurize_pair(a, b, doc, provider)
            excerpt = (doc.title + " — " + doc.sentences[0]).strip(" —")
            self.pair_info[pair.pair_id] = {
                "pair_id": pair.pair_id,
                "text_a": a.text,
                "text_b": b.text,
                "arg_type": a.arg_type.value,
                "doc_excerpt": excerpt,
            }
        self.features = features

        self.pool = Pool(unlabeled={p.pair_id: features[p.pair_id] for p in pool_pairs})
        for pair in seed_labels:
            self.pool.labeled.append((pair.pair_id, features[pair.pair_id], pair.label))
        self.labels: Dict[str, int] = {p.pair_id: p.label for p in seed_labels}

        self.dev = []
        for pair in dev_labels:
            doc = docs_by_id[pair.doc_id]
            a, b = mentions[pair.mention_a], mentions[pair.mention_b]
            self.dev.append((featurize_pair(a, b, doc, provider), pair.label))

        self.history: List[RoundReport] = []
        self.pending_batch_id: Optional[str] = None
        self.applied_batches: set = set()

        if self.session_path and self.session_path.exists():
            self._resume()
        self.model, _ = retrain(self.pool, self.train_config, self.dev)
        self._persist()

    # -- persistence --

    def _resume(self) -> None:
        try:
            state = json.loads(self.session_path.read_text(encoding="utf-8"))
            labeled_ids = state["labeled"]
            unlabeled_ids = set(state["unlabeled"])
            labels = {k: int(v) for k, v in state.get("labels", {}).items()}
            history = [
                RoundReport(
                    round=h["round"],
                    selected=tuple(h["selected"]),
                    dev_f1=h["dev_f1"],
                    model_snapshot_id=h["model_snapshot_id"],
                )
                for h in state["history"]
            ]
        except (KeyError, ValueError, TypeError) as exc:
            raise SessionError(
                f"corrupt session file {self.session_path}: {exc}"
            ) from exc
        known = set(self.features)
        if not set(labeled_ids) <= known or not unlabeled_ids <= known:
            raise SessionError(
                f"session file {self.session_path} references pairs absent from the pool"
            )
        self.pool = Pool(
            unlabeled={pid: self.features[pid] for pid in sorted(unlabeled_ids)},
            labeled=[(pid, self.features[pid], labels[pid]) for pid in labeled_ids],
            round=int(state["round"]),
        )
        self.labels = labels
        self.history = history
        self.applied_batches = set(state.get("applied_batches", []))

    def _persist(self) -> None:
        if not self.session_path:
            return
        state = {
            "round": self.pool.round,
            "labeled": [pid for pid, _, _ in self.pool.labeled],
            "unlabeled": sorted(self.pool.unlabeled),
            "labels": {k: self.labels[k] for k in sorted(self.labels)},
            "history": [
                {
                    "round": h.round,
                    "selected": list(h.selected),
                    "dev_f1": h.dev_f1,
                    "model_snapshot_id": h.model_snapshot_id,
                }
                for h in self.history
            ],
            "applied_batches": sorted(self.applied_batches),
        }
        tmp = self.session_path.with_suffix(".tmp")
        tmp.write_text(
            json.dumps(state, sort_keys=True, separators=(",", ":")) + "\n",
            encoding="utf-8",
        )
        tmp.replace(self.session_path)

    # -- API operations --

    def status(self) -> dict:
        return {
            "round": self.pool.round,
            "labeled_count": len(self.pool.labeled),
            "unlabeled_count": len(self.pool.unlabeled),
            "pending_batch": list(self.pool.pending),
            "history": [
                {
                    "round": h.round,
                    "selected": list(h.selected),
                    "dev_f1": h.dev_f1,
                    "model_snapshot_id": h.model_snapshot_id,
                }
                for h in self.history
            ],
            "should_stop": should_stop(self.history, self.al_config),
        }

    def queue(self, n: int) -> dict:
        with self.lock:
            if not self.pool.unlabeled:
                return {"batch_id": None, "pairs": []}
            config = ALConfig(
                batch_size=min(n, self.al_config.batch_size),
                strategy=self.al_config.strategy,
                patience=self.al_config.patience,
                mc_pool_cap=self.al_config.mc_pool_cap,
                seed=self.al_config.seed,
            )
            selected = select_batch(self.model, self.pool, config, self.train_config)
            digest = hashlib.blake2b(digest_size=8)
            digest.update(str(self.pool.round).encode())
            digest.update("\n".join(selected).encode())
            batch_id = digest.hexdigest()
            self.pool.pending = tuple(selected)
            self.pending_batch_id = batch_id
            pairs = []
            for pid in selected:
                info = dict(self.pair_info[pid])
                info["model_p"] = predict_proba(self.model, self.features[pid])
                pairs.append(info)
            return {"batch_id": batch_id, "pairs": pairs}

    def submit_labels(self, batch_id: str, labels: Sequence[Tuple[str, int]]) -> dict:
        with self.lock:
            if batch_id in self.applied_batches:
                return {"applied": False, "labeled_count": len(self.pool.labeled)}
            if batch_id != self.pending_batch_id:
                raise SessionError(f"unknown or stale batch id {batch_id!r}")
            for pid, label in labels:
                if int(label) not in (0, 1):
                    raise SessionError(f"label for {pid} must be 0 or 1")
            self.pool.add_labels([(pid, int(label)) for pid, label in labels])
            for pid, label in labels:
                self.labels[pid] = int(label)
            self.applied_batches.add(batch_id)
            self.pending_batch_id = None
            self._persist()
            return {"applied": True, "labeled_count": len(self.pool.labeled)}

    def do_retrain(self) -> dict:
        with self.lock:
            model, report = retrain(self.pool, self.train_config, self.dev)
            self.model = model
            self.pool.round += 1
            round_report = RoundReport(
                round=self.pool.round,
                selected=(),
                dev_f1=report.macro_f1,
                model_snapshot_id=_model_id(model),
            )
            self.history.append(round_report)
            self._persist()
            return {
                "round": round_report.round,
                "selected": [],
                "dev_f1": round_report.dev_f1,
                "model_snapshot_id": round_report.model_snapshot_id,
            }


def _model_id(model) -> str:
    h = hashlib.blake2b(digest_size=8)
    h.update(model.weights.tobytes())
    h.update(repr(model.bias).encode())
    return h.hexdigest()


def create_app(session: AnnotationSession, static_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI()

    @app.exception_handler(SessionError)
    async def _session_error(request, exc):
        return JSONResponse(status_code=409, content={"error": str(exc)})

    @app.exception_handler(ValueError)
    async def _value_error(request, exc):
        return JSONResponse(status_code=422, content={"error": str(exc)})

    @app.get("/api/status")
    def api_status():
        return session.status()

    @app.get("/api/queue")
    def api_queue(n: int = 50):
        if n < 1:
            return JSONResponse(status_code=422, content={"error": "n must be >= 1"})
        return session.queue(n)

    @app.post("/api/labels")
    def api_labels(body: dict):
        batch_id = body.get("batch_id")
        labels = body.get("labels")
        if not batch_id or not isinstance(labels, list):
            return JSONResponse(
                status_code=422,
                content={"error": "body must carry batch_id and labels"},
            )
        result = session.submit_labels(
            batch_id, [(item["pair_id"], item["label"]) for item in labels]
        )
        return result

    @app.post("/api/retrain")
    def api_retrain():
        return session.do_retrain()

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app
