"""Command-line interface: one subcommand per pipeline stage.

Exit codes: 0 success, 1 usage, 2 data/validation, 3 runtime. Values given
in the --config file override command-line flags, which override defaults,
so a checked-in config reproduces a run exactly.
"""

import argparse
import json
import sys
from pathlib import Path

from . import corpus as corpus_io
from .classify import (
    ClassifyError,
    build_pair_examples,
    build_relevance_examples,
    evaluate_classifier,
    load_model,
    save_model,
    train_logistic,
)
from .config import ConfigError, RunConfig
from .corpus import ALL_TYPES, CorpusError, mentions_by_type
from .features import EmbeddingProvider, FeatureError
from .learn import LearnError, Pool, select_batch
from .metrics import (
    EvalError,
    format_report,
    report_to_json,
    run_topk_baseline,
    score_corpus,
)
from .rank import RankError, biased_textrank, build_graph, compute_bias
from .sieve import (
    LinearRedundancyScorer,
    LinearRelevanceScorer,
    SieveError,
    aggregate_corpus,
    build_bias_text,
)
from .synthetic import GeneratorConfig, generate_synthetic_corpus

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_RUNTIME = 3

DATA_ERRORS = (
    CorpusError,
    ConfigError,
    ClassifyError,
    FeatureError,
    RankError,
    SieveError,
    LearnError,
    EvalError,
    FileNotFoundError,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _load_run_config(args) -> RunConfig:
    if getattr(args, "config", None):
        return RunConfig.load(args.config)
    return RunConfig()


def _path(args, config: RunConfig, key: str, flag: str = None, required=True):
    """Config file wins over the flag; the flag wins over nothing."""
    value = config.paths.get(key) or getattr(args, flag or key, None)
    if required and not value:
        raise UsageError(f"missing path for {key!r} (flag --{(flag or key).replace('_','-')} or config paths.{key})")
    return value


def cmd_generate_synthetic(args) -> int:
    config = _load_run_config(args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    provider = EmbeddingProvider(config.provider)
    gen = GeneratorConfig(
        seed=args.seed if args.seed is not None else config.seed,
        n_docs=args.n_docs,
        redundancy_rate=args.redundancy_rate,
        irrelevance_rate=args.irrelevance_rate,
        multi_cluster_rate=args.multi_cluster_rate,
    )
    result = generate_synthetic_corpus(gen, provider, config.sieve)
    corpus_io.write_documents(result.documents, out_dir / "documents.jsonl")
    corpus_io.write_frames(result.gold_frames, out_dir / "gold_frames.jsonl")
    corpus_io.write_relevance_labels(result.relevance_labels, out_dir / "labels.relevance.jsonl")
    corpus_io.write_pair_labels(result.pair_labels, out_dir / "labels.pairs.jsonl")
    corpus_io.write_jsonl(
        [
            {"pair_id": p.pair_id, "doc_id": p.doc_id,
             "mention_a": p.mention_a, "mention_b": p.mention_b}
            for p in result.pair_labels
        ],
        out_dir / "pairs.jsonl",
    )
    print(f"wrote {len(result.documents)} documents to {out_dir}")
    return EXIT_OK


def cmd_train(args) -> int:
    config = _load_run_config(args)
    provider = EmbeddingProvider(config.provider)
    docs = corpus_io.load_documents(_path(args, config, "documents"))
    if args.target == "relevance":
        labels = corpus_io.load_relevance_labels(_path(args, config, "relevance_labels", "labels"))
        examples = build_relevance_examples(docs, labels, provider)
        model_key = "relevance_model"
    else:
        labels = corpus_io.load_pair_labels(_path(args, config, "pair_labels", "labels"))
        examples = build_pair_examples(docs, labels, provider)
        model_key = "redundancy_model"
    model = train_logistic(examples, config.train)
    out_path = _path(args, config, model_key, "out_model")
    save_model(model, out_path)
    print(f"trained {args.target} model on {len(examples)} examples -> {out_path}")
    dev_path = _path(args, config, "dev_labels", required=False)
    if dev_path:
        if args.target == "relevance":
            dev = build_relevance_examples(docs, corpus_io.load_relevance_labels(dev_path), provider)
        else:
            dev = build_pair_examples(docs, corpus_io.load_pair_labels(dev_path), provider)
        report = evaluate_classifier(model, dev)
        print(f"dev macro F1 {report.macro_f1:.4f}, micro F1 {report.micro_f1:.4f}")
        for cls in (0, 1):
            m = report.per_class[cls]
            print(
                f"  class {cls}: P {m['precision']:.4f} R {m['recall']:.4f} F1 {m['f1']:.4f}"
            )
    return EXIT_OK


def cmd_aggregate(args) -> int:
    config = _load_run_config(args)
    provider = EmbeddingProvider(config.provider)
    docs = corpus_io.load_documents(_path(args, config, "documents"))
    relevance = LinearRelevanceScorer(load_model(_path(args, config, "relevance_model")), provider)
    redundancy = LinearRedundancyScorer(load_model(_path(args, config, "redundancy_model")), provider)
    frames, traces, errors = aggregate_corpus(
        docs, relevance, redundancy, provider, config.sieve, fail_fast=config.fail_fast
    )
    corpus_io.write_frames(frames, _path(args, config, "frames", "out_frames"))
    trace_path = args.trace or config.paths.get("trace")
    if trace_path:
        records = [
            {
                "doc_id": e.doc_id,
                "mention_id": e.mention_id,
                "disposition": e.disposition,
                "score": e.score,
            }
            for t in traces
            for e in t.entries
        ]
        corpus_io.write_jsonl(records, trace_path)
    for doc_id, exc in errors:
        print(f"error in {doc_id}: {exc}", file=sys.stderr)
    print(f"aggregated {len(frames)} documents")
    return EXIT_OK if not errors else EXIT_DATA


def cmd_baseline(args) -> int:
    config = _load_run_config(args)
    provider = EmbeddingProvider(config.provider)
    docs = corpus_io.load_documents(_path(args, config, "documents"))
    frames = run_topk_baseline(docs, provider, config.sieve, args.k, args.method == "biased")
    corpus_io.write_frames(frames, _path(args, config, "frames", "out_frames"))
    print(f"{args.method}@{args.k} baseline: {len(frames)} frames")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    config = _load_run_config(args)
    preds = corpus_io.load_gold_frames(args.pred)
    golds = corpus_io.load_gold_frames(args.gold)
    report = score_corpus(preds, golds)
    print(format_report(report))
    report_path = args.report or config.paths.get("report")
    if report_path:
        Path(report_path).write_text(
            json.dumps(report_to_json(report), sort_keys=True, indent=2) + "\n",
            encoding="utf-8",
        )
    return EXIT_OK


def cmd_rank_dump(args) -> int:
    config = _load_run_config(args)
    provider = EmbeddingProvider(config.provider)
    docs = corpus_io.load_documents(_path(args, config, "documents"))
    records = []
    for doc in docs:
        by_type = mentions_by_type(doc)
        for t in ALL_TYPES:
            mentions = by_type[t]
            if not mentions:
                continue
            graph = build_graph(mentions, provider)
            bias = compute_bias(mentions, build_bias_text(t, doc, config.sieve), provider)
            result = biased_textrank(graph, bias, config.sieve.rank_config)
            records.append(
                {
                    "doc_id": doc.doc_id,
                    "arg_type": t.value,
                    "scores": {
                        m.mention_id: float(s) for m, s in zip(mentions, result.scores)
                    },
                }
            )
    corpus_io.write_jsonl(records, _path(args, config, "scores", "out"))
    print(f"dumped scores for {len(records)} (doc, type) groups")
    return EXIT_OK


def cmd_al_select(args) -> int:
    config = _load_run_config(args)
    provider = EmbeddingProvider(config.provider)
    docs = corpus_io.load_documents(_path(args, config, "documents"))
    model = load_model(_path(args, config, "redundancy_model", "model"))
    pool_pairs = _load_pool_pairs(_path(args, config, "pairs_pool", "pool"))
    examples = build_pair_examples(docs, pool_pairs, provider)
    pool = Pool(unlabeled={p.pair_id: fv for p, (fv, _) in zip(pool_pairs, examples)})
    selected = select_batch(model, pool, config.al, config.train)
    for pid in selected:
        print(pid)
    return EXIT_OK


def _load_pool_pairs(path):
    records = []
    for lineno, obj in corpus_io._iter_jsonl(path):
        records.append(
            corpus_io.LabeledPair(
                pair_id=obj["pair_id"],
                doc_id=obj["doc_id"],
                mention_a=obj["mention_a"],
                mention_b=obj["mention_b"],
                label=int(obj.get("label", 0)),
            )
        )
    return records


def cmd_al_serve(args) -> int:
    import uvicorn

    from .server import AnnotationSession, create_app

    config = _load_run_config(args)
    provider = EmbeddingProvider(config.provider)
    docs = corpus_io.load_documents(_path(args, config, "documents"))
    pool_pairs = _load_pool_pairs(_path(args, config, "pairs_pool", "pool"))
    seed_labels = corpus_io.load_pair_labels(_path(args, config, "seed_labels"))
    dev_labels = corpus_io.load_pair_labels(_path(args, config, "dev_labels"))
    session = AnnotationSession(
        docs=docs,
        pool_pairs=pool_pairs,
        seed_labels=seed_labels,
        dev_labels=dev_labels,
        provider=provider,
        train_config=config.train,
        al_config=config.al,
        session_path=_path(args, config, "session", required=False),
    )
    app = create_app(session, static_dir=args.static_dir)
    host, _, port = args.bind.rpartition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port), log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="argsieve", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate-synthetic", help="generate a planted-label synthetic corpus")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--n-docs", type=int, default=50)
    p.add_argument("--redundancy-rate", type=float, default=0.5)
    p.add_argument("--irrelevance-rate", type=float, default=0.35)
    p.add_argument("--multi-cluster-rate", type=float, default=0.25)
    p.add_argument("--config")
    p.set_defaults(func=cmd_generate_synthetic)

    p = sub.add_parser("train", help="train the relevance or redundancy filter")
    p.add_argument("--target", choices=["relevance", "redundancy"], required=True)
    p.add_argument("--documents")
    p.add_argument("--labels")
    p.add_argument("--dev-labels", dest="dev_labels")
    p.add_argument("--out-model", dest="out_model")
    p.add_argument("--config")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("aggregate", help="render information frames for a corpus")
    p.add_argument("--documents")
    p.add_argument("--relevance-model", dest="relevance_model")
    p.add_argument("--redundancy-model", dest="redundancy_model")
    p.add_argument("--out-frames", dest="out_frames")
    p.add_argument("--trace")
    p.add_argument("--config")
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("baseline", help="top-k ranking baseline frames")
    p.add_argument("--method", choices=["textrank", "biased"], required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--documents")
    p.add_argument("--out-frames", dest="out_frames")
    p.add_argument("--config")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("evaluate", help="score predicted frames against gold")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--report")
    p.add_argument("--config")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("rank-dump", help="dump biased ranking scores per document and type")
    p.add_argument("--documents")
    p.add_argument("--out")
    p.add_argument("--config")
    p.set_defaults(func=cmd_rank_dump)

    p = sub.add_parser("al-select", help="print the next uncertain batch of pair ids")
    p.add_argument("--documents")
    p.add_argument("--model")
    p.add_argument("--pool")
    p.add_argument("--config")
    p.set_defaults(func=cmd_al_select)

    p = sub.add_parser("al-serve", help="run the annotation HTTP service")
    p.add_argument("--bind", default="127.0.0.1:8731")
    p.add_argument("--documents")
    p.add_argument("--pool")
    p.add_argument("--seed-labels", dest="seed_labels")
    p.add_argument("--dev-labels", dest="dev_labels")
    p.add_argument("--session")
    p.add_argument("--static-dir", dest="static_dir")
    p.add_argument("--config")
    p.set_defaults(func=cmd_al_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # anything else is a runtime failure
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
