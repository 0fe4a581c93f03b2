"""Command-line interface: fit, inspect, and evaluate topic models.

All subcommands write structured JSON to stdout (human-readable tables
are opt-in), touch nothing outside their --out paths, and use stable exit
codes: 0 success, 1 runtime or data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import shutil
import sys
import time
from pathlib import Path

from . import em, metrics, scoring, synth
from .corpus import load_corpus
from .embeddings import read_embeddings
from .errors import BosError

THREADS_ENV_VAR = "BOS_THREADS"


class UsageError(Exception):
    """A statically invalid flag combination (exit code 2)."""


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _nonneg_float(text: str) -> float:
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def resolve_threads(flag_value: int | None) -> int:
    if flag_value is not None:
        return flag_value
    env = os.environ.get(THREADS_ENV_VAR)
    if env:
        try:
            value = int(env)
        except ValueError as exc:
            raise UsageError(f"{THREADS_ENV_VAR} must be an integer, got {env!r}") from exc
        if value < 1:
            raise UsageError(f"{THREADS_ENV_VAR} must be >= 1, got {value}")
        return value
    return os.cpu_count() or 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bostopics",
        description="Bag-of-sentences topic modeling over sentence-group embeddings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit a topic model and write a model directory")
    p_fit.add_argument("--corpus", required=True)
    p_fit.add_argument("--embeddings", required=True)
    p_fit.add_argument("--k", type=_positive_int, default=50)
    p_fit.add_argument("--alpha", type=_nonneg_float, default=2.0)
    p_fit.add_argument("--ns", type=_positive_int, default=3,
                       help="sentences per group the corpus was built with")
    p_fit.add_argument("--epochs", type=_positive_int, default=10)
    p_fit.add_argument("--seed", type=_nonneg_int, default=0)
    p_fit.add_argument("--threads", type=_positive_int, default=None,
                       help=f"default: {THREADS_ENV_VAR} env var, then CPU count")
    p_fit.add_argument("--out", required=True)
    p_fit.set_defaults(handler=cmd_fit)

    p_topics = sub.add_parser("topics", help="print ranked words per topic")
    p_topics.add_argument("--model", required=True)
    p_topics.add_argument("--top", type=_positive_int, default=10)
    p_topics.add_argument("--format", choices=("json", "table"), default="json")
    p_topics.set_defaults(handler=cmd_topics)

    p_doc = sub.add_parser("doc-topics", help="per-document topic report")
    p_doc.add_argument("--model", required=True)
    p_doc.add_argument("--doc-id", required=True)
    p_doc.add_argument("--embeddings", default=None,
                       help="group embeddings; enables per-group affinity diagnostics")
    p_doc.set_defaults(handler=cmd_doc_topics)

    p_nmi = sub.add_parser("eval-nmi", help="clustering agreement with labels")
    p_nmi.add_argument("--model", required=True)
    p_nmi.add_argument("--corpus", required=True)
    p_nmi.set_defaults(handler=cmd_eval_nmi)

    p_coh = sub.add_parser("eval-coherence", help="NPMI coherence against a reference")
    p_coh.add_argument("--model", required=True)
    p_coh.add_argument("--corpus", required=True)
    p_coh.add_argument("--reference", required=True)
    p_coh.add_argument("--top", type=_positive_int, default=10)
    p_coh.set_defaults(handler=cmd_eval_coherence)

    p_synth = sub.add_parser("synth", help="generate a planted-topic synthetic dataset")
    p_synth.add_argument("--k", type=_positive_int, required=True)
    p_synth.add_argument("--docs", type=_positive_int, required=True)
    p_synth.add_argument("--groups-per-doc", type=_positive_int, required=True)
    p_synth.add_argument("--dim", type=_positive_int, required=True)
    p_synth.add_argument("--noise", type=_nonneg_float, default=0.0)
    p_synth.add_argument("--seed", type=_nonneg_int, default=0)
    p_synth.add_argument("--out-prefix", required=True)
    p_synth.set_defaults(handler=cmd_synth)

    return parser


def cmd_fit(args) -> int:
    threads = resolve_threads(args.threads)
    corpus = load_corpus(args.corpus)
    embeddings = read_embeddings(args.embeddings)
    config = em.FitConfig(
        k=args.k,
        alpha=args.alpha,
        sentences_per_group=args.ns,
        epochs=args.epochs,
        seed=args.seed,
    )
    out = Path(args.out)
    if out.exists():
        raise BosError(f"output path {out} already exists")

    started = time.perf_counter()
    state = em.fit(corpus, embeddings, config, threads=threads)
    fit_seconds = time.perf_counter() - started

    # Stage, then rename: an error part-way leaves no model directory.
    stage = out.with_name(out.name + f".tmp-{os.getpid()}")
    try:
        em.save_model(state, stage)
        counts = scoring.count_statistics(corpus, state.assignments, config.k)
        scoring.save_topics(scoring.score_topics(counts), stage / scoring.TOPICS_FILE)
        os.replace(stage, out)
    except BaseException:
        shutil.rmtree(stage, ignore_errors=True)
        raise
    print(
        json.dumps(
            {
                "model_dir": str(out),
                "fit_seconds": round(fit_seconds, 3),
                "final_smoothing": state.smoothing,
                "threads": threads,
            }
        )
    )
    return 0


def cmd_topics(args) -> int:
    records = scoring.load_topics(Path(args.model) / scoring.TOPICS_FILE)
    for record in records:
        record["words"] = record["words"][: args.top]
    if args.format == "json":
        for record in records:
            print(json.dumps(record, ensure_ascii=False))
        return 0
    width = max([len(w["w"]) for r in records for w in r["words"]] + [4])
    print(f"{'topic':>6}  {'word':<{width}}  {'score':>10}  {'count':>7}")
    for record in records:
        if not record["words"]:
            print(f"{record['topic']:>6}  {'-':<{width}}  {'-':>10}  {'-':>7}")
            continue
        for i, w in enumerate(record["words"]):
            label = str(record["topic"]) if i == 0 else ""
            print(f"{label:>6}  {w['w']:<{width}}  {w['score']:>10.4f}  {w['n_wt']:>7}")
    return 0


def cmd_doc_topics(args) -> int:
    state = em.load_model(args.model)
    try:
        doc_index = state.doc_ids.index(args.doc_id)
    except ValueError:
        raise BosError(f"unknown doc id {args.doc_id!r}") from None
    report = {
        "doc_id": args.doc_id,
        "topic_doc": [float(v) for v in state.topic_doc[doc_index]],
        "groups": [
            {"group": i, "topic": int(t)}
            for i, t in enumerate(state.assignments[doc_index])
        ],
    }
    if args.embeddings is not None:
        embeddings = read_embeddings(args.embeddings)
        total = int(sum(len(a) for a in state.assignments))
        if embeddings.n_rows != total:
            raise BosError(
                f"embeddings have {embeddings.n_rows} rows but the model "
                f"covers {total} groups"
            )
        for entry in report["groups"]:
            diag = em.group_posterior(state, embeddings, doc_index, entry["group"])
            entry["affinities"] = [float(v) for v in diag.products]
            entry["best_topic"] = diag.best_topic
            entry["posterior"] = diag.posterior
            entry["within_unit_interval"] = diag.within_unit_interval
    print(json.dumps(report))
    return 0


def _label_codes(labels: list[str]) -> list[int]:
    codes: dict[str, int] = {}
    return [codes.setdefault(label, len(codes)) for label in labels]


def cmd_eval_nmi(args) -> int:
    state = em.load_model(args.model)
    corpus = load_corpus(args.corpus)
    if [d.doc_id for d in corpus.documents] != state.doc_ids:
        raise BosError("corpus documents do not match the model's doc ids")
    labels = [d.label for d in corpus.documents]
    if any(label is None for label in labels):
        raise BosError("eval-nmi requires a label on every document")
    pred = metrics.doc_topic_labels(state)
    value = metrics.nmi(pred, _label_codes(labels))
    per_topic = [
        {"topic": t, "n_docs": int((pred == t).sum())} for t in range(state.k)
    ]
    print(json.dumps({"metric": "nmi", "value": value, "per_topic": per_topic}))
    return 0


def cmd_eval_coherence(args) -> int:
    state = em.load_model(args.model)
    corpus = load_corpus(args.corpus)
    if [d.doc_id for d in corpus.documents] != state.doc_ids:
        raise BosError("corpus documents do not match the model's doc ids")
    counts = scoring.count_statistics(corpus, state.assignments, state.k)
    scores = scoring.score_topics(counts)
    word_lists = [
        [w.word for w in scoring.top_words(scores, t, args.top)]
        for t in range(state.k)
    ]
    candidates = {w for words in word_lists for w in words}
    index = metrics.build_reference_index(args.reference, candidates)
    result = metrics.npmi_coherence(word_lists, index)
    per_topic = [
        {
            "topic": t,
            "npmi": result.per_topic[t],
            "n_words": len(word_lists[t]),
            "skipped": t in result.skipped,
        }
        for t in range(state.k)
    ]
    print(
        json.dumps(
            {"metric": "npmi_coherence", "value": result.overall, "per_topic": per_topic}
        )
    )
    return 0


def cmd_synth(args) -> int:
    if args.k > args.dim:
        raise UsageError(f"--k ({args.k}) must not exceed --dim ({args.dim})")
    data = synth.generate(
        k=args.k,
        docs=args.docs,
        groups_per_doc=args.groups_per_doc,
        dim=args.dim,
        noise=args.noise,
        seed=args.seed,
    )
    paths = synth.write(data, args.out_prefix)
    print(
        json.dumps(
            {
                **paths,
                "n_docs": len(data.corpus.documents),
                "n_groups": data.corpus.total_groups(),
                "dim": data.embeddings.dim,
            }
        )
    )
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (BosError, FileNotFoundError, NotADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
