"""Command-line surface: export raw text, verify exported pairs."""

from __future__ import annotations

import argparse
import json
import sys

from .encoders import DEFAULT_ENCODER
from .export import ExportError, ExportJob, export, verify


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bosexport",
        description="Turn raw-text JSONL into bag-of-sentences corpus "
        "and embedding files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_export = sub.add_parser("export", help="tokenize, group, encode, write")
    p_export.add_argument("--input", required=True,
                          help='JSONL with {"doc_id", "text", optional "label"}')
    p_export.add_argument("--out-prefix", required=True)
    p_export.add_argument("--encoder", default=DEFAULT_ENCODER,
                          help="sentence-transformers model name, or hash:<dim> "
                          "for the offline hashing encoder")
    p_export.add_argument("--ns", type=_positive_int, default=3,
                          help="sentences per group")
    p_export.add_argument("--batch-size", type=_positive_int, default=64)
    p_export.add_argument("--mean-of-sentences", action="store_true",
                          help="encode sentences individually and average, "
                          "for groups exceeding the encoder context")
    p_export.set_defaults(handler=cmd_export)

    p_verify = sub.add_parser("verify", help="re-check an exported pair")
    p_verify.add_argument("--prefix", required=True)
    p_verify.set_defaults(handler=cmd_verify)
    return parser


def cmd_export(args) -> int:
    job = ExportJob(
        input_path=args.input,
        output_prefix=args.out_prefix,
        encoder_name=args.encoder,
        sentences_per_group=args.ns,
        batch_size=args.batch_size,
        mean_of_sentences=args.mean_of_sentences,
    )
    report = export(job)
    print(
        json.dumps(
            {
                **report.paths,
                "n_docs": report.n_docs,
                "n_groups": report.n_groups,
                "dim": report.dim,
                "skipped_docs": report.skipped_docs,
            }
        )
    )
    return 0


def cmd_verify(args) -> int:
    summary = verify(args.prefix)
    print(json.dumps({"status": "ok", **summary}))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ExportError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
