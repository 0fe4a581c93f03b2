#!/usr/bin/env python3
"""Optional integration check on 20 Newsgroups (not part of the test suite).

Requires network access (dataset download via scikit-learn, encoder via
sentence-transformers) plus the exporter package, so it is shipped as a
script rather than a test. Expected outcome at k=50, alpha=2, n_s=3: NMI
against the 20 ground-truth classes in roughly [0.40, 0.55].

Usage:
    python scripts/eval_20news.py --workdir /tmp/news20 [--encoder NAME]
"""

import argparse
import json
import subprocess
import sys
import tempfile
from pathlib import Path


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workdir", default=None)
    parser.add_argument(
        "--encoder", default="paraphrase-multilingual-MiniLM-L12-v2"
    )
    parser.add_argument("--k", type=int, default=50)
    parser.add_argument("--alpha", type=float, default=2.0)
    parser.add_argument("--ns", type=int, default=3)
    args = parser.parse_args()

    workdir = Path(args.workdir or tempfile.mkdtemp(prefix="news20-"))
    workdir.mkdir(parents=True, exist_ok=True)
    raw = workdir / "raw.jsonl"

    if not raw.exists():
        from sklearn.datasets import fetch_20newsgroups

        print("downloading 20 Newsgroups ...")
        bundle = fetch_20newsgroups(
            subset="all", remove=("headers", "footers", "quotes")
        )
        with open(raw, "w", encoding="utf-8") as fh:
            for i, (text, target) in enumerate(zip(bundle.data, bundle.target)):
                if not text.strip():
                    continue
                fh.write(
                    json.dumps(
                        {
                            "doc_id": f"doc{i:06d}",
                            "text": text,
                            "label": bundle.target_names[target],
                        }
                    )
                    + "\n"
                )

    prefix = workdir / "news20"
    print("exporting corpus and embeddings ...")
    subprocess.run(
        [
            sys.executable, "-m", "bosexport", "export",
            "--input", str(raw), "--encoder", args.encoder,
            "--ns", str(args.ns), "--out-prefix", str(prefix),
        ],
        check=True,
    )

    model_dir = workdir / f"model-k{args.k}"
    print("fitting ...")
    subprocess.run(
        [
            sys.executable, "-m", "bostopics", "fit",
            "--corpus", f"{prefix}.corpus.jsonl",
            "--embeddings", f"{prefix}.embeddings.bose",
            "--k", str(args.k), "--alpha", str(args.alpha),
            "--out", str(model_dir),
        ],
        check=True,
    )

    result = subprocess.run(
        [
            sys.executable, "-m", "bostopics", "eval-nmi",
            "--model", str(model_dir), "--corpus", f"{prefix}.corpus.jsonl",
        ],
        check=True,
        capture_output=True,
        text=True,
    )
    report = json.loads(result.stdout)
    print(f"NMI vs 20 classes: {report['value']:.4f} (expected ~0.40-0.55)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
