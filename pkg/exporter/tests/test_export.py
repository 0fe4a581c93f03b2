import json

import numpy as np
import pytest

from bosexport.bose import BoseFormatError, read_matrix, write_matrix
from bosexport.encoders import HashingEncoder, get_encoder
from bosexport.export import ExportError, ExportJob, export, verify


def write_raw(path, docs):
    with open(path, "w", encoding="utf-8") as fh:
        for doc_id, text, label in docs:
            record = {"doc_id": doc_id, "text": text}
            if label is not None:
                record["label"] = label
            fh.write(json.dumps(record) + "\n")


TEN_DOCS = [
    (
        f"doc{i}",
        f"Topic {i} starts here. It has a few sentences. "
        f"Sentence number three follows. Dr. Who appears in doc {i}. "
        f"The last one is short.",
        f"class{i % 3}",
    )
    for i in range(10)
]


@pytest.fixture
def exported(tmp_path):
    raw = tmp_path / "raw.jsonl"
    write_raw(raw, TEN_DOCS)
    job = ExportJob(
        input_path=str(raw),
        output_prefix=str(tmp_path / "out"),
        encoder_name="hash:32",
        sentences_per_group=3,
    )
    report = export(job)
    return job, report


class TestHashingEncoder:
    def test_deterministic(self):
        enc = HashingEncoder(16)
        a = enc.encode(["some text here", "other text"])
        b = enc.encode(["some text here", "other text"])
        assert a.tobytes() == b.tobytes()

    def test_unit_rows_nonzero(self):
        enc = HashingEncoder(8)
        out = enc.encode(["hello world", "", "!!!"])
        norms = np.linalg.norm(out.astype(np.float64), axis=1)
        assert np.allclose(norms, 1.0, atol=1e-6)
        assert np.all(np.any(out != 0.0, axis=1))

    def test_get_encoder_parses_hash_names(self):
        enc = get_encoder("hash:24")
        assert enc.dim == 24
        assert enc.name == "hash:24"


class TestExport:
    def test_counts_consistent(self, exported):
        _, report = exported
        assert report.n_docs == 10
        corpus_groups = 0
        with open(report.paths["corpus"], encoding="utf-8") as fh:
            for line in fh:
                corpus_groups += len(json.loads(line)["groups"])
        matrix = read_matrix(report.paths["embeddings"])
        assert corpus_groups == report.n_groups == matrix.shape[0]
        assert matrix.shape[1] == 32

    def test_manifest_schema(self, exported):
        _, report = exported
        with open(report.paths["manifest"], encoding="utf-8") as fh:
            manifest = json.load(fh)
        assert set(manifest) == {"encoder", "dim", "n_s", "n_docs", "n_groups", "sha256"}
        assert manifest["encoder"] == "hash:32"
        assert manifest["n_s"] == 3
        assert manifest["n_docs"] == 10

    def test_repeat_export_is_identical(self, tmp_path):
        raw = tmp_path / "raw.jsonl"
        write_raw(raw, TEN_DOCS)
        reports = []
        for name in ("a", "b"):
            job = ExportJob(
                input_path=str(raw),
                output_prefix=str(tmp_path / name),
                encoder_name="hash:32",
            )
            reports.append(export(job))
        first, second = reports
        for key in ("corpus", "embeddings"):
            with open(first.paths[key], "rb") as fa, open(second.paths[key], "rb") as fb:
                assert fa.read() == fb.read()

    def test_single_sentence_doc_single_partial_group(self, tmp_path):
        raw = tmp_path / "raw.jsonl"
        write_raw(raw, [("solo", "Just one sentence here.", None)])
        report = export(
            ExportJob(str(raw), str(tmp_path / "out"), "hash:8", sentences_per_group=3)
        )
        assert report.n_groups == 1
        with open(report.paths["corpus"], encoding="utf-8") as fh:
            record = json.loads(fh.readline())
        assert len(record["groups"]) == 1
        assert len(record["groups"][0]) == 1

    def test_empty_doc_skipped_with_warning(self, tmp_path, capsys):
        raw = tmp_path / "raw.jsonl"
        write_raw(raw, [("empty", "   ", None), ("ok", "One sentence.", None)])
        report = export(ExportJob(str(raw), str(tmp_path / "out"), "hash:8"))
        assert report.skipped_docs == ["empty"]
        assert report.n_docs == 1
        assert "skipping" in capsys.readouterr().err

    def test_mean_of_sentences_mode(self, tmp_path):
        raw = tmp_path / "raw.jsonl"
        write_raw(raw, [("d", "First sentence. Second sentence. Third one.", None)])
        encoder = HashingEncoder(16)
        report = export(
            ExportJob(
                str(raw), str(tmp_path / "out"), "hash:16",
                sentences_per_group=3, mean_of_sentences=True,
            ),
            encoder=encoder,
        )
        matrix = read_matrix(report.paths["embeddings"])
        sentences = ["First sentence.", "Second sentence.", "Third one."]
        expected = encoder.encode(sentences).mean(axis=0, dtype=np.float64)
        assert np.allclose(matrix[0], expected.astype(np.float32), atol=1e-7)

    def test_bad_input_rejected(self, tmp_path):
        raw = tmp_path / "raw.jsonl"
        raw.write_text('{"doc_id": "a"}\n')
        with pytest.raises(ExportError, match="line 1"):
            export(ExportJob(str(raw), str(tmp_path / "out"), "hash:8"))

    def test_duplicate_doc_id_rejected(self, tmp_path):
        raw = tmp_path / "raw.jsonl"
        write_raw(raw, [("a", "One.", None), ("a", "Two.", None)])
        with pytest.raises(ExportError, match="duplicate"):
            export(ExportJob(str(raw), str(tmp_path / "out"), "hash:8"))


class TestVerify:
    def test_fresh_export_passes(self, exported):
        job, report = exported
        summary = verify(job.output_prefix)
        assert summary["n_docs"] == 10
        assert summary["n_groups"] == report.n_groups
        assert summary["encoder"] == "hash:32"

    def test_truncated_embeddings_fail(self, exported):
        job, report = exported
        path = report.paths["embeddings"]
        data = open(path, "rb").read()
        open(path, "wb").write(data[:-4])
        with pytest.raises(ExportError, match="truncated"):
            verify(job.output_prefix)

    def test_tampered_manifest_hash_fails(self, exported):
        job, report = exported
        with open(report.paths["manifest"], encoding="utf-8") as fh:
            manifest = json.load(fh)
        manifest["sha256"] = "0" * 64
        with open(report.paths["manifest"], "w", encoding="utf-8") as fh:
            json.dump(manifest, fh)
        with pytest.raises(ExportError, match="hash"):
            verify(job.output_prefix)

    def test_count_mismatch_fails(self, exported, tmp_path):
        job, report = exported
        rows = read_matrix(report.paths["embeddings"])
        write_matrix(rows[:-1], report.paths["embeddings"])
        with pytest.raises(ExportError, match="mismatch"):
            verify(job.output_prefix)


class TestCli:
    def test_export_then_verify(self, tmp_path, capsys):
        from bosexport.cli import main

        raw = tmp_path / "raw.jsonl"
        write_raw(raw, TEN_DOCS)
        assert main(
            [
                "export", "--input", str(raw), "--encoder", "hash:16",
                "--ns", "2", "--out-prefix", str(tmp_path / "x"),
            ]
        ) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["n_docs"] == 10
        assert main(["verify", "--prefix", str(tmp_path / "x")]) == 0
        assert json.loads(capsys.readouterr().out)["status"] == "ok"

    def test_verify_missing_prefix_exit_1(self, tmp_path, capsys):
        from bosexport.cli import main

        assert main(["verify", "--prefix", str(tmp_path / "none")]) == 1
        assert "error" in capsys.readouterr().err
