"""Cross-package conformance: the exporter's files and text rules must
match the engine exactly. The engine package is a test dependency only;
the exporter itself never imports it."""

import warnings

import pytest

import bosexport.text as exporter_text
from bosexport.export import ExportJob, export

import bostopics

from test_export import TEN_DOCS, write_raw

SHARED_SENTENCES = [
    "The market rallied on Tuesday.",
    "Analysts were surprised.",
    "Dr. Lee disagreed with the consensus.",
    "A second wave followed!",
    "Was it sustainable?",
    "Nobody could tell.",
    "Trading volume hit records.",
]

SHARED_TEXTS = [
    "A fish eats you. You eat a fish.",
    "Dr. Smith left. He ran. Nobody followed!",
    "One sentence without terminator",
    "Really?! Two in a row. Mr. Big said no. e.g. this stays attached.",
    "",
    "   ",
    "Numbers 123 and RTX-2080 mix; punctuation? Yes.",
]


class TestTextRuleConformance:
    @pytest.mark.parametrize("text", SHARED_TEXTS)
    def test_sentence_splitting_matches_engine(self, text):
        assert exporter_text.split_sentences(text) == bostopics.split_sentences(text)

    @pytest.mark.parametrize("text", SHARED_TEXTS + SHARED_SENTENCES)
    def test_tokenization_matches_engine(self, text):
        assert exporter_text.tokenize_words(text) == bostopics.tokenize_words(text)

    @pytest.mark.parametrize("size", [1, 2, 3, 5, 9])
    def test_group_partition_matches_engine(self, size):
        assert exporter_text.group_sentences(
            SHARED_SENTENCES, size
        ) == bostopics.group_sentences(SHARED_SENTENCES, size)


class TestEngineRoundTrip:
    def test_exported_fixture_loads_cleanly(self, tmp_path):
        # release criterion: a 10-document export loads into the engine
        # with zero warnings and the partitions agree exactly
        raw = tmp_path / "raw.jsonl"
        write_raw(raw, TEN_DOCS)
        job = ExportJob(
            input_path=str(raw),
            output_prefix=str(tmp_path / "out"),
            encoder_name="hash:32",
            sentences_per_group=3,
        )
        report = export(job)

        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            corpus = bostopics.load_corpus(report.paths["corpus"])
            matrix = bostopics.read_embeddings(report.paths["embeddings"])
        assert caught == []

        assert corpus.total_groups() == matrix.n_rows == report.n_groups
        assert [d.doc_id for d in corpus.documents] == [d[0] for d in TEN_DOCS]
        assert [d.label for d in corpus.documents] == [d[2] for d in TEN_DOCS]

        # group boundaries equal the engine's own partition of the same
        # sentence lists
        for doc_id, text, _ in TEN_DOCS:
            sentences = bostopics.split_sentences(text)
            expected = bostopics.group_sentences(
                [bostopics.tokenize_words(s) for s in sentences], 3
            )
            doc = corpus.documents[corpus.document_index(doc_id)]
            actual = [
                [[corpus.vocabulary.word_of(w) for w in s] for s in g.sentences]
                for g in doc.groups
            ]
            assert actual == expected
        print("[PASS] exporter round-trip: engine loads both files, partitions match")

    def test_exported_files_are_fittable(self, tmp_path):
        raw = tmp_path / "raw.jsonl"
        write_raw(raw, TEN_DOCS)
        report = export(
            ExportJob(str(raw), str(tmp_path / "out"), "hash:32", sentences_per_group=2)
        )
        corpus = bostopics.load_corpus(report.paths["corpus"])
        matrix = bostopics.read_embeddings(report.paths["embeddings"])
        state = bostopics.fit(corpus, matrix, bostopics.FitConfig(k=3, epochs=4, seed=0))
        assert state.topic_doc.shape == (10, 3)
        assert sum(len(a) for a in state.assignments) == report.n_groups
