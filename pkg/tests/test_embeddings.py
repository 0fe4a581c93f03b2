import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bostopics.embeddings import (
    EmbeddingMatrix,
    cosine,
    read_embeddings,
    unit_normalize,
    write_embeddings,
)
from bostopics.errors import FormatError, ValidationError

from conftest import random_embeddings


class TestBinaryFormat:
    def test_round_trip_bitwise(self, tmp_path):
        matrix = random_embeddings(3, 4, seed=7)
        path = tmp_path / "m.bose"
        write_embeddings(matrix, path)
        loaded = read_embeddings(path)
        assert loaded.rows.tobytes() == matrix.rows.tobytes()
        assert loaded.dim == 4 and loaded.n_rows == 3

    def test_truncated_payload(self, tmp_path):
        matrix = random_embeddings(4, 5)
        path = tmp_path / "m.bose"
        write_embeddings(matrix, path)
        data = path.read_bytes()
        path.write_bytes(data[:-6])
        with pytest.raises(FormatError, match="truncated"):
            read_embeddings(path)

    def test_bad_magic(self, tmp_path):
        matrix = random_embeddings(2, 2)
        path = tmp_path / "m.bose"
        write_embeddings(matrix, path)
        data = bytearray(path.read_bytes())
        data[:4] = b"NOPE"
        path.write_bytes(bytes(data))
        with pytest.raises(FormatError, match="magic"):
            read_embeddings(path)

    def test_zero_row_rejected_naming_index(self, tmp_path):
        rows = np.ones((3, 2), dtype=np.float32)
        rows[1] = 0.0
        path = tmp_path / "m.bose"
        write_embeddings(EmbeddingMatrix(rows), path)
        with pytest.raises(ValidationError, match="row 1"):
            read_embeddings(path)

    def test_nan_rejected(self, tmp_path):
        rows = np.ones((2, 2), dtype=np.float32)
        rows[0, 1] = np.nan
        path = tmp_path / "m.bose"
        write_embeddings(EmbeddingMatrix(rows), path)
        with pytest.raises(ValidationError, match="NaN|Inf"):
            read_embeddings(path)

    def test_header_too_short(self, tmp_path):
        path = tmp_path / "m.bose"
        path.write_bytes(b"BO")
        with pytest.raises(FormatError):
            read_embeddings(path)

    @given(
        arrays(
            np.float32,
            st.tuples(st.integers(1, 6), st.integers(1, 5)),
            elements=st.floats(
                min_value=-1e6, max_value=1e6, allow_nan=False, width=32
            ),
        )
    )
    @settings(max_examples=60, deadline=None)
    def test_round_trip_property(self, rows):
        import tempfile
        from pathlib import Path

        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "m.bose"
            write_embeddings(EmbeddingMatrix(rows), path)
            with open(path, "rb") as fh:
                header = fh.read(20)
                payload = fh.read()
        assert header[:4] == b"BOSE"
        assert payload == rows.astype("<f4").tobytes()


class TestCosine:
    def test_identity(self):
        v = np.array([0.3, -1.2, 4.0])
        assert cosine(v, v) == 1.0

    def test_orthogonal(self):
        assert cosine([1.0, 0.0], [0.0, 1.0]) == 0.0

    def test_scale_invariance(self):
        assert cosine([1.0, 1.0], [2.0, 2.0]) == pytest.approx(1.0, abs=1e-12)

    def test_symmetric_bitwise(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            a = rng.normal(size=6)
            b = rng.normal(size=6)
            assert cosine(a, b) == cosine(b, a)

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError, match="mismatch"):
            cosine([1.0, 0.0], [1.0, 0.0, 0.0])

    def test_zero_vector(self):
        with pytest.raises(ValidationError):
            cosine([0.0, 0.0], [1.0, 0.0])

    @given(st.floats(min_value=1e-3, max_value=1e3))
    def test_positive_scaling_of_one_side(self, c):
        a = np.array([0.5, -0.25, 1.0])
        b = np.array([-1.0, 2.0, 0.75])
        assert cosine(a, c * b) == pytest.approx(cosine(a, b), abs=1e-6)


class TestUnitNormalize:
    def test_three_four_five(self):
        out = unit_normalize(EmbeddingMatrix(np.array([[3.0, 4.0]], dtype=np.float32)))
        assert np.allclose(out.rows, [[0.6, 0.8]], atol=1e-7)

    def test_idempotent(self):
        matrix = random_embeddings(5, 3, seed=11)
        once = unit_normalize(matrix)
        twice = unit_normalize(once)
        assert np.max(np.abs(once.rows - twice.rows)) < 1e-7

    def test_norms_are_one(self):
        out = unit_normalize(random_embeddings(20, 9, seed=2))
        norms = np.linalg.norm(out.rows.astype(np.float64), axis=1)
        assert np.max(np.abs(norms - 1.0)) < 1e-6

    def test_zero_row_rejected(self):
        rows = np.ones((2, 3), dtype=np.float32)
        rows[0] = 0.0
        with pytest.raises(ValidationError, match="row 0"):
            unit_normalize(EmbeddingMatrix(rows))

    def test_cosine_reduces_to_dot_product(self):
        # double-computation oracle: raw cosine vs dot of normalized rows
        matrix = random_embeddings(10, 8, seed=5)
        unit = unit_normalize(matrix)
        for i in range(10):
            for j in range(10):
                direct = cosine(matrix.rows[i], matrix.rows[j])
                via_dot = float(
                    unit.rows[i].astype(np.float64) @ unit.rows[j].astype(np.float64)
                )
                assert abs(direct - via_dot) < 1e-6
