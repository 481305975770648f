import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from matphi.mmio import MatrixParseError, read_csv, read_matrix, read_mtx, write_mtx

doubles = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 6)).map(lambda t: (t[0], t[0])), elements=doubles))
def test_round_trip_bit_identical(tmp_path_factory, a):
    path = tmp_path_factory.mktemp("mm") / "a.mtx"
    write_mtx(path, a)
    b = read_mtx(path)
    assert b.dtype == np.float64
    assert a.tobytes() == b.tobytes() or np.array_equal(a, b)  # +0.0 / -0.0 aside
    assert np.array_equal(np.signbit(a), np.signbit(b))


def test_complex_round_trip(tmp_path, rng):
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    write_mtx(tmp_path / "c.mtx", a, comment="complex")
    assert np.array_equal(read_mtx(tmp_path / "c.mtx"), a)


def write(tmp_path, text, name="x.mtx"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_coordinate_symmetric(tmp_path):
    p = write(tmp_path, "%%MatrixMarket matrix coordinate real symmetric\n% c\n3 3 3\n1 1 2\n3 1 -1\n2 2 4\n")
    a = read_mtx(p)
    assert np.array_equal(a, [[2, 0, -1], [0, 4, 0], [-1, 0, 0]])


def test_skew_and_hermitian(tmp_path):
    p = write(tmp_path, "%%MatrixMarket matrix coordinate integer skew-symmetric\n2 2 1\n2 1 5\n")
    assert np.array_equal(read_mtx(p), [[0, -5], [5, 0]])
    p = write(tmp_path, "%%MatrixMarket matrix coordinate complex hermitian\n2 2 2\n1 1 1 0\n2 1 0 1\n")
    assert np.array_equal(read_mtx(p), [[1, -1j], [1j, 0]])


def test_array_symmetric(tmp_path):
    p = write(tmp_path, "%%MatrixMarket matrix array real symmetric\n2 2\n1\n2\n3\n")
    assert np.array_equal(read_mtx(p), [[1, 2], [2, 3]])


@pytest.mark.parametrize(
    "text,line,column",
    [
        ("hello\n", 1, 1),
        ("%%MatrixMarket matrix array real general\n2 3\n" + "1\n" * 6, 2, None),
        ("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 abc\n", 3, 3),
        ("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n", 3, 1),
        ("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n", 5, None),
        ("%%MatrixMarket matrix array pattern general\n2 2\n", 1, 4),
        ("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\nnan\n", None, None),
    ],
)
def test_parse_errors_located(tmp_path, text, line, column):
    with pytest.raises(MatrixParseError) as info:
        read_mtx(write(tmp_path, text))
    assert info.value.line == line
    assert info.value.column == column
    rec = info.value.record()
    assert rec["error"] == "parse" and rec["line"] == line


def test_csv(tmp_path):
    p = write(tmp_path, "1,2\n3,4\n", "a.csv")
    assert np.array_equal(read_matrix(p), [[1, 2], [3, 4]])
    with pytest.raises(MatrixParseError):
        read_csv(write(tmp_path, "1,2,3\n4,5,6\n", "b.csv"))
    with pytest.raises(MatrixParseError):
        read_csv(write(tmp_path, "1,x\n3,4\n", "c.csv"))
    with pytest.raises(ValueError):
        read_matrix(p, "xlsx")
