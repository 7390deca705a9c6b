import io
import json

import numpy as np
import pytest

from src.data.storage import (
    MatrixFile,
    dumps,
    format_complex,
    load_matrix,
    loads,
    parse_complex,
    save_matrix,
)
from src.utils.errors import InvalidMatrix


def test_parse_complex():
    assert parse_complex("1+2i") == 1 + 2j
    assert parse_complex(" -0.5i ") == -0.5j
    assert parse_complex("3") == 3
    assert parse_complex("1 - 2j") == 1 - 2j
    with pytest.raises(InvalidMatrix):
        parse_complex("abc")


def test_format_complex():
    assert format_complex(1 + 2j) == "1.0+2.0i"
    assert format_complex(0.5 - 1.5j) == "0.5-1.5i"


def test_format_complex_numpy_scalars():
    assert format_complex(np.complex128(0.25 + 1j)) == "0.25+1.0i"
    assert format_complex(np.complex128(-1.5 - 2j)) == "-1.5-2.0i"
    A = np.array([[0.25 + 1j, -1.5], [0, 2j]])
    text = dumps(A, "csv")
    assert "np." not in text
    assert np.array_equal(loads(text), A)


def test_loads_json():
    text = json.dumps({"rows": 1, "cols": 2, "data": [[1, 0], [0, -1]]})
    assert np.array_equal(loads(text), np.array([[1, -1j]]))


def test_loads_csv():
    M = loads("1,2i\n\n-1,0\n")
    assert np.array_equal(M, np.array([[1, 2j], [-1, 0]]))


@pytest.mark.parametrize(
    "text",
    [
        "",
        "1,2\n3\n",
        "1,nan\n",
        "1,x\n",
        '{"rows": 2, "cols": 2, "data": [[1, 0]]}',
        '{"rows": 1, "cols": 1, "data": [[1, 0, 0]]}',
        '{"rows": 1, "cols": 1, "data": [[1, 0]], "extra": 1}',
    ],
)
def test_loads_rejects(text):
    with pytest.raises(InvalidMatrix):
        loads(text)


def test_from_array_needs_two_dimensions():
    with pytest.raises(InvalidMatrix):
        MatrixFile.from_array(np.zeros(3))


def test_dumps_preserves_floats(rng):
    A = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    assert np.array_equal(loads(dumps(A)), A)
    assert np.array_equal(loads(dumps(A, "csv"), "csv"), A)


def test_save_and_load_files(tmp_path):
    A = np.array([[0, 1], [0, 0]], dtype=np.complex128)
    save_matrix(A, tmp_path / "t.json")
    save_matrix(A, tmp_path / "t.csv")
    assert (tmp_path / "t.csv").read_text().splitlines()[0] == "0.0+0.0i,1.0+0.0i"
    assert np.array_equal(load_matrix(tmp_path / "t.json"), A)
    assert np.array_equal(load_matrix(str(tmp_path / "t.csv")), A)


def test_standard_streams(capsys, monkeypatch):
    save_matrix(np.eye(2), "-")
    out = capsys.readouterr().out
    assert json.loads(out)["rows"] == 2
    monkeypatch.setattr("sys.stdin", io.StringIO(out))
    assert np.array_equal(load_matrix("-"), np.eye(2))


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_matrix(tmp_path / "missing.json")
