import json

import pytest

from enmf.io import (
    InputError, cope_to_json, digest, fixture_cope, fixture_matrix, fixture_names, read_cope,
    read_matrix,
)
from enmf.matrix import CopeValidationError, Matrix


def test_fixture_listing():
    names = fixture_names()
    for n in ("pentagon", "boxworld", "identity4", "appendix_d", "appendix_e",
              "pentagon_geometry"):
        assert n in names


def test_csv_with_blocks(tmp_path, exact):
    p = tmp_path / "box.csv"
    p.write_text("# blocks: 2,2\n1,1,0,0\n0,0,1,1\n1,0,1,0\n0,1,0,1\n")
    c = read_cope(p, exact)
    assert c.block_heights == (2, 2) and c.l == 2


def test_csv_scalar_grammar(tmp_path, exact):
    p = tmp_path / "m.csv"
    p.write_text("(1/2)+(1/2)*sqrt(5), 1\n0, 1/3\n")
    m = read_matrix(str(p), exact)
    assert m[0, 0] == exact.parse("(1/2)+(1/2)*sqrt(5)") and m[1, 1] == exact.parse("1/3")


def test_json_error_location(tmp_path, exact):
    p = tmp_path / "bad.json"
    p.write_text('{"entries": [["1", "0"],\n ["0" "1"]]}')
    with pytest.raises(InputError, match="line 2"):
        read_cope(p, exact)


def test_entry_error_location(tmp_path, exact):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"entries": [["1", "0"], ["0", "one"]]}))
    with pytest.raises(InputError, match="row 2, column 2"):
        read_cope(p, exact)


def test_ragged_rows(tmp_path, exact):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"entries": [["1", "0"], ["0"]]}))
    with pytest.raises(InputError, match="row 2"):
        read_matrix(str(p), exact)


def test_validation_error_names_block(tmp_path, exact):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"block_heights": [2, 2],
                             "entries": [["1", "1"], ["0", "0"], ["1", "1"], ["1", "0"]]}))
    with pytest.raises(CopeValidationError) as e:
        read_cope(p, exact)
    assert e.value.kind in ("zero_row", "stochastic")


def test_radicand_mismatch(tmp_path, exact):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"radicand": 2, "entries": [["1"]]}))
    with pytest.raises(InputError, match="radicand"):
        read_cope(p, exact)


def test_bundle_key(exact):
    a1 = fixture_matrix("appendix_e", "A1", exact)
    assert a1.shape == (5, 5)
    with pytest.raises(InputError, match="no matrix named"):
        fixture_matrix("appendix_e", "nope", exact)


def test_missing_file(exact):
    with pytest.raises(InputError):
        read_cope("/nonexistent/file.json", exact)


def test_cope_json_round_trip(tmp_path, field):
    c = fixture_cope("pentagon", field)
    p = tmp_path / "out.json"
    p.write_text(json.dumps(cope_to_json(c, "x")))
    back = read_cope(p, field)
    assert back.data == c.data and back.block_heights == c.block_heights


def test_digest_stable(exact):
    m = Matrix([[1, 2], [3, 4]], exact)
    assert digest(m) == digest(Matrix([[1, 2], [3, 4]], exact))
    assert digest(m) != digest(m.T)
    assert len(digest(m)) == 16
