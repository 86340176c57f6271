"""
Tests for seed, y-value and matrix files.
"""

import json

import numpy as np
import pytest

from braid_classical import build_braid_matrix
from cluster_core import ClusterSeed, YSeed, generic_x_seed, mutate_seed
from root_of_unity import build_RK
from seed_loader import (
    complex_to_json,
    create_sample_files,
    load_json,
    load_matrix,
    load_seed,
    load_y_values,
    matrix_from_dict,
    matrix_to_dict,
    parse_complex,
    save_matrix,
    save_seed,
    seed_from_dict,
    seed_summary,
    seed_to_dict,
)

A2 = [[0, 1], [-1, 0]]


@pytest.mark.parametrize("raw, expected", [
    ("0.3+0.1i", 0.3 + 0.1j),
    ("-2j", -2j),
    (" 1.5 ", 1.5),
    (2, 2 + 0j),
    ([0.5, -0.25], 0.5 - 0.25j),
])
def test_parse_complex(raw, expected):
    assert parse_complex(raw) == expected


@pytest.mark.parametrize("raw", ["abc", [1.0], True, None, "1+"])
def test_parse_complex_rejects(raw):
    with pytest.raises(ValueError):
        parse_complex(raw)


def test_complex_to_json():
    assert complex_to_json(1.5 + 0j) == 1.5
    assert complex_to_json(1 - 2j) == [1.0, -2.0]


def test_seed_dict_roundtrip():
    s = mutate_seed(generic_x_seed(build_braid_matrix(2)), 4)
    data = seed_to_dict(s)
    assert data["size"] == 7
    assert "x" in data and "y" not in data
    assert seed_from_dict(data) == s


def test_seed_from_dict_generic_and_errors():
    seed = seed_from_dict({"B": A2, "y": None})
    assert isinstance(seed, YSeed)
    assert [v.to_string() for v in seed.y] == ["y1", "y2"]
    explicit = seed_from_dict({"B": A2, "x": ["(1+x2)/x1", "x2"]})
    assert isinstance(explicit, ClusterSeed)
    assert explicit.x[1].to_string() == "x2"
    with pytest.raises(ValueError):
        seed_from_dict({"size": 2})
    with pytest.raises(ValueError):
        seed_from_dict({"B": A2, "x": ["x1"], "y": ["y1"]})
    with pytest.raises(ValueError):
        seed_from_dict({"B": A2, "size": 3})
    with pytest.raises(ValueError):
        seed_from_dict({"B": A2, "x": ["x1"]})
    with pytest.raises(ValueError):
        seed_from_dict({"B": [[0, 1], [1, 0]]})
    with pytest.raises(ValueError):
        seed_from_dict({"B": A2, "x": ["x1 +", "x2"]})


def test_seed_file_roundtrip(tmp_path):
    s = generic_x_seed(build_braid_matrix(2))
    path = save_seed(tmp_path / "nested" / "seed.json", s)
    loaded = load_seed(path)
    assert isinstance(loaded, ClusterSeed)
    assert loaded == s


def test_load_json_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_json(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(ValueError):
        load_json(bad)


def test_seed_summary_counts_arrows():
    summary = seed_summary(seed_from_dict({"B": build_braid_matrix(2).to_list()}))
    assert summary["kind"] == "y"
    assert summary["arrows"] == 8
    assert summary["variables"][0] == "y1"


def test_load_y_values_json_and_csv(tmp_path):
    listed = tmp_path / "y.json"
    listed.write_text(json.dumps([1.0, [0.5, 0.5], "2-1i"]), encoding="utf-8")
    assert load_y_values(listed) == [1 + 0j, 0.5 + 0.5j, 2 - 1j]

    keyed = tmp_path / "keyed.json"
    keyed.write_text(json.dumps({"y": [0.25]}), encoding="utf-8")
    assert load_y_values(keyed) == [0.25 + 0j]

    table = tmp_path / "y.csv"
    table.write_text("re,im\n1.0,0.5\n-2.0,0.0\n", encoding="utf-8")
    assert load_y_values(table) == [1 + 0.5j, -2 + 0j]

    real_only = tmp_path / "real.csv"
    real_only.write_text("re\n3.0\n", encoding="utf-8")
    assert load_y_values(real_only) == [3 + 0j]


def test_load_y_values_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_y_values(tmp_path / "none.json")
    text = tmp_path / "y.txt"
    text.write_text("1 2 3", encoding="utf-8")
    with pytest.raises(ValueError):
        load_y_values(text)
    empty = tmp_path / "empty.json"
    empty.write_text("[]", encoding="utf-8")
    with pytest.raises(ValueError):
        load_y_values(empty)
    no_re = tmp_path / "bad.csv"
    no_re.write_text("x,y\n1,2\n", encoding="utf-8")
    with pytest.raises(ValueError):
        load_y_values(no_re)


def test_matrix_file_roundtrip(tmp_path):
    RK = build_RK(2)
    path = save_matrix(tmp_path / "rk.json", RK, 2)
    data = load_json(path)
    assert data["N"] == 2 and data["dim"] == 4
    assert np.allclose(load_matrix(path), RK)


def test_matrix_dict_accepts_cyclotomic():
    exact = build_RK(2, "cyclotomic")
    assert np.allclose(matrix_from_dict(matrix_to_dict(exact, 2)), build_RK(2))


def test_matrix_dict_validation():
    with pytest.raises(ValueError):
        matrix_to_dict(np.zeros((2, 3)), 2)
    with pytest.raises(ValueError):
        matrix_from_dict({"dim": 2, "entries": [[[1, 0]]]})
    with pytest.raises(ValueError):
        matrix_from_dict({"entries": []})


def test_create_sample_files(tmp_path):
    paths = create_sample_files(tmp_path / "samples")
    seed = load_seed(paths["seed"])
    assert seed.size == 10
    values = load_y_values(paths["y"])
    assert len(values) == 7
    assert all(abs(v) > 0 for v in values)
