import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chronoglass._validation import DimensionError
from chronoglass.channel import choi_from_kraus, random_cp_map
from chronoglass.io import (
    SchemaError,
    channel_from_json,
    channel_to_json,
    choi_from_json,
    choi_to_json,
    dumps,
    load_json,
    matrix_from_json,
    matrix_to_json,
    tensor_from_json,
    tensor_to_json,
)
from chronoglass.matcore import random_matrix
from chronoglass.tensors import TensorNode, ame_4_3

from conftest import assert_close

seeds = st.integers(0, 2**32 - 1)


@given(seeds, st.integers(1, 4), st.integers(1, 4))
def test_matrix_round_trip(seed, r, c):
    m = random_matrix(r, np.random.default_rng(seed), cols=c)
    back = matrix_from_json(json.loads(json.dumps(matrix_to_json(m))))
    assert_close(back, m, 0)


def test_matrix_accepts_real_entries():
    m = matrix_from_json({"rows": 1, "cols": 2, "data": [1, [0, 2]]})
    assert_close(m, [[1, 2j]])


@pytest.mark.parametrize(
    "obj, exc",
    [
        ({"rows": 2, "cols": 2, "data": [[1, 0]]}, DimensionError),
        ({"rows": 2, "data": []}, SchemaError),
        ({"rows": 0, "cols": 2, "data": []}, SchemaError),
        ({"rows": 1, "cols": 1, "data": [[1, 2, 3]]}, SchemaError),
        ({"rows": 1, "cols": 1, "data": ["x"]}, SchemaError),
        ({"rows": 1, "cols": 1, "data": [[True, 0]]}, SchemaError),
        ([1, 2], SchemaError),
    ],
)
def test_matrix_rejects(obj, exc):
    with pytest.raises(exc):
        matrix_from_json(obj, "field")


def test_wrong_length_names_field():
    with pytest.raises(DimensionError, match="kraus.data|kraus"):
        channel_from_json(
            {"in_dim": 2, "out_dim": 2, "terms": [{"weight": 1, "kraus": {"rows": 2, "cols": 2, "data": [1]}}]}
        )


def test_channel_and_choi_round_trip(rng):
    n = random_cp_map(2, 3, rng=rng)
    back = channel_from_json(json.loads(dumps(channel_to_json(n))))
    assert (back.in_dim, back.out_dim) == (2, 3)
    assert_close(choi_from_kraus(back).matrix, choi_from_kraus(n).matrix, 1e-15)
    j = choi_from_kraus(n)
    jb = choi_from_json(json.loads(dumps(choi_to_json(j))))
    assert_close(jb.matrix, j.matrix, 0)


def test_channel_rejects_empty_terms():
    with pytest.raises(SchemaError):
        channel_from_json({"in_dim": 2, "out_dim": 2, "terms": []})


def test_tensor_round_trip():
    t = ame_4_3()
    back = tensor_from_json(json.loads(dumps(tensor_to_json(t))))
    assert isinstance(back, TensorNode)
    assert_close(back.data, t.data, 0)


def test_load_json_errors_name_file(tmp_path):
    bad = tmp_path / "m.json"
    bad.write_text("{not json")
    with pytest.raises(SchemaError, match="m.json"):
        load_json(bad)
    with pytest.raises(SchemaError, match="missing.json"):
        load_json(tmp_path / "missing.json")


def test_dumps_is_deterministic():
    doc = {"b": np.float64(1.5), "a": np.eye(2), "c": 1 + 2j, "d": np.bool_(True)}
    assert dumps(doc) == dumps(dict(reversed(list(doc.items()))))
    data = json.loads(dumps(doc))
    assert list(data) == ["a", "b", "c", "d"]
    assert data["c"] == [1.0, 2.0]
