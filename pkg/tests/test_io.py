import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ree_css.errors import DomainError
from ree_css.io import load_matrix, matrix_from_dict, matrix_to_dict, save_matrix
from ree_css.sampling import random_hermitian


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.sampled_from([(2,), (2, 2), (2, 3), (3, 3)]))
def test_round_trip_is_bit_identical(seed, dims):
    n = int(np.prod(dims))
    m = random_hermitian(n, np.random.default_rng(seed)) * 10.0 ** np.random.default_rng(seed).integers(-8, 8)
    m = 0.5 * (m + m.conj().T)
    text = json.dumps(matrix_to_dict(m, dims))
    back, back_dims = matrix_from_dict(json.loads(text))
    np.testing.assert_array_equal(back, m)
    assert back_dims == dims


def test_file_round_trip(tmp_path, rng):
    m = random_hermitian(4, rng)
    path = tmp_path / "m.json"
    save_matrix(path, m, (2, 2))
    back, dims = load_matrix(path)
    assert dims == (2, 2)
    assert np.max(np.abs(back - m)) <= 1e-15


def test_small_asymmetry_is_symmetrized():
    obj = {"dims": [2], "re": [[1.0, 0.5], [0.5 + 5e-13, 0.0]], "im": [[0.0, 0.0], [0.0, 0.0]]}
    m, _ = matrix_from_dict(obj)
    assert m[0, 1] == m[1, 0]


@pytest.mark.parametrize(
    "obj,match",
    [
        ({"dims": [2], "re": [[1, 0.5], [0.4, 0]], "im": [[0, 0], [0, 0]]}, "not hermitian"),
        ({"dims": [3], "re": [[1, 0], [0, 1]], "im": [[0, 0], [0, 0]]}, "multiply"),
        ({"dims": [2], "re": [[1, 0], [0, 1]]}, "missing"),
        ({"dims": [2], "re": [[1, 0]], "im": [[0, 0]]}, "square"),
        ({"dims": [2], "re": [[1, 0], [0, 1]], "im": [[0, 0, 0], [0, 0, 0]]}, "differ"),
        ({"dims": [2], "re": [["a", 0], [0, 1]], "im": [[0, 0], [0, 0]]}, "numeric"),
        ([1, 2], "object"),
    ],
)
def test_malformed_records_are_rejected(obj, match):
    with pytest.raises(DomainError, match=match):
        matrix_from_dict(obj)


def test_malformed_json_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(DomainError, match="malformed JSON"):
        load_matrix(path)
