import struct

import numpy as np
import pytest

from mixcs.ensembles import DistributionSpec, MeasurementMatrix, sample_iid_matrix
from mixcs.errors import ValidationError
from mixcs.matrixio import (
    fmt_float,
    load_csmat,
    load_matrix,
    load_matrix_csv,
    load_vector_csv,
    save_csmat,
    save_matrix_csv,
)


def test_fmt_float_round_trips():
    for v in (0.1, 1 / 3, 1e-300, -2.5, 0.0, 123456.789012345):
        assert float(fmt_float(v)) == v


def test_csmat_round_trip(tmp_path):
    m = sample_iid_matrix(DistributionSpec.gaussian_unit(), 5, 9, 3)
    path = tmp_path / "m.csmat"
    save_csmat(m, path)
    back = load_csmat(path)
    assert back.n == 5 and back.N == 9
    assert back.scaling == m.scaling
    assert np.array_equal(back.entries, m.entries)


def test_csmat_header_layout(tmp_path):
    m = MeasurementMatrix(np.array([[1.5, -2.0]]), scaling=0.25)
    path = tmp_path / "h.csmat"
    save_csmat(m, path)
    blob = path.read_bytes()
    assert blob[:6] == b"CSMAT1"
    n, N = struct.unpack_from("<II", blob, 6)
    (scaling,) = struct.unpack_from("<d", blob, 14)
    assert (n, N, scaling) == (1, 2, 0.25)
    vals = np.frombuffer(blob[22:], dtype="<f8")
    assert np.array_equal(vals, [1.5, -2.0])


def test_csmat_bad_magic(tmp_path):
    path = tmp_path / "bad.csmat"
    path.write_bytes(b"NOTMAG" + b"\x00" * 24)
    with pytest.raises(ValidationError):
        load_csmat(path)


def test_csmat_truncated(tmp_path):
    m = MeasurementMatrix(np.ones((2, 2)))
    path = tmp_path / "t.csmat"
    save_csmat(m, path)
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(ValidationError):
        load_csmat(path)


def test_matrix_csv_round_trip(tmp_path):
    m = sample_iid_matrix(DistributionSpec.three_point(), 4, 6, 8)
    path = tmp_path / "m.csv"
    save_matrix_csv(m, path)
    back = load_matrix_csv(path)
    assert np.array_equal(back.entries, m.entries)


def test_load_matrix_dispatch(tmp_path):
    m = sample_iid_matrix(DistributionSpec.bernoulli_sym(), 3, 4, 2)
    p1 = tmp_path / "a.csmat"
    p2 = tmp_path / "a.csv"
    save_csmat(m, p1)
    save_matrix_csv(m, p2)
    assert np.array_equal(load_matrix(str(p1)).entries, m.entries)
    assert np.array_equal(load_matrix(str(p2)).entries, m.entries)


def test_load_vector_csv(tmp_path):
    p = tmp_path / "y.csv"
    p.write_text("1.5\n-2.0\n0.25\n")
    assert np.array_equal(load_vector_csv(p), [1.5, -2.0, 0.25])
    p2 = tmp_path / "y2.csv"
    p2.write_text("1.5,-2.0,0.25\n")
    assert np.array_equal(load_vector_csv(p2), [1.5, -2.0, 0.25])
    p3 = tmp_path / "empty.csv"
    p3.write_text("")
    with pytest.raises(ValidationError):
        load_vector_csv(p3)
