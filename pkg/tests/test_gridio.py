"""Round trips for the binary grid container and the profile CSV."""

import numpy as np
import pytest

from lipdeg.bands import band_profile, bandlimited_noise_form
from lipdeg.errors import ShapeError
from lipdeg.gridio import (
    read_band_profile,
    read_gridform,
    write_band_profile,
    write_gridform,
)


def test_gridform_binary_round_trip(tmp_path):
    a = bandlimited_noise_form(3, 2, 16, T=2.0, radius=5.0, seed=3)
    path = tmp_path / "a.gfrm"
    write_gridform(path, a)
    b = read_gridform(path)
    assert b.spatial_dim == 3 and b.form_degree == 2
    assert b.resolution == 16 and b.period == 2.0
    assert np.array_equal(a.data, b.data)  # bit-exact float64 payload


def test_gridform_header_is_portable(tmp_path):
    a = bandlimited_noise_form(2, 0, 8, seed=1)
    path = tmp_path / "a.gfrm"
    write_gridform(path, a)
    raw = path.read_bytes()
    assert raw[:4] == b"GFRM"
    assert int.from_bytes(raw[4:8], "little") == 2  # dimension, little-endian
    assert int.from_bytes(raw[12:16], "little") == 8  # resolution


def test_gridform_rejects_corruption(tmp_path):
    a = bandlimited_noise_form(2, 1, 8, seed=2)
    path = tmp_path / "a.gfrm"
    write_gridform(path, a)
    raw = bytearray(path.read_bytes())
    raw[:4] = b"NOPE"
    bad = tmp_path / "bad.gfrm"
    bad.write_bytes(bytes(raw))
    with pytest.raises(ShapeError):
        read_gridform(bad)
    short = tmp_path / "short.gfrm"
    short.write_bytes(path.read_bytes()[:-16])
    with pytest.raises(ShapeError):
        read_gridform(short)


def test_band_profile_csv_round_trip(tmp_path):
    a = bandlimited_noise_form(2, 1, 32, radius=12.0, seed=4)
    prof = band_profile(a)
    path = tmp_path / "prof.csv"
    write_band_profile(path, prof)
    back = read_band_profile(path)
    assert back.bands == prof.bands
    assert back.total_l2 == prof.total_l2  # repr round trip is exact
    for k in prof.bands:
        assert back.l1[k] == prof.l1[k]
        assert back.l2[k] == prof.l2[k]
        assert back.linf[k] == prof.linf[k]
    assert back.per_component == prof.per_component
    assert back.orthogonality_ratio() == pytest.approx(prof.orthogonality_ratio())


def test_band_profile_csv_rejects_other_files(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ShapeError):
        read_band_profile(path)
