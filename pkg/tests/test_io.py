import struct

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from hsld.io import (
    LUT,
    RAMP,
    MatrixFormatError,
    StandardizationParams,
    noisy_oracle_predict,
    read_matrix,
    render_heatmap,
    save_matrix,
    load_matrix,
    standardize,
    unstandardize,
    write_matrix,
)


def test_one_by_one_layout():
    data = write_matrix([[42.0]])
    assert data[:4] == b"HSL1"
    assert struct.unpack("<II", data[4:12]) == (1, 1)
    assert len(data) == 12 + 8 and struct.unpack("<d", data[12:]) == (42.0,)
    assert read_matrix(data)[0, 0] == 42.0


def test_field_round_trip_bit_exact():
    field = np.random.default_rng(0).normal(300, 20, (200, 200))
    back = read_matrix(write_matrix(field))
    assert back.tobytes() == field.tobytes()


@given(arrays(float, st.tuples(st.integers(1, 6), st.integers(1, 6)),
              elements=st.floats(allow_nan=False, allow_infinity=False)))
def test_round_trip_property(m):
    assert np.array_equal(read_matrix(write_matrix(m)), m)


def test_corrupt_inputs():
    data = write_matrix(np.ones((3, 2)))
    with pytest.raises(MatrixFormatError):
        read_matrix(b"XXXX" + data[4:])
    with pytest.raises(MatrixFormatError):
        read_matrix(data[:-1])
    with pytest.raises(MatrixFormatError):
        read_matrix(data[:7])
    with pytest.raises(MatrixFormatError):
        write_matrix([[np.inf]])
    with pytest.raises(MatrixFormatError):
        write_matrix(np.ones(3))


def test_standardize_constants():
    p1, p3 = StandardizationParams.for_case(1), StandardizationParams.for_case(3)
    assert standardize(4000.0, p1, "x") == 4.0
    assert standardize(298.0, p1, "y") == 0.0 and standardize(298.0, p3, "y") == 0.0
    assert standardize(348.0, p1, "y") == 1.0
    assert standardize(348.0, StandardizationParams.for_case(2), "y") == 1.0
    assert standardize(348.0, p3, "y") == 0.5
    with pytest.raises(ValueError):
        standardize(1.0, p1, "z")
    with pytest.raises(ValueError):
        StandardizationParams(x_std=0)


@given(st.floats(0, 1e5), st.sampled_from([1, 2, 3]), st.sampled_from(["x", "y"]))
def test_standardize_inverse(v, case_id, kind):
    p = StandardizationParams.for_case(case_id)
    assert unstandardize(standardize(v, p, kind), p, kind) == pytest.approx(v, rel=1e-15, abs=1e-12)


def test_heatmap_header_and_orientation():
    field = np.zeros((200, 200))
    field[0, 0] = 5.0  # bottom-left cell, unique maximum
    img = render_heatmap(field)
    header = b"P6\n200 200\n255\n"
    assert img.startswith(header) and len(img) == len(header) + 120000
    pixels = np.frombuffer(img[len(header):], np.uint8).reshape(200, 200, 3)
    assert tuple(pixels[-1, 0]) == tuple(RAMP[-1].astype(int))
    assert tuple(pixels[0, 0]) == tuple(RAMP[0].astype(int))


def test_heatmap_constant_field():
    img = render_heatmap(np.full((4, 3), 7.0))
    header = b"P6\n3 4\n255\n"
    pixels = np.frombuffer(img[len(header):], np.uint8).reshape(-1, 3)
    assert (pixels == LUT[127]).all()
    with pytest.raises(ValueError):
        render_heatmap(np.full((2, 2), np.nan))


def test_noisy_oracle(tmp_path):
    truth = tmp_path / "truth" / "train"
    truth.mkdir(parents=True)
    fields = [np.full((50, 50), 300.0 + i) for i in range(3)]
    for i, f in enumerate(fields):
        save_matrix(truth / f"s{i}.label.hsld", f)
    out = tmp_path / "pred"
    written = noisy_oracle_predict(tmp_path / "truth", 0.0, 1, out)
    assert len(written) == 3
    assert np.array_equal(load_matrix(out / "train" / "s0.label.hsld"), fields[0])
    noisy_oracle_predict(tmp_path / "truth", 0.5, 1, tmp_path / "a")
    noisy_oracle_predict(tmp_path / "truth", 0.5, 1, tmp_path / "b")
    a = load_matrix(tmp_path / "a" / "train" / "s1.label.hsld")
    b = load_matrix(tmp_path / "b" / "train" / "s1.label.hsld")
    assert np.array_equal(a, b)
    assert 0.3 < np.abs(a - fields[1]).mean() < 0.5
    with pytest.raises(FileNotFoundError):
        noisy_oracle_predict(tmp_path / "pred" / "nothing", 0.5, 1, tmp_path / "c")
    with pytest.raises(ValueError):
        noisy_oracle_predict(tmp_path / "truth", -1, 1, tmp_path / "c")


def test_noise_statistics_against_closed_form():
    # E|N(0, s)| = s * sqrt(2/pi); expected max of |noise| over 40000 cells from Monte-Carlo is about 2.16
    rng = np.random.default_rng(7)
    noise = rng.normal(0, 0.5, (200, 200, 200))
    assert np.abs(noise).mean() == pytest.approx(0.5 * np.sqrt(2 / np.pi), rel=0.01)
    assert 2.0 <= np.abs(noise).reshape(200, -1).max(axis=1).mean() <= 2.7
