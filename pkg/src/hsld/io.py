"""Matrix files, standardization, heatmaps and the noisy-oracle predictor.

Matrix file layout (``.hsld``), all little-endian::

    offset 0   4 bytes   magic b"HSL1"
    offset 4   uint32    rows
    offset 8   uint32    cols
    offset 12  float64[rows * cols], row-major
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from hsld.seeds import derive_rng

MAGIC = b"HSL1"
_HEADER = struct.Struct("<4sII")
_MAX_DIM = 2**32 - 1


class MatrixFormatError(ValueError):
    pass


def write_matrix(values) -> bytes:
    values = np.asarray(values, dtype="<f8")
    if values.ndim != 2:
        raise MatrixFormatError(f"expected a 2-D matrix, got {values.ndim} dimensions")
    rows, cols = values.shape
    if rows > _MAX_DIM or cols > _MAX_DIM:
        raise MatrixFormatError(f"dimensions {values.shape} overflow uint32")
    if not np.all(np.isfinite(values)):
        raise MatrixFormatError("matrix contains non-finite values")
    return _HEADER.pack(MAGIC, rows, cols) + np.ascontiguousarray(values).tobytes()


def read_matrix(data: bytes) -> np.ndarray:
    if len(data) < _HEADER.size:
        raise MatrixFormatError(f"truncated header: {len(data)} bytes")
    magic, rows, cols = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise MatrixFormatError(f"bad magic {magic!r}")
    expected = _HEADER.size + 8 * rows * cols
    if len(data) != expected:
        raise MatrixFormatError(f"payload holds {len(data) - _HEADER.size} bytes, expected {8 * rows * cols}")
    return np.frombuffer(data, dtype="<f8", offset=_HEADER.size).reshape(rows, cols).astype(float)


def save_matrix(path, values) -> None:
    Path(path).write_bytes(write_matrix(values))


def load_matrix(path) -> np.ndarray:
    return read_matrix(Path(path).read_bytes())


# --- standardization ---------------------------------------------------------

@dataclass(frozen=True)
class StandardizationParams:
    x_mean: float = 0.0
    x_std: float = 1000.0
    y_mean: float = 298.0
    y_std: float = 50.0

    @classmethod
    def for_case(cls, case_id: int) -> "StandardizationParams":
        return cls(y_std=100.0 if case_id == 3 else 50.0)

    def __post_init__(self):
        if self.x_std <= 0 or self.y_std <= 0:
            raise ValueError("standard deviations must be positive")


def standardize(values, params: StandardizationParams, kind: str):
    """``(v - mean) / std`` with the input (``"x"``) or output (``"y"``) constants."""
    mean, std = _constants(params, kind)
    return (np.asarray(values, dtype=float) - mean) / std


def unstandardize(values, params: StandardizationParams, kind: str):
    mean, std = _constants(params, kind)
    return np.asarray(values, dtype=float) * std + mean


def _constants(params, kind):
    if kind == "x":
        return params.x_mean, params.x_std
    if kind == "y":
        return params.y_mean, params.y_std
    raise ValueError(f"kind must be 'x' or 'y', got {kind!r}")


# --- heatmaps ----------------------------------------------------------------

# color stops from cold to hot, evenly spaced in [0, 1]
RAMP = np.array([
    (0, 0, 128),
    (0, 0, 255),
    (0, 255, 255),
    (255, 255, 0),
    (255, 0, 0),
    (128, 0, 0),
], dtype=float)


def _lut(levels: int = 256) -> np.ndarray:
    t = np.linspace(0, 1, levels)
    stops = np.linspace(0, 1, len(RAMP))
    return np.stack([np.interp(t, stops, RAMP[:, c]) for c in range(3)], axis=1).round().astype(np.uint8)


LUT = _lut()


def render_heatmap(field) -> bytes:
    """Binary PPM of ``field`` with min-max scaling through ``RAMP``.

    Image row 0 is the top of the domain, so matrix rows are flipped.  A
    constant field renders in the middle color of the ramp.
    """
    field = np.asarray(field, dtype=float)
    if field.ndim != 2 or not np.all(np.isfinite(field)):
        raise ValueError("field must be a finite 2-D matrix")
    lo, hi = field.min(), field.max()
    if hi > lo:
        idx = np.rint((field - lo) / (hi - lo) * (len(LUT) - 1)).astype(int)
    else:
        idx = np.full(field.shape, (len(LUT) - 1) // 2)
    pixels = LUT[idx[::-1]]
    rows, cols = field.shape
    return f"P6\n{cols} {rows}\n255\n".encode("ascii") + pixels.tobytes()


# --- noisy oracle ------------------------------------------------------------

LABEL_SUFFIX = ".label.hsld"


def noisy_oracle_predict(truth_dir, sigma: float, seed: int, out_dir) -> list[Path]:
    """Write ``truth + N(0, sigma^2)`` for every label file under ``truth_dir``.

    Predictions mirror the labels' relative paths under ``out_dir``; the
    noise of each file is seeded by ``(seed, relative path)``.
    """
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    truth_dir, out_dir = Path(truth_dir), Path(out_dir)
    labels = sorted(truth_dir.rglob("*" + LABEL_SUFFIX))
    if not labels:
        raise FileNotFoundError(f"no *{LABEL_SUFFIX} files under {truth_dir}")
    written = []
    for path in labels:
        rel = path.relative_to(truth_dir)
        truth = load_matrix(path)
        noise = derive_rng(seed, rel.as_posix(), 0).normal(0.0, sigma, truth.shape) if sigma else 0.0
        target = out_dir / rel
        target.parent.mkdir(parents=True, exist_ok=True)
        save_matrix(target, truth + noise)
        written.append(target)
    return written
