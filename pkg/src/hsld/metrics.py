"""Error metrics for predicted temperature fields.

Pixel level: error of the maximum temperature and distance between the
hottest cells.  Image level: MAE, max AE, boundary- and component-masked
MAE, and MAE of the central-difference gradient and discrete Laplacian.
Batch level: Spearman rank correlation of maximum temperatures over
consecutive batches.

A masked metric whose mask is empty is reported as ``None``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import rankdata

from hsld.geometry import CATALOG, Catalog, GridSystem, Layout, component_masks
from hsld.solver import CaseConfig, boundary_masks


@dataclass
class MetricsReport:
    mt_ae: float
    mt_pae: float
    mae: float
    max_ae: float
    bmae_d: float | None
    bmae_n: float | None
    cmae: float | None
    g_mae: float
    lap_mae: float
    cmae_i: dict[int, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["cmae_i"] = {str(k): v for k, v in self.cmae_i.items()}
        return d

    # scalar metric names, in report order
    FIELDS = ("mt_ae", "mt_pae", "mae", "max_ae", "bmae_d", "bmae_n", "cmae", "g_mae", "lap_mae")


def _pair(pred, truth):
    pred = np.asarray(pred, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if pred.shape != truth.shape:
        raise ValueError(f"shape mismatch: prediction {pred.shape} vs truth {truth.shape}")
    if not (np.all(np.isfinite(pred)) and np.all(np.isfinite(truth))):
        raise ValueError("fields must be finite")
    return pred, truth


def pointwise_metrics(pred, truth) -> tuple[float, float, float, float]:
    """``(mt_ae, mt_pae, mae, max_ae)``.

    The hottest cell is the first maximum in row-major order; ``mt_pae`` is
    in cell units.
    """
    pred, truth = _pair(pred, truth)
    err = np.abs(pred - truth)
    p_hat = np.unravel_index(np.argmax(pred), pred.shape)
    p_true = np.unravel_index(np.argmax(truth), truth.shape)
    mt_pae = float(np.hypot(p_hat[0] - p_true[0], p_hat[1] - p_true[1]))
    return float(abs(pred.max() - truth.max())), mt_pae, float(err.mean()), float(err.max())


def _masked_mean(err, mask):
    count = int(mask.sum())
    return float(err[mask].sum() / count) if count else None


def masked_metrics(pred, truth, layout: Layout, case: CaseConfig, catalog: Catalog = CATALOG):
    """``(bmae_d, bmae_n, cmae, cmae_i)`` where ``cmae`` is the worst component."""
    pred, truth = _pair(pred, truth)
    grid = layout.grid
    if pred.shape != (grid.cells, grid.cells):
        raise ValueError(f"fields are {pred.shape} but the layout grid is {grid.cells} cells")
    err = np.abs(pred - truth)
    dirichlet, neumann = boundary_masks(grid, case)
    cmae_i = {
        cid: _masked_mean(err, mask) for cid, mask in sorted(component_masks(layout, catalog).items())
    }
    cmae = max(cmae_i.values()) if cmae_i else None
    return _masked_mean(err, dirichlet), _masked_mean(err, neumann), cmae, cmae_i


def gradients(field: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    """Central differences on the interior cells, each ``(N-2, N-2)``."""
    gx = (field[1:-1, 2:] - field[1:-1, :-2]) / (2 * h)
    gy = (field[2:, 1:-1] - field[:-2, 1:-1]) / (2 * h)
    return gx, gy


def laplacian(field: np.ndarray, h: float) -> np.ndarray:
    return (field[1:-1, 2:] + field[1:-1, :-2] + field[2:, 1:-1] + field[:-2, 1:-1]
            - 4 * field[1:-1, 1:-1]) / h**2


def derivative_metrics(pred, truth, grid: GridSystem) -> tuple[float, float]:
    """``(g_mae, lap_mae)`` over the interior cells."""
    pred, truth = _pair(pred, truth)
    if min(pred.shape) < 3:
        raise ValueError("derivative metrics need at least 3 cells per side")
    h = grid.cell_size
    gx_hat, gy_hat = gradients(pred, h)
    gx, gy = gradients(truth, h)
    g_mae = float(np.mean(np.abs(gx_hat - gx) + np.abs(gy_hat - gy)))
    lap_mae = float(np.mean(np.abs(laplacian(pred, h) - laplacian(truth, h))))
    return g_mae, lap_mae


def evaluate_pair(pred, truth, layout: Layout, case: CaseConfig = CaseConfig(),
                  catalog: Catalog = CATALOG) -> MetricsReport:
    mt_ae, mt_pae, mae, max_ae = pointwise_metrics(pred, truth)
    bmae_d, bmae_n, cmae, cmae_i = masked_metrics(pred, truth, layout, case, catalog)
    g_mae, lap_mae = derivative_metrics(pred, truth, layout.grid)
    return MetricsReport(mt_ae, mt_pae, mae, max_ae, bmae_d, bmae_n, cmae, g_mae, lap_mae, cmae_i)


def spearman(x, y) -> float:
    """Pearson correlation of average ranks; ``nan`` if either side is constant."""
    rx, ry = rankdata(x), rankdata(y)
    rx -= rx.mean()
    ry -= ry.mean()
    denom = np.sqrt((rx @ rx) * (ry @ ry))
    return float(rx @ ry / denom) if denom > 0 else float("nan")


def spearman_batches(pred_max, true_max, batch_size: int = 100) -> tuple[float, float]:
    """Mean and (population) standard deviation of the per-batch Spearman rho.

    Samples are cut into consecutive full batches; the remainder is dropped.
    """
    pred_max = np.asarray(pred_max, dtype=float)
    true_max = np.asarray(true_max, dtype=float)
    if pred_max.shape != true_max.shape:
        raise ValueError("sequences differ in length")
    n_batches = len(pred_max) // batch_size
    if n_batches == 0:
        raise ValueError(f"need at least {batch_size} samples, got {len(pred_max)}")
    rhos = np.array([
        spearman(pred_max[i * batch_size:(i + 1) * batch_size],
                 true_max[i * batch_size:(i + 1) * batch_size])
        for i in range(n_batches)
    ])
    return float(rhos.mean()), float(rhos.std())
