"""Steady heat conduction ``k * lap(T) + phi = 0`` on the square container.

Cell-centered finite volumes on the uniform ``N x N`` grid.  Boundary faces
use ghost cells: a Dirichlet face sets ``T_ghost = 2*T0 - T_P`` and a
Neumann face sets ``T_ghost = T_P``.  The unknown is ``U = T - T0``, so the
assembled system ``A U = phi * h^2 / k`` has no boundary source term and
``A`` depends only on the grid and the boundary pattern.  Its sparse LU
factorization is cached, which makes every further solve on the same case
a pair of triangular sweeps.

Cases:

1. all four sides Dirichlet;
2. one side Dirichlet (left by default), the others Neumann;
3. Dirichlet only on a sink of width ``sink_width`` centered on the bottom
   side, Neumann elsewhere.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from hsld.geometry import DEFAULT_GRID, GridSystem

logger = logging.getLogger(__name__)

SIDES = ("left", "right", "bottom", "top")


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class CaseConfig:
    case_id: int = 1
    conductivity: float = 1.0
    t0: float = 298.0
    dirichlet_side: str = "left"
    sink_width: float = 0.001

    def __post_init__(self):
        if self.case_id not in (1, 2, 3):
            raise ValueError(f"case_id must be 1, 2 or 3, got {self.case_id}")
        if self.dirichlet_side not in SIDES:
            raise ValueError(f"dirichlet_side must be one of {SIDES}")
        if self.conductivity <= 0 or self.sink_width <= 0:
            raise ValueError("conductivity and sink width must be positive")


@dataclass(frozen=True)
class SolveSettings:
    tolerance: float = 1e-8
    max_iterations: int = 20_000
    solver_kind: str = "direct"

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.solver_kind not in ("direct", "iterative"):
            raise ValueError("solver_kind must be 'direct' or 'iterative'")


def sink_columns(grid: GridSystem, case: CaseConfig) -> np.ndarray:
    """Bottom-row cell columns whose centers lie within the centered sink."""
    h = grid.cell_size
    centers = (np.arange(grid.cells) + 0.5) * h
    half = case.sink_width / 2
    mid = grid.side_length / 2
    eps = 1e-9 * h
    cols = np.flatnonzero((centers >= mid - half - eps) & (centers <= mid + half + eps))
    if cols.size == 0:
        raise ValueError(f"sink of width {case.sink_width} m covers no cell at N={grid.cells}")
    return cols


def dirichlet_faces(grid: GridSystem, case: CaseConfig) -> dict[str, np.ndarray]:
    """Per side, a boolean array over the boundary cells marking Dirichlet faces.

    Side arrays run along the side in increasing x (bottom/top) or
    increasing y (left/right).
    """
    n = grid.cells
    faces = {side: np.zeros(n, dtype=bool) for side in SIDES}
    if case.case_id == 1:
        for side in SIDES:
            faces[side][:] = True
    elif case.case_id == 2:
        faces[case.dirichlet_side][:] = True
    else:
        faces["bottom"][sink_columns(grid, case)] = True
    return faces


def boundary_masks(grid: GridSystem, case: CaseConfig) -> tuple[np.ndarray, np.ndarray]:
    """Dirichlet and Neumann masks over the outermost ring of cells.

    A ring cell with at least one Dirichlet face counts as Dirichlet, any
    other ring cell as Neumann.
    """
    n = grid.cells
    faces = dirichlet_faces(grid, case)
    ring = np.zeros((n, n), dtype=bool)
    ring[0, :] = ring[-1, :] = ring[:, 0] = ring[:, -1] = True
    dirichlet = np.zeros((n, n), dtype=bool)
    dirichlet[0, :] |= faces["bottom"]
    dirichlet[-1, :] |= faces["top"]
    dirichlet[:, 0] |= faces["left"]
    dirichlet[:, -1] |= faces["right"]
    return dirichlet, ring & ~dirichlet


def _case_key(grid: GridSystem, case: CaseConfig):
    faces = dirichlet_faces(grid, case)
    return grid.cells, tuple(tuple(np.flatnonzero(faces[s]).tolist()) for s in SIDES)


@lru_cache(maxsize=16)
def _assemble(key) -> sp.csc_matrix:
    n, dirichlet = key
    faces = {}
    for side, idx in zip(SIDES, dirichlet):
        mask = np.zeros(n, dtype=bool)
        mask[list(idx)] = True
        faces[side] = mask
    if not any(m.any() for m in faces.values()):
        raise SolverError("no Dirichlet face: the problem is singular")

    # diagonal = interior neighbours + 2 per Dirichlet face (ghost -U_P on the left-hand side)
    diag = np.zeros((n, n))
    diag[:, 1:] += 1
    diag[:, :-1] += 1
    diag[1:, :] += 1
    diag[:-1, :] += 1
    diag[:, 0] += 2 * faces["left"]
    diag[:, -1] += 2 * faces["right"]
    diag[0, :] += 2 * faces["bottom"]
    diag[-1, :] += 2 * faces["top"]

    idx = np.arange(n * n).reshape(n, n)
    rows = [idx.ravel()]
    cols = [idx.ravel()]
    vals = [diag.ravel()]
    for a, b in ((idx[:, :-1], idx[:, 1:]), (idx[:-1, :], idx[1:, :])):
        rows += [a.ravel(), b.ravel()]
        cols += [b.ravel(), a.ravel()]
        vals += [-np.ones(a.size), -np.ones(a.size)]
    return sp.csc_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n * n, n * n)
    )


@lru_cache(maxsize=16)
def _factorized(key):
    return spla.splu(_assemble(key))


def system_matrix(grid: GridSystem, case: CaseConfig) -> sp.csc_matrix:
    """The scaled operator: ``(A U)_P = 4 U_P - sum of neighbours`` with ghost rules."""
    return _assemble(_case_key(grid, case))


def _conjugate_gradients(A, rhs, rhs_norm, settings):
    # the recursive residual drifts from the true one, so restart from the
    # last iterate until the true residual meets the tolerance
    precond = sp.diags(1.0 / A.diagonal())
    u, budget = None, settings.max_iterations
    while budget > 0:
        steps = [0]
        u, info = spla.cg(A, rhs, x0=u, rtol=settings.tolerance, atol=0.0, maxiter=budget, M=precond,
                          callback=lambda _: steps.__setitem__(0, steps[0] + 1))
        budget -= max(steps[0], 1)
        if info == 0 and np.linalg.norm(A @ u - rhs) <= settings.tolerance * rhs_norm:
            return u
    raise SolverError(f"conjugate gradients did not converge in {settings.max_iterations} steps")


def solve(phi: np.ndarray, case: CaseConfig = CaseConfig(), settings: SolveSettings = SolveSettings(),
          grid: GridSystem | None = None) -> np.ndarray:
    """Temperature field (K) for the source matrix ``phi`` (W/m^2).

    ``grid`` defaults to the standard 0.1 m container with ``phi``'s
    resolution.  Raises ``SolverError`` if the relative residual of the
    assembled system exceeds ``settings.tolerance``.
    """
    phi = np.asarray(phi, dtype=float)
    if phi.ndim != 2 or phi.shape[0] != phi.shape[1]:
        raise ValueError(f"phi must be a square matrix, got shape {phi.shape}")
    if not np.all(np.isfinite(phi)):
        raise ValueError("phi contains non-finite values")
    if grid is None:
        grid = GridSystem(DEFAULT_GRID.side_length, phi.shape[0])
    elif grid.cells != phi.shape[0]:
        raise ValueError(f"phi is {phi.shape[0]} cells wide but the grid has {grid.cells}")

    rhs = phi.ravel() * grid.cell_size**2 / case.conductivity
    rhs_norm = np.linalg.norm(rhs)
    if rhs_norm == 0:
        return np.full(phi.shape, case.t0)

    key = _case_key(grid, case)
    A = _assemble(key)
    if settings.solver_kind == "direct":
        u = _factorized(key).solve(rhs)
    else:
        u = _conjugate_gradients(A, rhs, rhs_norm, settings)

    residual = np.linalg.norm(A @ u - rhs) / rhs_norm
    if not residual <= settings.tolerance:
        raise SolverError(f"relative residual {residual:.3e} exceeds {settings.tolerance:.1e}")
    logger.debug("case %d solve: residual %.2e", case.case_id, residual)
    return case.t0 + u.reshape(phi.shape)


# --- manufactured solutions --------------------------------------------------

def _sine_dirichlet(x, y, L):
    s = np.pi / L
    t = np.sin(s * x) * np.sin(s * y)
    return t, 2 * s**2 * t


def _cosine_left(x, y, L):
    # zero at x=0, zero x-slope at x=L, zero y-slope at y=0 and y=L
    p, q = np.pi / (2 * L), np.pi / L
    t = np.sin(p * x) * np.cos(q * y)
    return t, (p**2 + q**2) * t


def _constant(x, y, L):
    return np.zeros_like(x), np.zeros_like(x)


# id -> (offset from T0 and -lap of it, case the solution is built for)
MANUFACTURED = {
    "sine": (_sine_dirichlet, CaseConfig(1)),
    "cosine-left": (_cosine_left, CaseConfig(2, dirichlet_side="left")),
    "constant": (_constant, CaseConfig(3)),
}


@dataclass(frozen=True)
class ConvergenceResult:
    grid_sizes: tuple[int, ...]
    errors: tuple[float, ...]
    orders: tuple[float, ...]


def convergence_study(manufactured_id: str, grid_sizes=(50, 100, 200),
                      settings: SolveSettings = SolveSettings(),
                      side_length: float = 0.1) -> ConvergenceResult:
    """Max-norm errors against a manufactured solution and observed orders.

    The order between consecutive grids is
    ``log(e_1 / e_2) / log(N_2 / N_1)`` (``log2`` of the error ratio when
    the grid doubles).  Zero errors give infinite orders.
    """
    try:
        exact_fn, case = MANUFACTURED[manufactured_id]
    except KeyError:
        raise ValueError(f"unknown manufactured solution {manufactured_id!r}") from None
    errors = []
    for n in grid_sizes:
        grid = GridSystem(side_length, n)
        c = grid.cell_centers()
        x, y = np.meshgrid(c, c)
        offset, neg_lap = exact_fn(x, y, side_length)
        phi = case.conductivity * neg_lap
        temp = solve(phi, case, settings, grid)
        errors.append(float(np.max(np.abs(temp - (case.t0 + offset)))))
    orders = []
    for (n1, e1), (n2, e2) in zip(zip(grid_sizes, errors), zip(grid_sizes[1:], errors[1:])):
        with np.errstate(divide="ignore", invalid="ignore"):
            orders.append(float(np.log(e1 / e2) / np.log(n2 / n1)) if e2 > 0 else float("inf"))
    return ConvergenceResult(tuple(grid_sizes), tuple(errors), tuple(orders))
