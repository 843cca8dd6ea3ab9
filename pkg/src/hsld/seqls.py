"""Sequence layout sampling.

Components are added one at a time.  For the component being placed, an
integer matrix over the ``(N+1) x (N+1)`` grid nodes accumulates one
indicator per constraint: the container (plus the optional center window)
and every component already placed.  A node whose accumulated count is zero
is feasible, and the center is drawn uniformly among those nodes.  If some
component has no feasible node the whole attempt is restarted.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from hsld.geometry import (
    CATALOG,
    DEFAULT_GRID,
    Catalog,
    GridSystem,
    Layout,
    LayoutError,
    Placement,
    descending_area_order,
    half_extents,
)
from hsld.seeds import derive_rng

logger = logging.getLogger(__name__)


class SamplingError(RuntimeError):
    """No feasible layout was found within the restart budget."""

    def __init__(self, message: str, attempts: int = 0):
        super().__init__(message)
        self.attempts = attempts


@dataclass(frozen=True)
class SeqLSConfig:
    """Placement order, restart budget and optional center window.

    ``window`` is ``(x_min, x_max, y_min, y_max)`` in node coordinates,
    inclusive.  ``sequence=None`` means descending area over the components
    that are not pre-placed.
    """

    sequence: tuple[int, ...] | None = None
    max_restarts: int = 10_000
    window: tuple[int, int, int, int] | None = None

    def __post_init__(self):
        if self.max_restarts < 1:
            raise ValueError("max_restarts must be >= 1")
        if self.sequence is not None:
            object.__setattr__(self, "sequence", tuple(self.sequence))
        if self.window is not None:
            x0, x1, y0, y1 = self.window
            if x0 > x1 or y0 > y1:
                raise ValueError(f"empty window {self.window}")
            object.__setattr__(self, "window", tuple(int(v) for v in self.window))


@dataclass(frozen=True)
class SeqLSResult:
    layout: Layout
    attempts: int

    @property
    def success_rate(self) -> float:
        return 1.0 / self.attempts


def resolve_sequence(config: SeqLSConfig, catalog: Catalog, grid: GridSystem,
                     fixed: Sequence[Placement] = ()) -> list[int]:
    fixed_ids = {p.component_id for p in fixed}
    free = [cid for cid in catalog if cid not in fixed_ids]
    if config.sequence is None:
        return descending_area_order(catalog, grid, free)
    if sorted(config.sequence) != sorted(free):
        raise ValueError(
            f"sequence {config.sequence} is not a permutation of the free components {sorted(free)}"
        )
    return list(config.sequence)


def container_indicator(a: int, b: int, grid: GridSystem,
                        window: tuple[int, int, int, int] | None = None) -> np.ndarray:
    """1 on nodes where a center with half-extents (a, b) is not allowed.

    Indexed ``[cy, cx]``.
    """
    n = grid.cells
    x_lo, x_hi, y_lo, y_hi = a, n - a, b, n - b
    if window is not None:
        x_lo, x_hi = max(x_lo, window[0]), min(x_hi, window[1])
        y_lo, y_hi = max(y_lo, window[2]), min(y_hi, window[3])
    ind = np.ones((n + 1, n + 1), dtype=np.int16)
    if x_lo <= x_hi and y_lo <= y_hi:
        ind[y_lo:y_hi + 1, x_lo:x_hi + 1] = 0
    return ind


def add_pair_indicator(total: np.ndarray, a: int, b: int, other: tuple[int, int, int, int]) -> None:
    """Add the nodes where a center (a, b) would overlap a placed rectangle.

    ``other`` is ``(cx, cy, a_j, b_j)``; the marked block is the open
    Minkowski sum, i.e. ``|dx| <= a+a_j-1`` and ``|dy| <= b+b_j-1``.
    """
    cx, cy, aj, bj = other
    sx, sy = a + aj - 1, b + bj - 1
    n1 = total.shape[0]
    x0, x1 = max(cx - sx, 0), min(cx + sx, n1 - 1)
    y0, y1 = max(cy - sy, 0), min(cy + sy, n1 - 1)
    if x0 <= x1 and y0 <= y1:
        total[y0:y1 + 1, x0:x1 + 1] += 1


def integrated_indicator(component_id: int, placed: Sequence[Placement], catalog: Catalog,
                         grid: GridSystem, window=None) -> np.ndarray:
    """Sum of the container indicator and one indicator per placed component."""
    a, b = half_extents(catalog, component_id, grid)
    total = container_indicator(a, b, grid, window)
    for p in placed:
        aj, bj = half_extents(catalog, p.component_id, grid)
        add_pair_indicator(total, a, b, (p.cx, p.cy, aj, bj))
    return total


def _attempt(order, extents, fixed, grid, window, rng):
    placed = [(p.cx, p.cy) + extents[p.component_id] for p in fixed]
    chosen = []
    for cid in order:
        a, b = extents[cid]
        total = container_indicator(a, b, grid, window)
        for other in placed:
            add_pair_indicator(total, a, b, other)
        free = np.flatnonzero(total == 0)
        if free.size == 0:
            return None
        node = int(free[rng.integers(free.size)])
        cy, cx = divmod(node, grid.cells + 1)
        placed.append((cx, cy, a, b))
        chosen.append(Placement(cid, cx, cy))
    return chosen


def seqls_sample(rng: np.random.Generator, config: SeqLSConfig = SeqLSConfig(),
                 catalog: Catalog = CATALOG, grid: GridSystem = DEFAULT_GRID,
                 fixed: Sequence[Placement] = ()) -> SeqLSResult:
    """Draw one feasible layout.

    ``fixed`` placements are kept in every attempt and act as obstacles; the
    returned layout lists them first.  Each full attempt counts once in
    ``attempts``, so ``1/attempts`` is the per-sample success rate.

    Raises ``SamplingError`` after ``config.max_restarts`` failed attempts.
    """
    order = resolve_sequence(config, catalog, grid, fixed)
    extents = {cid: half_extents(catalog, cid, grid) for cid in catalog}
    fixed = tuple(fixed)
    for p in fixed:
        if p.component_id not in catalog:
            raise LayoutError(f"unknown component id {p.component_id}")
    for attempt in range(1, config.max_restarts + 1):
        chosen = _attempt(order, extents, fixed, grid, config.window, rng)
        if chosen is not None:
            return SeqLSResult(Layout(fixed + tuple(chosen), grid), attempt)
    raise SamplingError(
        f"no feasible layout after {config.max_restarts} attempts (window={config.window})",
        attempts=config.max_restarts,
    )


def seqls_batch(n: int, base_seed: int, config: SeqLSConfig = SeqLSConfig(),
                catalog: Catalog = CATALOG, grid: GridSystem = DEFAULT_GRID,
                tag: str = "seqls") -> tuple[list[Layout], int]:
    """Draw ``n`` layouts, sample ``i`` seeded by ``derive_seed(base_seed, tag, i)``.

    Returns the layouts and the total number of attempts spent.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    layouts, attempts = [], 0
    for i in range(n):
        result = seqls_sample(derive_rng(base_seed, tag, i), config, catalog, grid)
        layouts.append(result.layout)
        attempts += result.attempts
    logger.debug("seqls_batch: %d layouts in %d attempts", n, attempts)
    return layouts, attempts
