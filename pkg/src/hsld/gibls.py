"""Gibbs layout sampling.

The layout state is the vector of all component center coordinates.  One
iteration resamples every coordinate in turn (components by ascending id,
x before y), each uniformly over the grid nodes where that coordinate keeps
the layout feasible while everything else stays put.  The feasible set of a
single coordinate is a union of closed integer segments.
"""

from __future__ import annotations

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
    check_layout,
    half_extents,
)

Segments = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class GibLSConfig:
    n: int = 1
    burn_in: int = 100
    interval: int = 5
    initial_layout: Layout | None = None

    def __post_init__(self):
        if self.burn_in < 0 or self.interval < 1 or self.n < 1:
            raise ValueError("need burn_in >= 0, interval >= 1 and n >= 1")

    @property
    def iterations(self) -> int:
        return self.burn_in + 1 + (self.n - 1) * self.interval


def _free_segments(lo: int, hi: int, blocks: list[tuple[int, int]]) -> Segments:
    """``[lo, hi]`` minus the union of the closed integer ``blocks``."""
    out = []
    cur = lo
    for b0, b1 in sorted(blocks):
        if b1 < cur:
            continue
        if b0 > hi:
            break
        if b0 > cur:
            out.append((cur, b0 - 1))
        cur = max(cur, b1 + 1)
        if cur > hi:
            break
    if cur <= hi:
        out.append((cur, hi))
    return tuple(out)


def _segments_for(i: int, axis: int, xs, ys, ax, by, n: int) -> Segments:
    # axis 0 varies x; the blocking test is on the other coordinate
    if axis == 0:
        pos, perp, ext, pext = xs, ys, ax, by
    else:
        pos, perp, ext, pext = ys, xs, by, ax
    e_i, p_i, q_i = ext[i], perp[i], pext[i]
    blocks = []
    for j in range(len(xs)):
        if j != i and abs(perp[j] - p_i) < q_i + pext[j]:
            s = e_i + ext[j]
            blocks.append((pos[j] - s + 1, pos[j] + s - 1))
    return _free_segments(e_i, n - e_i, blocks)


def feasible_segments(layout: Layout, component_id: int, axis: str,
                      catalog: Catalog = CATALOG) -> Segments:
    """Feasible values of one coordinate with all other coordinates fixed.

    ``axis`` is ``"x"`` or ``"y"``.  The result always contains the current
    value for a feasible layout.
    """
    check_layout(layout, catalog)
    if axis not in ("x", "y"):
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    ids = [p.component_id for p in layout.placements]
    try:
        i = ids.index(component_id)
    except ValueError:
        raise LayoutError(f"component {component_id} is not in the layout") from None
    grid = layout.grid
    ext = [half_extents(catalog, cid, grid) for cid in ids]
    xs = [p.cx for p in layout.placements]
    ys = [p.cy for p in layout.placements]
    return _segments_for(i, 0 if axis == "x" else 1, xs, ys,
                         [e[0] for e in ext], [e[1] for e in ext], grid.cells)


def draw_from_segments(segments: Segments, u: float) -> int:
    """Map ``u`` in [0, 1) to a node, uniform over all nodes of ``segments``."""
    total = sum(hi - lo + 1 for lo, hi in segments)
    k = min(int(u * total), total - 1)
    for lo, hi in segments:
        size = hi - lo + 1
        if k < size:
            return lo + k
        k -= size
    raise AssertionError("unreachable")


def gibls_chain(rng: np.random.Generator, config: GibLSConfig = GibLSConfig(),
                catalog: Catalog = CATALOG, grid: GridSystem = DEFAULT_GRID) -> list[Layout]:
    """Run one chain and return the ``config.n`` saved layouts.

    The first ``burn_in`` iterations are discarded; afterwards iteration
    ``k`` is saved when ``(k - burn_in - 1) % interval == 0``.  Without an
    initial layout the chain starts from one sequential-sampling draw taken
    from ``rng``.
    """
    init = config.initial_layout
    if init is None:
        from hsld.seqls import seqls_sample

        init = seqls_sample(rng, catalog=catalog, grid=grid).layout
    check_layout(init, catalog)
    grid = init.grid

    placements = sorted(init.placements, key=lambda p: p.component_id)
    ids = [p.component_id for p in placements]
    xs = [p.cx for p in placements]
    ys = [p.cy for p in placements]
    ext = [half_extents(catalog, cid, grid) for cid in ids]
    ax = [e[0] for e in ext]
    by = [e[1] for e in ext]
    n_cells = grid.cells
    m = len(ids)

    saved: list[Layout] = []
    k = 0
    while len(saved) < config.n:
        us = rng.random(2 * m)
        for i in range(m):
            xs[i] = draw_from_segments(_segments_for(i, 0, xs, ys, ax, by, n_cells), us[2 * i])
            ys[i] = draw_from_segments(_segments_for(i, 1, xs, ys, ax, by, n_cells), us[2 * i + 1])
        k += 1
        if k <= config.burn_in:
            continue
        if (k - config.burn_in - 1) % config.interval == 0:
            saved.append(Layout(tuple(Placement(c, x, y) for c, x, y in zip(ids, xs, ys)), grid))
    return saved


def chain_states(layouts: Sequence[Layout]) -> np.ndarray:
    """Stack saved layouts into an ``(n, m, 2)`` integer array ordered by id."""
    return np.array([[(p.cx, p.cy) for p in sorted(l.placements, key=lambda q: q.component_id)]
                     for l in layouts])
