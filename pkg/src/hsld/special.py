"""Hard test-sample families: corner, group and part-space layouts.

All three are built on sequential sampling: the heuristic places some
components (or restricts the center window) and the rest are filled in by
``seqls_sample`` in descending-area order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from hsld.geometry import (
    CATALOG,
    DEFAULT_GRID,
    Catalog,
    GridSystem,
    Layout,
    Placement,
    half_extents,
)
from hsld.seqls import SamplingError, SeqLSConfig, container_indicator, integrated_indicator, seqls_sample

# members in placement order; each group shares one intensity
GROUPS: dict[str, tuple[int, ...]] = {
    "G1": (4, 9),
    "G2": (5, 11),
    "G3": (8, 12),
    "G4": (2, 7, 10),
}

CORNERS = ("bottom-left", "bottom-right", "top-left", "top-right")

HALF_WINDOW_OFFSETS = (0, 20, 40, 60, 80, 100)
SQUARE_WINDOW_SIDES = (140, 120, 100)


@dataclass(frozen=True)
class Window:
    """Closed node rectangle that component centers must lie in."""

    x_min: int
    x_max: int
    y_min: int
    y_max: int

    def validate(self, grid: GridSystem) -> None:
        n = grid.cells
        if not (0 <= self.x_min <= self.x_max <= n and 0 <= self.y_min <= self.y_max <= n):
            raise ValueError(f"window {self} does not fit a {n}-cell grid")

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.x_min, self.x_max, self.y_min, self.y_max)

    def contains(self, p: Placement) -> bool:
        return self.x_min <= p.cx <= self.x_max and self.y_min <= p.cy <= self.y_max

    @classmethod
    def full(cls, grid: GridSystem = DEFAULT_GRID) -> "Window":
        return cls(0, grid.cells, 0, grid.cells)

    @classmethod
    def half_x(cls, offset: int, grid: GridSystem = DEFAULT_GRID) -> "Window":
        """Vertical strip half the domain wide, starting at column ``offset``."""
        return cls(offset, offset + grid.cells // 2, 0, grid.cells)

    @classmethod
    def half_y(cls, offset: int, grid: GridSystem = DEFAULT_GRID) -> "Window":
        """Horizontal strip half the domain tall, starting at row ``offset``."""
        return cls(0, grid.cells, offset, offset + grid.cells // 2)

    @classmethod
    def random_square(cls, side: int, rng: np.random.Generator,
                      grid: GridSystem = DEFAULT_GRID) -> "Window":
        x0, y0 = (int(v) for v in rng.integers(0, grid.cells - side + 1, size=2))
        return cls(x0, x0 + side, y0, y0 + side)


def group_intensity(group: tuple[int, ...], catalog: Catalog = CATALOG) -> float:
    values = {catalog[cid].intensity for cid in group}
    if len(values) != 1:
        raise ValueError(f"group {group} mixes intensities {sorted(values)}")
    return values.pop()


def _pick_node(mask: np.ndarray, rng: np.random.Generator, grid: GridSystem):
    nodes = np.flatnonzero(mask)
    if nodes.size == 0:
        return None
    cy, cx = divmod(int(nodes[rng.integers(nodes.size)]), grid.cells + 1)
    return cx, cy


def corner_sample(rng: np.random.Generator, jitter_max: int = 10, *, corner: str | None = None,
                  component_id: int = 12, catalog: Catalog = CATALOG,
                  grid: GridSystem = DEFAULT_GRID, max_restarts: int = 10_000) -> Layout:
    """Largest component near a corner, the rest sampled sequentially.

    The corner is uniform over the four (unless given); the center is the
    flush-corner node moved inward by independent uniform offsets in
    ``[0, jitter_max]`` cells per axis.
    """
    a, b = half_extents(catalog, component_id, grid)
    n = grid.cells
    if jitter_max < 0 or a + jitter_max > n - a or b + jitter_max > n - b:
        raise ValueError(f"jitter_max={jitter_max} would push component {component_id} out")
    if corner is None:
        corner = CORNERS[int(rng.integers(4))]
    jx, jy = (int(v) for v in rng.integers(0, jitter_max + 1, size=2))
    cx = a + jx if "left" in corner else n - a - jx
    cy = b + jy if "bottom" in corner else n - b - jy
    fixed = (Placement(component_id, cx, cy),)
    return seqls_sample(rng, SeqLSConfig(max_restarts=max_restarts), catalog, grid, fixed).layout


def contact_locus(component_id: int, placed: list[Placement], catalog: Catalog = CATALOG,
                  grid: GridSystem = DEFAULT_GRID) -> np.ndarray:
    """Nodes where ``component_id`` would touch some placed member without overlap.

    Boolean ``(N+1, N+1)`` mask indexed ``[cy, cx]``: the perimeters of the
    expanded rectangles around ``placed``, restricted to centers that fit
    the container and overlap no placed member.
    """
    a, b = half_extents(catalog, component_id, grid)
    n1 = grid.cells + 1
    ring = np.zeros((n1, n1), dtype=bool)
    for p in placed:
        aj, bj = half_extents(catalog, p.component_id, grid)
        sx, sy = a + aj, b + bj
        x0, x1 = max(p.cx - sx, 0), min(p.cx + sx, n1 - 1)
        y0, y1 = max(p.cy - sy, 0), min(p.cy + sy, n1 - 1)
        for x in (p.cx - sx, p.cx + sx):
            if 0 <= x < n1:
                ring[y0:y1 + 1, x] = True
        for y in (p.cy - sy, p.cy + sy):
            if 0 <= y < n1:
                ring[y, x0:x1 + 1] = True
    return ring & (integrated_indicator(component_id, placed, catalog, grid) == 0)


def group_sample(group: str | tuple[int, ...], rng: np.random.Generator, *,
                 catalog: Catalog = CATALOG, grid: GridSystem = DEFAULT_GRID,
                 group_retries: int = 100, max_restarts: int = 10_000) -> Layout:
    """Equal-intensity members placed in a touching chain, the rest sequentially.

    The first member is uniform over its container-feasible nodes; each next
    member is uniform over the contact locus of the members placed so far.
    An empty locus redraws the whole group, up to ``group_retries`` times.
    """
    members = GROUPS[group] if isinstance(group, str) else tuple(group)
    group_intensity(members, catalog)
    for _ in range(group_retries):
        placed: list[Placement] = []
        first = members[0]
        a, b = half_extents(catalog, first, grid)
        node = _pick_node(container_indicator(a, b, grid) == 0, rng, grid)
        placed.append(Placement(first, *node))
        for cid in members[1:]:
            node = _pick_node(contact_locus(cid, placed, catalog, grid), rng, grid)
            if node is None:
                break
            placed.append(Placement(cid, *node))
        else:
            config = SeqLSConfig(max_restarts=max_restarts)
            return seqls_sample(rng, config, catalog, grid, tuple(placed)).layout
    raise SamplingError(f"group {members}: no contact position in {group_retries} tries")


def part_space_sample(window: Window, rng: np.random.Generator, *, catalog: Catalog = CATALOG,
                      grid: GridSystem = DEFAULT_GRID, max_restarts: int = 10_000) -> Layout:
    """Sequential sampling with every center confined to ``window``."""
    window.validate(grid)
    config = SeqLSConfig(max_restarts=max_restarts, window=window.as_tuple())
    return seqls_sample(rng, config, catalog, grid).layout


def parse_kind(kind: str) -> tuple[str, str | int | None]:
    """Parse ``corner``, ``group:G1``, ``half-x:OFF``, ``half-y:OFF`` or ``square:SIDE``."""
    name, _, arg = kind.partition(":")
    if name == "corner" and not arg:
        return name, None
    if name == "group" and arg in GROUPS:
        return name, arg
    if name in ("half-x", "half-y", "square") and arg.isdigit():
        return name, int(arg)
    raise ValueError(f"unknown special sample kind {kind!r}")


def special_sample(kind: str, rng: np.random.Generator, *, catalog: Catalog = CATALOG,
                   grid: GridSystem = DEFAULT_GRID, jitter_max: int = 10) -> Layout:
    """Draw one layout of the family named by ``kind`` (see ``parse_kind``)."""
    name, arg = parse_kind(kind)
    if name == "corner":
        return corner_sample(rng, jitter_max, catalog=catalog, grid=grid)
    if name == "group":
        return group_sample(arg, rng, catalog=catalog, grid=grid)
    if name == "half-x":
        window = Window.half_x(arg, grid)
    elif name == "half-y":
        window = Window.half_y(arg, grid)
    else:
        window = Window.random_square(arg, rng, grid)
    return part_space_sample(window, rng, catalog=catalog, grid=grid)
