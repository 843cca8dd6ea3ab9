"""Grid conventions, the component catalog and layout predicates.

Coordinates
-----------
The square container of side ``L`` is split into ``N x N`` cells of size
``h = L / N``.  Component centers sit on grid *nodes* ``(cx, cy)`` with
integer coordinates in ``[0, N]``; the physical center is ``(cx*h, cy*h)``.
A component of half-extents ``(a, b)`` cells covers cell columns
``cx-a .. cx+a-1`` and cell rows ``cy-b .. cy+b-1``.

Matrices are row-major with row 0 at the bottom (``y = 0``) and column 0 at
the left (``x = 0``).  A component's length is its x-extent and its width
its y-extent.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping

import numpy as np


class LayoutError(ValueError):
    """Raised for unknown components or layouts violating their invariants."""


@dataclass(frozen=True)
class GridSystem:
    side_length: float = 0.1
    cells: int = 200

    def __post_init__(self):
        if self.cells < 2:
            raise ValueError(f"need at least 2 cells per side, got {self.cells}")
        if self.side_length <= 0:
            raise ValueError("side length must be positive")

    @property
    def cell_size(self) -> float:
        return self.side_length / self.cells

    def cell_centers(self) -> np.ndarray:
        return (np.arange(self.cells) + 0.5) * self.cell_size


@dataclass(frozen=True)
class ComponentSpec:
    id: int
    length: float
    width: float
    intensity: float

    def __post_init__(self):
        if min(self.length, self.width, self.intensity) <= 0:
            raise ValueError(f"component {self.id}: sizes and intensity must be positive")

    def half_extents(self, grid: GridSystem) -> tuple[int, int]:
        """Half length and half width in whole cells."""
        out = []
        for size in (self.length, self.width):
            half = size / (2 * grid.cell_size)
            rounded = round(half)
            if rounded < 1 or abs(half - rounded) > 1e-9:
                raise LayoutError(
                    f"component {self.id}: size {size} m is not an even number of "
                    f"{grid.cell_size} m cells"
                )
            out.append(int(rounded))
        return out[0], out[1]

    def area_cells(self, grid: GridSystem) -> int:
        a, b = self.half_extents(grid)
        return 4 * a * b


Catalog = Mapping[int, ComponentSpec]

# id: (length m, width m, intensity W/m^2)
_TABLE = {
    1: (0.016, 0.012, 4000.0),
    2: (0.012, 0.006, 16000.0),
    3: (0.018, 0.009, 6000.0),
    4: (0.018, 0.012, 8000.0),
    5: (0.018, 0.018, 10000.0),
    6: (0.012, 0.012, 14000.0),
    7: (0.018, 0.006, 16000.0),
    8: (0.009, 0.009, 20000.0),
    9: (0.006, 0.024, 8000.0),
    10: (0.006, 0.012, 16000.0),
    11: (0.012, 0.024, 10000.0),
    12: (0.024, 0.024, 20000.0),
}

CATALOG: dict[int, ComponentSpec] = {
    cid: ComponentSpec(cid, length, width, q) for cid, (length, width, q) in _TABLE.items()
}

DEFAULT_GRID = GridSystem()


@dataclass(frozen=True)
class Placement:
    component_id: int
    cx: int
    cy: int


@dataclass(frozen=True)
class Layout:
    placements: tuple[Placement, ...]
    grid: GridSystem = DEFAULT_GRID

    def __post_init__(self):
        object.__setattr__(self, "placements", tuple(self.placements))
        ids = [p.component_id for p in self.placements]
        if len(set(ids)) != len(ids):
            raise LayoutError(f"duplicated component ids in layout: {sorted(ids)}")

    def __len__(self):
        return len(self.placements)

    def __iter__(self):
        return iter(self.placements)

    def get(self, component_id: int) -> Placement:
        for p in self.placements:
            if p.component_id == component_id:
                return p
        raise KeyError(component_id)

    def centers(self) -> dict[int, tuple[int, int]]:
        return {p.component_id: (p.cx, p.cy) for p in self.placements}


def _spec(catalog: Catalog, component_id: int) -> ComponentSpec:
    try:
        return catalog[component_id]
    except KeyError:
        raise LayoutError(f"unknown component id {component_id}") from None


def half_extents(catalog: Catalog, component_id: int, grid: GridSystem = DEFAULT_GRID):
    return _spec(catalog, component_id).half_extents(grid)


def descending_area_order(catalog: Catalog, grid: GridSystem = DEFAULT_GRID,
                          ids: Iterable[int] | None = None) -> list[int]:
    """Ids sorted by decreasing area; equal areas keep ascending id order."""
    ids = sorted(catalog if ids is None else ids)
    return sorted(ids, key=lambda cid: -_spec(catalog, cid).area_cells(grid))


def overlaps(p1: Placement, p2: Placement, catalog: Catalog = CATALOG,
             grid: GridSystem = DEFAULT_GRID) -> bool:
    """True iff the open rectangles intersect; touching is not overlap."""
    a1, b1 = half_extents(catalog, p1.component_id, grid)
    a2, b2 = half_extents(catalog, p2.component_id, grid)
    return abs(p1.cx - p2.cx) < a1 + a2 and abs(p1.cy - p2.cy) < b1 + b2


def fits_container(p: Placement, catalog: Catalog = CATALOG,
                   grid: GridSystem = DEFAULT_GRID) -> bool:
    a, b = half_extents(catalog, p.component_id, grid)
    n = grid.cells
    return a <= p.cx <= n - a and b <= p.cy <= n - b


def contact(p1: Placement, p2: Placement, catalog: Catalog = CATALOG,
            grid: GridSystem = DEFAULT_GRID) -> bool:
    """True iff the closed rectangles meet while the interiors stay disjoint."""
    a1, b1 = half_extents(catalog, p1.component_id, grid)
    a2, b2 = half_extents(catalog, p2.component_id, grid)
    dx, dy = abs(p1.cx - p2.cx), abs(p1.cy - p2.cy)
    sx, sy = a1 + a2, b1 + b2
    return dx <= sx and dy <= sy and (dx == sx or dy == sy)


def find_violations(layout: Layout, catalog: Catalog = CATALOG) -> list[str]:
    """Brute-force check of containment and every pair for overlap.

    Returns human-readable descriptions; an empty list means feasible.
    """
    grid = layout.grid
    problems = []
    for p in layout.placements:
        if not fits_container(p, catalog, grid):
            problems.append(f"component {p.component_id} at ({p.cx},{p.cy}) leaves the container")
    for p, q in combinations(layout.placements, 2):
        if overlaps(p, q, catalog, grid):
            problems.append(f"components {p.component_id} and {q.component_id} overlap")
    return problems


def check_layout(layout: Layout, catalog: Catalog = CATALOG) -> None:
    problems = find_violations(layout, catalog)
    if problems:
        raise LayoutError("; ".join(problems))


def rasterize(layout: Layout, catalog: Catalog = CATALOG, check: bool = True) -> np.ndarray:
    """Render a layout to its ``N x N`` intensity matrix (W/m^2)."""
    if check:
        check_layout(layout, catalog)
    grid = layout.grid
    phi = np.zeros((grid.cells, grid.cells))
    for p in layout.placements:
        a, b = half_extents(catalog, p.component_id, grid)
        phi[p.cy - b:p.cy + b, p.cx - a:p.cx + a] = catalog[p.component_id].intensity
    return phi


def component_masks(layout: Layout, catalog: Catalog = CATALOG) -> dict[int, np.ndarray]:
    """Boolean cell mask of each placed component, same cells as ``rasterize``."""
    grid = layout.grid
    masks = {}
    for p in layout.placements:
        a, b = half_extents(catalog, p.component_id, grid)
        m = np.zeros((grid.cells, grid.cells), dtype=bool)
        m[p.cy - b:p.cy + b, p.cx - a:p.cx + a] = True
        masks[p.component_id] = m
    return masks


# --- serialization -----------------------------------------------------------

def layout_to_dict(layout: Layout) -> dict:
    return {
        "grid": {"L": layout.grid.side_length, "N": layout.grid.cells},
        "placements": [
            {"id": p.component_id, "cx": p.cx, "cy": p.cy} for p in layout.placements
        ],
    }


def layout_from_dict(data: dict) -> Layout:
    try:
        g = data.get("grid", {})
        grid = GridSystem(float(g.get("L", 0.1)), int(g.get("N", 200)))
        placements = [
            Placement(int(item["id"]), int(item["cx"]), int(item["cy"]))
            for item in data["placements"]
        ]
    except (KeyError, TypeError, AttributeError) as exc:
        raise LayoutError(f"malformed layout record: {exc}") from None
    return Layout(tuple(placements), grid)


def layout_to_json(layout: Layout) -> str:
    return json.dumps(layout_to_dict(layout), indent=1) + "\n"


def layout_from_json(text: str) -> Layout:
    return layout_from_dict(json.loads(text))


def layout_to_csv(layout: Layout) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["id", "cx", "cy"])
    for p in layout.placements:
        writer.writerow([p.component_id, p.cx, p.cy])
    return buf.getvalue()


def layout_from_csv(text: str, grid: GridSystem = DEFAULT_GRID) -> Layout:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != ["id", "cx", "cy"]:
        raise LayoutError(f"expected header id,cx,cy, got {reader.fieldnames}")
    return Layout(
        tuple(Placement(int(r["id"]), int(r["cx"]), int(r["cy"])) for r in reader), grid
    )


def load_layout(path) -> Layout:
    from pathlib import Path

    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".csv":
        return layout_from_csv(text)
    return layout_from_json(text)
