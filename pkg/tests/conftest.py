import numpy as np
import pytest

from hsld.geometry import CATALOG, DEFAULT_GRID


def brute_force_violations(layout, catalog=CATALOG):
    """Independent checker: rebuilds every rectangle in physical units.

    Two components overlap iff the open intervals of both axes intersect;
    containment is checked against [0, L] with a rounding guard.
    """
    h = layout.grid.cell_size
    side = layout.grid.side_length
    eps = 1e-12
    rects = []
    count = 0
    for p in layout.placements:
        spec = catalog[p.component_id]
        x, y = p.cx * h, p.cy * h
        r = (x - spec.length / 2, x + spec.length / 2, y - spec.width / 2, y + spec.width / 2)
        if r[0] < -eps or r[1] > side + eps or r[2] < -eps or r[3] > side + eps:
            count += 1
        rects.append(r)
    for i in range(len(rects)):
        for j in range(i + 1, len(rects)):
            a, b = rects[i], rects[j]
            if min(a[1], b[1]) - max(a[0], b[0]) > eps and min(a[3], b[3]) - max(a[2], b[2]) > eps:
                count += 1
    return count


def normalized_centers(layouts, catalog=CATALOG, grid=DEFAULT_GRID):
    """(n, 12, 2) array of centers mapped to [0, 1] over each feasible range."""
    ids = sorted(catalog)
    out = np.empty((len(layouts), len(ids), 2))
    for k, layout in enumerate(layouts):
        c = layout.centers()
        for j, cid in enumerate(ids):
            a, b = catalog[cid].half_extents(grid)
            cx, cy = c[cid]
            out[k, j] = ((cx - a) / (grid.cells - 2 * a), (cy - b) / (grid.cells - 2 * b))
    return out


@pytest.fixture(scope="session")
def seqls_10k():
    from hsld.seqls import seqls_batch

    return seqls_batch(10_000, base_seed=2024)


@pytest.fixture(scope="session")
def gibls_10k():
    from hsld.gibls import GibLSConfig, gibls_chain

    return gibls_chain(np.random.default_rng(2025), GibLSConfig(n=10_000, burn_in=100, interval=5))


# one (criterion, passed, detail) entry per acceptance check, printed at session end
ACCEPTANCE: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
