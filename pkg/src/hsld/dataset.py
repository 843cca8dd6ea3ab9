"""Dataset assembly and dataset-level evaluation.

A dataset directory holds ``manifest.json`` and one sub-directory per split
with three files per sample: ``<id>.layout.json``, ``<id>.input.hsld``
(intensity field) and ``<id>.label.hsld`` (temperature field).

Splits and their generators:

======  ===========================================  =======
split   generator                                    default
======  ===========================================  =======
train   sequential sampling                          2000
test1   sequential sampling                          10000
test2   one Gibbs chain                              10000
test3   corner samples                               1000
test4   group samples, groups G1-G4 in rotation      4000
test5   200x100 strips (half-y), 6 offsets           6000
test6   100x200 strips (half-x), 6 offsets           6000
test7   140x140 random windows                       1000
test8   120x120 random windows                       1000
test9   100x100 random windows                       1000
======  ===========================================  =======

Sample ``i`` of a split is seeded with ``derive_seed(base_seed, split, i)``,
so layouts do not depend on the case and one seed gives the same layouts
for all three cases.
"""

from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from pathlib import Path

import numpy as np

from hsld.geometry import CATALOG, DEFAULT_GRID, Catalog, GridSystem, Layout, layout_from_json, layout_to_json, rasterize
from hsld.gibls import GibLSConfig, gibls_chain
from hsld.io import LABEL_SUFFIX, StandardizationParams, load_matrix, save_matrix
from hsld.metrics import MetricsReport, evaluate_pair, spearman_batches
from hsld.seeds import derive_rng, derive_seed
from hsld.seqls import seqls_sample
from hsld.solver import CaseConfig, SolveSettings, solve
from hsld.special import GROUPS, HALF_WINDOW_OFFSETS, SQUARE_WINDOW_SIDES, special_sample

logger = logging.getLogger(__name__)

MANIFEST_FORMAT = "hsld-manifest/1"
INCOMPLETE_MARKER = "INCOMPLETE"

DEFAULT_COMPOSITION = {
    "train": 2000,
    "test1": 10000,
    "test2": 10000,
    "test3": 1000,
    "test4": 4000,
    "test5": 6000,
    "test6": 6000,
    "test7": 1000,
    "test8": 1000,
    "test9": 1000,
}

SPLIT_KINDS: dict[str, tuple[str, ...]] = {
    "train": ("seqls",),
    "test1": ("seqls",),
    "test2": ("gibls",),
    "test3": ("corner",),
    "test4": tuple(f"group:{g}" for g in GROUPS),
    "test5": tuple(f"half-y:{o}" for o in HALF_WINDOW_OFFSETS),
    "test6": tuple(f"half-x:{o}" for o in HALF_WINDOW_OFFSETS),
    "test7": (f"square:{SQUARE_WINDOW_SIDES[0]}",),
    "test8": (f"square:{SQUARE_WINDOW_SIDES[1]}",),
    "test9": (f"square:{SQUARE_WINDOW_SIDES[2]}",),
}

GIBLS_BURN_IN = 100
GIBLS_INTERVAL = 5


def thread_count(threads: int | None = None) -> int:
    if threads is None:
        threads = int(os.environ.get("HSLD_THREADS", "1") or 1)
    return max(1, threads)


def validate_composition(composition: dict) -> dict[str, int]:
    unknown = set(composition) - set(SPLIT_KINDS)
    if unknown:
        raise ValueError(f"unknown splits in composition: {sorted(unknown)}")
    out = {}
    for split in SPLIT_KINDS:
        count = composition.get(split, 0)
        if not isinstance(count, int) or count < 0:
            raise ValueError(f"split {split}: count must be a non-negative integer, got {count!r}")
        if count:
            out[split] = count
    return out


def plan_dataset(case_id: int, composition: dict | None = None, base_seed: int = 0) -> list[dict]:
    """Sample records of a dataset without generating anything."""
    composition = validate_composition(DEFAULT_COMPOSITION if composition is None else composition)
    records = []
    for split, count in composition.items():
        kinds = SPLIT_KINDS[split]
        chain_seed = derive_seed(base_seed, split, 0)
        for i in range(count):
            sid = f"{split}_{i:05d}"
            kind = kinds[i % len(kinds)]
            if kind == "gibls":
                generator = {"kind": kind, "seed": chain_seed, "chain_index": i,
                             "burn_in": GIBLS_BURN_IN, "interval": GIBLS_INTERVAL}
            else:
                generator = {"kind": kind, "seed": derive_seed(base_seed, split, i)}
            records.append({
                "id": sid,
                "split": split,
                "layout": f"{split}/{sid}.layout.json",
                "input": f"{split}/{sid}.input.hsld",
                "label": f"{split}/{sid}{LABEL_SUFFIX}",
                "generator": generator,
            })
    return records


def generate_layout(generator: dict, catalog: Catalog = CATALOG,
                    grid: GridSystem = DEFAULT_GRID) -> Layout:
    """Regenerate one non-Gibbs sample from its manifest generator record."""
    rng = np.random.default_rng(generator["seed"])
    kind = generator["kind"]
    if kind == "seqls":
        return seqls_sample(rng, catalog=catalog, grid=grid).layout
    if kind == "gibls":
        config = GibLSConfig(n=generator["chain_index"] + 1, burn_in=generator["burn_in"],
                             interval=generator["interval"])
        return gibls_chain(rng, config, catalog, grid)[-1]
    return special_sample(kind, rng, catalog=catalog, grid=grid)


def _generate_layouts(records, catalog, grid, threads):
    layouts: list[Layout | None] = [None] * len(records)
    chains: dict[int, list[int]] = {}
    plain = []
    for pos, rec in enumerate(records):
        if rec["generator"]["kind"] == "gibls":
            chains.setdefault(rec["generator"]["seed"], []).append(pos)
        else:
            plain.append(pos)
    for seed, positions in chains.items():
        first = records[positions[0]]["generator"]
        config = GibLSConfig(n=len(positions), burn_in=first["burn_in"], interval=first["interval"])
        chain = gibls_chain(np.random.default_rng(seed), config, catalog, grid)
        for pos, layout in zip(positions, chain):
            layouts[pos] = layout
    with ThreadPoolExecutor(threads) as pool:
        for pos, layout in zip(plain, pool.map(lambda p: generate_layout(records[p]["generator"], catalog, grid), plain)):
            layouts[pos] = layout
    return layouts


def assemble_dataset(case: CaseConfig | int, out_dir, composition: dict | None = None,
                     base_seed: int = 0, *, catalog: Catalog = CATALOG,
                     grid: GridSystem = DEFAULT_GRID, settings: SolveSettings = SolveSettings(),
                     threads: int | None = None) -> dict:
    """Generate, solve and write a dataset; return the manifest.

    An ``INCOMPLETE`` marker sits in ``out_dir`` until the manifest is
    written, and stays there (with the error message) if anything fails.
    """
    if isinstance(case, int):
        case = CaseConfig(case)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    marker = out_dir / INCOMPLETE_MARKER
    marker.write_text("generation in progress\n")
    composition = validate_composition(DEFAULT_COMPOSITION if composition is None else composition)
    records = plan_dataset(case.case_id, composition, base_seed)
    threads = thread_count(threads)
    try:
        layouts = _generate_layouts(records, catalog, grid, threads)
        for split in composition:
            (out_dir / split).mkdir(exist_ok=True)

        def write(item):
            rec, layout = item
            phi = rasterize(layout, catalog)
            temp = solve(phi, case, settings, grid)
            (out_dir / rec["layout"]).write_text(layout_to_json(layout))
            save_matrix(out_dir / rec["input"], phi)
            save_matrix(out_dir / rec["label"], temp)

        with ThreadPoolExecutor(threads) as pool:
            for done, _ in enumerate(pool.map(write, zip(records, layouts)), 1):
                if done % 500 == 0:
                    logger.info("%d/%d samples written", done, len(records))
    except Exception as exc:
        marker.write_text(f"failed: {exc}\n")
        raise

    manifest = {
        "format": MANIFEST_FORMAT,
        "case": case.case_id,
        "case_config": asdict(case),
        "base_seed": base_seed,
        "grid": {"L": grid.side_length, "N": grid.cells},
        "standardization": asdict(StandardizationParams.for_case(case.case_id)),
        "composition": composition,
        "samples": records,
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")
    marker.unlink()
    return manifest


def load_manifest(path) -> dict:
    manifest = json.loads(Path(path).read_text())
    if manifest.get("format") != MANIFEST_FORMAT:
        raise ValueError(f"{path}: not an {MANIFEST_FORMAT} manifest")
    return manifest


def check_manifest(root, manifest: dict) -> list[str]:
    """Problems with the files a manifest references (empty list when consistent)."""
    root = Path(root)
    n = manifest["grid"]["N"]
    ids = [rec["id"] for rec in manifest["samples"]]
    problems = [] if len(set(ids)) == len(ids) else ["duplicate sample ids"]
    for rec in manifest["samples"]:
        try:
            layout_from_json((root / rec["layout"]).read_text())
            for key in ("input", "label"):
                shape = load_matrix(root / rec[key]).shape
                if shape != (n, n):
                    problems.append(f"{rec[key]}: shape {shape}, expected {(n, n)}")
        except (OSError, ValueError) as exc:
            problems.append(f"{rec['id']}: {exc}")
    return problems


def _aggregate(reports: list[MetricsReport]) -> dict:
    mean, std = {}, {}
    for name in MetricsReport.FIELDS:
        values = [getattr(r, name) for r in reports if getattr(r, name) is not None]
        mean[name] = float(np.mean(values)) if values else None
        std[name] = float(np.std(values)) if values else None
    return {"count": len(reports), "mean": mean, "std": std}


def evaluate_dataset(truth_dir, pred_dir, manifest: dict | str | Path | None = None,
                     case: CaseConfig | int | None = None, batch_size: int = 100,
                     catalog: Catalog = CATALOG) -> dict:
    """Score predictions against a dataset.

    Predictions are looked up under ``pred_dir`` at the labels' relative
    paths.  Per-split aggregates carry mean and standard deviation of every
    metric, plus batch Spearman statistics when the split holds at least one
    full batch.
    """
    truth_dir, pred_dir = Path(truth_dir), Path(pred_dir)
    if manifest is None:
        manifest = truth_dir / "manifest.json"
    if not isinstance(manifest, dict):
        manifest = load_manifest(manifest)
    if case is None:
        case = manifest["case"]
    if isinstance(case, int):
        case = CaseConfig(**manifest["case_config"]) if case == manifest["case"] else CaseConfig(case)
    if case.case_id != manifest["case"]:
        raise ValueError(f"manifest is for case {manifest['case']}, not case {case.case_id}")

    per_sample, by_split, maxima = [], {}, {}
    for rec in manifest["samples"]:
        truth = load_matrix(truth_dir / rec["label"])
        pred_path = pred_dir / rec["label"]
        if not pred_path.exists():
            raise FileNotFoundError(f"missing prediction {pred_path}")
        pred = load_matrix(pred_path)
        layout = layout_from_json((truth_dir / rec["layout"]).read_text())
        report = evaluate_pair(pred, truth, layout, case, catalog)
        per_sample.append({"id": rec["id"], "split": rec["split"], **report.to_dict()})
        by_split.setdefault(rec["split"], []).append(report)
        maxima.setdefault(rec["split"], ([], []))
        maxima[rec["split"]][0].append(pred.max())
        maxima[rec["split"]][1].append(truth.max())

    splits = {}
    for split, reports in by_split.items():
        entry = _aggregate(reports)
        pm, tm = maxima[split]
        if len(pm) >= batch_size:
            rho_mean, rho_std = spearman_batches(pm, tm, batch_size)
            entry["spearman"] = {"mean": rho_mean, "std": rho_std, "batch_size": batch_size,
                                 "batches": len(pm) // batch_size}
        else:
            entry["spearman"] = None
        splits[split] = entry
    return {"case": case.case_id, "samples": per_sample, "splits": splits}
