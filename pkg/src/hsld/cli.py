"""Command line entry point: ``hsld <command> ...``.

Exit status is 0 on success, 1 on domain errors (infeasible sampling,
solver failure, bad input files) and 2 on usage errors.  ``--config FILE``
takes a JSON object whose keys override flag defaults by their long name
(``{"seed": 7, "burn_in": 200}``); explicit flags still win.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from hsld import __version__
from hsld.dataset import assemble_dataset, evaluate_dataset
from hsld.geometry import CATALOG, Layout, LayoutError, load_layout, layout_to_json, rasterize
from hsld.gibls import GibLSConfig, gibls_chain
from hsld.io import MatrixFormatError, load_matrix, noisy_oracle_predict, render_heatmap, save_matrix
from hsld.seeds import derive_rng
from hsld.seqls import SamplingError, SeqLSConfig, seqls_sample
from hsld.solver import SIDES, CaseConfig, SolverError, SolveSettings, solve
from hsld.special import parse_kind, special_sample

logger = logging.getLogger("hsld")

DOMAIN_ERRORS = (SamplingError, SolverError, LayoutError, MatrixFormatError, FileNotFoundError)


class UsageError(Exception):
    pass


def _window(text: str) -> tuple[int, int, int, int]:
    try:
        values = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must be x0,x1,y0,y1 integers, got {text!r}") from None
    if len(values) != 4:
        raise argparse.ArgumentTypeError("window must have four values x0,x1,y0,y1")
    return values


def _kind(text: str) -> str:
    try:
        parse_kind(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return text


def _write_layouts(out: Path, layouts: list[Layout]) -> None:
    out.mkdir(parents=True, exist_ok=True)
    for i, layout in enumerate(layouts):
        (out / f"layout_{i:05d}.json").write_text(layout_to_json(layout))


def _write_json(path: Path, data) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=1) + "\n")


def cmd_sample_seqls(args) -> None:
    config = SeqLSConfig(max_restarts=args.max_restarts, window=args.window)
    layouts, attempts = [], 0
    for i in range(args.n):
        result = seqls_sample(derive_rng(args.seed, "seqls", i), config)
        layouts.append(result.layout)
        attempts += result.attempts
    _write_layouts(args.out, layouts)
    _write_json(args.out / "summary.json", {
        "method": "seqls", "n": args.n, "seed": args.seed, "window": args.window,
        "attempts": attempts, "success_rate": args.n / attempts,
    })
    logger.info("seqls: %d layouts, %d attempts", args.n, attempts)


def cmd_sample_gibls(args) -> None:
    init = load_layout(args.init) if args.init else None
    config = GibLSConfig(n=args.n, burn_in=args.burn_in, interval=args.interval, initial_layout=init)
    layouts = gibls_chain(derive_rng(args.seed, "gibls", 0), config)
    _write_layouts(args.out, layouts)
    _write_json(args.out / "summary.json", {
        "method": "gibls", "n": args.n, "seed": args.seed, "burn_in": args.burn_in,
        "interval": args.interval, "iterations": config.iterations,
        "init": str(args.init) if args.init else None,
    })


def cmd_sample_special(args) -> None:
    layouts = [special_sample(args.kind, derive_rng(args.seed, args.kind, i), jitter_max=args.jitter)
               for i in range(args.n)]
    _write_layouts(args.out, layouts)
    _write_json(args.out / "summary.json", {"method": "special", "kind": args.kind, "n": args.n,
                                           "seed": args.seed})


def _case(args) -> CaseConfig:
    return CaseConfig(args.case, dirichlet_side=args.dirichlet_side)


def cmd_solve(args) -> None:
    case = _case(args)
    settings = SolveSettings(tolerance=args.tol, solver_kind=args.solver)
    if args.layout.is_dir():
        sources = sorted(p for p in args.layout.iterdir() if p.suffix in (".json", ".csv")
                         and p.name != "summary.json")
        if not sources:
            raise FileNotFoundError(f"no layout files in {args.layout}")
        if args.out.suffix == ".hsld":
            raise UsageError("batch mode writes a directory; --out must not end in .hsld")
        args.out.mkdir(parents=True, exist_ok=True)
        pairs = [(src, args.out / (src.name.split(".")[0] + ".hsld")) for src in sources]
    else:
        pairs = [(args.layout, args.out)]
    for src, dst in pairs:
        temp = solve(rasterize(load_layout(src), CATALOG), case, settings)
        dst.parent.mkdir(parents=True, exist_ok=True)
        save_matrix(dst, temp)


def cmd_dataset(args) -> None:
    composition = json.loads(args.composition.read_text()) if args.composition else None
    manifest = assemble_dataset(_case(args), args.out, composition, args.seed, threads=args.threads)
    logger.info("dataset: %d samples in %s", len(manifest["samples"]), args.out)


def cmd_evaluate(args) -> None:
    report = evaluate_dataset(args.truth, args.pred, args.manifest, args.case)
    _write_json(args.out, report)
    for split, entry in report["splits"].items():
        rho = entry["spearman"]["mean"] if entry["spearman"] else float("nan")
        logger.info("%s: n=%d MAE=%.4g MaxAE=%.4g rho=%.4f", split, entry["count"],
                    entry["mean"]["mae"], entry["mean"]["max_ae"], rho)


def cmd_render(args) -> None:
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_bytes(render_heatmap(load_matrix(args.input)))


def cmd_oracle(args) -> None:
    written = noisy_oracle_predict(args.truth, args.sigma, args.seed, args.out)
    logger.info("oracle: %d predictions written", len(written))


STOCHASTIC = {cmd_sample_seqls, cmd_sample_gibls, cmd_sample_special, cmd_dataset, cmd_oracle}


def build_parser() -> tuple[argparse.ArgumentParser, list[argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(prog="hsld", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"hsld {__version__}")
    parser.add_argument("--config", type=Path, help="JSON file of flag defaults")
    parser.add_argument("--threads", type=int, default=None,
                        help="parallelism cap (default: $HSLD_THREADS or 1)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    leaves = []

    def leaf(subparsers, name, func, help_text):
        p = subparsers.add_parser(name, help=help_text, description=help_text)
        p.set_defaults(func=func)
        leaves.append(p)
        return p

    def seeded(p):
        p.add_argument("--seed", type=int, default=None, help="base seed (required)")

    sample = sub.add_parser("sample", help="draw layouts")
    sample_sub = sample.add_subparsers(dest="method", required=True)

    p = leaf(sample_sub, "seqls", cmd_sample_seqls, "sequential layout sampling")
    p.add_argument("--n", type=int, required=True)
    seeded(p)
    p.add_argument("--window", type=_window, default=None, metavar="x0,x1,y0,y1")
    p.add_argument("--max-restarts", type=int, default=10_000)
    p.add_argument("--out", type=Path, required=True)

    p = leaf(sample_sub, "gibls", cmd_sample_gibls, "Gibbs layout sampling (one chain)")
    p.add_argument("--n", type=int, required=True)
    seeded(p)
    p.add_argument("--burn-in", type=int, default=100)
    p.add_argument("--interval", type=int, default=5)
    p.add_argument("--init", type=Path, default=None, help="initial layout (JSON or CSV)")
    p.add_argument("--out", type=Path, required=True)

    p = leaf(sample_sub, "special", cmd_sample_special, "corner, group and part-space samples")
    p.add_argument("--kind", type=_kind, required=True,
                   help="corner | group:G1..G4 | half-x:OFF | half-y:OFF | square:SIDE")
    p.add_argument("--n", type=int, required=True)
    seeded(p)
    p.add_argument("--jitter", type=int, default=10, help="corner jitter in cells")
    p.add_argument("--out", type=Path, required=True)

    def case_flags(p, required=True):
        p.add_argument("--case", type=int, choices=(1, 2, 3), required=required, default=None)
        p.add_argument("--dirichlet-side", choices=SIDES, default="left", help="case 2 only")

    p = leaf(sub, "solve", cmd_solve, "temperature field of a layout (or a directory of layouts)")
    case_flags(p)
    p.add_argument("--layout", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--solver", choices=("direct", "iterative"), default="direct")

    p = leaf(sub, "dataset", cmd_dataset, "assemble a dataset")
    case_flags(p)
    seeded(p)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--composition", type=Path, default=None, help="JSON {split: count}")

    p = leaf(sub, "evaluate", cmd_evaluate, "score predictions against a dataset")
    p.add_argument("--truth", type=Path, required=True)
    p.add_argument("--pred", type=Path, required=True)
    p.add_argument("--manifest", type=Path, default=None, help="default: TRUTH/manifest.json")
    p.add_argument("--case", type=int, choices=(1, 2, 3), default=None)
    p.add_argument("--out", type=Path, required=True)

    p = leaf(sub, "render", cmd_render, "render a field file as a PPM heatmap")
    p.add_argument("--in", dest="input", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)

    p = leaf(sub, "oracle", cmd_oracle, "truth plus Gaussian noise, for harness checks")
    p.add_argument("--truth", type=Path, required=True)
    p.add_argument("--sigma", type=float, required=True)
    seeded(p)
    p.add_argument("--out", type=Path, required=True)
    return parser, leaves


def _apply_config(path: Path, leaves) -> None:
    config = json.loads(path.read_text())
    if not isinstance(config, dict):
        raise UsageError(f"{path}: config must be a JSON object")
    values = {k.replace("-", "_"): v for k, v in config.items()}
    for p in leaves:
        for action in p._actions:
            if action.dest in values:
                # a configured value satisfies a required flag
                action.required = False
                action.default = values[action.dest]


def run(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser, leaves = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", type=Path)
    known, _ = pre.parse_known_args(argv)
    try:
        if known.config:
            _apply_config(known.config, leaves)
    except (OSError, ValueError, UsageError) as exc:
        print(f"hsld: error: bad config: {exc}", file=sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    if args.func in STOCHASTIC and getattr(args, "seed", None) is None:
        print("hsld: error: --seed is required for this command", file=sys.stderr)
        return 2
    try:
        args.func(args)
    except DOMAIN_ERRORS as exc:
        print(f"hsld: error: {exc}", file=sys.stderr)
        return 1
    except (UsageError, ValueError) as exc:
        print(f"hsld: error: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
