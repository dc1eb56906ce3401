"""Command-line pipeline: ``ingest`` -> ``train`` -> ``report`` (plus ``synth``).

Exit codes: 0 success, 1 validation or parse error, 2 I/O error. Any flag
may also come from a ``key = value`` config file given with ``--config``;
explicit flags win over file values.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from collections import Counter
from pathlib import Path

from . import __version__
from .analysis import ReportParams, build_report, compute_umatrix
from .errors import BasketSomError, EmptyInputError
from .ingest import (
    CsvFormatSpec,
    build_catalog,
    group_baskets,
    parse_transactions,
    read_basket_matrix,
    write_basket_matrix,
)
from .report import (
    emit_grid_map,
    render_umatrix,
    write_clusters_csv,
    write_labels_csv,
    write_pgm,
    write_stats_csv,
)
from .som import SomConfig, read_map, train, write_map
from .synth import default_spec, generate, synthetic_catalog

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(out_dir: Path, command: str, config: dict, inputs, seed=None) -> Path:
    """Record everything needed to repeat a run; no timestamps, so reruns are byte-identical."""
    manifest = {
        "tool": "basketsom",
        "version": __version__,
        "command": command,
        "config": config,
        "inputs": {str(p): sha256_file(p) for p in inputs},
        "seed": seed,
    }
    path = out_dir / f"{command}.manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def read_config_file(path) -> dict[str, str]:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be ≥ 1")
    return value


def _build_parser():
    parser = _Parser(prog="basketsom", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"basketsom {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="raw transaction CSV -> basket matrix")
    p.add_argument("input")
    p.add_argument("--out", default=".")
    p.add_argument("--delimiter", default=";")
    p.add_argument("--date-format", default="%d/%m/%Y")
    p.add_argument("--thousands-sep", default=".")
    p.add_argument("--decimal-sep", default=",")
    p.add_argument("--encoding", default="utf-8")

    p = sub.add_parser("train", help="train a SOM on a basket matrix")
    p.add_argument("--baskets", default="baskets.csv")
    p.add_argument("--out", default=".")
    p.add_argument("--rows", type=int, default=10)
    p.add_argument("--cols", type=int, default=12)
    p.add_argument("--rate", type=float, default=0.8)
    p.add_argument("--iters", type=int, default=20000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--schedule", choices=["constant", "linear_decay"], default="constant")
    p.add_argument("--init", choices=["random_binary", "random_uniform"], default="random_binary")
    p.add_argument("--initial-radius", type=float, default=None)
    p.add_argument("--final-radius", type=float, default=1.0)

    p = sub.add_parser("report", help="U-matrix image, grid map and association tables")
    p.add_argument("--map", default="map.txt")
    p.add_argument("--baskets", default="baskets.csv")
    p.add_argument("--out", default=".")
    p.add_argument("--percentile", type=float, default=40.0)
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--dominant-share", type=float, default=0.5)
    p.add_argument("--scale", type=_positive_int, default=10)

    p = sub.add_parser("synth", help="write a synthetic basket matrix with planted groups")
    p.add_argument("--out", default=".")
    p.add_argument("--n-baskets", type=_positive_int, default=5000)
    p.add_argument("--n-products", type=_positive_int, default=30)
    p.add_argument("--p-in", type=float, default=0.8)
    p.add_argument("--p-bg", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)

    for name, action in sub.choices.items():
        action.add_argument("--config", default=None, help="key = value file; flags override it")
    return parser, sub.choices


def _parse(argv):
    parser, subparsers = _build_parser()
    args = parser.parse_args(argv)
    if args.config:
        file_values = read_config_file(args.config)
        sp = subparsers[args.command]
        known = {a.dest: a for a in sp._actions}
        defaults = {}
        for key, raw in file_values.items():
            if key not in known or key in ("help", "config"):
                raise UsageError(f"unknown config key for '{args.command}': {key}")
            action = known[key]
            try:
                value = action.type(raw) if action.type else raw
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise UsageError(f"config key {key}: {exc}") from None
            if action.choices is not None and value not in action.choices:
                raise UsageError(f"config key {key}: {value!r} not in {list(action.choices)}")
            defaults[key] = value
        sp.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


def cmd_ingest(args) -> int:
    fmt = CsvFormatSpec(
        delimiter=args.delimiter,
        date_format=args.date_format,
        thousands_sep=args.thousands_sep,
        decimal_sep=args.decimal_sep,
        encoding=args.encoding,
    )
    rows = parse_transactions(args.input, fmt)
    if not rows:
        raise EmptyInputError(f"{args.input}: header present but no data rows")
    catalog = build_catalog(rows)
    baskets = group_baskets(rows, catalog)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "baskets.csv", "w", encoding="utf-8", newline="") as fh:
        write_basket_matrix(baskets, catalog, fh)
    with open(out / "catalog.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "product"])
        writer.writerows(enumerate(catalog.products))
    write_manifest(
        out,
        "ingest",
        {k: v for k, v in vars(args).items() if k not in ("command", "config")},
        [args.input],
    )

    print(f"{len(rows)} rows, {len(catalog)} products, {len(baskets)} baskets")
    months = Counter((b.date.year, b.date.month) for b in baskets)
    if len(months) > 1:
        for (year, month), n in sorted(months.items()):
            print(f"  {year:04d}-{month:02d}: {n} baskets")
    return EXIT_OK


def cmd_train(args) -> int:
    config = SomConfig(
        rows=args.rows,
        cols=args.cols,
        learning_rate=args.rate,
        iterations=args.iters,
        seed=args.seed,
        init_mode=args.init,
        rate_schedule=args.schedule,
        initial_radius=args.initial_radius,
        final_radius=args.final_radius,
    )
    baskets, catalog = read_basket_matrix(args.baskets)
    grid, report = train(baskets, config)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "map.txt", "w", encoding="utf-8", newline="\n") as fh:
        write_map(grid, fh, config)
    resolved = {
        "rows": config.rows,
        "cols": config.cols,
        "rate": config.learning_rate,
        "iters": config.iterations,
        "seed": config.seed,
        "schedule": config.rate_schedule,
        "init": config.init_mode,
        "initial_radius": config.initial_radius,
        "final_radius": config.final_radius,
        "baskets": args.baskets,
        "out": args.out,
    }
    write_manifest(out, "train", resolved, [args.baskets], seed=config.seed)
    print(f"{len(baskets)} baskets x {len(catalog)} products, {config.rows}x{config.cols} grid")
    print(f"initial quantization error: {report.initial_qe:.6f}")
    print(f"final quantization error:   {report.final_qe:.6f}")
    return EXIT_OK


def cmd_report(args) -> int:
    params = ReportParams(args.percentile, args.theta, args.dominant_share)
    with open(args.map, encoding="utf-8") as fh:
        grid, meta = read_map(fh)
    baskets, catalog = read_basket_matrix(args.baskets)
    umatrix = compute_umatrix(grid)
    report = build_report(grid, umatrix, baskets, catalog, params)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "umatrix.pgm", "wb") as fh:
        write_pgm(render_umatrix(umatrix, args.scale), fh)
    with open(out / "gridmap.txt", "w", encoding="utf-8", newline="\n") as fh:
        emit_grid_map(grid.rows, grid.cols, report.cell_labels, report.clusters, fh)
    with open(out / "clusters.csv", "w", encoding="utf-8", newline="") as fh:
        write_clusters_csv(report.clusters, fh)
    with open(out / "labels.csv", "w", encoding="utf-8", newline="") as fh:
        write_labels_csv(report.cell_labels, fh)
    with open(out / "stats.csv", "w", encoding="utf-8", newline="") as fh:
        write_stats_csv(report, fh)
    write_manifest(
        out,
        "report",
        {k: v for k, v in vars(args).items() if k not in ("command", "config")},
        [args.map, args.baskets],
        seed=int(meta["seed"]) if "seed" in meta else None,
    )

    print(f"{len(report.clusters)} clusters, {len(report.support)} associated products")
    for cl in report.clusters:
        print(f"  C{cl.id}: {len(cl.cells)} cells, dominant: {', '.join(cl.dominant_products) or '-'}")
    return EXIT_OK


def cmd_synth(args) -> int:
    spec = default_spec(
        seed=args.seed,
        n_baskets=args.n_baskets,
        n_products=args.n_products,
        p_in=args.p_in,
        p_bg=args.p_bg,
    )
    baskets = generate(spec)
    catalog = synthetic_catalog(spec.n_products)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "baskets.csv", "w", encoding="utf-8", newline="") as fh:
        write_basket_matrix(baskets, catalog, fh)
    write_manifest(
        out,
        "synth",
        {k: v for k, v in vars(args).items() if k not in ("command", "config")},
        [],
        seed=args.seed,
    )
    print(f"{len(baskets)} synthetic baskets, {len(catalog)} products")
    for k, g in enumerate(spec.groups, start=1):
        print(f"  group {k}: {', '.join(catalog.products[j] for j in g.products)}")
    return EXIT_OK


COMMANDS = {"ingest": cmd_ingest, "train": cmd_train, "report": cmd_report, "synth": cmd_synth}


def main(argv=None) -> int:
    try:
        args = _parse(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        return COMMANDS[args.command](args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (BasketSomError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
