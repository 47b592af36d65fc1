"""Command line front end.

Ties together ingestion, calibration, generation, scanning, and the
benchmark suites. Every run emits machine-readable records (csv, tsv or
json) plus a manifest describing the exact configuration; data outputs
reference the manifest digest so reports can be reproduced bit-exactly.

Exit codes: 0 success, 2 usage error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__, bench
from .calibration import CalibrationSet, build_tables
from .datagen import SyntheticPlan, UniBenchPlan, gen_synthetic, gen_unibench
from .detectors import (
    BLOCK_METHODS,
    MeasureQuorum,
    QuorumConfig,
    ScanPlan,
    block_scan,
    default_tables,
    martingale_scan,
)
from .errors import ArgumentError, DriftscanError
from .measures import all_measure_ids, calibratable_ids, is_baseline
from .mmd import mmd_test
from .ncd import NcdConfig, ncd_test
from .ordering import ecdf_from_partition, ordered_partition
from .series import FormatOptions, Series, Window, parse_series, serialize_series

__all__ = ["main", "RunManifest"]

FORMATS = ("csv", "tsv", "json")


@dataclass
class RunManifest:
    """Reproducibility record attached to every output."""

    command_line: list
    seed: int
    config: dict
    table_digests: dict = field(default_factory=dict)
    version: str = __version__

    def to_dict(self):
        return {
            "command_line": self.command_line,
            "seed": self.seed,
            "config": self.config,
            "table_digests": self.table_digests,
            "version": self.version,
        }

    def digest(self):
        return _digest(_canonical_json(self.to_dict()))


def _canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _table_digests(tables) -> dict:
    if isinstance(tables, CalibrationSet):
        items = tables.tables.items()
    else:
        items = tables.items()
    return {mid: _digest(_canonical_json(t.to_dict())) for mid, t in sorted(items)}


def _config_snapshot(args) -> dict:
    skip = {"func", "out", "format"}
    snap = {}
    for key, value in sorted(vars(args).items()):
        if key in skip:
            continue
        if isinstance(value, (str, int, float, bool, type(None))):
            snap[key] = value
        else:
            snap[key] = list(value)
    return snap


def _format_cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _render_rows(rows, fmt, manifest_digest) -> str:
    if fmt == "json":
        return json.dumps(
            {"manifest_digest": manifest_digest, "records": rows}, indent=1, sort_keys=True
        )
    delim = "," if fmt == "csv" else "\t"
    out = io.StringIO()
    out.write(f"# manifest_digest={manifest_digest}\n")
    writer = csv.writer(out, delimiter=delim, lineterminator="\n")
    if rows:
        header = list(rows[0])
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_cell(row[k]) for k in header])
    return out.getvalue()


def _emit(rows, args, manifest: RunManifest):
    """Write records plus the manifest sidecar (or stdout footer)."""
    digest = manifest.digest()
    text = _render_rows(rows, args.format, digest)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        with open(args.out + ".manifest.json", "w", encoding="utf-8") as fh:
            json.dump(manifest.to_dict(), fh, indent=1, sort_keys=True)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _emit_text(text, args, manifest: RunManifest, reference_digest=True):
    """Write a raw text payload (series CSV) stamped with the digest."""
    if reference_digest:
        text = f"# manifest_digest={manifest.digest()}\n" + text
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        with open(args.out + ".manifest.json", "w", encoding="utf-8") as fh:
            json.dump(manifest.to_dict(), fh, indent=1, sort_keys=True)
    else:
        sys.stdout.write(text)


def _manifest(args, table_digests=None) -> RunManifest:
    return RunManifest(
        command_line=list(getattr(args, "_argv", [])),
        seed=args.seed,
        config=_config_snapshot(args),
        table_digests=table_digests or {},
    )


def _load_series(path) -> Series:
    with open(path, encoding="utf-8") as fh:
        return parse_series(fh, FormatOptions())


def _split_ids(text) -> tuple:
    return tuple(tok.strip() for tok in text.split(",") if tok.strip())


def _split_ints(text) -> tuple:
    return tuple(int(tok) for tok in text.split(",") if tok.strip())


def _resolve_tables(args, measures):
    needed = [m for m in measures if not is_baseline(m)]
    if getattr(args, "calib", None):
        tables = CalibrationSet.load(args.calib)
        missing = [m for m in needed if m not in tables]
        if missing:
            raise DriftscanError(f"calibration file lacks tables for {missing}")
        return tables
    return default_tables()


def cmd_calibrate(args):
    measures = _split_ids(args.measures) if args.measures else calibratable_ids()
    tables = build_tables(
        measure_ids=measures,
        window_sizes=_split_ints(args.window_sizes),
        m=args.reps,
        seed=args.seed,
        generator=args.generator,
        grid_size=args.grid_size,
    )
    digests = _table_digests(tables)
    manifest = _manifest(args, digests)
    tables.save(args.table_file)
    with open(args.table_file + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest.to_dict(), fh, indent=1, sort_keys=True)
    rows = [
        {"measure": mid, "grid_points": len(tables[mid].grid_x), "digest": digests[mid]}
        for mid in sorted(digests)
    ]
    _emit(rows, args, manifest)
    return 0


def cmd_gen(args):
    if args.kind == "unibench":
        plan = UniBenchPlan.random(
            seed=args.seed, base_distribution=args.base_distribution, change=args.change
        )
        series, _ = gen_unibench(plan)
    else:
        plan = SyntheticPlan(
            kind=args.kind,
            blocks=args.blocks,
            block_len=args.block_len,
            d=args.dims,
            seed=args.seed,
        )
        series, _ = gen_synthetic(plan)
    manifest = _manifest(args)
    if args.format == "json":
        rows = [
            {"epoch": int(series.epochs[i]), "values": [float(v) for v in series.data[i]]}
            for i in range(len(series))
        ]
        _emit(rows, args, manifest)
    else:
        delim = "," if args.format == "csv" else "\t"
        _emit_text(serialize_series(series, delimiter=delim), args, manifest)
    return 0


def cmd_scan(args):
    series = _load_series(args.input)
    reference = Window(args.ref_start, args.ref_len)
    if args.method == "martingale":
        quorum = MeasureQuorum()
        records = martingale_scan(
            series,
            reference,
            kind=args.strangeness,
            epsilon=args.epsilon,
            lam=args.lam,
            t=args.threshold,
            quorum=quorum,
        )
        digests = _table_digests(quorum.tables)
    else:
        measures = _split_ids(args.measures)
        config = QuorumConfig(
            measures=measures, disagreement=args.disagreement, alpha=args.alpha
        )
        tables = _resolve_tables(args, measures)
        quorum = MeasureQuorum(config, tables=tables)
        plan = ScanPlan(
            reference=reference,
            step=args.step,
            method=args.method,
            config={"alpha": args.alpha, "permutations": args.permutations},
        )
        records = block_scan(series, plan, quorum=quorum, seed=args.seed)
        digests = _table_digests(tables)
    manifest = _manifest(args, digests)
    _emit([r.to_row() for r in records], args, manifest)
    return 0


def cmd_ncd(args):
    a = _load_series(args.input_a)
    b = _load_series(args.input_b)
    config = NcdConfig(
        bootstrap_runs=args.bootstrap_runs, swap_fraction=args.swap_fraction, seed=args.seed
    )
    res = ncd_test(a.data, b.data, config, args.alpha)
    manifest = _manifest(args)
    _emit(
        [
            {
                "ncd": res.ncd,
                "p_value": res.p_value,
                "reject": res.reject,
                "bootstrap_runs": args.bootstrap_runs,
            }
        ],
        args,
        manifest,
    )
    return 0


def cmd_mmd(args):
    a = _load_series(args.input_a)
    b = _load_series(args.input_b)
    res = mmd_test(
        a.data,
        b.data,
        estimator=args.estimator,
        alpha=args.alpha,
        permutations=args.permutations,
        seed=args.seed,
    )
    manifest = _manifest(args)
    _emit(
        [
            {
                "estimator": res.estimator,
                "value": res.value,
                "p_value": res.p_value,
                "reject": res.reject,
                "sigma_sq": res.sigma_sq,
            }
        ],
        args,
        manifest,
    )
    return 0


def cmd_order(args):
    a = _load_series(args.input_a)
    b = _load_series(args.input_b)
    partition = ordered_partition(a.data, b.data, args.method)
    f_r = ecdf_from_partition(partition, "R")
    f_w = ecdf_from_partition(partition, "W")
    rows = []
    for (pos, node), cr, cw in zip(
        partition.positions(), f_r.cum.tolist(), f_w.cum.tolist()
    ):
        rows.append(
            {
                "position": pos,
                "count_r": node.count_r,
                "count_w": node.count_w,
                "cum_r": cr,
                "cum_w": cw,
            }
        )
    manifest = _manifest(args)
    _emit(rows, args, manifest)
    return 0


def cmd_bench_synth(args):
    methods = _split_ids(args.methods)
    unknown = [m for m in methods if m not in bench.SENSITIVITY_METHODS]
    if unknown:
        raise ArgumentError(f"unknown methods {unknown}")
    rows = []
    for d in _split_ints(args.dims):
        ratios = bench.sensitivity_suite(
            kind=args.kind,
            d=d,
            n=args.block_len,
            runs=args.runs,
            methods=methods,
            seed=args.seed,
            jobs=args.jobs,
        )
        for method in methods:
            values = ratios[method]
            rows.append(
                {
                    "kind": args.kind,
                    "d": d,
                    "n": args.block_len,
                    "runs": args.runs,
                    "method": method,
                    "median_ratio": float(np.median(values)),
                    "detections": int(np.count_nonzero(values > 0)),
                }
            )
    digests = _table_digests(default_tables())
    _emit(rows, args, _manifest(args, digests))
    return 0


def cmd_bench_unidim(args):
    tables = default_tables()
    results = bench.unibench_suite(
        n_series=args.n_series,
        change=args.change,
        base_distribution=args.base_distribution,
        seed=args.seed,
        sets=_split_ids(args.sets),
        alpha=args.alpha,
        tables=tables,
    )
    rows = []
    for set_name, stats in results.items():
        for entry in stats:
            rows.append(
                {
                    "set": set_name,
                    "disagreement": entry.disagreement,
                    "found": entry.found,
                    "matches": entry.matches,
                    "golden": entry.golden,
                    "error": entry.error,
                }
            )
    _emit(rows, args, _manifest(args, _table_digests(tables)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="driftscan",
        description="Non-parametric two-window comparison of multivariate series.",
    )
    parser.add_argument("--version", action="version", version=f"driftscan {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="root random seed")
    common.add_argument("--jobs", type=int, default=1, help="worker parallelism bound")
    common.add_argument("--format", choices=FORMATS, default="csv", help="output format")
    common.add_argument("--out", default=None, help="output path (default stdout)")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", parents=[common], help="build calibration tables")
    p.add_argument("table_file", help="destination JSON file for the tables")
    p.add_argument("--measures", default=None, help="comma list (default: all calibratable)")
    p.add_argument("--window-sizes", default="100,250,500,1000", help="comma list of N")
    p.add_argument("--reps", type=int, default=500, help="null repetitions per N")
    p.add_argument("--generator", default="normal", help="null sampling distribution")
    p.add_argument("--grid-size", type=int, default=512)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("gen", parents=[common], help="generate a benchmark series")
    p.add_argument("--kind", choices=("average", "variance", "mixture", "unibench"), required=True)
    p.add_argument("--blocks", type=int, default=21)
    p.add_argument("--block-len", type=int, default=250)
    p.add_argument("--dims", type=int, default=1)
    p.add_argument("--change", choices=("average", "variance", "both"), default="average")
    p.add_argument("--base-distribution", choices=("normal", "uniform"), default="normal")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("scan", parents=[common], help="scan a series against a reference window")
    p.add_argument("--input", required=True, help="series CSV file")
    p.add_argument("--method", choices=BLOCK_METHODS + ("martingale",), default="poset")
    p.add_argument("--ref-start", type=int, default=0)
    p.add_argument("--ref-len", type=int, required=True)
    p.add_argument("--step", type=int, default=1)
    p.add_argument(
        "--measures",
        default="phi,xi,ks,klj,js,chi2,hellinger,cvm,euclid,camberra",
        help="comma list for the quorum vote",
    )
    p.add_argument("--disagreement", type=float, default=0.2)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--permutations", type=int, default=100, help="for mmd_u2")
    p.add_argument("--calib", default=None, help="calibration table JSON from `calibrate`")
    p.add_argument("--strangeness", choices=("nn", "avg"), default="nn")
    p.add_argument("--epsilon", type=float, default=0.95)
    p.add_argument("--lam", type=float, default=20.0)
    p.add_argument("--threshold", type=float, default=3.0)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("ncd", parents=[common], help="compression distance between two windows")
    p.add_argument("--input-a", required=True)
    p.add_argument("--input-b", required=True)
    p.add_argument("--bootstrap-runs", type=int, default=100)
    p.add_argument("--swap-fraction", type=float, default=0.5)
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(func=cmd_ncd)

    p = sub.add_parser("mmd", parents=[common], help="kernel MMD between two windows")
    p.add_argument("--input-a", required=True)
    p.add_argument("--input-b", required=True)
    p.add_argument("--estimator", choices=("quadratic", "linear"), default="quadratic")
    p.add_argument("--permutations", type=int, default=200)
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(func=cmd_mmd)

    p = sub.add_parser("order", parents=[common], help="ordered partition of two windows")
    p.add_argument("--input-a", required=True)
    p.add_argument("--input-b", required=True)
    p.add_argument("--method", choices=("poset", "mst"), default="poset")
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("bench-synth", parents=[common], help="synthetic sensitivity benchmark")
    p.add_argument("--kind", choices=("average", "variance", "mixture"), default="average")
    p.add_argument("--dims", default="10", help="comma list of dimensionalities")
    p.add_argument("--block-len", type=int, default=250)
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--methods", default=",".join(bench.SENSITIVITY_METHODS))
    p.set_defaults(func=cmd_bench_synth)

    p = sub.add_parser("bench-unidim", parents=[common], help="1-D window search benchmark")
    p.add_argument("--n-series", type=int, default=200)
    p.add_argument("--change", choices=("average", "variance", "both"), default="average")
    p.add_argument("--base-distribution", choices=("normal", "uniform"), default="normal")
    p.add_argument("--sets", default=",".join(bench.MEASURE_SET_NAMES))
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(func=cmd_bench_unidim)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help
        return int(exc.code or 0)
    args._argv = ["driftscan"] + argv
    try:
        return args.func(args)
    except ArgumentError as exc:
        print(f"driftscan: usage error: {exc}", file=sys.stderr)
        return 2
    except DriftscanError as exc:
        print(f"driftscan: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"driftscan: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
