"""Batch command-line front end.

Subcommands: segment (full run), reconstruct (rebuild a level's mean image
from registry + label image only), synth (scene generator) and stats (run
report).  Exit codes: 0 success, 2 I/O failure, 3 parse failure, 4 invalid
parameters or incomplete inputs, 5 label/registry mismatch.  A failing
command leaves no new files in its output directory.
"""

from __future__ import annotations

import argparse
import json
import os
import shutil
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import netpbm
from .pipeline import RunParams, run_pipeline
from .reconstruct import export_stats
from .registry import dumps_canonical, registry_document

EXIT_OK = 0
EXIT_IO = 2
EXIT_PARSE = 3
EXIT_PARAMS = 4
EXIT_MISMATCH = 5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route usage problems to exit code 4
        raise UsageError(message)


def _fail(code: int, message: str) -> int:
    print(f"pyrseg: error: {message}", file=sys.stderr)
    return code


def _write_files(outdir: Path, files: dict[str, bytes]) -> None:
    """Stage everything in a temp dir, then rename into place."""
    outdir.mkdir(parents=True, exist_ok=True)
    tmpdir = Path(tempfile.mkdtemp(prefix=".stage-", dir=outdir))
    try:
        for name, blob in files.items():
            (tmpdir / name).write_bytes(blob)
        for name in files:
            os.replace(tmpdir / name, outdir / name)
    finally:
        shutil.rmtree(tmpdir, ignore_errors=True)


def _quantize(x: float) -> float:
    # the 6-decimal value that registry.json stores
    return float(f"{x:.6f}")


def cmd_segment(args) -> int:
    try:
        params = RunParams(
            top_area=args.top_area,
            tolerance=args.tolerance,
            epsilon=args.epsilon,
            max_iters=args.max_iters,
            connectivity=args.connectivity,
        )
        params.validate()
    except ValueError as exc:
        return _fail(EXIT_PARAMS, str(exc))
    try:
        data = Path(args.input).read_bytes()
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot read input: {exc}")
    try:
        img = netpbm.load_pgm(data)
    except netpbm.NetpbmError as exc:
        return _fail(EXIT_PARSE, f"cannot parse input: {exc}")

    pyr, result, reports = run_pipeline(img, params)
    doc = registry_document(result)
    files: dict[str, bytes] = {
        "registry.json": dumps_canonical(doc),
        "stats.json": export_stats(reports),
    }
    emitted = {
        "all": [e.level for e in result.levels],
        "top": [result.levels[0].level],
        "base": [0],
    }[args.emit]
    for entry in result.levels:
        if entry.level not in emitted:
            continue
        means = np.array([_quantize(rec.mean_intensity) for rec in entry.records])
        files[f"L{entry.level}_labels.ppm"] = netpbm.save_label_ppm(entry.labels)
        files[f"L{entry.level}_means.pgm"] = netpbm.save_pgm(means[entry.labels])
    try:
        _write_files(Path(args.outdir), files)
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot write outputs: {exc}")
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    try:
        registry_raw = Path(args.registry).read_bytes()
        labels_raw = Path(args.labels).read_bytes()
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot read inputs: {exc}")
    try:
        doc = json.loads(registry_raw)
    except ValueError as exc:
        return _fail(EXIT_PARSE, f"cannot parse registry: {exc}")
    entry = next((lv for lv in doc.get("levels", []) if lv.get("level") == args.level), None)
    if entry is None:
        return _fail(EXIT_PARAMS, f"level {args.level} not present in registry")
    ids = [region["id"] for region in entry["regions"]]
    try:
        labels = netpbm.decode_label_ppm(labels_raw, ids)
    except netpbm.NetpbmError as exc:
        return _fail(EXIT_PARSE, f"cannot parse label image: {exc}")
    except netpbm.LabelDecodeError as exc:
        return _fail(EXIT_MISMATCH, f"label image does not match registry: {exc}")
    if labels.shape != (entry["height"], entry["width"]):
        return _fail(EXIT_MISMATCH, "label image dims differ from registry level dims")
    means = np.full(max(ids) + 1, np.nan)
    for region in entry["regions"]:
        means[region["id"]] = region["mean"]
    try:
        _write_files(Path(args.out).parent, {Path(args.out).name: netpbm.save_pgm(means[labels])})
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot write output: {exc}")
    return EXIT_OK


def cmd_synth(args) -> int:
    from .synth import generate_scene, spec_from_json

    try:
        raw = Path(args.spec).read_bytes()
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot read spec: {exc}")
    try:
        doc = json.loads(raw)
    except ValueError as exc:
        return _fail(EXIT_PARSE, f"cannot parse spec: {exc}")
    try:
        spec = spec_from_json(doc)
        img, truth = generate_scene(spec)
    except (ValueError, KeyError, TypeError) as exc:
        return _fail(EXIT_PARAMS, f"invalid scene spec: {exc}")
    out = Path(args.out)
    n_ids = int(truth.max()) + 1
    files = {out.name: netpbm.save_pgm(img)}
    if n_ids <= 256:
        files[out.stem + "_truth.pgm"] = netpbm.save_pgm(truth.astype(np.float64))
    else:
        # headerless row-major uint16 big-endian raster, dims match the scene
        files[out.stem + "_truth.u16"] = truth.astype(">u2").tobytes()
    try:
        _write_files(out.parent, files)
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot write outputs: {exc}")
    return EXIT_OK


def cmd_stats(args) -> int:
    rundir = Path(args.rundir)
    reg_path = rundir / "registry.json"
    stats_path = rundir / "stats.json"
    if not reg_path.is_file() or not stats_path.is_file():
        return _fail(EXIT_PARAMS, f"incomplete run directory: {rundir}")
    try:
        doc = json.loads(reg_path.read_bytes())
        rows = json.loads(stats_path.read_bytes())
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot read run directory: {exc}")
    except ValueError as exc:
        return _fail(EXIT_PARSE, f"cannot parse run files: {exc}")
    dims = {lv["level"]: (lv["width"], lv["height"]) for lv in doc.get("levels", [])}
    if any(row["level"] not in dims for row in rows):
        return _fail(EXIT_PARAMS, "stats.json and registry.json disagree on levels")
    print("level\tdims\tregion_count\tuncertain_fraction\titerations\trmse")
    for row in rows:
        w, h = dims[row["level"]]
        print(
            f"{row['level']}\t{w}x{h}\t{row['region_count']}\t"
            f"{row['uncertain_fraction']:.6f}\t{row['iterations_used']}\t"
            f"{row['rmse_vs_level_image']:.6f}"
        )
    if args.figures:
        from .figures import render_report_png

        try:
            _write_files(rundir, {"report.png": render_report_png(rows)})
        except OSError as exc:
            return _fail(EXIT_IO, f"cannot write figure: {exc}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pyrseg", description="Coarse-to-fine pyramid segmentation")
    sub = parser.add_subparsers(dest="command", required=True)

    seg = sub.add_parser("segment", help="segment a PGM image and write a run directory")
    seg.add_argument("--input", required=True)
    seg.add_argument("--outdir", required=True)
    seg.add_argument("--top-area", type=int, default=RunParams.top_area)
    seg.add_argument("--tolerance", type=float, default=RunParams.tolerance)
    seg.add_argument("--epsilon", type=float, default=RunParams.epsilon)
    seg.add_argument("--max-iters", type=int, default=RunParams.max_iters)
    seg.add_argument("--connectivity", type=int, choices=(4, 8), default=RunParams.connectivity)
    seg.add_argument("--emit", choices=("all", "top", "base"), default="all")
    seg.set_defaults(func=cmd_segment)

    rec = sub.add_parser("reconstruct", help="rebuild a level's mean image from descriptions")
    rec.add_argument("--registry", required=True)
    rec.add_argument("--labels", required=True)
    rec.add_argument("--level", type=int, required=True)
    rec.add_argument("--out", required=True)
    rec.set_defaults(func=cmd_reconstruct)

    syn = sub.add_parser("synth", help="generate a synthetic scene and its ground truth")
    syn.add_argument("--spec", required=True)
    syn.add_argument("--out", required=True)
    syn.set_defaults(func=cmd_synth)

    sta = sub.add_parser("stats", help="print the per-level report table for a run")
    sta.add_argument("--rundir", required=True)
    sta.add_argument("--figures", action="store_true", help="also render report.png into the run dir")
    sta.set_defaults(func=cmd_stats)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return _fail(EXIT_PARAMS, str(exc))
    return args.func(args)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
