"""Command line entry point: ``cdcp detect | eval | ablation | fixtures | bench``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from cdcp.config import dump_config, load_config
from cdcp.dataset import LAYOUTS, DatasetError, DatasetIndex, discover_dataset
from cdcp.fixtures import generate_fixtures, render_scene
from cdcp.harness import SampleResult, bench, detect_saliency, process_dataset, quantize, run_ablation
from cdcp.imaging import ImageError, load_rgbd, read_gray
from cdcp.metrics import aggregate, evaluate, load_gt
from cdcp import plotting, reports

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_SKIPPED = 2

log = logging.getLogger("cdcp")


def _parse_sets(items: list[str]) -> dict[str, str]:
    out = {}
    for item in items:
        if "=" not in item:
            raise SystemExit(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        out[key] = value
    return out


def _dataset(args) -> DatasetIndex:
    return discover_dataset(args.dataset, layout=args.layout)


def _finish(skipped, out: Path) -> int:
    reports.write_skips(out / "skipped.csv", skipped)
    if skipped:
        print(f"# skipped {len(skipped)} sample(s); see {out / 'skipped.csv'}", file=sys.stderr)
        return EXIT_SKIPPED
    return EXIT_OK


def _write_eval_outputs(out: Path, method: str, index: DatasetIndex, results: list[SampleResult], figures: bool):
    reports.write_per_image(out / "per_image.csv", results)
    if not results:
        return
    agg = aggregate([r.report for r in results])
    reports.write_curves(out / "curves.csv", agg)
    row = reports.summary_row(method, index.name, agg)
    reports.write_summary(out / "summary.csv", [row])
    if figures:
        plotting.plot_pr({method: agg}, out / "pr_curve.png", title=f"PR on {index.name}")
        plotting.plot_roc({method: agg}, out / "roc_curve.png", title=f"ROC on {index.name}")
    print(reports.format_table(reports.SUMMARY_HEADER, [row]))


def cmd_detect(args) -> int:
    config = load_config(args.config, _parse_sets(args.set))
    index = _dataset(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.txt").write_text(dump_config(config))
    results, skipped = process_dataset(index, config, out / "maps", jobs=args.jobs)
    _write_eval_outputs(out, args.method, index, results, not args.no_figures)
    if args.stages and results:
        for sample in index.samples:
            if sample.stem not in {r.stem for r in results}:
                continue
            rgb, depth = load_rgbd(sample.rgb, sample.depth)
            stages = detect_saliency(rgb, depth, config)
            reports.write_regions(out / "regions" / f"{sample.stem}.csv", stages.regions)
            plotting.plot_stages(rgb, depth, stages, out / "stages" / f"{sample.stem}.png", load_gt(sample.gt))
    return _finish(skipped, out)


def _find_map(maps_dir: Path, stem: str) -> Path | None:
    for suffix in (".png", ".jpg", ".bmp", ".tif"):
        p = maps_dir / f"{stem}{suffix}"
        if p.is_file():
            return p
    return None


def cmd_eval(args) -> int:
    index = _dataset(args)
    maps_dir = Path(args.maps_dir)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    results, skipped = [], list(index.skipped)
    for sample in index.samples:
        path = _find_map(maps_dir, sample.stem)
        if path is None:
            skipped.append((sample.stem, f"no map in {maps_dir}"))
            continue
        try:
            report = evaluate(read_gray(path), load_gt(sample.gt))
        except Exception as exc:
            skipped.append((sample.stem, f"{type(exc).__name__}: {exc}"))
            continue
        results.append(SampleResult(sample.stem, report, flat_depth=False))
    _write_eval_outputs(out, args.method, index, results, not args.no_figures)
    return _finish(sorted(skipped), out)


def cmd_ablation(args) -> int:
    config = load_config(args.config, _parse_sets(args.set))
    index = _dataset(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows, results, skipped = run_ablation(index, config, out, jobs=args.jobs)
    reports.write_ablation(out / "ablation.csv", rows)
    reports.write_per_image(out / "per_image.csv", results)
    if rows and not args.no_figures:
        plotting.plot_ablation(rows, out / "ablation.png", title=f"Stage ablation on {index.name}")
        curves = {name: aggregate([r.stage_reports[name] for r in results]) for name in (x.stage for x in rows)}
        plotting.plot_pr(curves, out / "ablation_pr.png", title=f"PR per stage on {index.name}")
    print("# stages fused cumulatively; each row is the map after adding that term")
    print(reports.format_table(reports.ABLATION_HEADER, reports.ablation_rows(rows)))
    return _finish(skipped, out)


def cmd_fixtures(args) -> int:
    index = generate_fixtures(args.out, n=args.n, seed=args.seed)
    print(f"wrote {len(index)} scenes to {args.out}")
    return EXIT_OK


def cmd_bench(args) -> int:
    config = load_config(args.config, _parse_sets(args.set))
    if args.dataset:
        index = discover_dataset(args.dataset, layout=args.layout)
        rgb, depth = load_rgbd(index.samples[0].rgb, index.samples[0].depth)
    else:
        rgb, depth, _ = render_scene(np.random.default_rng(config.seed), (args.width, args.height))
        # as if read back from 8-bit files
        rgb, depth = quantize(rgb), quantize(depth)
    h, w = depth.shape
    timings = bench(rgb, depth, config, repeat=args.repeat)
    print(f"# {w}x{h}, best of {args.repeat}")
    rows = [[name, f"{seconds * 1000:.1f}"] for name, seconds in timings.items()]
    print(reports.format_table(["stage", "ms"], rows))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cdcp", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def dataset_args(p, with_config=True):
        p.add_argument("dataset", help="dataset root directory")
        p.add_argument("--layout", default="auto", choices=("auto", *LAYOUTS))
        if with_config:
            config_args(p)

    def config_args(p):
        p.add_argument("--config", help="key=value config file (default: $CDCP_CONFIG)")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key")

    p = sub.add_parser("detect", help="compute final saliency maps and score them")
    dataset_args(p)
    p.add_argument("--out", default="cdcp_out")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--method", default="CDCP")
    p.add_argument("--stages", action="store_true", help="also write stage sheets and per-region CSVs")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("eval", help="score existing maps against ground truth")
    dataset_args(p, with_config=False)
    p.add_argument("maps_dir")
    p.add_argument("--out", default="cdcp_eval")
    p.add_argument("--method", default="method")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ablation", help="score every fusion stage")
    dataset_args(p)
    p.add_argument("--out", default="cdcp_ablation")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_ablation)

    p = sub.add_parser("fixtures", help="write the synthetic RGB-D fixture set")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fixtures)

    p = sub.add_parser("bench", help="per-stage wall-clock timing")
    p.add_argument("--dataset", help="time the first sample of this dataset instead of a synthetic scene")
    p.add_argument("--layout", default="auto", choices=("auto", *LAYOUTS))
    p.add_argument("--width", type=int, default=640)
    p.add_argument("--height", type=int, default=480)
    p.add_argument("--repeat", type=int, default=3)
    config_args(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (DatasetError, ImageError, KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
