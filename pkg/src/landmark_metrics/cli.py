"""
Command line interface: ``extract``, ``evaluate``, ``synth`` and ``rank``.

Exit codes: 0 success, 1 validation failure, 2 I/O failure.
"""

from __future__ import annotations

import argparse
import itertools
import json
import logging
import sys
from collections import Counter
from pathlib import Path

from . import __version__
from .core import ImageGeometry, LandmarkError
from .detection import DEFAULT_RADIUS_MM
from .evaluate import ALL_METHODS, ALL_STRATEGIES, EvalConfig, evaluate_cohort, match_cases
from .heatmap import CONNECTIVITIES, DEFAULT_CONNECTIVITY, DEFAULT_THRESHOLD, heatmaps_to_landmarks
from .io import (
    LandmarkFile,
    read_heatmap_pair,
    read_landmarks,
    read_nifti,
    read_report_csv,
    write_landmarks,
    write_nifti,
    write_report_csv,
)
from .localisation import DEFAULT_ANGLE_BOUND_DEG
from .report import (
    DETECTION_METRICS,
    METRICS,
    CohortReport,
    aggregate,
    metric_direction,
    rank_variants,
    ranking_divergence,
)
from .synth import (
    PerturbationSpec,
    divergence_scenario,
    generate_gt,
    perturb_cases,
    rasterize_heatmaps,
)

EXIT_OK, EXIT_VALIDATION, EXIT_IO = 0, 1, 2


class ValidationFailure(Exception):
    pass


def _case_id_from_path(path) -> str:
    name = Path(path).name
    for ext in (".nii.gz", ".nii"):
        if name.endswith(ext):
            return name[: -len(ext)]
    return Path(path).stem


# ---------------------------------------------------------------- extract

def cmd_extract(args) -> int:
    cases = []
    for path in args.heatmaps:
        vol = read_nifti(path)
        cases.append(heatmaps_to_landmarks(vol, args.threshold, args.connectivity, _case_id_from_path(path)))
    for ant, inf in args.pair or []:
        vol = read_heatmap_pair(ant, inf)
        cases.append(heatmaps_to_landmarks(vol, args.threshold, args.connectivity, _case_id_from_path(ant)))
    if not cases:
        raise ValidationFailure("no heatmap volumes given")
    write_landmarks(LandmarkFile(cases), args.out)
    n = sum(c.n_points for c in cases)
    print(f"wrote {len(cases)} case(s), {n} point(s) to {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------- evaluate

def _parse_pred_arg(value, index):
    name, sep, path = value.partition("=")
    if sep and name and not Path(value).exists():
        return name, path
    return (f"pred{index}" if index else "pred"), value


def format_tables(report: CohortReport) -> str:
    """Plain-text tables: localisation (strategy x method rows) and detection.

    The best value of each column within a block is marked with ``*``.
    """
    variants = report.variants
    keys = set(report.keys())
    strategies = [s for s in ALL_STRATEGIES if any(k[0] == s for k in keys)]
    methods = [m for m in ALL_METHODS if any(k[1] == m for k in keys)]
    lines = []

    def block(title, rows, columns):
        # columns: (header, strategy, method, metric)
        cells = {}
        for col in columns:
            _, strategy, method, metric = col
            present = [
                (report.aggregates[(v, strategy, method, metric)].mean, v)
                for v in variants
                if (v, strategy, method, metric) in report.aggregates
                and report.aggregates[(v, strategy, method, metric)].mean is not None
            ]
            best = None
            if present:
                pick = max if metric_direction(metric) == "higher_better" else min
                best = pick(present, key=lambda t: t[0])[0]
            for v in variants:
                a = report.aggregates.get((v, strategy, method, metric))
                if a is None:
                    txt = "-"
                elif a.mean is None:
                    txt = f"NA (na={a.na_count})"
                else:
                    txt = a.format() + ("*" if a.mean == best and len(variants) > 1 else "")
                    if a.na_count:
                        txt += f" (na={a.na_count})"
                cells[(v, col)] = txt
        headers = ["", *[c[0] for c in columns]]
        table = [headers] + [[rows_label, *[cells[(v, c)] for c in columns]] for v, rows_label in rows]
        widths = [max(len(r[i]) for r in table) for i in range(len(headers))]
        lines.append(title)
        for r in table:
            lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
        lines.append("")

    loc_cols = []
    for s in strategies:
        for metric in ("d_ant", "d_inf", "delta_alpha"):
            if any(k[0] == s and k[2] == metric for k in keys):
                loc_cols.append((f"{s}:{metric}", s, None, metric))
    for m in methods:
        cols = [(h, s, m, metric) for h, s, _, metric in loc_cols]
        block(f"Localisation [{m}] (lower is better)", [(v, v) for v in variants], cols)

    det_cols = [
        (f"{s}:{metric}", s, "", metric)
        for s in strategies
        for metric in DETECTION_METRICS
        if (s, "", metric) in keys
    ]
    if det_cols:
        block("Detection (higher is better)", [(v, v) for v in variants], det_cols)
    return "\n".join(lines)


def cmd_evaluate(args) -> int:
    gt = read_landmarks(args.gt).cases
    variants = {}
    for i, value in enumerate(args.pred):
        name, path = _parse_pred_arg(value, i if len(args.pred) > 1 else 0)
        if name in variants:
            raise ValidationFailure(f"variant name {name!r} given twice")
        variants[name] = read_landmarks(path).cases

    problems = []
    for name, cases in sorted(variants.items()):
        m = match_cases(gt, cases)
        problems.extend(f"[{name}] {p}" for p in m.problems)
        if m.geometry_mismatch:
            raise ValidationFailure("\n".join(problems))
        if m.extra_pred and args.allow_partial:
            keep = {c.case_id for c in gt}
            variants[name] = [c for c in cases if c.case_id in keep]
    if problems:
        for p in problems:
            print(p, file=sys.stderr)
        if not args.allow_partial:
            raise ValidationFailure(f"{len(problems)} case mismatch(es); use --allow-partial to evaluate anyway")

    config = EvalConfig(
        strategies=tuple(args.strategy or ALL_STRATEGIES),
        methods=tuple(args.localisation or ALL_METHODS),
        radius_mm=args.radius_mm,
        global_bound_mm=args.global_bound_mm,
        angle_bound_deg=args.angle_bound_deg,
        far_counts_fn=not args.strict_threshold,
        volume_angle_mode=args.volume_angle,
    )
    diagnostics = Counter()
    report = evaluate_cohort(gt, variants, config, workers=args.workers, diagnostics=diagnostics)

    print(format_tables(report))
    if diagnostics:
        print("diagnostics: " + ", ".join(f"{k}={v}" for k, v in sorted(diagnostics.items())))
    if args.csv:
        comment = (
            f"landmark-metrics {__version__} evaluate; radius_mm={config.radius_mm}; "
            f"global_bound_mm={config.global_bound_mm}; angle_bound_deg={config.angle_bound_deg}; "
            f"far_counts_fn={config.far_counts_fn}"
        )
        write_report_csv(report, args.csv, comment=comment)
        print(f"report written to {args.csv}")
    return EXIT_OK


# ---------------------------------------------------------------- synth

def cmd_synth(args) -> int:
    geometry = ImageGeometry(args.width, args.height, args.slices, tuple(args.spacing))
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    if args.scenario == "divergence":
        gt, pred_a, pred_b = divergence_scenario(args.seed, args.n_cases, geometry)
        outputs = {"gt": gt, "pred_a": pred_a, "pred_b": pred_b}
    else:
        gt = generate_gt(args.n_cases, geometry, args.seed)
        outputs = {"gt": gt}
        spec = PerturbationSpec(
            jitter_sigma_mm=args.jitter_mm,
            drop_point_prob=args.drop_prob,
            spurious_slice_prob=args.spurious_prob,
            rotation_offset_deg=args.rotation_deg,
            seed=args.seed + 1,
        )
        if args.with_pred:
            outputs["pred"] = perturb_cases(gt, spec)

    for name, cases in outputs.items():
        path = out_dir / f"{name}.json"
        write_landmarks(LandmarkFile(cases), path)
        print(f"wrote {path}")
        if args.heatmaps and name != "gt":
            hdir = out_dir / f"{name}_heatmaps"
            hdir.mkdir(exist_ok=True)
            for c in cases:
                write_nifti(rasterize_heatmaps(c, args.sigma), hdir / f"{c.case_id}.nii")
            print(f"wrote {len(cases)} heatmap volume(s) to {hdir}")
    return EXIT_OK


# ---------------------------------------------------------------- rank

def load_variant_reports(paths) -> CohortReport:
    records = []
    owner = {}
    for path in paths:
        rep = read_report_csv(path)
        for v in rep.variants:
            if v in owner:
                raise ValidationFailure(f"variant {v!r} appears in both {owner[v]} and {path}")
            owner[v] = path
        records.extend(rep.records)
    report = aggregate(records)
    key_sets = {v: {k[1:] for k in report.aggregates if k[0] == v} for v in report.variants}
    ref = next(iter(key_sets.values()), set())
    for v, ks in key_sets.items():
        if ks != ref:
            raise ValidationFailure(f"variant {v!r} covers different metrics than the others")
    if len(report.variants) < 2:
        raise ValidationFailure("ranking needs at least two variants")
    return report


def winners(report: CohortReport) -> dict:
    return {k: rank_variants(report, k[2], k[0], k[1]) for k in report.keys()}


def divergence_pairs(rankings: dict) -> list:
    out = []
    for a, b in itertools.combinations(sorted(rankings), 2):
        d = ranking_divergence(rankings[a], rankings[b])
        if d.diverges:
            out.append((a, b, d))
    return out


def cmd_rank(args) -> int:
    report = load_variant_reports(args.reports)
    rankings = winners(report)
    print(f"variants: {', '.join(report.variants)}")
    print("winners per metric")
    for metric in METRICS:
        cells = [(k, r) for k, r in rankings.items() if k[2] == metric]
        if not cells:
            continue
        arrow = "higher" if metric_direction(metric) == "higher_better" else "lower"
        print(f"  {metric} ({arrow} is better)")
        for (strategy, method, _), ranking in sorted(cells):
            label = strategy + (f"/{method}" if method else "")
            print(f"    {label:<30} {' > '.join(ranking)}")

    div = divergence_pairs(rankings)
    n_keys = len(rankings)
    print(f"divergent metric pairs: {len(div)} of {n_keys * (n_keys - 1) // 2}")
    for a, b, d in div[: args.max_listed]:
        print(f"  {'/'.join(x for x in a if x)} -> {d.winner_a}  vs  {'/'.join(x for x in b if x)} -> {d.winner_b}")
    if len(div) > args.max_listed:
        print(f"  ... {len(div) - args.max_listed} more")

    if args.matrix_csv:
        keys = sorted(rankings)
        names = ["/".join(x for x in k if x) for k in keys]
        lines = [",".join(["metric", *names])]
        for ka, na in zip(keys, names):
            row = [str(int(ranking_divergence(rankings[ka], rankings[kb]).diverges)) for kb in keys]
            lines.append(",".join([na, *row]))
        Path(args.matrix_csv).write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(f"divergence matrix written to {args.matrix_csv}")
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="landmark-metrics", description=__doc__.splitlines()[1])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--config", help="JSON file with option defaults (keys as option names)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("extract", help="heatmap volumes -> landmark file")
    e.add_argument("heatmaps", nargs="*", help="two-channel NIfTI volumes (anterior, inferior)")
    e.add_argument("--pair", nargs=2, action="append", metavar=("ANT", "INF"),
                   help="single-channel anterior and inferior volumes of one case")
    e.add_argument("-o", "--out", required=True)
    e.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    e.add_argument("--connectivity", type=int, choices=CONNECTIVITIES, default=DEFAULT_CONNECTIVITY,
                   help="6 or 26 for 3D components, 8 for per-slice 2D components")
    e.set_defaults(func=cmd_extract)

    v = sub.add_parser("evaluate", help="score predictions against ground truth")
    v.add_argument("--gt", required=True)
    v.add_argument("--pred", required=True, action="append", help="[NAME=]path; repeat for several variants")
    v.add_argument("--strategy", action="append", choices=ALL_STRATEGIES)
    v.add_argument("--localisation", action="append", choices=ALL_METHODS)
    v.add_argument("--radius-mm", type=float, default=DEFAULT_RADIUS_MM)
    v.add_argument("--global-bound-mm", type=float, default=None,
                   help="fixed miss penalty instead of the farthest-corner distance")
    v.add_argument("--angle-bound-deg", type=float, default=DEFAULT_ANGLE_BOUND_DEG)
    v.add_argument("--strict-threshold", action="store_true",
                   help="far predictions under point-threshold count only as FP")
    v.add_argument("--volume-angle", choices=("points", "circular"), default="points")
    v.add_argument("--csv")
    v.add_argument("--allow-partial", action="store_true")
    v.add_argument("--workers", type=int, default=1)
    v.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("synth", help="write synthetic ground truth and predictions")
    s.add_argument("--out-dir", required=True)
    s.add_argument("--scenario", choices=("plain", "divergence"), default="plain")
    s.add_argument("--n-cases", type=int, default=20)
    s.add_argument("--width", type=int, default=224)
    s.add_argument("--height", type=int, default=224)
    s.add_argument("--slices", type=int, default=10)
    s.add_argument("--spacing", type=float, nargs=3, default=[1.2, 1.2, 10.0])
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--with-pred", action="store_true", help="also write a perturbed prediction")
    s.add_argument("--jitter-mm", type=float, default=0.0)
    s.add_argument("--drop-prob", type=float, default=0.0)
    s.add_argument("--spurious-prob", type=float, default=0.0)
    s.add_argument("--rotation-deg", type=float, default=0.0)
    s.add_argument("--heatmaps", action="store_true", help="rasterise predictions as NIfTI heatmaps")
    s.add_argument("--sigma", type=float, default=2.0, help="heatmap Gaussian sigma in voxels")
    s.set_defaults(func=cmd_synth)

    r = sub.add_parser("rank", help="rank variants from evaluate CSV reports")
    r.add_argument("reports", nargs="+")
    r.add_argument("--matrix-csv")
    r.add_argument("--max-listed", type=int, default=20)
    r.set_defaults(func=cmd_rank)
    return p


def _apply_config(parser, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    with open(known.config, encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ValidationFailure(f"{known.config}: config must be a JSON object")
    cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    parser.set_defaults(**cfg)
    for action in parser._subparsers._group_actions:
        for sp in action.choices.values():
            sp.set_defaults(**cfg)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
        return args.func(args)
    except (ValidationFailure, LandmarkError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except json.JSONDecodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        name = getattr(exc, "filename", None)
        print(f"error: {name + ': ' if name else ''}{exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
