"""Command-line interface.

Subcommands mirror the pipeline stages: ``partition`` dumps region tags,
``clean`` reports overlap reduction, ``balance`` writes a balanced CSV with a
provenance column, ``run`` executes cross-validation, ``ablate-noise`` and
``ablate-components`` sweep the ablation grids, ``report`` summarizes an
emitted JSON report.  Flags override JSON config-file values, which override
defaults.  Exit code 0 on success, 1 when any emitted report is partial, 2 on
hard errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import harness, metrics, overlap, posterior, region, resample
from .config import RunConfig, load_config_file, merge_config
from .data_model import Dataset, load_csv, minmax_apply, minmax_fit, rng_for


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; explicit flags override it")
    p.add_argument("--data", dest="data_path", help="dataset CSV path")
    p.add_argument("--label-col", dest="label_column", help="label column name or zero-based index")
    p.add_argument("--seed", type=int)
    p.add_argument("--folds", type=int)
    p.add_argument("--repeats", type=int)
    p.add_argument("--scale", action="store_const", const=True, default=None,
                   help="min-max scale features (fit on training data only)")
    p.add_argument("--threshold-mode", dest="threshold_mode", choices=["midpoint", "mean"])
    p.add_argument("--z-threshold", dest="z_threshold", type=float)
    p.add_argument("--sor-fallback-fraction", dest="sor_fallback_fraction", type=float)
    p.add_argument("--sor-keep", dest="sor_keep", choices=["after", "before"])
    p.add_argument("--omrp-k", dest="omrp_k", type=int)
    p.add_argument("--omrp-max-attempts-factor", dest="omrp_max_attempts_factor", type=int)
    p.add_argument("--jaya-pop", dest="jaya_pop", type=int)
    p.add_argument("--jaya-iters", dest="jaya_iters", type=int)
    p.add_argument("--noise-remove-fraction", dest="noise_remove_fraction", type=float)
    p.add_argument("--no-balancing", dest="use_balancing", action="store_const", const=False, default=None)
    p.add_argument("--no-pruning", dest="use_pruning", action="store_const", const=False, default=None)


CONFIG_KEYS = ("data_path", "label_column", "seed", "folds", "repeats", "scale",
               "threshold_mode", "z_threshold", "sor_fallback_fraction", "sor_keep",
               "omrp_k", "omrp_max_attempts_factor", "jaya_pop", "jaya_iters",
               "noise_remove_fraction", "use_balancing", "use_pruning")


def _build_config(args) -> RunConfig:
    cfg = load_config_file(args.config) if args.config else RunConfig()
    overrides = {k: getattr(args, k, None) for k in CONFIG_KEYS}
    cfg = merge_config(cfg, overrides)
    if cfg.data_path is None:
        raise SystemExit("error: --data (or a config file with data_path) is required")
    return cfg


def _load(cfg: RunConfig) -> Dataset:
    ds = load_csv(cfg.data_path, cfg.label_column)
    if cfg.scale:
        lo, span = minmax_fit(ds.features)
        ds = Dataset(minmax_apply(ds.features, lo, span), ds.labels, ds.class_names)
    return ds


def _fit_partition(ds: Dataset, cfg: RunConfig):
    model = posterior.fit_nb(ds)
    post = posterior.posteriors(model, ds)
    thresholds = region.class_thresholds(post, ds.labels, mode=cfg.threshold_mode)
    return region.partition(post, thresholds, ds.labels)


def _open_out(path):
    return open(path, "w", newline="", encoding="utf-8") if path else sys.stdout


def cmd_partition(args) -> int:
    cfg = _build_config(args)
    ds = _load(cfg)
    assignment = _fit_partition(ds, cfg)
    f = _open_out(args.out)
    try:
        w = csv.writer(f)
        w.writerow(["sample_index", "label", "tag", "max_own_posterior"])
        for i in range(ds.n_samples):
            w.writerow([i, ds.class_names[ds.labels[i]], region.TAG_NAMES[assignment.tags[i]],
                        f"{assignment.max_own_posterior[i]:.6f}"])
    finally:
        if f is not sys.stdout:
            f.close()
    counts = assignment.counts()
    print(f"partition: {counts['core']} core, {counts['overlapping']} overlapping, "
          f"{counts['noisy']} noisy", file=sys.stderr)
    return 0


def cmd_clean(args) -> int:
    cfg = _build_config(args)
    ds = _load(cfg)
    assignment = _fit_partition(ds, cfg)
    nonov = overlap.sor_all(ds, assignment, z_threshold=cfg.z_threshold,
                            fallback_fraction=cfg.sor_fallback_fraction, keep_mode=cfg.sor_keep)
    base = resample.base_sample_sets(ds, assignment, nonov,
                                     noise_remove_fraction=cfg.noise_remove_fraction)
    kept = np.sort(np.concatenate([base[c] for c in range(ds.n_classes)]))
    before = metrics.overlap_ratios(ds, knn_k=cfg.or_knn_k).or_dataset
    cleaned = ds.subset(kept)
    after = metrics.overlap_ratios(cleaned, knn_k=cfg.or_knn_k).or_dataset
    print(f"overlap ratio before: {before * 100:.2f}%")
    print(f"overlap ratio after:  {after * 100:.2f}%")
    print(f"kept {kept.size} of {ds.n_samples} samples")
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f)
            w.writerow([f"f{i + 1}" for i in range(ds.n_features)] + ["class"])
            for i in kept:
                w.writerow([f"{v:.6f}" for v in ds.features[i]] + [ds.class_names[ds.labels[i]]])
    return 0


def cmd_balance(args) -> int:
    cfg = _build_config(args)
    ds = _load(cfg)
    assignment = _fit_partition(ds, cfg)
    nonov = overlap.sor_all(ds, assignment, z_threshold=cfg.z_threshold,
                            fallback_fraction=cfg.sor_fallback_fraction, keep_mode=cfg.sor_keep)
    base = resample.base_sample_sets(ds, assignment, nonov,
                                     noise_remove_fraction=cfg.noise_remove_fraction)
    result = resample.build_balanced(ds, base, knn_k=cfg.omrp_k,
                                     max_attempts_factor=cfg.omrp_max_attempts_factor,
                                     rng_factory=lambda c: rng_for(cfg.seed, "omrp", c))
    out = result.dataset
    f = _open_out(args.out)
    try:
        w = csv.writer(f)
        w.writerow([f"f{i + 1}" for i in range(out.n_features)] + ["class", "provenance"])
        for i in range(out.n_samples):
            w.writerow([f"{v:.6f}" for v in out.features[i]]
                       + [out.class_names[out.labels[i]], result.provenance[i]])
    finally:
        if f is not sys.stdout:
            f.close()
    counts = ", ".join(f"{n}={c}" for n, c in zip(out.class_names, out.class_counts()))
    print(f"balanced class counts: {counts}", file=sys.stderr)
    return 0


def cmd_run(args) -> int:
    cfg = _build_config(args)
    report = harness.run_cv(cfg)
    out = args.out or "report.json"
    harness.emit_report(report, out, fmt=args.format)
    _print_aggregate(report)
    return 1 if report.partial else 0


def _print_aggregate(report, prefix="") -> None:
    for key, ms in report.aggregate.items():
        print(f"{prefix}{key}: {ms['mean']:.4f} +/- {ms['std']:.4f}")
    if report.partial:
        aborted = sum(1 for fr in report.folds if fr.status != "ok")
        print(f"{prefix}partial report: {aborted} aborted fold(s)", file=sys.stderr)


def cmd_ablate_noise(args) -> int:
    cfg = _build_config(args)
    fractions = tuple(float(x) for x in args.fractions.split(","))
    reports = harness.ablate_noise(cfg, fractions)
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    partial = False
    for frac, rep in reports.items():
        harness.emit_report(rep, outdir / f"noise_{frac:g}.{args.format}", fmt=args.format)
        print(f"-- noise fraction {frac:g}")
        _print_aggregate(rep, prefix="   ")
        partial |= rep.partial
    return 1 if partial else 0


def cmd_ablate_components(args) -> int:
    cfg = _build_config(args)
    reports = harness.ablate_components(cfg)
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    partial = False
    for name, rep in reports.items():
        harness.emit_report(rep, outdir / f"{name}.{args.format}", fmt=args.format)
        print(f"-- variant {name} (balancing={rep.config.use_balancing}, "
              f"pruning={rep.config.use_pruning})")
        _print_aggregate(rep, prefix="   ")
        partial |= rep.partial
    return 1 if partial else 0


def cmd_report(args) -> int:
    with open(args.input, encoding="utf-8") as f:
        doc = json.load(f)
    agg = doc.get("aggregate", {})
    print(f"dataset: {doc['config'].get('data_path')}")
    print(f"folds: {len(doc.get('folds', []))} (partial={doc.get('partial')})")
    for key, ms in agg.items():
        print(f"{key}: {ms['mean']:.4f} +/- {ms['std']:.4f}")
    ors = doc.get("overlap_ratios", {})
    if "before" in ors and "after" in ors:
        print(f"overlap ratio: {ors['before']['mean'] * 100:.2f}% -> {ors['after']['mean'] * 100:.2f}%")
    return 1 if doc.get("partial") else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="imbkit",
                                     description="imbalanced-learning pipeline: partition, clean, "
                                                 "balance, prune, cross-validate")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        _add_common_flags(p)
        p.set_defaults(func=func)
        return p

    p = add("partition", cmd_partition, "tag every sample core/overlapping/noisy and dump as CSV")
    p.add_argument("--out", help="output CSV path (default stdout)")

    p = add("clean", cmd_clean, "run partition + overlap cleaning; report overlap-ratio change")
    p.add_argument("--out", help="write the cleaned dataset CSV here")

    p = add("balance", cmd_balance, "full-data cleaning + balancing; CSV with provenance column")
    p.add_argument("--out", help="output CSV path (default stdout)")

    p = add("run", cmd_run, "repeated stratified cross-validation of the full pipeline")
    p.add_argument("--out", help="report path (default report.json)")
    p.add_argument("--format", choices=["json", "csv"], default="json")

    p = add("ablate-noise", cmd_ablate_noise, "re-run CV at several noise-removal fractions")
    p.add_argument("--fractions", default="0,0.25,0.5,0.75,1.0")
    p.add_argument("--out-dir", default="ablation_noise")
    p.add_argument("--format", choices=["json", "csv"], default="json")

    p = add("ablate-components", cmd_ablate_components,
            "re-run CV without balancing, without pruning, and in full")
    p.add_argument("--out-dir", default="ablation_components")
    p.add_argument("--format", choices=["json", "csv"], default="json")

    p = sub.add_parser("report", help="summarize an emitted JSON report")
    p.add_argument("input")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
