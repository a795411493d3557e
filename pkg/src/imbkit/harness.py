"""End-to-end cross-validation harness, ablations and report emission.

Every fold fits the probabilistic model, partitions and cleans the training
data, balances it, trains and prunes the pool, then scores the untouched test
fold.  Nothing computed from a test fold ever feeds a training-side stage.
Folds that fail a stage are recorded as aborted and the report marked partial
instead of killing the whole run.
"""

from __future__ import annotations

import json
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import learners, metrics, overlap, posterior, pruning, region, resample
from .config import RunConfig
from .data_model import (Dataset, FoldPlan, PipelineWarning, load_csv, minmax_apply,
                         minmax_fit, rng_for, stratified_folds)

METRIC_KEYS = ("accuracy", "precision", "recall", "f1", "g_mean", "auc")
FITNESS_HOLDOUT_FRACTION = 0.2


@dataclass
class FoldResult:
    repeat: int
    fold: int
    status: str                  # "ok" | "aborted"
    reason: str | None = None
    metrics: dict = field(default_factory=dict)
    mask: list | None = None
    or_before: float | None = None
    or_after: float | None = None
    train_indices: np.ndarray | None = None   # in-memory only, never serialized
    test_indices: np.ndarray | None = None
    timings: dict = field(default_factory=dict)


@dataclass
class ExperimentReport:
    config: RunConfig
    folds: list
    aggregate: dict
    overlap_ratios: dict
    warnings: list
    partial: bool
    timings: dict = field(default_factory=dict)  # in-memory only

    def to_document(self) -> dict:
        doc = {"config": self.config.to_dict()}
        doc["folds"] = [{
            "repeat": fr.repeat, "fold": fr.fold, "status": fr.status, "reason": fr.reason,
            "metrics": {k: fr.metrics[k] for k in METRIC_KEYS if k in fr.metrics},
            "mask": fr.mask, "or_before": fr.or_before, "or_after": fr.or_after,
        } for fr in self.folds]
        if self.aggregate:
            doc["aggregate"] = self.aggregate
        doc["overlap_ratios"] = self.overlap_ratios
        doc["warnings"] = list(self.warnings)
        doc["partial"] = self.partial
        return doc


def _split_for_fitness(labels: np.ndarray, rng: np.random.Generator):
    """Stratified 80/20 indices (pool-train, fitness); singleton classes stay on the train side."""
    fit_parts, train_parts = [], []
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        rng.shuffle(idx)
        n_fit = max(1, int(np.floor(FITNESS_HOLDOUT_FRACTION * idx.size + 0.5))) if idx.size >= 2 else 0
        fit_parts.append(idx[:n_fit])
        train_parts.append(idx[n_fit:])
    return np.sort(np.concatenate(train_parts)), np.sort(np.concatenate(fit_parts))


def _run_fold(ds: Dataset, train_idx: np.ndarray, test_idx: np.ndarray,
              config: RunConfig, repeat: int, fold: int) -> FoldResult:
    seed = config.seed
    result = FoldResult(repeat=repeat, fold=fold, status="ok",
                        train_indices=train_idx, test_indices=test_idx)
    clock = time.perf_counter

    t0 = clock()
    train_ds = ds.subset(train_idx)
    test_x = ds.features[test_idx]
    test_y = ds.labels[test_idx]
    if config.scale:
        lo, span = minmax_fit(train_ds.features)
        train_ds = Dataset(minmax_apply(train_ds.features, lo, span), train_ds.labels, ds.class_names)
        test_x = minmax_apply(test_x, lo, span)

    model = posterior.fit_nb(train_ds)
    post = posterior.posteriors(model, train_ds)
    thresholds = region.class_thresholds(post, train_ds.labels, mode=config.threshold_mode)
    assignment = region.partition(post, thresholds, train_ds.labels)
    result.timings["partition"] = clock() - t0

    t0 = clock()
    nonoverlap = overlap.sor_all(train_ds, assignment, z_threshold=config.z_threshold,
                                 fallback_fraction=config.sor_fallback_fraction,
                                 keep_mode=config.sor_keep)
    base_sets = resample.base_sample_sets(train_ds, assignment, nonoverlap,
                                          noise_remove_fraction=config.noise_remove_fraction)
    result.timings["clean"] = clock() - t0

    t0 = clock()
    if train_ds.n_samples >= config.or_knn_k + 1:
        result.or_before = metrics.overlap_ratios(train_ds, knn_k=config.or_knn_k).or_dataset
    cleaned_idx = np.sort(np.concatenate([base_sets[c] for c in range(ds.n_classes)]))
    cleaned = train_ds.subset(cleaned_idx)  # raises if cleaning emptied a class
    if cleaned.n_samples >= config.or_knn_k + 1:
        result.or_after = metrics.overlap_ratios(cleaned, knn_k=config.or_knn_k).or_dataset
    result.timings["overlap_ratio"] = clock() - t0

    t0 = clock()
    if config.use_balancing:
        balanced = resample.build_balanced(
            train_ds, base_sets, knn_k=config.omrp_k,
            max_attempts_factor=config.omrp_max_attempts_factor,
            rng_factory=lambda c: rng_for(seed, "omrp", repeat, fold, c))
        data_x, data_y = balanced.dataset.features, balanced.dataset.labels
    else:
        data_x, data_y = cleaned.features, cleaned.labels
    result.timings["balance"] = clock() - t0

    t0 = clock()
    pool_seed = int(rng_for(seed, "pool", repeat, fold).integers(2 ** 31))
    if config.use_pruning:
        train_part, fit_part = _split_for_fitness(data_y, rng_for(seed, "split", repeat, fold))
        if fit_part.size == 0:
            warnings.warn("fitness holdout empty; evaluating pruning on the pool training data",
                          PipelineWarning, stacklevel=2)
            train_part = np.arange(data_y.size)
            fit_part = train_part
        pool = learners.train_pool(data_x[train_part], data_y[train_part], ds.n_classes,
                                   pool_spec=config.pool, seed=pool_seed)
        pruned = pruning.prune(pool, data_x[fit_part], data_y[fit_part],
                               n_pop=config.jaya_pop, t_max=config.jaya_iters,
                               rng=rng_for(seed, "jaya", repeat, fold))
        mask = pruned.mask
    else:
        pool = learners.train_pool(data_x, data_y, ds.n_classes, pool_spec=config.pool, seed=pool_seed)
        mask = np.ones(pool.size, dtype=np.int64)
    result.timings["ensemble"] = clock() - t0

    t0 = clock()
    preds_matrix = learners.member_predictions(pool, test_x)
    preds = learners.vote_from_predictions(preds_matrix, mask.astype(bool), ds.n_classes)
    cmetrics = metrics.classification_metrics(preds, test_y, ds.n_classes)
    result.metrics = cmetrics.as_dict()
    try:
        scores = learners.vote_shares(preds_matrix, mask.astype(bool), ds.n_classes)
        result.metrics["auc"] = metrics.macro_ovr_auc(scores, test_y)
    except ValueError:
        pass  # degenerate single-class test fold: AUC undefined, omitted
    result.mask = [int(v) for v in mask]
    result.timings["predict"] = clock() - t0
    return result


def _aggregate(fold_results) -> dict:
    ok = [fr for fr in fold_results if fr.status == "ok"]
    agg = {}
    for key in METRIC_KEYS:
        vals = np.array([fr.metrics[key] for fr in ok if key in fr.metrics])
        if vals.size:
            agg[key] = {"mean": float(vals.mean()), "std": float(vals.std())}
    return agg


def _or_summary(fold_results) -> dict:
    out = {}
    for name in ("or_before", "or_after"):
        vals = np.array([getattr(fr, name) for fr in fold_results
                         if fr.status == "ok" and getattr(fr, name) is not None])
        key = name.split("_")[1]
        if vals.size:
            out[key] = {"mean": float(vals.mean()), "std": float(vals.std())}
    return out


def run_cv(config: RunConfig, dataset: Dataset | None = None,
           fold_plan: FoldPlan | None = None) -> ExperimentReport:
    """Repeated stratified cross-validation of the full pipeline.

    ``dataset`` and ``fold_plan`` may be supplied directly (ablations share a
    plan across variants); otherwise they come from the config.  Deterministic
    for a given config and seed.
    """
    if dataset is None:
        if config.data_path is None:
            raise ValueError("config.data_path is required when no dataset is passed")
        dataset = load_csv(config.data_path, config.label_column)
    t_start = time.perf_counter()
    fold_results: list[FoldResult] = []
    caught: list[str] = []
    with warnings.catch_warnings(record=True) as wrec:
        warnings.simplefilter("always")
        if fold_plan is None:
            fold_plan = stratified_folds(dataset, config.folds, config.repeats, config.seed)
        for r in range(fold_plan.repeats):
            for f in range(fold_plan.k):
                train_idx = fold_plan.train_indices(r, f)
                test_idx = fold_plan.test_indices(r, f)
                try:
                    fold_results.append(_run_fold(dataset, train_idx, test_idx, config, r, f))
                except Exception as exc:
                    fold_results.append(FoldResult(
                        repeat=r, fold=f, status="aborted",
                        reason=f"{type(exc).__name__}: {exc}",
                        train_indices=train_idx, test_indices=test_idx))
        caught = [f"{w.category.__name__}: {w.message}" for w in wrec]

    ok = [fr for fr in fold_results if fr.status == "ok"]
    report = ExperimentReport(
        config=config, folds=fold_results, aggregate=_aggregate(fold_results),
        overlap_ratios=_or_summary(fold_results), warnings=caught,
        partial=(len(ok) < len(fold_results)) or not fold_results)
    report.timings["total"] = time.perf_counter() - t_start
    return report


DEFAULT_NOISE_FRACTIONS = (0.0, 0.25, 0.5, 0.75, 1.0)

COMPONENT_VARIANTS = {
    "no_balancing": {"use_balancing": False, "use_pruning": True},
    "no_pruning": {"use_balancing": True, "use_pruning": False},
    "full": {"use_balancing": True, "use_pruning": True},
}


def ablate_noise(config: RunConfig, fractions=DEFAULT_NOISE_FRACTIONS,
                 dataset: Dataset | None = None) -> dict:
    """One report per noise-removal fraction, all sharing the same fold plan."""
    fractions = tuple(fractions)
    if any(not 0.0 <= f <= 1.0 for f in fractions):
        raise ValueError("noise fractions must lie in [0, 1]")
    if dataset is None:
        dataset = load_csv(config.data_path, config.label_column)
    plan = stratified_folds(dataset, config.folds, config.repeats, config.seed)
    return {f: run_cv(config.with_overrides(noise_remove_fraction=f), dataset, plan)
            for f in fractions}


def ablate_components(config: RunConfig, dataset: Dataset | None = None) -> dict:
    """Reports for the no-balancing, no-pruning and full pipeline variants on shared folds."""
    if dataset is None:
        dataset = load_csv(config.data_path, config.label_column)
    plan = stratified_folds(dataset, config.folds, config.repeats, config.seed)
    return {name: run_cv(config.with_overrides(**switches), dataset, plan)
            for name, switches in COMPONENT_VARIANTS.items()}


# ---------------------------------------------------------------------------
# report emission


def _render_json(obj, indent=0) -> str:
    """JSON with insertion-ordered keys and all reals rendered at 6 decimal places."""
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  {json.dumps(str(k))}: {_render_json(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}  {_render_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return f"{float(obj):.6f}"
    return json.dumps(obj)


def report_csv_rows(report: ExperimentReport):
    """(repeat, fold, metric, value) rows for every metric of every completed fold."""
    rows = []
    for fr in report.folds:
        if fr.status != "ok":
            continue
        for key in METRIC_KEYS:
            if key in fr.metrics:
                rows.append((fr.repeat, fr.fold, key, fr.metrics[key]))
        for key, val in (("or_before", fr.or_before), ("or_after", fr.or_after)):
            if val is not None:
                rows.append((fr.repeat, fr.fold, key, val))
    return rows


def emit_report(report: ExperimentReport, path, fmt: str = "json") -> None:
    """Write the report as a JSON document or CSV rows; stable output bytes."""
    if fmt not in ("json", "csv"):
        raise ValueError(f"format must be json or csv, got {fmt!r}")
    if fmt == "json":
        text = _render_json(report.to_document()) + "\n"
    else:
        lines = ["repeat,fold,metric,value"]
        lines += [f"{r},{f},{m},{v:.6f}" for r, f, m, v in report_csv_rows(report)]
        text = "\n".join(lines) + "\n"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
