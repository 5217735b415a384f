"""Held-out-pixel error metrics and multi-model comparison reports."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

# Two-sided 95% normal quantile, used for the margin error bars.
Z95 = 1.959963984540054


def rse(truth: np.ndarray, imputed: np.ndarray, eval_mask: np.ndarray) -> float:
    """Relative squared error on the evaluation pixels, in percent.

    Frobenius norm of the masked residual over the Frobenius norm of the
    masked truth, times 100.
    """
    truth = np.asarray(truth, dtype=float)
    imputed = np.asarray(imputed, dtype=float)
    eval_mask = np.asarray(eval_mask, dtype=bool)
    if truth.shape != imputed.shape or truth.shape != eval_mask.shape:
        raise ValueError("truth, imputation, and mask shapes must match")
    if not eval_mask.any():
        raise ValueError("evaluation mask is empty")
    denom = np.linalg.norm(truth[eval_mask])
    if denom == 0.0:
        raise ValueError("truth is zero on the evaluation mask")
    return 100.0 * float(np.linalg.norm(imputed[eval_mask] - truth[eval_mask]) / denom)


def mse(truth: np.ndarray, imputed: np.ndarray, eval_mask: np.ndarray) -> float:
    """Mean squared residual over the evaluation pixels."""
    truth = np.asarray(truth, dtype=float)
    imputed = np.asarray(imputed, dtype=float)
    eval_mask = np.asarray(eval_mask, dtype=bool)
    if truth.shape != imputed.shape or truth.shape != eval_mask.shape:
        raise ValueError("truth, imputation, and mask shapes must match")
    if not eval_mask.any():
        raise ValueError("evaluation mask is empty")
    diff = imputed[eval_mask] - truth[eval_mask]
    return float(np.mean(diff * diff))


def margin_confidence(margins: np.ndarray) -> tuple:
    """Mean margin with its 95% normal-approximation interval over frames."""
    margins = np.asarray(margins, dtype=float)
    center = float(margins.mean())
    if margins.size < 2:
        return center, center, center
    half = Z95 * float(margins.std(ddof=1)) / np.sqrt(margins.size)
    return center, center - half, center + half


@dataclass
class EvalReport:
    """Per-frame and aggregate metrics for a set of models on shared eval masks."""

    models: list
    baseline: str
    full_model: str
    frame_rse: dict = field(default_factory=dict)
    frame_mse: dict = field(default_factory=dict)
    mean_rse: dict = field(default_factory=dict)
    mean_mse: dict = field(default_factory=dict)
    margins: dict = field(default_factory=dict)
    margin_mean: dict = field(default_factory=dict)
    margin_ci: dict = field(default_factory=dict)
    better_than_baseline: dict = field(default_factory=dict)
    worse_than_full: dict = field(default_factory=dict)


def compare_models(results: dict, truth: np.ndarray, eval_masks: np.ndarray,
                   baseline: str = "soft", full_model: str = "full") -> EvalReport:
    """Score every model on identical evaluation masks.

    ``results`` maps model name to its (T, m, n) imputation. Margins are
    taken against the baseline model (positive means better than the
    baseline); ties count as "not better". Win counts against the baseline
    and loss counts against the full model are only filled in when those
    models are present.
    """
    truth = np.asarray(truth, dtype=float)
    eval_masks = np.asarray(eval_masks, dtype=bool)
    if truth.shape != eval_masks.shape:
        raise ValueError("truth and evaluation masks must share one shape")
    T = truth.shape[0]
    report = EvalReport(models=list(results), baseline=baseline, full_model=full_model)
    for name, frames in results.items():
        frames = np.asarray(frames, dtype=float)
        if frames.shape != truth.shape:
            raise ValueError(f"model {name!r} frames have shape {frames.shape}, "
                             f"expected {truth.shape}")
        report.frame_rse[name] = np.array(
            [rse(truth[t], frames[t], eval_masks[t]) for t in range(T)])
        report.frame_mse[name] = np.array(
            [mse(truth[t], frames[t], eval_masks[t]) for t in range(T)])
        report.mean_rse[name] = float(report.frame_rse[name].mean())
        report.mean_mse[name] = float(report.frame_mse[name].mean())
    if baseline in results:
        base = report.frame_rse[baseline]
        for name in results:
            margins = base - report.frame_rse[name]
            report.margins[name] = margins
            center, lo, hi = margin_confidence(margins)
            report.margin_mean[name] = center
            report.margin_ci[name] = (lo, hi)
            report.better_than_baseline[name] = int(np.count_nonzero(margins > 0))
    if full_model in results:
        full = report.frame_rse[full_model]
        for name in results:
            report.worse_than_full[name] = int(
                np.count_nonzero(report.frame_rse[name] > full))
    return report


def write_frame_metrics(path, report: EvalReport) -> None:
    """One CSV row per (model, frame): model, t, rse_pct, mse."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["model", "t", "rse_pct", "mse"])
        for name in report.models:
            for t, (r, e) in enumerate(zip(report.frame_rse[name], report.frame_mse[name])):
                writer.writerow([name, t, format(r, ".17g"), format(e, ".17g")])


def write_summary(path, report: EvalReport) -> None:
    """One CSV row per model with aggregate metrics and win/loss counts."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["model", "rse_pct", "mse", "better_than_baseline", "worse_than_full"])
        for name in report.models:
            writer.writerow([
                name,
                format(report.mean_rse[name], ".17g"),
                format(report.mean_mse[name], ".17g"),
                report.better_than_baseline.get(name, ""),
                report.worse_than_full.get(name, ""),
            ])


def write_margins(path, report: EvalReport, level: str = "") -> None:
    """Plot-ready margins vs the baseline: model, level, mean, ci_lo, ci_hi."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["model", "level", "margin_mean", "ci_lo", "ci_hi"])
        for name in report.models:
            if name == report.baseline or name not in report.margin_mean:
                continue
            lo, hi = report.margin_ci[name]
            writer.writerow([name, level, format(report.margin_mean[name], ".17g"),
                             format(lo, ".17g"), format(hi, ".17g")])
