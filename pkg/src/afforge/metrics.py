"""Saliency-style evaluation metrics plus dataset quality statistics.

Degenerate instances (all-positive GT for AUC, zero-mass maps for SIM/KLD,
empty fixation sets for NSS, single-annotation diversity) return None rather
than a silent 0 so aggregates can exclude them explicitly. All conventions
that the published metric names leave open (binarization threshold, KLD
direction, epsilon, fixation rule) are module constants recorded in every
MetricReport.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import rankdata

from .errors import LengthMismatchError

GT_BINARIZE_THRESHOLD = 0.5
AIOU_THRESHOLD_STEP = 0.01
EPSILON = 1e-12
NSS_FIXATION_RATIO = 0.5
COVERAGE_TAU = 0.5
KLD_DIRECTION = "gt_to_pred"  # KLD(Q=gt || P=pred), saliency-benchmark order

METRIC_CONVENTIONS = {
    "gt_binarize_threshold": GT_BINARIZE_THRESHOLD,
    "aiou_threshold_step": AIOU_THRESHOLD_STEP,
    "epsilon": EPSILON,
    "nss_fixation_ratio": NSS_FIXATION_RATIO,
    "coverage_tau": COVERAGE_TAU,
    "kld_direction": KLD_DIRECTION,
}


def _paired(pred, gt):
    p = np.asarray(pred, dtype=np.float64).ravel()
    g = np.asarray(gt, dtype=np.float64).ravel()
    if p.shape[0] != g.shape[0]:
        raise LengthMismatchError(f"pred has {p.shape[0]} values, gt has {g.shape[0]}")
    if p.shape[0] == 0:
        raise LengthMismatchError("metric inputs must be non-empty")
    return p, g


def aiou(pred, gt, binarize_threshold: float = GT_BINARIZE_THRESHOLD) -> float:
    """IoU against binarized GT, averaged over prediction thresholds
    0.01..0.99; a threshold where both sets are empty counts as IoU 1."""
    p, g = _paired(pred, gt)
    gt_bin = g >= binarize_threshold
    thresholds = np.arange(1, 100, dtype=np.float64) / 100.0
    pred_bin = p[None, :] >= thresholds[:, None]
    inter = (pred_bin & gt_bin[None, :]).sum(axis=1).astype(np.float64)
    union = (pred_bin | gt_bin[None, :]).sum(axis=1).astype(np.float64)
    iou = np.ones_like(inter)
    nz = union > 0
    iou[nz] = inter[nz] / union[nz]
    return float(iou.mean())


def auc(pred, gt, binarize_threshold: float = GT_BINARIZE_THRESHOLD):
    """ROC area via the Mann-Whitney statistic with midrank tie handling.

    Returns None when binarized GT has no positives or no negatives.
    """
    p, g = _paired(pred, gt)
    pos = g >= binarize_threshold
    n_pos = int(pos.sum())
    n_neg = p.shape[0] - n_pos
    if n_pos == 0 or n_neg == 0:
        return None
    ranks = rankdata(p, method="average")
    u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def sim(pred, gt):
    """Histogram intersection of the two mass-normalized maps.

    Returns None when either side has zero mass.
    """
    p, g = _paired(pred, gt)
    sp = p.sum()
    sg = g.sum()
    if sp <= 0.0 or sg <= 0.0:
        return None
    return float(np.minimum(p / sp, g / sg).sum())


def mae(pred, gt) -> float:
    """Mean absolute difference of raw heatmap values, no normalization."""
    p, g = _paired(pred, gt)
    return float(np.abs(p - g).mean())


def kld(pred, gt, eps: float = EPSILON):
    """KL divergence from normalized GT to normalized prediction.

    eps is added to pred before renormalization so empty predictions stay
    finite; returns None when GT has zero mass.
    """
    p, g = _paired(pred, gt)
    sg = g.sum()
    if sg <= 0.0:
        return None
    q = g / sg
    ps = p + eps
    ps = ps / ps.sum()
    m = q > 0.0
    return float(np.sum(q[m] * np.log(q[m] / ps[m])))


def nss(pred, gt, fixation_ratio: float = NSS_FIXATION_RATIO):
    """Mean z-scored prediction value over GT fixation pixels.

    Fixations are pixels with gt / max(gt) >= fixation_ratio. An all-zero GT
    has no fixations and returns None; that check runs before the zero-std
    rule, which maps a constant prediction to 0 by definition.
    """
    p, g = _paired(pred, gt)
    gmax = g.max()
    if gmax <= 0.0:
        return None
    fix = (g / gmax) >= fixation_ratio
    sigma = p.std()
    if sigma == 0.0:
        return 0.0
    z = (p - p.mean()) / sigma
    return float(z[fix].mean())


def coverage(annotations, tau: float = COVERAGE_TAU) -> float:
    """Fraction of points covered by the union of the annotations at tau."""
    if len(annotations) == 0:
        raise ValueError("coverage needs at least one annotation")
    stack = [np.asarray(a, dtype=np.float64).ravel() for a in annotations]
    n = stack[0].shape[0]
    if any(a.shape[0] != n for a in stack):
        raise LengthMismatchError("annotations must have equal lengths")
    union_max = np.maximum.reduce(stack)
    return float(np.mean(union_max >= tau))


def diversity(annotations, eps: float = EPSILON):
    """Average pairwise KL divergence over ordered annotation pairs.

    For a pair (a, b), a is the reference distribution and b is eps-smoothed;
    pairs whose reference has zero mass are skipped. Returns None with fewer
    than 2 annotations or when every pair is skipped.
    """
    if len(annotations) < 2:
        return None
    stack = [np.asarray(a, dtype=np.float64).ravel() for a in annotations]
    n = stack[0].shape[0]
    if any(a.shape[0] != n for a in stack):
        raise LengthMismatchError("annotations must have equal lengths")
    refs = []
    smoothed = []
    for a in stack:
        s = a.sum()
        refs.append(a / s if s > 0.0 else None)
        sm = a + eps
        smoothed.append(sm / sm.sum())
    total = 0.0
    pairs = 0
    for i, q in enumerate(refs):
        if q is None:
            continue
        m = q > 0.0
        qm = q[m]
        for j, p in enumerate(smoothed):
            if j == i:
                continue
            total += float(np.sum(qm * np.log(qm / p[m])))
            pairs += 1
    if pairs == 0:
        return None
    return total / pairs


@dataclass
class MetricReport:
    """Per-record metric values; absent (None) entries carry a note saying
    why, and the conventions block pins every tunable definition used."""

    aiou: float | None = None
    auc: float | None = None
    sim: float | None = None
    mae: float | None = None
    kld_2d: float | None = None
    sim_2d: float | None = None
    nss_2d: float | None = None
    notes: dict = field(default_factory=dict)
    conventions: dict = field(default_factory=lambda: dict(METRIC_CONVENTIONS))

    def to_dict(self) -> dict:
        return asdict(self)


def score_record(pred_3d, gt_3d, pred_2d=None, gt_2d=None) -> MetricReport:
    """Full metric report for one record: 3D suite always, 2D suite when a
    rendered pair is supplied."""
    report = MetricReport()
    report.aiou = aiou(pred_3d, gt_3d)
    report.auc = auc(pred_3d, gt_3d)
    if report.auc is None:
        report.notes["auc"] = "degenerate: binarized gt is single-class"
    report.sim = sim(pred_3d, gt_3d)
    if report.sim is None:
        report.notes["sim"] = "zero mass on one side"
    report.mae = mae(pred_3d, gt_3d)
    if pred_2d is not None and gt_2d is not None:
        report.kld_2d = kld(pred_2d, gt_2d)
        if report.kld_2d is None:
            report.notes["kld_2d"] = "zero-mass ground truth"
        report.sim_2d = sim(pred_2d, gt_2d)
        if report.sim_2d is None:
            report.notes["sim_2d"] = "zero mass on one side"
        report.nss_2d = nss(pred_2d, gt_2d)
        if report.nss_2d is None:
            report.notes["nss_2d"] = "no fixation pixels"
    return report


def aggregate_reports(reports) -> dict:
    """Mean of each metric over the records where it is present, with counts
    of contributing and absent records."""
    keys = ("aiou", "auc", "sim", "mae", "kld_2d", "sim_2d", "nss_2d")
    out = {}
    for key in keys:
        vals = [getattr(r, key) for r in reports]
        present = [v for v in vals if v is not None]
        out[key] = {
            "mean": float(np.mean(present)) if present else None,
            "count": len(present),
            "absent": len(vals) - len(present),
        }
    return out
