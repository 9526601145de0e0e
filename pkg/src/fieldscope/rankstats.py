"""Rank correlations over field pairs and a bootstrap comparison of two
correlations.

Kendall's tau is the tie-corrected tau-b variant: the taxonomy distance
takes only three distinct values off-diagonal, so ties are the norm, not
the exception.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import DegenerateSample, InputError

_MAX_REDRAWS = 100


@dataclass
class PairedSample:
    pairs: list        # (field_i, field_j) with i < j
    x: np.ndarray
    y: np.ndarray
    excluded: int = 0  # pairs dropped because either matrix cell was error-flagged

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if not (len(self.pairs) == len(self.x) == len(self.y)):
            raise InputError("pairs, x, y lengths differ")
        if len(set(self.pairs)) != len(self.pairs):
            raise InputError("duplicated pair in sample")
        if np.any(~np.isfinite(self.x)) or np.any(~np.isfinite(self.y)):
            raise InputError("sample values must be finite")

    def __len__(self):
        return len(self.pairs)


def build_paired_sample(matrix_x, matrix_y):
    """Join two matrices over all unordered label pairs, skipping error cells."""
    if matrix_x.labels != matrix_y.labels:
        raise InputError("matrices have different label sets")
    labels = matrix_x.labels
    pairs, xs, ys = [], [], []
    excluded = 0
    for a in range(len(labels)):
        for b in range(a + 1, len(labels)):
            vx = matrix_x.values[a, b]
            vy = matrix_y.values[a, b]
            if math.isnan(vx) or math.isnan(vy):
                excluded += 1
                continue
            pairs.append((labels[a], labels[b]))
            xs.append(vx)
            ys.append(vy)
    return PairedSample(pairs=pairs, x=np.array(xs), y=np.array(ys),
                        excluded=excluded)


def _check_nondegenerate(x, y):
    if len(x) < 2:
        raise DegenerateSample("need at least 2 pairs")
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise DegenerateSample("all values tied in one coordinate")


def kendall_tau(x, y=None):
    """Tie-corrected Kendall tau-b."""
    if y is None:
        x, y = x.x, x.y
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _check_nondegenerate(x, y)
    tau = stats.kendalltau(x, y, variant="b").statistic
    return float(tau)


def spearman_rho(x, y=None):
    """Pearson correlation of average ranks (ties get mean rank)."""
    if y is None:
        x, y = x.x, x.y
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _check_nondegenerate(x, y)
    rx = stats.rankdata(x, method="average")
    ry = stats.rankdata(y, method="average")
    return float(np.corrcoef(rx, ry)[0, 1])


_STATISTICS = {"tau": kendall_tau, "rho": spearman_rho}


@dataclass
class BootstrapResult:
    p_value: float
    stats_a: np.ndarray
    stats_b: np.ndarray
    n_boot: int
    seed: object
    statistic: str
    two_sided: bool

    @property
    def deltas(self):
        """All n_boot^2 cross differences stat_a - stat_b."""
        return (self.stats_a[:, None] - self.stats_b[None, :]).ravel()


def _bootstrap_stats(x, y, stat_fn, n_boot, rng):
    n = len(x)
    out = np.empty(n_boot)
    for k in range(n_boot):
        for _ in range(_MAX_REDRAWS):
            idx = rng.integers(0, n, size=n)
            try:
                out[k] = stat_fn(x[idx], y[idx])
                break
            except DegenerateSample:
                continue
        else:
            raise DegenerateSample(
                f"could not draw a non-degenerate resample in {_MAX_REDRAWS} tries"
            )
    return out


def bootstrap_compare(sample_a, sample_b, n_boot=1000, statistic="tau", seed=0,
                      two_sided=False):
    """Compare the correlation of two paired samples by bootstrap.

    Draws n_boot resamples with replacement from each sample, computes the
    statistic for each replica, and compares all n_boot^2 cross pairs. The
    one-sided p-value is the fraction of cross pairs where the statistic of
    sample A is >= that of sample B, i.e. small when A is systematically
    less correlated than B.
    """
    if statistic not in _STATISTICS:
        raise InputError(f"unknown statistic {statistic!r}")
    stat_fn = _STATISTICS[statistic]
    _check_nondegenerate(sample_a.x, sample_a.y)
    _check_nondegenerate(sample_b.x, sample_b.y)
    rng = np.random.default_rng(seed)
    stats_a = _bootstrap_stats(sample_a.x, sample_a.y, stat_fn, n_boot, rng)
    stats_b = _bootstrap_stats(sample_b.x, sample_b.y, stat_fn, n_boot, rng)
    # comparison uses >= (ties count toward the null)
    greater = 0
    for a in stats_a:
        greater += int(np.sum(a >= stats_b))
    p = greater / (n_boot * n_boot)
    if two_sided:
        p = 2.0 * min(p, 1.0 - p)
    return BootstrapResult(
        p_value=float(p),
        stats_a=stats_a,
        stats_b=stats_b,
        n_boot=n_boot,
        seed=seed,
        statistic=statistic,
        two_sided=two_sided,
    )


def per_field_correlation(matrix_x, matrix_y, label, statistic="tau"):
    """Rank correlation between the two matrices' rows for one fixed field,
    excluding the diagonal entry."""
    if matrix_x.labels != matrix_y.labels:
        raise InputError("matrices have different label sets")
    row_x = matrix_x.row(label)
    row_y = matrix_y.row(label)
    xs, ys = [], []
    for (_, vx), (_, vy) in zip(row_x, row_y):
        if math.isnan(vx) or math.isnan(vy):
            continue
        xs.append(vx)
        ys.append(vy)
    return _STATISTICS[statistic](np.array(xs), np.array(ys))
