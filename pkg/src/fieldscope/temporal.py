"""Time-resolved language dissimilarity between field pairs.

Builds one sparse yearly series per unordered pair, smooths with a centered
moving average, summarizes each pair by its mean yearly variation (endpoint
difference over the span), and tests whether the population of variations
is centered at zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import (
    DegenerateDistribution,
    DegenerateSample,
    InputError,
    MissingEndpoint,
    ShortHistory,
)
from .language import d_lang

DEFAULT_MIN_HISTORY = 12


@dataclass
class PairTimeSeries:
    pair: tuple
    years: list
    values: list

    def __post_init__(self):
        if list(self.years) != sorted(set(self.years)):
            raise InputError("years must be strictly increasing")
        if len(self.years) != len(self.values):
            raise InputError("years and values lengths differ")

    def value_at(self, year):
        try:
            return self.values[self.years.index(year)]
        except ValueError:
            return None


@dataclass
class NuStatistic:
    pair: tuple
    nu: float
    t0: int
    tf: int
    t_start: int       # year actually used as the baseline (t0-1 when present)
    span_years: int    # tf - t0


def yearly_series(models_by_year):
    """Per-pair series from a {year: {field: ProbabilityVector}} mapping.

    Fields absent in a year (e.g. below the vocabulary cutoff) simply
    contribute no point that year; pairs with at least one valid year get a
    series.
    """
    series = {}
    for year in sorted(models_by_year):
        vectors = models_by_year[year]
        labels = sorted(vectors)
        for a in range(len(labels)):
            for b in range(a + 1, len(labels)):
                pair = (labels[a], labels[b])
                try:
                    d = d_lang(vectors[labels[a]], vectors[labels[b]])
                except DegenerateDistribution:
                    continue
                entry = series.setdefault(pair, ([], []))
                entry[0].append(year)
                entry[1].append(d)
    return {
        pair: PairTimeSeries(pair=pair, years=years, values=values)
        for pair, (years, values) in sorted(series.items())
    }


def moving_average(series, window=3):
    """Centered moving average; edge years use truncated windows."""
    if window < 1 or window % 2 == 0:
        raise InputError(f"window must be odd and >= 1, got {window}")
    if not series.years:
        return PairTimeSeries(pair=series.pair, years=[], values=[])
    half = window // 2
    years = series.years
    values = series.values
    out = []
    for i, year in enumerate(years):
        in_window = [
            v for y, v in zip(years, values) if year - half <= y <= year + half
        ]
        out.append(float(np.mean(in_window)))
    return PairTimeSeries(pair=series.pair, years=list(years), values=out)


def nu(series, t0, tf, min_history=DEFAULT_MIN_HISTORY):
    """Mean yearly variation over [t0, tf].

    The baseline year is t0-1 when present; when absent (the usual case for
    a series that starts exactly at t0) the first available year is used and
    reported in t_start. The denominator stays tf - t0 either way.
    """
    if tf <= t0:
        raise InputError(f"tf {tf} must exceed t0 {t0}")
    span = tf - t0
    if span < min_history:
        raise ShortHistory(f"span {span} below minimum history {min_history}")
    end = series.value_at(tf)
    if end is None:
        raise MissingEndpoint(f"series {series.pair} has no point at {tf}")
    if series.value_at(t0 - 1) is not None:
        t_start = t0 - 1
    else:
        candidates = [y for y in series.years if y < tf]
        if not candidates:
            raise MissingEndpoint(f"series {series.pair} has no baseline year")
        t_start = candidates[0]
    start = series.value_at(t_start)
    return NuStatistic(
        pair=series.pair,
        nu=(end - start) / span,
        t0=t0,
        tf=tf,
        t_start=t_start,
        span_years=span,
    )


@dataclass
class NuDistribution:
    values: np.ndarray
    mean: float
    std: float
    t_test_p: float
    wilcoxon_p: float


def nu_distribution(nu_stats):
    """Two-sided one-sample tests of the mean (t) and median (Wilcoxon) of nu."""
    values = np.array([s.nu for s in nu_stats], dtype=float)
    if len(values) < 2:
        raise InputError("need at least 2 qualifying pairs")
    if np.all(values == values[0]):
        raise DegenerateSample("all nu values identical; Wilcoxon undefined")
    t_res = stats.ttest_1samp(values, 0.0)
    # exact signed-rank distribution for small n, normal approximation beyond
    method = "exact" if len(values) <= 25 else "approx"
    try:
        w_res = stats.wilcoxon(values, alternative="two-sided", method=method)
    except ValueError as exc:
        raise DegenerateSample(f"Wilcoxon undefined: {exc}") from exc
    return NuDistribution(
        values=values,
        mean=float(np.mean(values)),
        std=float(np.std(values, ddof=1)),
        t_test_p=float(t_res.pvalue),
        wilcoxon_p=float(w_res.pvalue),
    )


@dataclass
class TailReport:
    left: list          # NuStatistic with nu < mean - k*std, ascending nu
    right: list         # NuStatistic with nu > mean + k*std, descending nu
    left_field_counts: list   # (field, count) ranked descending
    right_field_counts: list


def _rank_fields(tail_stats):
    counts = {}
    for s in tail_stats:
        for label in s.pair:
            counts[label] = counts.get(label, 0) + 1
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))


def tails(nu_stats, k_sigma=1.0):
    """Pairs beyond k standard deviations of the mean, with per-field counts."""
    nu_stats = list(nu_stats)
    if len(nu_stats) < 2:
        raise InputError("need at least 2 values")
    values = np.array([s.nu for s in nu_stats])
    mean = float(np.mean(values))
    std = float(np.std(values, ddof=1))
    left = sorted(
        (s for s in nu_stats if s.nu < mean - k_sigma * std), key=lambda s: s.nu
    )
    right = sorted(
        (s for s in nu_stats if s.nu > mean + k_sigma * std), key=lambda s: -s.nu
    )
    return TailReport(
        left=left,
        right=right,
        left_field_counts=_rank_fields(left),
        right_field_counts=_rank_fields(right),
    )
