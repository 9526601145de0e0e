"""Generalized entropy, generalized Jensen-Shannon divergence, and the
normalized language dissimilarity.

The order-2 member has closed forms that avoid building the support union:
with S_p = sum p_w^2, S_q = sum q_w^2 and x = sum_w p_w q_w over the common
support,

    divergence  = (S_p + S_q)/4 - x/2
    upper bound = (S_p + S_q)/4        (disjoint supports)

so the normalized value is exactly 1.0 for disjoint supports and exactly
0.0 for identical inputs. Accumulation order is fixed (lexicographic
support) for cross-platform reproducibility.
"""

from __future__ import annotations

import numpy as np

from .corpusmodel import ProbabilityVector
from .errors import DegenerateDistribution, InputError, InvalidDistribution
from .matrix import DissimilarityMatrix

_SUM_TOL = 1e-9


def _validate(p):
    # sub-normalized vectors (raw-frequency mode after the top-V cutoff) are
    # accepted; mass above 1 is not
    probs = np.asarray(p.probs, dtype=float)
    if np.any(probs < 0) or np.any(~np.isfinite(probs)):
        raise InvalidDistribution("probabilities must be finite and non-negative")
    total = probs.sum()
    if total <= 0 or total > 1.0 + _SUM_TOL:
        raise InvalidDistribution(f"probability mass {total} outside (0, 1]")


def _sorted_probs(p):
    order = np.argsort(np.asarray(p.support))
    return np.asarray(p.probs, dtype=float)[order]


def h_alpha(p, alpha=2.0):
    """Generalized entropy of order alpha; alpha=1 is the Shannon limit (nats)."""
    if isinstance(p, ProbabilityVector):
        _validate(p)
        probs = _sorted_probs(p)
    else:
        probs = np.sort(np.asarray(p, dtype=float))[::-1]
        total = probs.sum()
        if np.any(probs < 0) or total <= 0 or total > 1.0 + _SUM_TOL:
            raise InvalidDistribution("invalid probability array")
    if alpha == 1.0:
        nz = probs[probs > 0]
        return float(-np.sum(nz * np.log(nz)))
    return float((np.sum(probs ** alpha) - 1.0) / (1.0 - alpha))


def _union_arrays(p, q):
    """Aligned probability arrays over the sorted union of supports."""
    pd, qd = p.as_dict(), q.as_dict()
    union = sorted(set(pd) | set(qd))
    pa = np.array([pd.get(w, 0.0) for w in union])
    qa = np.array([qd.get(w, 0.0) for w in union])
    return pa, qa


def _order2_sums(p, q):
    pd, qd = p.as_dict(), q.as_dict()
    sp = float(np.sum(_sorted_probs(p) ** 2))
    sq = float(np.sum(_sorted_probs(q) ** 2))
    common = sorted(set(pd) & set(qd))
    cross = float(np.sum(np.array([pd[w] for w in common])
                         * np.array([qd[w] for w in common]))) if common else 0.0
    return sp, sq, cross


def d_alpha(p, q, alpha=2.0):
    """Generalized Jensen-Shannon divergence between two distributions.

    Supports may differ; the mixture (p+q)/2 is taken over the union with
    absent entries at zero.
    """
    _validate(p)
    _validate(q)
    if alpha == 2.0:
        sp, sq, cross = _order2_sums(p, q)
        return (sp + sq) / 4.0 - cross / 2.0
    pa, qa = _union_arrays(p, q)
    mix = (pa + qa) / 2.0
    if alpha == 1.0:
        def h(arr):
            nz = arr[arr > 0]
            return float(-np.sum(nz * np.log(nz)))
    else:
        def h(arr):
            return float((np.sum(arr ** alpha) - 1.0) / (1.0 - alpha))
    return h(mix) - 0.5 * h(pa) - 0.5 * h(qa)


def d_max(p, q, alpha=2.0):
    """Largest possible divergence, attained when the supports are disjoint."""
    if alpha == 1.0:
        raise InputError(
            "alpha=1 normalization is outside the supported surface; "
            "use the unnormalized divergence"
        )
    _validate(p)
    _validate(q)
    if alpha == 2.0:
        sp, sq, _ = _order2_sums(p, q)
        return (sp + sq) / 4.0
    hp = h_alpha(p, alpha)
    hq = h_alpha(q, alpha)
    return (2.0 ** (1.0 - alpha) - 1.0) / 2.0 * (hp + hq + 2.0 / (1.0 - alpha))


def d_lang(p, q):
    """Normalized order-2 divergence in [0, 1]."""
    _validate(p)
    _validate(q)
    if (len(p.support) == 1 and len(q.support) == 1
            and p.support[0] == q.support[0]):
        raise DegenerateDistribution(
            "both distributions are degenerate on the same symbol"
        )
    sp, sq, cross = _order2_sums(p, q)
    denom = (sp + sq) / 4.0
    return ((sp + sq) / 4.0 - cross / 2.0) / denom


def d_lang_matrix(vectors, meta=None):
    """Full symmetric matrix over a label -> ProbabilityVector mapping."""
    labels = sorted(vectors)
    n = len(labels)
    values = np.zeros((n, n))
    errors = {}
    for a in range(n):
        for b in range(a + 1, n):
            try:
                d = d_lang(vectors[labels[a]], vectors[labels[b]])
            except DegenerateDistribution as exc:
                errors[(labels[a], labels[b])] = str(exc)
                d = float("nan")
            values[a, b] = values[b, a] = d
    full_meta = {"measure": "d_lang", "alpha": 2}
    full_meta.update(meta or {})
    return DissimilarityMatrix(
        labels=labels, values=values, meta=full_meta, cell_errors=errors
    )
