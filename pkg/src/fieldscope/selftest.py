"""Built-in analytic oracle suite (`fieldscope selftest`).

Each check recomputes a result with a deliberately naive reference
implementation (explicit sums, exhaustive searches) and compares it to the
optimized library path. Returns process-style 0/1.
"""

from __future__ import annotations

import numpy as np

from .citation import CitationGraph, d_cite
from .clustering import cut_at_percentile, upgma
from .corpusmodel import ProbabilityVector
from .errors import DegenerateCitationTerm
from .language import d_alpha, d_lang, d_max
from .matrix import DissimilarityMatrix
from .rankstats import kendall_tau, spearman_rho
from .taxonomy import TaxonomyNode, TaxonomyTree

TOL = 1e-12


def _random_vector(rng, size, prefix="w"):
    support = [f"{prefix}{i}" for i in rng.choice(50, size=size, replace=False)]
    probs = rng.random(size) + 1e-3
    probs /= probs.sum()
    return ProbabilityVector(support=support, probs=probs)


def _naive_jsd(p, q, alpha=2.0):
    pd, qd = p.as_dict(), q.as_dict()
    union = sorted(set(pd) | set(qd))

    def h(dist):
        return (sum(dist.get(w, 0.0) ** alpha for w in union) - 1.0) / (1.0 - alpha)

    mix = {w: (pd.get(w, 0.0) + qd.get(w, 0.0)) / 2.0 for w in union}
    return h(mix) - 0.5 * h(pd) - 0.5 * h(qd)


def check_language(rng, n_pairs=200):
    for _ in range(n_pairs):
        p = _random_vector(rng, int(rng.integers(2, 30)))
        q = _random_vector(rng, int(rng.integers(2, 30)))
        direct = _naive_jsd(p, q)
        if abs(d_alpha(p, q, 2.0) - direct) > TOL:
            return False
        hp = 1.0 - sum(v * v for v in p.probs)
        hq = 1.0 - sum(v * v for v in q.probs)
        dmax = (2.0 - hp - hq) / 4.0
        if abs(d_max(p, q, 2.0) - dmax) > TOL:
            return False
        if abs(d_lang(p, q) - direct / dmax) > TOL:
            return False
        if d_lang(p, p) != 0.0:
            return False
    a = ProbabilityVector(["a", "b"], np.array([0.4, 0.6]))
    b = ProbabilityVector(["c", "d"], np.array([0.7, 0.3]))
    return d_lang(a, b) == 1.0


def _naive_d_cite(c, i, j):
    n = c.shape[0]
    out = []
    for a, b in ((i, j), (j, i)):
        cab = c[a, b]
        c_a_notb = sum(c[a, t] for t in range(n) if t != b)
        c_nota_b = sum(c[t, b] for t in range(n) if t != a)
        denom = cab + c_a_notb + c_nota_b
        if denom == 0:
            raise ZeroDivisionError
        out.append((c_a_notb + c_nota_b) / denom)
    return 0.5 * (out[0] + out[1])


def check_citation(rng, n_graphs=100):
    for _ in range(n_graphs):
        n = int(rng.integers(2, 8))
        c = rng.integers(0, 5, size=(n, n))
        graph = CitationGraph(labels=[f"f{k}" for k in range(n)], c=c)
        for i in range(n):
            for j in range(i + 1, n):
                try:
                    expected = _naive_d_cite(c, i, j)
                except ZeroDivisionError:
                    continue
                got = d_cite(graph, f"f{i}", f"f{j}")
                sym = d_cite(graph, f"f{j}", f"f{i}")
                if abs(got - expected) > TOL or got != sym:
                    return False
    return True


def _fixture_tree():
    nodes = [TaxonomyNode(f"d{k}", f"domain {k}", "domain", None) for k in range(2)]
    for k in range(2):
        for m in range(2):
            did = f"d{k}.{m}"
            nodes.append(TaxonomyNode(did, did, "discipline", f"d{k}"))
            for s in range(2):
                nodes.append(TaxonomyNode(f"{did}.{s}", f"{did}.{s}", "specialty", did))
    return TaxonomyTree(nodes)


def check_taxonomy():
    tree = _fixture_tree()
    specialties = tree.ids_at_level("specialty")

    def chain(node_id):
        out = [node_id]
        while tree.nodes[out[-1]].parent is not None:
            out.append(tree.nodes[out[-1]].parent)
        return out

    for i in specialties:
        for j in specialties:
            ci, cj = chain(i), chain(j)
            expected = 3
            for depth, anc in enumerate(ci):
                if anc in cj:
                    expected = depth
                    break
            if tree.d_exp(i, j) != expected or expected not in (0, 1, 2, 3):
                return False
    return True


def _naive_upgma_merges(values):
    clusters = {i: [i] for i in range(values.shape[0])}
    next_id = values.shape[0]
    merges = []
    while len(clusters) > 1:
        best = None
        for a in sorted(clusters):
            for b in sorted(clusters):
                if a >= b:
                    continue
                d = float(np.mean([[values[x, y] for y in clusters[b]]
                                   for x in clusters[a]]))
                if best is None or d < best[0] or (d == best[0] and (a, b) < best[1]):
                    best = (d, (a, b))
        d, (a, b) = best
        clusters[next_id] = clusters.pop(a) + clusters.pop(b)
        merges.append((a, b, d))
        next_id += 1
    return merges


def check_upgma(rng, n_trials=50):
    for _ in range(n_trials):
        n = int(rng.integers(2, 7))
        raw = rng.random((n, n))
        values = (raw + raw.T) / 2
        np.fill_diagonal(values, 0.0)
        matrix = DissimilarityMatrix(labels=[f"f{k}" for k in range(n)], values=values)
        dend = upgma(matrix)
        expected = _naive_upgma_merges(values)
        got = [(m.a, m.b, m.height) for m in dend.merges]
        for (ga, gb, gh), (ea, eb, eh) in zip(got, expected):
            if (ga, gb) != (ea, eb) or abs(gh - eh) > TOL:
                return False
    matrix = DissimilarityMatrix(
        labels=["a", "b", "c"],
        values=np.array([[0, 0.1, 0.5], [0.1, 0, 0.5], [0.5, 0.5, 0]]),
    )
    return cut_at_percentile(upgma(matrix), 0.92) == [["a", "b"], ["c"]]


def _naive_tau_b(x, y):
    n = len(x)
    concordant = discordant = ties_x = ties_y = 0
    for i in range(n):
        for j in range(i + 1, n):
            dx, dy = x[i] - x[j], y[i] - y[j]
            if dx == 0 and dy == 0:
                continue
            if dx == 0:
                ties_x += 1
            elif dy == 0:
                ties_y += 1
            elif dx * dy > 0:
                concordant += 1
            else:
                discordant += 1
    denom = np.sqrt((concordant + discordant + ties_x)
                    * (concordant + discordant + ties_y))
    return (concordant - discordant) / denom


def check_rankstats(rng, n_samples=50):
    for _ in range(n_samples):
        n = int(rng.integers(5, 40))
        x = rng.integers(0, 5, size=n).astype(float)
        y = x + rng.integers(-2, 3, size=n)
        if np.all(x == x[0]) or np.all(y == y[0]):
            continue
        if abs(kendall_tau(x, y) - _naive_tau_b(x, y)) > TOL:
            return False
        ranks_x = np.array([
            1 + np.sum(x < v) + (np.sum(x == v) - 1) / 2.0 for v in x
        ])
        ranks_y = np.array([
            1 + np.sum(y < v) + (np.sum(y == v) - 1) / 2.0 for v in y
        ])
        expected_rho = np.corrcoef(ranks_x, ranks_y)[0, 1]
        if abs(spearman_rho(x, y) - expected_rho) > TOL:
            return False
    return True


def check_telescoping(rng, n_series=50):
    from .temporal import PairTimeSeries, nu

    for _ in range(n_series):
        years = list(range(1990, 2015))
        values = list(rng.random(len(years)))
        series = PairTimeSeries(pair=("a", "b"), years=years, values=values)
        stat = nu(series, 1991, 2014)
        explicit = sum(values[t] - values[t - 1] for t in range(1, len(values)))
        explicit /= 2014 - 1991
        if abs(stat.nu - explicit) > TOL:
            return False
    return True


CHECKS = [
    ("language-divergence-identities", lambda rng: check_language(rng)),
    ("citation-dissimilarity-oracle", lambda rng: check_citation(rng)),
    ("tree-distance-exhaustive", lambda rng: check_taxonomy()),
    ("upgma-reference-equivalence", lambda rng: check_upgma(rng)),
    ("rank-correlation-oracles", lambda rng: check_rankstats(rng)),
    ("yearly-variation-telescoping", lambda rng: check_telescoping(rng)),
]


def run(seed=0, out=print):
    rng = np.random.default_rng(seed)
    failed = 0
    for name, check in CHECKS:
        ok = check(rng)
        out(f"{'PASS' if ok else 'FAIL'} {name}")
        if not ok:
            failed += 1
    return 0 if failed == 0 else 1
