"""Field-level citation counts and the symmetrized Jaccard-like dissimilarity.

For fields i != j the measure averages two directed terms: the fraction of
edges that are out-links of i or in-links of j but not both, and the same
with the roles swapped. Citations touching neither field cancel out of both
terms. Row/column marginals are precomputed so each pair costs O(1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCitationTerm, InputError
from .matrix import DissimilarityMatrix


@dataclass
class CitationGraph:
    labels: list
    c: np.ndarray  # c[i, j] = citations from field i to field j

    def __post_init__(self):
        self.c = np.asarray(self.c)
        n = len(self.labels)
        if self.c.shape != (n, n):
            raise InputError(f"count matrix shape {self.c.shape} != ({n}, {n})")
        if np.any(self.c < 0):
            raise InputError("citation counts must be non-negative")

    def index(self, label):
        try:
            return self.labels.index(label)
        except ValueError:
            raise InputError(f"unknown field label {label!r}") from None


def aggregate(edges, field_of, labels=None):
    """Build a CitationGraph from article-level edges and an article -> field map.

    Edges with an unmapped endpoint are skipped and counted; the count is
    returned alongside the graph.
    """
    if labels is None:
        labels = sorted(set(field_of.values()))
    index = {label: k for k, label in enumerate(labels)}
    n = len(labels)
    c = np.zeros((n, n), dtype=np.int64)
    skipped = 0
    for edge in edges:
        fi = field_of.get(edge.citing_id)
        fj = field_of.get(edge.cited_id)
        if fi is None or fj is None:
            skipped += 1
            continue
        c[index[fi], index[fj]] += 1
    return CitationGraph(labels=list(labels), c=c), skipped


def _directed_term(c, row_sums, col_sums, a, b, labels):
    """Directed Jaccard-style term a -> b: out-links of a xor in-links of b
    over out-links of a or in-links of b."""
    c_ab = c[a, b]
    out_not_b = row_sums[a] - c_ab   # citations from a not going to b
    in_not_a = col_sums[b] - c_ab    # citations into b not coming from a
    denom = c_ab + out_not_b + in_not_a
    if denom == 0:
        raise DegenerateCitationTerm(labels[a], labels[b], f"{labels[a]}->{labels[b]}")
    return (out_not_b + in_not_a) / denom


def d_cite(graph, i, j):
    """Symmetrized citation dissimilarity between two field labels.

    Defined as 0 for i == j; raises DegenerateCitationTerm when a directed
    term has no relevant citations at all.
    """
    a, b = graph.index(i), graph.index(j)
    if a == b:
        return 0.0
    c = graph.c
    row_sums = c.sum(axis=1)
    col_sums = c.sum(axis=0)
    t1 = _directed_term(c, row_sums, col_sums, a, b, graph.labels)
    t2 = _directed_term(c, row_sums, col_sums, b, a, graph.labels)
    return 0.5 * (t1 + t2)


def d_cite_matrix(graph, meta=None):
    n = len(graph.labels)
    c = graph.c
    row_sums = c.sum(axis=1)
    col_sums = c.sum(axis=0)
    values = np.zeros((n, n))
    errors = {}
    for a in range(n):
        for b in range(a + 1, n):
            try:
                t1 = _directed_term(c, row_sums, col_sums, a, b, graph.labels)
                t2 = _directed_term(c, row_sums, col_sums, b, a, graph.labels)
                d = 0.5 * (t1 + t2)
            except DegenerateCitationTerm as exc:
                errors[(graph.labels[a], graph.labels[b])] = str(exc)
                d = float("nan")
            values[a, b] = values[b, a] = d
    full_meta = {"measure": "d_cite"}
    full_meta.update(meta or {})
    return DissimilarityMatrix(
        labels=list(graph.labels), values=values, meta=full_meta, cell_errors=errors
    )


def save_graph(graph, path):
    """Persist as `field_i<TAB>field_j<TAB>count` triples (zero cells omitted)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("#labels\t" + "\t".join(graph.labels) + "\n")
        for a, la in enumerate(graph.labels):
            for b, lb in enumerate(graph.labels):
                if graph.c[a, b]:
                    fh.write(f"{la}\t{lb}\t{int(graph.c[a, b])}\n")


def load_graph(path):
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read citation graph {path}: {exc}") from exc
    labels = None
    triples = []
    with fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#labels\t"):
                labels = line.split("\t")[1:]
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise InputError(f"bad graph row {line!r} in {path}")
            triples.append((parts[0], parts[1], int(parts[2])))
    if labels is None:
        labels = sorted({t[0] for t in triples} | {t[1] for t in triples})
    index = {label: k for k, label in enumerate(labels)}
    c = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for la, lb, count in triples:
        c[index[la], index[lb]] = count
    return CitationGraph(labels=labels, c=c)
