"""Agglomerative clustering with group-average (UPGMA) linkage.

Leaves are numbered 0..N-1 in input label order; each merge creates cluster
id N, N+1, ... Ties on the minimum inter-cluster distance are broken by the
lexicographically smallest (id_a, id_b) with id_a < id_b, which makes small
fixtures deterministic.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class Merge:
    a: int
    b: int
    height: float
    new_id: int
    size: int


@dataclass
class Dendrogram:
    leaves: list          # labels in leaf-id order
    merges: list          # Merge records in merge order
    monotonic: bool = True  # False if a merge height ever decreased

    def __post_init__(self):
        n = len(self.leaves)
        if len(self.merges) != max(n - 1, 0):
            raise InputError(f"{n} leaves require {n - 1} merges")
        used = set()
        for k, m in enumerate(self.merges):
            if m.new_id != n + k:
                raise InputError("merge ids must be consecutive from N")
            for cid in (m.a, m.b):
                if cid in used or cid >= m.new_id:
                    raise InputError(f"cluster id {cid} reused or out of order")
                used.add(cid)

    @property
    def heights(self):
        return [m.height for m in self.merges]


def upgma(matrix):
    """Group-average agglomerative clustering of a DissimilarityMatrix."""
    if not matrix.is_symmetric():
        raise InputError("matrix must be symmetric")
    if np.any(np.diag(matrix.values) != 0):
        raise InputError("matrix must have a zero diagonal")
    bad = sorted(matrix.cell_errors) if matrix.cell_errors else []
    nan_cells = np.argwhere(np.isnan(np.triu(matrix.values, k=1)))
    if len(nan_cells):
        bad = bad or [
            (matrix.labels[i], matrix.labels[j]) for i, j in nan_cells
        ]
    if bad:
        raise InputError(f"matrix has error cells for pairs: {bad}")

    n = matrix.n
    dist = {}
    for a in range(n):
        for b in range(a + 1, n):
            dist[(a, b)] = float(matrix.values[a, b])
    size = {i: 1 for i in range(n)}
    active = sorted(size)
    merges = []
    monotonic = True
    last_height = -math.inf
    next_id = n
    while len(active) > 1:
        best = None
        for ia, a in enumerate(active):
            for b in active[ia + 1:]:
                d = dist[(a, b)]
                if best is None or d < best[0] or (d == best[0] and (a, b) < best[1]):
                    best = (d, (a, b))
        height, (a, b) = best
        if height < last_height:
            monotonic = False
        last_height = height
        new = next_id
        next_id += 1
        # size-weighted average of the merged clusters' distances
        for k in active:
            if k in (a, b):
                continue
            dak = dist[(min(a, k), max(a, k))]
            dbk = dist[(min(b, k), max(b, k))]
            dist[(k, new)] = (size[a] * dak + size[b] * dbk) / (size[a] + size[b])
        size[new] = size[a] + size[b]
        merges.append(Merge(a=a, b=b, height=height, new_id=new, size=size[new]))
        active = [k for k in active if k not in (a, b)] + [new]
        active.sort()
    return Dendrogram(leaves=list(matrix.labels), merges=merges,
                      monotonic=monotonic)


def cut_at_percentile(dendrogram, percentile=0.92):
    """Partition of the leaf labels at a percentile of the merge heights.

    The threshold is the nearest-rank (rounded) order statistic of the N-1
    merge heights; merges strictly below the threshold are applied.
    percentile may be 1.0, meaning a threshold above all heights (one
    cluster).
    """
    if not (0 < percentile <= 1):
        raise InputError(f"percentile must be in (0, 1], got {percentile}")
    n = len(dendrogram.leaves)
    if n == 1:
        return [list(dendrogram.leaves)]
    heights = sorted(dendrogram.heights)
    m = len(heights)
    if percentile == 1.0:
        threshold = math.inf
    else:
        rank = round(percentile * m)
        if rank < 1:
            threshold = -math.inf
        else:
            threshold = heights[rank - 1]
    members = {i: [dendrogram.leaves[i]] for i in range(n)}
    for merge in dendrogram.merges:
        if merge.height < threshold:
            members[merge.new_id] = members.pop(merge.a) + members.pop(merge.b)
        else:
            members[merge.new_id] = None  # merge not applied; keep children
    clusters = [sorted(v) for v in members.values() if v]
    return sorted(clusters)


# --- export / parse --------------------------------------------------------


def to_nested_text(dendrogram):
    """Newick-style nested text with internal node labels n<id> so the parse
    round-trips losslessly."""
    n = len(dendrogram.leaves)
    height = {i: 0.0 for i in range(n)}
    node = {i: _quote(dendrogram.leaves[i]) for i in range(n)}
    for m in dendrogram.merges:
        height[m.new_id] = m.height
        la = m.height - height[m.a]
        lb = m.height - height[m.b]
        node[m.new_id] = (
            f"({node.pop(m.a)}:{la!r},{node.pop(m.b)}:{lb!r})n{m.new_id}"
        )
    if len(node) != 1:
        raise InputError("dendrogram does not reduce to a single root")
    return next(iter(node.values())) + ";"


_LABEL_RE = re.compile(r"[A-Za-z0-9_\-.]+")


def _quote(label):
    if _LABEL_RE.fullmatch(label):
        return label
    return "'" + label.replace("'", "''") + "'"


class _Parser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def error(self, msg):
        raise InputError(f"nested-text parse error at {self.pos}: {msg}")

    def peek(self):
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def label(self):
        if self.peek() == "'":
            self.pos += 1
            out = []
            while True:
                ch = self.peek()
                if not ch:
                    self.error("unterminated quoted label")
                self.pos += 1
                if ch == "'":
                    if self.peek() == "'":
                        self.pos += 1
                        out.append("'")
                    else:
                        return "".join(out)
                else:
                    out.append(ch)
        m = _LABEL_RE.match(self.text, self.pos)
        if not m:
            self.error("expected a label")
        self.pos = m.end()
        return m.group(0)

    def number(self):
        m = re.compile(r"[-+0-9.eE]+").match(self.text, self.pos)
        if not m:
            self.error("expected a number")
        self.pos = m.end()
        return float(m.group(0))

    def node(self):
        """Returns (kind, payload): leaf label or (children, internal id)."""
        if self.peek() == "(":
            self.take("(")
            left = self.branch()
            self.take(",")
            right = self.branch()
            self.take(")")
            name = self.label()
            if not name.startswith("n"):
                self.error(f"internal label {name!r} must look like n<id>")
            return ("internal", (left, right, int(name[1:])))
        return ("leaf", self.label())

    def branch(self):
        child = self.node()
        self.take(":")
        length = self.number()
        return (child, length)


def parse_nested_text(text):
    """Inverse of to_nested_text.

    Leaf ids are assigned in sorted label order (the order every matrix
    builder in this package uses). Merge heights are reconstructed from the
    cumulative branch lengths and are exact up to one FP rounding; the
    merge-table format is the bit-exact persistence route.
    """
    text = text.strip()
    if not text.endswith(";"):
        raise InputError("nested text must end with ';'")
    parser = _Parser(text[:-1])
    root = parser.node()
    if parser.pos != len(parser.text):
        parser.error("trailing characters")

    leaves = {}
    merges = {}

    def walk(node):
        """Returns (cluster_id, height, size)."""
        kind, payload = node
        if kind == "leaf":
            return (payload, 0.0, 1)  # id resolved after leaf numbering
        (lchild, llen), (rchild, rlen), new_id = payload
        la, ha, sa = walk(lchild)
        lb, hb, sb = walk(rchild)
        height = ha + llen
        height_b = hb + rlen
        if not math.isclose(height, height_b, rel_tol=0, abs_tol=1e-9):
            raise InputError("inconsistent heights in nested text")
        merges[new_id] = (la, lb, height, sa + sb)
        return (new_id, height, sa + sb)

    def collect_leaves(node):
        kind, payload = node
        if kind == "leaf":
            leaves[payload] = None
        else:
            (lchild, _), (rchild, _), _ = payload
            collect_leaves(lchild)
            collect_leaves(rchild)

    collect_leaves(root)
    labels = sorted(leaves)
    leaf_id = {label: i for i, label in enumerate(labels)}
    walk(root)

    def resolve(ref):
        return ref if isinstance(ref, int) else leaf_id[ref]

    merge_list = []
    for new_id in sorted(merges):
        a, b, height, size = merges[new_id]
        ia, ib = resolve(a), resolve(b)
        if ia > ib:
            ia, ib = ib, ia
        merge_list.append(Merge(a=ia, b=ib, height=height, new_id=new_id, size=size))
    heights = [m.height for m in merge_list]
    monotonic = all(h2 >= h1 for h1, h2 in zip(heights, heights[1:]))
    return Dendrogram(leaves=labels, merges=merge_list, monotonic=monotonic)


def to_merge_table(dendrogram):
    """Delimited rows: a_id, b_id, height, size (one per merge)."""
    lines = ["#leaves\t" + "\t".join(dendrogram.leaves)]
    for m in dendrogram.merges:
        lines.append(f"{m.a}\t{m.b}\t{m.height!r}\t{m.size}")
    return "\n".join(lines) + "\n"


def parse_merge_table(text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("#leaves\t"):
        raise InputError("merge table must start with a #leaves header")
    leaves = lines[0].split("\t")[1:]
    merges = []
    n = len(leaves)
    for k, line in enumerate(lines[1:]):
        a, b, height, size = line.split("\t")
        merges.append(Merge(a=int(a), b=int(b), height=float(height),
                            new_id=n + k, size=int(size)))
    heights = [m.height for m in merges]
    monotonic = all(h2 >= h1 for h1, h2 in zip(heights, heights[1:]))
    return Dendrogram(leaves=leaves, merges=merges, monotonic=monotonic)
