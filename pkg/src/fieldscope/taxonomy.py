"""Three-level field taxonomy (domain > discipline > specialty) and tree distance.

The dissimilarity between two nodes at the same level is the number of links
needed to reach a common ancestor: 0 for identical nodes, up to 3 for
specialties in different domains (the implicit super-root counts as the
ancestor of all domains).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .matrix import DissimilarityMatrix

LEVELS = ("domain", "discipline", "specialty")
_DEPTH = {"domain": 1, "discipline": 2, "specialty": 3}


@dataclass(frozen=True)
class TaxonomyNode:
    id: str
    name: str
    level: str
    parent: str | None


class TaxonomyTree:
    """Immutable strict 3-level hierarchy, safe for concurrent reads."""

    def __init__(self, nodes):
        self.nodes: dict[str, TaxonomyNode] = {}
        for node in nodes:
            if node.id in self.nodes:
                raise InputError(f"duplicate taxonomy node id {node.id!r}")
            if node.level not in _DEPTH:
                raise InputError(f"unknown taxonomy level {node.level!r}")
            self.nodes[node.id] = node
        self._validate()

    def _validate(self):
        for node in self.nodes.values():
            if node.level == "domain":
                if node.parent is not None:
                    raise InputError(f"domain {node.id!r} must not have a parent")
                continue
            parent = self.nodes.get(node.parent)
            if parent is None:
                raise InputError(f"node {node.id!r} has unknown parent {node.parent!r}")
            if _DEPTH[parent.level] != _DEPTH[node.level] - 1:
                raise InputError(
                    f"node {node.id!r} ({node.level}) has parent at level {parent.level}"
                )

    @classmethod
    def from_file(cls, path):
        """Load from delimited rows: node_id, name, level, parent_id ('' for domains)."""
        nodes = []
        try:
            fh = open(path, encoding="utf-8", newline="")
        except OSError as exc:
            raise InputError(f"cannot read taxonomy file {path}: {exc}") from exc
        with fh:
            for row in csv.reader(fh):
                if not row or row[0].startswith("#"):
                    continue
                if len(row) != 4:
                    raise InputError(f"taxonomy row needs 4 fields, got {row!r}")
                node_id, name, level, parent = (f.strip() for f in row)
                nodes.append(TaxonomyNode(node_id, name, level, parent or None))
        return cls(nodes)

    def __contains__(self, node_id):
        return node_id in self.nodes

    def level_of(self, node_id):
        return self._node(node_id).level

    def ids_at_level(self, level):
        if level not in _DEPTH:
            raise InputError(f"unknown taxonomy level {level!r}")
        return sorted(n.id for n in self.nodes.values() if n.level == level)

    def is_leaf(self, node_id):
        return node_id in self.nodes and self.nodes[node_id].level == "specialty"

    def ancestor_at(self, node_id, level):
        """Ancestor of node_id at the given (equal or higher) level."""
        node = self._node(node_id)
        target = _DEPTH[level]
        if target > _DEPTH[node.level]:
            raise InputError(
                f"{node_id!r} is a {node.level}; it has no {level} descendant-ancestor"
            )
        while _DEPTH[node.level] > target:
            node = self.nodes[node.parent]
        return node.id

    def _node(self, node_id):
        try:
            return self.nodes[node_id]
        except KeyError:
            raise InputError(f"unknown taxonomy node {node_id!r}") from None

    def d_exp(self, i, j):
        """Links from i (== from j) up to the lowest common ancestor.

        Both nodes must sit at the same level. At the specialty level the
        result is 0 (identical), 1 (same discipline), 2 (same domain), or
        3 (different domains).
        """
        ni, nj = self._node(i), self._node(j)
        if ni.level != nj.level:
            raise InputError(f"level mismatch: {i!r} is {ni.level}, {j!r} is {nj.level}")
        steps = 0
        while ni.id != nj.id:
            steps += 1
            if ni.parent is None:
                # different domains meet at the implicit super-root
                return steps
            ni, nj = self.nodes[ni.parent], self.nodes[nj.parent]
        return steps

    def d_exp_matrix(self, level="specialty"):
        labels = self.ids_at_level(level)
        n = len(labels)
        values = np.zeros((n, n))
        for a in range(n):
            for b in range(a + 1, n):
                d = self.d_exp(labels[a], labels[b])
                values[a, b] = values[b, a] = d
        return DissimilarityMatrix(
            labels=labels,
            values=values,
            meta={"measure": "d_exp", "level": level},
        )
