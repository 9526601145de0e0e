"""Shared synthetic-data builders for the test suite."""

from __future__ import annotations

import json

import numpy as np

from fieldscope.corpusmodel import ProbabilityVector
from fieldscope.taxonomy import TaxonomyNode, TaxonomyTree


def make_tree(n_domains=2, n_disciplines=2, n_specialties=2):
    """Balanced fixture tree with ids d<k>, d<k>.<m>, d<k>.<m>.<s>."""
    nodes = []
    for k in range(n_domains):
        nodes.append(TaxonomyNode(f"d{k}", f"domain {k}", "domain", None))
        for m in range(n_disciplines):
            did = f"d{k}.{m}"
            nodes.append(TaxonomyNode(did, f"discipline {k}.{m}", "discipline", f"d{k}"))
            for s in range(n_specialties):
                sid = f"{did}.{s}"
                nodes.append(TaxonomyNode(sid, f"specialty {sid}", "specialty", did))
    return TaxonomyTree(nodes)


def named_tree():
    """Small tree with real OECD-style names used in the hand-computed fixtures."""
    nodes = [
        TaxonomyNode("nat", "Natural Sciences", "domain", None),
        TaxonomyNode("hum", "Humanities", "domain", None),
        TaxonomyNode("math", "Mathematics", "discipline", "nat"),
        TaxonomyNode("phys", "Physical Sciences", "discipline", "nat"),
        TaxonomyNode("lang", "Languages and Literature", "discipline", "hum"),
        TaxonomyNode("appl-math", "Applied Mathematics", "specialty", "math"),
        TaxonomyNode("stats", "Statistics & Probability", "specialty", "math"),
        TaxonomyNode("cond-mat", "Condensed Matter Physics", "specialty", "phys"),
        TaxonomyNode("ling", "Linguistics", "specialty", "lang"),
    ]
    return TaxonomyTree(nodes)


def random_vector(rng, size, vocab=200, prefix="w"):
    support = [f"{prefix}{i}" for i in rng.choice(vocab, size=size, replace=False)]
    probs = rng.random(size) + 1e-3
    probs /= probs.sum()
    return ProbabilityVector(support=support, probs=probs)


def write_taxonomy_csv(tree, path):
    with open(path, "w", encoding="utf-8") as fh:
        for node in tree.nodes.values():
            fh.write(f"{node.id},{node.name},{node.level},{node.parent or ''}\n")


def write_articles_jsonl(records, path):
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


# --- planted-hierarchy topic model ----------------------------------------


def planted_vocab(rng, n_global=100, n_domain=60, n_discipline=40, n_field=40,
                  n_domains=3, n_disciplines=2, n_fields=2):
    """Word pools for a 3-level topic model; returns {field_id: (pools, weights)}.

    Vocabulary overlap decreases with tree distance: sibling fields share
    the global + domain + discipline pools, same-domain fields share global
    + domain, and cross-domain fields share only the global pool.
    """
    def pool(tag, n):
        return np.array([f"{tag}{i}x" for i in range(n)])

    global_pool = pool("g", n_global)
    fields = {}
    for d in range(n_domains):
        domain_pool = pool(f"d{d}q", n_domain)
        for c in range(n_disciplines):
            disc_pool = pool(f"d{d}c{c}q", n_discipline)
            for f in range(n_fields):
                field_pool = pool(f"d{d}c{c}f{f}q", n_field)
                field_id = f"d{d}.{c}.{f}"
                fields[field_id] = (
                    [global_pool, domain_pool, disc_pool, field_pool],
                    [0.3, 0.3, 0.2, 0.2],
                )
    return fields


def planted_documents(rng, fields, docs_per_field=30, tokens_per_doc=60):
    """Raw text documents per field id, drawn from the planted topic model."""
    docs = {}
    for field_id, (pools, weights) in fields.items():
        field_docs = []
        for _ in range(docs_per_field):
            counts = rng.multinomial(tokens_per_doc, weights)
            words = []
            for pool, k in zip(pools, counts):
                words.extend(rng.choice(pool, size=k))
            rng.shuffle(words)
            field_docs.append(" ".join(words))
        docs[field_id] = field_docs
    return docs
