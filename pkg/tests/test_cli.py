import filecmp
import json
import os

import numpy as np
import pytest

from fieldscope import cli, clustering
from fieldscope.matrix import DissimilarityMatrix

from helpers import (
    make_tree,
    planted_documents,
    planted_vocab,
    write_articles_jsonl,
    write_taxonomy_csv,
)

YEARS = (2000, 2003)


def build_fixture(root):
    """Synthetic corpus: 12 planted specialties under 3 domains, ~200 docs."""
    rng = np.random.default_rng(42)
    tree = make_tree(3, 2, 2)
    tax_path = os.path.join(root, "taxonomy.csv")
    write_taxonomy_csv(tree, tax_path)

    fields = planted_vocab(rng)
    docs = planted_documents(rng, fields, docs_per_field=16, tokens_per_doc=60)
    records = []
    ids_by_domain = {}
    k = 0
    for field_id in sorted(docs):
        for i, text in enumerate(docs[field_id]):
            rid = f"a{k:04d}"
            k += 1
            records.append({
                "id": rid,
                "year": YEARS[0] + i % (YEARS[1] - YEARS[0] + 1),
                "title": "",
                "abstract": text,
                "specialty": field_id,
            })
            ids_by_domain.setdefault(field_id.split(".")[0], []).append(rid)
    articles_path = os.path.join(root, "articles.jsonl")
    write_articles_jsonl(records, articles_path)

    # citations: mostly within-domain, some cross-domain
    cite_path = os.path.join(root, "citations.tsv")
    with open(cite_path, "w", encoding="utf-8") as fh:
        fh.write("# citing\tcited\n")
        all_ids = [r["id"] for r in records]
        domain_of = {r["id"]: r["specialty"].split(".")[0] for r in records}
        for rid in all_ids:
            for _ in range(3):
                if rng.random() < 0.7:
                    pool = ids_by_domain[domain_of[rid]]
                else:
                    pool = all_ids
                cited = pool[int(rng.integers(len(pool)))]
                if cited != rid:
                    fh.write(f"{rid}\t{cited}\n")
    return tax_path, articles_path, cite_path


def run(args):
    return cli.main(["--seed", "0", "--jobs", "1"] + args)


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """Full CLI run over the synthetic fixture; returns the output paths."""
    root = str(tmp_path_factory.mktemp("cli"))
    tax, articles, citations = build_fixture(root)
    out = {
        "taxonomy": tax, "articles": articles, "citations": citations,
        "tokens": os.path.join(root, "tokens.jsonl"),
        "models": os.path.join(root, "models"),
        "models_by_year": os.path.join(root, "models_by_year"),
        "dlang": os.path.join(root, "dlang.csv"),
        "dexp": os.path.join(root, "dexp.csv"),
        "dcite": os.path.join(root, "dcite.csv"),
        "correlate": os.path.join(root, "corr.tsv"),
        "tree": os.path.join(root, "tree.txt"),
        "merges": os.path.join(root, "merges.tsv"),
        "partition": os.path.join(root, "partition.tsv"),
        "trends": os.path.join(root, "trends.tsv"),
    }
    years = f"{YEARS[0]}:{YEARS[1]}"
    assert run(["tokenize", "--articles", articles, "--taxonomy", tax,
                "--years", years, "--out", out["tokens"]]) == 0
    assert run(["model", "--tokens", out["tokens"], "--taxonomy", tax,
                "--level", "discipline", "--years", years,
                "--out", out["models"]]) == 0
    assert run(["model", "--tokens", out["tokens"], "--taxonomy", tax,
                "--level", "discipline", "--years", years, "--per-year",
                "--out", out["models_by_year"]]) == 0
    assert run(["dlang", "--models", out["models"], "--v", "50",
                "--out", out["dlang"]]) == 0
    assert run(["dexp", "--taxonomy", tax, "--level", "discipline",
                "--out", out["dexp"]]) == 0
    assert run(["dcite", "--citations", citations, "--articles", articles,
                "--taxonomy", tax, "--level", "discipline", "--years", years,
                "--out", out["dcite"]]) == 0
    assert run(["correlate", "--x", out["dlang"], "--y", out["dexp"],
                "--per-field", "--bootstrap-against", out["dcite"],
                "--nboot", "50", "--out", out["correlate"]]) == 0
    assert run(["cluster", "--matrix", out["dlang"],
                "--merge-table-out", out["merges"],
                "--partition-out", out["partition"],
                "--out", out["tree"]]) == 0
    assert run(["trends", "--models-by-year", out["models_by_year"],
                "--v", "30", "--min-history", "2",
                "--out", out["trends"]]) == 0
    return out


class TestPipelineOutputs:
    def test_tokens_are_normalized_jsonl(self, pipeline):
        with open(pipeline["tokens"], encoding="utf-8") as fh:
            lines = fh.read().splitlines()
        assert len(lines) == 192  # 12 fields x 16 docs
        doc = json.loads(lines[0])
        assert set(doc) == {"id", "year", "specialty", "tokens"}
        assert doc["tokens"] and all(t == t.lower() for t in doc["tokens"])

    def test_model_files_per_discipline(self, pipeline):
        names = sorted(n for n in os.listdir(pipeline["models"])
                       if n.endswith(".model.tsv"))
        assert names == [f"d{d}.{c}.model.tsv" for d in range(3) for c in range(2)]

    def test_per_year_layout(self, pipeline):
        years = sorted(d for d in os.listdir(pipeline["models_by_year"])
                       if d.isdigit())
        assert years == [str(y) for y in range(YEARS[0], YEARS[1] + 1)]

    def test_language_matrix_reflects_planted_hierarchy(self, pipeline):
        m = DissimilarityMatrix.from_csv(pipeline["dlang"])
        assert m.labels == [f"d{d}.{c}" for d in range(3) for c in range(2)]
        # same-domain disciplines share word pools, cross-domain ones do not
        assert m.get("d0.0", "d0.1") < m.get("d0.0", "d1.0")
        assert m.get("d1.0", "d1.1") < m.get("d1.0", "d2.1")

    def test_taxonomy_matrix_values(self, pipeline):
        m = DissimilarityMatrix.from_csv(pipeline["dexp"])
        assert m.get("d0.0", "d0.1") == 1.0
        assert m.get("d0.0", "d2.1") == 2.0

    def test_citation_matrix_reflects_planted_domains(self, pipeline):
        m = DissimilarityMatrix.from_csv(pipeline["dcite"])
        assert m.get("d0.0", "d0.1") < m.get("d0.0", "d1.1")

    def test_correlation_report(self, pipeline):
        lines = open(pipeline["correlate"], encoding="utf-8").read().splitlines()
        assert lines[0].startswith("measure_pair\t")
        tau = float(lines[1].split("\t")[1])
        assert tau > 0.3  # planted language distances track the taxonomy
        assert any(ln.startswith("#bootstrap\t") for ln in lines)
        per_field = [ln for ln in lines if ln.startswith("#per_field\t")]
        assert len(per_field) == 1 + 6  # header + one row per discipline

    def test_cluster_outputs_consistent(self, pipeline):
        nested = open(pipeline["tree"], encoding="utf-8").read()
        from_nested = clustering.parse_nested_text(nested)
        table = open(pipeline["merges"], encoding="utf-8").read()
        from_table = clustering.parse_merge_table(table)
        assert from_nested.leaves == from_table.leaves
        assert [(m.a, m.b) for m in from_nested.merges] == \
            [(m.a, m.b) for m in from_table.merges]
        rows = open(pipeline["partition"], encoding="utf-8").read().splitlines()
        assert rows[0] == "cluster\tfield"
        assert sorted(r.split("\t")[1] for r in rows[1:]) == from_table.leaves

    def test_trends_table_and_summary(self, pipeline):
        lines = open(pipeline["trends"], encoding="utf-8").read().splitlines()
        assert lines[0].startswith("field_i\tfield_j\t")
        assert len(lines) > 1
        summary = json.loads(
            open(pipeline["trends"] + ".summary.json", encoding="utf-8").read()
        )
        assert summary["n_pairs"] == len(lines) - 1
        assert "t_test_p" in summary or "distribution_error" in summary

    def test_manifests_written(self, pipeline):
        manifest = json.loads(
            open(pipeline["dlang"] + ".manifest.json", encoding="utf-8").read()
        )
        assert manifest["seed"] == 0
        assert all(len(digest) == 64 for digest in manifest["inputs"].values())


class TestDeterminism:
    def test_reruns_byte_identical(self, pipeline, tmp_path):
        """Re-running the pipeline gives byte-identical outputs (manifests,
        which carry timestamps, excluded)."""
        outs = {}
        for tag in ("r1", "r2"):
            d = tmp_path / tag
            d.mkdir()
            tokens = str(d / "tokens.jsonl")
            models = str(d / "models")
            dlang = str(d / "dlang.csv")
            years = f"{YEARS[0]}:{YEARS[1]}"
            assert run(["tokenize", "--articles", pipeline["articles"],
                        "--taxonomy", pipeline["taxonomy"], "--years", years,
                        "--out", tokens]) == 0
            assert run(["model", "--tokens", tokens,
                        "--taxonomy", pipeline["taxonomy"],
                        "--level", "discipline", "--years", years,
                        "--out", models]) == 0
            assert run(["dlang", "--models", models, "--v", "50",
                        "--out", dlang]) == 0
            outs[tag] = d
        files = []
        for base, _, names in os.walk(outs["r1"]):
            rel = os.path.relpath(base, outs["r1"])
            files.extend(os.path.join(rel, n) for n in names
                         if not n.endswith(".manifest.json"))
        assert files
        for f in sorted(files):
            a = os.path.join(outs["r1"], f)
            b = os.path.join(outs["r2"], f)
            assert filecmp.cmp(a, b, shallow=False), f"{f} differs between runs"


class TestExitCodes:
    def test_missing_input_reports_category(self, tmp_path, capsys):
        code = run(["dlang", "--models", str(tmp_path / "nope"),
                    "--out", str(tmp_path / "out.csv")])
        assert code == 1
        assert "error[input-not-found]" in capsys.readouterr().err

    def test_unknown_flag_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["dlang", "--bogus"])
        assert exc.value.code == 2

    def test_missing_subcommand(self):
        with pytest.raises(SystemExit) as exc:
            cli.main([])
        assert exc.value.code == 2

    def test_alpha_restriction(self, pipeline, tmp_path, capsys):
        code = run(["dlang", "--models", pipeline["models"], "--alpha", "1",
                    "--out", str(tmp_path / "out.csv")])
        assert code == 1
        assert "error[" in capsys.readouterr().err

    def test_selftest_passes(self, capsys):
        assert cli.main(["selftest"]) == 0
        out = capsys.readouterr().out
        assert "FAIL" not in out and "PASS" in out
