import pytest

from fieldscope import ingest
from fieldscope.errors import InputError, MalformedRecord
from fieldscope.ingest import CorpusKey, IngestCounters

from helpers import write_articles_jsonl


def record(i, year=2000, specialty="d0.0.0", **kw):
    base = {"id": f"a{i}", "year": year, "title": f"title {i}",
            "abstract": f"abstract {i}", "specialty": specialty}
    base.update(kw)
    return base


class TestLoadArticles:
    def test_all_pass(self, tmp_path, tree):
        path = tmp_path / "articles.jsonl"
        write_articles_jsonl([record(i) for i in range(3)], path)
        counters = IngestCounters()
        out = list(ingest.load_articles(path, tree, counters=counters))
        assert len(out) == 3
        assert counters.accepted == 3
        assert counters.rejected_year == counters.rejected_specialty == 0

    def test_year_rejection(self, tmp_path, tree):
        path = tmp_path / "articles.jsonl"
        write_articles_jsonl([record(0, year=1985)], path)
        counters = IngestCounters()
        assert list(ingest.load_articles(path, tree, counters=counters)) == []
        assert counters.rejected_year == 1

    def test_year_boundaries_inclusive(self, tmp_path, tree):
        path = tmp_path / "articles.jsonl"
        write_articles_jsonl([record(0, year=1991), record(1, year=2014)], path)
        assert len(list(ingest.load_articles(path, tree))) == 2

    def test_unknown_specialty(self, tmp_path, tree):
        path = tmp_path / "articles.jsonl"
        write_articles_jsonl([record(0, specialty="bogus")], path)
        counters = IngestCounters()
        assert list(ingest.load_articles(path, tree, counters=counters)) == []
        assert counters.rejected_specialty == 1

    def test_non_leaf_specialty_rejected(self, tmp_path, tree):
        path = tmp_path / "articles.jsonl"
        write_articles_jsonl([record(0, specialty="d0.0")], path)
        counters = IngestCounters()
        assert list(ingest.load_articles(path, tree, counters=counters)) == []
        assert counters.rejected_specialty == 1

    def test_malformed_skip_and_count(self, tmp_path, tree):
        path = tmp_path / "articles.jsonl"
        with open(path, "w") as fh:
            fh.write("not json at all\n")
            fh.write('{"id": "a1"}\n')
        counters = IngestCounters()
        assert list(ingest.load_articles(path, tree, counters=counters)) == []
        assert counters.malformed == 2

    def test_malformed_fatal_in_strict_mode(self, tmp_path, tree):
        path = tmp_path / "articles.jsonl"
        with open(path, "w") as fh:
            fh.write("not json\n")
        with pytest.raises(MalformedRecord):
            list(ingest.load_articles(path, tree, strict=True))

    def test_duplicate_first_wins(self, tmp_path, tree):
        path = tmp_path / "articles.jsonl"
        write_articles_jsonl(
            [record(0, title="first"), record(0, title="second")], path
        )
        counters = IngestCounters()
        out = list(ingest.load_articles(path, tree, counters=counters))
        assert len(out) == 1 and out[0].title == "first"
        assert counters.duplicate == 1

    def test_duplicate_fatal_in_strict_mode(self, tmp_path, tree):
        path = tmp_path / "articles.jsonl"
        write_articles_jsonl([record(0), record(0)], path)
        with pytest.raises(MalformedRecord):
            list(ingest.load_articles(path, tree, strict=True))

    def test_counter_totals(self, tmp_path, tree):
        path = tmp_path / "articles.jsonl"
        rows = [record(0), record(1, year=1950), record(2, specialty="zz"),
                record(0)]
        write_articles_jsonl(rows, path)
        with open(path, "a") as fh:
            fh.write("garbage\n")
        counters = IngestCounters()
        list(ingest.load_articles(path, tree, counters=counters))
        assert counters.total_lines == 5

    def test_empty_abstract_kept_and_counted(self, tmp_path, tree):
        path = tmp_path / "articles.jsonl"
        write_articles_jsonl([record(0, abstract="")], path)
        counters = IngestCounters()
        out = list(ingest.load_articles(path, tree, counters=counters))
        assert len(out) == 1
        assert counters.empty_abstract == 1

    def test_missing_file(self, tree):
        with pytest.raises(InputError):
            list(ingest.load_articles("/nonexistent/file", tree))


def make_records(tree, rows):
    return [
        ingest.ArticleRecord(id=f"a{i}", year=year, title="t", abstract="x",
                             specialty=spec)
        for i, (year, spec) in enumerate(rows)
    ]


class TestGroupCorpora:
    def test_discipline_concatenates_specialties(self, tree):
        records = make_records(tree, [(2000, "d0.0.0"), (2000, "d0.0.1")])
        groups = ingest.group_corpora(records, tree, "discipline", [(1991, 2014)])
        assert groups == {
            CorpusKey(field="d0.0", window=(1991, 2014)): ["a0", "a1"]
        }

    def test_single_year_windows(self, tree):
        records = make_records(tree, [(1991, "d0.0.0")])
        groups = ingest.group_corpora(
            records, tree, "specialty", [(1991, 1991), (1992, 1992)]
        )
        assert list(groups) == [CorpusKey(field="d0.0.0", window=(1991, 1991))]

    def test_overlapping_windows(self, tree):
        records = make_records(tree, [(1992, "d0.0.0")])
        groups = ingest.group_corpora(
            records, tree, "specialty", [(1991, 1993), (1992, 1994)]
        )
        assert len(groups) == 2

    def test_partition_preservation(self, tree):
        records = make_records(
            tree,
            [(2000, s) for s in tree.ids_at_level("specialty")] * 3,
        )
        window = [(1991, 2014)]
        by_spec = ingest.group_corpora(records, tree, "specialty", window)
        by_disc = ingest.group_corpora(records, tree, "discipline", window)
        assert (sum(len(v) for v in by_spec.values())
                == sum(len(v) for v in by_disc.values()) == len(records))

    def test_determinism(self, tree):
        records = make_records(tree, [(2000, "d0.0.0"), (1999, "d1.1.1")])
        a = ingest.group_corpora(records, tree, "domain", [(1991, 2014)])
        b = ingest.group_corpora(records, tree, "domain", [(1991, 2014)])
        assert a == b

    def test_empty_stream(self, tree):
        assert ingest.group_corpora([], tree, "specialty", [(1991, 2014)]) == {}

    def test_bad_window(self, tree):
        with pytest.raises(InputError):
            ingest.group_corpora([], tree, "specialty", [(2000, 1999)])


class TestLoadCitations:
    def test_unknown_endpoint_dropped(self, tmp_path):
        path = tmp_path / "cites.tsv"
        path.write_text("a\tb\na\tx\n")
        counters = ingest.CitationCounters()
        edges = list(ingest.load_citations(path, {"a", "b"}, counters))
        assert [(e.citing_id, e.cited_id) for e in edges] == [("a", "b")]
        assert counters.dropped_unknown == 1

    def test_self_citation_emitted(self, tmp_path):
        path = tmp_path / "cites.tsv"
        path.write_text("a\ta\n")
        edges = list(ingest.load_citations(path, {"a"}))
        assert edges == [ingest.CitationEdge("a", "a")]

    def test_empty_file(self, tmp_path):
        path = tmp_path / "cites.tsv"
        path.write_text("")
        assert list(ingest.load_citations(path, {"a"})) == []

    def test_comments_and_commas(self, tmp_path):
        path = tmp_path / "cites.tsv"
        path.write_text("# a comment\na, b\n")
        assert len(list(ingest.load_citations(path, {"a", "b"}))) == 1

    def test_malformed_counted(self, tmp_path):
        path = tmp_path / "cites.tsv"
        path.write_text("a b c\n")
        counters = ingest.CitationCounters()
        assert list(ingest.load_citations(path, {"a", "b"}, counters)) == []
        assert counters.malformed == 1
