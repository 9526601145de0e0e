"""Subcommand front-end: tokenize | model | dexp | dcite | dlang | correlate |
cluster | trends | selftest.

Every output artifact is written atomically (temp + rename) and accompanied
by a `<name>.manifest.json` sidecar with the command line, config hash,
input digests, seed, and tool version. With a fixed seed all outputs are
byte-identical across runs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from multiprocessing import Pool

from . import __version__, citation, clustering, corpusmodel, ingest, language
from . import rankstats, selftest as selftest_mod, taxonomy, temporal, textpipe
from .errors import FieldscopeError, InputError
from .manifest import atomic_write_text, build_manifest, write_manifest
from .matrix import DissimilarityMatrix


def _parse_years(spec):
    try:
        a, b = spec.split(":")
        return int(a), int(b)
    except ValueError:
        raise InputError(f"years must look like A:B, got {spec!r}") from None


def _load_taxonomy(path):
    return taxonomy.TaxonomyTree.from_file(path)


def _pipeline_config(args):
    return textpipe.PipelineConfig(
        stopwords=textpipe.load_stopwords(getattr(args, "stopwords", None)),
        copyright_patterns=getattr(args, "copyright_pattern", None) or [],
        lemmatizer=getattr(args, "lemmatizer", "rules"),
        contractions=textpipe.load_contractions(getattr(args, "contractions", None)),
    )


def _emit(args, out_path, text, inputs, config=None, started=None):
    atomic_write_text(out_path, text)
    manifest = build_manifest(
        argv=sys.argv[1:],
        inputs=inputs,
        seed=args.seed,
        config=config or {},
        started=started,
    )
    write_manifest(out_path, manifest)


def _emit_matrix(args, out_path, matrix, inputs, started=None):
    atomic_write_text(out_path, matrix.to_csv_text())
    sidecar = dict(matrix.meta)
    sidecar["cell_errors"] = [
        {"i": i, "j": j, "reason": reason}
        for (i, j), reason in sorted(matrix.cell_errors.items())
    ]
    atomic_write_text(str(out_path) + ".meta.json",
                      json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    manifest = build_manifest(
        argv=sys.argv[1:], inputs=inputs, seed=args.seed,
        config=matrix.meta, started=started,
    )
    write_manifest(out_path, manifest)


# --- tokenize --------------------------------------------------------------

_WORKER_CFG = None


def _init_worker(cfg):
    global _WORKER_CFG
    _WORKER_CFG = cfg


def _tokenize_one(record_tuple):
    rid, year, specialty, title, abstract = record_tuple
    tokens = textpipe.normalize(title, abstract, _WORKER_CFG)
    return json.dumps(
        {"id": rid, "year": year, "specialty": specialty, "tokens": tokens},
        sort_keys=True,
    )


def cmd_tokenize(args):
    started = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    tree = _load_taxonomy(args.taxonomy)
    cfg = _pipeline_config(args)
    years = _parse_years(args.years)
    counters = ingest.IngestCounters()
    records = (
        (r.id, r.year, r.specialty, r.title, r.abstract)
        for r in ingest.load_articles(
            args.articles, tree, year_range=years, strict=args.strict,
            counters=counters,
        )
    )
    lines = []
    if args.jobs > 1:
        with Pool(args.jobs, initializer=_init_worker, initargs=(cfg,)) as pool:
            for line in pool.imap(_tokenize_one, records, chunksize=256):
                lines.append(line)
    else:
        _init_worker(cfg)
        lines = [_tokenize_one(r) for r in records]
    _emit(
        args, args.out, "\n".join(lines) + ("\n" if lines else ""),
        inputs=[args.articles, args.taxonomy],
        config={"years": years, "lemmatizer": cfg.lemmatizer,
                "counters": vars(counters)},
        started=started,
    )
    print(
        f"tokenized {counters.accepted} articles "
        f"(rejected: year={counters.rejected_year} "
        f"specialty={counters.rejected_specialty} "
        f"malformed={counters.malformed} duplicate={counters.duplicate}; "
        f"empty abstracts kept: {counters.empty_abstract})"
    )
    return 0


# --- model -----------------------------------------------------------------


def _read_token_file(path):
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read token file {path}: {exc}") from exc
    with fh:
        for line in fh:
            if line.strip():
                yield json.loads(line)


def cmd_model(args):
    started = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    tree = _load_taxonomy(args.taxonomy)
    years = _parse_years(args.years)
    os.makedirs(args.out, exist_ok=True)
    models = {}
    for doc in _read_token_file(args.tokens):
        year = int(doc["year"])
        if not (years[0] <= year <= years[1]):
            continue
        group = tree.ancestor_at(doc["specialty"], args.level)
        key = (group, year) if args.per_year else (group, None)
        model = models.setdefault(key, corpusmodel.FrequencyModel())
        model.counts.update(doc["tokens"])
        model.total_tokens += len(doc["tokens"])
    written = []
    for (group, year), model in sorted(models.items(), key=lambda kv: str(kv[0])):
        if year is None:
            path = os.path.join(args.out, f"{group}.model.tsv")
        else:
            subdir = os.path.join(args.out, str(year))
            os.makedirs(subdir, exist_ok=True)
            path = os.path.join(subdir, f"{group}.model.tsv")
        corpusmodel.save_model(model, path)
        written.append(path)
    manifest = build_manifest(
        argv=sys.argv[1:], inputs=[args.tokens, args.taxonomy], seed=args.seed,
        config={"level": args.level, "years": years, "per_year": args.per_year},
        started=started,
    )
    write_manifest(os.path.join(args.out, "models"), manifest)
    print(f"wrote {len(written)} model files under {args.out}")
    return 0


# --- matrices --------------------------------------------------------------


def cmd_dexp(args):
    started = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    tree = _load_taxonomy(args.taxonomy)
    matrix = tree.d_exp_matrix(args.level)
    _emit_matrix(args, args.out, matrix, [args.taxonomy], started)
    print(f"wrote {matrix.n}x{matrix.n} taxonomy-distance matrix to {args.out}")
    return 0


def cmd_dcite(args):
    started = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    tree = _load_taxonomy(args.taxonomy)
    years = _parse_years(args.years)
    field_of = {}
    counters = ingest.IngestCounters()
    for record in ingest.load_articles(args.articles, tree, year_range=years,
                                       counters=counters):
        field_of[record.id] = tree.ancestor_at(record.specialty, args.level)
    cite_counters = ingest.CitationCounters()
    edges = ingest.load_citations(args.citations, set(field_of), cite_counters)
    graph, skipped = citation.aggregate(edges, field_of)
    matrix = citation.d_cite_matrix(
        graph, meta={"level": args.level, "window": list(years)}
    )
    _emit_matrix(args, args.out, matrix, [args.articles, args.citations,
                                          args.taxonomy], started)
    print(
        f"aggregated {cite_counters.emitted} edges "
        f"(dropped unknown-endpoint: {cite_counters.dropped_unknown}, "
        f"malformed: {cite_counters.malformed}, unmapped: {skipped}); "
        f"wrote {matrix.n}x{matrix.n} matrix to {args.out}"
    )
    return 0


def _load_model_dir(directory, v, renormalize):
    vectors = {}
    skipped = []
    try:
        names = sorted(os.listdir(directory))
    except OSError as exc:
        raise InputError(f"cannot read model directory {directory}: {exc}") from exc
    for name in names:
        if not name.endswith(".model.tsv"):
            continue
        label = name[: -len(".model.tsv")]
        model = corpusmodel.load_model(os.path.join(directory, name))
        try:
            vectors[label] = corpusmodel.top_v_probabilities(
                model, v, renormalize=renormalize
            )
        except FieldscopeError as exc:
            skipped.append((label, str(exc)))
    return vectors, skipped


def cmd_dlang(args):
    started = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    if args.alpha != 2:
        raise InputError("normalized language dissimilarity supports alpha=2 only")
    vectors, skipped = _load_model_dir(args.models, args.v,
                                       renormalize=not args.no_renormalize)
    if not vectors:
        raise InputError(f"no usable model files in {args.models}")
    matrix = language.d_lang_matrix(
        vectors,
        meta={"v": args.v, "renormalize": not args.no_renormalize,
              "skipped_fields": [list(s) for s in skipped]},
    )
    inputs = [os.path.join(args.models, n) for n in sorted(os.listdir(args.models))
              if n.endswith(".model.tsv")]
    _emit_matrix(args, args.out, matrix, inputs, started)
    msg = f"wrote {matrix.n}x{matrix.n} language matrix to {args.out}"
    if skipped:
        msg += f" (skipped below-cutoff fields: {[s[0] for s in skipped]})"
    print(msg)
    return 0


# --- correlate -------------------------------------------------------------


def cmd_correlate(args):
    started = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    mx = DissimilarityMatrix.from_csv(args.x)
    my = DissimilarityMatrix.from_csv(args.y)
    sample = rankstats.build_paired_sample(mx, my)
    lines = ["measure_pair\ttau\trho\tn_pairs\texcluded"]
    tau = rankstats.kendall_tau(sample)
    rho = rankstats.spearman_rho(sample)
    name = f"{os.path.basename(args.x)}~{os.path.basename(args.y)}"
    lines.append(f"{name}\t{tau!r}\t{rho!r}\t{len(sample)}\t{sample.excluded}")
    inputs = [args.x, args.y]
    if args.bootstrap_against:
        mz = DissimilarityMatrix.from_csv(args.bootstrap_against)
        sample_b = rankstats.build_paired_sample(mx, mz)
        result = rankstats.bootstrap_compare(
            sample, sample_b, n_boot=args.nboot, statistic=args.statistic,
            seed=args.seed, two_sided=args.two_sided,
        )
        lines.append(
            f"#bootstrap\tstatistic={args.statistic}\tn_boot={args.nboot}"
            f"\tseed={args.seed}\tp_value={result.p_value!r}"
            f"\ttwo_sided={args.two_sided}"
        )
        inputs.append(args.bootstrap_against)
    if args.per_field:
        lines.append("#per_field\tfield\ttau")
        for label in mx.labels:
            try:
                t = rankstats.per_field_correlation(mx, my, label)
            except FieldscopeError as exc:
                lines.append(f"#per_field\t{label}\terror:{exc.category}")
                continue
            lines.append(f"#per_field\t{label}\t{t!r}")
    _emit(args, args.out, "\n".join(lines) + "\n", inputs,
          config={"statistic": args.statistic, "nboot": args.nboot},
          started=started)
    print(f"tau={tau:.4f} rho={rho:.4f} over {len(sample)} pairs "
          f"({sample.excluded} excluded); report: {args.out}")
    return 0


# --- cluster ---------------------------------------------------------------


def cmd_cluster(args):
    started = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    matrix = DissimilarityMatrix.from_csv(args.matrix)
    dend = clustering.upgma(matrix)
    _emit(args, args.out, clustering.to_nested_text(dend) + "\n",
          [args.matrix], config={"linkage": "group-average"}, started=started)
    if args.merge_table_out:
        _emit(args, args.merge_table_out, clustering.to_merge_table(dend),
              [args.matrix], config={"linkage": "group-average"}, started=started)
    if args.partition_out:
        partition = clustering.cut_at_percentile(dend, args.cut_percentile)
        lines = ["cluster\tfield"]
        for k, cluster in enumerate(partition):
            for label in cluster:
                lines.append(f"{k}\t{label}")
        _emit(args, args.partition_out, "\n".join(lines) + "\n", [args.matrix],
              config={"cut_percentile": args.cut_percentile}, started=started)
        print(f"{len(partition)} clusters at percentile {args.cut_percentile}; "
              f"tree: {args.out}")
    else:
        print(f"tree: {args.out}")
    if not dend.monotonic:
        print("warning: merge heights were not monotonic", file=sys.stderr)
    return 0


# --- trends ----------------------------------------------------------------


def cmd_trends(args):
    started = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    try:
        year_dirs = sorted(
            d for d in os.listdir(args.models_by_year)
            if d.isdigit() and os.path.isdir(os.path.join(args.models_by_year, d))
        )
    except OSError as exc:
        raise InputError(
            f"cannot read models-by-year directory {args.models_by_year}: {exc}"
        ) from exc
    if not year_dirs:
        raise InputError(f"no per-year subdirectories in {args.models_by_year}")
    models_by_year = {}
    inputs = []
    for d in year_dirs:
        directory = os.path.join(args.models_by_year, d)
        vectors, _ = _load_model_dir(directory, args.v, renormalize=True)
        if vectors:
            models_by_year[int(d)] = vectors
            inputs.extend(
                os.path.join(directory, n) for n in sorted(os.listdir(directory))
                if n.endswith(".model.tsv")
            )
    series = temporal.yearly_series(models_by_year)
    t0 = min(models_by_year)
    tf = max(models_by_year)
    lines = ["field_i\tfield_j\tt_start\ttf\tnu\tspan"]
    stats = []
    for pair, s in series.items():
        smoothed = temporal.moving_average(s, args.ma_window)
        try:
            stat = temporal.nu(smoothed, t0, tf, min_history=args.min_history)
        except FieldscopeError:
            continue
        stats.append(stat)
        lines.append(
            f"{pair[0]}\t{pair[1]}\t{stat.t_start}\t{stat.tf}"
            f"\t{stat.nu!r}\t{stat.span_years}"
        )
    _emit(args, args.out, "\n".join(lines) + "\n", inputs,
          config={"v": args.v, "min_history": args.min_history,
                  "ma_window": args.ma_window, "k_sigma": args.k_sigma},
          started=started)
    summary = {"n_pairs": len(stats)}
    if len(stats) >= 2:
        try:
            dist = temporal.nu_distribution(stats)
            summary.update(
                mean=dist.mean, std=dist.std,
                t_test_p=dist.t_test_p, wilcoxon_p=dist.wilcoxon_p,
            )
        except FieldscopeError as exc:
            summary["distribution_error"] = str(exc)
        report = temporal.tails(stats, k_sigma=args.k_sigma)
        summary["left_tail_fields"] = report.left_field_counts
        summary["right_tail_fields"] = report.right_field_counts
    atomic_write_text(str(args.out) + ".summary.json",
                      json.dumps(summary, indent=2, sort_keys=True) + "\n")
    print(f"{len(stats)} qualifying pairs; trends: {args.out}")
    return 0


def cmd_selftest(args):
    return selftest_mod.run(seed=args.seed)


# --- argument parsing ------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fieldscope",
        description="Similarity of document-labeled corpora: language, "
                    "citations, and expert taxonomy.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for all stochastic operations")
    parser.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                        help="worker processes for parallel stages")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tokenize", help="run the text pipeline over articles")
    p.add_argument("--articles", required=True)
    p.add_argument("--taxonomy", required=True)
    p.add_argument("--years", default="1991:2014")
    p.add_argument("--stopwords")
    p.add_argument("--contractions")
    p.add_argument("--copyright-pattern", action="append")
    p.add_argument("--lemmatizer", default="rules",
                   choices=sorted(textpipe.LEMMATIZERS))
    p.add_argument("--strict", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_tokenize)

    p = sub.add_parser("model", help="build word-frequency models per field")
    p.add_argument("--tokens", required=True)
    p.add_argument("--taxonomy", required=True)
    p.add_argument("--level", default="specialty",
                   choices=["specialty", "discipline", "domain"])
    p.add_argument("--years", default="1991:2014")
    p.add_argument("--per-year", action="store_true",
                   help="write one model per (field, year) under <out>/<year>/")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("dexp", help="taxonomy tree-distance matrix")
    p.add_argument("--taxonomy", required=True)
    p.add_argument("--level", default="specialty",
                   choices=["specialty", "discipline", "domain"])
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_dexp)

    p = sub.add_parser("dcite", help="citation dissimilarity matrix")
    p.add_argument("--citations", required=True)
    p.add_argument("--articles", required=True)
    p.add_argument("--taxonomy", required=True)
    p.add_argument("--level", default="specialty",
                   choices=["specialty", "discipline", "domain"])
    p.add_argument("--years", default="1991:2014")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_dcite)

    p = sub.add_parser("dlang", help="language dissimilarity matrix")
    p.add_argument("--models", required=True, help="directory of .model.tsv files")
    p.add_argument("--v", type=int, default=corpusmodel.DEFAULT_V)
    p.add_argument("--alpha", type=float, default=2)
    p.add_argument("--no-renormalize", action="store_true",
                   help="keep raw frequencies over the full total after the cutoff")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_dlang)

    p = sub.add_parser("correlate", help="rank correlation between two matrices")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--per-field", action="store_true")
    p.add_argument("--bootstrap-against",
                   help="third matrix; test whether (x,y) is less correlated "
                        "than (x, this)")
    p.add_argument("--nboot", type=int, default=1000)
    p.add_argument("--statistic", default="tau", choices=["tau", "rho"])
    p.add_argument("--two-sided", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("cluster", help="group-average hierarchical clustering")
    p.add_argument("--matrix", required=True)
    p.add_argument("--cut-percentile", type=float, default=0.92)
    p.add_argument("--out", required=True, help="nested-text tree output")
    p.add_argument("--merge-table-out")
    p.add_argument("--partition-out")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("trends", help="temporal drift of language dissimilarity")
    p.add_argument("--models-by-year", required=True)
    p.add_argument("--v", type=int, default=corpusmodel.DEFAULT_V)
    p.add_argument("--min-history", type=int, default=temporal.DEFAULT_MIN_HISTORY)
    p.add_argument("--ma-window", type=int, default=3)
    p.add_argument("--k-sigma", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_trends)

    p = sub.add_parser("selftest", help="run the analytic oracle suites")
    p.set_defaults(func=cmd_selftest)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FieldscopeError as exc:
        print(f"error[{exc.category}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
