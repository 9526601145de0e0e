"""fieldscope: similarity of document-labeled corpora along language,
citation, and expert-taxonomy dimensions."""

__version__ = "0.1.0"

from .citation import CitationGraph, aggregate, d_cite, d_cite_matrix
from .clustering import Dendrogram, cut_at_percentile, upgma
from .corpusmodel import (
    FrequencyModel,
    ProbabilityVector,
    build_model,
    merge,
    self_dissimilarity,
    top_v_probabilities,
)
from .ingest import ArticleRecord, CitationEdge, CorpusKey, group_corpora, load_articles, load_citations
from .language import d_alpha, d_lang, d_lang_matrix, d_max, h_alpha
from .matrix import DissimilarityMatrix
from .rankstats import (
    PairedSample,
    bootstrap_compare,
    build_paired_sample,
    kendall_tau,
    per_field_correlation,
    spearman_rho,
)
from .taxonomy import TaxonomyTree
from .temporal import moving_average, nu, nu_distribution, tails, yearly_series
from .textpipe import PipelineConfig, expand_contractions, normalize, split_symbols
