"""Raw title+abstract to token list, as an eight-step deterministic pipeline.

Steps, in order: copyright-tail removal, title+abstract concatenation,
lowercasing, contraction expansion, whitespace tokenization with noun/verb
lemmatization, intra-token symbol splitting (hyphens preserved), removal of
numbers and single letters, stop-word removal.

The shipped lemmatizer is a deliberate approximation: a small irregular
table plus suffix-stripping rules for English noun plurals. It is a named
plug-in; register alternatives via LEMMATIZERS.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources

from .errors import InputError

# --- shipped resources -----------------------------------------------------


def _data_text(name):
    return resources.files("fieldscope.data").joinpath(name).read_text("utf-8")


def load_stopwords(path=None):
    """Stop-word set: one lowercase token per line; '#' comments allowed."""
    if path is None:
        text = _data_text("stopwords_en.txt")
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read stop-word file {path}: {exc}") from exc
    words = set()
    for line in text.splitlines():
        line = line.strip().lower()
        if line and not line.startswith("#"):
            words.add(line)
    return frozenset(words)


def load_contractions(path=None):
    """Contraction table: tab-separated `contraction<TAB>expansion` rows."""
    if path is None:
        text = _data_text("contractions.tsv")
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read contraction table {path}: {exc}") from exc
    table = {}
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        try:
            contraction, expansion = line.split("\t")
        except ValueError:
            raise InputError(f"bad contraction row {line!r}") from None
        table[contraction.strip().lower()] = expansion.strip().lower()
    return table


# --- lemmatization ---------------------------------------------------------

_IRREGULAR_VERBS = {
    "is": "be", "am": "be", "are": "be", "was": "be", "were": "be",
    "been": "be", "being": "be",
    "has": "have", "had": "have", "having": "have",
    "does": "do", "did": "do", "done": "do", "doing": "do",
    "goes": "go", "went": "go", "gone": "go",
}

_IRREGULAR_NOUNS = {
    "men": "man", "women": "woman", "children": "child", "feet": "foot",
    "teeth": "tooth", "mice": "mouse",
    "analyses": "analysis", "hypotheses": "hypothesis", "theses": "thesis",
    "axes": "axis", "bases": "basis", "diagnoses": "diagnosis",
    "criteria": "criterion", "phenomena": "phenomenon", "spectra": "spectrum",
    "bacteria": "bacterium", "media": "medium",
    "indices": "index", "matrices": "matrix", "vertices": "vertex",
    "appendices": "appendix",
}

# nouns ending in 's' that are not plurals
_PLURAL_EXEMPT = {"gas", "bias", "lens", "chaos", "species", "series", "means"}


def guess_pos(token):
    """Coarse POS: dictionary hit => verb; trailing 's' => noun; else other."""
    if token in _IRREGULAR_VERBS:
        return "verb"
    if token in _IRREGULAR_NOUNS or token.endswith("s"):
        return "noun"
    return "other"


def rule_lemmatizer(token, pos):
    if pos == "verb":
        return _IRREGULAR_VERBS.get(token, token)
    if pos != "noun":
        return token
    if token in _IRREGULAR_NOUNS:
        return _IRREGULAR_NOUNS[token]
    if token in _PLURAL_EXEMPT:
        return token
    if token.endswith("ies") and len(token) > 4:
        return token[:-3] + "y"
    if len(token) > 4 and token.endswith(("xes", "ches", "shes", "sses", "zes", "oes")):
        return token[:-2]
    if token.endswith("s") and not token.endswith(("ss", "us", "is")):
        return token[:-1]
    return token


def identity_lemmatizer(token, pos):
    return token


LEMMATIZERS = {
    "rules": rule_lemmatizer,
    "identity": identity_lemmatizer,
}


# --- configuration ---------------------------------------------------------


@dataclass
class PipelineConfig:
    stopwords: frozenset = field(default_factory=load_stopwords)
    copyright_patterns: list = field(default_factory=list)
    lemmatizer: str = "rules"
    keep_hyphens: bool = True
    contractions: dict = field(default_factory=load_contractions)

    def __post_init__(self):
        if self.lemmatizer not in LEMMATIZERS:
            raise InputError(f"unknown lemmatizer plug-in {self.lemmatizer!r}")
        self._lemma = LEMMATIZERS[self.lemmatizer]
        self._contraction_re = _compile_contractions(self.contractions)
        self._copyright_res = [
            re.compile(re.escape(p), re.IGNORECASE) for p in self.copyright_patterns
        ]


def _compile_contractions(table):
    if not table:
        return None
    keys = sorted(table, key=len, reverse=True)
    return re.compile(r"\b(" + "|".join(re.escape(k) for k in keys) + r")\b")


# --- pipeline steps --------------------------------------------------------

# every non-word, non-hyphen character is a split point; underscores too
_SPLIT_RE = re.compile(r"[^\w\-]+|_+")
_SPLIT_ALL_RE = re.compile(r"[^\w]+|_+")
_NUMBER_RE = re.compile(r"\d[\d.,/\-]*(?:[eE][+\-]?\d+)?")


def expand_contractions(text, table=None):
    """Replace every table entry by its expansion; lowercased input assumed."""
    if table is None:
        pattern, mapping = _DEFAULT_CONTRACTION_RE, _DEFAULT_CONTRACTIONS
    else:
        mapping = table
        pattern = _compile_contractions(table)
    text = text.replace("’", "'")
    if pattern is None:
        return text
    return pattern.sub(lambda m: mapping[m.group(0)], text)


_DEFAULT_CONTRACTIONS = load_contractions()
_DEFAULT_CONTRACTION_RE = _compile_contractions(_DEFAULT_CONTRACTIONS)


def split_symbols(token, keep_hyphens=True):
    """Split a token at every non-alphanumeric character, keeping hyphens."""
    pattern = _SPLIT_RE if keep_hyphens else _SPLIT_ALL_RE
    return [t for t in pattern.split(token) if t]


def strip_copyright(abstract, cfg):
    """Drop the tail of the abstract from the earliest copyright pattern match."""
    cut = len(abstract)
    for pattern in cfg._copyright_res:
        m = pattern.search(abstract)
        if m and m.start() < cut:
            cut = m.start()
    return abstract[:cut]


def is_number(token):
    return bool(_NUMBER_RE.fullmatch(token))


def normalize(title, abstract, cfg=None):
    """Run the full pipeline on one document; empty output is legal."""
    if cfg is None:
        cfg = _default_config()
    text = title + " " + strip_copyright(abstract, cfg)
    text = text.lower()
    text = text.replace("’", "'")
    if cfg._contraction_re is not None:
        table = cfg.contractions
        text = cfg._contraction_re.sub(lambda m: table[m.group(0)], text)
    split_re = _SPLIT_RE if cfg.keep_hyphens else _SPLIT_ALL_RE
    text = split_re.sub(" ", text)
    lemma_fn = cfg._lemma
    stopwords = cfg.stopwords
    out = []
    for token in text.split():
        token = token.strip("-")
        if not token:
            continue
        token = lemma_fn(token, guess_pos(token))
        if len(token) < 2 or (token[0].isdigit() and is_number(token)):
            continue
        if token in stopwords:
            continue
        out.append(token)
    return out


_DEFAULT_CONFIG = None


def _default_config():
    global _DEFAULT_CONFIG
    if _DEFAULT_CONFIG is None:
        _DEFAULT_CONFIG = PipelineConfig()
    return _DEFAULT_CONFIG
