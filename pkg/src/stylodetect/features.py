"""The 115-entry feature registry and per-document extraction.

Families:
  SF  (10)  embedding similarities, title similarity, entity statistics
  LF (102)  lexical overlap (48), type-token ratios (12), connectives (24),
            givenness (10), document cohesion (8)
  HBH (3)   hedge/booster/hype densities per 100 word tokens

Multi-sentence statistics (anything built from sentence pairs or from
sentence-to-centroid comparisons) are 0 on single-sentence documents and
the document is flagged 'single_sentence' in extraction metadata, so the
feature map stays total. Densities use word tokens (alphabetic) as the
base; 0 when the document has no word tokens.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import GENERATED, Corpus
from .embeddings import ProviderConfig, cosine_values, make_provider
from .errors import InputError, ProviderError
from .lexicons import (CONNECTIVE_CLASSES, Lexicon, hbh_features,
                       load_lexicon_set, match_at, match_count, match_keys)
from .textproc import CONTENT, FUNCTION, ProcessedDoc, TextProcessor

REGISTRY_VERSION = "1"

SF = "SF"
LF = "LF"
HBH = "HBH"

_OVERLAP_CLASSES = ("all", "content", "function", "entity")
_OVERLAP_SEGMENTS = ("adj", "win2")
_OVERLAP_STATS = (
    ("jaccard", "mean Jaccard overlap of lemma sets"),
    ("fwd_containment", "mean share of first-segment lemma types found in the second"),
    ("bwd_containment", "mean share of second-segment lemma types found in the first"),
    ("min_share", "mean shared-type count over the smaller type set"),
    ("any_overlap", "proportion of pairs sharing at least one lemma"),
    ("token_repeat", "mean proportion of second-segment tokens repeating a first-segment lemma"),
)


@dataclass(frozen=True)
class RegistryEntry:
    feature_id: str
    family: str
    description: str
    tag: str


@dataclass(frozen=True)
class FeatureRegistry:
    entries: tuple[RegistryEntry, ...]
    version: str = REGISTRY_VERSION

    def feature_ids(self, families: tuple[str, ...] | None = None) -> list[str]:
        if families is None:
            return [e.feature_id for e in self.entries]
        return [e.feature_id for e in self.entries if e.family in families]

    def family_of(self, feature_id: str) -> str:
        for e in self.entries:
            if e.feature_id == feature_id:
                return e.family
        raise InputError(f"unknown feature id: {feature_id!r}")


def build_registry() -> FeatureRegistry:
    entries: list[RegistryEntry] = []

    sf = [
        ("sf01_adjacent_similarity_mean", "mean cosine of adjacent sentence embeddings"),
        ("sf02_adjacent_similarity_min", "min cosine of adjacent sentence embeddings"),
        ("sf03_adjacent_similarity_max", "max cosine of adjacent sentence embeddings"),
        ("sf04_pairwise_similarity_mean", "mean cosine over all sentence pairs"),
        ("sf05_pairwise_similarity_std", "std of cosine over all sentence pairs"),
        ("sf06_first_last_similarity", "cosine of first and last sentence embeddings"),
        ("sf07_title_similarity_mean", "mean sentence-to-title cosine"),
        ("sf08_title_similarity_max", "max sentence-to-title cosine"),
        ("sf09_entity_distinct_count", "distinct detected entity surfaces"),
        ("sf10_entity_density", "entity mentions per 100 word tokens"),
    ]
    for fid, desc in sf:
        tag = "entity" if fid.startswith(("sf09", "sf10")) else "embedding"
        entries.append(RegistryEntry(fid, SF, desc, tag))

    for cls in _OVERLAP_CLASSES:
        for seg in _OVERLAP_SEGMENTS:
            span = "adjacent sentences" if seg == "adj" else "two-sentence window"
            for stat, desc in _OVERLAP_STATS:
                entries.append(RegistryEntry(
                    f"lf_overlap_{cls}_{seg}_{stat}", LF,
                    f"{desc} ({cls} lemmas, {span})", "overlap"))

    ttr = [
        ("lf_ttr_simple", "surface type-token ratio over word tokens"),
        ("lf_ttr_content", "type-token ratio over content tokens"),
        ("lf_ttr_function", "type-token ratio over function tokens"),
        ("lf_ttr_lemma", "lemma type-token ratio over word tokens"),
        ("lf_ttr_bigram", "distinct lemma bigrams over bigram count"),
        ("lf_ttr_trigram", "distinct lemma trigrams over trigram count"),
        ("lf_ttr_root", "types over square root of tokens"),
        ("lf_ttr_log", "log types over log tokens"),
        ("lf_ttr_mattr50", "moving-average TTR, window 50"),
        ("lf_unique_lemma_density", "proportion of tokens whose lemma occurs exactly once"),
        ("lf_hapax_proportion", "proportion of distinct lemmas occurring exactly once"),
        ("lf_mean_word_length", "mean characters per word token"),
    ]
    for fid, desc in ttr:
        entries.append(RegistryEntry(fid, LF, desc, "ttr"))

    for cls in CONNECTIVE_CLASSES:
        entries.append(RegistryEntry(
            f"lf_conn_{cls}_count", LF, f"{cls} connective matches", "connective"))
        entries.append(RegistryEntry(
            f"lf_conn_{cls}_density", LF,
            f"{cls} connective matches per 100 word tokens", "connective"))
        entries.append(RegistryEntry(
            f"lf_conn_{cls}_initial", LF,
            f"sentences opening with a {cls} connective", "connective"))

    givenness = [
        ("lf_pronoun_density", "pronouns per 100 word tokens"),
        ("lf_definite_article_density", "definite articles per 100 word tokens"),
        ("lf_demonstrative_density", "demonstratives per 100 word tokens"),
        ("lf_repeated_content_proportion",
         "content tokens whose lemma already occurred in the document"),
        ("lf_pronoun_content_ratio", "pronoun matches over content tokens"),
        ("lf_first_mention_proportion",
         "first occurrences of content lemmas over word tokens"),
        ("lf_stopword_density", "stopwords per 100 word tokens"),
        ("lf_function_word_proportion", "function tokens over word tokens"),
        ("lf_mean_sentence_length", "mean word tokens per sentence"),
        ("lf_sentence_length_std", "std of word tokens per sentence"),
    ]
    for fid, desc in givenness:
        entries.append(RegistryEntry(fid, LF, desc, "givenness"))

    cohesion = [
        ("lf_coh_centroid_mean", "mean sentence-to-centroid embedding cosine"),
        ("lf_coh_centroid_min", "min sentence-to-centroid embedding cosine"),
        ("lf_coh_centroid_std", "std of sentence-to-centroid embedding cosine"),
        ("lf_coh_adjacent_tf_mean", "mean adjacent-sentence lemma-TF cosine"),
        ("lf_coh_doc_tf_norm", "L2 norm of the document lemma-TF vector"),
        ("lf_coh_adjacent_above_half",
         "proportion of adjacent embedding cosines above 0.5"),
        ("lf_coh_adjacent_gap_max", "max jump between consecutive adjacent cosines"),
        ("lf_coh_pairwise_tf_mean", "mean lemma-TF cosine over all sentence pairs"),
    ]
    for fid, desc in cohesion:
        entries.append(RegistryEntry(fid, LF, desc, "cohesion"))

    entries.append(RegistryEntry(
        "hbh_hedge_density", HBH, "hedge matches per 100 word tokens", "lexicon"))
    entries.append(RegistryEntry(
        "hbh_booster_density", HBH, "booster matches per 100 word tokens", "lexicon"))
    entries.append(RegistryEntry(
        "hbh_hype_density", HBH, "hype-lemma matches per 100 word tokens", "lexicon"))

    registry = FeatureRegistry(entries=tuple(entries))
    validate_registry(registry)
    return registry


def validate_registry(registry: FeatureRegistry) -> None:
    """Fail fast when the manifest stops summing to 10 + 102 + 3."""
    counts = Counter(e.family for e in registry.entries)
    expected = {SF: 10, LF: 102, HBH: 3}
    if dict(counts) != expected:
        raise InputError(f"registry family counts {dict(counts)} != {expected}")
    ids = [e.feature_id for e in registry.entries]
    if len(set(ids)) != len(ids):
        raise InputError("registry feature ids are not unique")


DEFAULT_REGISTRY = build_registry()


# ---------------------------------------------------------------------------
# helpers


def _mean(xs) -> float:
    xs = list(xs)
    return float(sum(xs) / len(xs)) if xs else 0.0


def _std(xs) -> float:
    xs = list(xs)
    if not xs:
        return 0.0
    mu = sum(xs) / len(xs)
    return float(math.sqrt(sum((x - mu) ** 2 for x in xs) / len(xs)))


def _sentence_vectors(doc: ProcessedDoc, provider) -> list[np.ndarray]:
    texts = [s.text for s in doc.sentences]
    if not texts:
        return []
    return [v.values for v in provider.embed(texts)]


def _tf_cosine(a: Counter, b: Counter) -> float:
    if not a or not b:
        return 0.0
    dot = sum(cnt * b[lemma] for lemma, cnt in a.items() if lemma in b)
    na = math.sqrt(sum(c * c for c in a.values()))
    nb = math.sqrt(sum(c * c for c in b.values()))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return dot / (na * nb)


# ---------------------------------------------------------------------------
# semantic features (SF01-SF10)


def semantic_features(
    doc: ProcessedDoc,
    title: str | None,
    provider,
    sentence_vectors: list[np.ndarray] | None = None,
) -> tuple[list[float], set[str]]:
    """The ten SF values plus degenerate-condition flags."""
    flags: set[str] = set()
    vectors = sentence_vectors if sentence_vectors is not None else \
        _sentence_vectors(doc, provider)
    n = len(vectors)
    values = [0.0] * 10

    if n == 0:
        flags.add("empty_doc")
        return values, flags
    if n == 1:
        flags.add("single_sentence")

    if n >= 2:
        adjacent = [cosine_values(vectors[i], vectors[i + 1]) for i in range(n - 1)]
        values[0] = _mean(adjacent)
        values[1] = float(min(adjacent))
        values[2] = float(max(adjacent))
        pairwise = [cosine_values(vectors[i], vectors[j])
                    for i in range(n) for j in range(i + 1, n)]
        values[3] = _mean(pairwise)
        values[4] = _std(pairwise)
        values[5] = cosine_values(vectors[0], vectors[-1])

    if title is None or not title.strip():
        flags.add("no_title")
        title_text = doc.sentences[0].text
    else:
        title_text = title
    title_vec = provider.embed([title_text])[0].values
    title_cos = [cosine_values(v, title_vec) for v in vectors]
    values[6] = _mean(title_cos)
    values[7] = float(max(title_cos))

    word_count = doc.word_count()
    distinct = {e.surface.lower() for e in doc.entities}
    values[8] = float(len(distinct))
    values[9] = 100.0 * len(doc.entities) / word_count if word_count else 0.0
    return values, flags


# ---------------------------------------------------------------------------
# linguistic features (102)


def _overlap_pair(a_list: list[str], b_list: list[str]) -> list[float]:
    a_set, b_set = set(a_list), set(b_list)
    inter = a_set & b_set
    union = a_set | b_set
    jaccard = len(inter) / len(union) if union else 0.0
    fwd = len(inter) / len(a_set) if a_set else 0.0
    bwd = len(inter) / len(b_set) if b_set else 0.0
    smaller = min(len(a_set), len(b_set))
    min_share = len(inter) / smaller if smaller else 0.0
    any_overlap = 1.0 if inter else 0.0
    token_repeat = (sum(1 for lemma in b_list if lemma in a_set) / len(b_list)
                    if b_list else 0.0)
    return [jaccard, fwd, bwd, min_share, any_overlap, token_repeat]


def _overlap_features(class_lemmas: list[list[str]]) -> list[float]:
    """12 values for one token class: 6 stats x {adjacent, window-2}."""
    n = len(class_lemmas)
    out = []
    for seg in _OVERLAP_SEGMENTS:
        pair_stats = []
        for i in range(n - 1):
            first = class_lemmas[i]
            if seg == "adj":
                second = class_lemmas[i + 1]
            else:
                second = class_lemmas[i + 1] + (
                    class_lemmas[i + 2] if i + 2 < n else [])
            pair_stats.append(_overlap_pair(first, second))
        if pair_stats:
            out.extend(_mean(col) for col in zip(*pair_stats))
        else:
            out.extend([0.0] * len(_OVERLAP_STATS))
    return out


def _mattr(surfaces: list[str], window: int = 50) -> float:
    n = len(surfaces)
    if n == 0:
        return 0.0
    if n < window:
        return len(set(surfaces)) / n
    ratios = [len(set(surfaces[i:i + window])) / window
              for i in range(n - window + 1)]
    return _mean(ratios)


def linguistic_features(
    doc: ProcessedDoc,
    lexicons: dict[str, Lexicon],
    provider,
    sentence_vectors: list[np.ndarray] | None = None,
) -> tuple[list[float], set[str]]:
    """The 102 LF values plus degenerate-condition flags."""
    flags: set[str] = set()
    n_sent = len(doc.sentences)
    if n_sent == 0:
        flags.add("empty_doc")
        return [0.0] * 102, flags
    if n_sent == 1:
        flags.add("single_sentence")

    sent_words = [[t for t in s.tokens if t.is_word] for s in doc.sentences]
    words = [t for ws in sent_words for t in ws]
    n_words = len(words)

    entity_token_idx = [
        {i for e in doc.entities if e.sentence == si for i in range(e.first, e.last)}
        for si in range(n_sent)
    ]

    values: list[float] = []

    # (a) lexical overlap: 4 classes x 2 segments x 6 stats
    class_lists = {
        "all": [[t.lemma for t in ws] for ws in sent_words],
        "content": [[t.lemma for t in ws if t.word_class == CONTENT]
                    for ws in sent_words],
        "function": [[t.lemma for t in ws if t.word_class == FUNCTION]
                     for ws in sent_words],
        "entity": [[t.lemma for ti, t in enumerate(s.tokens)
                    if ti in entity_token_idx[si]]
                   for si, s in enumerate(doc.sentences)],
    }
    for cls in _OVERLAP_CLASSES:
        values.extend(_overlap_features(class_lists[cls]))

    # (b) type-token ratios
    surfaces = [t.surface for t in words]
    lemmas = [t.lemma for t in words]
    content_surfaces = [t.surface for t in words if t.word_class == CONTENT]
    function_surfaces = [t.surface for t in words if t.word_class == FUNCTION]
    lemma_counts = Counter(lemmas)
    hapax = sum(1 for c in lemma_counts.values() if c == 1)

    def ttr(items: list[str]) -> float:
        return len(set(items)) / len(items) if items else 0.0

    bigrams = list(zip(lemmas, lemmas[1:]))
    trigrams = list(zip(lemmas, lemmas[1:], lemmas[2:]))
    values.append(ttr(surfaces))
    values.append(ttr(content_surfaces))
    values.append(ttr(function_surfaces))
    values.append(ttr(lemmas))
    values.append(ttr(bigrams))
    values.append(ttr(trigrams))
    values.append(len(set(surfaces)) / math.sqrt(n_words) if n_words else 0.0)
    values.append(math.log(len(set(surfaces))) / math.log(n_words)
                  if n_words > 1 else 0.0)
    values.append(_mattr(surfaces))
    values.append(hapax / n_words if n_words else 0.0)
    values.append(hapax / len(lemma_counts) if lemma_counts else 0.0)
    values.append(_mean(len(s) for s in surfaces))

    # (c) connectives: 8 classes x (count, density, sentence-initial)
    for cls in CONNECTIVE_CLASSES:
        lex = lexicons[f"connective_{cls}"]
        count, density = match_count(doc, lex)
        initial = 0
        for ws in sent_words:
            if ws and match_at(match_keys(ws, lex.match_mode), lex, 0):
                initial += 1
        values.extend([float(count), density, float(initial)])

    # (d) givenness
    pronoun_count, pronoun_density = match_count(doc, lexicons["pronoun"])
    _, demonstrative_density = match_count(doc, lexicons["demonstrative"])
    definite = sum(1 for t in words if t.surface == "the")
    content_tokens = [t for t in words if t.word_class == CONTENT]
    seen: set[str] = set()
    repeated = 0
    first_mentions = 0
    for t in content_tokens:
        if t.lemma in seen:
            repeated += 1
        else:
            first_mentions += 1
            seen.add(t.lemma)
    stop_count = sum(1 for t in words if t.is_stopword)
    func_count = sum(1 for t in words if t.word_class == FUNCTION)
    lengths = [len(ws) for ws in sent_words]
    values.append(pronoun_density)
    values.append(100.0 * definite / n_words if n_words else 0.0)
    values.append(demonstrative_density)
    values.append(repeated / len(content_tokens) if content_tokens else 0.0)
    values.append(pronoun_count / len(content_tokens) if content_tokens else 0.0)
    values.append(first_mentions / n_words if n_words else 0.0)
    values.append(100.0 * stop_count / n_words if n_words else 0.0)
    values.append(func_count / n_words if n_words else 0.0)
    values.append(_mean(lengths))
    values.append(_std(lengths))

    # (e) document cohesion (the LSA substitute)
    tf = [Counter(t.lemma for t in ws) for ws in sent_words]
    doc_tf = Counter(lemmas)
    if n_sent >= 2:
        vectors = sentence_vectors if sentence_vectors is not None else \
            _sentence_vectors(doc, provider)
        centroid = np.mean(np.stack(vectors), axis=0)
        centroid_cos = [cosine_values(v, centroid) for v in vectors]
        adjacent = [cosine_values(vectors[i], vectors[i + 1])
                    for i in range(n_sent - 1)]
        adj_tf = [_tf_cosine(tf[i], tf[i + 1]) for i in range(n_sent - 1)]
        pair_tf = [_tf_cosine(tf[i], tf[j])
                   for i in range(n_sent) for j in range(i + 1, n_sent)]
        gaps = [abs(adjacent[i + 1] - adjacent[i]) for i in range(len(adjacent) - 1)]
        values.append(_mean(centroid_cos))
        values.append(float(min(centroid_cos)))
        values.append(_std(centroid_cos))
        values.append(_mean(adj_tf))
        values.append(math.sqrt(sum(c * c for c in doc_tf.values())))
        values.append(_mean([1.0 if c > 0.5 else 0.0 for c in adjacent]))
        values.append(float(max(gaps)) if gaps else 0.0)
        values.append(_mean(pair_tf))
    else:
        values.extend([0.0, 0.0, 0.0, 0.0,
                       math.sqrt(sum(c * c for c in doc_tf.values())), 0.0, 0.0, 0.0])

    if len(values) != 102:
        raise InputError(f"linguistic feature vector has {len(values)} entries")
    return values, flags


# ---------------------------------------------------------------------------
# matrix extraction


@dataclass(frozen=True)
class FeatureMatrix:
    doc_ids: tuple[str, ...]
    labels: np.ndarray                  # 0 = human, 1 = generated
    values: np.ndarray                  # rows follow corpus order
    feature_ids: tuple[str, ...]
    registry_version: str
    provider_id: str
    flags: dict[str, tuple[str, ...]]   # doc id -> degenerate flags

    def column_subset(self, feature_ids: list[str]) -> "FeatureMatrix":
        index = {fid: i for i, fid in enumerate(self.feature_ids)}
        missing = [fid for fid in feature_ids if fid not in index]
        if missing:
            raise InputError(f"features not in matrix: {missing}")
        cols = [index[fid] for fid in feature_ids]
        return FeatureMatrix(
            doc_ids=self.doc_ids, labels=self.labels,
            values=self.values[:, cols], feature_ids=tuple(feature_ids),
            registry_version=self.registry_version,
            provider_id=self.provider_id, flags=self.flags)

    def to_csv(self, path: str | Path) -> None:
        path = Path(path)
        with path.open("w", encoding="utf-8", newline="") as fh:
            fh.write("doc_id,label," + ",".join(self.feature_ids) + "\n")
            for i, doc_id in enumerate(self.doc_ids):
                row = ",".join(f"{v:.9g}" for v in self.values[i])
                fh.write(f"{doc_id},{int(self.labels[i])},{row}\n")


def load_matrix_csv(path: str | Path) -> FeatureMatrix:
    """Read a matrix produced by :meth:`FeatureMatrix.to_csv`."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"matrix file not found: {path}")
    with path.open(encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split(",")
        if header[:2] != ["doc_id", "label"]:
            raise InputError(f"{path}: not a feature matrix (bad header)")
        feature_ids = tuple(header[2:])
        doc_ids, labels, rows = [], [], []
        for lineno, line in enumerate(fh, start=2):
            parts = line.rstrip("\n").split(",")
            if len(parts) != len(header):
                raise InputError(f"{path}:{lineno}: expected {len(header)} fields")
            doc_ids.append(parts[0])
            labels.append(int(parts[1]))
            rows.append([float(x) for x in parts[2:]])
    return FeatureMatrix(
        doc_ids=tuple(doc_ids), labels=np.array(labels, dtype=np.int64),
        values=np.array(rows, dtype=np.float64), feature_ids=feature_ids,
        registry_version=REGISTRY_VERSION, provider_id="", flags={})


# Worker-process state for parallel extraction; initialized once per worker.
_WORKER: dict = {}


def _init_worker(provider_config: ProviderConfig, lexicon_dir: str | None) -> None:
    _WORKER["processor"] = TextProcessor()
    _WORKER["provider"] = make_provider(provider_config)
    _WORKER["lexicons"] = load_lexicon_set(lexicon_dir)


def _extract_one(args: tuple[str, str, str]) -> tuple[list[float] | None, list[str], str | None]:
    """(values, flags, error) for one document; provider failures are
    reported, not raised, so the batch can finish."""
    doc_id, title, abstract = args
    processor: TextProcessor = _WORKER["processor"]
    provider = _WORKER["provider"]
    lexicons = _WORKER["lexicons"]
    try:
        processed = processor.process(abstract)
        vectors = _sentence_vectors(processed, provider)
        sf, sf_flags = semantic_features(processed, title, provider, vectors)
        lf, lf_flags = linguistic_features(processed, lexicons, provider, vectors)
        hbh = hbh_features(processed, lexicons["hedge"], lexicons["booster"],
                           lexicons["hype"])
    except ProviderError as exc:
        return None, [], f"{doc_id}: {exc}"
    return sf + lf + hbh, sorted(sf_flags | lf_flags), None


def extract_matrix(
    corpus: Corpus,
    registry: FeatureRegistry | None = None,
    selection: list[str] | None = None,
    provider_config: ProviderConfig | None = None,
    lexicon_dir: str | Path | None = None,
    jobs: int = 1,
) -> FeatureMatrix:
    """Feature matrix for a corpus: rows in corpus order, columns in
    registry order (optionally restricted to ``selection``)."""
    if len(corpus) == 0:
        raise InputError("cannot extract features from an empty corpus")
    registry = registry or DEFAULT_REGISTRY
    validate_registry(registry)
    all_ids = registry.feature_ids()
    if selection is None:
        selection = all_ids
    else:
        unknown = [fid for fid in selection if fid not in set(all_ids)]
        if unknown:
            raise InputError(f"selection outside registry: {unknown}")
        selection = [fid for fid in all_ids if fid in set(selection)]
    provider_config = provider_config or ProviderConfig()
    lexicon_dir = str(lexicon_dir) if lexicon_dir is not None else None

    tasks = [(doc.id, doc.title, doc.abstract) for doc in corpus]
    if jobs <= 1:
        _init_worker(provider_config, lexicon_dir)
        results = [_extract_one(task) for task in tasks]
    else:
        with ProcessPoolExecutor(
                max_workers=jobs, initializer=_init_worker,
                initargs=(provider_config, lexicon_dir)) as pool:
            results = list(pool.map(_extract_one, tasks, chunksize=8))

    failures = [err for _, _, err in results if err is not None]
    if failures:
        raise ProviderError(
            "feature extraction failed for documents: " + "; ".join(failures))
    rows = [values for values, _, _ in results]
    flag_list = [flags for _, flags, _ in results]

    values = np.array(rows, dtype=np.float64)
    if not np.all(np.isfinite(values)):
        bad = [corpus[i].id for i in
               np.nonzero(~np.isfinite(values).all(axis=1))[0]]
        raise InputError(f"non-finite feature values for documents: {bad}")
    matrix = FeatureMatrix(
        doc_ids=tuple(doc.id for doc in corpus),
        labels=np.array([1 if d.label == GENERATED else 0 for d in corpus],
                        dtype=np.int64),
        values=values,
        feature_ids=tuple(all_ids),
        registry_version=registry.version,
        provider_id=make_provider(provider_config).provider_id,
        flags={doc.id: tuple(flags)
               for doc, flags in zip(corpus, flag_list) if flags},
    )
    if selection != all_ids:
        matrix = matrix.column_subset(selection)
    return matrix
