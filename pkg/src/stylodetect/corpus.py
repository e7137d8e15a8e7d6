"""Load, validate, describe and split labeled abstract corpora.

JSONL is the canonical interchange format (one object per line with keys
id, title, abstract, keywords, label, source); CSV with the same header
is accepted for spreadsheet-style exports, with keywords carried as a
semicolon-separated field.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InputError
from .textproc import TextProcessor

HUMAN = "human"
GENERATED = "generated"
LABELS = (HUMAN, GENERATED)

_REQUIRED_KEYS = ("id", "title", "abstract", "label")


@dataclass(frozen=True)
class Document:
    id: str
    title: str
    abstract: str
    keywords: tuple[str, ...]
    label: str
    source: str = ""

    def __post_init__(self):
        if not self.abstract.strip():
            raise InputError(f"document {self.id!r}: abstract is empty")
        if self.label not in LABELS:
            raise InputError(f"document {self.id!r}: unknown label {self.label!r}")


class Corpus:
    """Immutable ordered collection of documents with unique ids."""

    def __init__(self, documents: list[Document]):
        self.documents = tuple(documents)
        self._by_id: dict[str, Document] = {}
        for doc in self.documents:
            if doc.id in self._by_id:
                raise InputError(f"duplicate document id: {doc.id!r}")
            self._by_id[doc.id] = doc

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    def __getitem__(self, i):
        return self.documents[i]

    def get(self, doc_id: str) -> Document:
        return self._by_id[doc_id]

    def class_counts(self) -> dict[str, int]:
        counts = {HUMAN: 0, GENERATED: 0}
        for doc in self.documents:
            counts[doc.label] += 1
        return counts

    def source_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for doc in self.documents:
            counts[doc.source] = counts.get(doc.source, 0) + 1
        return dict(sorted(counts.items()))


def _normalize_row(row: dict, index: int, require_label: bool) -> Document:
    for key in _REQUIRED_KEYS:
        if key == "label" and not require_label:
            continue
        if key not in row or row[key] is None or str(row[key]) == "":
            raise InputError(f"row {index}: missing key {key!r}")
    label = str(row.get("label", HUMAN)).strip().lower()
    if require_label and label not in LABELS:
        raise InputError(f"row {index}: unknown label {row['label']!r}")
    keywords = row.get("keywords") or []
    if isinstance(keywords, str):
        keywords = [k.strip() for k in keywords.split(";") if k.strip()]
    if not isinstance(keywords, list) or not all(isinstance(k, str) for k in keywords):
        raise InputError(f"row {index}: keywords must be a list of strings")
    try:
        return Document(
            id=str(row["id"]),
            title=str(row["title"]),
            abstract=str(row["abstract"]),
            keywords=tuple(keywords),
            label=label if require_label else (label if label in LABELS else HUMAN),
            source=str(row.get("source") or ""),
        )
    except InputError as exc:
        raise InputError(f"row {index}: {exc}") from None


def load_corpus(path: str | Path, format: str = "jsonl",
                require_label: bool = True) -> Corpus:
    """Materialize a corpus file; row order preserved, labels lowercased.

    ``require_label=False`` admits unlabeled rows for prediction input
    (their label field is ignored).
    """
    path = Path(path)
    if not path.exists():
        raise InputError(f"corpus file not found: {path}")
    if format not in ("jsonl", "csv"):
        raise InputError(f"unknown corpus format: {format!r}")
    documents = []
    if format == "jsonl":
        with path.open(encoding="utf-8") as fh:
            for index, line in enumerate(fh):
                if not line.strip():
                    continue
                try:
                    row = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise InputError(f"row {index}: malformed JSON ({exc.msg})") from None
                if not isinstance(row, dict):
                    raise InputError(f"row {index}: expected an object")
                documents.append(_normalize_row(row, index, require_label))
    else:
        with path.open(encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise InputError(f"{path}: empty CSV file")
            for index, row in enumerate(reader):
                documents.append(_normalize_row(row, index, require_label))
    return Corpus(documents)


# ---------------------------------------------------------------------------
# corpus statistics (Table-1-style metrics)


@dataclass(frozen=True)
class ClassStats:
    documents: int
    sentence_count: int
    word_count: int
    unique_word_count: int
    stopword_count: int

    @property
    def mean_sentence_length(self) -> float:
        """Word tokens per sentence."""
        return self.word_count / self.sentence_count if self.sentence_count else 0.0

    def __post_init__(self):
        if min(self.documents, self.sentence_count, self.word_count,
               self.unique_word_count, self.stopword_count) < 0:
            raise InputError("class statistics must be non-negative")
        if self.unique_word_count > self.word_count:
            raise InputError("unique word count exceeds word count")


@dataclass(frozen=True)
class CorpusStats:
    per_class: dict[str, ClassStats]


def corpus_stats(corpus: Corpus, processor: TextProcessor | None = None) -> CorpusStats:
    """Sentence/word/stopword aggregates per class using the pipeline's own
    tokenizer and segmenter. Words are alphabetic tokens only."""
    if len(corpus) == 0:
        raise InputError("corpus is empty")
    proc = processor or TextProcessor()
    agg = {
        label: {"documents": 0, "sentences": 0, "words": 0,
                "stopwords": 0, "vocab": set()}
        for label in LABELS
    }
    for doc in corpus:
        processed = proc.process(doc.abstract)
        a = agg[doc.label]
        a["documents"] += 1
        a["sentences"] += len(processed.sentences)
        for tok in processed.word_tokens():
            a["words"] += 1
            a["vocab"].add(tok.surface)
            if tok.is_stopword:
                a["stopwords"] += 1
    per_class = {}
    for label, a in agg.items():
        per_class[label] = ClassStats(
            documents=a["documents"],
            sentence_count=a["sentences"],
            word_count=a["words"],
            unique_word_count=len(a["vocab"]),
            stopword_count=a["stopwords"],
        )
    return CorpusStats(per_class=per_class)


RATIO_METRICS = (
    ("sentences", "# Sentences"),
    ("words", "# Words"),
    ("unique_words", "# Unique Words"),
    ("stopwords", "# Stopwords"),
    ("sentence_length", "Sentence Length"),
)


@dataclass(frozen=True)
class RatioTable:
    """Human-to-generated ratios of the five dataset metrics, in the fixed
    row order (# Sentences, # Words, # Unique Words, # Stopwords,
    Sentence Length). Count metrics are compared as per-document means."""

    ratios: dict[str, float]

    def rows(self) -> list[tuple[str, float]]:
        return [(label, self.ratios[key]) for key, label in RATIO_METRICS]

    def to_text(self) -> str:
        width = max(len(label) for _, label in RATIO_METRICS)
        lines = [f"{'Metric'.ljust(width)}  AA/CGA"]
        for label, value in self.rows():
            lines.append(f"{label.ljust(width)}  {value:.4f}")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        lines = ["metric,ratio"]
        for key, _ in RATIO_METRICS:
            lines.append(f"{key},{self.ratios[key]:.6f}")
        return "\n".join(lines) + "\n"


def ratio_report(stats: CorpusStats) -> RatioTable:
    """Per-metric ratio of the human class to the generated class."""
    human = stats.per_class.get(HUMAN)
    generated = stats.per_class.get(GENERATED)
    for label, cls in ((HUMAN, human), (GENERATED, generated)):
        if cls is None or cls.documents == 0:
            raise InputError(f"ratio report requires documents of class {label!r}")

    def mean(cls: ClassStats, attr: str) -> float:
        return getattr(cls, attr) / cls.documents

    ratios = {}
    for key, attr in (("sentences", "sentence_count"), ("words", "word_count"),
                      ("unique_words", "unique_word_count"),
                      ("stopwords", "stopword_count")):
        denom = mean(generated, attr)
        if denom == 0:
            raise InputError(f"zero generated-class denominator for {key}")
        ratios[key] = mean(human, attr) / denom
    if generated.mean_sentence_length == 0:
        raise InputError("zero generated-class denominator for sentence_length")
    ratios["sentence_length"] = human.mean_sentence_length / generated.mean_sentence_length
    return RatioTable(ratios=ratios)


# ---------------------------------------------------------------------------
# stratified fold assignment


@dataclass(frozen=True)
class FoldAssignment:
    k: int
    fold_of: dict[str, int]
    seed: int

    def fold_ids(self, fold: int) -> list[str]:
        return [doc_id for doc_id, f in self.fold_of.items() if f == fold]


def split_stratified(corpus: Corpus, k: int, seed: int) -> FoldAssignment:
    """Deterministic stratified folds.

    Rule: per class, sort ids lexicographically, permute with PCG64 keyed
    by (seed, class index), deal round-robin into folds. Per-fold class
    counts are therefore within one document of the global proportion.
    """
    if k < 2:
        raise InputError(f"k must be >= 2, got {k}")
    fold_of: dict[str, int] = {}
    for class_index, label in enumerate(LABELS):
        ids = sorted(doc.id for doc in corpus if doc.label == label)
        if len(ids) < k:
            raise InputError(
                f"class {label!r} has {len(ids)} documents, fewer than k={k}")
        rng = np.random.Generator(np.random.PCG64(
            np.random.SeedSequence(entropy=seed & (2**64 - 1),
                                   spawn_key=(class_index,))))
        order = rng.permutation(len(ids))
        for position, index in enumerate(order):
            fold_of[ids[index]] = position % k
    return FoldAssignment(k=k, fold_of=fold_of, seed=seed)


# ---------------------------------------------------------------------------
# generation prompt (for building new generated-class corpora)

_PROMPT_WITH_KEYWORDS = (
    "Write a scientific abstract for the paper entitled {title} using the "
    "keywords {keywords}. Response length must contain at least {n} tokens."
)
_PROMPT_NO_KEYWORDS = (
    "Write a scientific abstract for the paper entitled {title}. "
    "Response length must contain at least {n} tokens."
)


def render_generation_prompt(title: str, keywords: list[str], n_words: int) -> str:
    """The abstract-generation prompt; the keywords clause is omitted when
    no keywords are supplied."""
    if not title.strip():
        raise InputError("prompt requires a non-empty title")
    if n_words <= 0:
        raise InputError(f"word budget must be positive, got {n_words}")
    if keywords:
        return _PROMPT_WITH_KEYWORDS.format(
            title=title, keywords=", ".join(keywords), n=n_words)
    return _PROMPT_NO_KEYWORDS.format(title=title, n=n_words)
