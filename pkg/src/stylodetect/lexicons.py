"""Categorized word/phrase lists and the matcher they share.

A lexicon matches either token surfaces or lemmas. Multiword entries are
matched greedily, longest entry first, without overlap, over the word
tokens of one sentence at a time (matches never cross sentence
boundaries, and punctuation/numeral tokens are transparent to counting
but break nothing: matching runs on the word-token sequence).

Lemma-mode entries are normalized through the same lemmatizer the
tokenizer uses, so both sides of a comparison live in the same space.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from ._data import data_path, read_wordlist
from .errors import InputError
from .textproc import ProcessedDoc, lemmatize

SURFACE = "surface"
LEMMA = "lemma"

CATEGORIES = frozenset({
    "hedge", "booster", "hype",
    "connective_additive", "connective_causal", "connective_adversative",
    "connective_temporal", "connective_exemplifying", "connective_conclusive",
    "connective_conditional", "connective_purpose",
    "stopword", "pronoun", "demonstrative",
})

CONNECTIVE_CLASSES = (
    "additive", "causal", "adversative", "temporal",
    "exemplifying", "conclusive", "conditional", "purpose",
)

_DEFAULT_FILES = {
    "hedge": ("hedges.txt", SURFACE),
    "booster": ("boosters.txt", SURFACE),
    "hype": ("hype_lemmas.txt", LEMMA),
    "stopword": ("stopwords.txt", SURFACE),
    "pronoun": ("pronouns.txt", SURFACE),
    "demonstrative": ("demonstratives.txt", SURFACE),
}
for _cls in CONNECTIVE_CLASSES:
    _DEFAULT_FILES[f"connective_{_cls}"] = (f"connectives_{_cls}.txt", LEMMA)


@dataclass
class Lexicon:
    category: str
    entries: frozenset[str]
    match_mode: str
    # first word -> entry word-tuples, longest first (built once, read-only)
    _index: dict = field(init=False, repr=False)

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise InputError(f"unknown lexicon category: {self.category!r}")
        if self.match_mode not in (SURFACE, LEMMA):
            raise InputError(f"unknown match mode: {self.match_mode!r}")
        if not self.entries:
            raise InputError(f"lexicon {self.category!r} has no entries")
        index: dict[str, list[tuple[str, ...]]] = {}
        for entry in self.entries:
            words = tuple(entry.split())
            index.setdefault(words[0], []).append(words)
        for variants in index.values():
            variants.sort(key=lambda w: (-len(w), w))
        self._index = index

    def __len__(self) -> int:
        return len(self.entries)


def load_lexicon(path: str | Path, category: str, match_mode: str) -> Lexicon:
    """Load one lexicon file: one entry per line, '#' comments, lowercase."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"lexicon file not found: {path}")
    raw = read_wordlist(path)
    if not raw:
        raise InputError(f"lexicon file is empty: {path}")
    if match_mode == LEMMA:
        raw = [" ".join(lemmatize(w) for w in entry.split()) for entry in raw]
    return Lexicon(category=category, entries=frozenset(raw), match_mode=match_mode)


def default_lexicon(category: str) -> Lexicon:
    """The bundled lexicon for a category, with its documented match mode."""
    try:
        name, mode = _DEFAULT_FILES[category]
    except KeyError:
        raise InputError(f"no bundled lexicon for category: {category!r}") from None
    return load_lexicon(data_path(name), category, mode)


def default_lexicon_set() -> dict[str, Lexicon]:
    """All bundled lexicons keyed by category."""
    return {category: default_lexicon(category) for category in _DEFAULT_FILES}


def load_lexicon_set(directory: str | Path | None = None) -> dict[str, Lexicon]:
    """Bundled lexicons, with per-file overrides from ``directory`` (files
    named like the bundled ones, e.g. hedges.txt) when present."""
    if directory is None:
        return default_lexicon_set()
    directory = Path(directory)
    out = {}
    for category, (name, mode) in _DEFAULT_FILES.items():
        candidate = directory / name
        if candidate.exists():
            out[category] = load_lexicon(candidate, category, mode)
        else:
            out[category] = default_lexicon(category)
    return out


# ---------------------------------------------------------------------------
# matching


def match_keys(tokens, mode: str) -> list[str]:
    if mode == LEMMA:
        return [t.lemma for t in tokens]
    return [t.surface for t in tokens]


def match_at(keys: list[str], lexicon: Lexicon, pos: int) -> int:
    """Length (in words) of the longest lexicon entry starting at ``pos``,
    or 0 when nothing matches."""
    for words in lexicon._index.get(keys[pos], ()):
        if len(words) <= len(keys) - pos and tuple(keys[pos:pos + len(words)]) == words:
            return len(words)
    return 0


def match_count(doc: ProcessedDoc, lexicon: Lexicon) -> tuple[int, float]:
    """(match count, matches per 100 word tokens) for one document."""
    count = 0
    total_words = 0
    for sent in doc.sentences:
        words = [t for t in sent.tokens if t.is_word]
        total_words += len(words)
        keys = match_keys(words, lexicon.match_mode)
        i = 0
        while i < len(keys):
            step = match_at(keys, lexicon, i)
            if step:
                count += 1
                i += step
            else:
                i += 1
    density = 100.0 * count / total_words if total_words else 0.0
    return count, density


def sentence_initial_count(doc: ProcessedDoc, lexicon: Lexicon) -> int:
    """Number of sentences whose first word tokens match a lexicon entry."""
    count = 0
    for sent in doc.sentences:
        words = [t for t in sent.tokens if t.is_word]
        if words and match_at(match_keys(words, lexicon.match_mode), lexicon, 0):
            count += 1
    return count


def hbh_features(
    doc: ProcessedDoc,
    hedge: Lexicon,
    booster: Lexicon,
    hype: Lexicon,
) -> list[float]:
    """[hedge density, booster density, hype density], fixed order."""
    return [
        match_count(doc, hedge)[1],
        match_count(doc, booster)[1],
        match_count(doc, hype)[1],
    ]
