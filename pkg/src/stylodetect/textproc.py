"""Deterministic sentence segmentation, tokenization, lemmatization and
heuristic entity detection.

Everything here is a pure function of (input text, wordlists): no learned
models, no global state, so documents can be processed concurrently and
re-processing identical input yields byte-identical results.

Word classes are coarse on purpose. A token is `function` when it appears
in the function-word list (the stopword lexicon), `numeral` when its
alphanumeric characters are all digits, `punct` when it has no
alphanumeric characters, and `content` otherwise.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache

from ._data import data_path, read_wordlist

CONTENT = "content"
FUNCTION = "function"
PUNCT = "punct"
NUMERAL = "numeral"

# Alnum runs joined by internal hyphens/apostrophes stay one token
# ("state-of-the-art", "don't"); any other non-space char is punctuation.
_TOKEN_RE = re.compile(r"[A-Za-z0-9]+(?:['’-][A-Za-z0-9]+)*|\S")

_SENT_PUNCT = ".!?"
_CLOSERS = "\"')]”’"


@dataclass(frozen=True)
class Token:
    surface: str          # lowercased form
    raw: str              # original-case form
    lemma: str
    word_class: str       # content | function | punct | numeral
    is_stopword: bool
    start: int            # character span in the original document
    end: int

    @property
    def is_word(self) -> bool:
        """Alphabetic word token; numerals and punctuation excluded."""
        return self.word_class in (CONTENT, FUNCTION)


@dataclass(frozen=True)
class Sentence:
    text: str
    start: int
    tokens: tuple[Token, ...]


@dataclass(frozen=True)
class EntitySpan:
    sentence: int         # sentence index
    first: int            # token index range within the sentence
    last: int             # exclusive
    surface: str


@dataclass(frozen=True)
class ProcessedDoc:
    sentences: tuple[Sentence, ...]
    entities: tuple[EntitySpan, ...] = field(default=())

    def word_tokens(self) -> list[Token]:
        return [t for s in self.sentences for t in s.tokens if t.is_word]

    def word_count(self) -> int:
        return sum(1 for s in self.sentences for t in s.tokens if t.is_word)

    def to_dict(self) -> dict:
        return {
            "sentences": [
                {
                    "text": s.text,
                    "start": s.start,
                    "tokens": [
                        [t.surface, t.raw, t.lemma, t.word_class,
                         int(t.is_stopword), t.start, t.end]
                        for t in s.tokens
                    ],
                }
                for s in self.sentences
            ],
            "entities": [
                [e.sentence, e.first, e.last, e.surface] for e in self.entities
            ],
        }


# ---------------------------------------------------------------------------
# sentence segmentation


@lru_cache(maxsize=1)
def default_abbreviations() -> frozenset[str]:
    return frozenset(read_wordlist(data_path("abbreviations.txt")))


def _blocked_by_abbreviation(text: str, dot: int, abbreviations: frozenset[str]) -> bool:
    """True when the period at ``dot`` ends a known abbreviation."""
    tail = text[max(0, dot - 24): dot + 1].lower()
    for abbr in abbreviations:
        if not tail.endswith(abbr):
            continue
        before = dot - len(abbr)
        if before < 0 or not (text[before].isalnum() or text[before] in "'-"):
            return True
    return False


def _segment_spans(text: str, abbreviations: frozenset[str]) -> list[tuple[int, int]]:
    spans: list[tuple[int, int]] = []
    start = 0
    n = len(text)
    i = 0
    while i < n:
        if text[i] in _SENT_PUNCT:
            j = i + 1
            while j < n and text[j] in _SENT_PUNCT:   # "?!" runs
                j += 1
            while j < n and text[j] in _CLOSERS:
                j += 1
            k = j
            while k < n and text[k].isspace():
                k += 1
            boundary = k == n or (k > j and text[k].isupper())
            if boundary and text[i] == "." and k < n:
                boundary = not _blocked_by_abbreviation(text, i, abbreviations)
            if boundary:
                if text[start:j].strip():
                    spans.append((start, j))
                start = k
                i = k
                continue
        i += 1
    if start < n and text[start:].strip():
        spans.append((start, n))
    trimmed = []
    for a, b in spans:
        while a < b and text[a].isspace():
            a += 1
        while b > a and text[b - 1].isspace():
            b -= 1
        if a < b:
            trimmed.append((a, b))
    return trimmed


def segment_sentences(text: str, abbreviations: frozenset[str] | None = None) -> list[str]:
    """Split text into sentences on ./!/? followed by whitespace and an
    uppercase letter; the abbreviation list blocks false splits."""
    if abbreviations is None:
        abbreviations = default_abbreviations()
    return [text[a:b] for a, b in _segment_spans(text, abbreviations)]


# ---------------------------------------------------------------------------
# tokenization


def tokenize(sentence: str) -> list[str]:
    """Lowercased token surfaces; see module docstring for the rules."""
    return [m.group(0).lower() for m in _TOKEN_RE.finditer(sentence)]


def _classify(surface: str, function_words: frozenset[str]) -> str:
    alnum = [c for c in surface if c.isalnum()]
    if not alnum:
        return PUNCT
    if all(c.isdigit() for c in alnum):
        return NUMERAL
    if surface in function_words:
        return FUNCTION
    return CONTENT


# ---------------------------------------------------------------------------
# lemmatization

_LEMMA_EXCEPTIONS = {
    "is": "be", "are": "be", "was": "be", "were": "be", "been": "be",
    "being": "be", "am": "be",
    "has": "have", "had": "have", "having": "have",
    "does": "do", "did": "do", "done": "do", "doing": "do",
    "goes": "go", "went": "go", "gone": "go", "going": "go",
    "made": "make", "making": "make",
    "given": "give", "gives": "give", "gave": "give", "giving": "give",
    "taken": "take", "takes": "take", "took": "take", "taking": "take",
    "shown": "show", "showed": "show",
    "seen": "see", "sees": "see", "saw": "see", "seeing": "see",
    "found": "find", "used": "use", "using": "use", "uses": "use",
    "men": "man", "women": "woman", "children": "child",
    "mice": "mouse", "feet": "foot", "teeth": "tooth",
    "better": "good", "best": "good", "worse": "bad", "worst": "bad",
    "built": "build", "said": "say", "wrote": "write", "written": "write",
    "held": "hold", "kept": "keep", "led": "lead", "left": "leave",
    "met": "meet", "ran": "run", "running": "run", "grew": "grow",
    "grown": "grow", "drawn": "draw", "drew": "draw", "chosen": "choose",
    "chose": "choose", "rose": "rise", "risen": "rise", "fell": "fall",
    "fallen": "fall", "became": "become", "begun": "begin", "began": "begin",
    "brought": "bring", "sought": "seek", "thought": "think",
    "underlying": "underlie", "lying": "lie",
}

# never suffix-strip these (false plurals, -ing nouns, short forms)
_PROTECTED = frozenset({
    "during", "thing", "nothing", "something", "anything", "everything",
    "morning", "evening", "spring", "string", "bring", "sing", "king",
    "wing", "ring", "its", "this", "thus", "gas", "bias", "lens", "news",
    "species", "series", "analysis", "basis", "thesis", "hypothesis",
    "synthesis", "crisis", "axis", "corpus", "focus", "status", "versus",
    "alias", "atlas", "canvas", "iris", "campus", "virus", "bonus",
    "census", "consensus", "calculus", "nucleus", "stimulus", "syllabus",
    "tennis", "emphasis", "less", "unless", "physics", "mathematics",
    "statistics", "dynamics", "semantics", "pragmatics", "robotics",
    "genomics", "economics", "electronics", "metrics", "yes", "plus",
    "minus", "always", "perhaps", "whereas", "across", "process",
    "address", "access", "class", "loss", "gross", "bus",
})

# stems that lost a final 'e' to -ed/-ing stripping
_E_RESTORE = frozenset({
    "mak", "tak", "us", "stat", "provid", "describ", "compar", "combin",
    "requir", "produc", "reduc", "increas", "decreas", "analyz", "analys",
    "propos", "demonstrat", "evaluat", "estimat", "generat", "improv",
    "achiev", "observ", "not", "induc", "deriv", "captur", "measur",
    "includ", "involv", "introduc", "examin", "explor", "determin",
    "defin", "outlin", "leverag", "enabl", "utiliz", "optimiz", "minimiz",
    "maximiz", "argu", "comput", "integrat", "evolv", "solv", "sampl",
    "scal", "stor", "shar", "sav", "serv", "prov", "rang", "chang",
    "manag", "incorporat", "illustrat", "indicat", "investigat", "isolat",
    "iterat", "motivat", "navigat", "operat", "regulat", "relat",
    "separat", "simulat", "translat", "updat", "validat", "valu", "imag",
    "engag", "encod", "decod", "embedd", "fus", "pars", "compris",
    "accelerat", "mitigat", "aggregat", "approximat", "calibrat",
    "enhanc", "advanc", "facilitat", "promis", "excit", "streamlin",
    "redefin", "reshap", "revolutioniz", "pav", "iterat",
})

_DOUBLES = ("bb", "dd", "gg", "mm", "nn", "pp", "rr", "tt")


def _repair_stem(stem: str) -> str:
    if stem in _E_RESTORE:
        return stem + "e"
    if len(stem) >= 3 and stem[-2:] in _DOUBLES:
        return stem[:-1]
    return stem


def _lemma_step(w: str) -> str:
    if w in _LEMMA_EXCEPTIONS:
        return _LEMMA_EXCEPTIONS[w]
    if w in _PROTECTED or len(w) <= 3:
        return w
    if w.endswith("ies") and len(w) >= 5:
        return w[:-3] + "y"
    for suf in ("sses", "shes", "ches", "xes", "zes", "oes"):
        if w.endswith(suf):
            return w[:-2]
    if w.endswith("s") and not w.endswith(("ss", "us", "is", "'s")):
        return w[:-1]
    if w.endswith("ied") and len(w) >= 5:
        return w[:-3] + "y"
    if w.endswith("eed"):
        return w[:-1]
    if w.endswith("ed") and len(w) >= 5:
        return _repair_stem(w[:-2])
    if w.endswith("ing") and len(w) >= 6:
        return _repair_stem(w[:-3])
    return w


def lemmatize(token: str) -> str:
    """Rule-based lemma; idempotent because rules run to a fixed point."""
    w = token.lower()
    for _ in range(5):
        nxt = _lemma_step(w)
        if nxt == w:
            return w
        w = nxt
    return w


# ---------------------------------------------------------------------------
# entity detection


def _is_acronym(raw: str) -> bool:
    return raw.isalpha() and sum(1 for c in raw if c.isupper()) >= 2


def detect_entities(
    doc: ProcessedDoc,
    stopwords: frozenset[str],
    common_words: frozenset[str],
) -> list[EntitySpan]:
    """Maximal runs of capitalized or all-caps alphabetic tokens.

    Sentence-initial tokens that are stopwords or ordinary common words are
    skipped (they are capitalized for orthographic reasons); acronyms with
    two or more uppercase letters always qualify.
    """
    spans = []
    for si, sent in enumerate(doc.sentences):
        run_start = None
        for ti, tok in enumerate(sent.tokens):
            raw = tok.raw
            ok = False
            if _is_acronym(raw):
                ok = True
            elif raw.isalpha() and raw[0].isupper():
                if ti == 0 and (tok.is_stopword or tok.surface in common_words):
                    ok = False
                else:
                    ok = True
            if ok:
                if run_start is None:
                    run_start = ti
            elif run_start is not None:
                spans.append(_make_span(sent, si, run_start, ti))
                run_start = None
        if run_start is not None:
            spans.append(_make_span(sent, si, run_start, len(sent.tokens)))
    return spans


def _make_span(sent: Sentence, si: int, first: int, last: int) -> EntitySpan:
    surface = " ".join(sent.tokens[i].raw for i in range(first, last))
    return EntitySpan(sentence=si, first=first, last=last, surface=surface)


# ---------------------------------------------------------------------------
# full processing


class TextProcessor:
    """Bundles the wordlists and runs the whole decomposition."""

    def __init__(
        self,
        stopwords: frozenset[str] | None = None,
        common_words: frozenset[str] | None = None,
        abbreviations: frozenset[str] | None = None,
    ):
        self.stopwords = stopwords if stopwords is not None else frozenset(
            read_wordlist(data_path("stopwords.txt")))
        self.common_words = common_words if common_words is not None else frozenset(
            read_wordlist(data_path("common_words.txt")))
        self.abbreviations = (abbreviations if abbreviations is not None
                              else default_abbreviations())

    def process(self, text: str) -> ProcessedDoc:
        sentences = []
        for a, b in _segment_spans(text, self.abbreviations):
            stext = text[a:b]
            tokens = []
            for m in _TOKEN_RE.finditer(stext):
                raw = m.group(0)
                surface = raw.lower()
                word_class = _classify(surface, self.stopwords)
                lemma = lemmatize(surface) if word_class in (CONTENT, FUNCTION) else surface
                tokens.append(Token(
                    surface=surface,
                    raw=raw,
                    lemma=lemma,
                    word_class=word_class,
                    is_stopword=surface in self.stopwords,
                    start=a + m.start(),
                    end=a + m.end(),
                ))
            sentences.append(Sentence(text=stext, start=a, tokens=tuple(tokens)))
        doc = ProcessedDoc(sentences=tuple(sentences))
        entities = detect_entities(doc, self.stopwords, self.common_words)
        return ProcessedDoc(sentences=doc.sentences, entities=tuple(entities))


def count_conjunctions(doc: ProcessedDoc, lexicon) -> int:
    """Total connective-lexicon matches in the document."""
    from .lexicons import match_count

    return match_count(doc, lexicon)[0]
