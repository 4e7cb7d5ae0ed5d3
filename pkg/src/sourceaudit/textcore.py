"""Deterministic text normalization and segmentation.

Produces character-offset-stable paragraphs, sentences, and tokens over a
normalized article body. Everything downstream (quote detection, mention
extraction, attribution) indexes into ``Document.normalized_body``, so the
contract here is strict:

- offsets are Unicode scalar-value indices into ``normalized_body``;
- slicing the body by any recorded range reproduces the segment exactly;
- paragraphs are separated by exactly one blank line (``"\\n\\n"``);
- the body contains straight quotes only and no markup tags.

All functions are pure; identical input yields a byte-identical Document.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime

from . import resources

Range = tuple[int, int]  # half-open [start, end)

# Block-closing tags become paragraph breaks so that tag-delimited paragraphs
# survive whitespace collapsing; every other tag is stripped outright.
_BREAK_TAG_RE = re.compile(r"</(?:p|div|h[1-6]|li|blockquote|tr)\s*>|<br\s*/?>", re.IGNORECASE)
_TAG_RE = re.compile(r"<[^>]*>")
_WS_RUN_RE = re.compile(r"\s+")

_QUOTE_TABLE = str.maketrans({
    "“": '"',  # left double
    "”": '"',  # right double
    "„": '"',  # low double
    "‟": '"',  # high-reversed double
    "«": '"',  # left guillemet
    "»": '"',  # right guillemet
    "‘": "'",  # left single
    "’": "'",  # right single
    "‚": "'",  # low single
    "‛": "'",  # high-reversed single
})

_TERMINALS = ".!?"


@dataclass(frozen=True)
class Sentence:
    range: Range
    paragraph: int


@dataclass(frozen=True)
class Token:
    range: Range
    sentence: int


@dataclass(frozen=True)
class ArticleFields:
    """Metadata accompanying an article body."""

    article_id: str
    site_id: str = ""
    author: str = ""
    title: str = ""
    published_at: datetime | None = None


@dataclass(frozen=True)
class Document:
    article_id: str
    site_id: str
    author: str
    title: str
    published_at: datetime | None
    raw_body: str
    normalized_body: str
    paragraphs: list[Range] = field(default_factory=list)
    sentences: list[Sentence] = field(default_factory=list)
    tokens: list[Token] = field(default_factory=list)

    def slice(self, rng: Range) -> str:
        return self.normalized_body[rng[0]:rng[1]]


def normalize_text(raw: str) -> str:
    """Normalize raw article text for segmentation.

    Markup tags are removed (block-closing tags count as paragraph breaks),
    curly/smart quotes are mapped to their straight equivalents, and
    whitespace runs collapse to single spaces except that runs containing two
    or more newlines become one blank-line paragraph separator. Total and
    idempotent.
    """
    text = _BREAK_TAG_RE.sub("\n\n", raw)
    text = _TAG_RE.sub("", text)
    text = text.translate(_QUOTE_TABLE)

    def collapse(match: re.Match[str]) -> str:
        return "\n\n" if match.group(0).count("\n") >= 2 else " "

    return _WS_RUN_RE.sub(collapse, text).strip()


def quote_delimiter_pairs(text: str, start: int, end: int) -> list[tuple[int, int]]:
    """Pair straight double-quote delimiters inside ``text[start:end]``.

    Delimiters pair up greedily in order (1st with 2nd, 3rd with 4th, ...).
    An opening delimiter with no mate before ``end`` yields the pair
    ``(open_index, end)``; ``close == end`` therefore means "unclosed, runs
    to the paragraph end".
    """
    positions = [i for i in range(start, end) if text[i] == '"']
    pairs = []
    for k in range(0, len(positions) - 1, 2):
        pairs.append((positions[k], positions[k + 1]))
    if len(positions) % 2 == 1:
        pairs.append((positions[-1], end))
    return pairs


def _is_abbreviation(text: str, period_index: int) -> bool:
    j = period_index
    while j > 0 and not text[j - 1].isspace():
        j -= 1
    return text[j:period_index + 1] in resources.abbreviations()


def _sentence_ranges(text: str, para: Range) -> list[Range]:
    start, end = para
    quote_spans = quote_delimiter_pairs(text, start, end)
    boundaries = []
    for i in range(start, end - 2):
        if text[i] not in _TERMINALS:
            continue
        if not (text[i + 1] == " " and text[i + 2].isupper()):
            continue
        if any(lo < i < hi for lo, hi in quote_spans):
            continue
        if text[i] == "." and _is_abbreviation(text, i):
            continue
        boundaries.append(i + 1)

    ranges = []
    sent_start = start
    for cut in boundaries:
        ranges.append((sent_start, cut))
        sent_start = cut + 1  # skip the single separating space
    if sent_start < end:
        ranges.append((sent_start, end))
    return ranges


def _token_ranges(text: str, sent: Range) -> list[Range]:
    out = []
    i, end = sent
    while i < end:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isalnum():
            j = i + 1
            while j < end and text[j].isalnum():
                j += 1
            out.append((i, j))
            i = j
        else:
            out.append((i, i + 1))
            i += 1
    return out


def segment_document(fields: ArticleFields, normalized_body: str,
                     raw_body: str | None = None) -> Document:
    """Segment a normalized body into paragraphs, sentences, and tokens.

    Paragraphs split on blank-line separators. Sentences split after terminal
    punctuation followed by a space and a capital letter, except when the
    period closes a stop-listed abbreviation or the candidate falls inside a
    double-quoted span. Tokens are alphanumeric runs plus single punctuation
    characters.
    """
    paragraphs: list[Range] = []
    cursor = 0
    if normalized_body:
        for part in normalized_body.split("\n\n"):
            paragraphs.append((cursor, cursor + len(part)))
            cursor += len(part) + 2

    sentences: list[Sentence] = []
    for p_idx, para in enumerate(paragraphs):
        for rng in _sentence_ranges(normalized_body, para):
            sentences.append(Sentence(range=rng, paragraph=p_idx))

    tokens: list[Token] = []
    for s_idx, sent in enumerate(sentences):
        for rng in _token_ranges(normalized_body, sent.range):
            tokens.append(Token(range=rng, sentence=s_idx))

    return Document(
        article_id=fields.article_id,
        site_id=fields.site_id,
        author=fields.author,
        title=fields.title,
        published_at=fields.published_at,
        raw_body=normalized_body if raw_body is None else raw_body,
        normalized_body=normalized_body,
        paragraphs=paragraphs,
        sentences=sentences,
        tokens=tokens,
    )


def build_document(fields: ArticleFields, raw_body: str) -> Document:
    """Normalize and segment in one step."""
    return segment_document(fields, normalize_text(raw_body), raw_body=raw_body)
