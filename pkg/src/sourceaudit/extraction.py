"""Quote, mention, and speaker extraction over segmented documents.

Implements the rule cascade that turns an article into quote annotations:
paired-double-quote spans (with unclosed openers running to the paragraph
end), length filtering, capitalized-run person/organization/title mention
detection, profile merging with first-title-wins semantics, and the R1-R6
speaker attribution rules with doubtful marking.

Every resolution decision is computed from the document prefix up to the
quote's paragraph, so appending paragraphs never changes earlier output.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field

from . import resources
from .demographics import (
    DemographicPrediction,
    DictionaryGenderClient,
    GenderClient,
    GenderDictionary,
    RaceModel,
    TooShortNameError,
    predict_race,
    unknown_prediction,
)
from .textcore import ArticleFields, Document, Range, Token, build_document, quote_delimiter_pairs

PRONOUN_GENDERS = {"he": ("male",), "she": ("female",), "they": ()}  # () = any
PERSON_RUN_MAX = 4
SHORT_QUOTE_WORDS = 5
LONG_QUOTE_WORDS = 100


@dataclass(frozen=True)
class QuoteSpan:
    quote_id: int
    range: Range  # inner text, delimiters excluded
    text: str
    word_count: int
    long_flag: bool
    paragraph_index: int


@dataclass(frozen=True)
class Mention:
    kind: str  # person | organization | title | pronoun
    surface: str
    range: Range
    sentence_index: int

    @property
    def name_tokens(self) -> list[str]:
        return self.surface.split()

    @property
    def first_name(self) -> str:
        tokens = self.name_tokens
        return tokens[0] if len(tokens) > 1 else ""

    @property
    def last_name(self) -> str:
        return self.name_tokens[-1]


@dataclass
class SpeakerProfile:
    speaker_id: int
    canonical_name: str
    first_name: str
    last_name: str
    title: str = ""
    organization: str = ""
    mentions: list[Mention] = field(default_factory=list)
    gender: DemographicPrediction | None = None
    race: DemographicPrediction | None = None


@dataclass(frozen=True)
class QuoteAnnotation:
    quote: QuoteSpan
    speaker_id: int | None
    doubtful: bool
    rule_id: str  # R1..R6


@dataclass
class AnnotationResult:
    article_id: str
    quotes: list[QuoteAnnotation]
    profiles: list[SpeakerProfile]
    summary: dict

    def to_payload(self) -> dict:
        """JSON-ready dict matching the annotation response schema."""
        by_id = {profile.speaker_id: profile for profile in self.profiles}
        quotes = []
        for annotation in self.quotes:
            speaker = None
            profile = by_id.get(annotation.speaker_id)
            if profile is not None:
                speaker = {
                    "name": profile.canonical_name,
                    "title": profile.title,
                    "organization": profile.organization,
                    "gender": _prediction_payload(profile.gender),
                    "race": _prediction_payload(profile.race),
                }
            quotes.append({
                "text": annotation.quote.text,
                "word_count": annotation.quote.word_count,
                "long": annotation.quote.long_flag,
                "doubtful": annotation.doubtful,
                "rule": annotation.rule_id,
                "speaker": speaker,
            })
        return {"article_id": self.article_id, "quotes": quotes, "summary": self.summary}


def _prediction_payload(prediction: DemographicPrediction | None) -> dict:
    if prediction is None:
        return {"label": "unknown", "confidence": 0.0}
    return {"label": prediction.label, "confidence": prediction.confidence}


# ---------------------------------------------------------------------------
# Quote detection
# ---------------------------------------------------------------------------

def detect_quotes(doc: Document) -> list[QuoteSpan]:
    """Quote spans from paired straight double quotes, paragraph-scoped.

    An opening quote with no closing mate yields a span running to the
    paragraph end. word_count counts whitespace-separated tokens of the
    inner text; long_flag marks spans over the 100-word limit.
    """
    spans: list[QuoteSpan] = []
    body = doc.normalized_body
    for paragraph_index, (start, end) in enumerate(doc.paragraphs):
        for open_pos, close_pos in quote_delimiter_pairs(body, start, end):
            inner = (open_pos + 1, close_pos)
            text = body[inner[0]:inner[1]]
            words = len(text.split())
            spans.append(QuoteSpan(
                quote_id=len(spans),
                range=inner,
                text=text,
                word_count=words,
                long_flag=words > LONG_QUOTE_WORDS,
                paragraph_index=paragraph_index,
            ))
    return spans


def filter_quotes(spans: list[QuoteSpan]) -> list[QuoteSpan]:
    """Drop short quotes (< 5 words); keep everything else in order."""
    return [span for span in spans if span.word_count >= SHORT_QUOTE_WORDS]


def _exclusion_ranges(doc: Document) -> list[Range]:
    """Character ranges covered by quote spans, delimiters included."""
    ranges: list[Range] = []
    body = doc.normalized_body
    for start, end in doc.paragraphs:
        for open_pos, close_pos in quote_delimiter_pairs(body, start, end):
            closed = close_pos < end and body[close_pos] == '"'
            ranges.append((open_pos, close_pos + 1 if closed else close_pos))
    return ranges


def _inside_any(pos: int, ranges: list[Range]) -> bool:
    return any(lo <= pos < hi for lo, hi in ranges)


# ---------------------------------------------------------------------------
# Mention extraction
# ---------------------------------------------------------------------------

class _TokenView:
    """Word/punctuation token sequence with document offsets."""

    def __init__(self, doc: Document):
        self.doc = doc
        self.body = doc.normalized_body
        self.tokens = doc.tokens
        self.starts = [token.range[0] for token in self.tokens]

    def text(self, token: Token) -> str:
        return self.body[token.range[0]:token.range[1]]

    def is_word(self, token: Token) -> bool:
        return self.text(token).isalnum()

    def index_at(self, pos: int) -> int:
        """Index of the first token starting at or after pos."""
        return bisect.bisect_left(self.starts, pos)

    def next_word(self, index: int, limit: int, skip: tuple[str, ...] = (",",)) -> int | None:
        """Next word-token index after index, skipping listed punctuation."""
        i = index + 1
        while i < limit:
            text = self.text(self.tokens[i])
            if text.isalnum():
                return i
            if text not in skip:
                return None
            i += 1
        return None

    def prev_word(self, index: int, floor: int, skip: tuple[str, ...] = (",",)) -> int | None:
        i = index - 1
        while i >= floor:
            text = self.text(self.tokens[i])
            if text.isalnum():
                return i
            if text not in skip:
                return None
            i -= 1
        return None


def _capitalized(text: str) -> bool:
    return text.isalpha() and text[0].isupper()


def extract_mentions(doc: Document) -> list[Mention]:
    """Person, organization, title, and pronoun mentions outside quotes.

    Person mentions are maximal runs of 2-4 capitalized alphabetic tokens
    (leading sentence-initial stopwords and title words stripped); a lone
    capitalized token adjacent to a cue verb is a bare-surname person.
    Organizations are capitalized multi-token runs containing an org-suffix
    word, plus the of-objects of title patterns. Titles attach from the
    lexicon when immediately preceding a person or in the appositive
    "NAME, title of ORG" pattern.
    """
    view = _TokenView(doc)
    exclusions = _exclusion_ranges(doc)
    cue_verbs = resources.cue_verbs()
    title_words = resources.title_words()
    org_suffixes = resources.org_suffixes()
    stopwords = resources.stopwords()
    non_person = resources.non_person_words()
    place_suffixes = resources.place_suffixes()

    mentions: dict[tuple[str, Range], Mention] = {}

    def add(kind: str, lo: int, hi: int, sentence_index: int) -> Mention:
        key = (kind, (lo, hi))
        if key not in mentions:
            mentions[key] = Mention(kind, view.body[lo:hi], (lo, hi), sentence_index)
        return mentions[key]

    tokens = doc.tokens
    n = len(tokens)

    def usable(i: int) -> bool:
        return not _inside_any(tokens[i].range[0], exclusions)

    # Pronoun mentions.
    for i, token in enumerate(tokens):
        text = view.text(token)
        if text.casefold() in PRONOUN_GENDERS and usable(i):
            add("pronoun", token.range[0], token.range[1], token.sentence)

    def run_gap_ok(i: int, j: int) -> bool:
        """Tokens i, j belong to one run: same sentence, space or a title
        abbreviation period between them."""
        if tokens[i].sentence != tokens[j].sentence:
            return False
        gap = view.body[tokens[i].range[1]:tokens[j].range[0]]
        if gap == " ":
            return True
        if gap in (". ", "."):
            return view.text(tokens[i]).casefold() in title_words
        return False

    # Capitalized runs.
    i = 0
    while i < n:
        text = view.text(tokens[i])
        if (not _capitalized(text) or text.casefold() in PRONOUN_GENDERS
                or not usable(i)):
            i += 1
            continue
        run = [i]
        while True:
            j = run[-1] + 1
            while j < n and view.text(tokens[j]) == ".":
                j += 1
            if (j < n and _capitalized(view.text(tokens[j]))
                    and view.text(tokens[j]).casefold() not in PRONOUN_GENDERS
                    and usable(j) and run_gap_ok(run[-1], j)):
                run.append(j)
            else:
                break
        i = run[-1] + 1

        words = [view.text(tokens[k]) for k in run]
        sentence_index = tokens[run[0]].sentence

        # Sentence-initial stopword never starts a name.
        first_of_sentence = run[0] == 0 or tokens[run[0] - 1].sentence != sentence_index
        if first_of_sentence and words[0].casefold() in stopwords:
            run = run[1:]
            words = words[1:]
        # Temporal words never form part of a person name.
        while run and words[0].casefold() in non_person:
            run = run[1:]
            words = words[1:]
        if not run:
            continue

        # Leading title words split off as a title mention.
        title_end = 0
        while title_end < len(run) and words[title_end].casefold() in title_words:
            title_end += 1
        title_run, name_run = run[:title_end], run[title_end:]
        name_words = words[title_end:]

        if not name_run:
            continue

        # Street names ("Grant Avenue") are neither persons nor organizations.
        if name_words[-1].casefold() in place_suffixes:
            continue

        has_suffix = any(word.casefold() in org_suffixes for word in name_words)
        if has_suffix and len(name_run) >= 2:
            add("organization", tokens[name_run[0]].range[0],
                tokens[name_run[-1]].range[1], sentence_index)
            continue

        person = None
        if 2 <= len(name_run) <= PERSON_RUN_MAX:
            person = add("person", tokens[name_run[0]].range[0],
                         tokens[name_run[-1]].range[1], sentence_index)
        elif len(name_run) == 1 and name_words[0].casefold() not in org_suffixes:
            # Bare surname, only when adjacent to a cue verb.
            idx = name_run[0]
            after = view.next_word(idx, n)
            before = view.prev_word(idx, 0)
            near_cue = (
                (after is not None and view.text(tokens[after]).casefold() in cue_verbs)
                or (before is not None and view.text(tokens[before]).casefold() in cue_verbs)
            )
            if near_cue:
                person = add("person", tokens[idx].range[0], tokens[idx].range[1],
                             sentence_index)

        if person is not None and title_run:
            add("title", tokens[title_run[0]].range[0],
                tokens[title_run[-1]].range[1], sentence_index)

    # Lowercase title word(s) immediately before a person mention.
    person_mentions = [m for m in mentions.values() if m.kind == "person"]
    for person in person_mentions:
        idx = view.index_at(person.range[0])
        j = view.prev_word(idx, 0, skip=())
        title_idxs = []
        while (j is not None and view.text(tokens[j]).casefold() in title_words
               and tokens[j].sentence == person.sentence_index and usable(j)):
            title_idxs.insert(0, j)
            j = view.prev_word(j, 0, skip=())
        if title_idxs and view.body[tokens[title_idxs[-1]].range[1]:person.range[0]] == " ":
            add("title", tokens[title_idxs[0]].range[0],
                tokens[title_idxs[-1]].range[1], person.sentence_index)

    # Appositive "NAME, title of ORG" and trailing "of ORG" objects.
    for person in person_mentions:
        end_idx = view.index_at(person.range[1]) - 1
        nxt = end_idx + 1
        if nxt < n and view.text(tokens[nxt]) == ",":
            t = view.next_word(nxt - 1, n)  # first word after the comma
            if t is not None and view.text(tokens[t]).casefold() in title_words and usable(t):
                t_end = t
                while True:
                    t2 = view.next_word(t_end, n, skip=())
                    if t2 is not None and view.text(tokens[t2]).casefold() in title_words:
                        t_end = t2
                    else:
                        break
                add("title", tokens[t].range[0], tokens[t_end].range[1],
                    tokens[t].sentence)
                _org_after_of(view, t_end, add, usable)
        # "TITLE NAME of ORG": of-object directly after a titled person.
        if _has_adjacent_title(view, mentions, person):
            _org_after_of(view, end_idx, add, usable)

    return sorted(mentions.values(), key=lambda m: (m.range[0], m.range[1]))


def _has_adjacent_title(view: _TokenView, mentions: dict, person: Mention) -> bool:
    for (kind, rng) in mentions:
        if kind != "title":
            continue
        gap = view.body[rng[1]:person.range[0]]
        if gap == " " or (gap.startswith(".") and gap.strip(". ") == ""):
            return True
    return False


def _org_after_of(view: _TokenView, anchor_idx: int, add, usable) -> None:
    """Capitalized run following "of" / "of the" after anchor token."""
    tokens = view.tokens
    n = len(tokens)
    of_idx = view.next_word(anchor_idx, n, skip=())
    if of_idx is None or view.text(tokens[of_idx]).casefold() != "of":
        return
    start = view.next_word(of_idx, n, skip=())
    if start is not None and view.text(tokens[start]).casefold() == "the":
        start = view.next_word(start, n, skip=())
    if start is None or not _capitalized(view.text(tokens[start])) or not usable(start):
        return
    run_end = start
    while True:
        j = view.next_word(run_end, n, skip=())
        if (j is not None and _capitalized(view.text(tokens[j]))
                and tokens[j].sentence == tokens[start].sentence
                and view.body[tokens[run_end].range[1]:tokens[j].range[0]] == " "):
            run_end = j
        else:
            break
    add("organization", tokens[start].range[0], tokens[run_end].range[1],
        tokens[start].sentence)


# ---------------------------------------------------------------------------
# Speaker profiles
# ---------------------------------------------------------------------------

def build_speaker_profiles(doc: Document, mentions: list[Mention]) -> list[SpeakerProfile]:
    """Merge person mentions into speaker profiles in document order.

    Full names merge on identical (first, last); bare surnames link to the
    unique profile already holding that surname, start a new profile when
    none exists, and stay unlinked when several candidates exist. The first
    title and organization detected for a profile win.
    """
    profiles: list[SpeakerProfile] = []
    by_key: dict[tuple[str, str], SpeakerProfile] = {}

    def by_surname(surname: str) -> list[SpeakerProfile]:
        return [p for p in profiles if p.last_name.casefold() == surname.casefold()]

    view = _TokenView(doc)
    titles = [m for m in mentions if m.kind == "title"]
    orgs = [m for m in mentions if m.kind == "organization"]

    def associated_title(person: Mention) -> Mention | None:
        for title in titles:
            gap = view.body[title.range[1]:person.range[0]]
            if gap == " " or (gap and set(gap) <= {".", " "}):
                return title
            gap = view.body[person.range[1]:title.range[0]]
            if gap == ", ":
                return title
        return None

    def associated_org(person: Mention, title: Mention | None) -> Mention | None:
        anchors = [person.range[1]]
        if title is not None and title.range[0] > person.range[1]:
            anchors.append(title.range[1])
        for org in orgs:
            for anchor in anchors:
                gap = view.body[anchor:org.range[0]]
                if gap in (" of ", " of the "):
                    return org
        return None

    for mention in mentions:
        if mention.kind != "person":
            continue
        tokens = mention.name_tokens
        profile: SpeakerProfile | None = None
        if len(tokens) >= 2:
            key = (mention.first_name.casefold(), mention.last_name.casefold())
            profile = by_key.get(key)
            if profile is None:
                profile = SpeakerProfile(
                    speaker_id=len(profiles),
                    canonical_name=mention.surface,
                    first_name=mention.first_name,
                    last_name=mention.last_name,
                )
                by_key[key] = profile
                profiles.append(profile)
        else:
            candidates = by_surname(mention.last_name)
            if len(candidates) == 1:
                profile = candidates[0]
            elif not candidates:
                profile = SpeakerProfile(
                    speaker_id=len(profiles),
                    canonical_name=mention.surface,
                    first_name="",
                    last_name=mention.last_name,
                )
                profiles.append(profile)
            # several candidates: ambiguous, mention stays unlinked

        if profile is None:
            continue
        profile.mentions.append(mention)
        if len(mention.surface) > len(profile.canonical_name):
            profile.canonical_name = mention.surface
            profile.first_name = mention.first_name or profile.first_name
        title = associated_title(mention)
        if title is not None and not profile.title:
            profile.title = title.surface
        org = associated_org(mention, title)
        if org is not None and not profile.organization:
            profile.organization = org.surface

    return profiles


# ---------------------------------------------------------------------------
# Speaker resolution
# ---------------------------------------------------------------------------

class _AttributionContext:
    """Shared indexes for resolving every quote of one document."""

    def __init__(self, doc: Document, profiles: list[SpeakerProfile],
                 mentions: list[Mention]):
        self.doc = doc
        self.view = _TokenView(doc)
        self.profiles = profiles
        self.mentions = mentions
        self.persons = [m for m in mentions if m.kind == "person"]
        self.pronouns = [m for m in mentions if m.kind == "pronoun"]
        self.cue_verbs = resources.cue_verbs()
        # mention identity -> owning profile
        self.owner: dict[Range, SpeakerProfile] = {}
        for profile in profiles:
            for mention in profile.mentions:
                if mention.kind == "person":
                    self.owner[mention.range] = profile

    def sentence_at(self, pos: int) -> int | None:
        for index, sentence in enumerate(self.doc.sentences):
            if sentence.range[0] <= pos < sentence.range[1]:
                return index
        return None

    def persons_in(self, lo: int, hi: int) -> list[Mention]:
        return [m for m in self.persons if lo <= m.range[0] < hi]

    def pronouns_in(self, lo: int, hi: int) -> list[Mention]:
        return [m for m in self.pronouns if lo <= m.range[0] < hi]


def _quote_regions(ctx: _AttributionContext, quote: QuoteSpan):
    """(leading, trailing) character regions around the quote delimiters.

    Regions stay within the quote's sentence and are clamped at adjacent
    quote delimiters: a sentence may hold several quote/attribution pairs
    (boundaries are suppressed before an opening delimiter), and another
    quote's material never belongs to this quote's cue clause.
    """
    doc = ctx.doc
    body = doc.normalized_body
    open_pos = quote.range[0] - 1
    close_pos = quote.range[1]
    closed = close_pos < len(body) and body[close_pos:close_pos + 1] == '"'

    leading = None
    sentence_index = ctx.sentence_at(open_pos)
    if sentence_index is not None:
        start = doc.sentences[sentence_index].range[0]
        prev_delim = body.rfind('"', start, open_pos)
        if prev_delim != -1:
            start = prev_delim + 1
        if start < open_pos:
            leading = (start, open_pos)

    trailing = None
    if closed:
        sentence_index = ctx.sentence_at(close_pos)
        if sentence_index is not None:
            end = doc.sentences[sentence_index].range[1]
            next_delim = body.find('"', close_pos + 1, end)
            if next_delim != -1:
                end = next_delim
            if close_pos + 1 < end:
                trailing = (close_pos + 1, end)
    return leading, trailing


def _adjacent_cue(ctx: _AttributionContext, mention: Mention, lo: int, hi: int) -> bool:
    """A cue verb sits immediately next to the mention inside [lo, hi)."""
    view = ctx.view
    tokens = view.tokens
    n = len(tokens)
    start_idx = view.index_at(mention.range[0])
    end_idx = view.index_at(mention.range[1]) - 1
    after = view.next_word(end_idx, n)
    if after is not None and lo <= tokens[after].range[0] < hi \
            and view.text(tokens[after]).casefold() in ctx.cue_verbs:
        return True
    before = view.prev_word(start_idx, 0)
    if before is not None and lo <= tokens[before].range[0] < hi \
            and view.text(tokens[before]).casefold() in ctx.cue_verbs:
        return True
    return False


def _cue_tokens_in(ctx: _AttributionContext, lo: int, hi: int) -> list[int]:
    view = ctx.view
    out = []
    for index in range(view.index_at(lo), len(view.tokens)):
        token = view.tokens[index]
        if token.range[0] >= hi:
            break
        if view.text(token).casefold() in ctx.cue_verbs:
            out.append(index)
    return out


def _bind(ctx: _AttributionContext, quote: QuoteSpan, mention: Mention,
          rule_id: str, extra_doubt: bool) -> QuoteAnnotation | None:
    """Bind a cue person mention to a profile, applying R5 for collisions."""
    profile = ctx.owner.get(mention.range)
    if profile is not None:
        return _make_annotation(quote, profile.speaker_id, rule_id, extra_doubt)

    # Unlinked bare surname: surname collision, scan the document prefix
    # through the quote's paragraph.
    paragraph_end = ctx.doc.paragraphs[quote.paragraph_index][1]
    candidates = []
    for prof in ctx.profiles:
        if prof.last_name.casefold() != mention.last_name.casefold():
            continue
        in_prefix = [m for m in prof.mentions
                     if m.kind == "person" and m.range[0] < paragraph_end]
        if in_prefix:
            candidates.append((max(m.range[0] for m in in_prefix), prof))
    if not candidates:
        return None
    if len(candidates) == 1:
        return _make_annotation(quote, candidates[0][1].speaker_id, "R5", extra_doubt)
    candidates.sort(key=lambda pair: pair[0])
    return _make_annotation(quote, candidates[-1][1].speaker_id, "R5", True)


def _make_annotation(quote: QuoteSpan, speaker_id: int | None, rule_id: str,
                     doubtful: bool) -> QuoteAnnotation:
    if speaker_id is None:
        doubtful = True
    if quote.long_flag:
        doubtful = True
    return QuoteAnnotation(quote=quote, speaker_id=speaker_id,
                           doubtful=doubtful, rule_id=rule_id)


def resolve_speaker(quote: QuoteSpan, doc: Document,
                    profiles: list[SpeakerProfile], mentions: list[Mention],
                    _ctx: _AttributionContext | None = None) -> QuoteAnnotation:
    """Attribute one kept quote using rules R1-R6, first match wins.

    Doubtful is set for long quotes, multi-person cue clauses, pronoun
    resolution across a paragraph boundary, surname collisions resolved by
    recency, and unresolved speakers.
    """
    ctx = _ctx or _AttributionContext(doc, profiles, mentions)
    leading, trailing = _quote_regions(ctx, quote)

    # R1: trailing cue clause after the closing delimiter.
    if trailing is not None:
        annotation = _match_cue_region(ctx, quote, trailing, "R1")
        if annotation is not None:
            return annotation

    # R2: person + cue verb immediately before the opening delimiter.
    if leading is not None:
        annotation = _match_leading_cue(ctx, quote, leading)
        if annotation is not None:
            return annotation

    # R3: "according to" + person in the quote's sentence.
    for region in (trailing, leading):
        if region is None:
            continue
        annotation = _match_according_to(ctx, quote, region)
        if annotation is not None:
            return annotation

    # R4: pronoun subject of a cue verb.
    for region in (trailing, leading):
        if region is None:
            continue
        annotation = _match_pronoun_cue(ctx, quote, region)
        if annotation is not None:
            return annotation

    return _make_annotation(quote, None, "R6", True)


def _person_before_cue(ctx: _AttributionContext, persons: list[Mention],
                       cue_start: int) -> Mention | None:
    """Nearest person ending before the cue with nothing but an optional
    comma-bounded appositive in between ("Jane Smith, a lawyer, said")."""
    body = ctx.view.body
    for mention in sorted(persons, key=lambda m: -m.range[0]):
        if mention.range[1] > cue_start:
            continue
        gap = body[mention.range[1]:cue_start].strip()
        if gap == "" or (gap.startswith(",") and gap.endswith(",")):
            return mention
    return None


def _match_cue_region(ctx: _AttributionContext, quote: QuoteSpan,
                      region: Range, rule_id: str) -> QuoteAnnotation | None:
    lo, hi = region
    cue_idxs = _cue_tokens_in(ctx, lo, hi)
    if not cue_idxs:
        return None
    persons = ctx.persons_in(lo, hi)
    if not persons:
        return None
    view = ctx.view
    cue = view.tokens[cue_idxs[0]]
    after = [m for m in persons if m.range[0] >= cue.range[1]]
    if after:
        target = min(after, key=lambda m: m.range[0])
    else:
        target = _person_before_cue(ctx, persons, cue.range[0])
    if target is None:
        return None
    return _bind(ctx, quote, target, rule_id, extra_doubt=len(persons) > 1)


def _match_leading_cue(ctx: _AttributionContext, quote: QuoteSpan,
                       region: Range) -> QuoteAnnotation | None:
    lo, hi = region
    view = ctx.view
    open_idx = view.index_at(quote.range[0] - 1)
    cue_idx = view.prev_word(open_idx, 0, skip=(",", ":"))
    if cue_idx is None:
        return None
    cue = view.tokens[cue_idx]
    if not (lo <= cue.range[0] < hi) or view.text(cue).casefold() not in ctx.cue_verbs:
        return None
    persons = ctx.persons_in(lo, hi)
    target = _person_before_cue(ctx, persons, cue.range[0])
    if target is None:
        return None
    return _bind(ctx, quote, target, "R2", extra_doubt=len(persons) > 1)


def _match_according_to(ctx: _AttributionContext, quote: QuoteSpan,
                        region: Range) -> QuoteAnnotation | None:
    lo, hi = region
    view = ctx.view
    tokens = view.tokens
    n = len(tokens)
    for index in range(view.index_at(lo), n):
        token = tokens[index]
        if token.range[0] >= hi:
            break
        if view.text(token).casefold() != "according":
            continue
        nxt = view.next_word(index, n, skip=())
        if nxt is None or view.text(tokens[nxt]).casefold() != "to":
            continue
        anchor = tokens[nxt].range[1]
        persons = [m for m in ctx.persons_in(lo, hi) if m.range[0] >= anchor]
        if not persons:
            continue
        target = min(persons, key=lambda m: m.range[0])
        all_persons = ctx.persons_in(lo, hi)
        return _bind(ctx, quote, target, "R3", extra_doubt=len(all_persons) > 1)
    return None


def _match_pronoun_cue(ctx: _AttributionContext, quote: QuoteSpan,
                       region: Range) -> QuoteAnnotation | None:
    lo, hi = region
    pronouns = [m for m in ctx.pronouns_in(lo, hi) if _adjacent_cue(ctx, m, lo, hi)]
    if not pronouns:
        return None
    pronoun = pronouns[0]
    allowed = PRONOUN_GENDERS[pronoun.surface.casefold()]
    paragraph = quote.paragraph_index
    paragraph_ranges = ctx.doc.paragraphs

    def paragraph_of(pos: int) -> int:
        for index, (p_lo, p_hi) in enumerate(paragraph_ranges):
            if p_lo <= pos < p_hi:
                return index
        return -1

    best = None
    for mention in ctx.persons:
        if mention.range[0] >= pronoun.range[0]:
            continue
        profile = ctx.owner.get(mention.range)
        if profile is None:
            continue
        mention_paragraph = paragraph_of(mention.range[0])
        if mention_paragraph not in (paragraph, paragraph - 1):
            continue
        label = profile.gender.label if profile.gender else "unknown"
        if allowed and label not in allowed and label != "unknown":
            continue
        if best is None or mention.range[0] > best[0].range[0]:
            best = (mention, profile, mention_paragraph)
    if best is None:
        return None
    mention, profile, mention_paragraph = best
    profile.mentions.append(pronoun)
    crossed = mention_paragraph != paragraph
    return _make_annotation(quote, profile.speaker_id, "R4", crossed)


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------

_DEFAULT_GENDER_CLIENT: GenderClient | None = None
_DEFAULT_RACE_MODEL: RaceModel | None = None


def _default_gender_client() -> GenderClient:
    global _DEFAULT_GENDER_CLIENT
    if _DEFAULT_GENDER_CLIENT is None:
        _DEFAULT_GENDER_CLIENT = DictionaryGenderClient(GenderDictionary.bundled())
    return _DEFAULT_GENDER_CLIENT


def _default_race_model() -> RaceModel:
    global _DEFAULT_RACE_MODEL
    if _DEFAULT_RACE_MODEL is None:
        from . import training
        _DEFAULT_RACE_MODEL = training.load_model(resources.bundled_model_path("six"))
    return _DEFAULT_RACE_MODEL


def attach_demographics(profiles: list[SpeakerProfile],
                        gender_client: GenderClient,
                        race_model: RaceModel) -> None:
    """Fill gender and race predictions on every profile, in place."""
    for profile in profiles:
        if profile.first_name:
            profile.gender = gender_client.gender_for(profile.first_name)
        else:
            profile.gender = unknown_prediction("dictionary")
        try:
            profile.race = predict_race(profile.last_name, race_model)
        except TooShortNameError:
            profile.race = unknown_prediction("model")


def summarize(annotations: list[QuoteAnnotation],
              profiles: list[SpeakerProfile]) -> dict:
    """Gender/race proportions and titled share over kept quotes.

    Unresolved speakers count under "unknown"; each proportion map sums
    to 1 when any quotes exist, and is empty otherwise.
    """
    by_id = {profile.speaker_id: profile for profile in profiles}
    total = len(annotations)
    gender_counts: dict[str, int] = {}
    race_counts: dict[str, int] = {}
    titled = 0
    for annotation in annotations:
        profile = by_id.get(annotation.speaker_id)
        if profile is None:
            gender_label = race_label = "unknown"
        else:
            gender_label = profile.gender.label if profile.gender else "unknown"
            race_label = profile.race.label if profile.race else "unknown"
            if profile.title:
                titled += 1
        gender_counts[gender_label] = gender_counts.get(gender_label, 0) + 1
        race_counts[race_label] = race_counts.get(race_label, 0) + 1
    if total == 0:
        return {"gender_proportions": {}, "race_proportions": {},
                "titled_proportion": 0.0}
    return {
        "gender_proportions": {k: v / total for k, v in sorted(gender_counts.items())},
        "race_proportions": {k: v / total for k, v in sorted(race_counts.items())},
        "titled_proportion": titled / total,
    }


def annotate_article(fields: ArticleFields, raw_body: str,
                     gender_client: GenderClient | None = None,
                     race_model: RaceModel | None = None) -> AnnotationResult:
    """Full pipeline: normalize, segment, detect, filter, attribute.

    Deterministic; an empty body yields an empty result.
    """
    doc = build_document(fields, raw_body)
    kept = filter_quotes(detect_quotes(doc))
    mentions = extract_mentions(doc)
    profiles = build_speaker_profiles(doc, mentions)
    attach_demographics(profiles,
                        gender_client or _default_gender_client(),
                        race_model or _default_race_model())
    ctx = _AttributionContext(doc, profiles, mentions)
    annotations = [resolve_speaker(quote, doc, profiles, mentions, _ctx=ctx)
                   for quote in kept]
    summary = summarize(annotations, profiles)
    return AnnotationResult(article_id=fields.article_id, quotes=annotations,
                            profiles=profiles, summary=summary)
