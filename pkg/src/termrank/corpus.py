"""Policy ingestion: segment raw terms-and-conditions text into statements.

A statement is one sentence; it is the unit everything downstream
(pairing, ranking, classification) operates on. The segmenter splits on
sentence terminators and list items with an abbreviation guard. No
off-the-shelf sentence splitter is used so the rules stay fixed and
testable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ._stats import five_number_summary
from .errors import InvalidDocument

__all__ = [
    "Statement",
    "PolicyDocument",
    "segment_policy",
    "statement_length_summary",
]


@dataclass(frozen=True)
class Statement:
    """One sentence of a policy document."""

    statement_id: str
    policy_id: str
    index: int
    text: str
    word_count: int


@dataclass
class PolicyDocument:
    """A policy and its ordered statements."""

    policy_id: str
    source_url: str
    raw_text: str
    statements: list[Statement] = field(default_factory=list)


# Tokens that end with a period without ending a sentence. Compared
# case-insensitively against the whitespace-delimited token preceding
# the period, with leading punctuation stripped.
ABBREVIATIONS = frozenset({
    "e.g", "i.e", "p.o", "u.s", "u.k", "a.m", "p.m",
    "inc", "ltd", "llc", "corp", "co", "dept", "est", "approx",
    "etc", "vs", "mr", "mrs", "ms", "dr", "jr", "sr", "st",
})

# Line-initial list markers: dash/star/plus bullets and short numeric
# enumerations ("1.", "2)", "(3)"). Matched after stripping the line.
_LIST_MARKER = re.compile(r"^(?:[-*+]\s+|\d{1,3}[.)]\s+|\(\d{1,3}\)\s+)")

# Bullet characters never occur in prose; they split wherever they appear.
_BULLET_CHARS = "•‣◦▪"  # • ‣ ◦ ▪

_TERMINATORS = ".!?"
_CLOSERS = "\"')]»”’"

_LEADING_PUNCT = re.compile(r"^[^0-9A-Za-z]+")


def _chunks(raw_text: str) -> list[str]:
    """Split text into sentence-splittable chunks.

    Consecutive non-blank lines form one chunk (wrapped paragraphs);
    blank lines and list markers start a new one. Markers are list
    syntax, not sentence content, and are dropped. Each chunk comes out
    whitespace-normalized.
    """
    for ch in _BULLET_CHARS:
        raw_text = raw_text.replace(ch, "\n- ")
    chunks: list[str] = []
    current: list[str] = []

    def flush():
        if current:
            chunks.append(" ".join(" ".join(current).split()))
            current.clear()

    for line in raw_text.split("\n"):
        stripped = line.strip()
        if not stripped:
            flush()
            continue
        m = _LIST_MARKER.match(stripped)
        if m:
            flush()
            rest = stripped[m.end():].strip()
            if rest:
                current.append(rest)
        else:
            current.append(stripped)
    flush()
    return [c for c in chunks if c]


def _guarded(chunk: str, start: int, i: int) -> bool:
    """True when the period at position i must not end the sentence."""
    if chunk[i] != ".":
        return False
    # decimal number: digit on both sides
    if i > start and i + 1 < len(chunk) and chunk[i - 1].isdigit() and chunk[i + 1].isdigit():
        return True
    # token immediately before the period
    p = i - 1
    while p >= start and chunk[p] != " ":
        p -= 1
    tok = _LEADING_PUNCT.sub("", chunk[p + 1:i])
    if not tok:
        return False
    if tok.lower() in ABBREVIATIONS:
        return True
    # single capital = initial ("John A. Smith"), except as the very
    # first token of the statement, where "A." is a one-word sentence
    if len(tok) == 1 and tok.isalpha() and tok.isupper():
        return p + 1 != start
    return False


def _split_sentences(chunk: str) -> list[str]:
    out: list[str] = []
    start = 0
    n = len(chunk)
    i = 0
    while i < n:
        if chunk[i] not in _TERMINATORS:
            i += 1
            continue
        j = i
        while j + 1 < n and chunk[j + 1] in _TERMINATORS:
            j += 1
        k = j
        while k + 1 < n and chunk[k + 1] in _CLOSERS:
            k += 1
        at_end = k + 1 >= n
        before_space = not at_end and chunk[k + 1] == " "
        # a lone period gets the abbreviation guard; runs ("...", "?!") split
        guard = i == j and _guarded(chunk, start, i)
        if (at_end or before_space) and not guard:
            out.append(chunk[start:k + 1].strip())
            start = k + 2 if before_space else k + 1
            i = start
        else:
            i = j + 1
    tail = chunk[start:].strip()
    if tail:
        out.append(tail)
    return out


def _has_content(text: str) -> bool:
    return any(c.isalnum() for c in text)


def segment_policy(policy_id: str, source_url: str, raw_text: str) -> PolicyDocument:
    """Segment raw policy text into statements.

    Sentences end at ``.``, ``!``, or ``?`` followed by whitespace or
    end of text; newline-delimited list items are statements of their
    own. A period does not split after a known abbreviation, after a
    mid-sentence single capital (personal initials), or inside a
    decimal number. Fragments without any letter or digit are dropped.

    Re-segmenting the space-joined output reproduces the same statement
    list whenever every statement carries its own terminator; naked
    list items (no trailing punctuation) lose their line boundary in
    the join, so idempotence is guaranteed only on that domain.

    Raises InvalidDocument when no statement can be extracted.
    """
    if not raw_text or not raw_text.strip():
        raise InvalidDocument(f"policy {policy_id!r}: empty document")
    texts = [
        s
        for chunk in _chunks(raw_text)
        for s in _split_sentences(chunk)
        if _has_content(s)
    ]
    if not texts:
        raise InvalidDocument(f"policy {policy_id!r}: no sentence-bearing text")
    statements = [
        Statement(
            statement_id=f"{policy_id}-s{idx:03d}",
            policy_id=policy_id,
            index=idx,
            text=text,
            word_count=len(text.split()),
        )
        for idx, text in enumerate(texts)
    ]
    return PolicyDocument(
        policy_id=policy_id,
        source_url=source_url,
        raw_text=raw_text,
        statements=statements,
    )


def statement_length_summary(doc: PolicyDocument) -> dict[str, float]:
    """Five-number summary (min, Q1, median, Q3, max) of statement word counts.

    Quartiles use exclusive plotting positions, linearly interpolated.
    """
    if not doc.statements:
        raise InvalidDocument(f"policy {doc.policy_id!r}: no statements")
    return five_number_summary([s.word_count for s in doc.statements])
