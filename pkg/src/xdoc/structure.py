"""Tokenization and abbreviation-aware sentence boundary detection.

Both operations are language independent; the only language-dependent
input is the abbreviation set taken from the resource bundle.  Offsets
are byte offsets into the UTF-8 encoding of the source text so that
annotations stay bit-exact regardless of platform string handling.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator

__all__ = [
    "PUNCTUATION",
    "TERMINATORS",
    "Token",
    "Sentence",
    "tokenize",
    "split_sentences",
    "paragraph_breaks",
    "segment",
    "is_punctuation",
]

PUNCTUATION = frozenset(".,;:!?()\"'")
TERMINATORS = frozenset(".!?")

_RUN = re.compile(r"\S+")
_PARAGRAPH = re.compile(r"\n[ \t\r]*\n")


@dataclass(frozen=True)
class Token:
    id: int
    form: str
    offset: int  # byte offset into the UTF-8 source
    length: int  # byte length


@dataclass(frozen=True)
class Sentence:
    id: int
    tokens: tuple[Token, ...]


def is_punctuation(form: str) -> bool:
    return bool(form) and all(ch in PUNCTUATION for ch in form)


def _blen(s: str) -> int:
    return len(s.encode("utf-8"))


def _split_run(run: str, abbrevs: list[str]) -> Iterator[str]:
    """Split one whitespace-free run into token forms, in order.

    Punctuation characters become their own tokens except when they sit
    between digits (decimal points, digit grouping) or when an
    abbreviation from the lexicon starts at the current position; the
    abbreviation is then emitted whole, trailing period included.
    """
    pos = 0
    n = len(run)
    while pos < n:
        hit = next((a for a in abbrevs if run.startswith(a, pos)), None)
        if hit is not None:
            yield hit
            pos += len(hit)
            continue
        if run[pos] in PUNCTUATION:
            yield run[pos]
            pos += 1
            continue
        j = pos
        while j < n:
            ch = run[j]
            if ch in PUNCTUATION:
                digit_internal = (
                    ch in ".,"
                    and j > pos
                    and j + 1 < n
                    and run[j - 1].isdigit()
                    and run[j + 1].isdigit()
                )
                if not digit_internal:
                    break
            j += 1
        yield run[pos:j]
        pos = j


def tokenize(text: str, abbreviations: Iterable[str] = ()) -> list[Token]:
    """Split text into tokens with byte offsets.

    Tokens cover every non-whitespace run.  Hyphens and digit-internal
    punctuation stay inside tokens (``COX-2`` and ``3.5`` are single
    tokens); an abbreviation such as ``Dr.`` keeps its period.
    """
    abbrevs = sorted((a for a in abbreviations if a), key=len, reverse=True)
    tokens: list[Token] = []
    char_pos = 0
    byte_pos = 0
    for match in _RUN.finditer(text):
        byte_pos += _blen(text[char_pos : match.start()])
        for piece in _split_run(match.group(), abbrevs):
            length = _blen(piece)
            tokens.append(Token(len(tokens), piece, byte_pos, length))
            byte_pos += length
        char_pos = match.end()
    return tokens


def split_sentences(
    tokens: Iterable[Token], abbreviations: Iterable[str] = ()
) -> list[Sentence]:
    """Group tokens into sentences.

    A sentence ends at each standalone terminator token (``.`` ``!``
    ``?``).  Abbreviation tokens never end a sentence; they keep their
    period inside the form, so they are never standalone terminators
    unless the abbreviation set itself lists a bare terminator.  A final
    run without terminator still forms a sentence.
    """
    abbrev_set = set(abbreviations)
    sentences: list[Sentence] = []
    current: list[Token] = []
    for token in tokens:
        current.append(token)
        if token.form in TERMINATORS and token.form not in abbrev_set:
            sentences.append(Sentence(len(sentences), tuple(current)))
            current = []
    if current:
        sentences.append(Sentence(len(sentences), tuple(current)))
    return sentences


def paragraph_breaks(text: str) -> list[int]:
    """Byte offsets at which a blank-line gap starts."""
    return [_blen(text[: m.start()]) for m in _PARAGRAPH.finditer(text)]


def segment(text: str, abbreviations: Iterable[str] = ()) -> tuple[list[Token], list[Sentence]]:
    """Tokenize and split, with blank lines resetting sentence state.

    Paragraph gaps force a sentence boundary even without a terminator;
    they produce no structure element of their own.
    """
    abbrevs = set(abbreviations)
    tokens = tokenize(text, abbrevs)
    sentences = split_sentences(tokens, abbrevs)
    breaks = paragraph_breaks(text)
    if not breaks:
        return tokens, sentences

    resplit: list[Sentence] = []
    for sentence in sentences:
        current: list[Token] = []
        for token in sentence.tokens:
            if current:
                prev_end = current[-1].offset + current[-1].length
                if any(prev_end <= b < token.offset for b in breaks):
                    resplit.append(Sentence(len(resplit), tuple(current)))
                    current = []
            current.append(token)
        if current:
            resplit.append(Sentence(len(resplit), tuple(current)))
    return tokens, resplit
