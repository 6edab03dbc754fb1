"""Corpus-side machinery: CoNLL-U parsing, thread cleaning, mention counting.

Extraction is embarrassingly parallel over input shards. MentionCounts is
the mergeable reduction value: any partition of sentences across workers,
merged, must equal the serial result exactly.
"""

from __future__ import annotations

import csv
import json
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator, NamedTuple, Sequence

from gendermark.errors import ValidationError
from gendermark.lexicon import GenderAdjectiveLexicon, OccupationLexicon

MAX_SENTENCE_TOKENS = 10_000
_URL_MARKERS = ("http://", "https://", "www.")

NOUN = "NOUN"
AMOD = "amod"


class Token(NamedTuple):
    index: int
    form: str
    lemma: str
    upos: str
    head: int
    deprel: str


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]

    def __post_init__(self) -> None:
        n = len(self.tokens)
        for position, token in enumerate(self.tokens, start=1):
            if token.index != position:
                raise ValidationError(
                    f"token indices not contiguous: expected {position}, got {token.index}"
                )
            if not 0 <= token.head <= n:
                raise ValidationError(f"head {token.head} out of range for {n} tokens")
            if token.head == token.index:
                raise ValidationError(f"token {token.index} is its own head")

    def __len__(self) -> int:
        return len(self.tokens)


class ConlluError(ValidationError):
    """Malformed CoNLL-U input; carries the offending line number."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def parse_conllu(
    stream: IO[str] | Iterable[str], *, first_line: int = 1
) -> Iterator[Sentence]:
    """Lazily parse sentences from CoNLL-U text.

    Sentences are blank-line separated; token lines carry 10 tab-separated
    columns. Multiword-token ranges (ID "3-4") and empty nodes (ID "5.1")
    are skipped: they play no role in dependency extraction.
    """
    tokens: list[Token] = []
    for lineno, raw in enumerate(stream, start=first_line):
        line = raw.rstrip("\n").rstrip("\r")
        if not line:
            if tokens:
                yield Sentence(tuple(tokens))
                tokens = []
            continue
        if line[0] == "#":
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise ConlluError(lineno, f"expected 10 columns, got {len(cols)}")
        ident = cols[0]
        if "-" in ident or "." in ident:
            continue
        try:
            index = int(ident)
        except ValueError:
            raise ConlluError(lineno, f"non-integer token id {ident!r}") from None
        try:
            head = int(cols[6])
        except ValueError:
            raise ConlluError(lineno, f"non-integer HEAD {cols[6]!r}") from None
        tokens.append(Token(index, cols[1], cols[2], cols[3], head, cols[7]))
        if len(tokens) > MAX_SENTENCE_TOKENS:
            raise ConlluError(lineno, f"sentence exceeds {MAX_SENTENCE_TOKENS} tokens")
    if tokens:
        yield Sentence(tuple(tokens))


@dataclass
class ThreadNode:
    """One comment in a thread tree."""

    author: str
    subreddit: str
    body: str
    removed_flag: bool = False
    children: list["ThreadNode"] = field(default_factory=list)

    @classmethod
    def from_record(cls, record: dict) -> "ThreadNode":
        return cls(
            author=record.get("author", ""),
            subreddit=record.get("subreddit", ""),
            body=record.get("body", ""),
            removed_flag=bool(record.get("removed", False)),
            children=[cls.from_record(child) for child in record.get("children", [])],
        )


def read_thread_trees(stream: IO[str] | Iterable[str]) -> Iterator[ThreadNode]:
    """Read newline-delimited serialized thread trees."""
    for lineno, line in enumerate(stream, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"thread record on line {lineno} is not valid JSON") from exc
        yield ThreadNode.from_record(record)


def _node_pruned(node: ThreadNode, non_english_subreddits: frozenset[str]) -> bool:
    if "bot" in node.author.lower():
        return True
    if node.subreddit in non_english_subreddits:
        return True
    if node.removed_flag or not node.body.strip():
        return True
    lowered = node.body.lower()
    if any(marker in lowered for marker in _URL_MARKERS):
        return True
    # 70%-alphabetic rule over non-whitespace characters, Unicode letters.
    non_ws = [c for c in node.body if not c.isspace()]
    letters = sum(1 for c in non_ws if c.isalpha())
    if letters < 0.7 * len(non_ws):
        return True
    return False


def clean_reddit_threads(
    root: ThreadNode, non_english_subreddits: Iterable[str] = ()
) -> list[str]:
    """Apply the five pruning rules and flatten survivors pre-order.

    A pruned node takes its whole subtree with it. Survivors concatenate with
    single newlines into one document per thread; a fully pruned thread
    yields an empty list.
    """
    banned = frozenset(non_english_subreddits)
    parts: list[str] = []

    def walk(node: ThreadNode) -> None:
        if _node_pruned(node, banned):
            return
        parts.append(node.body)
        for child in node.children:
            walk(child)

    walk(root)
    if not parts:
        return []
    return ["\n".join(parts)]


class MentionEvent(NamedTuple):
    """One occupation-noun mention, with its gender mark if any."""

    occupation: str
    gender_mark: str  # "female" | "male" | "excluded" | "none"
    location: tuple[str, int, int]  # (document id, sentence index, token index)


_GENDER_FIELDS = ("female", "male", "excluded")


@dataclass
class MentionCounts:
    """Per-occupation mention counters; the mergeable accumulation unit.

    ``conflicts`` counts occupation tokens that carried amod gender
    adjectives from more than one class (each class still counts).
    """

    total: Counter = field(default_factory=Counter)
    female: Counter = field(default_factory=Counter)
    male: Counter = field(default_factory=Counter)
    nonbinary: Counter = field(default_factory=Counter)
    sentences: int = 0
    conflicts: int = 0

    def occupations(self) -> tuple[str, ...]:
        return tuple(sorted(self.total))

    def gendered(self, occupation: str) -> int:
        return self.female[occupation] + self.male[occupation]

    def validate(self) -> None:
        for occupation in self.total:
            marked = (
                self.female[occupation] + self.male[occupation] + self.nonbinary[occupation]
            )
            if marked > self.total[occupation]:
                raise ValidationError(
                    f"marked mentions exceed total for {occupation!r}: {marked} > {self.total[occupation]}"
                )


def merge(a: MentionCounts, b: MentionCounts) -> MentionCounts:
    """Fieldwise sum; commutative and associative with the all-zero identity."""
    return MentionCounts(
        total=a.total + b.total,
        female=a.female + b.female,
        male=a.male + b.male,
        nonbinary=a.nonbinary + b.nonbinary,
        sentences=a.sentences + b.sentences,
        conflicts=a.conflicts + b.conflicts,
    )


def extract_mentions(
    sentence: Sentence,
    occupations: OccupationLexicon,
    adjectives: GenderAdjectiveLexicon,
    document_id: str = "",
    sentence_index: int = 0,
) -> list[MentionEvent]:
    """Mention events for every occupation NOUN in the sentence.

    The gender mark comes from amod dependents whose lemma is a gender
    adjective. A noun with amod marks from several classes emits one event
    per distinct class (the accumulator counts the conflict).
    """
    events: list[MentionEvent] = []
    entries = occupations.entries
    tokens = sentence.tokens
    for token in tokens:
        if token.upos != NOUN:
            continue
        lemma = token.lemma.lower()
        if lemma not in entries:
            continue
        marks: set[str] = set()
        for dep in tokens:
            if dep.head == token.index and dep.deprel == AMOD:
                mark = adjectives.classify(dep.lemma.lower())
                if mark is not None:
                    marks.add(mark)
        location = (document_id, sentence_index, token.index)
        if not marks:
            events.append(MentionEvent(lemma, "none", location))
        else:
            for mark in sorted(marks):
                events.append(MentionEvent(lemma, mark, location))
    return events


def accumulate(
    events: Iterable[MentionEvent], into: MentionCounts | None = None
) -> MentionCounts:
    """Count events; every event contributes to the occupation total.

    Distinct gender classes at one location are each counted, and the
    location is flagged as a conflict.
    """
    counts = into if into is not None else MentionCounts()
    location_classes: dict[tuple[str, int, int], int] = {}
    for event in events:
        counts.total[event.occupation] += 1
        if event.gender_mark == "female":
            counts.female[event.occupation] += 1
        elif event.gender_mark == "male":
            counts.male[event.occupation] += 1
        elif event.gender_mark == "excluded":
            counts.nonbinary[event.occupation] += 1
        if event.gender_mark != "none":
            seen = location_classes.get(event.location, 0)
            if seen == 1:
                counts.conflicts += 1
            location_classes[event.location] = seen + 1
    return counts


def count_sentences(
    sentences: Iterable[Sentence],
    occupations: OccupationLexicon,
    adjectives: GenderAdjectiveLexicon,
    document_id: str = "",
) -> MentionCounts:
    """Extract and accumulate over a sentence stream (reference path)."""
    counts = MentionCounts()
    for index, sentence in enumerate(sentences):
        accumulate(
            extract_mentions(sentence, occupations, adjectives, document_id, index),
            into=counts,
        )
        counts.sentences += 1
    return counts


def _compile_prefilter(occupations: OccupationLexicon) -> re.Pattern[str]:
    alternatives = sorted(occupations.entries, key=len, reverse=True)
    return re.compile("|".join(re.escape(lemma) for lemma in alternatives), re.IGNORECASE)


def scan_conllu(
    stream: IO[str],
    occupations: OccupationLexicon,
    adjectives: GenderAdjectiveLexicon,
    document_id: str = "",
    chunk_chars: int = 1 << 22,
) -> MentionCounts:
    """Fast fused parse-and-count over a CoNLL-U stream.

    Reads in large chunks split at sentence boundaries and fully parses only
    sentences whose raw text can contain an occupation lemma. Skipped
    sentences still get a structural check (10 tab-separated columns per
    token line); their HEAD fields are not validated since they cannot
    contribute counts. Output is identical to parse -> extract -> accumulate.
    """
    prefilter = _compile_prefilter(occupations)
    counts = MentionCounts()
    carry = ""
    base_line = 1
    sentence_index = 0
    while True:
        chunk = stream.read(chunk_chars)
        if not chunk:
            blocks = [carry] if carry else []
            final = True
        else:
            text = carry + chunk
            blocks = text.split("\n\n")
            carry = blocks.pop()
            final = False
        for block in blocks:
            if block.strip("\n"):
                sentence_index = _scan_block(
                    block, base_line, prefilter, occupations, adjectives,
                    document_id, sentence_index, counts,
                )
            base_line += block.count("\n") + 2
        if final:
            break
    counts.sentences = sentence_index
    return counts


def _scan_block(
    block: str,
    base_line: int,
    prefilter: re.Pattern[str],
    occupations: OccupationLexicon,
    adjectives: GenderAdjectiveLexicon,
    document_id: str,
    sentence_index: int,
    counts: MentionCounts,
) -> int:
    # A block between double newlines holds at most one sentence.
    if prefilter.search(block) is None:
        if _check_block_structure(block, base_line):
            sentence_index += 1
        return sentence_index
    for sentence in parse_conllu(block.split("\n"), first_line=base_line):
        accumulate(
            extract_mentions(sentence, occupations, adjectives, document_id, sentence_index),
            into=counts,
        )
        sentence_index += 1
    return sentence_index


def _check_block_structure(block: str, base_line: int) -> bool:
    """10-column check for a sentence that will not be parsed in full.

    Returns whether the block contains any token line.
    """
    token_lines = 0
    for offset, line in enumerate(block.split("\n")):
        if not line or line[0] == "#":
            continue
        tabs = line.count("\t")
        if tabs != 9:
            raise ConlluError(base_line + offset, f"expected 10 columns, got {tabs + 1}")
        token_lines += 1
    if token_lines > MAX_SENTENCE_TOKENS:
        raise ConlluError(base_line, f"sentence exceeds {MAX_SENTENCE_TOKENS} tokens")
    return token_lines > 0


COUNTS_HEADER = ("occupation", "total", "male", "female", "nonbinary")


def write_counts_csv(counts: MentionCounts, path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(COUNTS_HEADER)
        for occupation in counts.occupations():
            writer.writerow(
                [
                    occupation,
                    counts.total[occupation],
                    counts.male[occupation],
                    counts.female[occupation],
                    counts.nonbinary[occupation],
                ]
            )


def read_counts_csv(path: str | Path) -> MentionCounts:
    counts = MentionCounts()
    with Path(path).open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or not set(COUNTS_HEADER).issubset(reader.fieldnames):
            raise ValidationError(
                f"counts CSV needs columns {','.join(COUNTS_HEADER)}; got {reader.fieldnames}"
            )
        for record in reader:
            occupation = record["occupation"].strip()
            counts.total[occupation] += int(record["total"])
            counts.male[occupation] += int(record["male"])
            counts.female[occupation] += int(record["female"])
            counts.nonbinary[occupation] += int(record["nonbinary"])
    counts.validate()
    return counts


def shard_paths(paths: Sequence[str | Path]) -> list[Path]:
    resolved = [Path(p) for p in paths]
    for path in resolved:
        if not path.exists():
            raise ValidationError(f"corpus shard not found: {path}")
    return resolved
