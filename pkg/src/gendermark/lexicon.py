"""Occupation and gender-adjective lexicons plus labor-statistics ingestion.

The labor table supplies the ground-truth marginal over (gender, occupation):
each occupation's employment count and share of women workers, from which
``labor_marginal`` builds the joint P(gender, occupation).
"""

from __future__ import annotations

import configparser
import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from gendermark.errors import ValidationError

logger = logging.getLogger(__name__)

FEMALE = "female"
MALE = "male"

DEFAULT_FEMALE_TERMS = frozenset({"female", "feminine", "woman"})
DEFAULT_MALE_TERMS = frozenset({"male", "masculine", "man"})
DEFAULT_EXCLUDED_TERMS = frozenset({"non-binary", "nonbinary"})


@dataclass(frozen=True)
class OccupationLexicon:
    """Occupation lemmas plus the maps used to match labor-statistics rows.

    ``aliases`` maps a statistics title (e.g. "Chief Executives") to the
    lemma it stands for; ``aggregation_patterns`` maps a lemma to a substring
    that collects all titles containing it (e.g. "attendant").
    """

    entries: frozenset[str]
    aliases: Mapping[str, str] = field(default_factory=dict)
    aggregation_patterns: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValidationError("occupation lexicon is empty")
        for lemma in self.entries:
            if lemma != lemma.lower():
                raise ValidationError(f"occupation lemma not lowercase: {lemma!r}")
            if any(c.isspace() for c in lemma):
                raise ValidationError(f"occupation lemma contains whitespace: {lemma!r}")
        for title, lemma in self.aliases.items():
            if lemma not in self.entries:
                raise ValidationError(f"alias target {lemma!r} (for {title!r}) not in lexicon")
        for lemma in self.aggregation_patterns:
            if lemma not in self.entries:
                raise ValidationError(f"aggregation key {lemma!r} not in lexicon")


@dataclass(frozen=True)
class GenderAdjectiveLexicon:
    """The three disjoint adjective sets. Excluded terms are tallied in
    counts but never enter the gender alphabet."""

    female_terms: frozenset[str] = DEFAULT_FEMALE_TERMS
    male_terms: frozenset[str] = DEFAULT_MALE_TERMS
    excluded_terms: frozenset[str] = DEFAULT_EXCLUDED_TERMS

    def __post_init__(self) -> None:
        sets = {
            "female": self.female_terms,
            "male": self.male_terms,
            "excluded": self.excluded_terms,
        }
        for a in sets:
            for b in sets:
                if a < b and sets[a] & sets[b]:
                    overlap = sorted(sets[a] & sets[b])
                    raise ValidationError(f"adjective sets {a}/{b} overlap: {overlap}")

    def classify(self, lemma: str) -> str | None:
        """Gender class of a lowercased lemma, or None if not a gender adjective."""
        if lemma in self.female_terms:
            return "female"
        if lemma in self.male_terms:
            return "male"
        if lemma in self.excluded_terms:
            return "excluded"
        return None


@dataclass(frozen=True)
class LaborRow:
    women_share: float
    total_employed: float


@dataclass(frozen=True)
class LaborTable:
    """Per-occupation employment totals and women shares.

    ``missing`` lists lexicon occupations with no matching statistics row;
    they are excluded from downstream analyses rather than imputed.
    """

    rows: Mapping[str, LaborRow]
    missing: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        for lemma, row in self.rows.items():
            if not 0.0 <= row.women_share <= 1.0:
                raise ValidationError(f"women share for {lemma!r} outside [0,1]: {row.women_share}")
            if row.total_employed < 0:
                raise ValidationError(f"negative employment for {lemma!r}")

    def femaleness(self, lemma: str) -> float:
        return self.rows[lemma].women_share


@dataclass(frozen=True)
class JointGJ:
    """Joint distribution over (gender, occupation) from labor statistics.

    Keys of ``p`` are (gender, occupation) with gender in {female, male}.
    """

    p: Mapping[tuple[str, str], float]

    def __post_init__(self) -> None:
        total = 0.0
        for key, value in self.p.items():
            if value < 0:
                raise ValidationError(f"negative probability at {key}")
            total += value
        if abs(total - 1.0) > 1e-9:
            raise ValidationError(f"joint mass sums to {total!r}, not 1")

    @property
    def occupations(self) -> tuple[str, ...]:
        return tuple(sorted({occ for _, occ in self.p}))

    def occupation_weight(self, occupation: str) -> float:
        return self.p[(FEMALE, occupation)] + self.p[(MALE, occupation)]

    def conditional_female(self, occupation: str) -> float:
        """P(G=female | J=occupation)."""
        weight = self.occupation_weight(occupation)
        if weight == 0:
            raise ValidationError(f"occupation {occupation!r} has zero mass")
        return self.p[(FEMALE, occupation)] / weight


def _read_lemma_lines(path: Path) -> list[str]:
    lemmas = []
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lemmas.append(line)
    return lemmas


def load_lexicons(
    occupation_file: str | Path, adjective_config: str | Path
) -> tuple[OccupationLexicon, GenderAdjectiveLexicon]:
    """Load both lexicons from their files.

    The occupation file holds one lemma per line with ``#`` comments. The
    config file has sections [female], [male], [excluded] listing adjective
    lemmas, plus [aliases] (title = lemma) and [aggregate] (lemma = pattern).
    A missing adjective section falls back to the built-in default set.
    """
    occupation_file = Path(occupation_file)
    adjective_config = Path(adjective_config)
    if not occupation_file.exists():
        raise ValidationError(f"occupation file not found: {occupation_file}")
    if not adjective_config.exists():
        raise ValidationError(f"adjective config not found: {adjective_config}")

    seen: set[str] = set()
    for lemma in _read_lemma_lines(occupation_file):
        normalized = lemma.lower()
        if normalized != lemma:
            logger.warning("normalized occupation lemma %r to lowercase", lemma)
        if normalized in seen:
            logger.warning("duplicate occupation lemma %r dropped", normalized)
            continue
        seen.add(normalized)
    if not seen:
        raise ValidationError(f"occupation file {occupation_file} contains no lemmas")

    parser = configparser.ConfigParser(allow_no_value=True, delimiters=("=",))
    parser.optionxform = str  # keep case of alias titles
    parser.read(adjective_config, encoding="utf-8")

    def term_set(section: str, default: frozenset[str]) -> frozenset[str]:
        if not parser.has_section(section):
            return default
        terms = set()
        for key in parser.options(section):
            term = key.strip().lower()
            if term != key.strip():
                logger.warning("normalized adjective %r to lowercase", key)
            terms.add(term)
        return frozenset(terms)

    adjectives = GenderAdjectiveLexicon(
        female_terms=term_set("female", DEFAULT_FEMALE_TERMS),
        male_terms=term_set("male", DEFAULT_MALE_TERMS),
        excluded_terms=term_set("excluded", DEFAULT_EXCLUDED_TERMS),
    )

    aliases: dict[str, str] = {}
    if parser.has_section("aliases"):
        for title in parser.options("aliases"):
            aliases[title] = (parser.get("aliases", title) or "").strip().lower()
    aggregation: dict[str, str] = {}
    if parser.has_section("aggregate"):
        for lemma in parser.options("aggregate"):
            aggregation[lemma.strip().lower()] = (parser.get("aggregate", lemma) or "").strip().lower()

    occupations = OccupationLexicon(
        entries=frozenset(seen), aliases=aliases, aggregation_patterns=aggregation
    )
    return occupations, adjectives


def load_labor_stats(csv_path: str | Path, lexicon: OccupationLexicon) -> LaborTable:
    """Build the per-occupation labor table from a statistics CSV.

    Matching order per occupation lemma: direct title match, alias titles,
    then substring aggregation. Aggregation sums employment and takes the
    employment-weighted mean of the women percentage, which is the only
    weighting that keeps recomputed counts consistent.
    """
    csv_path = Path(csv_path)
    if not csv_path.exists():
        raise ValidationError(f"labor statistics file not found: {csv_path}")

    raw_rows: list[tuple[str, float, float]] = []
    with csv_path.open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        required = {"title", "total_employed", "women_percent"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise ValidationError(
                f"labor CSV must have columns title,total_employed,women_percent; got {reader.fieldnames}"
            )
        for record in reader:
            title = record["title"].strip()
            try:
                employed = float(record["total_employed"])
                women_percent = float(record["women_percent"])
            except ValueError as exc:
                raise ValidationError(f"non-numeric labor row for {title!r}") from exc
            if not 0.0 <= women_percent <= 100.0:
                raise ValidationError(
                    f"women_percent outside [0,100] for {title!r}: {women_percent}"
                )
            if employed < 0:
                raise ValidationError(f"negative employment for {title!r}")
            raw_rows.append((title, employed, women_percent))

    alias_lookup = {title.lower(): lemma for title, lemma in lexicon.aliases.items()}

    def matches(lemma: str, title: str) -> bool:
        lowered = title.lower()
        if lowered == lemma:
            return True
        if alias_lookup.get(lowered) == lemma:
            return True
        pattern = lexicon.aggregation_patterns.get(lemma)
        return pattern is not None and pattern in lowered

    rows: dict[str, LaborRow] = {}
    missing: list[str] = []
    for lemma in sorted(lexicon.entries):
        matched = [(emp, pct) for title, emp, pct in raw_rows if matches(lemma, title)]
        if not matched:
            missing.append(lemma)
            continue
        total = sum(emp for emp, _ in matched)
        if total > 0:
            share = sum(emp * pct for emp, pct in matched) / total / 100.0
        else:
            share = sum(pct for _, pct in matched) / len(matched) / 100.0
        rows[lemma] = LaborRow(women_share=share, total_employed=total)

    if missing:
        logger.warning("occupations missing from labor statistics: %s", ", ".join(missing))
    return LaborTable(rows=rows, missing=tuple(missing))


def labor_marginal(table: LaborTable) -> JointGJ:
    """Joint P(gender, occupation) implied by employment counts and shares."""
    if not table.rows:
        raise ValidationError("labor table is empty")
    grand_total = sum(row.total_employed for row in table.rows.values())
    if grand_total <= 0:
        raise ValidationError("total employment is zero")
    p: dict[tuple[str, str], float] = {}
    for lemma, row in table.rows.items():
        weight = row.total_employed / grand_total
        p[(FEMALE, lemma)] = row.women_share * weight
        p[(MALE, lemma)] = (1.0 - row.women_share) * weight
    return JointGJ(p=p)
