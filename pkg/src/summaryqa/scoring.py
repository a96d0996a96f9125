"""Deterministic score computation: cells, section groups, overalls, grades.

All arithmetic is exact (``fractions.Fraction``); percentages are only
rounded to two decimals at render time, never internally.  Scoring is a pure
function of (catalog, assessment, config), so identical inputs always yield
identical score cards regardless of execution order.

A metric *contributes* to scoring when it is applicable under the recorded
gate answers and carries a scoreable verdict.  Applicable metrics without a
scoreable verdict are rejected by assessment validation; when scoring is
invoked directly on such an assessment (e.g. the degenerate all
not-applicable case) they simply contribute nothing, which yields N/A cells
rather than an error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .assessment import Assessment, SummaryMeta, Verdict, applicability_map
from .catalog import (
    Catalog,
    DIMENSION_ORDER,
    Dimension,
    Group,
    SECTION_ORDER,
    Section,
)
from .errors import InapplicableVerdict


@dataclass(frozen=True)
class ScoreValue:
    """A normalized percentage in [0, 100], or N/A when nothing applies."""

    pct: Fraction | None

    @classmethod
    def percentage(cls, pct: Fraction | int) -> "ScoreValue":
        pct = Fraction(pct)
        if not 0 <= pct <= 100:
            raise ValueError(f"percentage out of range: {pct}")
        return cls(pct)

    @classmethod
    def na(cls) -> "ScoreValue":
        return cls(None)

    @property
    def is_na(self) -> bool:
        return self.pct is None

    @property
    def display(self) -> str:
        """Two-decimal rendering, ``N/A`` for not-applicable."""
        if self.pct is None:
            return "N/A"
        return format_percentage(self.pct)


def format_percentage(pct: Fraction) -> str:
    """Render an exact percentage at two decimals, rounding half up."""
    hundredths = math.floor(pct * 100 + Fraction(1, 2))
    return f"{hundredths // 100}.{hundredths % 100:02d}"


# ---------------------------------------------------------------------------
# Grades
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GradeScale:
    """Ordered (letter, inclusive minimum percentage) bands, best first."""

    bands: tuple[tuple[str, Fraction], ...]

    def check(self) -> None:
        if not self.bands:
            raise ValueError("grade scale has no bands")
        letters = [letter for letter, _ in self.bands]
        if len(set(letters)) != len(letters):
            raise ValueError("grade letters must be unique")
        mins = [m for _, m in self.bands]
        if any(a <= b for a, b in zip(mins, mins[1:])):
            raise ValueError("band minimums must be strictly decreasing")
        if mins[-1] != 0:
            raise ValueError("last band minimum must be 0 so the scale covers [0, 100]")

    def letter_rank(self, letter: str) -> int:
        """Position in the scale; 0 is the best letter."""
        for i, (name, _) in enumerate(self.bands):
            if name == letter:
                return i
        raise ValueError(f"unknown grade letter {letter!r}")


DEFAULT_GRADE_SCALE = GradeScale(
    bands=(
        ("A+", Fraction(95)),
        ("A", Fraction(90)),
        ("B+", Fraction(80)),
        ("B", Fraction(75)),
        ("C+", Fraction(70)),
        ("C", Fraction(60)),
        ("D", Fraction(30)),
        ("F", Fraction(0)),
    )
)


def assign_grade(score: ScoreValue, scale: GradeScale = DEFAULT_GRADE_SCALE) -> str:
    """Letter of the first band whose minimum is at or below the score."""
    if score.is_na:
        return "N/A"
    for letter, min_pct in scale.bands:
        if score.pct >= min_pct:
            return letter
    return scale.bands[-1][0]


# ---------------------------------------------------------------------------
# Aggregation configuration
# ---------------------------------------------------------------------------


class SectionAggregation(Enum):
    """How a section's Transparency/Usefulness score combines its metrics."""

    POOLED_WEIGHTED = "pooled-weighted"
    MEAN_OF_DIMENSIONS = "mean-of-dimensions"


class OverallAggregation(Enum):
    """How the overall group score combines the sections."""

    POOLED_WEIGHTED = "pooled-weighted"
    MEAN_OF_SECTIONS = "mean-of-sections"


@dataclass(frozen=True)
class AggregationConfig:
    section_group_strategy: SectionAggregation = SectionAggregation.POOLED_WEIGHTED
    overall_strategy: OverallAggregation = OverallAggregation.POOLED_WEIGHTED
    grade_scale: GradeScale = field(default_factory=lambda: DEFAULT_GRADE_SCALE)


DEFAULT_CONFIG = AggregationConfig()


# ---------------------------------------------------------------------------
# Score computation
# ---------------------------------------------------------------------------


def metric_score(verdict: Verdict, weight: Fraction) -> Fraction:
    """Weighted score of one verdict: numeric value times weight."""
    if not verdict.value.is_scoreable:
        raise InapplicableVerdict("not-applicable verdicts have no numeric value")
    if weight <= 0:
        raise ValueError(f"weight must be positive, got {weight}")
    return verdict.value.numeric * weight


class _Pool:
    """Accumulated weighted score and weight for one slice of metrics."""

    __slots__ = ("achieved", "weight")

    def __init__(self) -> None:
        self.achieved = Fraction(0)
        self.weight = Fraction(0)

    def add(self, value: Fraction, weight: Fraction) -> None:
        self.achieved += value * weight
        self.weight += weight

    def merge(self, other: "_Pool") -> None:
        self.achieved += other.achieved
        self.weight += other.weight

    def score(self) -> ScoreValue:
        if self.weight == 0:
            return ScoreValue.na()
        return ScoreValue.percentage(100 * self.achieved / self.weight)


def _cell_pools(catalog: Catalog, assessment: Assessment) -> dict[tuple[Section, Dimension], _Pool]:
    """One pass over contributing metrics, accumulated per (section, dimension)."""
    amap = applicability_map(catalog, assessment)
    pools: dict[tuple[Section, Dimension], _Pool] = {
        (section, dimension): _Pool() for section in SECTION_ORDER for dimension in DIMENSION_ORDER
    }
    for metric in catalog.metrics:
        if not amap[metric.id]:
            continue
        verdict = assessment.verdicts.get(metric.id)
        if verdict is None or not verdict.value.is_scoreable:
            continue
        pools[(metric.section, metric.dimension)].add(verdict.value.numeric, metric.weight)
    return pools


def _mean(parts: list[ScoreValue]) -> ScoreValue:
    values = [part.pct for part in parts if not part.is_na]
    if not values:
        return ScoreValue.na()
    return ScoreValue.percentage(sum(values, Fraction(0)) / len(values))


def _pooled(pools: dict[tuple[Section, Dimension], _Pool], sections, dimensions) -> ScoreValue:
    merged = _Pool()
    for section in sections:
        for dimension in dimensions:
            merged.merge(pools[(section, dimension)])
    return merged.score()


def _group_dimensions(group: Group) -> tuple[Dimension, ...]:
    return tuple(d for d in DIMENSION_ORDER if d.group is group)


def cell_score(catalog: Catalog, assessment: Assessment, section: Section, dimension: Dimension) -> ScoreValue:
    """Weighted-normalized score of one (section, dimension) cell."""
    pools = _cell_pools(catalog, assessment)
    return pools[(section, dimension)].score()


def section_group_score(
    catalog: Catalog,
    assessment: Assessment,
    section: Section,
    group: Group,
    config: AggregationConfig = DEFAULT_CONFIG,
) -> ScoreValue:
    pools = _cell_pools(catalog, assessment)
    return _section_group_from_pools(pools, section, group, config)


def _section_group_from_pools(
    pools: dict[tuple[Section, Dimension], _Pool],
    section: Section,
    group: Group,
    config: AggregationConfig,
) -> ScoreValue:
    dims = _group_dimensions(group)
    if config.section_group_strategy is SectionAggregation.POOLED_WEIGHTED:
        return _pooled(pools, [section], dims)
    cells = [pools[(section, d)].score() for d in dims]
    return _mean(cells)


def overall_scores(
    catalog: Catalog,
    assessment: Assessment,
    config: AggregationConfig = DEFAULT_CONFIG,
) -> dict[Group, ScoreValue]:
    pools = _cell_pools(catalog, assessment)
    return _overall_from_pools(pools, config)


def _overall_from_pools(
    pools: dict[tuple[Section, Dimension], _Pool],
    config: AggregationConfig,
) -> dict[Group, ScoreValue]:
    result: dict[Group, ScoreValue] = {}
    for group in Group:
        dims = _group_dimensions(group)
        if config.overall_strategy is OverallAggregation.POOLED_WEIGHTED:
            result[group] = _pooled(pools, SECTION_ORDER, dims)
        else:
            sections = [_section_group_from_pools(pools, s, group, config) for s in SECTION_ORDER]
            result[group] = _mean(sections)
    return result


def _dimension_overall_from_pools(
    pools: dict[tuple[Section, Dimension], _Pool],
    config: AggregationConfig,
) -> dict[Dimension, ScoreValue]:
    result: dict[Dimension, ScoreValue] = {}
    for dimension in DIMENSION_ORDER:
        if config.overall_strategy is OverallAggregation.POOLED_WEIGHTED:
            result[dimension] = _pooled(pools, SECTION_ORDER, [dimension])
        else:
            cells = [pools[(s, dimension)].score() for s in SECTION_ORDER]
            result[dimension] = _mean(cells)
    return result


@dataclass(frozen=True)
class ScoreCard:
    """Full score matrix for one assessed summary."""

    meta: SummaryMeta
    catalog_ref: str
    config_used: AggregationConfig
    per_cell: dict[tuple[Section, Dimension], ScoreValue]
    per_section_group: dict[tuple[Section, Group], ScoreValue]
    per_dimension_overall: dict[Dimension, ScoreValue]
    overall: dict[Group, ScoreValue]
    grades: dict[Group, str]


def score_summary(
    catalog: Catalog,
    assessment: Assessment,
    config: AggregationConfig = DEFAULT_CONFIG,
) -> ScoreCard:
    """Compute the complete score card for one assessment."""
    config.grade_scale.check()
    pools = _cell_pools(catalog, assessment)

    per_cell = {
        (section, dimension): pools[(section, dimension)].score()
        for section in SECTION_ORDER
        for dimension in DIMENSION_ORDER
    }
    per_section_group = {
        (section, group): _section_group_from_pools(pools, section, group, config)
        for section in SECTION_ORDER
        for group in Group
    }
    overall = _overall_from_pools(pools, config)
    grades = {group: assign_grade(overall[group], config.grade_scale) for group in Group}

    return ScoreCard(
        meta=assessment.meta,
        catalog_ref=assessment.catalog_ref,
        config_used=config,
        per_cell=per_cell,
        per_section_group=per_section_group,
        per_dimension_overall=_dimension_overall_from_pools(pools, config),
        overall=overall,
        grades=grades,
    )
