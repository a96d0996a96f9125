"""Quality assessment of GPAI training-content public summaries.

Rubric catalogs, per-summary assessments, weighted/normalized transparency
and usefulness scoring with letter grades, a registry of discovered
summaries with pinned archived copies, and report/static-site generation.
"""

__version__ = "0.1.0"

from .assessment import (
    Assessment,
    PublishedForm,
    SummaryMeta,
    Verdict,
    VerdictValue,
    applicable_metrics,
    dumps_assessment,
    load_assessment,
)
from .catalog import (
    ApplicabilityRule,
    Catalog,
    Dimension,
    Group,
    Metric,
    Section,
    dumps_catalog,
    load_catalog,
    load_reference_catalog,
    section_counts,
    validate_catalog,
)
from .scoring import (
    AggregationConfig,
    DEFAULT_GRADE_SCALE,
    GradeScale,
    ScoreCard,
    ScoreValue,
    assign_grade,
    score_summary,
)

__all__ = [
    "AggregationConfig",
    "ApplicabilityRule",
    "Assessment",
    "Catalog",
    "DEFAULT_GRADE_SCALE",
    "Dimension",
    "GradeScale",
    "Group",
    "Metric",
    "PublishedForm",
    "ScoreCard",
    "ScoreValue",
    "Section",
    "SummaryMeta",
    "Verdict",
    "VerdictValue",
    "applicable_metrics",
    "assign_grade",
    "dumps_assessment",
    "dumps_catalog",
    "load_assessment",
    "load_catalog",
    "load_reference_catalog",
    "score_summary",
    "section_counts",
    "validate_catalog",
]
