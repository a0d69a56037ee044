"""Exception types shared across the package.

Every error carries enough context in its message to diagnose the offending
input without a debugger; none of them wrap other exceptions.
"""

from __future__ import annotations


class CrsPredictError(Exception):
    """Base class for all package errors."""


class UnknownLabel(CrsPredictError):
    """A categorical text label has no entry in the feature's code dictionary."""

    def __init__(self, feature: str, label: str):
        super().__init__(f"feature {feature!r} has no code for label {label!r}")
        self.feature = feature
        self.label = label


class MissingFollowUp(CrsPredictError):
    """Six-month score absent: the row cannot be labeled."""


class SchemaMismatch(CrsPredictError):
    """Input columns do not cover the declared schema."""


class DuplicateId(CrsPredictError):
    """Two rows carry the same case identifier."""


class DegenerateClass(CrsPredictError):
    """A class would end up with an empty train or test side."""


class LengthMismatch(CrsPredictError):
    """Paired label vectors differ in length."""


class DimensionMismatch(CrsPredictError):
    """A row's feature dimension does not match the model."""


class NonFinite(CrsPredictError):
    """Training diverged into inf/nan territory."""


class NoConvergence(CrsPredictError):
    """Dual optimization exhausted its pass budget with KKT still violated."""


class WeightMismatch(CrsPredictError):
    """Vote weights do not line up one-per-member."""


class DegenerateFold(CrsPredictError):
    """A cross-validation fold lost one of the classes."""


class UnknownFeature(CrsPredictError):
    """Named feature is not part of the dataset."""


class BudgetTooSmall(CrsPredictError):
    """Sampling budget below the minimum needed for attribution."""


class DegenerateData(CrsPredictError):
    """Data matrix has zero total variance."""


class TooFewCases(CrsPredictError):
    """Not enough cases to fill the requested difficulty tiers."""


class IncompleteCoverage(CrsPredictError):
    """A rater's calls do not cover every benchmark case."""


class UnknownCase(CrsPredictError):
    """Label submitted for a case id the store does not serve."""


class UnknownRater(CrsPredictError):
    """Rater token or id not registered."""


class MalformedConfidence(CrsPredictError):
    """Confidence outside the 1..5 scale."""
