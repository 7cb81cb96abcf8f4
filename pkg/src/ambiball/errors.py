"""Exception hierarchy.

Every error carries a short machine-readable ``code`` that the CLI reports
in its diagnostics.
"""


class AmbiballError(Exception):
    code = "error"


class MetricError(AmbiballError, ValueError):
    code = "metric"


class Asymmetry(MetricError):
    code = "asymmetry"

    def __init__(self, i, j):
        self.i, self.j = i, j
        super().__init__(f"dist[{i}][{j}] != dist[{j}][{i}]")


class NonzeroDiagonal(MetricError):
    code = "nonzero_diagonal"

    def __init__(self, i):
        self.i = i
        super().__init__(f"dist[{i}][{i}] != 0")


class NegativeEntry(MetricError):
    code = "negative_entry"

    def __init__(self, i, j):
        self.i, self.j = i, j
        super().__init__(f"dist[{i}][{j}] < 0")


class TriangleViolation(MetricError):
    """``dist[i][j] > dist[i][k] + dist[k][j]``."""

    code = "triangle_violation"

    def __init__(self, i, j, k):
        self.i, self.j, self.k = i, j, k
        self.triple = (i, j, k)
        super().__init__(f"dist[{i}][{j}] > dist[{i}][{k}] + dist[{k}][{j}]")


class DuplicatePoint(MetricError):
    code = "duplicate_point"


class DimensionMismatch(MetricError):
    code = "dimension_mismatch"


class MeasureError(AmbiballError, ValueError):
    code = "measure"


class WeightSumError(MeasureError):
    code = "weight_sum"


class NegativeWeight(MeasureError):
    code = "negative_weight"


class SpaceMismatch(AmbiballError, ValueError):
    code = "space_mismatch"


class GammaOutOfBounds(AmbiballError, ValueError):
    code = "gamma_out_of_bounds"


class PairIndexError(AmbiballError, ValueError):
    code = "pair_index"


class EmptyCandidates(AmbiballError, ValueError):
    code = "empty_candidates"


class InfeasibleBall(AmbiballError, ValueError):
    code = "infeasible_ball"


class SpaceTooLarge(AmbiballError, ValueError):
    code = "space_too_large"


class LPError(AmbiballError, RuntimeError):
    code = "lp"


class Unbounded(AmbiballError, RuntimeError):
    code = "unbounded"


class TooManyBases(AmbiballError, RuntimeError):
    code = "too_many_bases"


class ParseError(AmbiballError, ValueError):
    code = "parse"
