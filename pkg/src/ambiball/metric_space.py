"""Finite metric spaces and inflated point sets."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    Asymmetry,
    DimensionMismatch,
    DuplicatePoint,
    MetricError,
    NegativeEntry,
    NonzeroDiagonal,
    ParseError,
    TriangleViolation,
)

METRIC_TOL = 1e-12
METRIC_KINDS = ("euclidean", "manhattan", "chebyshev")


class FiniteMetricSpace:
    """A labelled finite point set with a validated distance matrix.

    Instances are immutable; build them with :func:`validate_metric` or
    :func:`from_points`.
    """

    __slots__ = ("labels", "dist", "_index", "_key")

    def __init__(self, labels: Sequence[str], dist: np.ndarray):
        dist = np.array(dist, dtype=float)
        dist.setflags(write=False)
        self.labels = tuple(str(lab) for lab in labels)
        self.dist = dist
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        self._key = (self.labels, dist.tobytes())

    def __len__(self):
        return len(self.labels)

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, FiniteMetricSpace) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"FiniteMetricSpace(labels={list(self.labels)!r})"

    def index(self, label) -> int:
        if isinstance(label, (int, np.integer)) and not isinstance(label, bool):
            if not 0 <= label < len(self):
                raise IndexError(f"point index {label} out of range")
            return int(label)
        try:
            return self._index[str(label)]
        except KeyError:
            raise ParseError(f"unknown point label {label!r}") from None

    @property
    def diameter(self) -> float:
        return float(self.dist.max()) if len(self) else 0.0

    def distinct_distances(self, rows=None, cols=None) -> np.ndarray:
        """Sorted distinct distances, optionally restricted to a sub-block."""
        block = self.dist
        if rows is not None:
            block = block[np.asarray(rows)]
        if cols is not None:
            block = block[:, np.asarray(cols)]
        return np.unique(block)

    def exceeds(self, eps) -> np.ndarray:
        """Boolean matrix ``dist > eps`` with an exact comparison.

        Rational ``eps`` is compared against the exact binary value of every
        stored distance.
        """
        if isinstance(eps, Fraction):
            flat = [Fraction(v) > eps for v in self.dist.ravel().tolist()]
            return np.array(flat, dtype=bool).reshape(self.dist.shape)
        return self.dist > eps

    def near_threshold(self, eps, tol: float = METRIC_TOL) -> bool:
        """True when some off-diagonal distance lies within ``tol`` of ``eps``."""
        off = ~np.eye(len(self), dtype=bool)
        return bool(np.any(np.abs(self.dist[off] - float(eps)) <= tol))

    def to_dict(self) -> dict:
        return {"labels": list(self.labels), "dist": self.dist.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "FiniteMetricSpace":
        if not isinstance(data, dict):
            raise ParseError("space must be a JSON object")
        if "dist" in data:
            labels = data.get("labels")
            return validate_metric(data["dist"], labels)
        if "points" in data:
            return from_points(data["points"], data.get("metric", "euclidean"), data.get("labels"))
        raise ParseError("space needs either 'dist' or 'points'")


@dataclass(frozen=True)
class PointSet:
    """Sorted, duplicate-free indices into a :class:`FiniteMetricSpace`."""

    indices: tuple

    def __post_init__(self):
        idx = tuple(sorted(int(i) for i in self.indices))
        if len(set(idx)) != len(idx):
            raise ValueError("duplicate indices in PointSet")
        if idx and idx[0] < 0:
            raise IndexError("negative point index")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def of(cls, space: FiniteMetricSpace, points: Iterable) -> "PointSet":
        return cls(tuple(sorted({space.index(p) for p in points})))

    @classmethod
    def full(cls, space: FiniteMetricSpace) -> "PointSet":
        return cls(tuple(range(len(space))))

    def __iter__(self):
        return iter(self.indices)

    def __len__(self):
        return len(self.indices)

    def __contains__(self, i):
        return i in self.indices

    def __or__(self, other: "PointSet") -> "PointSet":
        return PointSet(tuple(set(self.indices) | set(other.indices)))

    def __le__(self, other: "PointSet") -> bool:
        return set(self.indices) <= set(other.indices)

    def labels(self, space: FiniteMetricSpace) -> list:
        return [space.labels[i] for i in self.indices]


def validate_metric(dist, labels: Sequence[str] | None = None) -> FiniteMetricSpace:
    """Check the metric axioms and wrap ``dist`` as a space.

    Raises the first violated axiom, scanning indices in row-major order.
    """
    try:
        d = np.array(dist, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"distance matrix is not numeric: {exc}") from None
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise DimensionMismatch(f"distance matrix must be square, got shape {d.shape}")
    if not np.all(np.isfinite(d)):
        raise MetricError("distance matrix has non-finite entries")
    n = d.shape[0]
    if labels is None:
        labels = [f"p{i}" for i in range(n)]
    labels = [str(lab) for lab in labels]
    if len(labels) != n:
        raise DimensionMismatch(f"{len(labels)} labels for {n} points")
    if len(set(labels)) != n:
        raise DuplicatePoint("labels must be unique")

    neg = np.argwhere(d < 0)
    if len(neg):
        raise NegativeEntry(*map(int, neg[0]))
    diag = np.nonzero(np.diag(d) != 0)[0]
    if len(diag):
        raise NonzeroDiagonal(int(diag[0]))
    asym = np.argwhere(np.abs(d - d.T) > METRIC_TOL)
    if len(asym):
        raise Asymmetry(*map(int, asym[0]))
    d = 0.5 * (d + d.T)
    off = ~np.eye(n, dtype=bool)
    zero = np.argwhere((d == 0) & off)
    if len(zero):
        i, j = map(int, zero[0])
        raise DuplicatePoint(f"points {i} and {j} are at distance 0")
    # via[i, j, k] = d[i, k] + d[k, j]
    via = d[:, None, :] + d.T[None, :, :]
    bad = np.argwhere(d[:, :, None] > via + METRIC_TOL)
    if len(bad):
        raise TriangleViolation(*map(int, bad[0]))
    return FiniteMetricSpace(labels, d)


def from_points(coords, metric_kind: str = "euclidean", labels: Sequence[str] | None = None) -> FiniteMetricSpace:
    """Build a space from coordinate vectors under an l2, l1 or l-infinity norm."""
    if metric_kind not in METRIC_KINDS:
        raise ParseError(f"unknown metric {metric_kind!r}; expected one of {METRIC_KINDS}")
    rows = [list(map(float, np.atleast_1d(c))) for c in coords]
    if len({len(r) for r in rows}) > 1:
        raise DimensionMismatch("all points must have the same dimension")
    pts = np.array(rows, dtype=float)
    if len({tuple(r) for r in rows}) != len(rows):
        raise DuplicatePoint("duplicate coordinates")
    diff = pts[:, None, :] - pts[None, :, :]
    if metric_kind == "euclidean":
        d = np.sqrt((diff ** 2).sum(axis=-1))
    elif metric_kind == "manhattan":
        d = np.abs(diff).sum(axis=-1)
    else:
        d = np.abs(diff).max(axis=-1)
    return validate_metric(d, labels)


def inflate(space: FiniteMetricSpace, A: PointSet, eps, closed: bool = True) -> PointSet:
    """Points within ``eps`` of ``A``: ``d(x, A) <= eps`` if closed, ``< eps`` if open."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    idx = list(A.indices)
    if not idx:
        return PointSet(())
    if idx[-1] >= len(space):
        raise IndexError("point index out of range")
    to_a = space.dist[:, idx].min(axis=1)
    if isinstance(eps, Fraction):
        to_a_exact = [Fraction(v) for v in to_a.tolist()]
        keep = [i for i, v in enumerate(to_a_exact) if (v <= eps if closed else v < eps)]
    else:
        mask = to_a <= eps if closed else to_a < eps
        keep = np.nonzero(mask)[0].tolist()
    return PointSet(tuple(keep))
