"""Finitely supported probability measures on X and on X x X.

Both kinds are kept in canonical form: zero atoms dropped, duplicates
merged, atoms sorted by point index and weights renormalized to sum to one.
Weights may be floats or :class:`fractions.Fraction` (exact mode); a measure
never mixes the two.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import NegativeWeight, ParseError, SpaceMismatch, WeightSumError
from .metric_space import FiniteMetricSpace

CONSTRUCT_TOL = 1e-9
INVARIANT_TOL = 1e-12
ZERO_WEIGHT = 1e-15
# tiny negatives are LP round-off, not user error
NEGATIVE_SLACK = 1e-12


def _is_exact(weights) -> bool:
    return bool(weights) and all(isinstance(w, (Fraction, int)) and not isinstance(w, bool) for w in weights)


def _canonical_atoms(atoms: Iterable, exact: bool | None = None):
    merged: dict = {}
    raw = list(atoms)
    weights = [w for _, w in raw]
    if exact is None:
        exact = _is_exact(weights)
    for key, w in raw:
        if exact:
            w = Fraction(w)
        else:
            w = float(w)
        if w < -NEGATIVE_SLACK:
            raise NegativeWeight(f"negative weight {w} at {key!r}")
        merged[key] = merged.get(key, 0) + w
    total = sum(merged.values(), Fraction(0) if exact else 0.0)
    if abs(total - 1) > CONSTRUCT_TOL:
        raise WeightSumError(f"weights sum to {float(total)!r}, expected 1")
    kept = sorted((k, w) for k, w in merged.items() if w >= ZERO_WEIGHT)
    total = sum((w for _, w in kept), Fraction(0) if exact else 0.0)
    return tuple((k, w / total) for k, w in kept)


class _Atomic:
    __slots__ = ("space", "atoms", "_key")

    def __init__(self, space: FiniteMetricSpace, atoms: Iterable, exact: bool | None = None):
        self.space = space
        self.atoms = _canonical_atoms(((self._resolve(space, k), w) for k, w in atoms), exact)
        self._key = None

    @staticmethod
    def _resolve(space, key):
        return space.index(key)

    @property
    def exact(self) -> bool:
        return isinstance(self.atoms[0][1], Fraction)

    @property
    def weights(self) -> tuple:
        return tuple(w for _, w in self.atoms)

    def __len__(self):
        return len(self.atoms)

    def __eq__(self, other):
        return type(self) is type(other) and self.space == other.space and self.atoms == other.atoms

    def __hash__(self):
        return hash((type(self).__name__, self.atoms))

    def key(self, digits: int = 12) -> tuple:
        """Hashable identity; floats are rounded to ``digits`` decimals."""
        if self._key is None or self._key[0] != digits:
            if self.exact:
                k = self.atoms
            else:
                k = tuple((p, round(w, digits)) for p, w in self.atoms)
            self._key = (digits, k)
        return self._key[1]

    def isclose(self, other, tol: float = 1e-9) -> bool:
        if type(self) is not type(other) or self.space != other.space:
            return False
        a, b = dict(self.atoms), dict(other.atoms)
        return all(abs(float(a.get(k, 0)) - float(b.get(k, 0))) <= tol for k in set(a) | set(b))


class DiscreteMeasure(_Atomic):
    """Probability measure ``sum_k w_k delta_{x_k}`` with distinct atoms."""

    __slots__ = ()

    @classmethod
    def dirac(cls, space, point) -> "DiscreteMeasure":
        return cls(space, [(space.index(point), 1)], exact=False)

    @classmethod
    def from_vector(cls, space, vec, exact: bool | None = None) -> "DiscreteMeasure":
        return cls(space, [(i, w) for i, w in enumerate(vec)], exact)

    @property
    def points(self) -> tuple:
        return tuple(p for p, _ in self.atoms)

    def to_vector(self) -> np.ndarray:
        dtype = object if self.exact else float
        v = np.zeros(len(self.space), dtype=dtype)
        if self.exact:
            v[:] = Fraction(0)
        for p, w in self.atoms:
            v[p] = w
        return v

    def mass(self, points) -> float:
        pts = set(points)
        return sum((w for p, w in self.atoms if p in pts), Fraction(0) if self.exact else 0.0)

    def integrate(self, values) -> float:
        return sum((w * values[p] for p, w in self.atoms), Fraction(0) if self.exact else 0.0)

    def __repr__(self):
        body = " + ".join(f"{float(w):.6g}*d[{self.space.labels[p]}]" for p, w in self.atoms)
        return f"DiscreteMeasure({body})"

    def to_dict(self) -> dict:
        return {"atoms": [[self.space.labels[p], _num(w)] for p, w in self.atoms]}

    @classmethod
    def from_dict(cls, space, data, exact: bool | None = None) -> "DiscreteMeasure":
        """Weights given as strings (``"3/10"``) select exact mode unless ``exact`` says otherwise."""
        try:
            atoms = [(space.index(lab), _parse_weight(w, exact)) for lab, w in data["atoms"]]
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"bad measure record: {exc}") from None
        return cls(space, atoms, exact)


class Coupling(_Atomic):
    """Probability measure on ``X x X`` with distinct atom pairs."""

    __slots__ = ()

    @staticmethod
    def _resolve(space, key):
        a, b = key
        return (space.index(a), space.index(b))

    @property
    def pairs(self) -> tuple:
        return tuple(p for p, _ in self.atoms)

    def integrate(self, cost) -> float:
        """``sum_k w_k cost[x_k, x'_k]`` for a matrix ``cost`` over X x X."""
        return sum((w * cost[i][j] for (i, j), w in self.atoms), Fraction(0) if self.exact else 0.0)

    def to_matrix(self) -> np.ndarray:
        n = len(self.space)
        m = np.zeros((n, n), dtype=object if self.exact else float)
        for (i, j), w in self.atoms:
            m[i, j] = w
        return m

    def __repr__(self):
        lab = self.space.labels
        body = " + ".join(f"{float(w):.6g}*d[{lab[i]},{lab[j]}]" for (i, j), w in self.atoms)
        return f"Coupling({body})"

    def to_dict(self) -> dict:
        lab = self.space.labels
        return {"atoms": [[[lab[i], lab[j]], _num(w)] for (i, j), w in self.atoms]}

    @classmethod
    def from_dict(cls, space, data, exact: bool | None = None) -> "Coupling":
        try:
            atoms = [((space.index(a), space.index(b)), _parse_weight(w, exact)) for (a, b), w in data["atoms"]]
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"bad coupling record: {exc}") from None
        return cls(space, atoms, exact)


def _num(w):
    return str(w) if isinstance(w, Fraction) else float(w)


def _parse_weight(w, exact):
    if exact or isinstance(w, str):
        return Fraction(w)
    return float(w)


def canonicalize(space: FiniteMetricSpace, atoms: Iterable):
    """Canonical measure or coupling, depending on whether atom keys are pairs."""
    atoms = list(atoms)
    if atoms and isinstance(atoms[0][0], tuple):
        return Coupling(space, atoms)
    return DiscreteMeasure(space, atoms)


def _check_same_space(*objs):
    first = objs[0].space
    for o in objs[1:]:
        if o.space != first:
            raise SpaceMismatch("objects live on different metric spaces")
    return first


def marginal_first(nu: Coupling) -> DiscreteMeasure:
    return DiscreteMeasure(nu.space, [(i, w) for (i, _), w in nu.atoms], nu.exact)


def marginal_second(nu: Coupling) -> DiscreteMeasure:
    return DiscreteMeasure(nu.space, [(j, w) for (_, j), w in nu.atoms], nu.exact)


def support_size(mu) -> int:
    return len(mu.atoms)


def product(mu1: DiscreteMeasure, mu2: DiscreteMeasure) -> Coupling:
    space = _check_same_space(mu1, mu2)
    return Coupling(space, [((p, q), w * v) for p, w in mu1.atoms for q, v in mu2.atoms], mu1.exact and mu2.exact)


def diagonal(mu: DiscreteMeasure) -> Coupling:
    return Coupling(mu.space, [((p, p), w) for p, w in mu.atoms], mu.exact)


def mix(theta, a, b):
    """Convex combination ``theta * a + (1 - theta) * b`` of two measures or couplings."""
    _check_same_space(a, b)
    atoms = [(k, theta * w) for k, w in a.atoms] + [(k, (1 - theta) * w) for k, w in b.atoms]
    return type(a)(a.space, atoms)
