from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ambiball.distances import ky_fan_check
from ambiball.errors import GammaOutOfBounds, MeasureError, PairIndexError
from ambiball.extreme_sets import (
    CUT,
    EMPTY,
    FULL,
    CenterSpec,
    MultiIndex,
    PiFamily,
    adjacency,
    adjacency_classes,
    all_indices,
    candidate_records,
    constraint_value,
    family_classes,
    gamma_region,
    lambda_pair,
    lambda_single,
    passes_lambda,
    passes_rank_test,
    pi_bar_families,
    pi_element,
    project_candidates,
    slot_classes,
    theta_bar_families,
    independence_vectors,
)
from ambiball.measures import Coupling, DiscreteMeasure, marginal_first, marginal_second
from ambiball.metric_space import validate_metric
from ambiball.oracle import couplings_on_grid, family_elements_on_grid, random_instance


@pytest.fixture
def close_center(two_point_close):
    return CenterSpec(two_point_close, (0,), (1.0,), 0.3)


def seeds():
    return st.integers(0, 2**32 - 1)


# ------------------------------------------------------------------ basics

def test_center_validation(two_point):
    with pytest.raises(MeasureError):
        CenterSpec(two_point, (0, 0), (0.5, 0.5), 0.1)
    with pytest.raises(MeasureError):
        CenterSpec(two_point, (0, 1), (0.5, 0.6), 0.1)
    with pytest.raises(MeasureError):
        CenterSpec(two_point, (0, 1), (1.0, 0.0), 0.1)
    with pytest.raises(ValueError):
        CenterSpec(two_point, (0,), (1.0,), -0.1)


def test_multi_index_tags_round_trip():
    for ix in all_indices(3):
        assert MultiIndex.parse(ix.tag) == ix
    assert MultiIndex.single(1).moves(3) == ((1, 3),)
    assert MultiIndex.pair(0, 2).moves(3) == ((0, 3), (2, 4))
    with pytest.raises(PairIndexError):
        MultiIndex.pair(2, 1)


def test_family_length_must_match_index(golden_center):
    with pytest.raises(ValueError):
        PiFamily(MultiIndex.single(0), (0,), golden_center)


def test_constraint_value_examples(two_point_close):
    nu = Coupling(two_point_close, [((0, 0), 0.5), ((0, 1), 0.5)])
    assert constraint_value(nu, 0.3) == pytest.approx(0.5)
    assert constraint_value(nu, 0.4) == 0
    mu = DiscreteMeasure(two_point_close, [(0, 0.2), (1, 0.8)])
    from ambiball.measures import diagonal
    assert constraint_value(diagonal(mu), 0.0) == 0


def test_pi_element_examples(close_center):
    fam = PiFamily(MultiIndex.zero(), (1,), close_center)
    assert pi_element(fam).atoms == Coupling(close_center.space, [((0, 1), 1.0)]).atoms
    fam = PiFamily(MultiIndex.single(0), (0, 1), close_center)
    nu = pi_element(fam, (0.3,))
    assert nu.isclose(Coupling(close_center.space, [((0, 0), 0.7), ((0, 1), 0.3)]))


def test_pi_element_gamma_bounds(close_center):
    fam = PiFamily(MultiIndex.single(0), (0, 1), close_center)
    for bad in [(0.0,), (1.0,), (1.2,), (-0.1,)]:
        with pytest.raises(GammaOutOfBounds):
            pi_element(fam, bad)
    nu = pi_element(fam, (1.0,), closed=True)
    assert len(nu) == 1
    with pytest.raises(GammaOutOfBounds):
        pi_element(fam, (0.3, 0.2))


def test_pi_element_closed_corner_drops_an_atom(line4):
    center = CenterSpec(line4, (0, 2), (0.4, 0.6), 0.2)
    fam = PiFamily(MultiIndex.pair(0, 1), (1, 3, 2, 0), center)
    assert len(pi_element(fam, (0.2, 0.3))) == 4
    assert len(pi_element(fam, (0.4, 0.3), closed=True)) == 3


def test_pi_element_exact(golden_center_exact):
    fam = PiFamily(MultiIndex.single(0), (0, 1), golden_center_exact)
    nu = pi_element(fam, (Fraction(3, 10),))
    assert dict(nu.atoms) == {(0, 0): Fraction(7, 10), (0, 1): Fraction(3, 10)}


# ------------------------------------------------------------------ regions

def test_gamma_region_cut(close_center):
    region = gamma_region(PiFamily(MultiIndex.single(0), (0, 1), close_center))
    assert region.kind == CUT
    assert sorted(g for (g,) in region.corners) == pytest.approx([0.0, 0.3])
    for (g,) in region.corners:
        fam = PiFamily(MultiIndex.single(0), (0, 1), close_center)
        assert constraint_value(pi_element(fam, (g,), closed=True), 0.3) <= 0.3 + 1e-12


def test_gamma_region_exact_corners(golden_center_exact):
    region = gamma_region(PiFamily(MultiIndex.single(0), (0, 1), golden_center_exact))
    assert region.kind == CUT
    assert sorted(g for (g,) in region.corners) == [0, Fraction(3, 10)]


def test_gamma_region_full_and_empty(close_center):
    # everything within eps: slack everywhere
    wide = CenterSpec(close_center.space, (0,), (1.0,), 0.5)
    assert gamma_region(PiFamily(MultiIndex.single(0), (1, 0), wide)).kind == FULL
    # base over budget and the move cannot lower the cost
    assert gamma_region(PiFamily(MultiIndex.single(0), (1, 1), close_center)).kind == EMPTY
    assert gamma_region(PiFamily(MultiIndex.zero(), (1,), close_center)).kind == EMPTY


def test_region_contains(close_center):
    region = gamma_region(PiFamily(MultiIndex.single(0), (0, 1), close_center))
    assert region.contains((0.2,))
    assert not region.contains((0.5,))


def test_pair_region_polygon(line4):
    center = CenterSpec(line4, (0, 2), (0.5, 0.5), 0.3)
    fam = PiFamily(MultiIndex.pair(0, 1), (0, 2, 3, 1), center)
    region = gamma_region(fam)
    assert 3 <= len(region.corners) <= 5
    for g in region.corners:
        assert ky_fan_check(pi_element(fam, g, closed=True), 0.3)


@given(seeds())
def test_region_corners_are_feasible(seed):
    rng = np.random.default_rng(seed)
    center = random_instance(rng, points=(3, 4), centers=(1, 2))
    for fam, region in pi_bar_families(center, feasible_only=False):
        if region.kind == EMPTY:
            continue
        for g in region.corners:
            nu = pi_element(fam, g, closed=True)
            assert constraint_value(nu, center.eps) <= center.eps + 1e-9


@given(seeds())
def test_empty_region_has_no_feasible_interior_point(seed):
    rng = np.random.default_rng(seed)
    center = random_instance(rng, points=(3, 4), centers=(1, 2))
    for fam, region in pi_bar_families(center, feasible_only=False):
        if region.kind != EMPTY or not fam.moves:
            continue
        for frac in (0.25, 0.5, 0.75):
            owners = [k for k, _ in fam.moves]
            g = tuple(frac * center.beta[k] / owners.count(k) for k in owners)
            assert constraint_value(pi_element(fam, g), center.eps) > center.eps - 1e-12


@given(seeds())
def test_family_elements_fix_first_marginal(seed):
    rng = np.random.default_rng(seed)
    center = random_instance(rng, points=(3, 4), centers=(1, 2))
    mu_n = center.measure()
    for fam, region in pi_bar_families(center):
        for g in region.corners:
            assert marginal_first(pi_element(fam, g, closed=True)).isclose(mu_n, 1e-12)


# ------------------------------------------------------------------ filters

def test_lambda_single_examples(close_center):
    assert lambda_single(close_center, (0, 1), 0)
    assert not lambda_single(close_center, (0, 0), 0)
    assert not lambda_single(close_center, (1, 1), 0)


def test_lambda_pair(line4):
    center = CenterSpec(line4, (0, 2), (0.5, 0.5), 0.3)
    assert lambda_pair(center, (0, 2, 3, 1), 0, 1)
    assert not lambda_pair(center, (0, 2, 1, 1), 0, 1)
    with pytest.raises(PairIndexError):
        lambda_pair(center, (0, 2, 3, 1), 1, 1)
    with pytest.raises(PairIndexError):
        lambda_pair(center, (0, 2, 3, 1), 1, 0)
    assert not passes_lambda(PiFamily(MultiIndex.pair(1, 1), (0, 2, 3, 1), center))


def test_theta_bar_singleton_space():
    space = validate_metric([[0]], ["a"])
    center = CenterSpec(space, (0,), (1.0,), 0.5)
    fams = list(theta_bar_families(center, expand=True))
    assert [(f.index, f.x) for f, _ in fams] == [(MultiIndex.zero(), (0,))]


def test_theta_bar_two_points(close_center):
    listed = {(f.index.tag, f.x) for f, _ in theta_bar_families(close_center, expand=True, feasible_only=False)}
    assert listed == {("zero", (0,)), ("zero", (1,)), ("single(0)", (0, 1)), ("single(0)", (1, 0))}
    feasible = {(f.index.tag, f.x) for f, _ in theta_bar_families(close_center, expand=True)}
    # x = (b) alone puts all mass at distance 0.4 > 0.3
    assert feasible == {("zero", (0,)), ("single(0)", (0, 1)), ("single(0)", (1, 0))}


@given(seeds())
def test_no_diagonal_pairs(seed):
    rng = np.random.default_rng(seed)
    center = random_instance(rng, points=(3, 4), centers=(1, 3))
    for fam, _ in theta_bar_families(center, pairs=True):
        assert not (fam.index.kind == "pair" and fam.index.i == fam.index.j)


@given(seeds())
def test_filtered_families_pass_rank_test(seed):
    rng = np.random.default_rng(seed)
    center = random_instance(rng, points=(3, 4), centers=(1, 2))
    for fam, region in theta_bar_families(center, expand=True):
        nu = pi_element(fam, _interior(region, fam, center))
        assert passes_rank_test(center, nu)


@given(seeds())
def test_two_move_families_always_fail_rank_test(seed):
    rng = np.random.default_rng(seed)
    center = random_instance(rng, points=(3, 4), centers=(2, 2))
    for fam, region in theta_bar_families(center, expand=True, pairs=True):
        if fam.index.kind != "pair":
            continue
        nu = pi_element(fam, _interior(region, fam, center))
        assert len(nu) == center.n + 2
        assert np.linalg.matrix_rank(independence_vectors(center, nu)) <= center.n + 1
        assert not passes_rank_test(center, nu)


def _interior(region, fam, center):
    """A point strictly inside the box and inside the region's closure."""
    if not fam.moves:
        return ()
    corners = np.array([[float(v) for v in c] for c in region.corners])
    mid = corners.mean(axis=0)
    box = np.array([center.beta[k] for k, _ in fam.moves]) / 2
    for t in (0.5, 0.9, 0.99):
        g = t * mid + (1 - t) * box
        if np.all(g > 0) and np.all(g < 2 * box) and region.contains(tuple(g)):
            return tuple(g)
    return tuple(0.999 * mid + 0.001 * box)


def test_grid_double_inclusion_small(line4):
    space = validate_metric(line4.dist[:3, :3], ["p", "q", "r"])
    center = CenterSpec(space, (0, 2), (Fraction(1, 2), Fraction(1, 2)), Fraction(1, 5))
    assert couplings_on_grid(center, 4) == family_elements_on_grid(center, 4)


# ---------------------------------------------------------------- adjacency

def test_adjacency_examples(close_center):
    assert adjacency(close_center, (1,)).bits == ((1,),)
    assert adjacency(close_center, (0,)).bits == ((0,),)
    wide = CenterSpec(close_center.space, (0,), (1.0,), 0.4)
    assert adjacency(wide, (1, 0)).bits == ((0, 0),)


def test_adjacency_classes_examples(close_center):
    single = CenterSpec(validate_metric([[0]], ["a"]), (0,), (1.0,), 0.1)
    assert len(adjacency_classes(single, None, 2)) == 1
    classes = adjacency_classes(close_center, None, 1)
    assert {m.bits: v for m, v in classes.items()} == {((0,),): [(0,)], ((1,),): [(1,)]}
    wide = CenterSpec(close_center.space, (0,), (1.0,), 0.4)
    classes = adjacency_classes(wide, None, 2)
    assert len(classes) == 1
    assert sorted(next(iter(classes.values()))) == list(product(range(2), repeat=2))


@given(seeds())
def test_adjacency_classes_partition_tuples(seed):
    rng = np.random.default_rng(seed)
    center = random_instance(rng, points=(3, 5), centers=(1, 2))
    classes = adjacency_classes(center, None, center.n)
    members = [x for xs in classes.values() for x in xs]
    assert len(members) == len(set(members)) == len(center.space) ** center.n
    for mat, xs in classes.items():
        assert all(adjacency(center, x) == mat for x in xs)


@given(seeds())
def test_equal_adjacency_gives_equal_regions(seed):
    rng = np.random.default_rng(seed)
    center = random_instance(rng, points=(3, 5), centers=(1, 2))
    for cls in family_classes(center, feasible_only=False, filtered=False):
        ref = gamma_region(cls.representative)
        for fam in cls.members():
            region = gamma_region(fam)
            assert region.kind == ref.kind
            assert region.corners == ref.corners


# --------------------------------------------------------------- candidates

def test_project_candidates_examples(close_center):
    zero = CenterSpec(close_center.space, (0,), (1.0,), 0.3)
    fam = PiFamily(MultiIndex.zero(), (0,), zero)
    assert project_candidates([(fam, gamma_region(fam))]) == [DiscreteMeasure.dirac(zero.space, 0)]
    fam = PiFamily(MultiIndex.single(0), (0, 1), close_center)
    got = project_candidates([(fam, gamma_region(fam))])
    want = DiscreteMeasure(close_center.space, [(0, 0.7), (1, 0.3)])
    assert any(m.isclose(want, 1e-12) for m in got)


def test_candidate_records_one_per_corner(close_center):
    fam = PiFamily(MultiIndex.single(0), (0, 1), close_center)
    recs = list(candidate_records([(fam, gamma_region(fam))]))
    assert len(recs) == 2
    assert all(r.measure == marginal_second(r.coupling) for r in recs)


@given(seeds())
def test_bulk_projection_matches_per_family(seed):
    rng = np.random.default_rng(seed)
    center = random_instance(rng, points=(3, 4), centers=(1, 2))
    bulk = project_candidates(family_classes(center))
    one_by_one = project_candidates(theta_bar_families(center, expand=True))
    assert [m.key(9) for m in bulk] == [m.key(9) for m in one_by_one]


@given(seeds())
def test_slot_classes_cover_adjacency_classes(seed):
    rng = np.random.default_rng(seed)
    center = random_instance(rng, points=(3, 5), centers=(1, 2))
    fine = {m.key(9) for m in project_candidates(family_classes(center))}
    coarse = {m.key(9) for m in project_candidates(slot_classes(center))}
    assert fine == coarse


def test_exact_candidates(golden_center_exact):
    got = project_candidates(family_classes(golden_center_exact))
    weights = {tuple(m.atoms) for m in got}
    assert ((0, Fraction(7, 10)), (1, Fraction(3, 10))) in weights
    assert ((0, Fraction(1)),) in weights
