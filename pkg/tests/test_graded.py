import pytest

from monoid_points.core import MonoidPresentation, are_equal
from monoid_points.graded import (
    GradedMonoid,
    GradedSet,
    GradingError,
    boxtimes,
    chart_presentation,
    check_proj_finiteness,
    coproduct,
    degree_zero_localization,
    empty_graded,
    from_chart,
    graded_filtered_check,
    graded_free,
    irrelevant_ideal,
    localize_graded,
    odot,
    shift,
    to_chart,
    unit_graded_set,
)

P1 = GradedMonoid.free("xy")
LINE = GradedMonoid.free("x")


def test_grading_validation():
    with pytest.raises(GradingError):
        GradedMonoid(MonoidPresentation.free("x"), (-1,))
    # x = y^2 is not homogeneous when both have degree 1
    with pytest.raises(GradingError):
        GradedMonoid(MonoidPresentation(("x", "y"), (((1, 0), (0, 2)),)), (1, 1))
    G = GradedMonoid.from_map(MonoidPresentation(("x", "y"), (((1, 0), (0, 2)),)), {"x": 2, "y": 1})
    assert G.degree((1, 1)) == 3


def test_degree_parts():
    assert P1.generators_of_degree(1) == [0, 1]
    assert len(P1.elements_of_degree(3)) == 4
    assert P1.degree_zero_part.rank == 0


def test_shift_moves_degrees():
    A = graded_free(P1, 2)
    x2 = (0, (2, 0))
    assert A.degree(x2) == 0
    assert shift(A, -2).degree(x2) == 2
    assert shift(shift(A, 1), -1) == A


def test_boxtimes_examples():
    X = GradedSet.of({0: ["a", "b"]})
    Y = GradedSet.of({1: ["p", "q", "r"]})
    XY = boxtimes(X, Y)
    assert len(XY.part(1)) == 6 and len(XY) == 6
    Z = boxtimes(GradedSet.of({2: ["s"]}), GradedSet.of({-2: ["t"]}))
    assert Z.parts == ((0, (("s", "t"),)),)
    assert len(boxtimes(X, unit_graded_set())) == len(X)


def test_action_and_contains():
    A = graded_free(P1)
    assert A.act((1, 1), (0, (1, 0))) == (0, (2, 1))
    assert A.contains((0, (1, 0))) and not A.contains((0, (-1, 0)))
    Ax = localize_graded(A, (1, 0))
    assert Ax.contains((0, (-1, 2)))


def test_irrelevant_ideal_membership():
    Mp = irrelevant_ideal(P1)
    assert Mp.contains((0, (0, 1)))
    assert not Mp.contains((0, (0, 0)))


def test_degree_zero_localization_examples():
    C = degree_zero_localization(graded_free(P1), (1, 0))
    assert C.monoid_generators == [(-1, 1)]
    elems = C.elements(3)
    assert all(C.contains(a) for a in elems)
    assert (0, (-2, 2)) in elems
    with pytest.raises(GradingError):
        degree_zero_localization(graded_free(P1), (0, 0))
    with pytest.raises(GradingError):
        C.act((1, 0), (0, (0, 0)))


def test_degree_zero_localization_of_shift():
    # the degree-zero part of M_*(1) at x is spanned by x (and its multiples by y/x)
    C = degree_zero_localization(graded_free(P1, 1), (1, 0))
    assert all(P1.degree(a[1]) == 1 for a in C.elements(3))


def test_chart_round_trip():
    T = chart_presentation(P1, 0)
    assert are_equal(T, (1, 0), (0, 0)).is_equal
    v = (-2, 2)
    assert from_chart(P1, 0, to_chart(P1, 0, v)) == v
    with pytest.raises(GradingError):
        chart_presentation(GradedMonoid.from_map(MonoidPresentation.free("z"), {"z": 2}), 0)


def test_odot_examples():
    A = graded_free(LINE)
    assert len(odot(A, A, 3)) == 1
    assert len(odot(empty_graded(LINE), A, 3)) == 0


def test_odot_with_shift_pairs_degrees():
    # M_* and M_*(-1) live in degrees >= 0 and >= 1: no complementary pairs
    assert len(odot(graded_free(P1), graded_free(P1, -1), 3)) == 0
    assert len(odot(graded_free(P1, 1), graded_free(P1, -1), 3)) == 1
    # (x, 1) ~ (1, x) and (y, 1) ~ (1, y): one class per degree-1 monomial
    assert len(odot(graded_free(P1, 2), graded_free(P1, -1), 3)) == 2


def test_proj_finiteness_examples():
    assert check_proj_finiteness(P1).ok
    Z = GradedMonoid.from_map(MonoidPresentation.free("xz"), {"x": 1, "z": 2})
    rep = check_proj_finiteness(Z)
    assert not rep.ok and rep.failure == "iii" and rep.offending == "z"
    idem = GradedMonoid.from_map(MonoidPresentation(("e", "x"), (((2, 0), (1, 0)),)), {"e": 0, "x": 1})
    rep = check_proj_finiteness(idem)
    assert rep.ok and rep.degree_zero_generators == ["e"] and rep.degree_one_generators == ["x"]


def test_graded_filteredness():
    # the irrelevant ideal and a coproduct lack common multiples
    assert graded_filtered_check(irrelevant_ideal(P1)).condition == "ii"
    assert graded_filtered_check(coproduct(graded_free(P1), graded_free(P1))).condition == "ii"
    assert not graded_filtered_check(empty_graded(P1)).ok
    for n in (-1, 0, 1):
        assert graded_filtered_check(localize_graded(graded_free(P1, n), (1, 0))).ok


def test_coproduct_requires_same_monoid():
    with pytest.raises(GradingError):
        coproduct(graded_free(P1), graded_free(LINE))
