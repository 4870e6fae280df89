import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monoid_points.free_points import (
    COUNTABLE,
    NEG_INF,
    Affine,
    BasisMismatch,
    Cofinite,
    Const,
    Finite,
    SigmaClass,
    SigmaError,
    SigmaFunction,
    add,
    all_finite_functions,
    equivalence_multiplier,
    equivalent,
    filtered_truncation_check,
    from_json,
    gamma_of_subset,
    intersect,
    is_hidden,
    member,
    symmetric_pairs,
    tensor_truncation_check,
    to_json,
    window_bijection,
    zero_function,
)
from oracles import free_tensor_fiber_components

C = COUNTABLE
XY = ("x", "y")

values = st.one_of(st.integers(-3, 3), st.just(NEG_INF))
tails = st.one_of(
    st.sampled_from([Const(0), Const(-1), Const(-2), Const(NEG_INF)]),
    st.builds(Affine, st.integers(-2, -1), st.integers(-2, 4)),
)
functions = st.builds(SigmaFunction, st.just(C), st.dictionaries(st.integers(0, 6), values, max_size=4), tails)
subsets = st.one_of(
    st.builds(Finite, st.frozensets(st.integers(0, 8), max_size=4)),
    st.builds(Cofinite, st.frozensets(st.integers(0, 8), max_size=4)),
)


@st.composite
def perturbed(draw, f):
    """A function equivalent to f: finitely many finite values changed, -inf kept."""
    exc = f.exc
    for k in draw(st.lists(st.integers(0, 9), max_size=3)):
        if f(k) != NEG_INF:
            exc[k] = draw(st.integers(-3, 3))
    return SigmaFunction(f.basis, exc, f.tail)


# ---------------------------------------------------------------- examples


def test_equivalence_examples():
    z = zero_function(C)
    assert equivalent(z, z)
    assert equivalent(SigmaFunction(C, {0: -3}), z)
    assert not equivalent(SigmaFunction(C, {}, Const(-1)), z)
    assert not equivalent(SigmaFunction(C, {0: NEG_INF}), z)


def test_add_examples():
    assert add(SigmaFunction(C, {}, Const(-1)), SigmaFunction(C, {}, Const(-1))).tail == Const(-2)
    assert add(SigmaFunction(C, {}, Affine(-1, 0)), SigmaFunction(C, {}, Const(NEG_INF))).tail == Const(NEG_INF)
    assert add(SigmaFunction(C, {}, Affine(-1, 0)), SigmaFunction(C, {}, Affine(-2, 1))).tail == Affine(-3, 1)
    h = add(SigmaFunction(C, {1: 2}), SigmaFunction(C, {1: NEG_INF}))
    assert h(1) == NEG_INF


def test_tail_validation():
    with pytest.raises(SigmaError):
        Const(1)
    with pytest.raises(SigmaError):
        Affine(0, 3)
    with pytest.raises(SigmaError):
        SigmaFunction(XY, {5: 0})


def test_member_examples():
    z = zero_function(C)
    for T in (Finite(frozenset({1})), Cofinite(frozenset({0}))):
        assert member({}, gamma_of_subset(T).representative)
    assert not member({0: -1}, z)
    assert not member({}, SigmaFunction(C, {0: 2}))
    # affine tail 2 - n is positive at n = 0, 1
    f = SigmaFunction(C, {}, Affine(-1, 2))
    assert not member({}, f)
    assert member({0: 2, 1: 1}, f)
    with pytest.raises(BasisMismatch):
        member([0], zero_function(XY))


def test_gamma_examples():
    assert SigmaClass.of(zero_function(C)) == gamma_of_subset(Cofinite(frozenset()))
    assert gamma_of_subset(Finite(frozenset())).representative.tail == Const(NEG_INF)
    g = gamma_of_subset(Cofinite(frozenset({0}))).representative
    assert g.exc == {0: NEG_INF} and g.tail == Const(0)


def test_hidden_examples():
    assert is_hidden(SigmaFunction(C, {}, Const(-1)))
    assert is_hidden(SigmaFunction(C, {}, Affine(-1, 0)))
    assert is_hidden(SigmaFunction(C, {}, Affine(-1, 5)))
    assert not is_hidden(zero_function(C))
    assert not is_hidden(SigmaFunction(C, {}, Const(NEG_INF)))
    # on a finite basis every class is a gamma class
    assert not any(is_hidden(f) for f in all_finite_functions(2))


def test_equivalence_multiplier_and_window_bijection():
    f, g = SigmaFunction(XY, {0: -2}), SigmaFunction(XY, {0: 1})
    assert equivalence_multiplier(f, g) == {0: 3}
    assert window_bijection(f, g)
    with pytest.raises(SigmaError):
        equivalence_multiplier(f, SigmaFunction(XY, {0: NEG_INF}))


def test_basis_mismatch():
    with pytest.raises(BasisMismatch):
        add(zero_function(XY), zero_function(C))


def test_json_round_trip():
    f = SigmaFunction(C, {3: -1, 5: NEG_INF}, Affine(-1, 0))
    assert from_json(to_json(f)) == f
    g = SigmaFunction(XY, {0: NEG_INF, 1: 2})
    assert from_json(to_json(g)) == g
    assert to_json(g)["exceptions"] == {"x": "-inf", "y": 2}


# ---------------------------------------------------------------- laws


@given(functions, functions, functions)
def test_equivalence_laws(f, g, h):
    assert equivalent(f, f)
    assert equivalent(f, g) == equivalent(g, f)
    if equivalent(f, g) and equivalent(g, h):
        assert equivalent(f, h)


@given(st.data(), functions, functions)
@settings(max_examples=200)
def test_addition_respects_classes(data, f, g):
    f2, g2 = data.draw(perturbed(f)), data.draw(perturbed(g))
    assert equivalent(f, f2) and equivalent(g, g2)
    assert equivalent(add(f, g), add(f2, g2))
    assert SigmaClass.of(f) + SigmaClass.of(g) == SigmaClass.of(add(f2, g2))


@given(functions, functions, functions)
def test_addition_is_commutative_monoid(f, g, h):
    assert add(f, g) == add(g, f)
    assert equivalent(add(add(f, g), h), add(f, add(g, h)))
    assert equivalent(add(f, zero_function(C)), f)


@given(subsets, subsets)
def test_gamma_is_homomorphism(S, T):
    assert gamma_of_subset(S) + gamma_of_subset(T) == gamma_of_subset(intersect(S, T))
    assert not is_hidden(gamma_of_subset(S))


@given(functions, st.dictionaries(st.integers(0, 8), st.integers(-4, 4), max_size=4))
def test_member_is_upward_closed(f, x):
    if member(x, f):
        y = dict(x)
        for k in range(9):
            y[k] = y.get(k, 0) + 1
        assert member(y, f)


def test_tails_evaluate_pointwise():
    f, g = SigmaFunction(C, {2: 1}, Affine(-1, 3)), SigmaFunction(C, {}, Const(-2))
    h = add(f, g)
    for n in range(12):
        assert h(n) == f(n) + g(n)


# ---------------------------------------------------------------- windowed tensor checks


def test_tensor_truncation_examples():
    z = zero_function(XY)
    assert tensor_truncation_check(z, z)
    assert tensor_truncation_check(SigmaFunction(XY, {0: 0, 1: NEG_INF}), SigmaFunction(XY, {0: NEG_INF, 1: 0}))
    assert tensor_truncation_check(SigmaFunction(XY, {0: -2}), z)


@pytest.mark.parametrize("k", [1, 2])
def test_tensor_truncation_all_pairs_small_bases(k):
    assert all(tensor_truncation_check(f, g) for f, g in symmetric_pairs(k, [-2, 0, 1, NEG_INF]))


def test_tensor_fiber_counts_match_oracle():
    # the oracle counts components of each fiber by plain BFS over pairs
    for fv, gv in [((0, NEG_INF), (NEG_INF, 0)), ((-2, 0), (1, 1)), ((NEG_INF, NEG_INF), (2, -1))]:
        f, g = SigmaFunction(XY, dict(enumerate(fv))), SigmaFunction(XY, dict(enumerate(gv)))
        h = add(f, g)
        for s in itertools.product(range(-2, 3), repeat=2):
            comps = free_tensor_fiber_components(fv, gv, s, 6)
            assert comps == (1 if member(list(s), h) else 0)


def test_symmetric_pairs_reduce_the_search():
    assert len(symmetric_pairs(1)) == 15
    assert len(symmetric_pairs(2)) == 175


def test_filtered_truncation_examples():
    assert filtered_truncation_check(zero_function(XY))
    assert filtered_truncation_check(SigmaFunction(XY, {0: 0, 1: NEG_INF}))
    assert filtered_truncation_check(SigmaFunction(XY, {0: 1}))
