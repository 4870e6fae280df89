import itertools

import pytest

from monoid_points.core import LocalizedMonoid, MonoidPresentation
from monoid_points.msets import (
    ClassificationError,
    FiniteMSet,
    LocalizationMSet,
    TopoPoint,
    canonical_map_to_localization,
    classify_point,
    delta_leq,
    endomorphism_monoid,
    enumerate_finite_msets,
    find_source,
    finite_generation_report,
    is_conservative,
    is_filtered,
    is_free_rank_one,
    localization_at,
    localize_mset,
    points,
    prime_of_mset,
    product,
    regular_mset,
    tensor,
)
from monoid_points.spectrum import prime_meet, spec

F2 = MonoidPresentation.free("xy")
N = MonoidPresentation.free("x")
Z2 = MonoidPresentation(("g",), (((2,), (0,)),))
IDEM = MonoidPresentation(("e",), (((2,), (1,)),))
TRIVIAL = MonoidPresentation(())


def integers_over_naturals():
    return localization_at(spec(N).prime(0))


# ---------------------------------------------------------------- finite carriers


def test_finite_mset_validation():
    with pytest.raises(ValueError):
        FiniteMSet(Z2, [0, 1], [[0, 0]])  # g^2 = 1 fails on 1
    with pytest.raises(ValueError):
        FiniteMSet(F2, [0, 1], [[1, 1]])  # one map for two generators
    A = FiniteMSet.from_maps(Z2, ["a", "b"], {"g": {"a": "b", "b": "a"}})
    assert A.act((3,), 0) == 1


def test_filtered_examples_over_z2():
    free_orbit = FiniteMSet(Z2, [0, 1], [[1, 0]])
    point = FiniteMSet(Z2, [0], [[0]])
    assert is_filtered(free_orbit).status is True
    v = is_filtered(point)
    assert v.status is False and v.reason.startswith("F2") and v.exhaustive


def test_empty_mset_not_filtered():
    assert is_filtered(FiniteMSet(Z2, [], [[]])).status is False


def test_regular_mset_filtered():
    assert is_filtered(regular_mset(F2)).status is True
    assert is_filtered(regular_mset(IDEM)).status is True


def test_enumeration_counts_z2():
    # actions of Z/2 on a labelled 2-set: identity and the swap
    assert len(list(enumerate_finite_msets(Z2, 2))) == 2
    assert sum(is_free_rank_one(A) for A in enumerate_finite_msets(Z2, 2)) == 1


@pytest.mark.parametrize("order", [2, 3])
def test_filtered_iff_free_for_cyclic_groups(order):
    G = MonoidPresentation(("g",), (((order,), (0,)),))
    for size in range(1, order + 1):
        for A in enumerate_finite_msets(G, size):
            assert bool(is_filtered(A)) == is_free_rank_one(A)


# ---------------------------------------------------------------- primes and sources


def test_prime_of_mset_examples():
    L = spec(F2)
    assert prime_of_mset(localization_at(L.prime(1))).mask == 1
    assert prime_of_mset(regular_mset(F2)).mask == 3
    assert prime_of_mset(integers_over_naturals()).mask == 0


def test_conservative_examples():
    assert is_conservative(regular_mset(F2))
    assert not is_conservative(integers_over_naturals())
    p = spec(F2).prime(1)
    over_local = localization_at(p).over(LocalizedMonoid(F2, p.complement))
    assert is_conservative(over_local)


def test_source_examples():
    assert find_source(regular_mset(F2)).element == (0, 0)
    I = FiniteMSet(IDEM, ["1", "e"], [[1, 1]])
    assert I.labels[find_source(I).element] == "1"


def test_classify_examples():
    L = spec(F2)
    assert classify_point(regular_mset(F2)).prime == L.top
    assert classify_point(integers_over_naturals()).prime.mask == 0
    assert classify_point(localization_at(L.prime(2))).prime.mask == 2


def test_classify_finite_idempotent_points():
    I = FiniteMSet(IDEM, ["1", "e"], [[1, 1]])
    assert classify_point(I).prime.mask == 1
    one = FiniteMSet(IDEM, ["*"], [[0]])
    assert classify_point(one).prime.mask == 0


def test_classify_rejects_non_conservative_finite():
    # trivial action of Z/2 on a point is not a localization of Z/2
    with pytest.raises(ClassificationError):
        classify_point(FiniteMSet(Z2, [0, 1], [[0, 1]]))


# ---------------------------------------------------------------- tensor


def test_tensor_unit():
    A = localization_at(spec(F2).prime(1))
    assert classify_point(tensor(regular_mset(F2), A)).prime.mask == 1


def test_tensor_of_integers_is_integers():
    Z = integers_over_naturals()
    assert classify_point(tensor(Z, Z)).prime.mask == 0


def test_tensor_of_coordinate_localizations_is_group_completion():
    L = spec(F2)
    T = tensor(localization_at(L.prime(1)), localization_at(L.prime(2)))
    assert classify_point(T).prime.mask == 0


def test_tensor_classes_identify_pairs():
    Z = integers_over_naturals()
    T = tensor(Z, Z)
    # (x a, b) ~ (a, x b)
    assert T.class_of(3, (1,), (0,)) == T.class_of(3, (0,), (1,))


def test_tensor_requires_same_monoid():
    with pytest.raises(ValueError):
        tensor(regular_mset(F2), regular_mset(N))


# ---------------------------------------------------------------- localization


def test_localize_mset_examples():
    Z = localize_mset(regular_mset(N), ["x"])
    assert isinstance(Z, LocalizationMSet)
    assert prime_of_mset(Z).mask == 0
    A = regular_mset(F2)
    assert localize_mset(A, []) is A


def test_localize_finite_keeps_eventual_image():
    # e acts on {1, e} collapsing to e; inverting e leaves one element
    I = FiniteMSet(IDEM, ["1", "e"], [[1, 1]])
    L = localize_mset(I, [0])
    assert L.labels == ("e",)
    assert canonical_map_to_localization(I, [0]) == {0: 0, 1: 0}


# ---------------------------------------------------------------- points


def test_points_of_naturals():
    rep = points(N)
    assert sorted(p.prime.mask for p in rep.points) == [0, 1]
    assert rep.tensor_table == {(1, 1): 1, (1, 0): 0, (0, 1): 0, (0, 0): 0}
    assert rep.verified()


def test_points_of_free2_and_trivial():
    rep = points(F2)
    assert len(rep.points) == 4 and rep.verified()
    assert len(points(TRIVIAL).points) == 1


def test_delta_leq_examples():
    L = spec(F2)
    pt = {m: TopoPoint(localization_at(L.prime(m)), L.prime(m), "") for m in L.masks}
    assert delta_leq(pt[1], pt[0])
    assert delta_leq(pt[1], pt[1])
    assert not delta_leq(pt[1], pt[2]) and not delta_leq(pt[2], pt[1])


def test_endomorphism_examples():
    L = spec(N)
    top = TopoPoint(regular_mset(N), L.prime(1), "")
    bottom = TopoPoint(integers_over_naturals(), L.prime(0), "")
    assert endomorphism_monoid(top) == N
    assert endomorphism_monoid(bottom).generators == ("x", "x^-1")
    G = spec(Z2)
    group_point = TopoPoint(FiniteMSet(Z2, [0, 1], [[1, 0]]), G.prime(0), "")
    assert endomorphism_monoid(group_point) == Z2


def test_points_tensor_table_is_meet(corpus_presentations):
    for name in ("free2", "x2y2", "idem"):
        M = corpus_presentations[name]
        rep = points(M)
        L = rep.lattice
        for (p, q), r in rep.tensor_table.items():
            assert r == prime_meet(L.prime(p), L.prime(q), L).mask


# ---------------------------------------------------------------- finite generation


def test_pairs_of_naturals_not_finitely_generated():
    A = product(regular_mset(N), regular_mset(N))
    rep = finite_generation_report(A)
    assert rep.counts == {w: 2 * w + 1 for w in range(3, 9)}
    assert rep.finitely_generated is False


def test_free_cyclic_is_finitely_generated():
    rep = finite_generation_report(regular_mset(F2))
    assert set(rep.counts.values()) == {1}
    assert rep.finitely_generated is True


def test_enumeration_is_labelled_and_complete_for_idempotent():
    # idempotent maps on a 2-set: identity, two constants
    assert len(list(enumerate_finite_msets(IDEM, 2))) == 3
    assert all(len(A) == 2 for A in enumerate_finite_msets(IDEM, 2))


def test_filtered_finite_idempotent_carriers_classify():
    for size in (1, 2):
        for A in enumerate_finite_msets(IDEM, size):
            if is_filtered(A):
                p = classify_point(A).prime
                assert p in spec(IDEM)
