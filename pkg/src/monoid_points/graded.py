"""Positively graded monoids and graded M-sets.

A graded M-set here is a disjoint union of *pieces*. Each piece is a
(sub-M-set of a) localization of the total monoid T, shifted in degree:
an element is a pair ``(piece, v)`` with v a signed exponent vector, and its
degree is ``deg(v) - shift``. This covers M_*(n), coproducts of shifts, the
irrelevant ideal M_+ and graded localizations, which is all the projective
constructions need.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Sequence

from .core import (
    DEFAULT_BUDGET,
    LocalizedMonoid,
    MonoidPresentation,
    PresentationError,
    Vec,
    _glex,
    explore_class,
    ideal_membership,
    support_mask,
)

Elem = tuple[int, Vec]


class GradingError(ValueError):
    pass


@dataclass(frozen=True)
class GradedMonoid:
    base: MonoidPresentation
    degrees: tuple[int, ...]

    def __post_init__(self):
        degs = tuple(int(d) for d in self.degrees)
        if len(degs) != self.base.rank:
            raise GradingError("one degree per generator required")
        if any(d < 0 for d in degs):
            raise GradingError("degrees must be non-negative")
        object.__setattr__(self, "degrees", degs)
        for u, v in self.base.relations:
            if self.degree(u) != self.degree(v):
                raise GradingError(f"relation {self.base.word(u)}={self.base.word(v)} is not homogeneous")

    @classmethod
    def free(cls, names: Iterable[str], degree: int = 1) -> "GradedMonoid":
        names = tuple(names)
        return cls(MonoidPresentation(names), (degree,) * len(names))

    @classmethod
    def from_map(cls, base: MonoidPresentation, degrees: dict[str, int]) -> "GradedMonoid":
        missing = [g for g in base.generators if g not in degrees]
        if missing:
            raise GradingError(f"missing degrees for {missing}")
        return cls(base, tuple(degrees[g] for g in base.generators))

    def degree(self, v: Sequence[int]) -> int:
        return sum(d * x for d, x in zip(self.degrees, v))

    @property
    def rank(self) -> int:
        return self.base.rank

    def generators_of_degree(self, d: int) -> list[int]:
        return [i for i, x in enumerate(self.degrees) if x == d]

    @cached_property
    def degree_zero_part(self) -> MonoidPresentation:
        """M_0: the degree-0 generators with the relations among them."""
        zero = self.generators_of_degree(0)
        rels = []
        for u, v in self.base.relations:
            if self.degree(u) == 0:
                rels.append((tuple(u[i] for i in zero), tuple(v[i] for i in zero)))
        return MonoidPresentation(tuple(self.base.generators[i] for i in zero), tuple(rels))

    def elements_of_degree(self, d: int, budget: int = DEFAULT_BUDGET) -> list[Vec]:
        """Canonical representatives of M_d (degree-0 generators bounded when M_0 is infinite)."""
        loc = LocalizedMonoid(self.base, budget=budget)
        return sorted({loc.canonical(v) for v in _vectors_of_degree(self, d, bound=max(d, 2))}, key=_glex)


def _vectors_of_degree(M: GradedMonoid, d: int, bound: int) -> list[Vec]:
    ranges = []
    for deg in M.degrees:
        ranges.append(range(0, (d // deg if deg else bound) + 1))
    return [v for v in itertools.product(*ranges) if M.degree(v) == d]


# ---------------------------------------------------------------- finite graded sets


@dataclass(frozen=True)
class GradedSet:
    parts: tuple[tuple[int, tuple], ...]

    @classmethod
    def of(cls, parts: dict[int, Iterable]) -> "GradedSet":
        return cls(tuple(sorted((int(d), tuple(xs)) for d, xs in parts.items() if tuple(xs))))

    def part(self, d: int) -> tuple:
        return dict(self.parts).get(d, ())

    def tot(self) -> list[tuple[int, object]]:
        return [(d, x) for d, xs in self.parts for x in xs]

    def __len__(self):
        return sum(len(xs) for _, xs in self.parts)


def unit_graded_set() -> GradedSet:
    return GradedSet.of({0: ["1"]})


def boxtimes(X: GradedSet, Y: GradedSet) -> GradedSet:
    out: dict[int, list] = {}
    for i, xs in X.parts:
        for j, ys in Y.parts:
            out.setdefault(i + j, []).extend(itertools.product(xs, ys))
    return GradedSet.of(out)


# ---------------------------------------------------------------- graded M-sets


@dataclass(frozen=True)
class Piece:
    """Sub-M-set of T[S^-1](shift), generated by ``ideal`` when given."""

    shift: int = 0
    inverted: frozenset[int] = frozenset()
    ideal: tuple[Vec, ...] | None = None


@dataclass(frozen=True)
class GradedMSet:
    monoid: GradedMonoid
    pieces: tuple[Piece, ...]
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))

    @cached_property
    def _locs(self) -> list[LocalizedMonoid]:
        return [LocalizedMonoid(self.monoid.base, p.inverted, self.budget) for p in self.pieces]

    def loc(self, i: int) -> LocalizedMonoid:
        return self._locs[i]

    def degree(self, a: Elem) -> int:
        i, v = a
        return self.monoid.degree(v) - self.pieces[i].shift

    def canonical(self, a: Elem) -> Elem:
        i, v = a
        return (i, self._locs[i].canonical(v))

    def contains(self, a: Elem) -> bool:
        i, v = a
        piece = self.pieces[i]
        if not self._locs[i].contains(v):
            return False
        if piece.ideal is None:
            return True
        # v lies in S^-1 I iff v * s lies in I for some s built from inverted generators
        sigma = [1 if j in piece.inverted else 0 for j in range(self.monoid.rank)]
        for t in range(0, 2 * max(1, max((-x for x in v), default=0)) + 3):
            w = tuple(x + t * s for x, s in zip(v, sigma))
            if min(w, default=0) < 0:
                continue
            if ideal_membership(self.monoid.base, piece.ideal, w, self.budget).is_equal:
                return True
        return False

    def act(self, m: Sequence[int], a: Elem) -> Elem:
        i, v = a
        return self.canonical((i, tuple(x + y for x, y in zip(m, v))))

    def equal(self, a: Elem, b: Elem) -> bool:
        if a[0] != b[0]:
            return False
        return self._locs[a[0]].equal(a[1], b[1]).decided()

    def window(self, w: int, degrees: Iterable[int] | None = None) -> list[Elem]:
        """Canonical elements with exponents in the box of half-width w (optionally of given degrees)."""
        degs = set(degrees) if degrees is not None else None
        out = set()
        for i in range(len(self.pieces)):
            for v in self._locs[i].box(w):
                a = (i, v)
                if degs is not None and self.degree(a) not in degs:
                    continue
                if self.contains(a):
                    out.add(self.canonical(a))
        return sorted(out, key=lambda a: (a[0], _glex(a[1])))

    def shift(self, n: int) -> "GradedMSet":
        return shift(self, n)


def graded_free(M: GradedMonoid, shift_by: int = 0, budget: int = DEFAULT_BUDGET) -> GradedMSet:
    """M_*(n)."""
    return GradedMSet(M, (Piece(shift_by),), budget)


def irrelevant_ideal(M: GradedMonoid, budget: int = DEFAULT_BUDGET) -> GradedMSet:
    """M_+, generated by the generators of positive degree."""
    gens = tuple(M.base.gen(i) for i, d in enumerate(M.degrees) if d > 0)
    return GradedMSet(M, (Piece(0, frozenset(), gens),), budget)


def coproduct(*sets: GradedMSet) -> GradedMSet:
    if not sets:
        raise ValueError("need at least one summand")
    M = sets[0].monoid
    if any(s.monoid != M for s in sets):
        raise GradingError("summands over different graded monoids")
    return GradedMSet(M, tuple(p for s in sets for p in s.pieces), sets[0].budget)


def empty_graded(M: GradedMonoid) -> GradedMSet:
    return GradedMSet(M, ())


def shift(A: GradedMSet, n: int) -> GradedMSet:
    """(A(n))_j = A_{n+j}."""
    return replace(A, pieces=tuple(replace(p, shift=p.shift + n) for p in A.pieces))


def localize_graded(A: GradedMSet, f: Sequence[int]) -> GradedMSet:
    """A_{*f}: inverting f inverts every generator in its support."""
    S = frozenset(i for i, x in enumerate(f) if x)
    return replace(A, pieces=tuple(replace(p, inverted=p.inverted | S) for p in A.pieces))


def localize_graded_at(A: GradedMSet, S: Iterable[int]) -> GradedMSet:
    S = frozenset(S)
    return replace(A, pieces=tuple(replace(p, inverted=p.inverted | S) for p in A.pieces))


@dataclass(frozen=True)
class DegreeZeroCarrier:
    """Degree-zero fractions a/f^k of a graded M-set localized at f."""

    source: GradedMSet
    f: Vec

    @cached_property
    def localized(self) -> GradedMSet:
        return localize_graded(self.source, self.f)

    def elements(self, w: int) -> list[Elem]:
        return self.localized.window(w, degrees=[0])

    def contains(self, a: Elem) -> bool:
        return self.localized.degree(a) == 0 and self.localized.contains(a)

    def canonical(self, a: Elem) -> Elem:
        return self.localized.canonical(a)

    def equal(self, a: Elem, b: Elem) -> bool:
        return self.localized.equal(a, b)

    def act(self, m: Sequence[int], a: Elem) -> Elem:
        """Action of a degree-0 fraction m (a signed vector) on a."""
        if self.source.monoid.degree(m) != 0:
            raise GradingError("acting element must have degree 0")
        return self.localized.act(m, a)

    @property
    def monoid_generators(self) -> list[Vec]:
        """Generators g/f^{|g|/|f|} of the degree-zero monoid (f of degree 1)."""
        M = self.source.monoid
        d = M.degree(self.f)
        gens = []
        for i, deg in enumerate(M.degrees):
            if deg % d:
                continue
            g = list(M.base.gen(i))
            g = [x - (deg // d) * y for x, y in zip(g, self.f)]
            if any(g):
                gens.append(tuple(g))
        return gens


def degree_zero_localization(A: GradedMSet, f: Sequence[int]) -> DegreeZeroCarrier:
    f = tuple(int(x) for x in f)
    M = A.monoid
    if len(f) != M.rank or min(f, default=0) < 0:
        raise GradingError("f must be an element of the graded monoid")
    if M.degree(f) < 1:
        raise GradingError("f must have degree at least 1")
    return DegreeZeroCarrier(A, f)


def chart_presentation(M: GradedMonoid, f: int) -> MonoidPresentation:
    """M_{*(f)} for a degree-1 generator f: the total monoid with f set to 1."""
    if M.degrees[f] != 1:
        raise GradingError("chart generator must have degree 1")
    return M.base.with_relations([(M.base.gen(f), M.base.identity)])


def to_chart(M: GradedMonoid, f: int, v: Sequence[int]) -> Vec:
    """Degree-0 fraction as an element of M/(f=1): drop the f-coordinate."""
    return tuple(0 if i == f else x for i, x in enumerate(v))


def from_chart(M: GradedMonoid, f: int, u: Sequence[int]) -> Vec:
    u = list(u)
    u[f] = 0
    d = M.degree(u)
    u[f] = -d
    return tuple(u)


# ---------------------------------------------------------------- odot


@dataclass
class OdotResult:
    classes: dict[tuple[Elem, Elem], list[tuple[Elem, Elem]]]

    def __len__(self):
        return len(self.classes)


def odot(X: GradedMSet, Y: GradedMSet, w: int) -> OdotResult:
    """Degree-0 part of X ⊠_M Y on windows: pairs of complementary degree,
    identified along (x·g, y) ~ (x, g·y)."""
    if not X.pieces or not Y.pieces:
        return OdotResult({})
    M = X.monoid
    xs = X.window(w)
    ys = Y.window(w)
    by_deg: dict[int, list[Elem]] = {}
    for y in ys:
        by_deg.setdefault(Y.degree(y), []).append(y)
    pairs = [(x, y) for x in xs for y in by_deg.get(-X.degree(x), [])]
    index = {p: n for n, p in enumerate(pairs)}
    parent = list(range(len(pairs)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for (x, y), n in index.items():
        for g in range(M.rank):
            e = M.base.gen(g)
            # (x·g, y) ~ (x, g·y) for y = g·y' already handled from the other side
            for yy in by_deg.get(-X.degree(x) - M.degrees[g], []):
                if Y.act(e, yy) == y:
                    other = index.get((X.act(e, x), yy))
                    if other is not None:
                        a, b = find(n), find(other)
                        if a != b:
                            parent[max(a, b)] = min(a, b)
    classes: dict = {}
    for p, n in index.items():
        classes.setdefault(pairs[find(n)], []).append(p)
    return OdotResult(classes)


# ---------------------------------------------------------------- finiteness


@dataclass
class FinitenessReport:
    ok: bool
    degree_zero_generators: list[str]
    degree_one_generators: list[str]
    failure: str | None = None
    offending: str | None = None


def check_proj_finiteness(M: GradedMonoid, budget: int = DEFAULT_BUDGET) -> FinitenessReport:
    zero = [M.base.generators[i] for i in M.generators_of_degree(0)]
    one = [M.base.generators[i] for i in M.generators_of_degree(1)]
    # (i) M_0 is generated by the degree-0 generators, finitely many by construction
    # (ii) M_1 is generated over M_0 by the degree-1 generators
    # (iii) everything is generated in degrees 0 and 1
    for i, d in enumerate(M.degrees):
        if d > 1:
            return FinitenessReport(False, zero, one, "iii", M.base.generators[i])
    return FinitenessReport(True, zero, one)


# ---------------------------------------------------------------- graded filteredness


def _nonneg_representative(loc: LocalizedMonoid, v: Vec) -> Vec | None:
    if not loc.contains(v):
        return None
    c = loc.canonical(v)
    if min(c, default=0) >= 0:
        return c
    if not loc.base.rewrite_rules:
        return None
    members, _ = explore_class(loc.base, c, loc.budget, bound=sum(abs(x) for x in c) + 4, inverted=loc.inverted_mask)
    good = [m for m in members if min(m, default=0) >= 0]
    return min(good, key=_glex) if good else None


@dataclass
class GradedFilterVerdict:
    ok: bool
    condition: str | None = None
    witness: object = None


def graded_filtered_check(A: GradedMSet, w: int = 2, sample: int = 10) -> GradedFilterVerdict:
    """Conditions (i)-(iii) of graded filteredness, sampled on a window with
    witnesses searched in the next window."""
    M = A.monoid
    small = A.window(w)
    big = A.window(w + 1)
    if not small:
        return GradedFilterVerdict(False, "i")
    inner = small[:sample]
    # (ii): a and b are both multiples of a common c
    for a, b in itertools.combinations_with_replacement(inner, 2):
        found = False
        for c in big:
            if c[0] != a[0] or c[0] != b[0]:
                continue
            loc = A.loc(c[0])
            u = _nonneg_representative(loc, tuple(p - q for p, q in zip(a[1], c[1])))
            v = _nonneg_representative(loc, tuple(p - q for p, q in zip(b[1], c[1])))
            if u is not None and v is not None:
                found = True
                break
        if not found:
            return GradedFilterVerdict(False, "ii", (a, b))
    # (iii): u a = v a forces a common w below a with u w = v w in M
    small_monoid = [m for d in range(0, 3) for m in M.elements_of_degree(d)]
    base = LocalizedMonoid(M.base)
    for a in inner:
        for u, v in itertools.combinations(small_monoid, 2):
            if M.degree(u) != M.degree(v) or A.act(u, a) != A.act(v, a):
                continue
            ok = False
            for b in big:
                if b[0] != a[0]:
                    continue
                wv = _nonneg_representative(A.loc(a[0]), tuple(p - q for p, q in zip(a[1], b[1])))
                if wv is None:
                    continue
                if base.equal(tuple(p + q for p, q in zip(u, wv)), tuple(p + q for p, q in zip(v, wv))).is_equal:
                    ok = True
                    break
            if not ok:
                return GradedFilterVerdict(False, "iii", (a, u, v))
    return GradedFilterVerdict(True)
