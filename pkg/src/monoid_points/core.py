"""Finitely presented commutative monoids and a budgeted word-problem oracle.

Elements are exponent vectors (plain tuples of ints). Multiplication is vector
addition; the congruence generated by the relations is decided by
:func:`are_equal`, which combines exact shortcuts (free and finite monoids),
sound separation certificates and a bounded bidirectional search.
"""

from __future__ import annotations

import enum
import itertools
from collections import Counter, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

Vec = tuple[int, ...]

DEFAULT_BUDGET = 10_000
FINITE_TABLE_LIMIT = 20_000


class BudgetExhausted(Exception):
    """Raised when an answer could not be decided within the step budget."""

    def __init__(self, message: str, budget: int | None = None):
        super().__init__(message)
        self.budget = budget


class PresentationError(ValueError):
    pass


def _vec(v: Iterable[int]) -> Vec:
    return tuple(int(x) for x in v)


def support_mask(v: Sequence[int]) -> int:
    mask = 0
    for i, x in enumerate(v):
        if x:
            mask |= 1 << i
    return mask


def multiply(a: Sequence[int], b: Sequence[int]) -> Vec:
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    return tuple(x + y for x, y in zip(a, b))


def power(a: Sequence[int], n: int) -> Vec:
    return tuple(n * x for x in a)


@dataclass(frozen=True, eq=False)
class MonoidPresentation:
    """Generators plus unoriented relation pairs of exponent vectors."""

    generators: tuple[str, ...]
    relations: tuple[tuple[Vec, Vec], ...] = ()

    def __post_init__(self):
        gens = tuple(str(g) for g in self.generators)
        if len(set(gens)) != len(gens):
            raise PresentationError(f"duplicate generator names in {gens}")
        k = len(gens)
        rels = []
        for n, rel in enumerate(self.relations):
            if len(rel) != 2:
                raise PresentationError(f"relation {n} is not a pair")
            u, v = _vec(rel[0]), _vec(rel[1])
            if len(u) != k or len(v) != k:
                raise PresentationError(f"relation {n} has wrong length (expected {k})")
            if min(u + v, default=0) < 0:
                raise PresentationError(f"relation {n} has a negative exponent")
            rels.append((u, v))
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "relations", tuple(rels))

    # value semantics: generator list plus the multiset of unoriented relations
    @cached_property
    def _key(self):
        rels = Counter(tuple(sorted(r)) for r in self.relations)
        return (self.generators, tuple(sorted(rels.items())))

    def __eq__(self, other):
        if not isinstance(other, MonoidPresentation):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        rels = ", ".join(f"{self.word(u)}={self.word(v)}" for u, v in self.relations)
        return f"<{','.join(self.generators)} | {rels}>"

    @classmethod
    def free(cls, names: Iterable[str] | int) -> "MonoidPresentation":
        if isinstance(names, int):
            names = [f"x{i + 1}" for i in range(names)]
        return cls(tuple(names))

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def identity(self) -> Vec:
        return (0,) * self.rank

    def index(self, name: str) -> int:
        try:
            return self.generators.index(name)
        except ValueError:
            raise PresentationError(f"unknown generator {name!r}") from None

    def gen(self, i: int | str, exponent: int = 1) -> Vec:
        if isinstance(i, str):
            i = self.index(i)
        v = [0] * self.rank
        v[i] = exponent
        return tuple(v)

    def element(self, exponents: dict[str, int] | None = None, **kw: int) -> Vec:
        exps = dict(exponents or {}, **kw)
        v = [0] * self.rank
        for name, e in exps.items():
            v[self.index(name)] = int(e)
        return tuple(v)

    def word(self, v: Sequence[int]) -> str:
        parts = []
        for name, e in zip(self.generators, v):
            if e == 1:
                parts.append(name)
            elif e:
                parts.append(f"{name}^{e}")
        return "*".join(parts) or "1"

    def with_relations(self, extra: Iterable[tuple[Sequence[int], Sequence[int]]]) -> "MonoidPresentation":
        return MonoidPresentation(self.generators, self.relations + tuple((_vec(u), _vec(v)) for u, v in extra))

    def check(self, v: Sequence[int]) -> Vec:
        v = _vec(v)
        if len(v) != self.rank:
            raise ValueError(f"element of length {len(v)} over a presentation of rank {self.rank}")
        return v

    # -- structural data shared by the oracle ---------------------------------

    @cached_property
    def rewrite_rules(self) -> tuple[tuple[Vec, Vec], ...]:
        """Both orientations of every nontrivial relation, deduplicated."""
        seen = []
        for u, v in self.relations:
            if u == v:
                continue
            for a, b in ((u, v), (v, u)):
                if (a, b) not in seen:
                    seen.append((a, b))
        return tuple(seen)

    @cached_property
    def relation_masks(self) -> tuple[tuple[int, int], ...]:
        return tuple((support_mask(u), support_mask(v)) for u, v in self.relations)

    @cached_property
    def lattice(self) -> "IntegerLattice":
        return IntegerLattice.from_rows([tuple(a - b for a, b in zip(u, v)) for u, v in self.relations], self.rank)

    @cached_property
    def finite_table(self) -> "FiniteCongruence | None":
        return FiniteCongruence.build(self)

    def face(self, mask: int) -> int:
        """Smallest relation-closed generator set containing ``mask``.

        Its complement is the largest valid character zero-set avoiding ``mask``.
        """
        changed = True
        while changed:
            changed = False
            for mu, mv in self.relation_masks:
                if mu & ~mask == 0 and mv & ~mask:
                    mask |= mv
                    changed = True
                elif mv & ~mask == 0 and mu & ~mask:
                    mask |= mu
                    changed = True
        return mask

    @cached_property
    def unit_mask(self) -> int:
        return self.face(0)

    def is_valid_zero_set(self, mask: int) -> bool:
        return all(bool(mu & mask) == bool(mv & mask) for mu, mv in self.relation_masks)


class IntegerLattice:
    """Row-echelon (Hermite) basis of a sublattice of Z^k with canonical coset reduction."""

    def __init__(self, basis: list[list[int]], pivots: list[int], k: int):
        self.basis = basis
        self.pivots = pivots
        self.k = k

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], k: int) -> "IntegerLattice":
        work = [list(r) for r in rows if any(r)]
        basis: list[list[int]] = []
        pivots: list[int] = []
        for col in range(k):
            while True:
                nz = [r for r in work if r[col] != 0]
                if not nz:
                    break
                piv = min(nz, key=lambda r: abs(r[col]))
                if piv[col] < 0:
                    for j in range(k):
                        piv[j] = -piv[j]
                others = [r for r in nz if r is not piv]
                if not others:
                    work = [r for r in work if r is not piv]
                    basis.append(piv)
                    pivots.append(col)
                    break
                for r in others:
                    q = r[col] // piv[col]
                    for j in range(k):
                        r[j] -= q * piv[j]
                work = [r for r in work if any(r)]
        # reduce entries above each pivot into [0, pivot)
        for i in range(len(basis)):
            c = pivots[i]
            for j in range(i):
                q = basis[j][c] // basis[i][c]
                if q:
                    basis[j] = [a - q * b for a, b in zip(basis[j], basis[i])]
        return cls(basis, pivots, k)

    def reduce(self, v: Sequence[int]) -> Vec:
        v = list(v)
        for row, c in zip(self.basis, self.pivots):
            q = v[c] // row[c]
            if q:
                v = [a - q * b for a, b in zip(v, row)]
        return tuple(v)

    def contains(self, v: Sequence[int]) -> bool:
        return not any(self.reduce(v))

    @property
    def rank(self) -> int:
        return len(self.basis)


class FiniteCongruence:
    """Exact congruence for presentations in which every generator has a pure power relation.

    Such a monoid is a quotient of a finite product of cyclic monoids, so the
    congruence can be closed by union-find over that product.
    """

    def __init__(self, index: list[int], period: list[int], parent: dict[Vec, Vec]):
        self.index = index
        self.period = period
        self.parent = parent

    @classmethod
    def build(cls, M: MonoidPresentation, limit: int = FINITE_TABLE_LIMIT) -> "FiniteCongruence | None":
        k = M.rank
        best: list[tuple[int, int] | None] = [None] * k
        for u, v in M.relations:
            mask = support_mask(u) | support_mask(v)
            if mask == 0 or mask & (mask - 1):
                continue
            i = mask.bit_length() - 1
            a, b = sorted((u[i], v[i]))
            if a == b:
                continue
            # cyclic monoid x^a = x^b: index a, period b - a
            if best[i] is None or b < best[i][0] + best[i][1]:
                best[i] = (a, b - a)
        if any(x is None for x in best):
            return None
        index = [x[0] for x in best]
        period = [x[1] for x in best]
        size = 1
        for a, p in zip(index, period):
            size *= a + p
            if size > limit:
                return None
        table = cls(index, period, {})
        elems = list(itertools.product(*[range(a + p) for a, p in zip(index, period)]))
        parent = {e: e for e in elems}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        red = [(table._reduce(u), table._reduce(v)) for u, v in M.relations]
        for u, v in red:
            if u == v:
                continue
            for w in elems:
                a = find(table._reduce(multiply(u, w)))
                b = find(table._reduce(multiply(v, w)))
                if a != b:
                    if b < a:
                        a, b = b, a
                    parent[b] = a
        table.parent = {e: find(e) for e in elems}
        return table

    def _reduce(self, v: Sequence[int]) -> Vec:
        out = []
        for x, a, p in zip(v, self.index, self.period):
            if x >= a + p:
                x = a + (x - a) % p
            out.append(x)
        return tuple(out)

    def cls(self, v: Sequence[int]) -> Vec:
        return self.parent[self._reduce(v)]

    def elements(self) -> list[Vec]:
        return sorted(set(self.parent.values()), key=_glex)


def _glex(v: Sequence[int]):
    # graded-lex, preferring vectors with fewer negative entries
    return (sum(abs(x) for x in v), sum(1 for x in v if x < 0), tuple(v))


class Verdict(enum.Enum):
    EQUAL = "Equal"
    DISTINCT = "Distinct"
    UNKNOWN = "UnknownWithinBound"


@dataclass(frozen=True)
class EqualityVerdict:
    verdict: Verdict
    budget: int | None = None

    @property
    def is_equal(self) -> bool:
        return self.verdict is Verdict.EQUAL

    @property
    def is_distinct(self) -> bool:
        return self.verdict is Verdict.DISTINCT

    @property
    def is_unknown(self) -> bool:
        return self.verdict is Verdict.UNKNOWN

    def decided(self) -> bool:
        """True/False for Equal/Distinct; raises on an undecided verdict."""
        if self.verdict is Verdict.UNKNOWN:
            raise BudgetExhausted("equality undecided within budget", self.budget)
        return self.verdict is Verdict.EQUAL

    def __str__(self):
        if self.verdict is Verdict.UNKNOWN:
            return f"UnknownWithinBound({self.budget})"
        return self.verdict.value


EQUAL = EqualityVerdict(Verdict.EQUAL)
DISTINCT = EqualityVerdict(Verdict.DISTINCT)


def _unknown(budget: int) -> EqualityVerdict:
    return EqualityVerdict(Verdict.UNKNOWN, budget)


def _neighbours(rules, v: Vec, locked: int = -1):
    """Single-relation rewrites of ``v``; coordinates outside ``locked`` may go negative."""
    for u, w in rules:
        ok = True
        for i, x in enumerate(u):
            if x and (locked >> i) & 1 and v[i] < x:
                ok = False
                break
        if ok:
            yield tuple(a - b + c for a, b, c in zip(v, u, w))


def _bidirectional(rules, a: Vec, b: Vec, budget: int, locked: int = -1) -> EqualityVerdict:
    seen = [{a}, {b}]
    frontier = [deque([a]), deque([b])]
    steps = 0
    while frontier[0] and frontier[1]:
        side = 0 if len(frontier[0]) <= len(frontier[1]) else 1
        other = seen[1 - side]
        for _ in range(len(frontier[side])):
            v = frontier[side].popleft()
            steps += 1
            if steps > budget:
                return _unknown(budget)
            for n in _neighbours(rules, v, locked):
                if n in other:
                    return EQUAL
                if n not in seen[side]:
                    seen[side].add(n)
                    frontier[side].append(n)
    # one closure was exhausted without meeting the other
    return DISTINCT


def separated(M: MonoidPresentation, a: Vec, b: Vec, inverted: int = 0) -> bool:
    """Sound certificate that a != b in M (localized at ``inverted``).

    Either the difference leaves the relation lattice (the images in the
    group completion differ) or some character separates the supports.
    """
    if not M.lattice.contains(tuple(x - y for x, y in zip(a, b))):
        return True
    pa = support_mask(tuple(max(x, 0) for x in a)) | inverted
    pb = support_mask(tuple(max(x, 0) for x in b)) | inverted
    return M.face(pa) != M.face(pb)


def are_equal(M: MonoidPresentation, a: Sequence[int], b: Sequence[int], budget: int = DEFAULT_BUDGET) -> EqualityVerdict:
    if budget <= 0:
        raise ValueError("budget must be positive")
    a, b = M.check(a), M.check(b)
    if a == b:
        return EQUAL
    if not M.rewrite_rules:
        return DISTINCT
    if separated(M, a, b):
        return DISTINCT
    table = M.finite_table
    if table is not None:
        return EQUAL if table.cls(a) == table.cls(b) else DISTINCT
    return _bidirectional(M.rewrite_rules, a, b, budget)


def explore_class(M: MonoidPresentation, v: Sequence[int], budget: int, bound: int | None = None,
                  inverted: int = 0) -> tuple[set[Vec], bool]:
    """Breadth-first part of the class of ``v``; returns (members, exhausted).

    ``bound`` limits the l1-norm of visited vectors; ``inverted`` marks
    coordinates allowed to go negative (localized generators).
    """
    v = tuple(v)
    locked = ~inverted
    seen = {v}
    queue = deque([v])
    steps = 0
    while queue:
        steps += 1
        if steps > budget:
            return seen, False
        x = queue.popleft()
        for n in _neighbours(M.rewrite_rules, x, locked):
            if n in seen:
                continue
            if bound is not None and sum(abs(c) for c in n) > bound:
                continue
            seen.add(n)
            queue.append(n)
    return seen, True


def canonical_form(M: MonoidPresentation, v: Sequence[int], budget: int = DEFAULT_BUDGET) -> Vec:
    """Graded-lex minimum of the explored class (exact on free and finite monoids)."""
    v = M.check(v)
    if not M.rewrite_rules:
        return v
    table = M.finite_table
    if table is not None:
        return table.cls(v)
    slack = max(max(sum(u), sum(w)) for u, w in M.rewrite_rules)
    members, _ = explore_class(M, v, budget, bound=sum(v) + slack)
    return min(members, key=_glex)


def units(M: MonoidPresentation, budget: int = DEFAULT_BUDGET) -> frozenset[int]:
    """Indices of generators that are units.

    The non-units of a commutative monoid form its largest prime, so a
    generator is a unit exactly when no valid character kills it; this is
    computed by closing the empty support under the relations.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    mask = M.unit_mask
    return frozenset(i for i in range(M.rank) if (mask >> i) & 1)


def unit_witness(M: MonoidPresentation, i: int, budget: int = DEFAULT_BUDGET) -> Vec | None:
    """Some e with g_i * e = 1, found by exploring the class of the identity."""
    if not (M.unit_mask >> i) & 1:
        return None
    table = M.finite_table
    if table is not None:
        one = table.cls(M.identity)
        for e in itertools.product(*[range(a + p) for a, p in zip(table.index, table.period)]):
            if table.cls(multiply(M.gen(i), e)) == one:
                return e
        return None
    members, _ = explore_class(M, M.identity, budget)
    best = [m for m in members if m[i] > 0]
    if not best:
        return None
    m = min(best, key=_glex)
    return tuple(x - (1 if j == i else 0) for j, x in enumerate(m))


def reduced_monoid(M: MonoidPresentation, budget: int = DEFAULT_BUDGET) -> MonoidPresentation:
    u = units(M, budget)
    extra = [(M.gen(i), M.identity) for i in sorted(u)]
    return M.with_relations(extra)


@dataclass(frozen=True)
class Ideal:
    presentation: MonoidPresentation
    generators: tuple[Vec, ...]

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.presentation.check(g) for g in self.generators))


def _divides_free(g: Vec, m: Vec) -> bool:
    return all(x <= y for x, y in zip(g, m))


def ideal_membership(M: MonoidPresentation, I: Ideal | Iterable[Sequence[int]], m: Sequence[int],
                     budget: int = DEFAULT_BUDGET) -> EqualityVerdict:
    """Equal when m lies in the ideal, Distinct when it provably does not."""
    if budget <= 0:
        raise ValueError("budget must be positive")
    gens = I.generators if isinstance(I, Ideal) else tuple(M.check(g) for g in I)
    m = M.check(m)
    if not gens:
        return DISTINCT
    if not M.rewrite_rules:
        return EQUAL if any(_divides_free(g, m) for g in gens) else DISTINCT
    table = M.finite_table
    if table is not None:
        target = table.cls(m)
        box = list(itertools.product(*[range(a + p) for a, p in zip(table.index, table.period)]))
        for g in gens:
            for c in box:
                if table.cls(multiply(g, c)) == target:
                    return EQUAL
        return DISTINCT
    # a character killing every generator of I but not m proves non-membership
    pm = M.face(support_mask(m))
    if all(support_mask(g) & ~pm for g in gens):
        return DISTINCT
    members, exhausted = explore_class(M, m, budget)
    if any(_divides_free(g, x) for x in members for g in gens):
        return EQUAL
    return DISTINCT if exhausted else _unknown(budget)


def minimal_ideal_generators(M: MonoidPresentation, elements: Iterable[Sequence[int]],
                             budget: int = DEFAULT_BUDGET) -> Ideal:
    elems = [M.check(e) for e in elements]
    if not elems:
        raise ValueError("need at least one element")
    current = sorted(dict.fromkeys(elems), key=_glex)
    for e in list(current):
        others = [g for g in current if g != e]
        if not others:
            continue
        verdict = ideal_membership(M, others, e, budget)
        if verdict.is_unknown:
            raise BudgetExhausted(f"membership of {M.word(e)} undecided", budget)
        if verdict.is_equal:
            current.remove(e)
    return Ideal(M, tuple(current))


def product_with_naturals(M: MonoidPresentation, name: str = "t") -> MonoidPresentation:
    """M x N, with the extra free generator appended last."""
    if name in M.generators:
        name = name + "'"
    rels = [(u + (0,), v + (0,)) for u, v in M.relations]
    return MonoidPresentation(M.generators + (name,), tuple(rels))


def levelled_generators(M: MonoidPresentation, gens: Iterable[tuple[Sequence[int], int]],
                        budget: int = DEFAULT_BUDGET) -> list[tuple[Vec, int]]:
    """Finite generating set of an ideal of M x N built level by level.

    Input pairs (m, r) generate the ideal; the output takes generators of the
    projected ideal with the largest level t among them, plus generators of
    each slice {m : (m, s) in ideal} for s < t.
    """
    gens = [(M.check(m), int(r)) for m, r in gens]
    if not gens:
        return []
    proj = minimal_ideal_generators(M, [m for m, _ in gens], budget).generators
    chosen = []
    for p in proj:
        level = min(r for m, r in gens if m == p)
        chosen.append((p, level))
    top = max(r for _, r in chosen)
    out = list(chosen)
    for s in range(top):
        slice_gens = [m for m, r in gens if r <= s]
        if slice_gens:
            for m in minimal_ideal_generators(M, slice_gens, budget).generators:
                out.append((m, s))
    return sorted(dict.fromkeys(out), key=lambda p: (p[1], _glex(p[0])))


def in_levelled_ideal(M: MonoidPresentation, gens: Iterable[tuple[Sequence[int], int]], m: Sequence[int], r: int,
                      budget: int = DEFAULT_BUDGET) -> EqualityVerdict:
    """Membership of (m, r) in the ideal of M x N generated by ``gens``."""
    slice_gens = [g for g, level in gens if level <= r]
    return ideal_membership(M, slice_gens, m, budget)


@dataclass(frozen=True, eq=False)
class LocalizedMonoid:
    """M with a set of generators inverted.

    Elements are signed exponent vectors: coordinates in ``inverted`` may be
    negative, so x^a * s^-b is stored as one vector. Generators that are
    already units of the base need no formal inverse in the realized
    presentation.
    """

    base: MonoidPresentation
    inverted: frozenset[int] = frozenset()
    budget: int = DEFAULT_BUDGET
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        inv = frozenset(int(i) for i in self.inverted)
        if any(i < 0 or i >= self.base.rank for i in inv):
            raise ValueError("inverted generator index out of range")
        object.__setattr__(self, "inverted", inv)

    def __eq__(self, other):
        if not isinstance(other, LocalizedMonoid):
            return NotImplemented
        return self.base == other.base and self.inverted == other.inverted

    def __hash__(self):
        return hash((self.base, self.inverted))

    def __repr__(self):
        inv = ",".join(self.base.generators[i] for i in sorted(self.inverted))
        return f"{self.base!r}[{inv}^-1]"

    @property
    def rank(self) -> int:
        return self.base.rank

    @cached_property
    def inverted_mask(self) -> int:
        m = 0
        for i in self.inverted:
            m |= 1 << i
        return m

    @cached_property
    def unit_mask(self) -> int:
        return self.base.face(self.inverted_mask)

    def is_unit_generator(self, i: int) -> bool:
        return bool((self.unit_mask >> i) & 1)

    def check(self, v: Sequence[int]) -> Vec:
        v = _vec(v)
        if len(v) != self.rank:
            raise ValueError("dimension mismatch")
        for i, x in enumerate(v):
            if x < 0 and i not in self.inverted:
                raise ValueError(f"negative exponent at non-inverted generator {self.base.generators[i]}")
        return v

    def contains(self, v: Sequence[int]) -> bool:
        return all(x >= 0 or i in self.inverted for i, x in enumerate(v))

    @cached_property
    def formal_inverses(self) -> tuple[int, ...]:
        return tuple(i for i in sorted(self.inverted) if not (self.base.unit_mask >> i) & 1)

    @cached_property
    def presentation(self) -> MonoidPresentation:
        """Realized presentation with one formal inverse per non-unit inverted generator."""
        M = self.base
        extra = self.formal_inverses
        names = list(M.generators)
        for i in extra:
            nm = M.generators[i] + "^-1"
            while nm in names:
                nm += "'"
            names.append(nm)
        pad = (0,) * len(extra)
        rels = [(u + pad, v + pad) for u, v in M.relations]
        for j, i in enumerate(extra):
            u = [0] * len(names)
            u[i] = 1
            u[M.rank + j] = 1
            rels.append((tuple(u), (0,) * len(names)))
        return MonoidPresentation(tuple(names), tuple(rels))

    def _inverse_vector(self, i: int) -> Vec:
        key = ("inv", i)
        if key not in self._cache:
            w = unit_witness(self.base, i, self.budget)
            if w is None:
                raise BudgetExhausted(f"no inverse witness for unit {self.base.generators[i]}", self.budget)
            self._cache[key] = w
        return self._cache[key]

    def realize(self, v: Sequence[int]) -> Vec:
        v = self.check(v)
        out = [max(x, 0) for x in v]
        extra = [0] * len(self.formal_inverses)
        for i, x in enumerate(v):
            if x >= 0:
                continue
            if i in self.formal_inverses:
                extra[self.formal_inverses.index(i)] += -x
            else:
                w = self._inverse_vector(i)
                out = [a + (-x) * b for a, b in zip(out, w)]
        return tuple(out) + tuple(extra)

    def multiply(self, a: Sequence[int], b: Sequence[int]) -> Vec:
        return multiply(a, b)

    def equal(self, a: Sequence[int], b: Sequence[int], budget: int | None = None) -> EqualityVerdict:
        budget = budget or self.budget
        a, b = self.check(a), self.check(b)
        if a == b:
            return EQUAL
        M = self.base
        if not M.rewrite_rules:
            return DISTINCT
        if separated(M, a, b, self.inverted_mask):
            return DISTINCT
        table = M.finite_table
        if table is not None:
            return EQUAL if self._finite_key(a) == self._finite_key(b) else DISTINCT
        return _bidirectional(M.rewrite_rules, a, b, budget, locked=~self.inverted_mask)

    @cached_property
    def _sigma_cycle(self) -> tuple[int, int]:
        """Index and period of the product of inverted generators in the finite base."""
        table = self.base.finite_table
        sigma = [1 if i in self.inverted else 0 for i in range(self.rank)]
        seen: dict[Vec, int] = {}
        j = 0
        while True:
            c = table.cls(power(sigma, j))
            if c in seen:
                return seen[c], j - seen[c]
            seen[c] = j
            j += 1

    def _finite_key(self, v: Vec) -> Vec:
        # m/s = m'/s' iff m s' t = m' s t for some t built from inverted
        # generators; scaling every fraction to the common denominator
        # sigma^N with N past the cycle index makes this a table lookup
        table = self.base.finite_table
        index, period = self._sigma_cycle
        den = max((max(-x, 0) for x in v), default=0)
        n = index + den
        n += (-n) % period
        shifted = [x + (n if i in self.inverted else 0) for i, x in enumerate(v)]
        return table.cls(shifted)

    def canonical(self, v: Sequence[int]) -> Vec:
        v = self.check(v)
        M = self.base
        if not M.rewrite_rules:
            return v
        cache = self._cache.setdefault("canon", {})
        if v in cache:
            return cache[v]
        if M.finite_table is not None:
            res = self._canonical_finite(v)
        else:
            slack = max(max(sum(u), sum(w)) for u, w in M.rewrite_rules)
            members, _ = explore_class(M, v, self.budget, bound=sum(abs(x) for x in v) + slack,
                                       inverted=self.inverted_mask)
            res = min(members, key=_glex)
        cache[v] = res
        return res

    def _canonical_finite(self, v: Vec) -> Vec:
        key = self._finite_key(v)
        reps = self._cache.setdefault("finite_reps", None)
        if reps is None:
            reps = {}
            table = self.base.finite_table
            index, period = self._sigma_cycle
            radius = max([a + p for a, p in zip(table.index, table.period)] + [index + period])
            ranges = [range(-radius, radius + 1) if i in self.inverted else range(0, radius + 1)
                      for i in range(self.rank)]
            for w in sorted(itertools.product(*ranges), key=_glex):
                reps.setdefault(self._finite_key(w), w)
            self._cache["finite_reps"] = reps
        return reps[key]

    def box(self, w: int) -> list[Vec]:
        ranges = [range(-w, w + 1) if i in self.inverted else range(0, w + 1) for i in range(self.rank)]
        return [tuple(v) for v in itertools.product(*ranges)]

    def window(self, w: int) -> list[Vec]:
        """Canonical forms of the elements in the box of half-width w, sorted."""
        return sorted({self.canonical(v) for v in self.box(w)}, key=_glex)

    def action_generators(self) -> list[Vec]:
        """Generator moves: +e_i for each generator, -e_s for each inverted one."""
        k = self.rank
        moves = []
        for i in range(k):
            moves.append(tuple(1 if j == i else 0 for j in range(k)))
        for s in sorted(self.inverted):
            moves.append(tuple(-1 if j == s else 0 for j in range(k)))
        return moves

    def localize(self, more: Iterable[int]) -> "LocalizedMonoid":
        return LocalizedMonoid(self.base, self.inverted | frozenset(more), self.budget)


def localize(M: MonoidPresentation, S: Iterable[int | str], budget: int = DEFAULT_BUDGET) -> LocalizedMonoid:
    idx = frozenset(M.index(s) if isinstance(s, str) else int(s) for s in S)
    return LocalizedMonoid(M, idx, budget)
