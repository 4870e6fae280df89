"""Prime spectrum of a presented commutative monoid.

A prime ideal is the kernel of a character M -> {0, 1} (multiplicative, with
min as product), so it is determined by the set of generators sent to 0.
A zero-set is admissible when every relation has both sides meeting it or
neither side meeting it. Zero-sets are stored as bitmasks over generators.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .core import MonoidPresentation, Vec, support_mask

DEFAULT_CAP = 20


class LatticeError(ValueError):
    pass


def mask_names(M: MonoidPresentation, mask: int) -> list[str]:
    return [g for i, g in enumerate(M.generators) if (mask >> i) & 1]


@dataclass(frozen=True)
class Character:
    presentation: MonoidPresentation
    zero_mask: int

    def __post_init__(self):
        if not self.presentation.is_valid_zero_set(self.zero_mask):
            raise LatticeError(f"zero-set {mask_names(self.presentation, self.zero_mask)} is not a character")

    def __call__(self, v: Sequence[int]) -> int:
        return 0 if support_mask(v) & self.zero_mask else 1

    @property
    def zero_set(self) -> frozenset[int]:
        return frozenset(i for i in range(self.presentation.rank) if (self.zero_mask >> i) & 1)


@dataclass(frozen=True)
class PrimeIdeal:
    presentation: MonoidPresentation
    mask: int

    def __post_init__(self):
        if not self.presentation.is_valid_zero_set(self.mask):
            raise LatticeError(f"zero-set {mask_names(self.presentation, self.mask)} is not prime")

    @property
    def character(self) -> Character:
        return Character(self.presentation, self.mask)

    @property
    def zero_set(self) -> frozenset[int]:
        return frozenset(i for i in range(self.presentation.rank) if (self.mask >> i) & 1)

    def __contains__(self, v: Sequence[int]) -> bool:
        # only the positive part of a fraction matters: inverted generators are never in the zero-set
        return bool(support_mask([max(x, 0) for x in v]) & self.mask)

    def __le__(self, other: "PrimeIdeal") -> bool:
        return self.mask & ~other.mask == 0

    def __lt__(self, other: "PrimeIdeal") -> bool:
        return self <= other and self.mask != other.mask

    @property
    def complement(self) -> frozenset[int]:
        """Generators outside the prime, i.e. those inverted in the localization."""
        return frozenset(i for i in range(self.presentation.rank) if not (self.mask >> i) & 1)

    @property
    def label(self) -> str:
        names = mask_names(self.presentation, self.mask)
        return "(" + ",".join(names) + ")" if names else "∅"

    def __repr__(self):
        return f"PrimeIdeal{self.label}"


@dataclass(frozen=True)
class SpecLattice:
    presentation: MonoidPresentation
    primes: tuple[PrimeIdeal, ...]

    @cached_property
    def order(self) -> list[list[int]]:
        return [[1 if p <= q else 0 for q in self.primes] for p in self.primes]

    @cached_property
    def masks(self) -> list[int]:
        return [p.mask for p in self.primes]

    def __len__(self):
        return len(self.primes)

    def __iter__(self):
        return iter(self.primes)

    def __contains__(self, p: PrimeIdeal) -> bool:
        return p.presentation == self.presentation and p.mask in set(self.masks)

    def prime(self, mask: int) -> PrimeIdeal:
        for p in self.primes:
            if p.mask == mask:
                return p
        raise LatticeError(f"no prime with zero-set mask {mask}")

    @property
    def bottom(self) -> PrimeIdeal:
        return self.primes[0]

    @property
    def top(self) -> PrimeIdeal:
        top = 0
        for m in self.masks:
            top |= m
        return self.prime(top)

    def to_json(self) -> dict:
        return {"primes": self.masks, "order": self.order}


def spec(M: MonoidPresentation, cap: int = DEFAULT_CAP) -> SpecLattice:
    k = M.rank
    if k > cap:
        raise LatticeError(f"{k} generators exceed the enumeration cap {cap}")
    rels = M.relation_masks
    masks = []
    for mask in range(1 << k):
        if all(bool(mu & mask) == bool(mv & mask) for mu, mv in rels):
            masks.append(mask)
    return SpecLattice(M, tuple(PrimeIdeal(M, m) for m in masks))


def prime_union(p: PrimeIdeal, q: PrimeIdeal) -> PrimeIdeal:
    if p.presentation != q.presentation:
        raise LatticeError("primes over different monoids")
    return PrimeIdeal(p.presentation, p.mask | q.mask)


def prime_meet(p: PrimeIdeal, q: PrimeIdeal, L: SpecLattice) -> PrimeIdeal:
    """Union of all primes contained in both p and q."""
    if p not in L or q not in L:
        raise LatticeError("primes not in the lattice")
    mask = 0
    for r in L.primes:
        if r <= p and r <= q:
            mask |= r.mask
    return L.prime(mask)


def basic_open(L: SpecLattice, f: Sequence[int]) -> list[PrimeIdeal]:
    s = support_mask(L.presentation.check(f))
    return [p for p in L.primes if not p.mask & s]


def universal_semilattice(M: MonoidPresentation) -> MonoidPresentation:
    idem = [(M.gen(i, 2), M.gen(i)) for i in range(M.rank)]
    return M.with_relations(idem)


def semilattice_elements(M: MonoidPresentation) -> list[Vec]:
    """Class representatives of M^sl, as 0/1 exponent vectors."""
    table = universal_semilattice(M).finite_table
    if table is None:
        raise LatticeError("semilattice too large to tabulate")
    return table.elements()


def alpha(M: MonoidPresentation, f: Sequence[int], L: SpecLattice | None = None) -> PrimeIdeal:
    """The largest prime not containing f (its localization agrees with M_f)."""
    L = L or spec(M)
    s = support_mask(M.check(f))
    mask = 0
    for q in L.primes:
        if not q.mask & s:
            mask |= q.mask
    return L.prime(mask)


def hasse_edges(L: SpecLattice) -> list[tuple[int, int]]:
    edges = []
    for p in L.primes:
        for q in L.primes:
            if p < q and not any(p < r < q for r in L.primes):
                edges.append((p.mask, q.mask))
    return sorted(edges)


def hasse_dot(L: SpecLattice) -> str:
    lines = ["digraph spec {", "  rankdir=BT;"]
    for p in L.primes:
        lines.append(f'  p{p.mask} [label="{p.label}"];')
    for a, b in hasse_edges(L):
        lines.append(f"  p{a} -> p{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def random_prime_law_check(L: SpecLattice, samples: Iterable[tuple[Vec, Vec]]) -> bool:
    """ab in p implies a in p or b in p, on the given sample pairs, for all primes."""
    for a, b in samples:
        ab = tuple(x + y for x, y in zip(a, b))
        for p in L.primes:
            if ab in p and not (a in p or b in p):
                return False
            if (a in p or b in p) and ab not in p:
                return False
    return True
