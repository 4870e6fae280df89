"""M-sets: finite action tables, localization carriers, tensor products and points.

Infinite carriers are handled through finite windows. A :class:`Window` is a
finite partial M-set: every generator move is a partial map on the window's
elements. Windows also mark a set of *inner* elements, far enough from the
boundary that surjectivity questions about them are meaningful.
Window-based answers are accepted once two consecutive window sizes agree.
"""

from __future__ import annotations

import itertools
from abc import ABC, abstractmethod
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Sequence

import networkx as nx

from .core import (
    DEFAULT_BUDGET,
    BudgetExhausted,
    LocalizedMonoid,
    MonoidPresentation,
    Vec,
    Verdict,
    _glex,
)
from .spectrum import LatticeError, PrimeIdeal, SpecLattice, prime_meet, spec

Key = Hashable

MIN_WINDOW = 2
MAX_WINDOW = 8


class ClassificationError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


class WindowInstability(RuntimeError):
    pass


def as_acting(M: MonoidPresentation | LocalizedMonoid) -> LocalizedMonoid:
    return M if isinstance(M, LocalizedMonoid) else LocalizedMonoid(M)


# ---------------------------------------------------------------- windows


@dataclass
class Window:
    """Finite partial M-set: moves[j] is the partial map of acting generator j."""

    acting: LocalizedMonoid
    elements: list
    inner: set
    moves: list[dict]
    conflicts: int = 0

    @property
    def generator_vectors(self) -> list[Vec]:
        return self.acting.action_generators()

    def move_index(self, i: int, inverse: bool = False) -> int:
        if not inverse:
            return i
        return self.acting.rank + sorted(self.acting.inverted).index(i)

    def act(self, m: Sequence[int], a: Key) -> Key | None:
        for i, e in enumerate(m):
            if e > 0:
                mv = self.moves[i]
                for _ in range(e):
                    a = mv.get(a)
                    if a is None:
                        return None
        for i, e in enumerate(m):
            if e < 0:
                mv = self.moves[self.move_index(i, inverse=True)]
                for _ in range(-e):
                    a = mv.get(a)
                    if a is None:
                        return None
        return a

    def positive_graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(len(self.elements)))
        pos = {k: n for n, k in enumerate(self.elements)}
        for i in range(self.acting.rank):
            for a, b in self.moves[i].items():
                if a != b:
                    g.add_edge(pos[a], pos[b])
        return g


def _bijective_on_window(W: Window, j: int) -> bool:
    mv = W.moves[j]
    images = list(mv.values())
    if len(set(images)) != len(images):
        return False
    return W.inner <= set(images)


def _invert_moves(mv: dict) -> dict:
    inv: dict = {}
    clash = set()
    for a, b in mv.items():
        if b in inv:
            clash.add(b)
        inv[b] = a
    for b in clash:
        del inv[b]
    return inv


# ---------------------------------------------------------------- carriers


class MSet(ABC):
    acting: LocalizedMonoid

    @property
    def monoid(self) -> MonoidPresentation:
        return self.acting.base

    @abstractmethod
    def window(self, w: int) -> Window: ...

    @property
    def is_finite(self) -> bool:
        return False

    def describe(self) -> str:
        return type(self).__name__


class FiniteMSet(MSet):
    """Finite carrier with an explicit action table per generator."""

    def __init__(self, acting: MonoidPresentation | LocalizedMonoid, labels: Sequence[Any],
                 table: Sequence[Sequence[int]]):
        self.acting = as_acting(acting)
        self.labels = tuple(labels)
        n = len(self.labels)
        k = self.acting.rank
        if len(table) != k:
            raise ValueError(f"need one action map per generator ({k})")
        self.table = tuple(tuple(int(x) for x in row) for row in table)
        for row in self.table:
            if len(row) != n or any(not 0 <= x < n for x in row):
                raise ValueError("action map must send the carrier to itself")
        self.inverse_table = []
        for s in sorted(self.acting.inverted):
            row = self.table[s]
            if len(set(row)) != n:
                raise ValueError(f"generator {self.monoid.generators[s]} is inverted but does not act bijectively")
            inv = [0] * n
            for a, b in enumerate(row):
                inv[b] = a
            self.inverse_table.append(tuple(inv))
        self._validate()

    @classmethod
    def from_maps(cls, acting, labels: Sequence[Any], maps: dict[str, Sequence[Any] | dict]) -> "FiniteMSet":
        acting = as_acting(acting)
        labels = list(labels)
        pos = {lab: n for n, lab in enumerate(labels)}
        table = []
        for g in acting.base.generators:
            if g not in maps:
                raise ValueError(f"missing action for generator {g!r}")
            m = maps[g]
            if isinstance(m, dict):
                row = [pos[m[lab]] for lab in labels]
            else:
                row = [pos[x] if x in pos else int(x) for x in m]
            table.append(row)
        return cls(acting, labels, table)

    def _validate(self):
        k = self.acting.rank
        for i, j in itertools.combinations(range(k), 2):
            for a in range(len(self.labels)):
                if self.table[i][self.table[j][a]] != self.table[j][self.table[i][a]]:
                    raise ValueError("generator actions do not commute")
        for u, v in self.monoid.relations:
            for a in range(len(self.labels)):
                if self.act(u, a) != self.act(v, a):
                    raise ValueError(f"relation {self.monoid.word(u)}={self.monoid.word(v)} fails on {self.labels[a]!r}")

    @property
    def is_finite(self) -> bool:
        return True

    def __len__(self):
        return len(self.labels)

    def act(self, m: Sequence[int], a: int) -> int:
        inv = sorted(self.acting.inverted)
        for i, e in enumerate(m):
            for _ in range(max(e, 0)):
                a = self.table[i][a]
            if e < 0:
                row = self.inverse_table[inv.index(i)]
                for _ in range(-e):
                    a = row[a]
        return a

    def window(self, w: int) -> Window:
        n = len(self.labels)
        moves = [{a: row[a] for a in range(n)} for row in self.table]
        moves += [{a: row[a] for a in range(n)} for row in self.inverse_table]
        return Window(self.acting, list(range(n)), set(range(n)), moves)

    def over(self, acting: LocalizedMonoid) -> "FiniteMSet":
        return FiniteMSet(acting, self.labels, self.table)

    def describe(self) -> str:
        return f"finite carrier with {len(self.labels)} elements"


class LocalizationMSet(MSet):
    """The monoid ``carrier`` (a localization of M) viewed as an M-set."""

    def __init__(self, carrier: LocalizedMonoid, acting: MonoidPresentation | LocalizedMonoid | None = None):
        self.carrier = carrier
        self.acting = as_acting(acting) if acting is not None else LocalizedMonoid(carrier.base, budget=carrier.budget)
        if self.acting.base != carrier.base:
            raise ValueError("carrier and acting monoid have different bases")
        for s in self.acting.inverted:
            if not carrier.is_unit_generator(s):
                raise ValueError(f"{carrier.base.generators[s]} is not invertible on the carrier")
        self._windows: dict[int, Window] = {}

    def act(self, m: Sequence[int], a: Vec) -> Vec:
        return self.carrier.canonical(tuple(x + y for x, y in zip(m, a)))

    def window(self, w: int) -> Window:
        if w in self._windows:
            return self._windows[w]
        c = self.carrier
        elems = c.window(w)
        present = set(elems)
        inner = {c.canonical(v) for v in c.box(max(w - 1, 0))} & present
        moves = []
        for g in self.acting.action_generators():
            # an inverse move by a non-formally-inverted unit uses its inverse vector
            mv = {}
            for a in elems:
                b = self._move(g, a)
                if b in present:
                    mv[a] = b
            moves.append(mv)
        W = Window(self.acting, elems, inner, moves)
        self._windows[w] = W
        return W

    def _move(self, g: Vec, a: Vec) -> Vec | None:
        c = self.carrier
        target = tuple(x + y for x, y in zip(a, g))
        if c.contains(target):
            return c.canonical(target)
        i = next(j for j, x in enumerate(g) if x < 0)
        inv = c._inverse_vector(i)
        return c.canonical(tuple(x + y for x, y in zip(a, inv)))

    def over(self, acting: LocalizedMonoid) -> "LocalizationMSet":
        return LocalizationMSet(self.carrier, acting)

    @property
    def symbolic_prime_mask(self) -> int:
        """Generators whose action is not bijective: exactly the non-units of the carrier."""
        k = self.carrier.rank
        return ((1 << k) - 1) & ~self.carrier.unit_mask

    def describe(self) -> str:
        inv = [self.monoid.generators[i] for i in sorted(self.carrier.inverted)]
        return f"localization at {{{','.join(inv)}}}" if inv else "free cyclic (M on itself)"


def regular_mset(M: MonoidPresentation, budget: int = DEFAULT_BUDGET) -> LocalizationMSet:
    return LocalizationMSet(LocalizedMonoid(M, budget=budget))


def localization_at(p: PrimeIdeal, budget: int = DEFAULT_BUDGET) -> LocalizationMSet:
    """M_p as an M-set: invert every generator outside the prime."""
    return LocalizationMSet(LocalizedMonoid(p.presentation, p.complement, budget))


class _ExtendedMSet(MSet):
    """A windowed M-set viewed over a localization, inverse moves read off the windows."""

    def __init__(self, inner: MSet, acting: LocalizedMonoid):
        self.inner_mset = inner
        self.acting = acting

    def window(self, w: int) -> Window:
        W = self.inner_mset.window(w)
        moves = list(W.moves[: self.acting.rank])
        for s in sorted(self.acting.inverted):
            moves.append(_invert_moves(W.moves[s]))
        return Window(self.acting, W.elements, W.inner, moves, W.conflicts)


def view_over(A: MSet, acting: LocalizedMonoid) -> MSet:
    if hasattr(A, "over"):
        return A.over(acting)
    return _ExtendedMSet(A, acting)


class TensorMSet(MSet):
    """A ⊗_M B on windows: union-find over pairs under (ma, b) ~ (a, mb)."""

    def __init__(self, A: MSet, B: MSet):
        if A.acting != B.acting:
            raise ValueError("tensor factors must be sets over the same monoid")
        self.A, self.B = A, B
        self.acting = A.acting
        self._windows: dict[int, Window] = {}
        self._pairs: dict[int, dict] = {}

    def window(self, w: int) -> Window:
        if w in self._windows:
            return self._windows[w]
        WA, WB = self.A.window(w), self.B.window(w)
        na, nb = len(WA.elements), len(WB.elements)
        ia = {k: n for n, k in enumerate(WA.elements)}
        ib = {k: n for n, k in enumerate(WB.elements)}
        parent = list(range(na * nb))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(x, y):
            x, y = find(x), find(y)
            if x != y:
                if y < x:
                    x, y = y, x
                parent[y] = x

        nmoves = len(WA.moves)
        amoves = [[(ia[a], ia[b]) for a, b in WA.moves[j].items()] for j in range(nmoves)]
        bmoves = [[(ib[a], ib[b]) for a, b in WB.moves[j].items()] for j in range(nmoves)]
        for j in range(self.acting.rank):
            for a, a2 in amoves[j]:
                base_a2 = a2 * nb
                base_a = a * nb
                for b, b2 in bmoves[j]:
                    union(base_a2 + b, base_a + b2)
        roots = [find(x) for x in range(na * nb)]
        # each class is keyed by its smallest pair (the union-find root)
        keys = sorted(set(roots))
        key_of = lambda x: (WA.elements[x // nb], WB.elements[x % nb])
        elements = [key_of(r) for r in keys]
        inner_a = {ia[a] for a in WA.inner}
        inner_b = {ib[b] for b in WB.inner}
        inner = {key_of(roots[a * nb + b]) for a in inner_a for b in inner_b}
        moves = []
        conflicts = 0
        for j in range(nmoves):
            mv: dict = {}
            adict = dict(amoves[j])
            bdict = dict(bmoves[j])
            for x in range(na * nb):
                a, b = divmod(x, nb)
                if a in adict:
                    t = roots[adict[a] * nb + b]
                elif b in bdict:
                    t = roots[a * nb + bdict[b]]
                else:
                    continue
                src = key_of(roots[x])
                tgt = key_of(t)
                old = mv.get(src)
                if old is None:
                    mv[src] = tgt
                elif old != tgt:
                    conflicts += 1
            moves.append(mv)
        W = Window(self.acting, elements, inner, moves, conflicts)
        self._windows[w] = W
        self._pairs[w] = {"roots": roots, "na": na, "nb": nb, "A": WA, "B": WB}
        return W

    def class_of(self, w: int, a: Key, b: Key) -> Key:
        self.window(w)
        info = self._pairs[w]
        WA, WB, nb = info["A"], info["B"], info["nb"]
        x = WA.elements.index(a) * nb + WB.elements.index(b)
        r = info["roots"][x]
        return (WA.elements[r // nb], WB.elements[r % nb])

    def classes(self, w: int) -> dict[Key, list[tuple[Key, Key]]]:
        self.window(w)
        info = self._pairs[w]
        WA, WB, nb = info["A"], info["B"], info["nb"]
        out: dict = {}
        for x, r in enumerate(info["roots"]):
            out.setdefault((WA.elements[r // nb], WB.elements[r % nb]), []).append(
                (WA.elements[x // nb], WB.elements[x % nb]))
        return out

    def describe(self) -> str:
        return f"({self.A.describe()}) ⊗ ({self.B.describe()})"


def tensor(A: MSet, B: MSet) -> TensorMSet:
    return TensorMSet(A, B)


class ProductMSet(MSet):
    """Cartesian product with the diagonal action."""

    def __init__(self, A: MSet, B: MSet):
        if A.acting != B.acting:
            raise ValueError("factors must be sets over the same monoid")
        self.A, self.B = A, B
        self.acting = A.acting

    def window(self, w: int) -> Window:
        WA, WB = self.A.window(w), self.B.window(w)
        elements = [(a, b) for a in WA.elements for b in WB.elements]
        inner = {(a, b) for a in WA.inner for b in WB.inner}
        moves = []
        for ma, mb in zip(WA.moves, WB.moves):
            moves.append({(a, b): (ma[a], mb[b]) for a in ma for b in mb})
        return Window(self.acting, elements, inner, moves)

    def describe(self) -> str:
        return f"({self.A.describe()}) × ({self.B.describe()})"


def product(A: MSet, B: MSet) -> ProductMSet:
    return ProductMSet(A, B)


def localize_mset(A: MSet, S: Iterable[int | str]) -> MSet:
    """S^-1 A. Localization carriers localize further; finite carriers keep the
    eventual image of the product of S, on which S acts invertibly."""
    M = A.monoid
    S = frozenset(M.index(s) if isinstance(s, str) else int(s) for s in S)
    if not S:
        return A
    if isinstance(A, LocalizationMSet):
        return LocalizationMSet(A.carrier.localize(S), A.acting)
    if isinstance(A, FiniteMSet):
        # a/s = b/t iff tua = sub for some u; on a finite set the classes are
        # represented by the eventual image of sigma = prod S
        sigma = [1 if i in S else 0 for i in range(M.rank)]
        image = set(range(len(A)))
        while True:
            nxt = {A.act(sigma, a) for a in image}
            if nxt == image:
                break
            image = nxt
        elems = sorted(image)
        pos = {a: n for n, a in enumerate(elems)}
        table = [[pos[A.table[i][a]] for a in elems] for i in range(M.rank)]
        acting = LocalizedMonoid(M, A.acting.inverted | S, A.acting.budget)
        return FiniteMSet(acting, [A.labels[a] for a in elems], table)
    raise TypeError("localization is implemented for localization and finite carriers")


def canonical_map_to_localization(A: FiniteMSet, S: Iterable[int]) -> dict[int, int]:
    """a ↦ a/1 for a finite carrier, as a map into the localized carrier's indices."""
    M = A.monoid
    S = frozenset(S)
    loc = localize_mset(A, S)
    sigma = [1 if i in S else 0 for i in range(M.rank)]
    n = len(A)
    out = {}
    for a in range(n):
        # a/1 = sigma^N a / sigma^N, and sigma acts invertibly on the eventual image
        x = a
        for _ in range(n):
            x = A.act(sigma, x)
        y = loc.labels.index(A.labels[x])
        for _ in range(n):
            y = loc.act(tuple(-s for s in sigma), y)
        out[a] = y
    return out


# ---------------------------------------------------------------- monoid elements


def acting_elements(acting: LocalizedMonoid, degree: int) -> list[Vec]:
    """Elements of the acting monoid for bounded searches (all of it when finite)."""
    M = acting.base
    if M.finite_table is not None:
        return acting.window(max(max(a + p for a, p in zip(M.finite_table.index, M.finite_table.period)), 1)) \
            if acting.inverted else M.finite_table.elements()
    vecs = [v for v in acting.box(degree) if sum(abs(x) for x in v) <= degree]
    return sorted({acting.canonical(v) for v in vecs}, key=_glex)


# ---------------------------------------------------------------- filteredness


@dataclass
class FilterVerdict:
    status: bool | None
    reason: str = ""
    witness: Any = None
    exhaustive: bool = False

    def __bool__(self):
        return bool(self.status)


def is_filtered(A: MSet, budget: int = DEFAULT_BUDGET, window: int = 3) -> FilterVerdict:
    if isinstance(A, FiniteMSet):
        return _filtered_finite(A, budget)
    if isinstance(A, LocalizationMSet):
        spot = _filtered_window(A, window, budget)
        if spot.status is False:
            return spot
        return FilterVerdict(True, "localization of M is filtered; window spot-checks passed")
    return _filtered_window(A, window, budget)


def _filtered_finite(A: FiniteMSet, budget: int) -> FilterVerdict:
    n = len(A)
    if n == 0:
        return FilterVerdict(False, "F1: empty carrier", exhaustive=True)
    acting = A.acting
    finite = acting.base.finite_table is not None
    degree = 1
    if not finite:
        # bounded search: elements of degree <= d, with d chosen so the box stays within budget
        while len(acting.box(degree + 1)) * n <= budget and degree < 6:
            degree += 1
    elems = acting_elements(acting, degree)
    act = {(tuple(m), a): A.act(m, a) for m in elems for a in range(n)}
    # F3: every two elements lie in the orbit of a common element
    orbit = {a: {act[(tuple(m), a)] for m in elems} for a in range(n)}
    for a1, a2 in itertools.combinations_with_replacement(range(n), 2):
        if not any(a1 in orbit[a] and a2 in orbit[a] for a in range(n)):
            return FilterVerdict(False, "F3 fails", (A.labels[a1], A.labels[a2]), exhaustive=finite)
    # F2: m1 a = m2 a forces a common m below a with m1 m = m2 m
    divisors = {a: [m for m in elems if any(act[(tuple(m), b)] == a for b in range(n))] for a in range(n)}
    for a in range(n):
        for m1, m2 in itertools.combinations(elems, 2):
            if act[(tuple(m1), a)] != act[(tuple(m2), a)]:
                continue
            ok = False
            for m in divisors[a]:
                v = acting.equal(tuple(x + y for x, y in zip(m1, m)), tuple(x + y for x, y in zip(m2, m)), budget)
                if v.verdict is Verdict.UNKNOWN:
                    return FilterVerdict(None, "F2 witness undecided")
                if v.is_equal:
                    ok = True
                    break
            if not ok:
                return FilterVerdict(False, "F2 fails", (A.labels[a], m1, m2), exhaustive=finite)
    return FilterVerdict(True, "F1-F3 hold", exhaustive=finite)


def _filtered_window(A: MSet, w: int, budget: int) -> FilterVerdict:
    """Sampled F1-F3 on a window, witnesses searched in the next window."""
    W, big = A.window(w), A.window(w + 1)
    if not W.elements:
        return FilterVerdict(False, "F1: empty carrier")
    acting = A.acting
    base = LocalizedMonoid(acting.base, budget=budget)
    small = acting_elements(base, 2)
    inner = sorted(W.inner, key=repr)
    # orbits under M (positive moves only) inside the larger window
    orbit = {}
    for a in big.elements:
        seen = {a}
        queue = deque([a])
        while queue:
            x = queue.popleft()
            for i in range(acting.rank):
                y = big.moves[i].get(x)
                if y is not None and y not in seen:
                    seen.add(y)
                    queue.append(y)
        orbit[a] = seen
    inner_big = _locate(A, W, big, inner)
    sample = inner_big[: 12]
    for a1, a2 in itertools.combinations_with_replacement(sample, 2):
        if not any(a1 in orbit[a] and a2 in orbit[a] for a in big.elements):
            return FilterVerdict(False, "F3 fails on window", (a1, a2))
    for a in sample:
        for m1, m2 in itertools.combinations(small, 2):
            x1, x2 = big.act(m1, a), big.act(m2, a)
            if x1 is None or x1 != x2:
                continue
            ok = False
            for m in acting_elements(base, 3):
                if not any(big.act(m, b) == a for b in big.elements):
                    continue
                v = base.equal(tuple(p + q for p, q in zip(m1, m)), tuple(p + q for p, q in zip(m2, m)), budget)
                if v.is_equal:
                    ok = True
                    break
            if not ok:
                return FilterVerdict(False, "F2 fails on window", (a, m1, m2))
    return FilterVerdict(True, f"sampled F1-F3 hold on window {w}")


def _locate(A: MSet, W: Window, big: Window, keys: list) -> list:
    """Keys of window W as keys of the larger window (identical for all but tensor carriers)."""
    present = set(big.elements)
    if all(k in present for k in keys):
        return keys
    if isinstance(A, TensorMSet):
        w_big = next(w for w, win in A._windows.items() if win is big)
        return [A.class_of(w_big, a, b) for a, b in keys]
    return [k for k in keys if k in present]


# ---------------------------------------------------------------- point pipeline


def _stabilized(fn: Callable[[int], Any], start: int = MIN_WINDOW, stop: int = MAX_WINDOW):
    prev = None
    for w in range(start, stop + 1):
        try:
            cur = fn(w)
        except ClassificationError:
            cur = None
        if prev is not None and cur is not None and cur == prev:
            return cur, w
        prev = cur
    raise WindowInstability(f"no two consecutive windows agree up to {stop}")


def _window_prime_mask(A: MSet, w: int) -> int:
    W = A.window(w)
    mask = 0
    for i in range(A.acting.rank):
        if not _bijective_on_window(W, i):
            mask |= 1 << i
    return mask


def prime_of_mset(A: MSet, budget: int = DEFAULT_BUDGET, max_window: int = MAX_WINDOW) -> PrimeIdeal:
    M = A.monoid
    if isinstance(A, FiniteMSet):
        mask = 0
        for i, row in enumerate(A.table):
            if len(set(row)) != len(row):
                mask |= 1 << i
    elif isinstance(A, LocalizationMSet):
        mask = A.symbolic_prime_mask
        if _window_prime_mask(A, MIN_WINDOW) != mask:
            raise ClassificationError("prime", "window check disagrees with the unit rule")
    else:
        mask, _ = _stabilized(lambda w: _window_prime_mask(A, w), stop=max_window)
    try:
        return PrimeIdeal(M, mask)
    except LatticeError as exc:
        raise ClassificationError("prime", str(exc)) from None


def is_conservative(A: MSet, budget: int = DEFAULT_BUDGET) -> bool:
    """Every generator acting bijectively is already a unit of the acting monoid."""
    p = prime_of_mset(A, budget)
    bij = ((1 << A.acting.rank) - 1) & ~p.mask
    return bij & ~A.acting.unit_mask == 0


@dataclass(frozen=True)
class Source:
    element: Any
    window: int


def _labelled_orbit(W: Window, a: Key) -> tuple[dict, bool]:
    """Orbit of a with the acting element that reaches each point; flags clashes."""
    acting = W.acting
    gens = W.generator_vectors
    labels = {a: acting.canonical(acting.base.identity)}
    queue = deque([a])
    clash = False
    while queue:
        x = queue.popleft()
        lx = labels[x]
        for j, g in enumerate(gens):
            y = W.moves[j].get(x)
            if y is None:
                continue
            ly = acting.canonical(tuple(p + q for p, q in zip(lx, g)))
            if y not in labels:
                labels[y] = ly
                queue.append(y)
            elif labels[y] != ly:
                v = acting.equal(labels[y], ly)
                if v.is_unknown:
                    raise BudgetExhausted("label comparison undecided", v.budget)
                if v.is_distinct:
                    clash = True
    return labels, clash


def _source_in_window(W: Window) -> Any:
    acting = W.acting
    almost = [i for i in range(acting.rank) if not acting.is_unit_generator(i)]
    order = [k for k in W.elements if k in W.inner] + [k for k in W.elements if k not in W.inner]
    targets = []
    for i in almost:
        image = set(W.moves[i].values())
        a_i = next((k for k in order if k in W.inner and k not in image), None)
        if a_i is None:
            raise ClassificationError("source", f"{acting.base.generators[i]} acts surjectively; not conservative")
        targets.append(a_i)
    for a in order:
        if a not in W.inner:
            continue
        labels, clash = _labelled_orbit(W, a)
        if not all(t in labels for t in targets):
            continue
        if clash:
            continue
        if W.inner <= set(labels):
            return a
    raise ClassificationError("source", "no element with a bijective orbit map in the window")


def find_source(A: MSet, budget: int = DEFAULT_BUDGET, max_window: int = MAX_WINDOW) -> Source:
    if isinstance(A, FiniteMSet):
        return Source(_source_in_window(A.window(0)), 0)
    elem, w = _stabilized(lambda w: _source_in_window(A.window(w)), stop=max_window)
    return Source(elem, w)


@dataclass(frozen=True)
class Classification:
    prime: PrimeIdeal
    source: Any
    window: int


def classify_point(A: MSet, budget: int = DEFAULT_BUDGET, max_window: int = MAX_WINDOW) -> Classification:
    """Prime p with A ≅ M_p, following p_A -> conservativity over M_p -> source."""
    M = A.monoid
    if A.acting.inverted:
        raise ClassificationError("input", "expects an M-set over the base monoid")

    def attempt(w: int | None):
        if w is None or isinstance(A, (FiniteMSet, LocalizationMSet)):
            p = prime_of_mset(A, budget)
        else:
            p = PrimeIdeal(M, _window_prime_mask(A, w))
        loc = LocalizedMonoid(M, p.complement, budget)
        try:
            B = view_over(A, loc)
        except ValueError as exc:
            raise ClassificationError("localize", str(exc)) from None
        if isinstance(B, FiniteMSet):
            W = B.window(0)
        else:
            W = B.window(w)
        # conservativity over M_p: generators acting bijectively are units of M_p
        for i in range(M.rank):
            if _bijective_on_window(W, i) and not loc.is_unit_generator(i):
                raise ClassificationError("conservative", f"{M.generators[i]} acts bijectively")
        return p, _source_in_window(W)

    if isinstance(A, FiniteMSet):
        p, src = attempt(None)
        return Classification(p, A.labels[src], 0)
    (p, src), w = _stabilized(lambda w: attempt(w), stop=max_window)
    return Classification(p, src, w)


# ---------------------------------------------------------------- points


@dataclass
class TopoPoint:
    carrier: MSet
    prime: PrimeIdeal
    label: str

    @property
    def monoid(self) -> MonoidPresentation:
        return self.prime.presentation


@dataclass
class PointsReport:
    lattice: SpecLattice
    points: list[TopoPoint]
    tensor_table: dict[tuple[int, int], int] = field(default_factory=dict)

    def verified(self) -> bool:
        return all(self.tensor_table[(p, q)] == prime_meet(self.lattice.prime(p), self.lattice.prime(q), self.lattice).mask
                   for p, q in self.tensor_table)


def points(M: MonoidPresentation, budget: int = DEFAULT_BUDGET, cap: int = 20, tensors: bool = True,
           max_window: int = MAX_WINDOW) -> PointsReport:
    if not isinstance(M, MonoidPresentation):
        raise TypeError("points() needs a finitely presented monoid; use free_points for infinite bases")
    L = spec(M, cap)
    pts = [TopoPoint(localization_at(p, budget), p, f"M_{p.label}") for p in L.primes]
    report = PointsReport(L, pts)
    if tensors:
        for P, Q in itertools.combinations_with_replacement(pts, 2):
            c = classify_point(tensor(P.carrier, Q.carrier), budget, max_window)
            report.tensor_table[(P.prime.mask, Q.prime.mask)] = c.prime.mask
            report.tensor_table[(Q.prime.mask, P.prime.mask)] = c.prime.mask
    return report


def delta_leq(P: TopoPoint, Q: TopoPoint) -> bool:
    """Q ∈ Δ(P), i.e. the prime of Q is contained in the prime of P."""
    return Q.prime <= P.prime


def endomorphism_monoid(P: TopoPoint, budget: int = DEFAULT_BUDGET) -> MonoidPresentation:
    if isinstance(P.carrier, FiniteMSet):
        endos = finite_endomorphisms(P.carrier)
        if not endomorphisms_commute(endos):
            raise ClassificationError("endomorphisms", "endomorphism monoid is not commutative")
    return LocalizedMonoid(P.monoid, P.prime.complement, budget).presentation


def finite_endomorphisms(A: FiniteMSet) -> list[tuple[int, ...]]:
    n = len(A)
    out = []
    for f in itertools.product(range(n), repeat=n):
        if all(f[row[a]] == row[f[a]] for row in A.table for a in range(n)):
            out.append(f)
    return out


def endomorphisms_commute(endos: list[tuple[int, ...]]) -> bool:
    for f, g in itertools.combinations(endos, 2):
        if any(f[g[a]] != g[f[a]] for a in range(len(f))):
            return False
    return True


# ---------------------------------------------------------------- finite generation


@dataclass
class GenerationReport:
    counts: dict[int, int]
    finitely_generated: bool | None


def minimal_generator_count(W: Window) -> int:
    """Number of source components of the reachability graph (one generator each)."""
    g = W.positive_graph()
    cond = nx.condensation(g)
    return sum(1 for n in cond.nodes if cond.in_degree(n) == 0)


def finite_generation_report(A: MSet, windows: Iterable[int] = range(3, 9)) -> GenerationReport:
    counts = {w: minimal_generator_count(A.window(w)) for w in windows}
    vals = [counts[w] for w in sorted(counts)]
    if len(vals) >= 2 and vals[-1] == vals[-2]:
        fg = True
    elif all(b > a for a, b in zip(vals, vals[1:])):
        fg = False
    else:
        fg = None
    return GenerationReport(counts, fg)


# ---------------------------------------------------------------- enumeration


def enumerate_finite_msets(M: MonoidPresentation, size: int) -> Iterable[FiniteMSet]:
    """Every action of M on {0..size-1} (labelled, not up to isomorphism)."""
    k = M.rank
    maps = list(itertools.product(range(size), repeat=size))
    for rows in itertools.product(maps, repeat=k):
        try:
            yield FiniteMSet(M, list(range(size)), rows)
        except ValueError:
            continue


def is_free_rank_one(A: FiniteMSet) -> bool:
    """Isomorphic to M acting on itself (M finite): some a with m ↦ m·a bijective."""
    table = A.monoid.finite_table
    if table is None:
        raise ValueError("needs a finite acting monoid")
    elems = table.elements()
    if len(elems) != len(A):
        return False
    for a in range(len(A)):
        if len({A.act(m, a) for m in elems}) == len(A):
            return True
    return False
