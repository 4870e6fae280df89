"""Points of free commutative monoids on a finite or countable basis.

A point is described by a function f from the basis to Z ∪ {-inf}, nonpositive
away from finitely many indices. Two functions are equivalent when they have
the same -inf locus and differ at finitely many indices. We represent functions
by finitely many exceptions plus a tail rule (constant or affine in the index),
a language closed under addition with decidable equivalence.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

NEG_INF = -math.inf
COUNTABLE = "countable"

Value = int | float  # integers or NEG_INF


class BasisMismatch(ValueError):
    pass


class SigmaError(ValueError):
    pass


def _add(a: Value, b: Value) -> Value:
    if a == NEG_INF or b == NEG_INF:
        return NEG_INF
    return int(a) + int(b)


@dataclass(frozen=True)
class Const:
    c: Value = 0

    def __post_init__(self):
        if self.c != NEG_INF and (not float(self.c).is_integer() or self.c > 0):
            raise SigmaError("constant tail must be a nonpositive integer or -inf")
        if self.c != NEG_INF:
            object.__setattr__(self, "c", int(self.c))

    def at(self, n: int) -> Value:
        return self.c


@dataclass(frozen=True)
class Affine:
    a: int
    b: int

    def __post_init__(self):
        if self.a >= 0:
            raise SigmaError("affine tail needs a negative slope")

    def at(self, n: int) -> Value:
        return self.a * n + self.b

    @property
    def positive_indices(self) -> range:
        # a*n + b > 0  iff  n < b / -a
        return range(0, max(0, -(-self.b // -self.a)))


Tail = Const | Affine


def add_tails(s: Tail, t: Tail) -> Tail:
    if isinstance(s, Const) and s.c == NEG_INF or isinstance(t, Const) and t.c == NEG_INF:
        return Const(NEG_INF)
    if isinstance(s, Const) and isinstance(t, Const):
        return Const(s.c + t.c)
    if isinstance(s, Const):
        s, t = t, s
    if isinstance(t, Const):
        return Affine(s.a, s.b + t.c)
    return Affine(s.a + t.a, s.b + t.b)


@dataclass(frozen=True)
class SigmaFunction:
    basis: str | tuple[str, ...]
    exceptions: Mapping[int, Value] = field(default_factory=dict)
    tail: Tail = Const(0)

    def __post_init__(self):
        basis = self.basis if self.basis == COUNTABLE else tuple(self.basis)
        object.__setattr__(self, "basis", basis)
        exc = {}
        for k, v in dict(self.exceptions).items():
            k = int(k)
            if k < 0 or (self.finite and k >= len(basis)):
                raise SigmaError(f"index {k} outside the basis")
            if v != NEG_INF:
                if not float(v).is_integer():
                    raise SigmaError("values must be integers or -inf")
                v = int(v)
            exc[k] = v
        if self.finite:
            if not isinstance(self.tail, Const) or self.tail.c != 0:
                object.__setattr__(self, "tail", Const(0))
            exc = {i: exc.get(i, 0) for i in range(len(basis))}
        object.__setattr__(self, "exceptions", tuple(sorted(exc.items())))

    @property
    def finite(self) -> bool:
        return self.basis != COUNTABLE

    @property
    def exc(self) -> dict[int, Value]:
        return dict(self.exceptions)

    def __call__(self, n: int) -> Value:
        e = self.exc
        return e[n] if n in e else self.tail.at(n)

    def values(self) -> list[Value]:
        if not self.finite:
            raise SigmaError("infinite basis")
        return [self(i) for i in range(len(self.basis))]

    def neg_inf_locus(self) -> tuple[str, frozenset[int]]:
        """('finite', S) or ('cofinite', complement)."""
        e = self.exc
        if isinstance(self.tail, Const) and self.tail.c == NEG_INF and not self.finite:
            return "cofinite", frozenset(k for k, v in e.items() if v != NEG_INF)
        return "finite", frozenset(k for k, v in e.items() if v == NEG_INF)

    def canonical(self) -> "SigmaFunction":
        """Drop exceptions that agree with the tail."""
        if self.finite:
            return self
        e = {k: v for k, v in self.exc.items() if v != self.tail.at(k)}
        return SigmaFunction(self.basis, e, self.tail)


def zero_function(basis) -> SigmaFunction:
    return SigmaFunction(basis, {}, Const(0))


def _same_basis(f: SigmaFunction, g: SigmaFunction):
    if f.basis != g.basis:
        raise BasisMismatch("functions over different bases")


def class_key(f: SigmaFunction) -> tuple:
    """Complete invariant of the equivalence class."""
    if f.finite:
        return ("finite", f.basis, f.neg_inf_locus()[1])
    return ("countable", f.neg_inf_locus(), f.tail)


def equivalent(f: SigmaFunction, g: SigmaFunction) -> bool:
    _same_basis(f, g)
    return class_key(f) == class_key(g)


@dataclass(frozen=True)
class SigmaClass:
    representative: SigmaFunction

    @classmethod
    def of(cls, f: SigmaFunction) -> "SigmaClass":
        kind, locus = f.neg_inf_locus()
        if f.finite:
            rep = SigmaFunction(f.basis, {i: (NEG_INF if i in locus else 0) for i in range(len(f.basis))})
        elif kind == "cofinite":
            rep = SigmaFunction(f.basis, {i: 0 for i in locus}, Const(NEG_INF))
        else:
            rep = SigmaFunction(f.basis, {i: NEG_INF for i in locus}, f.tail).canonical()
        return cls(rep)

    def __add__(self, other: "SigmaClass") -> "SigmaClass":
        return SigmaClass.of(add(self.representative, other.representative))


def add(f: SigmaFunction, g: SigmaFunction) -> SigmaFunction:
    _same_basis(f, g)
    keys = set(f.exc) | set(g.exc)
    exc = {k: _add(f(k), g(k)) for k in keys}
    tail = Const(0) if f.finite else add_tails(f.tail, g.tail)
    return SigmaFunction(f.basis, exc, tail).canonical()


def member(x: Mapping[int, int] | Sequence[int], f: SigmaFunction) -> bool:
    """x lies in A(f): every valuation of x is at least f."""
    if not isinstance(x, Mapping):
        if f.finite and len(x) != len(f.basis):
            raise BasisMismatch("vector length differs from the basis size")
        x = {i: v for i, v in enumerate(x) if v}
    if f.finite and any(k >= len(f.basis) for k in x):
        raise BasisMismatch("index outside the basis")
    idx = set(x) | set(f.exc)
    if isinstance(f.tail, Affine):
        idx |= set(f.tail.positive_indices)
    if f.finite:
        idx = set(range(len(f.basis)))
    return all(x.get(k, 0) >= f(k) for k in idx)


@dataclass(frozen=True)
class Finite:
    elements: frozenset[int]


@dataclass(frozen=True)
class Cofinite:
    missing: frozenset[int]


def gamma_of_subset(T: Finite | Cofinite, basis=COUNTABLE) -> SigmaClass:
    """Class of the function that is 0 on T and -inf off T."""
    if isinstance(T, Finite):
        elems = set(T.elements)
        if basis != COUNTABLE:
            return SigmaClass.of(SigmaFunction(basis, {i: (0 if i in elems else NEG_INF) for i in range(len(basis))}))
        return SigmaClass.of(SigmaFunction(basis, {i: 0 for i in elems}, Const(NEG_INF)))
    if isinstance(T, Cofinite):
        miss = set(T.missing)
        if basis != COUNTABLE:
            return SigmaClass.of(SigmaFunction(basis, {i: (NEG_INF if i in miss else 0) for i in range(len(basis))}))
        return SigmaClass.of(SigmaFunction(basis, {i: NEG_INF for i in miss}, Const(0)))
    raise SigmaError("subset must be given as Finite or Cofinite")


def intersect(S: Finite | Cofinite, T: Finite | Cofinite) -> Finite | Cofinite:
    if isinstance(S, Finite) and isinstance(T, Finite):
        return Finite(S.elements & T.elements)
    if isinstance(S, Cofinite) and isinstance(T, Cofinite):
        return Cofinite(S.missing | T.missing)
    if isinstance(S, Cofinite):
        S, T = T, S
    return Finite(S.elements - T.missing)


def is_hidden(c: SigmaClass | SigmaFunction) -> bool:
    """Not equivalent to any {0, -inf}-valued function."""
    f = c.representative if isinstance(c, SigmaClass) else c
    if f.finite:
        return False
    if isinstance(f.tail, Affine):
        return True
    return f.tail.c != NEG_INF and f.tail.c < 0


def equivalence_multiplier(f: SigmaFunction, g: SigmaFunction) -> dict[int, int]:
    """b with A(g) = b·A(f) for equivalent f, g: the finite difference g - f."""
    if not equivalent(f, g):
        raise SigmaError("functions are not equivalent")
    keys = set(f.exc) | set(g.exc)
    b = {}
    for k in keys:
        if f(k) != NEG_INF and f(k) != g(k):
            b[k] = int(g(k) - f(k))
    return b


# ---------------------------------------------------------------- windowed checks on finite bases


def _window_points(f: SigmaFunction, w: int) -> np.ndarray:
    k = len(f.basis)
    grid = np.array(list(itertools.product(range(-w, w + 1), repeat=k)), dtype=int).reshape(-1, k)
    lower = np.array([-w - 1 if v == NEG_INF else v for v in f.values()])
    return grid[(grid >= lower).all(axis=1)]


def window_bijection(f: SigmaFunction, g: SigmaFunction, w: int = 4) -> bool:
    """x -> x + b maps A(f) onto A(g) on the window (b the equivalence multiplier)."""
    b = equivalence_multiplier(f, g)
    shift = np.array([b.get(i, 0) for i in range(len(f.basis))])
    src = _window_points(f, w)
    img = {tuple(p) for p in src + shift}
    if not all(member(list(p), g) for p in img):
        return False
    inner = _window_points(g, w - max(np.abs(shift).max(initial=0), 0))
    return all(tuple(p) in img for p in inner)


def tensor_truncation_check(f: SigmaFunction, g: SigmaFunction, w: int = 6, target: int = 2) -> bool:
    """A(f) ⊗ A(g) -> A(f+g), (a, b) -> a + b, is a bijection of classes on the window.

    Pairs are identified along (a + e_i, b) ~ (a, b + e_i); this move preserves
    the sum, so the pairs over a fixed target s form one grid slice whose
    connected components are the tensor classes over s.
    """
    _same_basis(f, g)
    if not f.finite:
        raise SigmaError("truncation checks need a finite basis")
    k = len(f.basis)
    fl = [v for v in f.values()]
    gl = [v for v in g.values()]
    A = np.arange(-w, w + 1)
    S = np.arange(-target, target + 1)
    # boolean grid over (a_1..a_k, s_1..s_k)
    valid = np.ones((len(A),) * k + (len(S),) * k, dtype=bool)
    for i in range(k):
        a_shape = [1] * (2 * k)
        a_shape[i] = len(A)
        s_shape = [1] * (2 * k)
        s_shape[k + i] = len(S)
        a = A.reshape(a_shape)
        s = S.reshape(s_shape)
        b = s - a
        cond = (b >= -w) & (b <= w)
        if fl[i] != NEG_INF:
            cond = cond & (a >= fl[i])
        if gl[i] != NEG_INF:
            cond = cond & (b >= gl[i])
        valid &= cond
    # unit steps along the a-axes between valid cells
    idx = np.arange(valid.size).reshape(valid.shape)
    rows, cols = [], []
    for i in range(k):
        lo = [slice(None)] * (2 * k)
        hi = [slice(None)] * (2 * k)
        lo[i] = slice(0, -1)
        hi[i] = slice(1, None)
        both = valid[tuple(lo)] & valid[tuple(hi)]
        rows.append(idx[tuple(lo)][both])
        cols.append(idx[tuple(hi)][both])
    rows, cols = np.concatenate(rows), np.concatenate(cols)
    graph = sparse.coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(valid.size, valid.size))
    _, comp = connected_components(graph, directed=False)
    flat_valid = valid.reshape(len(A) ** k, len(S) ** k)
    flat_comp = comp.reshape(flat_valid.shape)
    per_target = np.array([len(np.unique(flat_comp[:, j][flat_valid[:, j]])) for j in range(flat_valid.shape[1])])
    h = add(f, g)
    for j, s in enumerate(itertools.product(S.tolist(), repeat=k)):
        if per_target[j] != (1 if member(list(s), h) else 0):
            return False
    return True


def filtered_truncation_check(f: SigmaFunction, w: int = 3) -> bool:
    """Conditions of filteredness for A(f) as an N^k-set on a window, witnesses in a larger window."""
    if not f.finite:
        raise SigmaError("truncation checks need a finite basis")
    small = [tuple(int(x) for x in p) for p in _window_points(f, w)]
    if not small:
        return False
    big = [tuple(int(x) for x in p) for p in _window_points(f, w + 2)]
    sample = small[:: max(1, len(small) // 40)]
    for a, b in itertools.combinations_with_replacement(sample, 2):
        if not any(all(ci <= ai and ci <= bi for ci, ai, bi in zip(c, a, b)) for c in big):
            return False
    # u + a = v + a forces u = v in a group, so the equalizer condition holds with w = a
    k = len(f.basis)
    steps = [tuple(int(i == j) for j in range(k)) for i in range(k)]
    for a in sample:
        for u, v in itertools.combinations(steps, 2):
            if tuple(x + y for x, y in zip(u, a)) == tuple(x + y for x, y in zip(v, a)):
                return False
    return True


def all_finite_functions(k: int, values: Iterable[int] = range(-2, 3)) -> list[SigmaFunction]:
    names = tuple(f"p{i}" for i in range(k))
    return [SigmaFunction(names, dict(enumerate(v))) for v in itertools.product(list(values), repeat=k)]


def symmetric_pairs(k: int, values: Iterable[int] = range(-2, 3)) -> list[tuple[SigmaFunction, SigmaFunction]]:
    """All (f, g) on a k-element basis up to permuting coordinates and swapping f with g."""
    values = list(values)
    types = list(itertools.product(values, repeat=2))
    names = tuple(f"p{i}" for i in range(k))
    seen = set()
    out = []
    for combo in itertools.combinations_with_replacement(types, k):
        swapped = tuple(sorted((b, a) for a, b in combo))
        key = min(combo, swapped)
        if key in seen:
            continue
        seen.add(key)
        f = SigmaFunction(names, {i: t[0] for i, t in enumerate(combo)})
        g = SigmaFunction(names, {i: t[1] for i, t in enumerate(combo)})
        out.append((f, g))
    return out


# ---------------------------------------------------------------- JSON


def _value_json(v: Value):
    return "-inf" if v == NEG_INF else int(v)


def _value_parse(v) -> Value:
    if v in ("-inf", "-Infinity") or v == NEG_INF:
        return NEG_INF
    if isinstance(v, bool) or not isinstance(v, int):
        raise SigmaError(f"bad value {v!r}")
    return v


def to_json(f: SigmaFunction) -> dict:
    if isinstance(f.tail, Affine):
        tail = {"kind": "affine", "a": f.tail.a, "b": f.tail.b}
    else:
        tail = {"kind": "const", "c": _value_json(f.tail.c)}
    if f.finite:
        return {"basis": list(f.basis), "exceptions": {f.basis[k]: _value_json(v) for k, v in f.exceptions},
                "tail": tail}
    return {"basis": COUNTABLE, "exceptions": {str(k): _value_json(v) for k, v in f.exceptions}, "tail": tail}


def from_json(d: dict) -> SigmaFunction:
    basis = d.get("basis", COUNTABLE)
    if basis != COUNTABLE:
        if not isinstance(basis, list) or not all(isinstance(b, str) for b in basis):
            raise SigmaError("/basis must be 'countable' or a list of names")
        basis = tuple(basis)
    exc = {}
    for k, v in d.get("exceptions", {}).items():
        if basis != COUNTABLE and k in basis:
            k = basis.index(k)
        try:
            k = int(k)
        except ValueError:
            raise SigmaError(f"/exceptions/{k}: unknown index") from None
        exc[k] = _value_parse(v)
    t = d.get("tail", {"kind": "const", "c": 0})
    if t.get("kind") == "affine":
        tail = Affine(int(t["a"]), int(t["b"]))
    elif t.get("kind") == "const":
        tail = Const(_value_parse(t.get("c", 0)))
    else:
        raise SigmaError("/tail/kind must be 'const' or 'affine'")
    return SigmaFunction(basis, exc, tail)
