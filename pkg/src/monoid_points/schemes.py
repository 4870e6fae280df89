"""Monoid schemes given by finite affine atlases, quasi-coherent sheaves on them,
global sections, stalks and reconstruction from point data.

Every scheme here lives inside one ambient presented monoid T: a chart is
the degree-zero part of a localization of T (affine pieces use the trivial
grading, so the degree-zero part is everything). Points are the primes of T
that avoid the inverted set of some chart. Quasi-coherent sheaves are given by
a graded T-set; the sections over a chart are the degree-zero part of its
localization, and overlap maps are further localization.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Sequence

import networkx as nx
from networkx.algorithms.isomorphism import DiGraphMatcher
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors

from .core import DEFAULT_BUDGET, LocalizedMonoid, MonoidPresentation, Vec, are_equal, support_mask
from .graded import (
    Elem,
    GradedMonoid,
    GradedMSet,
    check_proj_finiteness,
    chart_presentation,
    coproduct,
    graded_free,
    localize_graded_at,
    shift,
)
from .msets import (
    ClassificationError,
    LocalizationMSet,
    TopoPoint,
    WindowInstability,
    classify_point,
    endomorphism_monoid,
)
from .spectrum import PrimeIdeal, mask_names, spec


class SchemeError(ValueError):
    pass


@dataclass(frozen=True)
class Chart:
    inverted: frozenset[int]
    unit: int | None  # degree-1 generator set to 1 on Proj charts
    presentation: MonoidPresentation

    def contains_prime(self, mask: int) -> bool:
        return not any((mask >> i) & 1 for i in self.inverted)


@dataclass(frozen=True)
class MonoidScheme:
    ambient: GradedMonoid
    charts: tuple[Chart, ...]
    kind: str

    @property
    def base(self) -> MonoidPresentation:
        return self.ambient.base

    @cached_property
    def point_masks(self) -> list[int]:
        return [p.mask for p in spec(self.base).primes if any(c.contains_prime(p.mask) for c in self.charts)]

    def points(self) -> list[PrimeIdeal]:
        return [PrimeIdeal(self.base, m) for m in self.point_masks]

    def charts_at(self, mask: int) -> list[int]:
        return [i for i, c in enumerate(self.charts) if c.contains_prime(mask)]

    def order(self) -> list[list[int]]:
        ms = self.point_masks
        return [[1 if a & ~b == 0 else 0 for b in ms] for a in ms]

    def stalk_presentation(self, mask: int) -> MonoidPresentation:
        charts = self.charts_at(mask)
        if not charts:
            raise SchemeError(f"prime {mask_names(self.base, mask)} is not a point")
        c = self.charts[charts[0]]
        comp = [i for i in range(c.presentation.rank) if not (i < self.base.rank and (mask >> i) & 1)]
        return tietze_simplify(LocalizedMonoid(c.presentation, comp).presentation)

    def point_data(self) -> "PointData":
        return PointData(self.order(), [self.stalk_presentation(m) for m in self.point_masks],
                         [PrimeIdeal(self.base, m).label for m in self.point_masks])

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "generators": list(self.base.generators),
            "charts": [{"inverted": sorted(self.base.generators[i] for i in c.inverted),
                        "unit": None if c.unit is None else self.base.generators[c.unit]} for c in self.charts],
            "points": self.point_masks,
            "order": self.order(),
        }


def _trivially_graded(M: MonoidPresentation) -> GradedMonoid:
    return GradedMonoid(M, (0,) * M.rank)


def affine(M: MonoidPresentation) -> MonoidScheme:
    return MonoidScheme(_trivially_graded(M), (Chart(frozenset(), None, M),), "affine")


def open_subscheme(M: MonoidPresentation, fs: Iterable[Sequence[int]]) -> MonoidScheme:
    """The union of basic opens D(f) inside Spec(M)."""
    charts = []
    for f in fs:
        S = frozenset(i for i, x in enumerate(M.check(f)) if x)
        charts.append(Chart(S, None, LocalizedMonoid(M, S).presentation))
    return MonoidScheme(_trivially_graded(M), tuple(charts), "open")


def proj(GM: GradedMonoid) -> MonoidScheme:
    report = check_proj_finiteness(GM)
    if not report.ok:
        raise SchemeError(f"finiteness condition ({report.failure}) fails at {report.offending}")
    charts = tuple(Chart(frozenset([f]), f, chart_presentation(GM, f)) for f in GM.generators_of_degree(1))
    return MonoidScheme(GM, charts, "proj")


# ---------------------------------------------------------------- presentations up to isomorphism


def tietze_simplify(P: MonoidPresentation) -> MonoidPresentation:
    """Eliminate generators defined by a relation g = w with g not occurring in w."""
    gens = list(P.generators)
    rels = [(list(u), list(v)) for u, v in P.relations]
    while True:
        hit = None
        for n, (u, v) in enumerate(rels):
            for lhs, rhs in ((u, v), (v, u)):
                nz = [i for i, x in enumerate(lhs) if x]
                if len(nz) == 1 and lhs[nz[0]] == 1 and rhs[nz[0]] == 0:
                    hit = (n, nz[0], rhs)
                    break
            if hit:
                break
        if hit is None:
            break
        n, g, w = hit
        del rels[n]
        new = []
        for u, v in rels:
            u2 = [a + u[g] * b for a, b in zip(u, w)]
            v2 = [a + v[g] * b for a, b in zip(v, w)]
            del u2[g], v2[g]
            if u2 != v2:
                new.append((u2, v2))
        rels = new
        del gens[g]
    out = set()
    for u, v in rels:
        pair = tuple(sorted((tuple(u), tuple(v))))
        out.add(pair)
    return MonoidPresentation(tuple(gens), tuple(sorted(out)))


def group_completion_invariants(P: MonoidPresentation) -> tuple[int, tuple[int, ...]]:
    """(rank, torsion invariant factors) of the group completion."""
    rows = [[a - b for a, b in zip(u, v)] for u, v in P.relations]
    rows = [r for r in rows if any(r)]
    if not rows:
        return P.rank, ()
    factors = invariant_factors(Matrix(rows), domain=ZZ)
    nonzero = [abs(int(d)) for d in factors if d != 0]
    return P.rank - len(nonzero), tuple(d for d in nonzero if d > 1)


def spectrum_signature(P: MonoidPresentation) -> tuple[int, ...]:
    L = spec(P)
    return tuple(sorted(sum(L.order[i]) for i in range(len(L))))


def monoid_invariants(P: MonoidPresentation) -> tuple:
    return (spectrum_signature(P), group_completion_invariants(P))


def monoid_isomorphic(A: MonoidPresentation, B: MonoidPresentation, budget: int = DEFAULT_BUDGET) -> bool | None:
    """True on a generator bijection matching relations both ways, False when an
    invariant separates, None when neither is found."""
    A, B = tietze_simplify(A), tietze_simplify(B)
    if monoid_invariants(A) != monoid_invariants(B):
        return False
    if A.rank != B.rank:
        return None

    def holds(P, Q, perm):
        for u, v in P.relations:
            pu = [0] * Q.rank
            pv = [0] * Q.rank
            for i, j in enumerate(perm):
                pu[j] += u[i]
                pv[j] += v[i]
            if not are_equal(Q, pu, pv, budget).is_equal:
                return False
        return True

    for perm in itertools.permutations(range(A.rank)):
        inv = [0] * A.rank
        for i, j in enumerate(perm):
            inv[j] = i
        if holds(A, B, perm) and holds(B, A, inv):
            return True
    return None


# ---------------------------------------------------------------- point data and reconstruction


@dataclass
class PointData:
    order: list[list[int]]
    stalks: list[MonoidPresentation]
    labels: list[str] = field(default_factory=list)

    def __len__(self):
        return len(self.stalks)


@dataclass
class StalkPoint:
    """The point F -> F_x, stored as the stalk of the structure sheaf on each chart containing x."""

    scheme: MonoidScheme
    mask: int
    carriers: dict[int, LocalizationMSet]

    @property
    def label(self) -> str:
        return PrimeIdeal(self.scheme.base, self.mask).label


def qc_points(X: MonoidScheme, budget: int = DEFAULT_BUDGET) -> list[StalkPoint]:
    out = []
    for m in X.point_masks:
        carriers = {}
        for i in X.charts_at(m):
            C = X.charts[i].presentation
            comp = [j for j in range(C.rank) if not (j < X.base.rank and (m >> j) & 1)]
            carriers[i] = LocalizationMSet(LocalizedMonoid(C, comp, budget))
        out.append(StalkPoint(X, m, carriers))
    return out


@dataclass
class ReconstructedScheme:
    data: PointData

    def point_data(self) -> PointData:
        return self.data


def reconstruct(pts: list[StalkPoint], budget: int = DEFAULT_BUDGET) -> ReconstructedScheme:
    """Rebuild the point poset from the classified primes and attach End(P) as stalks."""
    classified: list[dict[int, PrimeIdeal]] = []
    stalks = []
    for P in pts:
        per_chart = {}
        for i, A in P.carriers.items():
            per_chart[i] = classify_point(A, budget).prime
        classified.append(per_chart)
        i0 = min(per_chart)
        topo = TopoPoint(P.carriers[i0], per_chart[i0], P.label)
        stalks.append(tietze_simplify(endomorphism_monoid(topo, budget)))
    n = len(pts)
    order = [[0] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            common = set(classified[a]) & set(classified[b])
            if common:
                c = min(common)
                pa = TopoPoint(pts[a].carriers[c], classified[a][c], "")
                pb = TopoPoint(pts[b].carriers[c], classified[b][c], "")
                # a <= b when the point of a lies in the closure-order below b
                order[a][b] = 1 if pa.prime <= pb.prime else 0
    return ReconstructedScheme(PointData(order, stalks, [P.label for P in pts]))


@dataclass
class IsoReport:
    isomorphic: bool | None
    poset_isomorphisms: int
    mapping: dict[int, int] | None = None

    def __bool__(self):
        return bool(self.isomorphic)


def _order_graph(order: list[list[int]]) -> nx.DiGraph:
    G = nx.DiGraph()
    G.add_nodes_from(range(len(order)))
    for i, row in enumerate(order):
        for j, x in enumerate(row):
            if x and i != j:
                G.add_edge(i, j)
    return G


def is_isomorphic(X, Y, budget: int = DEFAULT_BUDGET) -> IsoReport:
    """Search poset isomorphisms whose stalk monoids are pairwise isomorphic."""
    dx, dy = X.point_data(), Y.point_data()
    if len(dx) != len(dy):
        return IsoReport(False, 0)
    inv_x = [monoid_invariants(tietze_simplify(s)) for s in dx.stalks]
    inv_y = [monoid_invariants(tietze_simplify(s)) for s in dy.stalks]
    GX, GY = _order_graph(dx.order), _order_graph(dy.order)
    for n in GX.nodes:
        GX.nodes[n]["inv"] = inv_x[n]
    for n in GY.nodes:
        GY.nodes[n]["inv"] = inv_y[n]
    matcher = DiGraphMatcher(GX, GY, node_match=lambda a, b: a["inv"] == b["inv"])
    count = 0
    undecided = False
    found = None
    cache: dict[tuple[int, int], bool | None] = {}
    for iso in matcher.isomorphisms_iter():
        count += 1
        verdicts = []
        for a, b in iso.items():
            if (a, b) not in cache:
                cache[(a, b)] = monoid_isomorphic(dx.stalks[a], dy.stalks[b], budget)
            verdicts.append(cache[(a, b)])
        if all(v is True for v in verdicts):
            found = found or dict(iso)
        elif not any(v is False for v in verdicts):
            undecided = True
    if found is not None:
        return IsoReport(True, count, found)
    return IsoReport(None if undecided else False, count)


# ---------------------------------------------------------------- sheaves


@dataclass(frozen=True)
class QcSheaf:
    scheme: MonoidScheme
    module: GradedMSet

    def chart_module(self, i: int) -> GradedMSet:
        return localize_graded_at(self.module, self.scheme.charts[i].inverted)

    def overlap_module(self, i: int, j: int) -> GradedMSet:
        return localize_graded_at(self.module, self.scheme.charts[i].inverted | self.scheme.charts[j].inverted)

    def sections(self, i: int, w: int) -> list[Elem]:
        return self.chart_module(i).window(w, degrees=[0])

    def restrict(self, i: int, j: int, a: Elem) -> Elem:
        return self.overlap_module(i, j).canonical(a)


def iota_star(A: GradedMSet, X: MonoidScheme) -> QcSheaf:
    if A.monoid != X.ambient:
        raise SchemeError("graded set over a different graded monoid")
    return QcSheaf(X, A)


def structure_sheaf(X: MonoidScheme) -> QcSheaf:
    return QcSheaf(X, graded_free(X.ambient))


def twisting_sheaf(X: MonoidScheme, n: int) -> QcSheaf:
    """O(n)."""
    return QcSheaf(X, graded_free(X.ambient, n))


def affine_sheaf(X: MonoidScheme, A: GradedMSet) -> QcSheaf:
    return QcSheaf(X, A)


def twist(F: QcSheaf, n: int) -> QcSheaf:
    return QcSheaf(F.scheme, shift(F.module, n))


def _union_find(n: int):
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        a, b = find(a), find(b)
        if a != b:
            parent[max(a, b)] = min(a, b)

    return find, union


def _chart_monoid_generators(X: MonoidScheme, i: int) -> list[Vec]:
    """Generators of the degree-zero chart monoid as signed vectors in T."""
    c = X.charts[i]
    gens = []
    k = X.base.rank
    for g in range(k):
        v = [0] * k
        v[g] = 1
        if c.unit is not None:
            v[c.unit] -= X.ambient.degrees[g]
        if any(v):
            gens.append(tuple(v))
    for g in sorted(c.inverted):
        if X.ambient.degrees[g] == 0:
            v = [0] * k
            v[g] = -1
            gens.append(tuple(v))
    return gens


def twist_check(F: QcSheaf, n: int, w: int = 3) -> bool:
    """F(n) against the chartwise tensor F ⊗ O(n): the multiplication map from
    union-find classes of pairs to the chart sections of F(n) is a bijection on the window."""
    X = F.scheme
    O = twisting_sheaf(X, n)
    Fn = twist(F, n)
    for i in range(len(X.charts)):
        left = F.sections(i, w + abs(n) + 1)
        right = O.sections(i, w + abs(n) + 1)
        pairs = [(a, b) for a in left for b in right]
        index = {p: t for t, p in enumerate(pairs)}
        find, union = _union_find(len(pairs))
        FL, OL = F.chart_module(i), O.chart_module(i)
        for (a, b), t in index.items():
            for g in _chart_monoid_generators(X, i):
                other = index.get((FL.act(g, a), b))
                partner = (a, OL.act(g, b))
                if other is not None and partner in index:
                    union(other, index[partner])
        FnL = Fn.chart_module(i)
        target = set(Fn.sections(i, w))
        image: dict = {}
        for (a, b), t in index.items():
            prod = FnL.canonical((a[0], tuple(x + y for x, y in zip(a[1], b[1]))))
            image.setdefault(prod, set()).add(find(t))
        if not target <= set(image):
            return False
        if any(len(image[z]) != 1 for z in target):
            return False
    return True


def line_bundle_check(F: QcSheaf, w: int = 3) -> bool:
    """Each chart carrier is free of rank one over the chart monoid (tested on two windows)."""
    return _line_bundle(F, w) and _line_bundle(F, w + 1)


def _line_bundle(F: QcSheaf, w: int) -> bool:
    X = F.scheme
    O = structure_sheaf(X)
    for i in range(len(X.charts)):
        small = F.sections(i, w)
        if not small:
            return False
        units = O.sections(i, 2 * w + 2)
        FL = F.chart_module(i)
        ok = False
        for a in small:
            images = {}
            injective = True
            for m in units:
                z = FL.act(m[1], a)
                if z in images and images[z] != m:
                    injective = False
                    break
                images[z] = m
            if injective and all(z in images for z in small):
                ok = True
                break
        if not ok:
            return False
    return True


def global_sections(F: QcSheaf, w: int = 6) -> list[tuple[Elem, ...]]:
    """Families of chart sections agreeing on all overlaps (equalizer on the window)."""
    X = F.scheme
    r = len(X.charts)
    if r == 0:
        return [()]
    secs = [F.sections(i, w) for i in range(r)]
    keyed = {}
    for i in range(r):
        for j in range(r):
            if i != j:
                idx: dict = {}
                for s in secs[j]:
                    idx.setdefault(F.restrict(i, j, s), []).append(s)
                keyed[(i, j)] = idx
    out = []

    def extend(family: list[Elem]):
        j = len(family)
        if j == r:
            out.append(tuple(family))
            return
        cands = None
        for i, s in enumerate(family):
            c = set(keyed[(i, j)].get(F.restrict(i, j, s), []))
            cands = c if cands is None else cands & c
        for s in sorted(cands, key=lambda a: (a[0], a[1])):
            extend(family + [s])

    for s0 in secs[0]:
        extend([s0])
    return out


def stable_global_sections(F: QcSheaf, w: int = 6) -> list[tuple[Elem, ...]]:
    a, b = global_sections(F, w), global_sections(F, w + 1)
    if len(a) != len(b):
        raise WindowInstability(f"section count {len(a)} at window {w} but {len(b)} at {w + 1}")
    return a


def gamma_star(F: QcSheaf, degrees: Iterable[int], w: int = 6) -> dict[int, list[tuple[Elem, ...]]]:
    """Γ_n(F) = Γ(X, F(n)) for the given degrees."""
    return {n: global_sections(twist(F, n), w) for n in degrees}


@dataclass
class CounitReport:
    chart: int
    classes: int
    targets: int
    injective: bool

    @property
    def ok(self) -> bool:
        return self.injective and self.classes == self.targets


def counit_check(F: QcSheaf, w: int = 2, kmin: int = -3) -> list[CounitReport]:
    """Chartwise comparison of ι*Γ_*(F) with F: each chart section t of F in the
    window must be s/f^k for a global section s of F(k), unique up to f-multiples."""
    X = F.scheme
    K = w + 4
    W = w + K + 2
    gammas = gamma_star(F, range(kmin, K + 1), W)
    reports = []
    for i, c in enumerate(X.charts):
        if c.unit is None:
            raise SchemeError("counit check needs Proj charts")
        f = c.unit
        ef = tuple(1 if j == f else 0 for j in range(X.base.rank))
        FL = F.chart_module(i)
        targets = set(F.sections(i, w))
        pre: dict[Elem, list[tuple[int, tuple]]] = {}
        for k, fams in gammas.items():
            for fam in fams:
                a = fam[i]
                t = FL.canonical((a[0], tuple(x - k * y for x, y in zip(a[1], ef))))
                pre.setdefault(t, []).append((k, fam))
        injective = True
        for t, lst in pre.items():
            k0 = min(k for k, _ in lst)
            base = [fam for k, fam in lst if k == k0]
            if len(base) != 1:
                injective = False
                break
            for k, fam in lst:
                lifted = twist(F, k)
                mult = tuple(lifted.chart_module(j).canonical((s[0], tuple(x + (k - k0) * y for x, y in zip(s[1], ef))))
                             for j, s in enumerate(base[0]))
                if tuple(lifted.chart_module(j).canonical(s) for j, s in enumerate(fam)) != mult:
                    injective = False
                    break
        hit = targets & set(pre)
        reports.append(CounitReport(i, len(hit), len(targets), injective))
    return reports


def counit_isomorphism(F: QcSheaf, w: int = 2) -> bool:
    return all(r.ok for r in counit_check(F, w)) and all(r.ok for r in counit_check(F, w + 1))


# ---------------------------------------------------------------- stalks


def stalk(F: QcSheaf, mask: int, w: int = 3) -> list[Elem]:
    """Degree-zero elements of F localized at the complement of the prime (window)."""
    X = F.scheme
    if mask not in X.point_masks:
        raise SchemeError("not a point of the scheme")
    comp = [i for i in range(X.base.rank) if not (mask >> i) & 1]
    return localize_graded_at(F.module, comp).window(w, degrees=[0])


def stalk_twist_bijection(F: QcSheaf, mask: int, n: int, w: int = 3) -> bool:
    """Multiplication by g^n, g a degree-1 generator outside the prime, maps F_x onto F(n)_x."""
    X = F.scheme
    g = next((i for i in X.ambient.generators_of_degree(1) if not (mask >> i) & 1), None)
    comp = [i for i in range(X.base.rank) if not (mask >> i) & 1]
    src = localize_graded_at(F.module, comp)
    dst = localize_graded_at(shift(F.module, n), comp)
    if g is None:
        return n == 0 or not src.window(w, degrees=[0])
    eg = [n if j == g else 0 for j in range(X.base.rank)]
    small = src.window(w, degrees=[0])
    images = {dst.act(eg, a) for a in small}
    if len(images) != len(small):
        return False
    back = [-x for x in eg]
    return all(src.act(back, b) in set(src.window(w + abs(n), degrees=[0])) for b in dst.window(w, degrees=[0]))


# ---------------------------------------------------------------- mono / epi after ι*


@dataclass(frozen=True)
class GradedMap:
    source: GradedMSet
    target: GradedMSet
    fn: Callable[[Elem], Elem]

    def __call__(self, a: Elem) -> Elem:
        return self.target.canonical(self.fn(a))


def inclusion_map(A: GradedMSet, B: GradedMSet) -> GradedMap:
    return GradedMap(A, B, lambda a: a)


def fold_map(A: GradedMSet) -> GradedMap:
    """A ⊔ A -> A."""
    return GradedMap(coproduct(A, A), A, lambda a: (a[0] % len(A.pieces), a[1]))


@dataclass
class MonoEpi:
    mono: bool | None
    epi: bool | None


def mono_epi_after_iota(alpha: GradedMap, w: int = 2, budget: int = 16) -> MonoEpi:
    """α becomes mono (epi) after ι* when collisions (cokernel elements) are
    killed (hit) by a power of each degree-1 generator."""
    A, B = alpha.source, alpha.target
    M = A.monoid
    fs = M.generators_of_degree(1)
    small = A.window(w)
    mono: bool | None = True
    for f in fs:
        ef = M.base.gen(f)
        groups: dict = {}
        for a in small:
            groups.setdefault(alpha(a), []).append(a)
        for coll in groups.values():
            for a, b in itertools.combinations(coll, 2):
                if A.equal(a, b):
                    continue
                merged = False
                for m in range(1, budget + 1):
                    fm = tuple(m * x for x in ef)
                    if A.act(fm, a) == A.act(fm, b):
                        merged = True
                        break
                if not merged:
                    # different pieces never meet; otherwise we ran out of budget
                    if a[0] != b[0] or A.pieces[a[0]].inverted:
                        mono = False
                    elif mono is True:
                        mono = None
    epi: bool | None = True
    image = {alpha(a) for a in A.window(w + budget // 4 + 1)}
    for f in fs:
        ef = M.base.gen(f)
        for z in B.window(w):
            if not any(B.act(tuple(m * x for x in ef), z) in image for m in range(0, budget // 4 + 1)):
                epi = None if epi is True else epi
    return MonoEpi(mono, epi)


def power_trick(F: QcSheaf, i: int, s1: Elem, s2: Elem, f: int, limit: int = 32) -> int | None:
    """Least k with f^k s1 = f^k s2 in the chart module, if any below the limit."""
    L = F.chart_module(i)
    ef = F.scheme.base.gen(f)
    for k in range(limit + 1):
        fk = tuple(k * x for x in ef)
        if L.act(fk, s1) == L.act(fk, s2):
            return k
    return None
