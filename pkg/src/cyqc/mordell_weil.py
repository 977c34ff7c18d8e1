"""Mordell-Weil data of a rational elliptic surface from its fiber root lattice.

Two views are provided.

* The lattice view: embed T in E8; the Mordell-Weil lattice is the dual of
  the orthogonal complement and the torsion is the glue of the primitive
  closure of T (:func:`mw_outcomes`, :func:`mw_from_T`).
* The section view: :class:`SectionClass` carries incidences with the fiber
  components and the intersection number with the zero section, and the
  height pairing is evaluated from those (:func:`height`).

:class:`FrameModel` ties the two together.  With the frame lattice written as
U + E8 and T sitting in E8, sections correspond one to one with E8/T, and the
section in a class is represented by the unique vector whose projection to
each fiber lattice is zero or a minuscule fundamental weight.  For such
vectors x, y one has P.sigma = |x|^2/2 - 1 and P.Q = |x - y|^2/2 - 1, so
incidences and intersection numbers become exact lattice computations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

from . import linalg
from . import lattice as lat
from .kodaira import (ComponentAction, FiberConfiguration, KodairaFiber, component_add,
                      component_class, component_mul, component_order, contr, diagram_automorphisms, root_lattice,
                      section_components)
from .lattice import Embedding, GramLattice, RootLatticeSpec


class MWError(ValueError):
    pass


class AmbiguousMW(MWError):
    """T admits embeddings into E8 with different Mordell-Weil groups."""

    def __init__(self, message: str, alternatives):
        super().__init__(message)
        self.alternatives = alternatives


E8 = lat.gram_of("E8")


@dataclass(frozen=True)
class MWGroup:
    lat: GramLattice
    tors: tuple[int, ...] = ()
    narrow: GramLattice | None = None

    def __post_init__(self):
        object.__setattr__(self, "tors", linalg.normalize_torsion(self.tors))
        if self.lat.rank and not self.lat.is_positive_definite():
            raise MWError("Mordell-Weil lattice must be positive definite")

    def as_lattice(self) -> GramLattice:
        return GramLattice(self.lat.gram, self.tors)

    @property
    def tors_order(self) -> int:
        out = 1
        for t in self.tors:
            out *= t
        return out

    def text(self) -> str:
        return lat.describe(self.as_lattice())


def _as_gram(T) -> GramLattice:
    if isinstance(T, GramLattice):
        return T
    return lat.gram_of(T)


@lru_cache(maxsize=256)
def _outcomes(gram: tuple, symmetry: str):
    T = GramLattice(gram)
    if T.rank > 8:
        raise MWError("T does not embed in E8")
    embs = lat.find_embeddings(T, E8, symmetry)
    if not embs:
        raise MWError("T does not embed in E8")
    groups: list[tuple[MWGroup, list[Embedding]]] = []
    for e in embs:
        comp = lat.orthogonal_complement(e)
        _, glue = lat.saturate(e)
        mwlat = lat.reduced(lat.dual(comp)) if comp.rank else GramLattice()
        for g, members in groups:
            if g.tors == glue and lat.is_isometric(g.lat, mwlat):
                members.append(e)
                break
        else:
            groups.append((MWGroup(mwlat, glue, lat.reduced(comp) if comp.rank else GramLattice()), [e]))
    return tuple((g, tuple(ms)) for g, ms in groups)


def mw_outcomes(T, symmetry: str = "weyl") -> list[tuple[MWGroup, tuple[Embedding, ...]]]:
    """All Mordell-Weil groups arising from embeddings of T into E8.

    Embeddings are taken up to the automorphisms of E8 (``symmetry="weyl"``),
    and grouped by the isometry class of the resulting (lattice, torsion).
    """
    return list(_outcomes(_as_gram(T).gram, symmetry))


def mw_from_T(T, torsion: Iterable[int] | None = None) -> tuple[MWGroup, Embedding]:
    """Mordell-Weil group for the fiber lattice T, with a witnessing embedding.

    Some T (for instance A1^4, A3^2, A7) sit in E8 in two inequivalent ways,
    one primitive and one with glue.  The surfaces realize different MW
    groups, so the caller has to say which torsion is meant; without it the
    call fails and lists the alternatives.
    """
    outs = mw_outcomes(T)
    if torsion is not None:
        want = linalg.normalize_torsion(torsion)
        outs = [o for o in outs if o[0].tors == want]
        if not outs:
            raise MWError(f"no embedding of T in E8 has torsion {want}")
    if len(outs) > 1:
        alts = [g for g, _ in outs]
        raise AmbiguousMW("T embeds in E8 with different Mordell-Weil groups: "
                          + "; ".join(g.text() for g in alts), alts)
    g, embs = outs[0]
    return g, embs[0]


def discriminant_check(T, mw: MWGroup) -> bool:
    """det(T) * det(MW_lat) == |MW_tors|^2."""
    return _as_gram(T).det * mw.lat.det == mw.tors_order ** 2


# ---------------------------------------------------------------- sections

@dataclass(frozen=True)
class SectionClass:
    """A section described by its incidences with the reducible fibers.

    ``incidences`` maps fiber index -> component label.  ``vector`` and
    ``torsion`` are optional coordinates (MW_lat basis, torsion generators).
    The zero section is ``SectionClass.zero(cfg)``.
    """

    incidences: tuple[tuple[int, int], ...] = ()
    meets_zero_section: int = 0
    vector: tuple = ()
    torsion: tuple = ()
    is_zero: bool = False
    name: str = ""

    def __post_init__(self):
        inc = self.incidences
        if isinstance(inc, dict):
            inc = inc.items()
        object.__setattr__(self, "incidences", tuple(sorted((int(a), int(b)) for a, b in inc)))
        if self.meets_zero_section < 0 and not self.is_zero:
            raise MWError("a section other than sigma meets it non-negatively")

    @classmethod
    def zero(cls, cfg: FiberConfiguration) -> "SectionClass":
        return cls(tuple((i, 0) for i, _ in cfg.reducible()), -1, is_zero=True, name="sigma")

    def component(self, idx: int) -> int:
        for a, b in self.incidences:
            if a == idx:
                return b
        raise MWError(f"no incidence recorded for fiber {idx}")

    def incidence_map(self) -> dict[int, int]:
        return dict(self.incidences)


def contr_sum(a: SectionClass, b: SectionClass, cfg: FiberConfiguration) -> Fraction:
    total = Fraction(0)
    for idx, f in cfg.reducible():
        total += contr(f, a.component(idx), b.component(idx))
    return total


def height(a: SectionClass, b: SectionClass, cfg: FiberConfiguration, ab: int | None = None) -> Fraction:
    """Height pairing 1 + a.sigma + b.sigma - a.b - sum of contributions.

    For a != b the intersection number ``ab`` must be supplied; it is not
    determined by the incidences.
    """
    if a.is_zero or b.is_zero:
        for idx, _ in cfg.reducible():
            a.component(idx), b.component(idx)
        return Fraction(0)
    if ab is None:
        if a != b:
            raise MWError("the intersection number a.b is required for distinct sections")
        ab = -1
    return 1 + a.meets_zero_section + b.meets_zero_section - ab - contr_sum(a, b, cfg)


def torsion_test(a: SectionClass, cfg: FiberConfiguration) -> bool:
    """Torsion criterion for a section disjoint from sigma (or sigma itself)."""
    if a.is_zero:
        return True
    if a.meets_zero_section != 0:
        raise MWError("torsion test needs a section disjoint from the zero section")
    return contr_sum(a, a, cfg) == 2


# ---------------------------------------------------------------- torsion incidences

def _group_elements(tors: Sequence[int]) -> list[tuple[int, ...]]:
    return list(product(*[range(t) for t in tors]))


def _incidence_combination(cfg: FiberConfiguration, gens: Sequence[dict[int, int]],
                           coeffs: Sequence[int]) -> dict[int, int]:
    out = {}
    for idx, f in cfg.reducible():
        x = 0
        for g, c in zip(gens, coeffs):
            x = component_add(f, x, component_mul(f, c, g[idx]))
        out[idx] = x
    return out


def _contr_map(cfg: FiberConfiguration, a: dict[int, int], b: dict[int, int]) -> Fraction:
    return sum((contr(f, a[i], b[i]) for i, f in cfg.reducible()), Fraction(0))


@dataclass(frozen=True)
class TorsionSolution:
    """Incidences of the torsion generators and of every torsion element."""

    tors: tuple[int, ...]
    generators: tuple[tuple[tuple[int, int], ...], ...]
    elements: tuple[tuple[tuple[int, ...], tuple[tuple[int, int], ...]], ...]

    def incidence(self, coeffs: Sequence[int]) -> dict[int, int]:
        for c, inc in self.elements:
            if tuple(c) == tuple(coeffs):
                return dict(inc)
        raise KeyError(coeffs)

    def image(self) -> frozenset:
        return frozenset(inc for c, inc in self.elements if any(c))

    def sections(self) -> list[SectionClass]:
        return [SectionClass(inc, 0, torsion=c, name="eta" + "".join(map(str, c)))
                for c, inc in self.elements if any(c)]


@dataclass(frozen=True)
class TorsionIncidences:
    solutions: tuple[TorsionSolution, ...]
    raw_count: int

    @property
    def unique(self) -> bool:
        return len(self.solutions) == 1

    @property
    def first(self) -> TorsionSolution | None:
        return self.solutions[0] if self.solutions else None


def _relabelings(cfg: FiberConfiguration, action: ComponentAction | None) -> list[dict[int, tuple[int, ...]]]:
    """Per-fiber diagram relabelings commuting with the action."""
    red = cfg.reducible()
    choices = [diagram_automorphisms(f) for _, f in red]
    out = []
    for combo in product(*choices):
        phi = {idx: p for (idx, _), p in zip(red, combo)}
        ok = True
        if action is not None:
            for a, b, p in action.maps:
                # action then relabel == relabel then action
                if any(phi[b][p[x]] != p[phi[a][x]] for x in range(len(p))):
                    ok = False
                    break
        if ok:
            out.append(phi)
    return out


def torsion_incidence_solve(cfg: FiberConfiguration, tors: Sequence[int],
                            action: ComponentAction | None = None) -> TorsionIncidences:
    """Incidences of the torsion sections, up to relabeling of components.

    Every non-zero torsion section is disjoint from sigma and has
    contributions summing to 2; distinct torsion sections are disjoint, so
    their mutual contributions sum to 1; incidences add like the component
    groups; and, when an action is given, torsion sections are invariant.
    Solutions differing by a relabeling of fiber components that commutes
    with the action (or by a change of generators) are identified.
    """
    tors = linalg.normalize_torsion(tors)
    if not tors:
        return TorsionIncidences((TorsionSolution((), (), (((), ()),)),), 1)
    red = cfg.reducible()
    if not red:
        raise MWError("inconsistent torsion data")
    per_fiber = [section_components(f) for _, f in red]

    def candidates(order: int):
        out = []
        for combo in product(*per_fiber):
            inc = {idx: c for (idx, _), c in zip(red, combo)}
            if any(order % component_order(f, inc[idx]) for idx, f in red):
                continue
            if _contr_map(cfg, inc, inc) != 2:
                continue
            if action is not None and action.apply(inc) != inc:
                continue
            out.append(inc)
        return out

    cand = [candidates(t) for t in tors]
    elems = _group_elements(tors)
    raw = []
    for gens in product(*cand):
        incs = {c: _incidence_combination(cfg, gens, c) for c in elems}
        nonzero = [c for c in elems if any(c)]
        ok = True
        for c in nonzero:
            inc = incs[c]
            if all(v == 0 for v in inc.values()) or _contr_map(cfg, inc, inc) != 2:
                ok = False
                break
            if action is not None and action.apply(inc) != inc:
                ok = False
                break
        if ok:
            for i, c in enumerate(nonzero):
                for c2 in nonzero[i + 1:]:
                    if _contr_map(cfg, incs[c], incs[c2]) != 1:
                        ok = False
                        break
                if not ok:
                    break
        if ok:
            raw.append((gens, incs))
    if not raw:
        raise MWError("inconsistent torsion data")
    relabel = _relabelings(cfg, action)

    def key_of(incs):
        return tuple(sorted(tuple(sorted(inc.items())) for c, inc in incs.items() if any(c)))

    classes: dict = {}
    for gens, incs in raw:
        variants = []
        for phi in relabel:
            moved = {c: {i: phi[i][v] for i, v in inc.items()} for c, inc in incs.items()}
            variants.append(key_of(moved))
        canon = min(variants)
        classes.setdefault(canon, []).append((gens, incs))
    sols = []
    for canon in sorted(classes):
        # prefer the member whose own image is the canonical one, then least generators
        members = [(g, i) for g, i in classes[canon] if key_of(i) == canon] or classes[canon]
        gens, incs = min(members, key=lambda gi: tuple(tuple(sorted(g.items())) for g in gi[0]))
        sols.append(TorsionSolution(
            tors,
            tuple(tuple(sorted(g.items())) for g in gens),
            tuple((c, tuple(sorted(incs[c].items()))) for c in elems)))
    return TorsionIncidences(tuple(sols), len(raw))


# ---------------------------------------------------------------- frame model

def _lattice_solutions(n: int, zero_cols: Sequence[Sequence], int_cols: Sequence[Sequence]) -> list[list[int]]:
    """Basis of {a in Z^n : a . z = 0 for z in zero_cols, a . w in Z for w in int_cols}.

    Columns are given as length-n sequences (the images of the unit vectors).
    """
    basis = [[int(i == j) for j in range(n)] for i in range(n)]
    if zero_cols:
        basis = linalg.integer_kernel([list(c) for c in zero_cols])
        if not basis:
            return []
    if int_cols:
        # values of each basis vector on the integrality conditions
        q = [[sum(Fraction(b[i]) * Fraction(w[i]) for i in range(n)) for w in int_cols] for b in basis]
        den = linalg.common_denominator(q)
        if den > 1:
            r, k = len(basis), len(int_cols)
            eqs = [[int(q[i][j] * den) for i in range(r)] + [den * int(t == j) for t in range(k)]
                   for j in range(k)]
            sols = linalg.integer_kernel(eqs)
            gens = [s[:r] for s in sols]
            coeff = linalg.hermite_rows([list(g) for g in gens])
            basis = [[sum(c[i] * basis[i][j] for i in range(r)) for j in range(n)] for c in coeff]
    return basis


def abelian_invariants(elements: Sequence, add, zero) -> tuple[int, ...]:
    """Invariant factors of a finite abelian group given by all its elements."""
    def order(x):
        k, y = 1, x
        while y != zero:
            y = add(y, x)
            k += 1
        return k

    n = len(elements)
    if n == 1:
        return ()
    orders = {x: order(x) for x in elements}
    primes = [p for p in range(2, n + 1) if n % p == 0 and all(p % q for q in range(2, p))]
    factors: list[int] = []
    per_prime = []
    for p in primes:
        # sizes of the p^k-torsion subgroups give the partition
        sizes = []
        k = 1
        while True:
            s = sum(1 for x in elements if (p ** k) % orders[x] == 0)
            sizes.append(s)
            if k > 1 and sizes[-1] == sizes[-2]:
                break
            k += 1
        logs = [0]
        for s in sizes:
            e = 0
            while s % p == 0:
                s //= p
                e += 1
            logs.append(e)
        # number of cyclic factors of order >= p^k is logs[k] - logs[k-1]
        counts = [logs[k] - logs[k - 1] for k in range(1, len(logs))]
        parts = []
        for k in range(len(counts)):
            exact = counts[k] - (counts[k + 1] if k + 1 < len(counts) else 0)
            parts += [p ** (k + 1)] * exact
        per_prime.append(sorted(parts, reverse=True))
    width = max(len(x) for x in per_prime)
    for i in range(width):
        f = 1
        for parts in per_prime:
            if i < len(parts):
                f *= parts[i]
        factors.append(f)
    return linalg.normalize_torsion(factors)


class FrameModel:
    """Sections of a surface with reducible fibers ``cfg`` as E8/T.

    ``embedding`` embeds the fiber lattice T, written as the Cartan blocks of
    the reducible fibers in the order of ``cfg.reducible()``, into E8.
    """

    def __init__(self, cfg: FiberConfiguration, embedding: Embedding):
        self.cfg = cfg
        self.embedding = embedding
        self.gram = [[int(x) for x in row] for row in E8.gram]
        self.roots = [list(v) for v in embedding.images]
        self.blocks = []
        off = 0
        for idx, f in cfg.reducible():
            g = lat.gram_of(root_lattice(f))
            inv = lat.dual(g).gram
            self.blocks.append((idx, f, off, g.rank, inv))
            off += g.rank
        if off != len(self.roots):
            raise MWError("embedding does not match the fiber configuration")
        k = len(self.roots)
        self.comp = [list(v) for v in lat.orthogonal_complement_basis(E8, embedding.images)]
        c = len(self.comp)
        self.M = self.roots + self.comp
        self.Minv = linalg.inverse(self.M) if self.M else ()
        self.comp_gram = [list(r) for r in linalg.congruent(self.comp, self.gram)] if c else []
        # projections of the E8 basis to the complement, in complement coordinates
        proj = [list(self.Minv[i][k:]) for i in range(8)]
        self._proj = proj
        if c:
            den = linalg.common_denominator(proj)
            ints = [[int(x * den) for x in row] for row in proj]
            m, u, piv = linalg._column_hermite(linalg.transpose(ints))
            ut = linalg.transpose(u)
            mt = linalg.transpose(m)
            self.mw_basis = [[Fraction(x, den) for x in mt[i]] for i in range(piv)]
            self.mw_lifts = [list(ut[i]) for i in range(piv)]
            bg = linalg.matmul(self.mw_basis, self.comp_gram)
            self.mw_gram = linalg.to_fraction_matrix(linalg.matmul(bg, linalg.transpose(self.mw_basis)))
            binv = linalg.inverse(self.mw_basis)
            self._to_mw = linalg.matmul(proj, binv)
        else:
            self.mw_basis, self.mw_lifts, self.mw_gram, self._to_mw = [], [], (), [[] for _ in range(8)]
        self.mw_lattice = GramLattice(self.mw_gram)
        self._torsion = None

    # -- basic vector operations
    def ip(self, x: Sequence[int], y: Sequence[int]) -> int:
        g = self.gram
        return sum(x[i] * g[i][j] * y[j] for i in range(8) if x[i] for j in range(8) if y[j])

    def canon(self, x: Sequence[int]) -> tuple[int, ...]:
        """Representative of x + T whose fiber parts are 0 or minuscule."""
        v = list(x)
        for idx, f, off, r, inv in self.blocks:
            roots = self.roots[off:off + r]
            p = [sum(v[i] * gr for i, gr in zip(range(8), self._gram_times(rt))) for rt in roots]
            lab = component_class(f, p)
            t = [0] * r
            if lab:
                t[lab - 1] = 1
            diff = [p[i] - t[i] for i in range(r)]
            coords = [sum(diff[i] * inv[i][j] for i in range(r)) for j in range(r)]
            for j in range(r):
                cj = coords[j]
                if cj:
                    if cj.denominator != 1:
                        raise MWError("internal error: weight class mismatch")
                    cj = int(cj)
                    v = [a - cj * b for a, b in zip(v, roots[j])]
        return tuple(v)

    @lru_cache(maxsize=None)
    def _gram_times_cached(self, rt: tuple) -> tuple[int, ...]:
        return tuple(sum(self.gram[i][j] * rt[j] for j in range(8)) for i in range(8))

    def _gram_times(self, rt) -> tuple[int, ...]:
        return self._gram_times_cached(tuple(rt))

    def incidences(self, x: Sequence[int]) -> dict[int, int]:
        out = {}
        for idx, f, off, r, inv in self.blocks:
            p = [self.ip(x, rt) for rt in self.roots[off:off + r]]
            out[idx] = component_class(f, p)
        return out

    def add(self, x, y) -> tuple[int, ...]:
        return self.canon([a + b for a, b in zip(x, y)])

    def neg(self, x) -> tuple[int, ...]:
        return self.canon([-a for a in x])

    def mw_coords(self, x: Sequence[int]) -> tuple[int, ...]:
        out = []
        for j in range(len(self.mw_basis)):
            s = sum(x[i] * self._to_mw[i][j] for i in range(8))
            if s.denominator != 1:
                raise MWError("internal error: non-integral Mordell-Weil coordinates")
            out.append(int(s))
        return tuple(out)

    def lift(self, y: Sequence[int]) -> tuple[int, ...]:
        v = [0] * 8
        for c, l in zip(y, self.mw_lifts):
            if c:
                v = [a + c * b for a, b in zip(v, l)]
        return self.canon(v)

    def sigma_dot(self, x) -> int:
        if not any(x):
            return -1
        return self.ip(x, x) // 2 - 1

    def dot(self, x, y) -> int:
        """Intersection number of the sections represented by x and y."""
        if tuple(x) == tuple(y):
            return -1
        d = [a - b for a, b in zip(x, y)]
        return self.ip(d, d) // 2 - 1

    def height(self, x, y) -> Fraction:
        return self.mw_lattice.inner(self.mw_coords(x), self.mw_coords(y)) if self.mw_basis else Fraction(0)

    # -- torsion
    def torsion_elements(self) -> list[tuple[int, ...]]:
        if self._torsion is None:
            closure = lat.saturation_basis(self.embedding.images, 8) if self.roots else []
            zero = tuple([0] * 8)
            seen = {zero}
            frontier = [zero]
            while frontier:
                new = []
                for a in frontier:
                    for s in closure:
                        b = self.add(a, s)
                        if b not in seen:
                            seen.add(b)
                            new.append(b)
                frontier = new
            self._torsion = sorted(seen, key=lambda v: (any(v), self.ip(v, v), v))
        return self._torsion

    def torsion_invariants(self) -> tuple[int, ...]:
        el = self.torsion_elements()
        return abelian_invariants(el, self.add, tuple([0] * 8))

    def section_class(self, x, name: str = "") -> SectionClass:
        x = tuple(x)
        if not any(x):
            return SectionClass.zero(self.cfg)
        return SectionClass(self.incidences(x), self.sigma_dot(x), self.mw_coords(x), (), False, name)

    def sections_over(self, y: Sequence[int]) -> list[tuple[int, ...]]:
        """All sections whose Mordell-Weil lattice image is y."""
        base = self.lift(y)
        return sorted({self.add(base, t) for t in self.torsion_elements()})

    def mw_group(self) -> MWGroup:
        return MWGroup(self.mw_lattice, self.torsion_invariants())

    # -- automorphisms
    def alpha_matrix(self, node_perm: Sequence[int], comp_images: Sequence[Sequence[int]]) -> list[list[int]] | None:
        """E8 matrix (row convention x -> x A) of the isometry sending root i to
        root node_perm[i] and complement vector j to sum_k comp_images[j][k] c_k;
        None when it does not preserve E8."""
        k = len(self.roots)
        c = len(self.comp)
        blk = [[0] * (k + c) for _ in range(k + c)]
        for i, p in enumerate(node_perm):
            blk[i][p] = 1
        for j in range(c):
            for t in range(c):
                blk[k + j][k + t] = comp_images[j][t]
        a = linalg.matmul(linalg.matmul(self.Minv, blk), self.M)
        if any(Fraction(x).denominator != 1 for row in a for x in row):
            return None
        return [[int(x) for x in row] for row in a]

    def apply(self, A: Sequence[Sequence[int]], x: Sequence[int]) -> tuple[int, ...]:
        return self.canon([sum(x[i] * A[i][j] for i in range(8)) for j in range(8)])


def frame_models(cfg: FiberConfiguration, mw: GramLattice | None = None,
                 tors: Iterable[int] | None = None) -> list[FrameModel]:
    """Frame models for every inequivalent embedding of the fiber blocks of cfg
    into E8, optionally restricted to a given MW lattice and torsion."""
    blocks = [lat.gram_of(root_lattice(f)) for _, f in cfg.reducible()]
    T = lat.direct_sum(*blocks) if blocks else GramLattice()
    want_t = linalg.normalize_torsion(tors) if tors is not None else None
    out = []
    for e in lat.find_embeddings(T, E8, "weyl"):
        fm = FrameModel(cfg, e)
        if want_t is not None and fm.torsion_invariants() != want_t:
            continue
        if mw is not None and not lat.is_isometric(fm.mw_lattice, mw.free_part()):
            continue
        out.append(fm)
    return out


__all__ = [
    "AmbiguousMW", "FrameModel", "MWError", "MWGroup", "SectionClass", "TorsionIncidences",
    "TorsionSolution", "abelian_invariants", "contr_sum", "discriminant_check", "frame_models",
    "height", "mw_from_T", "mw_outcomes", "torsion_incidence_solve", "torsion_test",
]
