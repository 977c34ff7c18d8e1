"""Sections of the sigma-pair surfaces: the kernel of Phi_m, its splitting by
the order d of P_m, the image of 1 - alpha for m = 2, and existence
certificates for sections giving a free action on the fiber at infinity.

Two routes are used for the splitting.  The frame route realizes alpha_B as
an isometry of E8 preserving the fiber lattice T and reads the kernel and P_m
off exactly.  The pattern route enumerates incidence patterns of minimal
kernel sections and pushes them through the component action; it serves as a
cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import gcd
from typing import Sequence

from . import lattice as lat
from . import linalg
from .kodaira import (ComponentAction, component_add, contr, diagram_automorphisms, root_rank,
                      section_components)
from .kodaira import _perm_order
from .lattice import GramLattice
from .mordell_weil import (FrameModel, MWError, SectionClass, _lattice_solutions, abelian_invariants,
                           frame_models, height, torsion_incidence_solve)
from .sigma_pairs import SigmaPairCase


class SectionError(ValueError):
    pass


# cases with nontrivial torsion on B and a reducible fiber over 0
D_SPLIT_CANDIDATES = (8, 14, 17, 18, 21, 22, 26, 27)


@dataclass(frozen=True)
class KernelData:
    case_id: int | None
    kernel: GramLattice
    kernel_d1: GramLattice | None = None
    allowed_d: frozenset | None = None
    image_one_minus_alpha: GramLattice | None = None
    image_index: int | None = None
    embeddings: int = 0
    notes: tuple[str, ...] = ()

    @property
    def index(self) -> int | None:
        """[kernel : kernel_d1], counting the torsion parts."""
        if self.kernel_d1 is None:
            return None
        return _group_index(self.kernel, self.kernel_d1)


def _group_index(big: GramLattice, small: GramLattice) -> int:
    if big.rank != small.rank:
        raise SectionError("kernel_d1 is not of finite index in the kernel")
    q = small.det / big.det if big.rank else Fraction(1)
    r = linalg.floor_sqrt(q)
    if r * r != q:
        raise SectionError("determinant ratio is not a square")
    return int(r) * big.torsion_order // small.torsion_order


def _lattice_of_rows(rows: Sequence[Sequence[int]], gram) -> tuple[list[list[int]], GramLattice]:
    """Hermite basis of the row span and its Gram matrix."""
    rows = [list(r) for r in rows if any(r)]
    if not rows:
        return [], GramLattice()
    basis = linalg.hermite_rows(rows)
    return basis, GramLattice(linalg.congruent(basis, gram))


# ---------------------------------------------------------------- kernel by complements

def invariant_complements(case: SigmaPairCase) -> list[GramLattice]:
    """Orthogonal complements of every embedding (up to reflections) of the
    fixed sublattice into the Mordell-Weil lattice of B."""
    fixed = case.fixed_sublattice.free_part()
    mwl = case.total.mw.lat.free_part()
    if fixed.rank == 0:
        return [mwl]
    embs = lat.find_embeddings(fixed, mwl, "weyl")
    if not embs:
        raise SectionError(f"case {case.id}: the fixed sublattice does not embed in the Mordell-Weil lattice")
    return [lat.orthogonal_complement(e) for e in embs]


def kernel_phi_m(case: SigmaPairCase) -> KernelData:
    """ker Phi_m: the orthogonal complement of the alpha-invariants, together
    with all torsion (torsion sections have height 0)."""
    comps = invariant_complements(case)
    first = comps[0]
    for c in comps[1:]:
        if not lat.is_isometric(first, c):
            raise SectionError(f"case {case.id}: complements of the fixed sublattice are not isometric")
    return KernelData(case.id, first.with_torsion(case.total.mw.tors), embeddings=len(comps))


# ---------------------------------------------------------------- orthogonal complement catalogue

@dataclass(frozen=True)
class ComplementIdentity:
    case: int
    source: str
    ambient: str
    expected: str
    tors: tuple[int, ...] = ()
    mode: str = "weyl"
    min_embeddings: int = 1


# fixed sublattice, Mordell-Weil lattice of B and the complement, per case
COMPLEMENT_IDENTITIES: tuple[ComplementIdentity, ...] = (
    ComplementIdentity(4, "A1", "E8", "E7"),
    ComplementIdentity(7, "U3/2", "dual(E7)", "dual(E6)"),
    ComplementIdentity(9, "A2", "E8", "E6"),
    ComplementIdentity(10, "dual(A1)", "dual(D4)+dual(A1)", "dual(D4)"),
    ComplementIdentity(13, "U1", "dual(D4)", "U1^3"),
    ComplementIdentity(15, "2*dual(A2)", "dual(E6)", "D4", mode="first", min_embeddings=3),
    ComplementIdentity(16, "U1/3", "1/6*[[2,1,0,-1],[1,5,3,1],[0,3,6,3],[-1,1,3,5]]", "U1^3"),
    ComplementIdentity(19, "dual(A1)", "dual(A2)+dual(A1)", "dual(A2)"),
    ComplementIdentity(20, "U1^2", "dual(D5)", "U1^3"),
    ComplementIdentity(21, "U1", "dual(A3)", "U1^2", (2,)),
    ComplementIdentity(23, "2*dual(A3)", "dual(E7)", "D4", mode="first", min_embeddings=4),
    ComplementIdentity(24, "U1+dual(A1)", "dual(D4)+dual(A1)", "U1^3"),
    ComplementIdentity(25, "U1/6", "dual(A2)+U1/6", "dual(A2)"),
    ComplementIdentity(26, "dual(A1)", "dual(A1)^3", "dual(A1)^2", (2,)),
    ComplementIdentity(28, "D4", "E8", "D4"),
    ComplementIdentity(29, "U1^3", "dual(D6)", "U1^3"),
    ComplementIdentity(30, "dual(A2)", "dual(A2)^2", "dual(A2)"),
    ComplementIdentity(31, "U1^2", "dual(D4)", "U1^2", (2,)),
    ComplementIdentity(32, "U1", "dual(A1)^2", "U1", (2, 2)),
    ComplementIdentity(33, "dual(A1)", "dual(A1)^2", "dual(A1)", (2,)),
)


@dataclass(frozen=True)
class IdentityResult:
    identity: ComplementIdentity
    embeddings: int
    complements: tuple[str, ...]
    ok: bool
    reason: str = ""


@dataclass
class ComplementReport:
    results: list[IdentityResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def failures(self) -> list[str]:
        return [f"case {r.identity.case}: {r.reason}" for r in self.results if not r.ok]


def check_identity(ident: ComplementIdentity) -> IdentityResult:
    src = lat.gram_of(ident.source)
    amb = lat.gram_of(ident.ambient)
    want = lat.gram_of(ident.expected)
    embs = lat.find_embeddings(src, amb, ident.mode)
    comps = [lat.orthogonal_complement(e) for e in embs]
    texts = tuple(lat.describe(c) for c in comps)
    if len(embs) < ident.min_embeddings:
        return IdentityResult(ident, len(embs), texts, False,
                              f"found {len(embs)} embeddings, expected at least {ident.min_embeddings}")
    bad = [i for i, c in enumerate(comps) if not lat.is_isometric(c, want)]
    if bad:
        return IdentityResult(ident, len(embs), texts, False,
                              f"complement {texts[bad[0]]} of embedding {bad[0] + 1} is not {ident.expected}")
    return IdentityResult(ident, len(embs), texts, True)


def verify_complement_catalogue() -> ComplementReport:
    """Check each complement identity over every embedding found."""
    return ComplementReport([check_identity(i) for i in COMPLEMENT_IDENTITIES])




# ---------------------------------------------------------------- alpha as an isometry of E8

def _mat_pow(A, k):
    n = len(A)
    R = linalg.identity(n)
    for _ in range(k):
        R = linalg.matmul(R, A)
    return [[int(x) for x in row] for row in R]


def _orbit_cycles(action: ComponentAction, skip: set[int]) -> list[list[int]]:
    step = {a: b for a, b, _ in action.maps}
    seen: set[int] = set()
    out = []
    for a, _, _ in action.maps:
        if a in skip or a in seen:
            continue
        cyc = [a]
        seen.add(a)
        b = step[a]
        while b != a:
            cyc.append(b)
            seen.add(b)
            b = step[b]
        out.append(cyc)
    return out


def _compose(p, q):
    """Label map: first p then q."""
    return tuple(q[x] for x in p)


def _inverse(p):
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def _label_actions(case: SigmaPairCase):
    """Every action on fiber components compatible with the orbit structure:
    diagram isomorphisms along each orbit composing to the identity, and on
    the fiber over 0 a diagram automorphism of the prescribed order (any
    order dividing m when the order is not known)."""
    cfg = case.total.config
    act = case.component_action
    m = case.m
    z = cfg.at_zero
    f0_choices: list[tuple[int, ...] | None] = [None]
    if z is not None and root_rank(cfg.f0) > 0:
        autos = diagram_automorphisms(cfg.f0)
        if act.f0_known:
            o = _perm_order(act.on_fiber(z)[1])
            f0_choices = [g for g in autos if _perm_order(g) == o]
        else:
            f0_choices = [g for g in autos if m % _perm_order(g) == 0]
    cycles = _orbit_cycles(act, {z} if z is not None else set())
    per_cycle = []
    for cyc in cycles:
        f = cfg.fibers[cyc[0]]
        autos = diagram_automorphisms(f)
        opts = []
        for gs in product(autos, repeat=len(cyc) - 1):
            total = tuple(range(len(autos[0])))
            for g in gs:
                total = _compose(total, g)
            opts.append(tuple(gs) + (_inverse(total),))
        per_cycle.append(opts)
    for f0 in f0_choices:
        for combo in product(*per_cycle):
            maps = {}
            if f0 is not None:
                maps[z] = (z, f0)
            for cyc, gs in zip(cycles, combo):
                for t, a in enumerate(cyc):
                    maps[a] = (cyc[(t + 1) % len(cyc)], gs[t])
            yield maps


def _node_perm(fm: FrameModel, maps: dict[int, tuple[int, tuple[int, ...]]]) -> list[int]:
    offs = {idx: off for idx, _, off, _, _ in fm.blocks}
    perm = [0] * len(fm.roots)
    for idx, f, off, r, _ in fm.blocks:
        b, p = maps[idx]
        for j in range(r):
            perm[off + j] = offs[b] + p[j + 1] - 1
    return perm


@dataclass
class AlphaFrame:
    """One realization of alpha_B on a frame model, with the kernel data it
    determines."""

    fm: FrameModel
    A: list[list[int]]
    label_maps: dict
    m: int
    S: list[list[int]] = field(default_factory=list)
    kernel_basis: list[list[int]] = field(default_factory=list)  # Mordell-Weil coordinates
    kernel: GramLattice = field(default_factory=GramLattice)
    kernel_d1_basis: list[list[int]] = field(default_factory=list)
    kernel_d1: GramLattice = field(default_factory=GramLattice)
    psi_image: tuple = ()
    allowed_d: frozenset = frozenset()

    def psi(self, x: Sequence[int]) -> tuple[int, ...]:
        """P_m of the section x, a torsion section when x is in the kernel."""
        return self.fm.canon([sum(x[i] * self.S[i][j] for i in range(8)) for j in range(8)])


def invariant_sections(fm: FrameModel, A) -> GramLattice:
    """Lattice part of the group of sections fixed by A (x A = x modulo T).
    Sections fixed only up to a torsion translation do not count."""
    k = len(fm.roots)
    D = [[A[i][j] - int(i == j) for j in range(8)] for i in range(8)]
    DM = linalg.matmul(D, fm.Minv)
    sols = _lattice_solutions(8, [[DM[i][j] for i in range(8)] for j in range(k, 8)],
                              [[DM[i][j] for i in range(8)] for j in range(k)])
    return _lattice_of_rows([fm.mw_coords(x) for x in sols], fm.mw_gram)[1]


def _element_order(fm: FrameModel, t) -> int:
    k, y = 1, tuple(t)
    zero = tuple([0] * 8)
    while y != zero:
        y = fm.add(y, t)
        k += 1
    return k


def _closure(fm: FrameModel, gens) -> list[tuple[int, ...]]:
    zero = tuple([0] * 8)
    seen = {zero}
    frontier = [zero]
    while frontier:
        new = []
        for a in frontier:
            for g in gens:
                b = fm.add(a, g)
                if b not in seen:
                    seen.add(b)
                    new.append(b)
        frontier = new
    return sorted(seen)


def _complete_alpha(af: AlphaFrame) -> None:
    fm, A, m = af.fm, af.A, af.m
    S = [[0] * 8 for _ in range(8)]
    for i in range(m):
        P = _mat_pow(A, i)
        S = [[S[r][c] + P[r][c] for c in range(8)] for r in range(8)]
    af.S = S
    k = len(fm.roots)
    SM = linalg.matmul(S, fm.Minv)
    zero_cols = [[SM[i][j] for i in range(8)] for j in range(k, 8)]
    int_cols = [[SM[i][j] for i in range(8)] for j in range(k)]
    K = _lattice_solutions(8, zero_cols, [])
    K1 = _lattice_solutions(8, zero_cols, int_cols)
    af.kernel_basis, af.kernel = _lattice_of_rows([fm.mw_coords(x) for x in K], fm.mw_gram)
    af.kernel_d1_basis, free1 = _lattice_of_rows([fm.mw_coords(x) for x in K1], fm.mw_gram)
    tors = fm.torsion_elements()
    zero = tuple([0] * 8)
    t1 = [t for t in tors if af.psi(t) == zero]
    af.kernel = af.kernel.with_torsion(fm.torsion_invariants())
    af.kernel_d1 = free1.with_torsion(abelian_invariants(t1, fm.add, zero))
    af.psi_image = tuple(_closure(fm, [af.psi(x) for x in K]))
    af.allowed_d = frozenset(_element_order(fm, t) for t in af.psi_image)


def alpha_realizations(case: SigmaPairCase, fm: FrameModel) -> list[AlphaFrame]:
    """All isometries of E8 of order m that permute the fiber blocks as the
    component action prescribes, fix the torsion, and whose invariant
    Mordell-Weil sublattice is isometric to the fixed sublattice."""
    m = case.m
    fixed = case.fixed_sublattice.free_part()
    c = len(fm.comp)
    comp_autos = lat.automorphisms(GramLattice(fm.comp_gram)) if c else [()]
    ident = linalg.identity(8)
    tors = fm.torsion_elements()
    out = []
    seen = set()
    for maps in _label_actions(case):
        perm = _node_perm(fm, maps)
        for g in comp_autos:
            A = fm.alpha_matrix(perm, g)
            if A is None:
                continue
            key = tuple(map(tuple, A))
            if key in seen:
                continue
            if _mat_pow(A, m) != ident or any(_mat_pow(A, k) == ident for k in range(1, m) if m % k == 0):
                continue
            if any(fm.apply(A, t) != t for t in tors):
                continue
            if not lat.is_isometric(invariant_sections(fm, A), fixed):
                continue
            seen.add(key)
            out.append(AlphaFrame(fm, A, maps, m))
    for af in out:
        _complete_alpha(af)
    return out


_ALPHA_CACHE: dict = {}


def _case_key(case: SigmaPairCase):
    return (case.id, case.m, case.quotient.config, case.total.mw.tors)


def _models(case: SigmaPairCase) -> list[FrameModel]:
    fms = frame_models(case.total.config, case.total.mw.lat, case.total.mw.tors)
    if not fms:
        raise SectionError(f"case {case.id}: no frame model realizes the Mordell-Weil group of B")
    return fms


def alpha_frames(case: SigmaPairCase) -> list[AlphaFrame]:
    key = _case_key(case)
    if key not in _ALPHA_CACHE:
        out = []
        for fm in _models(case):
            out.extend(alpha_realizations(case, fm))
        if not out:
            raise SectionError(f"case {case.id}: no isometry of E8 realizes alpha_B")
        _ALPHA_CACHE[key] = out
    return _ALPHA_CACHE[key]


# ---------------------------------------------------------------- pattern route

@dataclass(frozen=True)
class KernelPattern:
    sigma: int                     # intersection with the zero section
    incidences: tuple[tuple[int, int], ...]
    pm_class: tuple[int, ...]      # torsion class met by P_m, in generator coordinates
    order: int


@dataclass(frozen=True)
class PatternReport:
    case_id: int | None
    minimum: Fraction
    sigma_range: tuple[int, ...]
    patterns: tuple[KernelPattern, ...]
    rejected: int
    allowed_d: frozenset
    solutions: int

    @property
    def determined(self) -> bool:
        """True when every admissible pattern gives the same P_m class."""
        return len({p.pm_class for p in self.patterns}) <= 1


def _class_order(c: Sequence[int], tors: Sequence[int]) -> int:
    o = 1
    for x, t in zip(c, tors):
        k = t // gcd(x % t, t) if x % t else 1
        o = o * k // gcd(o, k)
    return o


def max_self_contr(cfg) -> Fraction:
    return sum((max(contr(f, i, i) for i in section_components(f)) for _, f in cfg.reducible()), Fraction(0))


def pattern_split(case: SigmaPairCase, minimum: Fraction | None = None) -> PatternReport:
    """Incidence patterns of minimal kernel sections and the torsion class
    of P_m for each of them."""
    cfg = case.total.config
    act = case.component_action
    tors = case.total.mw.tors
    if minimum is None:
        minimum = kernel_phi_m(case).kernel.minimum()
    if minimum is None:
        raise SectionError(f"case {case.id}: the kernel has rank 0, no minimal sections")
    sols = torsion_incidence_solve(cfg, tors, act)
    red = cfg.reducible()
    top = max_self_contr(cfg)
    smax = int((minimum - 2 + top) // 2)
    srange = tuple(range(0, max(smax, 0) + 1))
    found: dict = {}
    rejected = 0
    for sol in sols.solutions:
        elems = [(c, dict(inc)) for c, inc in sol.elements]
        nonzero = [(c, inc) for c, inc in elems if any(c)]
        for s in srange:
            want = 2 + 2 * s - minimum
            for combo in product(*[section_components(f) for _, f in red]):
                p = {idx: x for (idx, _), x in zip(red, combo)}
                if sum((contr(f, p[i], p[i]) for i, f in red), Fraction(0)) != want:
                    continue
                ok = True
                for _, inc in nonzero:
                    v = 1 + s - sum((contr(f, p[i], inc[i]) for i, f in red), Fraction(0))
                    if v < 0 or v.denominator != 1:
                        ok = False
                        break
                if not ok:
                    continue
                total = {i: 0 for i, _ in red}
                for k in range(case.m):
                    moved = act.power(k).apply(p)
                    for i, f in red:
                        total[i] = component_add(f, total[i], moved[i])
                match = [c for c, inc in elems if inc == total]
                if not match:
                    rejected += 1
                    continue
                kp = KernelPattern(s, tuple(sorted(p.items())), match[0], _class_order(match[0], tors))
                found[(kp.sigma, kp.incidences, kp.pm_class)] = kp
    pats = tuple(found[k] for k in sorted(found))
    allowed = frozenset({1} | {p.order for p in pats})
    return PatternReport(case.id, minimum, srange, pats, rejected, allowed, len(sols.solutions))


# ---------------------------------------------------------------- splitting

def d_split(case: SigmaPairCase) -> KernelData:
    """Kernel, kernel of P_m restricted to d = 1, and the allowed orders d.

    Candidate cases are computed on every realization of alpha_B as an
    isometry of E8; all realizations must agree.  The incidence patterns of
    minimal kernel sections are checked for consistency with the result.
    """
    base = kernel_phi_m(case)
    if case.id not in D_SPLIT_CANDIDATES:
        return KernelData(case.id, base.kernel, base.kernel, frozenset({1}), embeddings=base.embeddings,
                          notes=("not a candidate for d > 1",))
    frames = alpha_frames(case)
    ref = frames[0]
    for af in frames[1:]:
        if (af.allowed_d != ref.allowed_d or not lat.is_isometric(af.kernel, ref.kernel)
                or not lat.is_isometric(af.kernel_d1, ref.kernel_d1)):
            raise SectionError(f"case {case.id}: realizations of alpha_B disagree on the splitting")
    if not lat.is_isometric(ref.kernel, base.kernel):
        raise SectionError(f"case {case.id}: the kernel on the frame differs from the complement of the invariants")
    notes = [f"{len(frames)} realizations of alpha_B"]
    if ref.kernel.rank:
        pr = pattern_split(case, ref.kernel.minimum())
        if not pr.allowed_d >= ref.allowed_d:
            raise SectionError(f"case {case.id}: incidence patterns miss orders "
                               f"{sorted(ref.allowed_d - pr.allowed_d)}; patterns: {pr.patterns}")
        notes.append(f"{len(pr.patterns)} minimal incidence patterns, orders {sorted(pr.allowed_d)}"
                     + ("" if pr.determined else ", patterns alone do not fix P_m"))
    return KernelData(case.id, ref.kernel, ref.kernel_d1, ref.allowed_d, embeddings=base.embeddings,
                      notes=tuple(notes))


# ---------------------------------------------------------------- image of 1 - alpha

def image_one_minus_alpha_m2(case: SigmaPairCase) -> KernelData:
    """Image of 1 - alpha_B on the Mordell-Weil lattice for m = 2, where alpha
    is +1 on the invariants and -1 on the kernel: twice the projection onto
    the kernel span.  Reports the image and its index in the kernel."""
    if case.m != 2:
        raise SectionError(f"unsupported order m={case.m}: only m = 2 is handled")
    fixed = case.fixed_sublattice.free_part()
    mwl = case.total.mw.lat.free_part()
    gram = mwl.gram
    n = mwl.rank
    results = []
    embs = lat.find_embeddings(fixed, mwl, "weyl") if fixed.rank else [None]
    for e in embs:
        kb = lat.orthogonal_complement_basis(mwl, e.images) if e is not None else linalg.identity(n)
        kb = [list(v) for v in kb]
        if not kb:
            results.append((GramLattice(), GramLattice(), 1))
            continue
        gk = linalg.congruent(kb, gram)
        gk_inv = linalg.inverse(gk)
        rows = []
        for i in range(n):
            ip = [sum(gram[i][t] * kb[j][t] for t in range(n)) for j in range(len(kb))]
            coef = [2 * sum(ip[a] * gk_inv[a][b] for a in range(len(kb))) for b in range(len(kb))]
            if any(Fraction(x).denominator != 1 for x in coef):
                raise SectionError(f"case {case.id}: twice the projection leaves the kernel")
            rows.append([int(x) for x in coef])
        basis, img = _lattice_of_rows(rows, gk)
        kern = GramLattice(gk)
        idx = abs(int(linalg.det(basis))) if len(basis) == len(kb) else 0
        results.append((kern, img, idx))
    idxs = {r[2] for r in results}
    if len(idxs) != 1 or 0 in idxs:
        raise SectionError(f"case {case.id}: image index differs between embeddings: {sorted(idxs)}")
    kern, img, idx = results[0]
    tors = case.total.mw.tors
    return KernelData(case.id, kern.with_torsion(tors), image_one_minus_alpha=img, image_index=idx,
                      embeddings=len(results))


# ---------------------------------------------------------------- kernels inside a frame

@dataclass
class KernelFrame:
    """The kernel of Phi_m placed inside a frame model, with P_m when known."""

    fm: FrameModel
    basis: list[list[int]]        # Mordell-Weil coordinates
    gram: GramLattice
    alpha: AlphaFrame | None = None
    label: str = ""

    def psi(self, x) -> tuple[int, ...]:
        if self.alpha is None:
            return tuple([0] * 8)
        return self.alpha.psi(x)


def complement_roots(fm: FrameModel) -> list[tuple[int, ...]]:
    """Norm 2 vectors of the narrow lattice (the complement of T in E8), in
    Mordell-Weil coordinates; their reflections extend to E8 fixing T."""
    c = len(fm.comp)
    if not c:
        return []
    out = []
    for v in lat.vectors_of_norm(GramLattice(fm.comp_gram), 2):
        if next(x for x in v if x) < 0:
            continue
        x = [sum(v[j] * fm.comp[j][i] for j in range(c)) for i in range(8)]
        out.append(fm.mw_coords(x))
    return out


_KF_CACHE: dict = {}


def kernel_frames(case: SigmaPairCase) -> list[KernelFrame]:
    """Placements of the kernel in frame models.

    Candidate cases use the realizations of alpha_B.  Otherwise P_m vanishes
    on the kernel and the fixed sublattice is embedded in every possible way
    up to reflections in roots of the narrow lattice (which preserve T, the
    torsion and all incidences).
    """
    key = _case_key(case)
    if key in _KF_CACHE:
        return _KF_CACHE[key]
    out = []
    if case.id in D_SPLIT_CANDIDATES:
        seen = set()
        for af in alpha_frames(case):
            k = (id(af.fm), tuple(map(tuple, af.kernel_basis)),
                 tuple(af.psi(fm_lift) for fm_lift in af.fm.mw_lifts))
            if k in seen:
                continue
            seen.add(k)
            out.append(KernelFrame(af.fm, af.kernel_basis, af.kernel.free_part(), af, "alpha"))
    else:
        fixed = case.fixed_sublattice.free_part()
        for fm in _models(case):
            n = fm.mw_lattice.rank
            if fixed.rank == 0:
                basis = linalg.identity(n)
                out.append(KernelFrame(fm, basis, GramLattice(fm.mw_gram), None, "all"))
                continue
            embs = lat.find_embeddings(fixed, fm.mw_lattice, "weyl", roots=complement_roots(fm))
            for e in embs:
                kb = [list(v) for v in lat.orthogonal_complement_basis(fm.mw_lattice, e.images)]
                out.append(KernelFrame(fm, kb, GramLattice(linalg.congruent(kb, fm.mw_gram)), None, "complement"))
    if not out:
        raise SectionError(f"case {case.id}: the kernel cannot be placed in a frame model")
    _KF_CACHE[key] = out
    return out


def _kernel_sections(kf: KernelFrame, bound) -> list[tuple[Fraction, tuple[int, ...], tuple[int, ...]]]:
    """(height, Mordell-Weil coordinates, section) for kernel sections of
    height at most bound, excluding sigma, sorted."""
    fm = kf.fm
    out = []
    if kf.gram.rank == 0:
        for t in fm.torsion_elements():
            if any(t):
                out.append((Fraction(0), (), t))
        return sorted(out)
    for c in lat.vectors_up_to_norm(kf.gram, bound):
        y = tuple(sum(c[i] * kf.basis[i][j] for i in range(len(c))) for j in range(len(kf.basis[0])))
        h = kf.gram.norm(c)
        for x in fm.sections_over(y):
            out.append((h, y, x))
    for t in fm.torsion_elements():
        if any(t):
            out.append((Fraction(0), tuple([0] * fm.mw_lattice.rank), t))
    return sorted(out)


# ---------------------------------------------------------------- groups on the fiber at infinity

def _subgroups(fm: FrameModel) -> list[tuple[tuple[int, ...], ...]]:
    el = fm.torsion_elements()
    subs = set()
    for a in el:
        for b in el:
            subs.add(tuple(_closure(fm, [a, b])))
    return sorted(subs, key=lambda s: (len(s), s))


@dataclass(frozen=True)
class MixedGroup:
    """The group generated by tau, with tau^m the translation by psi, and by
    translations by the torsion subgroup U (which contains psi).  Elements
    are pairs (r, u) standing for tau^r composed with the translation by u,
    0 <= r < m; r != 0 marks an element of the second kind."""

    fm: FrameModel
    m: int
    psi: tuple[int, ...]
    U: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "_sums", {})

    def _uadd(self, x, y):
        key = (x, y)
        out = self._sums.get(key)
        if out is None:
            out = self._sums[key] = self.fm.add(x, y)
        return out

    def add(self, a, b):
        r = a[0] + b[0]
        u = self._uadd(a[1], b[1])
        if r >= self.m:
            r -= self.m
            u = self._uadd(u, self.psi)
        return (r, u)

    @property
    def zero(self):
        return (0, tuple([0] * 8))

    def elements(self) -> list:
        return [(r, u) for r in range(self.m) for u in self.U]

    @property
    def invariants(self) -> tuple[int, ...]:
        return abelian_invariants(self.elements(), self.add, self.zero)

    def subgroup(self, gens) -> list:
        seen = {self.zero}
        frontier = [self.zero]
        while frontier:
            new = []
            for a in frontier:
                for g in gens:
                    b = self.add(a, g)
                    if b not in seen:
                        seen.add(b)
                        new.append(b)
            frontier = new
        return sorted(seen)


def mixed_group(fm: FrameModel, m: int, psi: Sequence[int], H: Sequence) -> tuple[tuple[int, ...], tuple]:
    """Invariants of the group generated by tau and the translations by H,
    and the torsion group U = H + <psi>."""
    U = tuple(_closure(fm, list(H) + [tuple(psi)]))
    g = MixedGroup(fm, m, tuple(psi), U)
    return g.invariants, U


def second_kind_group(case: SigmaPairCase, d: int) -> MixedGroup:
    """The largest group generated by tau with P_m of order d and torsion
    translations that needs at most two generators; a smooth elliptic curve
    carries no free action of a group needing three."""
    if case.id in D_SPLIT_CANDIDATES:
        frames = [(af.fm, af.psi_image) for af in alpha_frames(case)]
    else:
        # P_m vanishes on the kernel; any frame model carries the torsion
        frames = [(fm, [tuple([0] * 8)]) for fm in _models(case)[:1]]
    for fm, image in frames:
        psis = [t for t in image if _element_order(fm, t) == d]
        if not psis:
            continue
        best = None
        for H in _subgroups(fm):
            g = MixedGroup(fm, case.m, psis[0], tuple(_closure(fm, list(H) + [psis[0]])))
            inv = g.invariants
            if len(inv) <= 2:
                size = len(g.U) * case.m
                if best is None or size > best[0]:
                    best = (size, g)
        return best[1]
    raise SectionError(f"case {case.id}: no kernel section with P_m of order {d}")


def group_for(case: SigmaPairCase, d: int) -> tuple[int, ...]:
    return second_kind_group(case, d).invariants


# ---------------------------------------------------------------- certificates

ARGUMENTS = ("minimal_vector", "pigeonhole_4", "pigeonhole_8_case10", "sum_of_orders")


@dataclass(frozen=True)
class ExistenceCertificate:
    case_id: int | None
    d: int
    G: tuple[int, ...]
    argument: str
    witness_sections: tuple[SectionClass, ...]
    pairwise_constraints: tuple[tuple[int | None, ...], ...]
    vectors: tuple[tuple[int, ...], ...] = ()
    claims: tuple[tuple[tuple[int, int], Fraction], ...] = ()
    frames_checked: int = 0
    sigma_forced: bool = False
    notes: tuple[str, ...] = ()


def _sigma_forced(kf: KernelFrame, h: Fraction) -> bool:
    """Whether every section of height h meets sigma trivially: from
    h = 2 + 2 s - sum contr and the largest possible contribution."""
    return h - 2 + max_self_contr(kf.fm.cfg) < 2


def _clique(cands, k, ok):
    chosen: list = []

    def rec(start):
        if len(chosen) == k:
            return True
        for i in range(start, len(cands)):
            c = cands[i]
            if all(ok(c, x) for x in chosen):
                chosen.append(c)
                if rec(i + 1):
                    return True
                chosen.pop()
        return False

    return list(chosen) if rec(0) else None


def _finish(case, d, G, argument, kf: KernelFrame, vecs, constraints, notes, sigma_forced=False):
    fm = kf.fm
    secs = tuple(fm.section_class(v, name) for v, name in vecs)
    claims = []
    for i, (a, _) in enumerate(vecs):
        for j in range(i, len(vecs)):
            b = vecs[j][0]
            claims.append(((i, j), fm.height(a, b)))
    return ExistenceCertificate(case.id, d, tuple(G), argument, secs, tuple(map(tuple, constraints)),
                                tuple(v for v, _ in vecs), tuple(claims), 0, sigma_forced, tuple(notes))


def _constraint_matrix(k: int, free: set = frozenset()) -> list[list[int | None]]:
    return [[-1 if i == j else (None if (i, j) in free or (j, i) in free else 0) for j in range(k)]
            for i in range(k)]


def _shells(kf: KernelFrame, limit: int = 4):
    """Kernel sections grouped by height, smallest first."""
    if kf.gram.rank == 0:
        yield Fraction(0), _kernel_sections(kf, 0)
        return
    mu = kf.gram.minimum()
    bound = mu
    done = set()
    for _ in range(limit):
        secs = _kernel_sections(kf, bound)
        for h in sorted({s[0] for s in secs}):
            if h in done or h == 0:
                continue
            done.add(h)
            yield h, [s for s in secs if s[0] == h]
        bound = bound + mu


def _minimal_vector(case, d, G, kf: KernelFrame):
    fm = kf.fm
    zero = tuple([0] * 8)
    subs = _subgroups(fm)
    for h, secs in _shells(kf):
        for _, y, x in secs:
            p = kf.psi(x)
            if _element_order(fm, p) != d:
                continue
            for H in subs:
                g, U = mixed_group(fm, case.m, p, H)
                if g != tuple(G):
                    continue
                if not all(fm.dot(x, u) == 0 for u in U):
                    continue
                vecs = [(zero, "sigma"), (x, "xi")] + [(u, f"t{i}") for i, u in enumerate(U) if any(u)]
                notes = [f"height {h}", f"torsion translations of order {len(H)}",
                         "m prime: xi disjoint from every translation in <H, P_m(xi)> makes the action free"]
                return _finish(case, d, G, "minimal_vector", kf, vecs, _constraint_matrix(len(vecs)), notes,
                               _sigma_forced(kf, h))
    return None


def _pigeonhole(case, d, G, kf: KernelFrame, size: int, with_torsion: bool, argument: str):
    fm = kf.fm
    zero = tuple([0] * 8)
    U = [t for t in fm.torsion_elements() if any(t)] if with_torsion else []
    for h, secs in _shells(kf):
        cands = [x for _, _, x in secs
                 if fm.sigma_dot(x) == 0 and all(fm.dot(x, u) == 0 for u in U) and kf.psi(x) == zero]
        cl = _clique(cands, size, lambda a, b: fm.dot(a, b) == 0)
        if cl is not None:
            vecs = [(zero, "sigma")] + [(u, f"t{i}") for i, u in enumerate(U)] + \
                   [(x, f"xi{i + 1}") for i, x in enumerate(cl)]
            bad = 4 if not with_torsion else 8
            notes = [f"height {h}",
                     f"{size} distinct points of E[4] avoid sigma{' and the torsion' if U else ''}; "
                     f"only {bad - 1 - len(U)} such points fail to generate a free action"]
            return _finish(case, d, G, argument, kf, vecs, _constraint_matrix(len(vecs)), notes,
                           _sigma_forced(kf, h))
    return None


def _sum_of_orders(case, d, G, kf: KernelFrame):
    """m = 6 with T = 0: a point of order 2 from the anti-invariants of
    alpha^3 and one of order 3 from the kernel of 1 + alpha^2 + alpha^4."""
    fm = kf.fm
    E8 = GramLattice(fm.gram)
    zero = tuple([0] * 8)
    A2 = lat.gram_of("A2")
    D4 = lat.gram_of("D4")
    for n_emb in lat.find_embeddings(A2, E8, "weyl"):
        ker3 = lat.orthogonal_complement_basis(E8, n_emb.images)
        e6 = GramLattice(linalg.congruent(ker3, E8.gram))
        for p_emb in lat.find_embeddings(D4, e6, "weyl"):
            p_imgs = [tuple(sum(c[i] * ker3[i][j] for i in range(len(c))) for j in range(8)) for c in p_emb.images]
            ker2 = lat.orthogonal_complement_basis(E8, p_imgs)
            x2 = min(tuple(sum(c[i] * ker2[i][j] for i in range(len(c))) for j in range(8))
                     for c in lat.vectors_of_norm(GramLattice(linalg.congruent(ker2, E8.gram)), 2))
            x3 = min(tuple(sum(c[i] * ker3[i][j] for i in range(len(c))) for j in range(8))
                     for c in lat.vectors_of_norm(e6, 2))
            if fm.sigma_dot(x2) or fm.sigma_dot(x3):
                return None
            vecs = [(zero, "sigma"), (x2, "xi2"), (x3, "xi3")]
            cons = _constraint_matrix(3, {(1, 2)})
            notes = ["xi2 lies where alpha^3 = -1 and meets f_inf in a point of order 2",
                     "xi3 lies where 1 + alpha^2 + alpha^4 = 0 and meets f_inf in a point of order 3",
                     "their sum meets f_inf in a point of order 6"]
            return _finish(case, d, G, "sum_of_orders", kf, vecs, cons, notes, True)
    return None


def argument_for(case: SigmaPairCase, d: int) -> str:
    if case.m == 6:
        return "sum_of_orders"
    if case.m == 4:
        return "pigeonhole_8_case10" if case.total.mw.tors else "pigeonhole_4"
    return "minimal_vector"


def existence_certificate(case: SigmaPairCase, d: int, G: Sequence[int] | None = None) -> ExistenceCertificate:
    """Witness sections showing that a section with P_m of order d exists
    whose translation composed with alpha_B, together with the torsion
    translations, acts freely on the fiber at infinity.

    The search runs on every placement of the kernel in a frame model; the
    certificate of the first placement is returned.
    """
    G = tuple(G) if G is not None else group_for(case, d)
    arg = argument_for(case, d)
    frames = kernel_frames(case)
    first = None
    for kf in frames:
        if arg == "minimal_vector":
            cert = _minimal_vector(case, d, G, kf)
        elif arg == "pigeonhole_4":
            cert = _pigeonhole(case, d, G, kf, 4, False, arg)
        elif arg == "pigeonhole_8_case10":
            cert = _pigeonhole(case, d, G, kf, 7, True, arg)
        else:
            cert = _sum_of_orders(case, d, G, kf)
        if cert is None:
            raise SectionError(f"case {case.id} d={d}: no {arg} witness on kernel placement {kf.label}")
        if not verify_certificate(cert, kf.fm):
            raise SectionError(f"case {case.id} d={d}: certificate does not re-verify")
        if first is None:
            first = cert
    return ExistenceCertificate(**{**first.__dict__, "frames_checked": len(frames)})


def verify_certificate(cert: ExistenceCertificate, fm: FrameModel) -> bool:
    """Recheck a certificate: intersection numbers against the constraint
    matrix, and every claimed height against 1 + a.sigma + b.sigma - a.b -
    sum of contributions computed from the incidences."""
    vecs = cert.vectors
    cfg = fm.cfg
    for i, a in enumerate(vecs):
        for j, b in enumerate(vecs):
            want = cert.pairwise_constraints[i][j]
            if want is not None and fm.dot(a, b) != want:
                return False
    claims = dict(cert.claims)
    for (i, j), h in claims.items():
        a, b = cert.witness_sections[i], cert.witness_sections[j]
        try:
            got = height(a, b, cfg, None if i == j else fm.dot(vecs[i], vecs[j]))
        except MWError:
            return False
        if got != h:
            return False
    return True


__all__ = [
    "ARGUMENTS", "AlphaFrame", "COMPLEMENT_IDENTITIES", "ComplementIdentity", "ComplementReport",
    "D_SPLIT_CANDIDATES", "ExistenceCertificate", "IdentityResult", "KernelData", "KernelFrame",
    "KernelPattern", "MixedGroup", "PatternReport", "SectionError", "alpha_frames", "alpha_realizations", "argument_for",
    "check_identity", "complement_roots", "d_split", "existence_certificate", "group_for",
    "image_one_minus_alpha_m2", "kernel_frames", "second_kind_group", "kernel_phi_m", "invariant_complements", "mixed_group",
    "pattern_split", "verify_certificate", "verify_complement_catalogue",
]
