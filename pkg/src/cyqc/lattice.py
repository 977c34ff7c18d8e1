"""Exact positive definite lattices given by rational Gram matrices.

Everything is ``Fraction``/``int``; no floating point is used anywhere.  The
main entry points are

* :class:`GramLattice` and :func:`gram_of` / :func:`parse_lattice`,
* :func:`dual`, :func:`vectors_up_to_norm`,
* :func:`find_embeddings`, :func:`orthogonal_complement`, :func:`saturate`,
* :func:`is_isometric`.

Vectors are integer coordinate tuples in the basis of the lattice they live in.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Iterable, Sequence

from . import linalg

Vector = tuple[int, ...]
GramMatrix = tuple[tuple[Fraction, ...], ...]


class LatticeError(ValueError):
    pass


@dataclass(frozen=True)
class GramLattice:
    """A lattice (rational Gram matrix) plus a finite part (invariant factors)."""

    gram: GramMatrix = ()
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        g = linalg.to_fraction_matrix(self.gram)
        n = len(g)
        if any(len(row) != n for row in g):
            raise LatticeError("gram matrix must be square")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(i)):
            raise LatticeError("gram matrix must be symmetric")
        object.__setattr__(self, "gram", g)
        object.__setattr__(self, "torsion", linalg.normalize_torsion(self.torsion))
        den = linalg.common_denominator(g) if g else 1
        object.__setattr__(self, "_int", (tuple(tuple(int(x * den) for x in row) for row in g), den))

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def det(self) -> Fraction:
        return linalg.det(self.gram) if self.gram else Fraction(1)

    @property
    def torsion_order(self) -> int:
        out = 1
        for f in self.torsion:
            out *= f
        return out

    def inner(self, u: Sequence, v: Sequence) -> Fraction:
        ig, den = self._int
        if all(type(x) is int for x in u) and all(type(x) is int for x in v):
            # exact integer path; the scaled Gram matrix is integral
            s = 0
            for i, a in enumerate(u):
                if a:
                    row = ig[i]
                    s += a * sum(row[j] * b for j, b in enumerate(v) if b)
            return Fraction(s, den)
        g = self.gram
        return sum((Fraction(u[i]) * g[i][j] * v[j] for i in range(len(u)) for j in range(len(v))
                    if u[i] and v[j]), Fraction(0))

    def norm(self, v: Sequence) -> Fraction:
        return self.inner(v, v)

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for row in self.gram for x in row)

    def is_positive_definite(self) -> bool:
        try:
            linalg.ldl(self.gram)
        except ValueError:
            return False
        return True

    def free_part(self) -> "GramLattice":
        return GramLattice(self.gram)

    def with_torsion(self, torsion: Iterable[int]) -> "GramLattice":
        return GramLattice(self.gram, tuple(torsion))

    def scaled(self, m) -> "GramLattice":
        m = Fraction(m)
        return GramLattice(tuple(tuple(m * x for x in row) for row in self.gram), self.torsion)

    def __add__(self, other: "GramLattice") -> "GramLattice":
        return direct_sum(self, other)

    def minimum(self) -> Fraction | None:
        """Minimal norm of a nonzero vector (None for rank 0)."""
        if self.rank == 0:
            return None
        bound = min(self.gram[i][i] for i in range(self.rank))
        return min(self.norm(v) for v in vectors_up_to_norm(self, bound))


def direct_sum(*parts: GramLattice) -> GramLattice:
    n = sum(p.rank for p in parts)
    g = [[Fraction(0)] * n for _ in range(n)]
    off = 0
    tors: list[int] = []
    for p in parts:
        for i in range(p.rank):
            for j in range(p.rank):
                g[off + i][off + j] = p.gram[i][j]
        off += p.rank
        tors.extend(p.torsion)
    return GramLattice(tuple(map(tuple, g)), tuple(tors))


# ---------------------------------------------------------------- root lattices

def cartan_a(n: int) -> list[list[int]]:
    return [[2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(n)] for i in range(n)]


def cartan_d(n: int) -> list[list[int]]:
    # chain 0-1-...-(n-2), node n-1 attached to node n-3
    g = cartan_a(n)
    if n >= 2:
        g[n - 1][n - 2] = g[n - 2][n - 1] = 0
    if n >= 3:
        g[n - 1][n - 3] = g[n - 3][n - 1] = -1
    return g


def cartan_e(n: int) -> list[list[int]]:
    # chain 0-1-...-(n-2), node n-1 attached to node 2
    g = cartan_a(n)
    g[n - 1][n - 2] = g[n - 2][n - 1] = 0
    g[n - 1][2] = g[2][n - 1] = -1
    return g


@dataclass(frozen=True)
class Summand:
    """One block of a :class:`RootLatticeSpec`.

    ``symbol`` is one of ``A``, ``D``, ``E`` (with ``n``), ``U`` (rank one
    with Gram ``[[q]]``), ``G`` (explicit ``block``) or ``S`` (a nested spec in
    ``inner``).  The block is dualized first, then scaled, then repeated
    ``count`` times.
    """

    symbol: str
    n: int = 0
    q: Fraction | None = None
    block: GramMatrix | None = None
    inner: "RootLatticeSpec | None" = None
    dual: bool = False
    scale: Fraction = Fraction(1)
    count: int = 1

    def base(self) -> GramLattice:
        if self.symbol == "A":
            g = GramLattice(cartan_a(self.n))
        elif self.symbol == "D":
            g = GramLattice(cartan_d(self.n))
        elif self.symbol == "E":
            g = GramLattice(cartan_e(self.n))
        elif self.symbol == "U":
            g = GramLattice(((self.q,),))
        elif self.symbol == "G":
            g = GramLattice(self.block)
        elif self.symbol == "S":
            g = gram_of(self.inner)
        else:
            raise LatticeError(f"unknown summand symbol {self.symbol!r}")
        if self.dual:
            g = dual(g)
        if self.scale != 1:
            g = g.scaled(self.scale)
        return g

    def text(self) -> str:
        if self.symbol in "ADE":
            core = f"{self.symbol}{self.n}"
        elif self.symbol == "U":
            q = Fraction(self.q)
            core = f"U{q.numerator}/{q.denominator}"
        elif self.symbol == "G":
            rows = ",".join("[" + ",".join(str(x) for x in row) + "]" for row in self.block)
            core = f"[{rows}]"
        else:
            core = f"({format_spec(self.inner)})"
        if self.dual:
            core = f"dual({core[1:-1] if core.startswith('(') else core})"
        if self.scale != 1:
            core = f"{self.scale}*{core}"
        if self.count != 1:
            core = f"{core}^{self.count}"
        return core


@dataclass(frozen=True)
class RootLatticeSpec:
    summands: tuple[Summand, ...] = ()


def gram_of(spec: RootLatticeSpec | str) -> GramLattice:
    """Block diagonal Gram matrix of a spec; blocks are sorted canonically."""
    if isinstance(spec, str):
        spec = parse_lattice(spec)
    blocks = []
    for s in sorted(spec.summands, key=lambda s: s.text()):
        b = s.base()
        blocks.extend([b] * s.count)
    return direct_sum(*blocks) if blocks else GramLattice()


_TOKEN = re.compile(r"\s*(dual\(|\(|\)|\+|\*|\^|\[\[[^\]]*\](?:,\[[^\]]*\])*\]|[ADE]\d+|U-?\d+(?:/\d+)?|\d+(?:/\d+)?)")


def _tokenize(text: str) -> list[str]:
    pos = 0
    out = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise LatticeError(f"cannot parse lattice spec {text!r} at position {pos}")
        out.append(m.group(1))
        pos = m.end()
    return out


def parse_lattice(text: str) -> RootLatticeSpec:
    """Parse the summand grammar, e.g. ``"dual(D4)+U1/4"`` or ``"2*dual(A3)"``.

    Extensions beyond the bare grammar: ``0`` is the zero lattice, ``X^k``
    repeats a summand, ``[[a,b],[c,d]]`` is an explicit Gram block, a scale
    prefix may be rational (``1/6*[[2,1],[1,2]]``) and parentheses group.
    """
    toks = _tokenize(text)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else None

    def take(expected=None):
        nonlocal pos
        t = peek()
        if t is None or (expected is not None and t != expected):
            raise LatticeError(f"malformed lattice spec {text!r}")
        pos += 1
        return t

    def parse_sum() -> list[Summand]:
        items = parse_term()
        while peek() == "+":
            take("+")
            items += parse_term()
        return items

    def parse_term() -> list[Summand]:
        scale = Fraction(1)
        t = peek()
        if t is not None and re.fullmatch(r"\d+(?:/\d+)?", t) and pos + 1 < len(toks) and toks[pos + 1] == "*":
            scale = Fraction(take())
            take("*")
        s = parse_atom()
        if s is None:
            return []
        if scale != 1:
            s = _rescale(s, scale)
        if peek() == "^":
            take("^")
            k = int(take())
            s = Summand(s.symbol, s.n, s.q, s.block, s.inner, s.dual, s.scale, s.count * k)
        return [s]

    def parse_atom() -> Summand | None:
        t = take()
        if t == "0":
            return None
        if t == "dual(":
            inner = parse_sum()
            take(")")
            if len(inner) == 1 and inner[0].count == 1 and not inner[0].dual and inner[0].scale == 1:
                s = inner[0]
                return Summand(s.symbol, s.n, s.q, s.block, s.inner, True)
            return Summand("S", inner=RootLatticeSpec(tuple(inner)), dual=True)
        if t == "(":
            inner = parse_sum()
            take(")")
            if len(inner) == 1:
                return inner[0]
            return Summand("S", inner=RootLatticeSpec(tuple(inner)))
        if t[0] in "ADE" and t[1:].isdigit():
            n = int(t[1:])
            ok = (t[0] == "A" and n >= 1) or (t[0] == "D" and n >= 4) or (t[0] == "E" and n in (6, 7, 8))
            if not ok:
                raise LatticeError(f"unsupported root lattice {t}")
            return Summand(t[0], n)
        if t[0] == "U":
            return Summand("U", q=Fraction(t[1:]))
        if t.startswith("[["):
            rows = re.findall(r"\[([^\[\]]*)\]", t)
            block = tuple(tuple(Fraction(x) for x in r.split(",")) for r in rows)
            return Summand("G", block=GramLattice(block).gram)
        raise LatticeError(f"unexpected token {t!r} in {text!r}")

    summands = parse_sum()
    if pos != len(toks):
        raise LatticeError(f"trailing input in lattice spec {text!r}")
    return RootLatticeSpec(tuple(summands))


def _rescale(s: Summand, scale: Fraction) -> Summand:
    if s.scale != 1 or s.count != 1:
        return Summand("S", inner=RootLatticeSpec((s,)), scale=scale)
    return Summand(s.symbol, s.n, s.q, s.block, s.inner, s.dual, scale, 1)


def format_spec(spec: RootLatticeSpec) -> str:
    if not spec.summands:
        return "0"
    return "+".join(s.text() for s in sorted(spec.summands, key=lambda s: s.text()))


def lattice(text: str, torsion: Iterable[int] = ()) -> GramLattice:
    """Shorthand: parse a spec and attach torsion."""
    return gram_of(parse_lattice(text)).with_torsion(torsion)


# ---------------------------------------------------------------- core operations

def dual(L: GramLattice) -> GramLattice:
    """Gram matrix of the dual basis.  Torsion is carried along unchanged."""
    if L.rank == 0:
        return L
    try:
        inv = linalg.inverse(L.gram)
    except ZeroDivisionError:
        raise LatticeError("degenerate lattice") from None
    return GramLattice(inv, L.torsion)


def _scaled_int_gram(gram: GramMatrix) -> tuple[list[list[int]], int]:
    den = linalg.common_denominator(gram)
    return [[int(x * den) for x in row] for row in gram], den


@lru_cache(maxsize=4096)
def _short_vectors(gram: GramMatrix, bound: Fraction) -> tuple[Vector, ...]:
    n = len(gram)
    if n == 0 or bound <= 0:
        return ()
    d, u = linalg.ldl(gram)
    out: list[Vector] = []
    x = [0] * n

    def rec(i: int, remaining: Fraction) -> None:
        c = sum((u[i][j] * x[j] for j in range(i + 1, n) if x[j]), Fraction(0))
        r = remaining / d[i]
        s = linalg.floor_sqrt(r)
        lo = (-c - s - 1).__floor__()
        hi = (-c + s + 1).__ceil__()
        while lo <= hi and (lo + c) ** 2 > r:
            lo += 1
        while hi >= lo and (hi + c) ** 2 > r:
            hi -= 1
        for xi in range(lo, hi + 1):
            x[i] = xi
            used = d[i] * (xi + c) ** 2
            if i == 0:
                out.append(tuple(x))
            else:
                rec(i - 1, remaining - used)
        x[i] = 0

    rec(n - 1, Fraction(bound))
    zero = (0,) * n
    return tuple(sorted(v for v in out if v != zero))


def vectors_up_to_norm(L: GramLattice, bound) -> list[Vector]:
    """All nonzero v with norm(v) <= bound, sorted lexicographically.

    Fincke-Pohst enumeration with exact rational bounds.
    """
    if L.rank == 0:
        return []
    return list(_short_vectors(L.gram, Fraction(bound)))


def vectors_of_norm(L: GramLattice, value) -> list[Vector]:
    value = Fraction(value)
    return [v for v in vectors_up_to_norm(L, value) if L.norm(v) == value]


def norm_profile(L: GramLattice, bound=4) -> tuple[tuple[Fraction, int], ...]:
    return _norm_profile(L.gram, Fraction(bound))


@lru_cache(maxsize=4096)
def _norm_profile(gram: GramMatrix, bound: Fraction) -> tuple[tuple[Fraction, int], ...]:
    L = GramLattice(gram)
    counts: dict[Fraction, int] = {}
    for v in vectors_up_to_norm(L, bound):
        q = L.norm(v)
        counts[q] = counts.get(q, 0) + 1
    return tuple(sorted(counts.items()))


@dataclass(frozen=True)
class Embedding:
    """Images (ambient coordinates) of the source basis vectors."""

    images: tuple[Vector, ...]
    source: GramLattice
    ambient: GramLattice

    def __post_init__(self):
        got = linalg.congruent(self.images, self.ambient.gram)
        if tuple(got) != self.source.gram:
            raise LatticeError("embedding images do not reproduce the source Gram matrix")


# --- symmetry helpers used by find_embeddings


def _gram_permutations(gram: GramMatrix) -> list[tuple[int, ...]]:
    """Coordinate permutations p with gram[p[i]][p[j]] == gram[i][j]."""
    n = len(gram)
    out = []
    perm = [-1] * n
    used = [False] * n

    def rec(i):
        if i == n:
            out.append(tuple(perm))
            return
        for k in range(n):
            if used[k] or gram[k][k] != gram[i][i]:
                continue
            if any(gram[perm[j]][k] != gram[j][i] for j in range(i)):
                continue
            used[k] = True
            perm[i] = k
            rec(i + 1)
            used[k] = False
        perm[i] = -1

    rec(0)
    return out


@lru_cache(maxsize=256)
def reflective_vectors(gram: GramMatrix, bound: Fraction = Fraction(4)) -> tuple[Vector, ...]:
    """Vectors v (up to sign) of norm <= bound whose reflection preserves the lattice.

    This set is closed under every automorphism, so the group it generates
    contains the reflections of its own root system.
    """
    L = GramLattice(gram)
    out = []
    for v in vectors_up_to_norm(L, bound):
        if next(x for x in v if x) < 0:
            continue
        nv = L.norm(v)
        gv = [sum(gram[i][j] * v[j] for j in range(len(v))) for i in range(len(v))]
        if all((2 * x / nv).denominator == 1 for x in gv):
            out.append(v)
    return tuple(out)


class _Reflector:
    """Integer reflections of one lattice, with precomputed Gram products."""

    def __init__(self, L: GramLattice, roots: Sequence[Vector] | None = None):
        self.gram, self.den = _scaled_int_gram(L.gram)
        self.roots = []
        for v in (reflective_vectors(L.gram) if roots is None else roots):
            gv = [sum(self.gram[i][j] * v[j] for j in range(len(v))) for i in range(len(v))]
            nv = sum(a * b for a, b in zip(v, gv))
            self.roots.append((v, gv, nv))

    def ip(self, x: Sequence[int], y: Sequence[int]) -> int:
        g = self.gram
        return sum(x[i] * g[i][j] * y[j] for i in range(len(x)) if x[i] for j in range(len(y)) if y[j])

    def stabilizer(self, fixed: Sequence[Vector]):
        out = []
        for v, gv, nv in self.roots:
            if all(sum(a * b for a, b in zip(w, gv)) == 0 for w in fixed):
                out.append((v, gv, nv))
        return out

    @staticmethod
    def reflect(x: Vector, root) -> Vector:
        v, gv, nv = root
        c = 2 * sum(a * b for a, b in zip(x, gv))
        if c == 0:
            return x
        c //= nv  # exact: the root is reflective
        return tuple(a - c * b for a, b in zip(x, v))


def _orbit_representatives(cands: list[Vector], gens) -> list[Vector]:
    """Lexicographically least member of each orbit of ``gens`` on ``cands``."""
    cand_set = set(cands)
    seen: set[Vector] = set()
    reps = []
    for c in cands:  # cands sorted, so the first unseen member is the least
        if c in seen:
            continue
        reps.append(c)
        stack = [c]
        seen.add(c)
        while stack:
            x = stack.pop()
            for r in gens:
                y = _Reflector.reflect(x, r)
                if y not in seen and y in cand_set:
                    seen.add(y)
                    stack.append(y)
    return reps


def find_embeddings(source: GramLattice, ambient: GramLattice, symmetry: str = "none",
                    limit: int | None = None, roots: Sequence[Vector] | None = None) -> list[Embedding]:
    """Isometric embeddings of ``source`` into ``ambient`` by backtracking.

    The images of the source basis are chosen one at a time among ambient
    vectors of the right norm with the prescribed inner products against the
    earlier images.

    ``symmetry`` selects how much redundancy is removed:

    * ``"none"``: every solution, identified only up to permutations of the
      ambient coordinates that preserve its Gram matrix.
    * ``"first"``: the first image is taken up to the reflection group of the
      ambient (the usual "without loss of generality" first choice); the rest
      are enumerated as for ``"none"``.
    * ``"weyl"``: one representative per orbit of the group generated by the
      reflective vectors of the ambient.  At each step candidates are split
      into orbits of the pointwise stabilizer of the images chosen so far,
      which is generated by the reflections orthogonal to them.

    ``roots`` replaces the reflective vectors by an explicit list of ambient
    vectors whose reflections preserve the ambient lattice; use it when only
    a subgroup of the symmetries may be divided out.
    """
    if symmetry not in ("none", "first", "weyl"):
        raise ValueError(f"unknown symmetry mode {symmetry!r}")
    k = source.rank
    if k == 0:
        return [Embedding((), source, ambient)]
    if k > ambient.rank:
        return []
    S = source.gram
    sint, sden = _scaled_int_gram(S)
    amb_int, aden = _scaled_int_gram(ambient.gram)
    # compare inner products on a common integer scale
    scale = lcm(sden, aden)
    fs, fa = scale // sden, scale // aden
    norms = sorted({S[i][i] for i in range(k)})
    pool = {q: vectors_of_norm(ambient, q) for q in norms}
    gpool = {}
    for q, vs in pool.items():
        for v in vs:
            if v not in gpool:
                gpool[v] = [sum(amb_int[i][j] * v[j] for j in range(len(v))) for i in range(len(v))]
    refl = _Reflector(ambient, roots) if symmetry != "none" else None
    results: list[tuple[Vector, ...]] = []
    chosen: list[Vector] = []

    def rec(i: int) -> bool:
        if i == k:
            results.append(tuple(chosen))
            return limit is not None and len(results) >= limit
        cands = []
        for v in pool[S[i][i]]:
            gv = gpool[v]
            if all(sum(a * b for a, b in zip(chosen[j], gv)) * fa == sint[i][j] * fs for j in range(i)):
                cands.append(v)
        if symmetry == "weyl" or (symmetry == "first" and i == 0):
            cands = _orbit_representatives(cands, refl.stabilizer(chosen))
        for v in cands:
            chosen.append(v)
            stop = rec(i + 1)
            chosen.pop()
            if stop:
                return True
        return False

    rec(0)
    if symmetry != "weyl":
        perms = [p for p in _gram_permutations(ambient.gram) if list(p) != list(range(ambient.rank))]
        if perms:
            canon = {}
            for r in results:
                variants = [r] + [tuple(tuple(v[p[t]] for t in range(len(v))) for v in r) for p in perms]
                key = min(variants)
                canon.setdefault(key, r)
            results = list(canon.values())
    return [Embedding(r, source, ambient) for r in results]


def orthogonal_complement_basis(ambient: GramLattice, images: Sequence[Vector]) -> list[Vector]:
    """Saturated integer basis of {v in ambient : v . w = 0 for w in images}."""
    n = ambient.rank
    if not images:
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]
    m = linalg.matmul(images, ambient.gram)
    basis = linalg.integer_kernel(m)
    return [tuple(b) for b in _reduce_vectors(ambient.gram, basis)]


def orthogonal_complement(e: Embedding) -> GramLattice:
    basis = orthogonal_complement_basis(e.ambient, e.images)
    return GramLattice(linalg.congruent(basis, e.ambient.gram))


def saturation_basis(images: Sequence[Vector], n: int) -> list[Vector]:
    """Basis of (Q-span of images) intersected with Z^n."""
    if not images:
        return []
    perp = linalg.integer_kernel(images)  # y with images . y == 0 (standard dot)
    if not perp:
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]
    return [tuple(b) for b in linalg.integer_kernel(perp)]


def glue_factors(images: Sequence[Vector], closure: Sequence[Vector]) -> tuple[int, ...]:
    """Invariant factors of closure / span(images)."""
    if not images:
        return ()
    coeffs = linalg.solve_left(closure, images)
    ints = [[int(c) for c in row] for row in coeffs]
    assert all(Fraction(c).denominator == 1 for row in coeffs for c in row)
    return linalg.normalize_torsion(linalg.smith_invariants(ints))


def saturate(e: Embedding) -> tuple[Embedding, tuple[int, ...]]:
    """Primitive closure of the image and the glue group closure/image."""
    closure = saturation_basis(e.images, e.ambient.rank)
    closure = [tuple(v) for v in _reduce_vectors(e.ambient.gram, closure)]
    src = GramLattice(linalg.congruent(closure, e.ambient.gram)) if closure else GramLattice()
    return Embedding(tuple(closure), src, e.ambient), glue_factors(e.images, closure)


# ---------------------------------------------------------------- reduction & isometry

def _reduce_vectors(gram: GramMatrix, basis: Sequence[Sequence[int]]) -> list[list[int]]:
    """Pairwise (Gauss) size reduction until no pair can shorten a vector.

    Deterministic and exact; good enough for the small ranks used here.
    """
    b = [list(v) for v in basis]
    k = len(b)
    if k == 0:
        return b
    g = [list(r) for r in linalg.congruent(b, gram)]
    changed = True
    while changed:
        changed = False
        for i in range(k):
            for j in range(k):
                if i == j or g[j][j] == 0:
                    continue
                c = round(g[i][j] / g[j][j])
                if c and 2 * abs(g[i][j]) > g[j][j]:
                    b[i] = [x - c * y for x, y in zip(b[i], b[j])]
                    # update Gram row/column i
                    for t in range(k):
                        if t != i:
                            g[i][t] -= c * g[j][t]
                            g[t][i] = g[i][t]
                    g[i][i] = sum(b[i][s] * gram[s][r] * b[i][r] for s in range(len(b[i])) if b[i][s]
                                  for r in range(len(b[i])) if b[i][r])
                    changed = True
    order = sorted(range(k), key=lambda i: (g[i][i], b[i]))
    out = []
    for i in order:
        v = b[i]
        if next((x for x in v if x), 0) < 0:
            v = [-x for x in v]
        out.append(v)
    return out


def reduced(L: GramLattice) -> GramLattice:
    """Isometric copy of L with a pairwise-reduced basis."""
    if L.rank == 0:
        return L
    basis = _reduce_vectors(L.gram, linalg.identity(L.rank))
    return GramLattice(linalg.congruent(basis, L.gram), L.torsion)


def _isometries(L1: GramLattice, L2: GramLattice):
    """Yield every isometry L1 -> L2 as images of the standard basis of L1."""
    if L1.rank != L2.rank:
        return
    n = L1.rank
    if n == 0:
        yield []
        return
    if L1.det != L2.det:
        return
    basis1 = _reduce_vectors(L1.gram, linalg.identity(n))
    g1 = linalg.congruent(basis1, L1.gram)
    bound = max(g1[i][i] for i in range(n))
    pool: dict[Fraction, list[Vector]] = {}
    for v in vectors_up_to_norm(L2, bound):
        pool.setdefault(L2.norm(v), []).append(v)
    gram2, den2 = L2._int
    g1 = [[x * den2 for x in row] for row in g1]
    gv_cache = {}

    def gv(v):
        r = gv_cache.get(v)
        if r is None:
            r = [sum(gram2[i][j] * v[j] for j in range(n)) for i in range(n)]
            gv_cache[v] = r
        return r

    inv = linalg.inverse(basis1)
    chosen: list[Vector] = []

    def rec(i: int):
        if i == n:
            # chosen are images of basis1; convert to images of the standard basis
            imgs = linalg.matmul(inv, chosen)
            yield [tuple(int(x) for x in row) for row in imgs]
            return
        for v in pool.get(g1[i][i] / den2, []):
            w = gv(v)
            if all(sum(a * b for a, b in zip(chosen[j], w)) == g1[i][j] for j in range(i)):
                chosen.append(v)
                yield from rec(i + 1)
                chosen.pop()

    yield from rec(0)


def find_isometry(L1: GramLattice, L2: GramLattice) -> list[Vector] | None:
    """Images in L2 of the basis of L1 realizing an isometry, or None."""
    return next(_isometries(L1, L2), None)


def automorphisms(L: GramLattice) -> list[tuple[Vector, ...]]:
    """All isometries of L onto itself (rows are images of the basis vectors)."""
    return [tuple(a) for a in _isometries(L, L)]


def is_isometric(L1: GramLattice, L2: GramLattice) -> bool:
    """Exact isometry test (free parts) plus equality of torsion invariants."""
    if L1.torsion != L2.torsion or L1.rank != L2.rank:
        return False
    if L1.rank == 0:
        return True
    if L1.det != L2.det:
        return False
    if norm_profile(L1) != norm_profile(L2):
        return False
    return find_isometry(L1, L2) is not None


def minimal_vectors(L: GramLattice) -> list[Vector]:
    mu = L.minimum()
    return [] if mu is None else vectors_of_norm(L, mu)


def unimodular_transform(L: GramLattice, u: Sequence[Sequence[int]]) -> GramLattice:
    """Gram matrix of L in the basis given by the rows of ``u``."""
    if abs(linalg.det(u)) != 1:
        raise LatticeError("transform is not unimodular")
    return GramLattice(linalg.congruent(u, L.gram), L.torsion)


def identify(L: GramLattice, names: Iterable[str]) -> str | None:
    """First name in ``names`` whose lattice is isometric to the free part of L."""
    free = L.free_part()
    for n in names:
        g = _named_lattice(n)
        if g.rank == free.rank and g.det == free.det and is_isometric(g, free):
            return n
    return None


@lru_cache(maxsize=None)
def _named_lattice(name: str) -> GramLattice:
    return lattice(name)


def describe(L: GramLattice) -> str:
    rows = ";".join(",".join(str(x) for x in row) for row in L.gram)
    tors = "".join(f"+Z{t}" for t in L.torsion)
    return f"[{rows}]{tors}" if L.rank else (tors[1:] if tors else "0")


__all__ = [
    "Embedding", "GramLattice", "automorphisms", "LatticeError", "RootLatticeSpec", "Summand", "direct_sum", "dual",
    "find_embeddings", "find_isometry", "format_spec", "gram_of", "is_isometric", "lattice",
    "describe", "identify", "minimal_vectors", "norm_profile", "orthogonal_complement", "orthogonal_complement_basis",
    "parse_lattice", "reduced", "saturate", "vectors_of_norm", "vectors_up_to_norm",
]
