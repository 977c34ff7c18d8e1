"""Kodaira fiber types: Euler numbers, root lattices, contributions to the
height pairing, base change of order m, deficiencies and Weierstrass typing."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from . import lattice as lat
from .lattice import GramLattice, RootLatticeSpec, Summand

KINDS = ("I", "I*", "II", "III", "IV", "IV*", "III*", "II*")
_EULER = {"II": 2, "III": 3, "IV": 4, "IV*": 8, "III*": 9, "II*": 10}
_ROOT = {"III": ("A", 1), "IV": ("A", 2), "IV*": ("E", 6), "III*": ("E", 7), "II*": ("E", 8)}


class FiberError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class KodairaFiber:
    kind: str
    n: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise FiberError(f"unknown fiber kind {self.kind!r}")
        if self.kind not in ("I", "I*") and self.n:
            raise FiberError(f"fiber {self.kind} takes no parameter")
        if self.n < 0:
            raise FiberError("fiber parameter must be non-negative")

    def __str__(self) -> str:
        if self.kind == "I":
            return f"I{self.n}"
        if self.kind == "I*":
            return f"I{self.n}*"
        return self.kind

    @property
    def smooth(self) -> bool:
        return self.kind == "I" and self.n == 0


I0 = KodairaFiber("I", 0)


def I(n: int) -> KodairaFiber:  # noqa: E743
    return KodairaFiber("I", n)


def Istar(n: int) -> KodairaFiber:
    return KodairaFiber("I*", n)


def parse_fiber(token: str) -> KodairaFiber:
    t = token.strip()
    m = re.fullmatch(r"I(\d+)(\*?)", t)
    if m:
        return KodairaFiber("I*" if m.group(2) else "I", int(m.group(1)))
    if t in KINDS:
        return KodairaFiber(t)
    raise FiberError(f"cannot parse fiber token {token!r}")


def euler(f: KodairaFiber) -> int:
    if f.kind == "I":
        return f.n
    if f.kind == "I*":
        return f.n + 6
    return _EULER[f.kind]


def root_lattice(f: KodairaFiber) -> RootLatticeSpec:
    if f.kind == "I":
        return RootLatticeSpec((Summand("A", f.n - 1),) if f.n >= 2 else ())
    if f.kind == "I*":
        return RootLatticeSpec((Summand("D", f.n + 4),))
    if f.kind == "II":
        return RootLatticeSpec()
    sym, n = _ROOT[f.kind]
    return RootLatticeSpec((Summand(sym, n),))


def root_rank(f: KodairaFiber) -> int:
    return sum(s.n * s.count for s in root_lattice(f).summands)


# ---------------------------------------------------------------- components
#
# Labels: 0 is the neutral component.  For I_n the labels 1..n-1 run around
# the cycle.  For every other reducible type label k >= 1 is node k-1 of the
# Cartan matrix built in ``lattice`` (A_n chain; D_N chain 0..N-2 with node N-1
# on node N-3; E_N chain 0..N-2 with node N-1 on node 2).  For I_n* this makes
# label 1 the near end (contr 1) and labels N-1, N the two far ends.


@lru_cache(maxsize=None)
def _inverse_cartan(f: KodairaFiber) -> tuple[tuple[Fraction, ...], ...]:
    g = lat.gram_of(root_lattice(f))
    return lat.dual(g).gram if g.rank else ()


def components(f: KodairaFiber) -> tuple[int, ...]:
    """All component labels (neutral 0 first)."""
    if f.kind == "I":
        return tuple(range(max(f.n, 1)))
    return tuple(range(root_rank(f) + 1))


@lru_cache(maxsize=None)
def multiplicities(f: KodairaFiber) -> tuple[int, ...]:
    """Multiplicity of each component, read off from the highest root.

    The neutral component has multiplicity 1 and a simple node has the
    coefficient of the highest root of the associated root system.
    """
    g = lat.gram_of(root_lattice(f))
    if g.rank == 0:
        return (1,) * len(components(f))
    roots = lat.vectors_of_norm(g, 2)
    positive = [r for r in roots if all(c >= 0 for c in r)]
    top = max(positive, key=lambda r: (sum(r), r))
    return (1,) + tuple(top)


def section_components(f: KodairaFiber) -> tuple[int, ...]:
    """Components a section can meet: those of multiplicity one."""
    return tuple(i for i, mult in zip(components(f), multiplicities(f)) if mult == 1)


def _check_index(f: KodairaFiber, i: int) -> None:
    if not isinstance(i, int) or i not in components(f):
        raise FiberError(f"invalid component index {i!r} for fiber {f}")


def contr(f: KodairaFiber, i: int, j: int) -> Fraction:
    """Fiber contribution to the height pairing (inverse Cartan entry)."""
    _check_index(f, i)
    _check_index(f, j)
    if i == 0 or j == 0:
        return Fraction(0)
    if f.kind == "I":
        a, b = min(i, j), max(i, j)
        return Fraction(a * (f.n - b), f.n)
    return _inverse_cartan(f)[i - 1][j - 1]


# ---------------------------------------------------------------- base change

_CYCLES = {
    "II": ("I0", "II", "IV", "I0*", "IV*", "II*"),
    "III": ("I0", "III", "I0*", "III*"),
    "IV": ("I0", "IV", "IV*"),
    "IV*": ("I0", "IV*", "IV"),
    "III*": ("I0", "III*", "I0*", "III"),
    "II*": ("I0", "II*", "IV*", "I0*", "IV", "II"),
}


def pullback(f: KodairaFiber, m: int) -> KodairaFiber:
    """Fiber over a totally ramified point of a degree m cyclic base change."""
    if m < 1:
        raise FiberError("base change order must be positive")
    if f.kind == "I":
        return I(m * f.n)
    if f.kind == "I*":
        return I(m * f.n) if m % 2 == 0 else Istar(m * f.n)
    cycle = _CYCLES[f.kind]
    return parse_fiber(cycle[m % len(cycle)])


def deficiency(f: KodairaFiber, m: int, ramified: bool) -> int:
    """Euler number of f minus the total over its preimages."""
    chi = euler(f)
    if not ramified or f.kind == "I":
        return (1 - m) * chi
    if f.kind == "I*":
        delta = m % 2
        return (1 - m) * chi + 6 * (m - delta)
    if f.kind in ("II", "III", "IV"):
        delta = m % (12 // chi)
        return (1 - delta) * chi
    eps = (m - 1) % (12 // (12 - chi))
    return eps * (12 - chi)


# ---------------------------------------------------------------- configurations

@dataclass(frozen=True)
class FiberConfiguration:
    """Multiset of singular fibers with optional marked fibers over 0 and inf."""

    fibers: tuple[KodairaFiber, ...]
    at_zero: int | None = None
    at_infinity_index: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "fibers", tuple(self.fibers))
        for idx in (self.at_zero, self.at_infinity_index):
            if idx is not None and not 0 <= idx < len(self.fibers):
                raise FiberError("marked fiber index out of range")
        if self.at_zero is not None and self.at_zero == self.at_infinity_index:
            raise FiberError("a fiber cannot sit over both 0 and infinity")

    @property
    def f0(self) -> KodairaFiber:
        return self.fibers[self.at_zero] if self.at_zero is not None else I0

    @property
    def at_infinity(self) -> KodairaFiber:
        return self.fibers[self.at_infinity_index] if self.at_infinity_index is not None else I0

    @property
    def euler_total(self) -> int:
        return sum(euler(f) for f in self.fibers)

    def singular(self) -> tuple[KodairaFiber, ...]:
        return tuple(f for f in self.fibers if not f.smooth)

    def unramified(self) -> list[KodairaFiber]:
        marked = {self.at_zero, self.at_infinity_index}
        return [f for i, f in enumerate(self.fibers) if i not in marked and not f.smooth]

    def reducible(self) -> list[tuple[int, KodairaFiber]]:
        return [(i, f) for i, f in enumerate(self.fibers) if root_rank(f) > 0]

    def root_spec(self) -> RootLatticeSpec:
        parts: list[Summand] = []
        for f in self.fibers:
            parts.extend(root_lattice(f).summands)
        return RootLatticeSpec(tuple(parts))

    def T(self) -> GramLattice:
        return lat.gram_of(self.root_spec())

    def validate(self) -> None:
        if self.euler_total != 12:
            raise FiberError(f"Euler numbers sum to {self.euler_total}, expected 12: {format_config(self)}")

    def multiset(self) -> tuple[tuple[str, int], ...]:
        counts: dict[KodairaFiber, int] = {}
        for f in self.singular():
            counts[f] = counts.get(f, 0) + 1
        return tuple((str(f), c) for f, c in sorted(counts.items(), key=lambda kv: _sort_key(kv[0])))


def _sort_key(f: KodairaFiber):
    # big fibers first, then by name; deterministic
    return (-euler(f), KINDS.index(f.kind), -f.n)


def config(fibers: Iterable[KodairaFiber | str], at_zero: int | None = None,
           at_infinity: int | None = None) -> FiberConfiguration:
    fs = tuple(parse_fiber(f) if isinstance(f, str) else f for f in fibers)
    return FiberConfiguration(fs, at_zero, at_infinity)


def parse_config(text: str, strict: bool = True) -> FiberConfiguration:
    """Parse ``"IV*@0,I1x4"`` style strings (also accepts ``4I1`` and braces)."""
    body = text.strip().strip("{}").strip()
    if not body:
        raise FiberError("empty configuration")
    fibers: list[KodairaFiber] = []
    at_zero = at_inf = None
    for raw in body.split(","):
        tok = raw.strip()
        mark = None
        if "@" in tok:
            tok, mark = tok.split("@", 1)
            mark = mark.strip()
            if mark not in ("0", "inf"):
                raise FiberError(f"unknown marker @{mark} in {text!r}")
        tok = tok.strip()
        count = 1
        m = re.fullmatch(r"(.+?)x(\d+)", tok)
        if m:
            tok, count = m.group(1), int(m.group(2))
        else:
            m = re.fullmatch(r"(\d+)\s*(I.*|II.*|III.*|IV.*)", tok)
            if m:
                count, tok = int(m.group(1)), m.group(2)
        f = parse_fiber(tok)
        if mark is not None:
            if count != 1:
                raise FiberError("a marked fiber must have count 1")
            if mark == "0":
                if at_zero is not None:
                    raise FiberError("two fibers marked @0")
                at_zero = len(fibers)
            else:
                if at_inf is not None:
                    raise FiberError("two fibers marked @inf")
                at_inf = len(fibers)
        fibers.extend([f] * count)
    cfg = FiberConfiguration(tuple(fibers), at_zero, at_inf)
    if strict:
        cfg.validate()
    return cfg


def format_config(cfg: FiberConfiguration) -> str:
    """Canonical text: marked fibers first, then the rest grouped by type."""
    parts = []
    if cfg.at_zero is not None:
        parts.append(f"{cfg.f0}@0")
    if cfg.at_infinity_index is not None:
        parts.append(f"{cfg.at_infinity}@inf")
    counts: dict[KodairaFiber, int] = {}
    marked = {cfg.at_zero, cfg.at_infinity_index}
    for i, f in enumerate(cfg.fibers):
        if i not in marked:
            counts[f] = counts.get(f, 0) + 1
    for f in sorted(counts, key=_sort_key):
        c = counts[f]
        parts.append(f"{f}x{c}" if c > 1 else str(f))
    return ",".join(parts)


def paper_config(cfg: FiberConfiguration) -> str:
    """Table-style multiset text, e.g. ``2I4, I2, 2I1``."""
    out = []
    for name, c in cfg.multiset():
        out.append(f"{c}{name}" if c > 1 else name)
    return ", ".join(out)


# ---------------------------------------------------------------- suitability

@dataclass
class SuitabilityReport:
    ok: bool
    m: int
    f0: KodairaFiber
    f_inf: KodairaFiber
    d_f0: int
    d_f0_required: int
    d_f_inf: int
    d_unramified: int
    total: int
    reasons: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def check_suitable_quotient(cfg: FiberConfiguration, m: int) -> SuitabilityReport:
    """Order-m suitability of a quotient surface: the fiber over infinity is of
    type I_r and the fiber over 0 carries deficiency (m-1)(12 - chi(f0)); the
    deficiencies of all fibers must then add up to zero."""
    f0, finf = cfg.f0, cfg.at_infinity
    d0 = deficiency(f0, m, True) if not f0.smooth else 0
    dinf = deficiency(finf, m, True) if not finf.smooth else 0
    dun = sum(deficiency(f, m, False) for f in cfg.unramified())
    required = (m - 1) * (12 - euler(f0))
    reasons = []
    if m < 2:
        reasons.append("order m must be at least 2")
    if finf.kind != "I":
        reasons.append(f"fiber over infinity is {finf}, not of type I_r")
    if d0 != required:
        reasons.append(f"D(f0) = {d0} but (m-1)(12-chi(f0)) = {required}")
    total = d0 + dinf + dun
    if total != 0:
        reasons.append(f"deficiencies sum to {total}, not 0")
    if cfg.euler_total != 12:
        reasons.append(f"Euler numbers sum to {cfg.euler_total}")
    return SuitabilityReport(not reasons, m, f0, finf, d0, required, dinf, dun, total, reasons)


def candidate_fibers() -> list[KodairaFiber]:
    """Every fiber type that fits on a rational elliptic surface by the two
    global bounds: Euler number at most 12 and root lattice rank at most 8."""
    out = [I(n) for n in range(0, 13)] + [Istar(n) for n in range(0, 7)]
    out += [KodairaFiber(k) for k in ("II", "III", "IV", "IV*", "III*", "II*")]
    return [f for f in out if euler(f) <= 12 and root_rank(f) <= 8]


def suitable_f0_types(m: int) -> list[KodairaFiber]:
    """Solve D(f0) = (m-1)(12 - chi(f0)) over all candidate fiber types."""
    if m < 2:
        raise FiberError("order m must be at least 2")
    sols = [f for f in candidate_fibers() if not f.smooth
            and deficiency(f, m, True) == (m - 1) * (12 - euler(f))]
    return sorted(sols, key=_table3_key)


def _table3_key(f: KodairaFiber):
    order = {"II*": 0, "III*": 1, "IV*": 2, "I*": 3}
    return (order.get(f.kind, 4), -f.n)


# ---------------------------------------------------------------- Weierstrass orders

@dataclass(frozen=True)
class WeierstrassOrders:
    ord_a4: int
    ord_a6: int
    ord_delta: int


INF_ORDER = 10**9  # stands in for an identically vanishing coefficient


def _poly_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _order(p: Sequence[int]) -> int:
    return next((i for i, c in enumerate(p) if c), INF_ORDER)


def orders_from_polynomials(a4: Sequence[int], a6: Sequence[int]) -> WeierstrassOrders:
    """Vanishing orders at t = 0 of A4, A6 and 4 A4^3 + 27 A6^2.

    Coefficient lists start with the constant term.
    """
    a4, a6 = list(a4), list(a6)
    cube = _poly_mul(_poly_mul(a4, a4), a4) if a4 else []
    sq = _poly_mul(a6, a6) if a6 else []
    n = max(len(cube), len(sq))
    delta = [4 * (cube[i] if i < len(cube) else 0) + 27 * (sq[i] if i < len(sq) else 0) for i in range(n)]
    return WeierstrassOrders(_order(a4), _order(a6), _order(delta))


def kodaira_from_orders(w: WeierstrassOrders) -> KodairaFiber:
    """Tate's table in characteristic zero."""
    a, b, d = w.ord_a4, w.ord_a6, w.ord_delta
    if a >= 4 and b >= 6:
        raise FiberError("non-minimal model")
    expected = min(3 * a, 2 * b)
    if d < expected or (3 * a != 2 * b and d != expected):
        raise FiberError("orders inconsistent with the discriminant")
    if d == 0:
        return I0
    if a == 0 and b == 0:
        return I(d)
    if d == 2 and a >= 1 and b == 1:
        return KodairaFiber("II")
    if d == 3 and a == 1 and b >= 2:
        return KodairaFiber("III")
    if d == 4 and a >= 2 and b == 2:
        return KodairaFiber("IV")
    if a >= 2 and b >= 3 and d == 6:
        return Istar(0)
    if a == 2 and b == 3 and d > 6:
        return Istar(d - 6)
    if d == 8 and a >= 3 and b == 4:
        return KodairaFiber("IV*")
    if d == 9 and a == 3 and b >= 5:
        return KodairaFiber("III*")
    if d == 10 and a >= 4 and b == 5:
        return KodairaFiber("II*")
    raise FiberError(f"no Kodaira type for orders {w}")


# ---------------------------------------------------------------- component groups
#
# The components of multiplicity one form a group (the discriminant group of
# the root lattice).  Label k >= 1 stands for the class of the fundamental
# weight of node k-1, and 0 for the trivial class.


@lru_cache(maxsize=None)
def _class_table(f: KodairaFiber) -> dict[tuple[Fraction, ...], int]:
    inv = _inverse_cartan(f)
    out = {}
    for lab in section_components(f):
        w = [0] * len(inv)
        if lab:
            w[lab - 1] = 1
        out[_weight_key(inv, w)] = lab
    return out


def _weight_key(inv, w: Sequence[int]) -> tuple[Fraction, ...]:
    r = len(inv)
    return tuple((sum(w[i] * inv[i][j] for i in range(r)) % 1) for j in range(r))


def _weight(f: KodairaFiber, label: int) -> list[int]:
    if label not in section_components(f):
        raise FiberError(f"component {label} of {f} is not a multiplicity-one component")
    w = [0] * root_rank(f)
    if label:
        w[label - 1] = 1
    return w


def component_class(f: KodairaFiber, weight: Sequence[int]) -> int:
    """Label of the class of a weight given in fundamental-weight coordinates."""
    if root_rank(f) == 0:
        return 0
    return _class_table(f)[_weight_key(_inverse_cartan(f), weight)]


def component_add(f: KodairaFiber, a: int, b: int) -> int:
    if f.kind == "I":
        _check_index(f, a)
        _check_index(f, b)
        return (a + b) % max(f.n, 1)
    wa, wb = _weight(f, a), _weight(f, b)
    return component_class(f, [x + y for x, y in zip(wa, wb)])


def component_mul(f: KodairaFiber, k: int, a: int) -> int:
    out = 0
    step = a if k >= 0 else component_neg(f, a)
    for _ in range(abs(k)):
        out = component_add(f, out, step)
    return out


def component_neg(f: KodairaFiber, a: int) -> int:
    if f.kind == "I":
        return (-a) % max(f.n, 1)
    return component_class(f, [-x for x in _weight(f, a)])


def component_order(f: KodairaFiber, a: int) -> int:
    k, x = 1, a
    while x != 0:
        x = component_add(f, x, a)
        k += 1
    return k


@lru_cache(maxsize=None)
def diagram_automorphisms(f: KodairaFiber) -> tuple[tuple[int, ...], ...]:
    """Relabelings of the components that fix the neutral one and preserve
    the dual graph; each is a tuple p with p[label] = new label."""
    g = lat.gram_of(root_lattice(f))
    if g.rank == 0:
        return (tuple(components(f)),)
    out = []
    for perm in lat._gram_permutations(g.gram):
        out.append((0,) + tuple(p + 1 for p in perm))
    return tuple(sorted(out))


def _perm_order(p: Sequence[int]) -> int:
    k, q = 1, list(p)
    while q != list(range(len(p))):
        q = [p[x] for x in q]
        k += 1
    return k


@dataclass(frozen=True)
class ComponentAction:
    """Action of an automorphism on the components of the reducible fibers.

    ``maps`` holds (source fiber index, target fiber index, relabeling); the
    relabeling is a tuple p with p[label] = label of the image component.
    ``f0_known`` is False when the action on the fiber over 0 was not
    supplied (it is then taken to be the identity and flagged).
    """

    maps: tuple[tuple[int, int, tuple[int, ...]], ...]
    f0_known: bool = True
    provenance: str = ""

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(sorted((int(a), int(b), tuple(p)) for a, b, p in self.maps)))
        srcs = [a for a, _, _ in self.maps]
        tgts = sorted(b for _, b, _ in self.maps)
        if len(set(srcs)) != len(srcs) or sorted(srcs) != tgts:
            raise FiberError("component action must permute the fibers")
        for _, _, p in self.maps:
            if p[0] != 0 or sorted(p) != list(range(len(p))):
                raise FiberError("component action must fix the neutral component")

    def apply(self, inc: dict[int, int]) -> dict[int, int]:
        out = {}
        for a, b, p in self.maps:
            if a in inc:
                out[b] = p[inc[a]]
        return out

    def power(self, k: int) -> "ComponentAction":
        cur = {a: (a, tuple(range(len(p)))) for a, _, p in self.maps}
        step = {a: (b, p) for a, b, p in self.maps}
        for _ in range(k):
            cur = {a: (step[t][0], tuple(step[t][1][x] for x in q)) for a, (t, q) in cur.items()}
        return ComponentAction(tuple((a, t, q) for a, (t, q) in cur.items()), self.f0_known, self.provenance)

    def order(self) -> int:
        k = 1
        while not self.power(k).is_identity():
            k += 1
        return k

    def is_identity(self) -> bool:
        return all(a == b and list(p) == list(range(len(p))) for a, b, p in self.maps)

    def on_fiber(self, idx: int) -> tuple[int, tuple[int, ...]]:
        for a, b, p in self.maps:
            if a == idx:
                return b, p
        raise FiberError(f"fiber {idx} is not acted on")


def cyclic_action(cfg: FiberConfiguration, m: int, f0_perm: Sequence[int] | None = None,
                  provenance: str = "") -> ComponentAction:
    """Order-m action: the reducible unramified fibers are cycled in
    consecutive m-blocks of equal type (S_j -> S_{j+1}, components kept),
    the fiber over 0 is acted on by ``f0_perm`` (identity if None, flagged)."""
    maps = []
    red = cfg.reducible()
    for i, f in red:
        if i == cfg.at_zero:
            p = tuple(f0_perm) if f0_perm is not None else tuple(components(f))
            if len(p) != len(components(f)):
                raise FiberError(f"f0 action has wrong length for {f}")
            maps.append((i, i, p))
    rest = [(i, f) for i, f in red if i not in (cfg.at_zero, cfg.at_infinity_index)]
    if len(rest) % m:
        raise FiberError("unramified reducible fibers do not split into orbits of size m")
    for s in range(0, len(rest), m):
        block = rest[s:s + m]
        if len({f for _, f in block}) != 1:
            raise FiberError("an orbit of unramified fibers mixes fiber types")
        for t in range(m):
            a, f = block[t]
            b, _ = block[(t + 1) % m]
            maps.append((a, b, tuple(components(f))))
    return ComponentAction(tuple(maps), f0_perm is not None or cfg.at_zero is None
                           or root_rank(cfg.f0) == 0, provenance)
