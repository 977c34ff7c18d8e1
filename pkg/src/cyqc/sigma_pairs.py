"""Suitable sigma-pairs (B, alpha_B) obtained by pulling back a suitable
quotient surface along a cyclic base change of order m."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from . import lattice as lat
from . import linalg
from .dataset import Dataset, load_dataset
from .kodaira import (ComponentAction, FiberConfiguration, KodairaFiber, check_suitable_quotient,
                      cyclic_action, format_config, parse_config, pullback, root_rank)
from .lattice import GramLattice, RootLatticeSpec
from .mordell_weil import AmbiguousMW, MWError, MWGroup, mw_from_T


class SigmaPairError(ValueError):
    pass


@dataclass(frozen=True)
class SurfaceCase:
    config: FiberConfiguration
    T: RootLatticeSpec
    mw: MWGroup


@dataclass(frozen=True)
class F0Rule:
    perm: tuple[int, ...] | None
    provenance: str


# Action of alpha_B on the components of f0 of B, keyed by
# (quotient f0, f0 of B, m).  perm[label] is the image label.  None means the
# action is not determined by the worked cases and is left unset.
F0_RULES: dict[tuple[str, str, int], F0Rule] = {
    ("III*", "III", 3): F0Rule((0, 1), "case 8: both components of III preserved"),
    ("III*", "I0*", 2): F0Rule((0, 1, 2, 4, 3), "cases 13, 14: the two far ends of I0* not met by torsion are exchanged"),
    ("IV*", "IV", 2): F0Rule((0, 1, 2), "cases 15-17: components of IV preserved"),
    ("I4*", "I8", 2): F0Rule((0, 7, 6, 5, 4, 3, 2, 1), "case 18: f0 components reflected, k to 8-k"),
    ("I2*", "I4", 2): F0Rule((0, 3, 2, 1), "cases 20-22: f0 components reflected, k to 4-k"),
    ("I1*", "I2", 2): F0Rule((0, 1), "cases 23-27: components of I2 preserved"),
    ("I3*", "I6", 2): F0Rule(None, "case 19: not determined by the worked cases"),
    ("II*", "IV", 4): F0Rule(None, "case 3: not determined by the worked cases"),
    ("II*", "I0*", 3): F0Rule(None, "case 6: not determined by the worked cases"),
    ("II*", "IV*", 2): F0Rule(None, "case 12: not determined by the worked cases"),
}


@dataclass(frozen=True)
class SigmaPairCase:
    id: int | None
    m: int
    quotient: SurfaceCase
    total: SurfaceCase
    fixed_sublattice: GramLattice
    component_action: ComponentAction
    f0_rule: F0Rule | None = None

    @property
    def f0_action_known(self) -> bool:
        return self.component_action.f0_known


def _torsion_contains(big: Sequence[int], small: Sequence[int]) -> bool:
    """Whether the finite abelian group with invariants ``small`` embeds in ``big``."""
    b = sorted(linalg.normalize_torsion(big), reverse=True)
    s = sorted(linalg.normalize_torsion(small), reverse=True)
    if len(s) > len(b):
        return False
    return all(bi % si == 0 for bi, si in zip(b, s))


def total_config(quotient: FiberConfiguration, m: int) -> FiberConfiguration:
    """Fibers of B: the pullback of f0 over 0 and m copies of every other
    singular fiber (kept consecutive, one orbit per block)."""
    fibers: list[KodairaFiber] = []
    at_zero = None
    f0 = pullback(quotient.f0, m)
    if not f0.smooth:
        at_zero = 0
        fibers.append(f0)
    for f in quotient.unramified():
        fibers.extend([f] * m)
    return FiberConfiguration(tuple(fibers), at_zero)


def _mw_with_hint(T, hint: Sequence[int] | None, must_contain: Sequence[int] | None, what: str) -> MWGroup:
    if hint is not None:
        return mw_from_T(T, torsion=hint)[0]
    try:
        return mw_from_T(T)[0]
    except AmbiguousMW as exc:
        if must_contain is None:
            raise
        keep = [g for g in exc.alternatives if _torsion_contains(g.tors, must_contain)]
        if len(keep) != 1:
            raise MWError(f"{what}: cannot decide the Mordell-Weil group among "
                          + "; ".join(g.text() for g in exc.alternatives)) from exc
        return keep[0]


def build_sigma_pair(quotient_config: FiberConfiguration | str, m: int, case_id: int | None = None,
                     quotient_tors: Sequence[int] | None = None) -> SigmaPairCase:
    """Pull back a suitable quotient surface of order m.

    ``quotient_tors`` picks the Mordell-Weil group of the quotient when its
    fiber lattice sits in E8 in several ways.  The torsion of B is then the
    unique candidate containing the pulled-back quotient torsion.
    """
    q = parse_config(quotient_config) if isinstance(quotient_config, str) else quotient_config
    q.validate()
    rep = check_suitable_quotient(q, m)
    if not rep:
        raise SigmaPairError(f"quotient {format_config(q)} is not suitable of order {m}: " + "; ".join(rep.reasons))
    if not q.at_infinity.smooth:
        raise SigmaPairError("the fiber over infinity must be smooth")
    qmw = _mw_with_hint(q.root_spec(), quotient_tors, None, "quotient")
    b = total_config(q, m)
    b.validate()
    bmw = _mw_with_hint(b.root_spec(), None, qmw.tors, "total space")
    if not _torsion_contains(bmw.tors, qmw.tors):
        raise SigmaPairError("torsion of the quotient does not embed in the torsion of B")
    fixed = GramLattice(qmw.lat.scaled(m).gram, qmw.tors)
    rule = None
    perm = None
    if b.at_zero is not None and root_rank(b.f0) > 0:
        rule = F0_RULES.get((str(q.f0), str(b.f0), m))
        if rule is None:
            raise SigmaPairError(f"no f0 action rule for ({q.f0}, {b.f0}, m={m})")
        perm = rule.perm
    action = cyclic_action(b, m, perm, rule.provenance if rule else "")
    return SigmaPairCase(case_id, m, SurfaceCase(q, q.root_spec(), qmw), SurfaceCase(b, b.root_spec(), bmw),
                         fixed, action, rule)


# ---------------------------------------------------------------- Table 4


@dataclass(frozen=True)
class CellDiff:
    case: int
    column: str
    expected: str
    got: str


@dataclass
class Table4Result:
    cases: list[SigmaPairCase]
    cells: list[dict] = field(default_factory=list)
    diffs: list[CellDiff] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.diffs


def _same_group(lattice_text: str, tors: Sequence[int], g: GramLattice, gtors: Sequence[int]) -> bool:
    want = lat.lattice(lattice_text, tors)
    return want.torsion == linalg.normalize_torsion(gtors) and lat.is_isometric(want.free_part(), g.free_part())


_CACHE: dict[tuple, SigmaPairCase] = {}


def case_from_row(row: dict) -> SigmaPairCase:
    key = (row["case"], row["quotient_config"], row["m"], tuple(row["quotient"]["tors"]))
    if key not in _CACHE:
        _CACHE[key] = build_sigma_pair(row["quotient_config"], row["m"], row["case"], row["quotient"]["tors"])
    return _CACHE[key]


def sigma_case(case_id: int, ds: Dataset | None = None) -> SigmaPairCase:
    ds = ds or load_dataset()
    return case_from_row(ds.row(4, "case", case_id))


def regenerate_table4(ds: Dataset | None = None) -> Table4Result:
    """Rebuild all Table 4 rows and compare every derived cell."""
    ds = ds or load_dataset()
    res = Table4Result([])
    for row in ds.rows(4):
        c = case_from_row(row)
        res.cases.append(c)
        cid = row["case"]
        b = c.total
        checks = [
            ("quotient.f0", row["quotient"]["f0"], str(c.quotient.config.f0),
             str(c.quotient.config.f0) == row["quotient"]["f0"]),
            ("quotient.lat", row["quotient"]["lat"], lat.describe(c.quotient.mw.lat),
             _same_group(row["quotient"]["lat"], (), c.quotient.mw.lat, ())),
            ("quotient.tors", str(row["quotient"]["tors"]), str(list(c.quotient.mw.tors)),
             list(c.quotient.mw.tors) == row["quotient"]["tors"]),
            ("total.f0", row["total"]["f0"], str(b.config.f0), str(b.config.f0) == row["total"]["f0"]),
            ("total.lat", row["total"]["lat"], lat.describe(b.mw.lat),
             _same_group(row["total"]["lat"], (), b.mw.lat, ())),
            ("total.tors", str(row["total"]["tors"]), str(list(b.mw.tors)), list(b.mw.tors) == row["total"]["tors"]),
            ("total.T", row["total"]["T"], lat.format_spec(b.T),
             lat.is_isometric(lat.gram_of(row["total"]["T"]), lat.gram_of(b.T))),
        ]
        for col, exp, got, ok in checks:
            res.cells.append({"case": cid, "column": col, "expected": exp, "got": got, "match": ok})
            if not ok:
                res.diffs.append(CellDiff(cid, col, exp, got))
    return res


__all__ = [
    "CellDiff", "F0Rule", "F0_RULES", "SigmaPairCase", "SigmaPairError", "SurfaceCase", "Table4Result",
    "ComponentAction", "build_sigma_pair", "case_from_row", "regenerate_table4", "sigma_case", "total_config",
]
