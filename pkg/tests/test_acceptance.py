"""The ten acceptance criteria, one test each.

Each test records a PASS/FAIL line that is printed in the pytest terminal
summary (and by running this file directly).  Criteria that the derivation
contradicts on a documented erratum are marked xfail(strict=True): they fail
honestly, and the suite notices if they ever start passing.
"""

import os
import subprocess
import sys
import time
from fractions import Fraction

import pytest

from cyqc import lattice as lat
from cyqc import linalg
from cyqc.kodaira import suitable_f0_types
from cyqc.sections import (
    d_split, existence_certificate, kernel_frames, kernel_phi_m, verify_certificate,
    verify_complement_catalogue,
)
from cyqc.sigma_pairs import case_from_row, regenerate_table4, sigma_case
from cyqc.verify import PASS, run_checks

from conftest import ACCEPTANCE


def record(n: int, ok: bool, detail: str) -> None:
    line = f"AC{n:<2} {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE.append(line)
    print(line)


def _cell_group(cell):
    return lat.lattice(cell["lat"], cell["tors"])


def _same(g, cell) -> bool:
    want = _cell_group(cell)
    return want.torsion == g.torsion and lat.is_isometric(want.free_part(), g.free_part())


# ---------------------------------------------------------------- 1

def test_ac1_minimal_norms():
    t0 = time.perf_counter()
    bad = []
    for n in range(1, 9):
        if lat.dual(lat.gram_of(f"A{n}")).minimum() != Fraction(n, n + 1):
            bad.append(f"A{n}*")
    for n in range(4, 7):
        L = lat.dual(lat.gram_of(f"D{n}"))
        if L.minimum() != 1:
            bad.append(f"D{n}*")
        # the two spinor cosets contribute 2^(n-1) vectors each of norm n/4
        if n > 4 and len(lat.vectors_of_norm(L, Fraction(n, 4))) != 2 ** n:
            bad.append(f"D{n}* norm {n}/4")
    for name, want in (("dual(E6)", Fraction(4, 3)), ("dual(E7)", Fraction(3, 2)), ("E8", Fraction(2))):
        if lat.gram_of(name).minimum() != want:
            bad.append(name)
    dt = time.perf_counter() - t0
    ok = not bad and dt < 5
    record(1, ok, f"minimal norms of A1*..A8*, D4*..D6*, E6*, E7*, E8 in {dt:.2f}s; mismatches: {bad or 'none'}")
    assert ok


# ---------------------------------------------------------------- 2

@pytest.mark.xfail(strict=True, reason="complement of U3/2 in dual(E7) is E6, not dual(E6) (documented erratum)")
def test_ac2_complement_identities():
    t0 = time.perf_counter()
    rep = verify_complement_catalogue()
    dt = time.perf_counter() - t0
    by_case = {r.identity.case: r for r in rep.results}
    counts_ok = (len(rep.results) == 20 and by_case[23].embeddings >= 4 and by_case[15].embeddings >= 3)
    ok = rep.ok and counts_ok and dt < 60
    record(2, ok, f"{sum(r.ok for r in rep.results)}/{len(rep.results)} identities hold in {dt:.1f}s "
                  f"(D4 in dual(E7): {by_case[23].embeddings} embeddings, D4 in dual(E6): "
                  f"{by_case[15].embeddings}); failures: {rep.failures() or 'none'}")
    assert ok


# ---------------------------------------------------------------- 3

def test_ac3_tables_1_to_3(ds):
    checks = run_checks(ds, [1, 2, 3])
    bad = [c.line() for c in checks if c.status != PASS]
    empty = all(not suitable_f0_types(m) for m in range(7, 13))
    ok = not bad and empty and len(checks) > 0
    record(3, ok, f"{len(checks)} checks on Tables 1-3, suitable f0 empty for m = 7..12: {empty}; "
                  f"failures: {bad or 'none'}")
    assert ok


# ---------------------------------------------------------------- 4

def test_ac4_mordell_weil(ds, first, second):
    t4 = regenerate_table4(ds)
    bad = [f"T4 case {d.case} {d.column}" for d in t4.diffs if d.column.endswith((".lat", ".tors"))]
    bad += [f"T6 row {d.row} {d.column}" for d in first.diffs if d.column in ("MW", "G")]
    bad += [f"T8 row {d.row} {d.column}" for d in second.diffs if d.column == "MW"]
    # the corrected quotient lattice of case 30
    c30 = sigma_case(30, ds)
    corrected = lat.is_isometric(c30.quotient.mw.lat, lat.gram_of("1/6*[[2,1],[1,2]]"))
    if not corrected:
        bad.append("case 30 correction")
    rows8 = [r for r in second.rows if r.row is not None]
    ok = not bad and len(t4.cases) == 34 and len(first.rows) == 8 and len(rows8) == 37
    record(4, ok, f"MW of 34 Table 4 cases (both sides), 8 Table 6 rows, {len(rows8)} Table 8/9 rows; "
                  f"mismatches: {bad or 'none'}")
    assert ok


# ---------------------------------------------------------------- 5

@pytest.mark.xfail(strict=True, reason="Table 8 row 32 ker prints dual(E6); the derived kernel is E6 "
                                       "(documented erratum)")
def test_ac5_kernels(ds, second):
    bad = [f"row {d.row}: printed {d.expected}, derived {d.got}" for d in second.diffs if d.column == "ker"]
    additivity = []
    for r in ds.rows(4):
        c = case_from_row(r)
        k = kernel_phi_m(c).kernel
        if c.fixed_sublattice.rank + k.rank != c.total.mw.lat.rank:
            additivity.append(r["case"])
    ok = not bad and not additivity
    record(5, ok, f"ker column over Tables 8/9; rank additivity on 34 cases fails for {additivity or 'none'}; "
                  f"mismatches: {bad or 'none'}")
    assert ok


# ---------------------------------------------------------------- 6

def test_ac6_d_split(ds):
    bad = []
    for r in ds.rows(5):
        kd = d_split(sigma_case(r["case"], ds))
        if kd.allowed_d != frozenset({1, r["d"]}):
            bad.append(f"case {r['case']} d {sorted(kd.allowed_d)}")
        if not _same(kd.kernel, r["ker"]):
            bad.append(f"case {r['case']} ker")
        if not _same(kd.kernel_d1, r["ker_d1"]):
            bad.append(f"case {r['case']} ker_d1")
    for cid in (18, 21):
        if d_split(sigma_case(cid, ds)).allowed_d != frozenset({1}):
            bad.append(f"case {cid} admits d > 1")
    ok = not bad and sorted(r["case"] for r in ds.rows(5)) == [8, 14, 17, 22, 26, 27]
    record(6, ok, f"Table 5 cases 8, 14, 17, 22, 26, 27 and d = 1 only for 18, 21; mismatches: {bad or 'none'}")
    assert ok


# ---------------------------------------------------------------- 7

def test_ac7_certificates(second):
    t0 = time.perf_counter()
    lines, bad, row10 = 0, [], None
    for r in second.rows:
        if r.row is None:
            continue
        for d in r.ds:
            lines += 1
            try:
                cert = existence_certificate(r._case, d, r.G)
            except Exception as exc:
                bad.append(f"row {r.row} d={d}: {exc}")
                continue
            if not verify_certificate(cert, kernel_frames(r._case)[0].fm):
                bad.append(f"row {r.row} d={d}: does not re-verify")
            if r.row == 10:
                row10 = cert
    dt = time.perf_counter() - t0
    disjoint = 0
    if row10 is not None:
        idx = [i for i, s in enumerate(row10.witness_sections) if s.name.startswith("xi")]
        assert all(row10.pairwise_constraints[i][j] == 0 for i in idx for j in idx if i != j)
        disjoint = len(idx)
    ok = not bad and disjoint >= 7 and dt < 120
    record(7, ok, f"{lines} (row, d) certificates in {dt:.1f}s, row 10 (case 5) has {disjoint} mutually "
                  f"disjoint sections; failures: {bad or 'none'}")
    assert ok


# ---------------------------------------------------------------- 8

@pytest.mark.xfail(strict=True, reason="printed Z2 x Z2 block lists row 15 (G = Z6) on its m = 2 line "
                                       "(documented erratum)")
def test_ac8_table10(ds, threefolds):
    want = {linalg.normalize_torsion(b["G"]): [(l["m"], l["h"], l["cases"]) for l in b["lines"]]
            for b in ds.rows(10)}
    got = {b.G: [(l.m, l.h, l.cases) for l in b.lines] for b in threefolds.blocks}
    bad = [f"{list(G)}" for G in want if want[G] != got.get(G)]
    hs = sorted(max(h for _, h, _ in v) for v in got.values())
    cross = any("11x12" == c for v in got.values() for _, _, c in v)
    ok = not bad and len(got) == 8 and hs == [3, 3, 3, 3, 5, 7, 7, 11] and cross
    record(8, ok, f"{len(got)} blocks, h per block {hs}, cross pair 11x12 present: {cross}; "
                  f"blocks differing: {bad or 'none'}")
    assert ok


# ---------------------------------------------------------------- 9

def test_ac9_dimension_formula(ds, first, second):
    bad = []
    computed = [r for r in first.rows if r.dim_source == "lefschetz"]
    want6 = {r["row"]: r["dim"] for r in ds.rows(6)}
    for r in computed:
        if r.dim != want6[r.row]:
            bad.append(f"T6 row {r.row}")
    if sorted(r.row for r in computed) != [4, 5, 6, 7, 8]:
        bad.append(f"T6 computed rows {sorted(r.row for r in computed)}")
    want8 = {r["row"]: r["dim"] for r in ds.rows(8)}
    for r in second.rows:
        if r.row is not None and r.dim != want8[r.row]:
            bad.append(f"T8 row {r.row}")
    specs = list(first.specializations) + list(second.strata)
    bad += [f"T{s.table} row {s.row} {s.config}" for s in specs if not s.ok]
    ok = not bad and len(specs) >= 60
    record(9, ok, f"dims of Table 6 rows 4-8 and {len(want8)} Table 8 rows from fixed points or unramified "
                  f"fibers; Euler sum 12 on {len(specs)} specializations; failures: {bad or 'none'}")
    assert ok


# ---------------------------------------------------------------- 10

def test_ac10_determinism():
    env = dict(os.environ)
    cmd = [sys.executable, "-m", "cyqc.cli", "verify"]
    procs = [subprocess.Popen(cmd, stdout=subprocess.PIPE, stderr=subprocess.PIPE, env=env) for _ in range(2)]
    outs = [p.communicate(timeout=600) for p in procs]
    codes = [p.returncode for p in procs]
    same = outs[0][0] == outs[1][0]
    ok = same and codes == [0, 0] and len(outs[0][0]) > 0
    record(10, ok, f"two independent verify runs: exit codes {codes}, logs byte-identical: {same}")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
