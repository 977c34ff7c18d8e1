import pytest

from cyqc import lattice as lat
from cyqc.kodaira import pullback
from cyqc.mordell_weil import discriminant_check
from cyqc.sigma_pairs import SigmaPairError, build_sigma_pair, regenerate_table4, sigma_case
from cyqc.sections import kernel_phi_m

CASES = range(1, 35)


@pytest.fixture(scope="module")
def table4(ds):
    return regenerate_table4(ds)


def test_build_examples():
    c = build_sigma_pair("II*@0,I1x2", 6)
    assert c.total.config.f0.smooth
    assert lat.is_isometric(c.total.mw.lat, lat.gram_of("E8")) and c.total.mw.tors == ()
    c = build_sigma_pair("I4*@0,I1x2", 2)
    assert str(c.total.config.f0) == "I8"
    assert lat.is_isometric(lat.gram_of(c.total.T), lat.gram_of("A7"))
    assert lat.is_isometric(c.total.mw.lat, lat.gram_of("dual(A1)")) and c.total.mw.tors == (2,)
    c = build_sigma_pair("IV*@0,I3,I1", 3)
    assert lat.is_isometric(c.total.mw.lat, lat.gram_of("dual(A2)")) and c.total.mw.tors == (3,)


def test_unsuitable_quotient_rejected():
    with pytest.raises(SigmaPairError):
        build_sigma_pair("IV*@0,I3,I1", 5)


def test_table4_regenerates(table4):
    assert len(table4.cases) == 34
    assert table4.diffs == []
    assert len(table4.cells) == 34 * 7


def test_table4_named_rows(ds):
    assert lat.is_isometric(sigma_case(30, ds).total.mw.lat, lat.gram_of("dual(A2)^2"))
    c34 = sigma_case(34, ds)
    assert c34.total.mw.lat.rank == 0 and c34.total.mw.tors == (2, 2)


@pytest.mark.parametrize("case_id", CASES)
def test_sigma_pair_invariants(ds, case_id):
    c = sigma_case(case_id, ds)
    q, b = c.quotient.config, c.total.config
    # B carries the pullback of f0 and m copies of every other singular fiber
    assert str(b.f0) == str(pullback(q.f0, c.m))
    want = sorted(str(f) for f in q.unramified() for _ in range(c.m))
    got = sorted(str(f) for f in b.unramified())
    assert got == want
    assert b.euler_total == 12
    # invariants: m times the quotient lattice, and the quotient torsion
    assert lat.is_isometric(c.fixed_sublattice.free_part(), c.quotient.mw.lat.scaled(c.m))
    assert discriminant_check(lat.gram_of(c.total.T), c.total.mw)
    assert c.fixed_sublattice.rank + kernel_phi_m(c).kernel.rank == c.total.mw.lat.rank
    assert c.component_action.power(c.m).is_identity()
