from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cyqc import lattice as lat
from cyqc.kodaira import contr, parse_config
from cyqc.lattice import GramLattice
from cyqc.mordell_weil import (
    AmbiguousMW, MWError, SectionClass, discriminant_check, height, mw_from_T, mw_outcomes, torsion_incidence_solve,
    torsion_test,
)
from cyqc.sigma_pairs import sigma_case


def test_mw_from_T_examples():
    mw, _ = mw_from_T(GramLattice())
    assert lat.is_isometric(mw.lat, lat.gram_of("E8")) and mw.tors == ()
    mw, _ = mw_from_T(lat.gram_of("D4+A1^2"))
    assert lat.is_isometric(mw.lat, lat.gram_of("dual(A1)^2")) and mw.tors == (2,)


def test_ambiguous_T_needs_torsion():
    # A7 sits in E8 primitively and with index-2 glue
    with pytest.raises(AmbiguousMW) as exc:
        mw_from_T(lat.gram_of("A7"))
    assert {g.tors for g in exc.value.alternatives} == {(), (2,)}
    mw, _ = mw_from_T(lat.gram_of("A7"), [2])
    assert lat.is_isometric(mw.lat, lat.gram_of("dual(A1)")) and mw.tors == (2,)
    with pytest.raises(MWError):
        mw_from_T(lat.gram_of("A7"), [3])


@pytest.mark.parametrize("T", ["A1", "A2", "A1^4", "A2^3", "D4", "E6+A2", "A3^2", "A4^2", "D4^2", "E7+A1"])
def test_outcomes_satisfy_discriminant_duality(T):
    for mw, embs in mw_outcomes(lat.gram_of(T)):
        assert discriminant_check(lat.gram_of(T), mw)
        assert mw.lat.rank + lat.gram_of(T).rank == 8
        if mw.narrow is not None and mw.lat.rank:
            assert lat.is_isometric(mw.narrow, lat.dual(mw.lat))


def test_height_and_torsion_examples():
    # case 18: the 2-torsion section meets component 4 of I8
    cfg = parse_config("I8@0,I1x4")
    eta = SectionClass({0: 4}, 0)
    assert torsion_test(eta, cfg)
    assert height(eta, eta, cfg) == 0
    sigma = SectionClass.zero(cfg)
    assert height(sigma, sigma, cfg) == 0
    assert not torsion_test(SectionClass({0: 0}, 0), cfg)
    # case 8: meets R1 of III and S_{j,1} of the three I2 fibers
    cfg = parse_config("III@0,I2x3,I1x3")
    assert torsion_test(SectionClass({0: 1, 1: 1, 2: 1, 3: 1}, 0), cfg)
    # case 26: a section disjoint from sigma meeting three non-neutral I2 components has height 1/2
    cfg = parse_config("I2@0,I2x4,I1x2")
    x = SectionClass({0: 1, 1: 1, 2: 1, 3: 0, 4: 0}, 0)
    assert height(x, x, cfg) == Fraction(1, 2) == 2 - 3 * contr(cfg.fibers[0], 1, 1)


def test_height_needs_intersection_for_distinct_sections():
    cfg = parse_config("I8@0,I1x4")
    with pytest.raises(MWError):
        height(SectionClass({0: 4}, 0), SectionClass({0: 2}, 0), cfg)


def test_torsion_incidence_examples():
    sol = torsion_incidence_solve(parse_config("I8@0,I1x4"), [2])
    assert sol.unique and sol.first.generators == (((0, 4),),)
    sol = torsion_incidence_solve(parse_config("IV@0,I3x2,I1x2"), [3])
    assert sol.unique
    assert sol.first.incidence((1,)) == {0: 1, 1: 1, 2: 1}
    assert sol.first.incidence((2,)) == {0: 2, 1: 2, 2: 2}
    assert torsion_incidence_solve(parse_config("I1x12"), []).first.generators == ()


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 34))
def test_torsion_sections_have_height_zero(case_id):
    c = sigma_case(case_id)
    cfg, tors = c.total.config, c.total.mw.tors
    sols = torsion_incidence_solve(cfg, tors, c.component_action)
    assert sols.solutions
    secs = sols.first.sections()
    for a in secs:
        assert torsion_test(a, cfg)
        assert height(a, a, cfg) == 0
        for b in secs:
            if a is not b:
                # distinct torsion sections are disjoint
                assert height(a, b, cfg, 0) == 0
