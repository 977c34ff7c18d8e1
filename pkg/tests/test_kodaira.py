from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from cyqc import lattice as lat
from cyqc.kodaira import (
    FiberError, I, Istar, KodairaFiber, WeierstrassOrders, check_suitable_quotient, component_add,
    component_neg, component_order, components, config, contr, cyclic_action, deficiency, diagram_automorphisms,
    euler, format_config, kodaira_from_orders, multiplicities, orders_from_polynomials, parse_config,
    parse_fiber, pullback, root_lattice, root_rank, section_components, suitable_f0_types,
)

II, III, IV = KodairaFiber("II"), KodairaFiber("III"), KodairaFiber("IV")
IIs, IIIs, IVs = KodairaFiber("II*"), KodairaFiber("III*"), KodairaFiber("IV*")
REDUCIBLE = [I(2), I(3), I(5), I(8), III, IV, Istar(0), Istar(1), Istar(2), Istar(4), IVs, IIIs, IIs]


def test_euler_examples():
    assert euler(I(0)) == 0
    assert euler(IVs) == 8
    assert euler(Istar(2)) == 8
    # forced by the Euler sum 12 on {IV*, 4 I1} and {I2*, 2 I2}
    assert euler(IVs) == 12 - 4 * euler(I(1))
    assert euler(Istar(2)) == 12 - 2 * euler(I(2))


def test_root_lattice_examples():
    assert lat.is_isometric(lat.gram_of(root_lattice(I(8))), lat.gram_of("A7"))
    assert lat.is_isometric(lat.gram_of(root_lattice(IVs)), lat.gram_of("E6"))
    assert root_rank(II) == 0


def test_contr_examples():
    assert contr(I(2), 1, 1) == Fraction(1, 2)
    assert contr(I(8), 3, 3) == Fraction(15, 8)
    for f in REDUCIBLE:
        assert all(contr(f, 0, j) == 0 for j in components(f))


def test_contr_rejects_bad_index():
    with pytest.raises(FiberError):
        contr(I(3), 3, 1)


@pytest.mark.parametrize("f", REDUCIBLE, ids=str)
def test_component_group_matches_discriminant(f):
    # components of multiplicity one form the discriminant group of the root lattice
    simple = section_components(f)
    assert len(simple) == lat.gram_of(root_lattice(f)).det
    for a in simple:
        assert component_add(f, a, component_neg(f, a)) == 0
        assert len(simple) % component_order(f, a) == 0
        # contr(a, a) is the norm of a fundamental weight class, never zero off the neutral component
        assert (contr(f, a, a) == 0) == (a == 0)
    for i in components(f):
        for j in components(f):
            assert contr(f, i, j) == contr(f, j, i)


def test_multiplicities_from_highest_root():
    # neutral component plus the coefficients of the highest root
    assert sum(multiplicities(IIs)) == 30
    assert sum(multiplicities(IIIs)) == 18
    assert sum(multiplicities(IVs)) == 12
    assert sum(multiplicities(Istar(0))) == 6


def test_pullback_examples():
    assert pullback(I(4), 2) == I(8)
    assert pullback(II, 5) == IIs
    assert all(pullback(I(0), m) == I(0) for m in range(2, 7))


@pytest.mark.parametrize("f", [II, III, IV, IVs, IIIs, IIs, Istar(0), Istar(2)], ids=str)
def test_pullback_composes(f):
    for a in range(1, 4):
        for b in range(1, 4):
            assert pullback(pullback(f, a), b) == pullback(f, a * b)


def test_deficiency_examples():
    assert deficiency(I(3), 3, False) == -6
    assert deficiency(IIs, 2, True) == 2
    assert all(deficiency(I(0), m, r) == 0 for m in range(2, 7) for r in (True, False))


@given(st.sampled_from(REDUCIBLE + [II, I(1)]), st.integers(2, 6))
def test_deficiency_is_euler_drop(f, m):
    # ramified: one preimage of type pullback(f, m); unramified: m copies of f
    assert deficiency(f, m, True) == euler(f) - euler(pullback(f, m))
    assert deficiency(f, m, False) == euler(f) - m * euler(f)


def test_suitability_examples():
    cfg = parse_config("II*@0,I1x2")
    assert check_suitable_quotient(cfg, 6).ok
    rep = check_suitable_quotient(parse_config("IV*@0,I1x4"), 5)
    assert not rep.ok and rep.reasons
    assert not check_suitable_quotient(config(["I1"] * 12), 2).ok


def test_suitable_f0_types():
    assert suitable_f0_types(5) == [IIs]
    assert suitable_f0_types(2) == [IIs, IIIs, IVs, Istar(4), Istar(3), Istar(2), Istar(1), Istar(0)]
    assert suitable_f0_types(7) == []


def _orders_by_sympy(a4, a6):
    t = sympy.symbols("t")
    A4 = sum(c * t ** i for i, c in enumerate(a4))
    A6 = sum(c * t ** i for i, c in enumerate(a6))

    def order(p):
        p = sympy.Poly(sympy.expand(p), t)
        if p.is_zero:
            return 10 ** 9
        return min(m[0] for m in p.monoms())

    return order(A4), order(A6), order(4 * A4 ** 3 + 27 * A6 ** 2)


@pytest.mark.parametrize("a4,a6,want", [
    ([-3], [2, 0, 0, 1], I(3)),           # nodal cubic, discriminant vanishing to order 3
    ([1], [1], I(0)),
    ([0, 0, -3], [0, 0, 0, 1], Istar(0)),  # quadratic twist of a smooth fiber
    ([0, 1], [0, 1], II),
    ([0, 1], [0, 0, 1], III),
    ([0, 0, 1], [0, 0, 1], IV),
    ([0, 0, 0, 1], [0, 0, 0, 0, 1], IVs),
    ([0, 0, 0, 1], [0, 0, 0, 0, 0, 1], IIIs),
    ([0, 0, 0, 0, 1], [0, 0, 0, 0, 0, 1], IIs),
])
def test_tate_table(a4, a6, want):
    w = orders_from_polynomials(a4, a6)
    assert (w.ord_a4, w.ord_a6, w.ord_delta) == tuple(min(x, 10 ** 9) for x in _orders_by_sympy(a4, a6))
    f = kodaira_from_orders(w)
    assert f == want
    assert euler(f) == w.ord_delta


def test_tate_direct_examples():
    assert kodaira_from_orders(WeierstrassOrders(0, 0, 3)) == I(3)
    assert kodaira_from_orders(WeierstrassOrders(0, 0, 0)) == I(0)
    assert kodaira_from_orders(WeierstrassOrders(2, 3, 6)) == Istar(0)
    with pytest.raises(FiberError):
        kodaira_from_orders(WeierstrassOrders(4, 6, 12))


def test_parse_config_round_trip():
    for text in ("I8@0,I1x4", "II*@0,I1x2", "IV*@0,I1x4", "I0*@0,I2x3"):
        cfg = parse_config(text)
        assert parse_config(format_config(cfg)) == cfg
        assert cfg.euler_total == 12
    with pytest.raises(FiberError):
        parse_config("I8@0,I1x5")
    with pytest.raises(FiberError):
        parse_fiber("I-1")


def test_diagram_automorphisms_sizes():
    assert len(diagram_automorphisms(Istar(0))) == 6
    assert len(diagram_automorphisms(IVs)) == 2
    assert len(diagram_automorphisms(IIs)) == 1
    assert len(diagram_automorphisms(I(5))) == 2


def test_cyclic_action_orders():
    cfg = parse_config("III@0,I2x3,I1x3")
    act = cyclic_action(cfg, 3, (0, 1))
    assert act.order() == 3
    assert act.f0_known
    assert act.power(3).is_identity()
    with pytest.raises(FiberError):
        cyclic_action(cfg, 2)
