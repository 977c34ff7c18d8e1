import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cyqc import lattice as lat
from cyqc import linalg
from cyqc.lattice import GramLattice, LatticeError


def e8_coordinate_roots():
    """Independent model of the E8 roots in R^8: +-e_i +- e_j and
    (+-1/2)^8 with an even number of minus signs."""
    out = set()
    for i, j in itertools.combinations(range(8), 2):
        for si, sj in itertools.product((1, -1), repeat=2):
            v = [0] * 8
            v[i], v[j] = si, sj
            out.add(tuple(Fraction(x) for x in v))
    for signs in itertools.product((1, -1), repeat=8):
        if signs.count(-1) % 2 == 0:
            out.add(tuple(Fraction(s, 2) for s in signs))
    return out


def box_count(L, bound, r):
    return sum(1 for v in itertools.product(range(-r, r + 1), repeat=L.rank)
               if any(v) and L.norm(v) <= bound)


def test_gram_of_examples():
    assert lat.gram_of("A1").gram == ((2,),)
    assert lat.gram_of("U1/6").gram == ((Fraction(1, 6),),)
    assert lat.gram_of("E8").det == 1


def test_dual_examples():
    assert lat.dual(lat.gram_of("A1")).gram == ((Fraction(1, 2),),)
    assert lat.dual(lat.gram_of("E7")).minimum() == Fraction(3, 2)
    D4 = lat.gram_of("D4")
    assert lat.is_isometric(lat.dual(lat.dual(D4)), D4)


def test_e8_vectors_match_coordinate_model():
    roots = e8_coordinate_roots()
    assert len(roots) == 240
    assert all(sum(x * x for x in v) == 2 for v in roots)
    vs = lat.vectors_up_to_norm(lat.gram_of("E8"), 2)
    assert len(vs) == len(roots)
    assert all(lat.gram_of("E8").norm(v) == 2 for v in vs)


def test_a2_vectors_match_box_enumeration():
    A2 = lat.gram_of("A2")
    assert len(lat.vectors_up_to_norm(A2, 2)) == box_count(A2, 2, 3) == 6


def test_rank_zero_vectors():
    assert lat.vectors_up_to_norm(GramLattice(), 2) == []


@pytest.mark.parametrize("name,bound,r", [("D4", 2, 2), ("dual(A3)", 2, 2), ("A1^2+dual(A2)", 3, 3)])
def test_short_vectors_against_box(name, bound, r):
    L = lat.gram_of(name)
    assert len(lat.vectors_up_to_norm(L, bound)) == box_count(L, bound, r)


def test_find_embeddings_examples():
    assert lat.find_embeddings(lat.gram_of("A1"), lat.gram_of("E8"))
    src = GramLattice([[Fraction(3, 2), 1, Fraction(1, 2)], [1, 2, 1], [Fraction(1, 2), 1, Fraction(3, 2)]])
    assert lat.is_isometric(src, lat.gram_of("2*dual(A3)"))
    embs = lat.find_embeddings(src, lat.dual(lat.gram_of("E7")), "first")
    assert len(embs) >= 4
    target = GramLattice([[2, -1, 0, 0], [-1, 2, -1, -1], [0, -1, 2, 0], [0, -1, 0, 2]])
    assert lat.is_isometric(target, lat.gram_of("D4"))
    for e in embs:
        assert lat.is_isometric(lat.orthogonal_complement(e), target)
    assert len(lat.find_embeddings(GramLattice(), lat.gram_of("E8"))) == 1


def test_complement_examples():
    E8 = lat.gram_of("E8")
    (e,) = lat.find_embeddings(lat.gram_of("A1"), E8, "weyl")
    assert lat.is_isometric(lat.orthogonal_complement(e), lat.gram_of("E7"))
    (e,) = lat.find_embeddings(lat.gram_of("A2"), E8, "weyl")
    assert lat.is_isometric(lat.orthogonal_complement(e), lat.gram_of("E6"))
    (e,) = lat.find_embeddings(E8, E8, "weyl", limit=1)
    assert lat.orthogonal_complement(e).rank == 0


def test_saturate_examples():
    E8 = lat.gram_of("E8")
    (e,) = lat.find_embeddings(E8, E8, "weyl", limit=1)
    assert lat.saturate(e)[1] == ()
    glues = {lat.saturate(e)[1] for e in lat.find_embeddings(lat.gram_of("A1^4"), E8, "weyl")}
    assert (2,) in glues
    glues = {lat.saturate(e)[1] for e in lat.find_embeddings(lat.gram_of("A2^3"), E8, "weyl")}
    assert glues == {(3,)}


def test_is_isometric_examples():
    D4 = lat.gram_of("D4")
    perm = [2, 0, 3, 1]
    permuted = GramLattice([[D4.gram[perm[i]][perm[j]] for j in range(4)] for i in range(4)])
    assert lat.is_isometric(D4, permuted)
    assert not lat.is_isometric(lat.gram_of("A1^2"), lat.gram_of("A2"))
    assert lat.gram_of("A1^2").det == 4 and lat.gram_of("A2").det == 3


def test_torsion_is_part_of_isometry_class():
    assert not lat.is_isometric(lat.lattice("dual(A1)", [2]), lat.lattice("dual(A1)"))
    assert lat.is_isometric(lat.lattice("dual(A1)", [2]), lat.lattice("dual(A1)", [2]))


def test_parser_round_trip_and_errors():
    for text in ("A2^3", "dual(E7)", "U1/6+dual(A1)^2", "2*dual(A3)", "1/6*[[2,1],[1,2]]"):
        L = lat.lattice(text)
        assert lat.is_isometric(L, lat.gram_of(lat.format_spec(lat.parse_lattice(text))))
    for bad in ("B3", "dual(", "A0", "[[1,2],[3,4]]"):
        with pytest.raises((LatticeError, ValueError)):
            lat.lattice(bad)


def test_gram_must_be_symmetric():
    with pytest.raises(LatticeError):
        GramLattice([[2, 1], [0, 2]])


def test_identify():
    assert lat.identify(lat.dual(lat.gram_of("E6")), ["E6", "dual(E6)"]) == "dual(E6)"
    assert lat.identify(lat.gram_of("A3"), ["D4", "A3"]) == "A3"
    assert lat.identify(lat.gram_of("A2"), ["A1^2"]) is None


ROOT_NAMES = ["A1", "A2", "A3", "D4", "A1^2", "A2+A1", "D5", "E6", "A4"]


@st.composite
def unimodular(draw, n):
    u = linalg.identity(n)
    for _ in range(draw(st.integers(0, 6))):
        i = draw(st.integers(0, n - 1))
        j = draw(st.integers(0, n - 1))
        k = draw(st.integers(-2, 2))
        if i != j:
            u[i] = [u[i][c] + k * u[j][c] for c in range(n)]
    if n > 1 and draw(st.booleans()):
        u[0], u[1] = u[1], u[0]
    return u


@st.composite
def lattice_and_basis(draw):
    name = draw(st.sampled_from(ROOT_NAMES))
    L = lat.gram_of(name)
    return L, draw(unimodular(L.rank))


@settings(max_examples=40, deadline=None)
@given(lattice_and_basis())
def test_change_of_basis_is_isometry(pair):
    L, u = pair
    M = lat.unimodular_transform(L, u)
    assert M.det == L.det
    assert lat.is_isometric(L, M)
    assert lat.norm_profile(L, 4) == lat.norm_profile(M, 4)
    assert lat.is_isometric(lat.reduced(M), L)


@settings(max_examples=30, deadline=None)
@given(lattice_and_basis())
def test_dual_determinant_and_involution(pair):
    L, u = pair
    M = lat.unimodular_transform(L, u)
    D = lat.dual(M)
    assert D.det * M.det == 1
    assert lat.is_isometric(lat.dual(D), L)
    assert lat.is_isometric(D, lat.dual(L))


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(["A1", "A2", "A1^2", "A3", "D4"]))
def test_complement_rank_adds_up_in_e8(name):
    S = lat.gram_of(name)
    E8 = lat.gram_of("E8")
    for e in lat.find_embeddings(S, E8, "weyl"):
        C = lat.orthogonal_complement(e)
        assert C.rank + S.rank == 8
        closure, glue = lat.saturate(e)
        g = 1
        for x in glue:
            g *= x
        # primitive closure of S and its complement have equal discriminants in a unimodular lattice
        assert lat.orthogonal_complement(closure).det == S.det / (g * g) == C.det
