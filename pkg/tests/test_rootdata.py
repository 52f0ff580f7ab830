"""Root data, Weyl groups, the longest element and opposition involutions."""

import pytest

from shimura_descent.errors import (InvalidType, NotBasedAutomorphism,
                                    NotCMSplit, NoWeylGroup)
from shimura_descent.rootdata import (BasedRootDatum, LatticeMap,
                                      build_root_datum, character_conjugation,
                                      diagram_automorphisms,
                                      induced_diagram_map, longest_element,
                                      mat_det, mat_identity, mat_mul, mat_neg,
                                      mat_vec, opposition_diagram_action,
                                      opposition_involution, product_datum,
                                      special_nodes, weyl_orbit_longest,
                                      weyl_order)

# classification root counts: the independent oracle for the enumerations
ROOT_COUNTS = {
    "A2": 6, "A3": 12, "A5": 30, "B2": 8, "B3": 18, "C3": 18, "C4": 32,
    "D4": 24, "D5": 40, "E6": 72, "E7": 126, "E8": 240, "F4": 48, "G2": 12,
}


@pytest.mark.parametrize("label,count", sorted(ROOT_COUNTS.items()))
def test_root_counts(label, count):
    for flavor in ("adjoint", "simply_connected"):
        datum = build_root_datum(label, isogeny_flavor=flavor)
        assert len(datum.roots()) == count


def test_a2_cartan_determinant():
    datum = build_root_datum("A2", isogeny_flavor="simply_connected")
    assert mat_det(datum.cartan()) == 3
    assert len(datum.roots()) == 6


def test_pairing_normalization():
    for label in ("A3", "B3", "C3", "D5", "G2"):
        datum = build_root_datum(label)
        for a, av in zip(datum.simple_roots, datum.simple_coroots):
            assert datum.pairing(a, av) == 2
        for r in datum.roots():
            assert datum.pairing(r, datum.coroot_of(r)) == 2


def test_reflections_permute_roots():
    datum = build_root_datum("B3")
    roots = set(datum.roots())
    for i in range(3):
        s = datum.simple_reflection(i)
        assert {s(r) for r in roots} == roots


def test_illegal_ranks():
    with pytest.raises(InvalidType):
        build_root_datum("D3")
    with pytest.raises(InvalidType):
        build_root_datum("E9")
    with pytest.raises(InvalidType):
        build_root_datum("B1")


def test_toral_datum():
    t = build_root_datum("toral", 2)
    assert t.roots() == []
    star = opposition_involution(t)
    assert star.matrix == mat_neg(mat_identity(2))
    with pytest.raises(NoWeylGroup):
        longest_element(t)


def test_longest_element_a1():
    d = build_root_datum("A1")
    w = longest_element(d)
    assert w.word == (1,)
    assert mat_vec(w.matrix, d.simple_roots[0]) == \
        tuple(-x for x in d.simple_roots[0])


@pytest.mark.parametrize("label,length", [
    ("A2", 3), ("A3", 6), ("B2", 4), ("B3", 9), ("C3", 9),
    ("D4", 12), ("D5", 20), ("F4", 24), ("G2", 6), ("E6", 36),
])
def test_longest_element_length_and_involution(label, length):
    datum = build_root_datum(label)
    w = longest_element(datum)
    assert len(w.word) == length
    n_pos = len(datum.roots()) // 2
    assert length == n_pos
    assert mat_mul(w.matrix, w.matrix) == mat_identity(datum.rank)
    simple = set(datum.simple_roots)
    negated = {tuple(-x for x in mat_vec(w.matrix, a)) for a in simple}
    assert negated == simple


@pytest.mark.parametrize("label", ["A2", "A4", "B3", "C3", "D4", "D5",
                                   "F4", "G2", "E6"])
def test_longest_element_against_brute_force(label):
    datum = build_root_datum(label)
    w = longest_element(datum)
    depth, deepest, start, size = weyl_orbit_longest(datum)
    assert size == weyl_order(label)
    assert depth == len(w.word)
    assert mat_vec(w.matrix, start) == deepest


OPPOSITION_TABLE = {
    # family -> expected node action builder, per the Dynkin diagram list
    "A3": {1: 3, 2: 2, 3: 1},
    "B3": {1: 1, 2: 2, 3: 3},
    "C4": {i: i for i in range(1, 5)},
    "D5": {1: 1, 2: 2, 3: 3, 4: 5, 5: 4},
    "D6": {i: i for i in range(1, 7)},
    "E6": {1: 6, 2: 2, 3: 5, 4: 4, 5: 3, 6: 1},
    "E7": {i: i for i in range(1, 8)},
    "F4": {i: i for i in range(1, 5)},
    "G2": {1: 1, 2: 2},
}


@pytest.mark.parametrize("label,expected", sorted(OPPOSITION_TABLE.items()))
def test_opposition_against_table(label, expected):
    for flavor in ("adjoint", "simply_connected"):
        datum = build_root_datum(label, isogeny_flavor=flavor)
        star = opposition_involution(datum)
        assert mat_mul(star.matrix, star.matrix) == mat_identity(datum.rank)
        assert induced_diagram_map(datum, star) == expected
        assert opposition_diagram_action(label) == expected


def test_special_nodes_table():
    assert special_nodes("A3") == {1, 2, 3}
    assert special_nodes("B5") == {1}
    assert special_nodes("C3") == {3}
    assert special_nodes("D5") == {1, 4, 5}
    assert special_nodes("D8") == {1, 7, 8}
    assert special_nodes("E6") == {1, 6}
    assert special_nodes("E7") == {7}
    assert special_nodes("E8") == set()
    assert special_nodes("F4") == set()
    assert special_nodes("G2") == set()


def test_induced_diagram_map_rejects():
    d = build_root_datum("A2")
    ident = LatticeMap(mat_identity(2))
    assert induced_diagram_map(d, ident) == {1: 1, 2: 2}
    neg = LatticeMap(mat_neg(mat_identity(2)))
    with pytest.raises(NotBasedAutomorphism):
        induced_diagram_map(d, neg)


@pytest.mark.parametrize("label", ["A2", "A3", "D4", "A4", "B3", "C4"])
def test_star_is_central_in_aut(label):
    datum = build_root_datum(label)
    star = opposition_involution(datum)
    auts = diagram_automorphisms(datum)
    assert len(auts) >= 1
    for f in auts:
        assert mat_mul(star.matrix, f.matrix) == mat_mul(f.matrix, star.matrix)


def test_star_nontrivial_on_non_semisimple():
    # toral (nonzero X_0) data have star = -1 != 1
    t = build_root_datum("toral", 1)
    assert opposition_involution(t).matrix != mat_identity(1)


def test_product_datum():
    d = product_datum(build_root_datum("A2"), build_root_datum("B2"))
    assert len(d.roots()) == 6 + 8
    star = opposition_involution(d)
    assert induced_diagram_map(d, star) == {1: 2, 2: 1, 3: 3, 4: 4}


def test_character_conjugation():
    ident = LatticeMap(mat_identity(2))
    neg = LatticeMap(mat_neg(mat_identity(2)))
    swap = LatticeMap(((0, 1), (1, 0)))
    # anisotropic torus: c acts by -1, commutes with everything
    assert character_conjugation(2, [swap], neg) is neg
    # split torus: c trivial
    assert character_conjugation(2, [], ident) is ident
    # Res_{Q(i)/Q} Gm: Galois swaps the two embeddings, c is the same swap
    assert character_conjugation(2, [swap], swap) is swap


def test_character_conjugation_rejects():
    swap = LatticeMap(((0, 1), (1, 0)))
    shear = LatticeMap(((1, 1), (0, 1)))
    with pytest.raises(NotCMSplit):
        character_conjugation(2, [shear], swap)
    with pytest.raises(NotCMSplit):
        character_conjugation(2, [], shear)  # not an involution


def test_serialization():
    d = build_root_datum("D5")
    assert d.to_json() == {"type": "D", "rank": 5, "flavor": "adjoint"}
    m = LatticeMap(((0, 1), (1, 0)))
    assert LatticeMap.from_json(m.to_json()) == m
