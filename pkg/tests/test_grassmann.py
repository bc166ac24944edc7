import random

import pytest
from sympy import Matrix

from services.errors import ZERO, OutNotMember, SizeMismatch, ValidationError
from services.grassmann import BasisLayout, IndexSet, RelationKind, admissible, pluecker_relations, replace, sort_with_sign
from services.ratfunc import evaluate

D = IndexSet.of


def test_index_set_parse_and_str():
    assert IndexSet.parse("{3, 4,7,8}") == D(3, 4, 7, 8)
    assert str(D(8, 7, 4, 3)) == "{3,4,7,8}"
    with pytest.raises(ValidationError):
        IndexSet.parse("3,4")
    with pytest.raises(ValidationError):
        IndexSet((4, 3))


@pytest.mark.parametrize("values, expected, sign", [
    ((1, 2, 3), (1, 2, 3), 1),
    ((2, 1, 3), (1, 2, 3), -1),
    ((3, 1, 2), (1, 2, 3), 1),
    ((1, 4, 3, 8), (1, 3, 4, 8), -1),
])
def test_sort_with_sign(values, expected, sign):
    assert sort_with_sign(values) == (IndexSet(expected), sign)


def test_sort_with_sign_repeated_index():
    assert sort_with_sign((1, 2, 1)) is ZERO


def test_replace():
    assert replace(D(3, 4, 7, 8), 3, 1) == (D(1, 4, 7, 8), 1)
    assert replace(D(3, 4, 7, 8), 7, 5) == (D(3, 4, 5, 8), 1)
    assert replace(D(2, 4), 4, 3) == (D(2, 3), 1)
    assert replace(D(3, 4, 7, 8), 3, 9) == (D(4, 7, 8, 9), -1)
    assert replace(D(3, 4, 7, 8), 8, 1) == (D(1, 3, 4, 7), -1)
    assert replace(D(3, 4, 7, 8), 3, 4) is ZERO


def test_replace_requires_member():
    with pytest.raises(OutNotMember):
        replace(D(3, 4, 7, 8), 5, 1)


def test_layout_blocks():
    layout = BasisLayout((4, 4), (2, 2))
    assert list(layout.block(2)) == [5, 6, 7, 8]
    assert layout.vertex_of(5) == 2
    assert layout.top_index_set() == D(3, 4, 7, 8)
    assert (layout.d, layout.e) == (8, 4)


def test_layout_rejects_bad_dimensions():
    with pytest.raises(ValidationError):
        BasisLayout((2, 2), (3, 1))
    with pytest.raises(ValidationError):
        BasisLayout((2, 2), (1,))


def test_admissible():
    layout = BasisLayout((4, 4), (2, 2))
    assert admissible(D(3, 4, 7, 8), layout)
    assert admissible(D(1, 4, 5, 8), layout)
    assert not admissible(D(1, 3, 4, 7), layout)
    with pytest.raises(SizeMismatch):
        admissible(D(3, 4, 7), layout)


def test_admissible_subset_count():
    layout = BasisLayout((6, 6), (3, 3))
    assert sum(1 for _ in layout.subsets()) == 924
    assert sum(1 for _ in layout.admissible_subsets()) == 400


def test_pluecker_gr24_is_one_three_term_relation():
    rels = pluecker_relations(2, 4)
    assert len(rels) == 1
    rel = rels[0]
    assert rel.kind is RelationKind.PLUECKER
    assert len(rel.poly.num.terms()) == 3
    assert rel.symbols() == {D(1, 2), D(1, 3), D(1, 4), D(2, 3), D(2, 4), D(3, 4)}
    u = rel.poly.universe
    expected = u.delta(D(1, 2)) * u.delta(D(3, 4)) - u.delta(D(1, 3)) * u.delta(D(2, 4)) \
        + u.delta(D(1, 4)) * u.delta(D(2, 3))
    assert rel.poly == expected or rel.poly == -expected


def test_pluecker_trivial_for_k_one():
    assert pluecker_relations(1, 3) == []


def test_pluecker_rejects_bad_k():
    with pytest.raises(ValidationError):
        pluecker_relations(0, 3)


def test_pluecker_gr25_has_five_relations():
    rels = pluecker_relations(2, 5)
    assert len(rels) == 5
    assert all(r.kind is RelationKind.PLUECKER for r in rels)


@pytest.mark.parametrize("k, d", [(2, 4), (2, 5), (2, 6), (3, 5), (3, 6)])
def test_pluecker_relations_vanish_on_matrix_minors(k, d):
    rng = random.Random(k * 10 + d)
    m = Matrix([[rng.randint(-9, 9) for _ in range(d)] for _ in range(k)])
    rows = list(range(k))
    for rel in pluecker_relations(k, d):
        values = {key: int(m.extract(rows, [c - 1 for c in key]).det()) for key in rel.symbols()}
        assert evaluate(rel.poly, values) == 0
