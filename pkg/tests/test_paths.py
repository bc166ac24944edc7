from fractions import Fraction

import pytest

from services.errors import Disconnected, ShapeMismatch, ValidationError
from services.grassmann import IndexSet
from services.paths import (
    ArrowAssignment,
    CirculantSpec,
    LadderWeight,
    Path,
    arc_label,
    arc_set,
    base_ladder,
    build_circulant,
    check_homomorphism,
    check_nullset,
    check_spiral,
    concat,
    normal_loop,
    p_hat,
    p_tilde_path,
    path_dot,
    sigma0_block,
    spiral_loop,
    walk,
    z_partial,
)
from services.symfunc import LabeledPartition, Partition, on_common_universe

D = IndexSet.of


# M+ blocks of the 4-vertex, 4-dimensional circulant as tabulated by hand
SIGMA0_4X4 = {
    (1, 2): (0, 2, 3, 1),
    (1, 3): (0, 1, 3, 2),
    (1, 4): (0, 1, 2, 3),
    (2, 3): (1, 0, 3, 2),
    (2, 4): (1, 0, 2, 3),
    (3, 4): (1, 2, 0, 3),
}


def cyclic_table(m, n):
    """Shift by j - i on the pair (i, j)"""
    return ArrowAssignment(n, {(i, j): tuple((r + j - i) % n for r in range(n))
                               for i in range(1, m + 1) for j in range(i + 1, m + 1)})


@pytest.fixture
def sigma0_system():
    return build_circulant(CirculantSpec(4, 4), ArrowAssignment.sigma0(4, 4))


def test_circulant_index_sets():
    assert CirculantSpec(4, 4).index_set() == D(3, 4, 7, 8, 11, 12, 15, 16)
    assert CirculantSpec(2, 2).index_set() == D(2, 4)
    assert CirculantSpec(6, 6).layout().e_vec == (3,) * 6


def test_circulant_rejects_tiny_sizes():
    with pytest.raises(ValidationError):
        CirculantSpec(1, 4)


def test_inverse_permutations():
    table = ArrowAssignment.sigma0(4, 4)
    assert table.permutation(1, 2) == (0, 2, 3, 1)
    assert table.permutation(1, 2, -1) == (0, 3, 1, 2)
    assert table.permutation(2, 1) == (0, 2, 3, 1)
    shift = cyclic_table(3, 3)
    assert shift.permutation(1, 3) == (2, 0, 1)
    assert shift.permutation(1, 3, -1) == (1, 2, 0)


def test_sigma0_matches_the_four_vertex_table():
    assert ArrowAssignment.sigma0(4, 4).table == SIGMA0_4X4


def test_sigma0_blocks():
    assert sigma0_block(1, 4, 6) == (0, 1, 2, 4, 5, 3)
    assert sigma0_block(3, 4, 6) == (1, 2, 0, 4, 5, 3)
    assert sigma0_block(1, 6, 6) == tuple(range(6))
    for i in range(1, 7):
        for j in range(i + 1, 7):
            assert sorted(sigma0_block(i, j, 6)) == list(range(6))


@pytest.mark.parametrize("m, n", [(4, 4), (6, 6)])
def test_sigma0_inverse_blocks(m, n):
    system = build_circulant(CirculantSpec(m, n), ArrowAssignment.sigma0(m, n))
    rep = system.rep
    u = rep.universe
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            plus, minus = rep.blocks[arc_label(i, j, 1)], rep.blocks[arc_label(i, j, -1)]
            for r in range(n):
                for c in range(n):
                    entry = sum((plus[r][k] * minus[k][c] for k in range(n)), u.zero)
                    assert entry == (1 if r == c else 0)


def test_assignment_validation():
    table = cyclic_table(3, 2)
    table.table[(1, 2)] = (0, 0)
    with pytest.raises(ShapeMismatch):
        build_circulant(CirculantSpec(3, 2), table)
    with pytest.raises(ShapeMismatch):
        build_circulant(CirculantSpec(3, 3), cyclic_table(3, 2))


def test_circulant_arrows(sigma0_system):
    labels = [a.label for a in sigma0_system.quiver.arrows]
    assert len(labels) == 12
    assert labels[:2] == ["1-2+", "1-2-"]
    assert arc_label(3, 1, -1) == "1-3-"
    arrow = sigma0_system.quiver.arrow("1-2-")
    assert (arrow.source, arrow.target) == (2, 1)


def test_normal_loops_close():
    g4 = normal_loop(6, 4, 0)
    assert g4.is_closed and len(g4) == 4
    assert g4.vertices() == [1, 2, 3, 4]
    assert g4.name == "G4@0"
    g6 = normal_loop(6, 6, 3)
    assert g6.start == 4 and g6.is_closed
    with pytest.raises(ValidationError):
        normal_loop(6, 7)


def test_spiral_loop():
    loop = spiral_loop(6, 0, 2)
    assert [(a.source, a.target) for a in loop.arrows] == [(1, 3), (3, 5), (5, 1)]
    assert loop.is_closed


def test_concat():
    q1, q2 = walk([1, 2, 4], "Q1"), walk([4, 5, 1], "Q2")
    joined = concat(q1, q2)
    assert len(joined) == 4 and joined.is_closed
    assert joined.name == "Q1.Q2"
    assert concat(Path(), q1) is q1
    assert concat(q1, Path()) is q1


def test_concat_loops_through_shared_vertex():
    union = concat(normal_loop(6, 4, 0), normal_loop(6, 6, 3))
    assert len(union) == 10
    assert union.kind == "union"
    assert union.is_connected


def test_concat_disconnected():
    with pytest.raises(Disconnected):
        concat(walk([1, 2]), walk([3, 4]))


def test_ladder_weight():
    weight = LadderWeight((3, 3, 1, 1))
    assert weight.apply(Partition((3, 3, 3, 2))) == Partition((2, 1))
    assert weight.apply(Partition((1,))) is None
    assert LadderWeight((2,)).apply(Partition((3, 3))) == Partition((1, 1))
    labeled = weight.apply_shape(LabeledPartition(Partition((5, 4, 1, 1)), 1))
    assert labeled == LabeledPartition(Partition((2, 1)), 1)


def test_base_ladder(sigma0_system):
    assert base_ladder(sigma0_system).thresholds == (7, 7, 5, 5, 3, 3, 1, 1)


def test_partial_sum_of_equal_paths_vanishes():
    system = build_circulant(CirculantSpec(3, 2), cyclic_table(3, 2))
    x = walk([1, 2, 3], "x")
    assert z_partial([x], 1, system).is_zero
    assert z_partial([x, x], 2, system).is_zero
    with pytest.raises(ValidationError):
        z_partial([x], 0, system)


def test_spiral_loops_vanish():
    system = build_circulant(CirculantSpec(4, 2), cyclic_table(4, 2))
    checks = check_spiral(system)
    assert [c.arcs for c in checks] == [2, 2]
    assert all(c.vanishes for c in checks)


def test_path_dot():
    text = path_dot([walk([1, 2, 4], "Q1")])
    assert text.splitlines() == [
        "digraph pluq {",
        "  1;",
        "  2;",
        "  4;",
        '  1 -> 2 [label="Q1:0"];',
        '  2 -> 4 [label="Q1:1"];',
        "}",
    ]


def test_path_invariant_labels_follow_arc_positions():
    system = build_circulant(CirculantSpec(3, 2), cyclic_table(3, 2))
    expr = p_tilde_path(walk([1, 2, 3], "x"), system)
    assert set(expr.labels.values()) <= {0, 1}
    assert all(isinstance(shape, LabeledPartition) for _, shape in expr.terms)
    assert p_tilde_path(Path(), system).is_zero


def test_p_hat_without_ladder_is_half_difference():
    system = build_circulant(CirculantSpec(4, 2), cyclic_table(4, 2))
    loop = spiral_loop(4, 0, 2)
    plus, minus = on_common_universe(p_tilde_path(loop, system, 1), p_tilde_path(loop, system, -1))
    assert p_hat(loop, system, LadderWeight((0,))) == (plus - minus).scale(Fraction(1, 2))
    assert p_hat(loop, system).is_zero


def test_homomorphism_report_lists_every_group():
    system = build_circulant(CirculantSpec(3, 2), cyclic_table(3, 2))
    x, y = walk([1, 2, 3], "x"), walk([3, 1], "y")
    report = check_homomorphism(x, y, system)
    assert report.empty_image is None
    assert len(report.matches) == len(p_tilde_path(concat(x, y), system).groups())
    assert report.passed == report.remainder.is_zero


def test_path_invariants_are_grouped_by_delta(sigma0_system):
    expr = p_tilde_path(walk([1, 3, 2], "x"), sigma0_system)
    assert not expr.is_zero
    assert () not in expr.groups()
    assert ((sigma0_system.index, 1),) in expr.groups()


def test_four_vertex_nullset_vanishes(sigma0_system):
    arcs = [(1, 3), (1, 4), (2, 3), (2, 4)]
    assert not p_tilde_path(arc_set(arcs), sigma0_system, 1).is_zero
    assert check_nullset(arcs, sigma0_system).restricted_vanishes


@pytest.fixture
def six_vertex_job(load_job):
    return load_job("circulant_6x6.job")


@pytest.mark.slow
def test_six_vertex_nullset_vanishes(engine, six_vertex_job):
    system = engine.circulant(six_vertex_job)
    arcs = six_vertex_job.paths.nullset
    assert not p_tilde_path(arc_set(arcs), system, 1).is_zero
    assert engine.check(six_vertex_job, "nullset").restricted_vanishes


@pytest.mark.slow
def test_homomorphism_fails_on_a_two_arc_path(engine, six_vertex_job):
    report = engine.check(six_vertex_job, "homomorphism")
    assert report.empty_image is None
    assert not report.passed
    assert len(report.matches) == 10
    assert not any(m.matched for m in report.matches)
    index = engine.circulant(six_vertex_job).index
    assert any(m.group == ((index, 1),) for m in report.matches)


@pytest.mark.slow
def test_loop_union_is_homogeneous_of_degree_one(engine, six_vertex_job):
    report = engine.path(six_vertex_job, "X")
    for expr in (report.plus, report.minus):
        assert not expr.is_zero
        assert {sum(e for _, e in g) for g in expr.groups()} == {1}

