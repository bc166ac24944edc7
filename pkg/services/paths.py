# services/paths.py
"""Circulant quivers with permutation-matrix arrows and path invariants.

Every pair of vertices i < j carries an arrow i -> j (direction +1) with a
permutation matrix and an arrow j -> i (direction -1) with its inverse. A
path invariant restricts the quiver relations to the arcs of the path,
solves without Plücker relations and labels every diagram with the
position (mod m) of the first arc that produced its symbol.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from services.errors import Disconnected, EmptyImage, Inconsistent, ShapeMismatch, ValidationError
from services.grassmann import BasisLayout, IndexSet
from services.quiverrep import (
    Arrow,
    Quiver,
    RepFamily,
    Representation,
    SignRule,
    all_quiver_relations,
    build_representation,
)
from services.solver import SolveConfig, fset, solve
from services.symfunc import (
    GroupKey,
    LabeledPartition,
    Partition,
    PartitionRule,
    SchurExpr,
    Shape,
    assemble_invariant,
    on_common_universe,
    subset_to_partition,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CirculantSpec:
    m: int
    n: int

    def __post_init__(self):
        if self.m < 2 or self.n < 1:
            raise ValidationError(f"circulant needs m >= 2 and n >= 1, got ({self.m},{self.n})")

    @property
    def e(self) -> int:
        return self.n // 2

    def layout(self) -> BasisLayout:
        return BasisLayout((self.n,) * self.m, (self.e,) * self.m)

    def index_set(self) -> IndexSet:
        return IndexSet.of(*(j * self.n - i + 1 for i in range(1, self.e + 1) for j in range(1, self.m + 1)))


def sigma0_block(i: int, j: int, n: int) -> Tuple[int, ...]:
    """Row r of the (i, j) block maps to column perm[r]"""
    levels = [max(i, min(r, j)) for r in range(1, n + 1)]
    perm = list(range(n))
    start = 0
    for r in range(1, n + 1):
        if r == n or levels[r] != levels[start]:
            for k in range(start, r):
                perm[k] = k + 1 if k + 1 < r else start
            start = r
    return tuple(perm)


@dataclass
class ArrowAssignment:
    """Permutation per vertex pair (i, j), i < j, for direction +1"""

    n: int
    table: Dict[Tuple[int, int], Tuple[int, ...]] = field(default_factory=dict)

    @classmethod
    def sigma0(cls, m: int, n: int) -> "ArrowAssignment":
        """Σ₀ blocks: rows with equal max(i, min(r, j)) form a cycle r -> r+1, last -> first"""
        table = {(i, j): sigma0_block(i, j, n) for i in range(1, m + 1) for j in range(i + 1, m + 1)}
        return cls(n, table)

    def permutation(self, i: int, j: int, direction: int = 1) -> Tuple[int, ...]:
        lo, hi = min(i, j), max(i, j)
        try:
            perm = self.table[(lo, hi)]
        except KeyError:
            raise ShapeMismatch(f"no permutation assigned to the pair ({lo},{hi})") from None
        if direction > 0:
            return perm
        inverse = [0] * len(perm)
        for r, c in enumerate(perm):
            inverse[c] = r
        return tuple(inverse)

    def validate(self, m: int) -> None:
        for i in range(1, m + 1):
            for j in range(i + 1, m + 1):
                perm = self.permutation(i, j)
                if sorted(perm) != list(range(self.n)):
                    raise ShapeMismatch(f"pair ({i},{j}): {perm} is not a permutation of size {self.n}")


class CirculantSystem(NamedTuple):
    quiver: Quiver
    rep: Representation
    index: IndexSet


def arc_label(a: int, b: int, direction: int) -> str:
    lo, hi = min(a, b), max(a, b)
    return f"{lo}-{hi}{'+' if direction > 0 else '-'}"


def build_circulant(spec: CirculantSpec, table: ArrowAssignment) -> CirculantSystem:
    if table.n != spec.n:
        raise ShapeMismatch(f"table is for n={table.n}, circulant has n={spec.n}")
    table.validate(spec.m)
    arrows, families = [], {}
    for i in range(1, spec.m + 1):
        for j in range(i + 1, spec.m + 1):
            arrows.append(Arrow(arc_label(i, j, 1), i, j))
            arrows.append(Arrow(arc_label(i, j, -1), j, i))
            families[arc_label(i, j, 1)] = RepFamily.transposition(table.permutation(i, j, 1))
            families[arc_label(i, j, -1)] = RepFamily.transposition(table.permutation(i, j, -1))
    quiver = Quiver(spec.m, arrows)
    rep = build_representation(quiver, spec.layout(), families)
    return CirculantSystem(quiver, rep, spec.index_set())


# ────────────────────────── paths ──────────────────────────

@dataclass(frozen=True)
class PathArrow:
    source: int
    target: int
    direction: int = 1


@dataclass(frozen=True)
class Path:
    arrows: Tuple[PathArrow, ...] = ()
    kind: str = "path"
    name: str = ""

    def __post_init__(self):
        for a in self.arrows:
            if a.source == a.target:
                raise ValidationError(f"circulant quivers have no loop arrows ({a.source} -> {a.target})")

    def __len__(self) -> int:
        return len(self.arrows)

    @property
    def start(self) -> Optional[int]:
        return self.arrows[0].source if self.arrows else None

    @property
    def end(self) -> Optional[int]:
        return self.arrows[-1].target if self.arrows else None

    @property
    def is_connected(self) -> bool:
        return all(a.target == b.source for a, b in zip(self.arrows, self.arrows[1:]))

    @property
    def is_closed(self) -> bool:
        return bool(self.arrows) and self.is_connected and self.start == self.end

    def vertices(self) -> List[int]:
        out = []
        for a in self.arrows:
            for v in (a.source, a.target):
                if v not in out:
                    out.append(v)
        return out

    def rotated(self, vertex: int) -> "Path":
        """Closed path re-based to start at ``vertex``"""
        for k, a in enumerate(self.arrows):
            if a.source == vertex:
                return Path(self.arrows[k:] + self.arrows[:k], self.kind, self.name)
        raise Disconnected(f"vertex {vertex} is not on {self.name or 'the path'}")


def walk(vertices: Sequence[int], name: str = "") -> Path:
    return Path(tuple(PathArrow(a, b) for a, b in zip(vertices, vertices[1:])), "path", name)


def arc_set(arcs: Iterable[Tuple[int, int]], name: str = "") -> Path:
    return Path(tuple(PathArrow(a, b) for a, b in arcs), "arcs", name)


def normal_loop(m: int, length: int, shift: int = 0) -> Path:
    """G_length^(shift): consecutive vertices shift+1, ..., closing back"""
    if not 2 <= length <= m:
        raise ValidationError(f"a normal loop on {m} vertices has length 2..{m}, got {length}")
    verts = [(shift + t) % m + 1 for t in range(length)]
    arrows = tuple(PathArrow(verts[t], verts[(t + 1) % length]) for t in range(length))
    return Path(arrows, "generator", f"G{length}@{shift}")


def chord_loop(m: int, steps: Sequence[int] = (2,), start: int = 0, kind: str = "spiral_type_1") -> Path:
    """Follow circulant chords cycling through ``steps`` until the start vertex returns"""
    v = start % m
    arrows = []
    for t in range(m * len(steps)):
        w = (v + steps[t % len(steps)]) % m
        arrows.append(PathArrow(v + 1, w + 1))
        v = w
        if v == start % m and (t + 1) % len(steps) == 0:
            break
    return Path(tuple(arrows), kind, f"{kind}@{start}")


def spiral_loop(m: int, start: int = 0, step: int = 2) -> Path:
    return chord_loop(m, (step,), start, "spiral_type_1")


def concat(x: Path, y: Path) -> Path:
    if not x.arrows:
        return y
    if not y.arrows:
        return x
    name = f"{x.name}.{y.name}" if x.name and y.name else ""
    if x.end == y.start:
        return Path(x.arrows + y.arrows, "path", name)
    if x.is_closed and y.is_closed:
        shared = [v for v in x.vertices() if v in y.vertices()]
        if shared:
            v = shared[0]
            return Path(x.rotated(v).arrows + y.rotated(v).arrows, "union", name)
    raise Disconnected(f"cannot join {x.name or 'path'} (ends at {x.end}) with {y.name or 'path'} (starts at {y.start})")


# ────────────────────────── invariants ──────────────────────────

@dataclass
class PathOptions:
    sign_rule: SignRule = SignRule.PRODUCT
    partition_rule: PartitionRule = PartitionRule.COMPLEMENT
    max_passes: int = 100


def p_tilde_path(x: Path, system: CirculantSystem, direction: int = 1,
                 options: Optional[PathOptions] = None) -> SchurExpr:
    """Labeled Schur sum of the relations restricted to the arcs of ``x``"""
    options = options or PathOptions()
    rep, index = system.rep, system.index
    m = system.quiver.vertex_count
    position: Dict[str, int] = {}
    for k, a in enumerate(x.arrows):
        position.setdefault(arc_label(a.source, a.target, direction * a.direction), k)
    if not position:
        return SchurExpr(rep.universe)
    relations = all_quiver_relations(rep, index, arrows=position, sign_rule=options.sign_rule)
    cfg = SolveConfig(normalization={index: 1}, max_passes=options.max_passes, layout=rep.layout,
                      delta_pivots=False)
    try:
        sol = solve(relations, cfg)
    except Inconsistent as e:
        raise EmptyImage(f"{x.name or 'path'}: {e.message}") from None
    rec = fset(relations, sol)
    if rec.values and all(v.is_zero for v in rec.values):
        raise EmptyImage(f"{x.name or 'path'}: every Fset symbol vanishes")
    labels: Dict[IndexSet, int] = {}
    for rel in sorted(relations, key=lambda r: position[r.arrow]):
        for sym in rel.symbols():
            labels.setdefault(sym, position[rel.arrow] % m)
    return assemble_invariant(rec, sol, rep.layout, "Ptilde", options.partition_rule, labels, carrier=index)


@dataclass(frozen=True)
class LadderWeight:
    """Row thresholds; rows past the end reuse the last threshold"""

    thresholds: Tuple[int, ...]

    @classmethod
    def from_partition(cls, base: Partition) -> "LadderWeight":
        return cls(base.rows or (0,))

    def threshold(self, i: int) -> int:
        if not self.thresholds:
            return 0
        return self.thresholds[min(i, len(self.thresholds) - 1)]

    def apply(self, shape: Partition) -> Optional[Partition]:
        rows = [r - self.threshold(i) for i, r in enumerate(shape.rows) if r > self.threshold(i)]
        if not rows:
            return None
        return Partition(tuple(sorted(rows, reverse=True)))

    def apply_shape(self, shape: Shape) -> Optional[Shape]:
        if isinstance(shape, LabeledPartition):
            part = self.apply(shape.part)
            return None if part is None else LabeledPartition(part, shape.label)
        return self.apply(shape)


def base_ladder(system: CirculantSystem, rule: PartitionRule = PartitionRule.COMPLEMENT) -> LadderWeight:
    return LadderWeight.from_partition(subset_to_partition(system.index, system.rep.layout, rule))


def p_hat(x: Path, system: CirculantSystem, weight: Optional[LadderWeight] = None,
          options: Optional[PathOptions] = None) -> SchurExpr:
    """(P+ - P-)/2 of the doubled path with the ladder operator applied to every diagram"""
    options = options or PathOptions()
    weight = weight or base_ladder(system, options.partition_rule)
    plus, minus = on_common_universe(p_tilde_path(x, system, 1, options), p_tilde_path(x, system, -1, options))
    return (plus - minus).scale(Fraction(1, 2)).map_shapes(weight.apply_shape)


def z_partial(paths: Sequence[Path], k: int, system: CirculantSystem,
              options: Optional[PathOptions] = None) -> SchurExpr:
    """(1/2k) Σ_{i<j} (P(x_i) - P(x_j))"""
    if k < 1:
        raise ValidationError(f"k must be positive, got {k}")
    exprs = on_common_universe(*(p_tilde_path(x, system, 1, options) for x in paths))
    if not exprs:
        return SchurExpr(system.rep.universe)
    total = SchurExpr(exprs[0].universe)
    for i in range(len(exprs)):
        for j in range(i + 1, len(exprs)):
            total = total + (exprs[i] - exprs[j])
    return total.scale(Fraction(1, 2 * k))


# ────────────────────────── checks ──────────────────────────

@dataclass
class GroupMatch:
    group: GroupKey
    x_group: Optional[GroupKey]
    y_group: Optional[GroupKey]

    @property
    def matched(self) -> bool:
        return self.x_group is not None or self.y_group is not None


@dataclass
class HomomorphismReport:
    matches: List[GroupMatch] = field(default_factory=list)
    remainder: Optional[SchurExpr] = None
    empty_image: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.empty_image is None and all(m.matched for m in self.matches)


def _collapsed(expr: SchurExpr, g: Optional[GroupKey]) -> Dict[Partition, object]:
    if g is None:
        return {}
    out: Dict[Partition, object] = {}
    for (group, shape), c in expr.erase_labels().terms.items():
        if group == g:
            out[shape] = c
    return out


def _group_shape(g: Optional[GroupKey], layout: BasisLayout) -> Optional[Tuple[Partition, ...]]:
    if not g:
        return None
    return tuple(subset_to_partition(sym, layout) for sym, _ in g)


def _group_label(expr: SchurExpr, g: Optional[GroupKey]) -> int:
    if not g:
        return 0
    return min(expr.labels.get(sym, 0) for sym, _ in g)


def check_homomorphism(x: Path, y: Path, system: CirculantSystem,
                       options: Optional[PathOptions] = None) -> HomomorphismReport:
    """Compare P(x.y) group by group with half differences of P(x) and P(y)"""
    report = HomomorphismReport()
    try:
        xy = concat(x, y)
        px, py, pxy = on_common_universe(
            p_tilde_path(x, system, 1, options), p_tilde_path(y, system, 1, options),
            p_tilde_path(xy, system, 1, options))
    except EmptyImage as e:
        report.empty_image = e.message
        return report
    layout = system.rep.layout
    half = pxy.universe.const(Fraction(1, 2))
    x_groups = list(px.groups()) + [None]
    y_groups = list(py.groups()) + [None]
    remainder = SchurExpr(pxy.universe)
    for g in pxy.groups():
        target = _collapsed(pxy, g)
        shape = _group_shape(g, layout)
        label = _group_label(pxy, g)
        ranked = sorted(
            ((gx, gy) for gx in x_groups for gy in y_groups if gx is not None or gy is not None),
            key=lambda pair: (
                _group_shape(pair[1], layout) != shape,
                _group_shape(pair[0], layout) != shape,
                abs(_group_label(py, pair[1]) - label) + abs(_group_label(px, pair[0]) - label),
            ))
        found = GroupMatch(g, None, None)
        for gx, gy in ranked:
            cx, cy = _collapsed(px, gx), _collapsed(py, gy)
            shapes = set(cx) | set(cy) | set(target)
            zero = pxy.universe.zero
            if all((cx.get(s, zero) - cy.get(s, zero)) * half == target.get(s, zero) for s in shapes):
                found = GroupMatch(g, gx, gy)
                break
        if not found.matched:
            remainder = remainder + pxy.group(g)
        report.matches.append(found)
    report.remainder = remainder
    return report


@dataclass
class ZeroCheck:
    name: str
    arcs: int
    groups: int

    @property
    def vanishes(self) -> bool:
        return self.groups == 0


def check_spiral(system: CirculantSystem, step: int = 2, options: Optional[PathOptions] = None) -> List[ZeroCheck]:
    """Doubled-path invariants of every distinct step-chord loop"""
    m = system.quiver.vertex_count
    seen, out = set(), []
    for start in range(m):
        loop = spiral_loop(m, start, step)
        key = frozenset((min(a.source, a.target), max(a.source, a.target)) for a in loop.arrows)
        if key in seen:
            continue
        seen.add(key)
        expr = p_hat(loop, system, options=options)
        out.append(ZeroCheck(loop.name, len(loop), len(expr.groups())))
    return out


@dataclass
class NullsetReport:
    restricted: SchurExpr
    removed: SchurExpr

    @property
    def restricted_vanishes(self) -> bool:
        return self.restricted.is_zero

    @property
    def removed_vanishes(self) -> bool:
        return self.removed.is_zero


def all_arcs(m: int) -> List[Tuple[int, int]]:
    return [(i, j) for i in range(1, m + 1) for j in range(i + 1, m + 1)]


def check_nullset(arcs: Sequence[Tuple[int, int]], system: CirculantSystem,
                  options: Optional[PathOptions] = None) -> NullsetReport:
    """P-hat restricted to the arcs, and P-hat of the full quiver with them removed"""
    m = system.quiver.vertex_count
    wanted = {(min(a, b), max(a, b)) for a, b in arcs}
    restricted = p_hat(arc_set(arcs, "nullset"), system, options=options)
    rest = arc_set([p for p in all_arcs(m) if p not in wanted], "complement")
    return NullsetReport(restricted, p_hat(rest, system, options=options))


@dataclass
class LadderCount:
    expected: int
    observed: int


def check_ladder(system: CirculantSystem, options: Optional[PathOptions] = None) -> LadderCount:
    """Summand count m*ceil(m/2)*n against the terms of P on the full quiver"""
    m = system.quiver.vertex_count
    n = system.rep.layout.dims[0]
    expr = p_tilde_path(arc_set(all_arcs(m), "full"), system, 1, options)
    return LadderCount(m * math.ceil(m / 2) * n, len(expr.terms))


def path_dot(paths: Sequence[Path]) -> str:
    """DOT-like text of a union of paths; edges are labeled path:position"""
    lines = ["digraph pluq {"]
    vertices = sorted({v for p in paths for v in p.vertices()})
    lines.extend(f"  {v};" for v in vertices)
    for p in paths:
        for k, a in enumerate(p.arrows):
            lines.append(f'  {a.source} -> {a.target} [label="{p.name or p.kind}:{k}"];')
    lines.append("}")
    return "\n".join(lines)
