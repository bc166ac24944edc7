# services/quiverrep.py
"""Quivers, block-matrix representations and the quiver relations F(v, s, t).

For an arrow v: a -> b, a source index s in I and a target index t outside I,

    F(v,s,t) = sum_{s'} sum_{t' in I, t' in block(b)} e(s',t') mu[s',t'] D[I-s+s'] D[I-t'+t]
             - sum_{s'} sign(I-s+s') mu[s',t] D[I-s+s'] D[I]

where D[...] is the sorted Plücker symbol and replacements that collide drop
the term. The sign e(s',t') is the product of both sorting signs under the
``product`` rule, or the source-side sorting sign alone under ``source``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from services.errors import ZERO, BadIndices, InadmissibleI, ShapeMismatch, ValidationError
from services.grassmann import (
    BasisLayout,
    IndexSet,
    Relation,
    RelationKind,
    admissible,
    replace,
)
from services.ratfunc import RatFunc, Universe

logger = logging.getLogger(__name__)

Matrix = List[List[RatFunc]]


class SignRule(str, Enum):
    """PRODUCT signs a term by both sorting signs; SOURCE keeps only the source-side one"""

    PRODUCT = "product"
    SOURCE = "source"


SOURCE_RULE_WARNING = (
    "sign_rule=source negates target-side minors term by term; "
    "its relations do not vanish on invariant subspaces"
)


@dataclass(frozen=True)
class Arrow:
    label: str
    source: int
    target: int


@dataclass
class Quiver:
    """Directed multigraph on vertices 1..vertex_count"""

    vertex_count: int
    arrows: List[Arrow] = field(default_factory=list)

    def __post_init__(self):
        labels = set()
        for a in self.arrows:
            if a.label in labels:
                raise ValidationError(f"duplicate arrow label {a.label!r}")
            labels.add(a.label)
            for v in (a.source, a.target):
                if not 1 <= v <= self.vertex_count:
                    raise ValidationError(f"arrow {a.label!r} uses vertex {v} outside 1..{self.vertex_count}")

    def arrow(self, label: str) -> Arrow:
        for a in self.arrows:
            if a.label == label:
                return a
        raise ValidationError(f"unknown arrow {label!r}")


# ────────────────────────── families ──────────────────────────

class FamilyKind(str, Enum):
    IDENTITY = "identity"
    QUANTUM = "quantum"
    SIGMA_PQ = "sigma_pq"
    EXPLICIT = "matrix"
    PERMUTATION = "permutation"


@dataclass(frozen=True)
class RepFamily:
    """How to fill one arrow block"""

    kind: FamilyKind
    params: Tuple[str, ...] = ()
    rows: Tuple[Tuple[str, ...], ...] = ()
    permutation: Tuple[int, ...] = ()

    @classmethod
    def identity(cls) -> "RepFamily":
        return cls(FamilyKind.IDENTITY)

    @classmethod
    def quantum(cls, p: str) -> "RepFamily":
        return cls(FamilyKind.QUANTUM, (p,))

    @classmethod
    def sigma_pq(cls, p: str, q: str) -> "RepFamily":
        return cls(FamilyKind.SIGMA_PQ, (p, q))

    @classmethod
    def explicit(cls, rows: Sequence[Sequence[object]]) -> "RepFamily":
        return cls(FamilyKind.EXPLICIT, rows=tuple(tuple(str(x) for x in r) for r in rows))

    @classmethod
    def transposition(cls, perm: Sequence[int]) -> "RepFamily":
        return cls(FamilyKind.PERMUTATION, permutation=tuple(int(x) for x in perm))

    def matrix(self, universe: Universe, n_rows: int, n_cols: int) -> Matrix:
        zero, one = universe.zero, universe.one
        if self.kind in (FamilyKind.IDENTITY, FamilyKind.QUANTUM, FamilyKind.SIGMA_PQ, FamilyKind.PERMUTATION):
            if n_rows != n_cols:
                raise ShapeMismatch(f"{self.kind.value} needs a square block, got {n_rows}x{n_cols}")
        if self.kind is FamilyKind.IDENTITY:
            return [[one if i == j else zero for j in range(n_cols)] for i in range(n_rows)]
        if self.kind is FamilyKind.QUANTUM:
            if n_rows != 2:
                raise ShapeMismatch(f"quantum permutation is 2x2, block is {n_rows}x{n_cols}")
            return _two_by_two(universe.param(self.params[0]))
        if self.kind is FamilyKind.SIGMA_PQ:
            if n_rows % 2:
                raise ShapeMismatch(f"sigma_pq needs an even block size, got {n_rows}")
            out = [[zero] * n_cols for _ in range(n_rows)]
            for b in range(n_rows // 2):
                blk = _two_by_two(universe.param(self.params[b % 2]))
                for i in range(2):
                    for j in range(2):
                        out[2 * b + i][2 * b + j] = blk[i][j]
            return out
        if self.kind is FamilyKind.PERMUTATION:
            perm = self.permutation
            if sorted(perm) != list(range(n_rows)):
                raise ShapeMismatch(f"{perm} is not a permutation of 0..{n_rows - 1}")
            return [[one if perm[i] == j else zero for j in range(n_cols)] for i in range(n_rows)]
        if len(self.rows) != n_rows or any(len(r) != n_cols for r in self.rows):
            raise ShapeMismatch(f"explicit matrix does not have shape {n_rows}x{n_cols}")
        return [[universe.parse(x) for x in r] for r in self.rows]


def _two_by_two(p: RatFunc) -> Matrix:
    return [[p, 1 - p], [1 - p, p]]


# ────────────────────────── representations ──────────────────────────

@dataclass
class Representation:
    """Block matrices over RatFunc, one per arrow, shaped d_source x d_target"""

    quiver: Quiver
    layout: BasisLayout
    universe: Universe
    blocks: Dict[str, Matrix]
    _lifted: Dict[Tuple[str, int], Matrix] = field(default_factory=dict, repr=False)

    def entry(self, label: str, s_prime: int, t_prime: int) -> RatFunc:
        """mu[s', t'] by global basis indices"""
        arrow = self.quiver.arrow(label)
        row = s_prime - self.layout.offsets[arrow.source - 1] - 1
        col = t_prime - self.layout.offsets[arrow.target - 1] - 1
        return self.blocks[label][row][col]

    def lifted(self, label: str, universe: Universe) -> Matrix:
        key = (label, hash(universe))
        if key not in self._lifted:
            self._lifted[key] = [[universe.lift(x) for x in row] for row in self.blocks[label]]
        return self._lifted[key]


def build_representation(quiver: Quiver, layout: BasisLayout, families: Mapping[str, RepFamily],
                         params: Sequence[str] = ()) -> Representation:
    if layout.vertex_count != quiver.vertex_count:
        raise ValidationError(
            f"layout has {layout.vertex_count} vertices, quiver has {quiver.vertex_count}")
    universe = Universe(params)
    blocks: Dict[str, Matrix] = {}
    for arrow in quiver.arrows:
        fam = families.get(arrow.label)
        if fam is None:
            raise ValidationError(f"no representation given for arrow {arrow.label!r}")
        blocks[arrow.label] = fam.matrix(
            universe, layout.dims[arrow.source - 1], layout.dims[arrow.target - 1])
    return Representation(quiver, layout, universe, blocks)


# ────────────────────────── relations ──────────────────────────

def _check_indices(rep: Representation, arrow: Arrow, s: int, t: int, index: IndexSet) -> None:
    src = rep.layout.block(arrow.source)
    tgt = rep.layout.block(arrow.target)
    if s not in index or s not in src:
        raise BadIndices(f"s={s} must lie in I={index} and in the source block of {arrow.label!r}")
    if t in index or t not in tgt:
        raise BadIndices(f"t={t} must lie outside I={index} and in the target block of {arrow.label!r}")


def _terms(rep: Representation, arrow: Arrow, s: int, t: int, index: IndexSet, sign_rule: SignRule):
    """Yield (sign, mu, left symbol, right symbol) for every surviving term"""
    src = rep.layout.block(arrow.source)
    tgt = rep.layout.block(arrow.target)
    targets_in_i = [x for x in index if x in tgt]
    for s_prime in src:
        left = replace(index, s, s_prime)
        if left is ZERO:
            continue
        left_set, left_sign = left
        for t_prime in targets_in_i:
            mu = rep.entry(arrow.label, s_prime, t_prime)
            if mu.is_zero:
                continue
            right = replace(index, t_prime, t)
            if right is ZERO:
                continue
            right_set, right_sign = right
            sign = left_sign * right_sign if sign_rule is SignRule.PRODUCT else left_sign
            yield sign, (s_prime, t_prime), left_set, right_set
        mu = rep.entry(arrow.label, s_prime, t)
        if not mu.is_zero:
            yield -left_sign, (s_prime, t), left_set, index


def relation_pairs(rep: Representation, index: IndexSet,
                   arrows: Optional[Iterable[str]] = None) -> List[Tuple[Arrow, int, int]]:
    """(arrow, s, t) triples in output order: arrow label, then s, then t"""
    labels = sorted(arrows) if arrows is not None else sorted(a.label for a in rep.quiver.arrows)
    out = []
    for label in labels:
        arrow = rep.quiver.arrow(label)
        src = rep.layout.block(arrow.source)
        tgt = rep.layout.block(arrow.target)
        for s in (x for x in index if x in src):
            for t in (x for x in tgt if x not in index):
                out.append((arrow, s, t))
    return out


def relation_symbols(rep: Representation, index: IndexSet, arrows: Optional[Iterable[str]] = None,
                     sign_rule: SignRule = SignRule.PRODUCT) -> set:
    symbols = set()
    for arrow, s, t in relation_pairs(rep, index, arrows):
        for _, _, left, right in _terms(rep, arrow, s, t, index, sign_rule):
            symbols.update((left, right))
    return symbols


def quiver_relation(rep: Representation, label: str, s: int, t: int, index: IndexSet,
                    universe: Optional[Universe] = None,
                    sign_rule: SignRule = SignRule.PRODUCT) -> Relation:
    arrow = rep.quiver.arrow(label)
    _check_indices(rep, arrow, s, t, index)
    if universe is None:
        universe = rep.universe.extended(symbols=relation_symbols(rep, index, [label], sign_rule))
    block = rep.lifted(label, universe)
    src_off = rep.layout.offsets[arrow.source - 1]
    tgt_off = rep.layout.offsets[arrow.target - 1]
    total = universe.zero
    for sign, (s_prime, t_prime), left, right in _terms(rep, arrow, s, t, index, sign_rule):
        mu = block[s_prime - src_off - 1][t_prime - tgt_off - 1]
        term = mu * universe.delta(left) * universe.delta(right)
        total = total + term if sign > 0 else total - term
    components = sum(1 for x in index if x in rep.layout.block(arrow.target))
    return Relation(total, RelationKind.QUIVER, arrow=label, s=s, t=t, components=components)


def all_quiver_relations(rep: Representation, index: IndexSet, universe: Optional[Universe] = None,
                         arrows: Optional[Iterable[str]] = None,
                         sign_rule: SignRule = SignRule.PRODUCT) -> List[Relation]:
    if not admissible(index, rep.layout):
        raise InadmissibleI(f"{index} does not meet the block dimensions {rep.layout.e_vec}")
    arrows = list(arrows) if arrows is not None else None
    if universe is None:
        universe = rep.universe.extended(symbols=relation_symbols(rep, index, arrows, sign_rule) | {index})
    out = [quiver_relation(rep, a.label, s, t, index, universe, sign_rule)
           for a, s, t in relation_pairs(rep, index, arrows)]
    trivial = sum(1 for r in out if r.is_trivial)
    if trivial:
        logger.info(f"{trivial} of {len(out)} quiver relations vanish identically")
    return out


def vanishing_relations(layout: BasisLayout, universe: Optional[Universe] = None) -> List[Relation]:
    """One relation D[J] = 0 per inadmissible e-subset J"""
    inadmissible = [j for j in layout.subsets() if not admissible(j, layout)]
    if universe is None:
        universe = Universe((), inadmissible)
    return [Relation(universe.delta(j), RelationKind.VANISHING, index=j)
            for j in inadmissible if j in universe]
