# services/grassmann.py
"""Combinatorics of the ambient Grassmannian Gr(e, d).

Block basis layouts, minor index sets, sorting signs, the block-admissibility
rule and the Grassmann–Plücker exchange relations.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Iterator, List, Optional, Sequence, Tuple, Union

from services.errors import ZERO, OutNotMember, SizeMismatch, ValidationError, Zero
from services.ratfunc import RatFunc, Universe

logger = logging.getLogger(__name__)

_SET_RE = re.compile(r"^\{\s*(\d+(\s*,\s*\d+)*)?\s*\}$")


@dataclass(frozen=True, order=True)
class IndexSet:
    """Strictly increasing tuple of basis indices, written {i1,...,ik}"""

    elements: Tuple[int, ...]

    def __post_init__(self):
        els = tuple(int(x) for x in self.elements)
        object.__setattr__(self, "elements", els)
        if any(x < 1 for x in els):
            raise ValidationError(f"basis indices start at 1, got {els}")
        if any(a >= b for a, b in zip(els, els[1:])):
            raise ValidationError(f"index set {els} is not strictly increasing")

    @classmethod
    def of(cls, *values: int) -> "IndexSet":
        return cls(tuple(sorted(values)))

    @classmethod
    def parse(cls, text: str) -> "IndexSet":
        text = text.strip()
        if not _SET_RE.match(text):
            raise ValidationError(f"expected an index set like {{3,4,7,8}}, got {text!r}")
        body = text[1:-1].strip()
        return cls(tuple(int(x) for x in body.split(","))) if body else cls(())

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, x: object) -> bool:
        return x in self.elements

    def __str__(self) -> str:
        return "{" + ",".join(str(x) for x in self.elements) + "}"


# One Plücker coordinate per index set
PlueckerSymbol = IndexSet


@dataclass(frozen=True)
class BasisLayout:
    """Per-vertex blocks of the ordered basis {1..d}"""

    dims: Tuple[int, ...]
    e_vec: Tuple[int, ...]
    offsets: Tuple[int, ...] = field(init=False)

    def __post_init__(self):
        dims = tuple(int(x) for x in self.dims)
        e_vec = tuple(int(x) for x in self.e_vec)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "e_vec", e_vec)
        if len(dims) != len(e_vec):
            raise ValidationError(f"{len(dims)} dimensions but {len(e_vec)} subspace dimensions")
        for i, (d, e) in enumerate(zip(dims, e_vec), start=1):
            if d < 0 or not 0 <= e <= d:
                raise ValidationError(f"vertex {i}: need 0 <= e_i <= d_i, got e={e}, d={d}")
        offsets, total = [], 0
        for d in dims:
            offsets.append(total)
            total += d
        object.__setattr__(self, "offsets", tuple(offsets))

    @property
    def d(self) -> int:
        return sum(self.dims)

    @property
    def e(self) -> int:
        return sum(self.e_vec)

    @property
    def vertex_count(self) -> int:
        return len(self.dims)

    def block(self, vertex: int) -> range:
        """Global indices of ``vertex`` (1-based)"""
        off = self.offsets[vertex - 1]
        return range(off + 1, off + self.dims[vertex - 1] + 1)

    def vertex_of(self, index: int) -> int:
        for v in range(self.vertex_count, 0, -1):
            if index > self.offsets[v - 1]:
                return v
        raise ValidationError(f"index {index} outside the basis 1..{self.d}")

    def top_index_set(self) -> IndexSet:
        """The last e_i indices of every block"""
        out: List[int] = []
        for v in range(1, self.vertex_count + 1):
            blk = self.block(v)
            out.extend(blk[len(blk) - self.e_vec[v - 1]:])
        return IndexSet(tuple(out))

    def subsets(self) -> Iterator[IndexSet]:
        for combo in combinations(range(1, self.d + 1), self.e):
            yield IndexSet(combo)

    def admissible_subsets(self) -> Iterator[IndexSet]:
        return (s for s in self.subsets() if admissible(s, self))


# ────────────────────────── signs ──────────────────────────

def sort_with_sign(values: Sequence[int]) -> Union[Tuple[IndexSet, int], Zero]:
    """Sorted set and the sign of the sorting permutation"""
    vals = list(values)
    if len(set(vals)) != len(vals):
        return ZERO
    inversions = sum(1 for i in range(len(vals)) for j in range(i + 1, len(vals)) if vals[i] > vals[j])
    return IndexSet(tuple(sorted(vals))), (-1 if inversions % 2 else 1)


def replace(index: IndexSet, out: int, in_: int) -> Union[Tuple[IndexSet, int], Zero]:
    """Replace ``out`` by ``in_`` in place and sort"""
    if out not in index:
        raise OutNotMember(f"{out} is not a member of {index}")
    return sort_with_sign([in_ if x == out else x for x in index])


def admissible(index: IndexSet, layout: BasisLayout) -> bool:
    if len(index) != layout.e:
        raise SizeMismatch(f"{index} has {len(index)} elements, expected {layout.e}")
    for v in range(1, layout.vertex_count + 1):
        blk = layout.block(v)
        if sum(1 for x in index if x in blk) != layout.e_vec[v - 1]:
            return False
    return True


# ────────────────────────── relations ──────────────────────────

class RelationKind(str, Enum):
    QUIVER = "quiver"
    PLUECKER = "pluecker"
    VANISHING = "vanishing"


@dataclass
class Relation:
    """A polynomial equation poly = 0 in the Plücker symbols"""

    poly: RatFunc
    kind: RelationKind
    arrow: Optional[str] = None
    s: Optional[int] = None
    t: Optional[int] = None
    index: Optional[IndexSet] = None
    components: int = 1

    @property
    def is_trivial(self) -> bool:
        return self.poly.is_zero

    def symbols(self) -> set:
        return self.poly.delta_keys()

    def describe(self) -> str:
        if self.kind is RelationKind.QUIVER:
            return f"F({self.arrow},{self.s},{self.t})"
        if self.kind is RelationKind.VANISHING:
            return f"vanish{self.index}"
        return "pluecker"


def pluecker_relations(k: int, d: int, universe: Optional[Universe] = None) -> List[Relation]:
    """Grassmann–Plücker exchange relations of Gr(k, d), deduplicated up to sign"""
    if not 1 <= k <= d:
        raise ValidationError(f"need 1 <= k <= d, got k={k}, d={d}")
    if universe is None:
        universe = Universe((), (IndexSet(c) for c in combinations(range(1, d + 1), k)))
    seen = set()
    out: List[Relation] = []
    basis = range(1, d + 1)
    for a_set in combinations(basis, k - 1):
        for c_set in combinations(basis, k + 1):
            total = universe.ring.zero
            for pos, c in enumerate(c_set):
                left = sort_with_sign(a_set + (c,))
                if left is ZERO:
                    continue
                left_set, sign = left
                right_set = IndexSet(c_set[:pos] + c_set[pos + 1:])
                term = universe.delta(left_set).num * universe.delta(right_set).num
                total += term if (sign * (-1) ** pos) > 0 else -term
            if not total:
                continue
            if total.LC < 0:
                total = -total
            key = frozenset(total.items())
            if key in seen:
                continue
            seen.add(key)
            out.append(Relation(RatFunc(universe, total, canonical=True), RelationKind.PLUECKER))
    logger.debug(f"Gr({k},{d}): {len(out)} Plücker relations")
    return out
