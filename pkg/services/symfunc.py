# services/symfunc.py
"""Partitions, Jacobi–Trudi expansion and the Schur-sum invariants.

An invariant is a SchurExpr: Schur functions s_λ whose coefficients are
grouped by the Δ monomial they carry. Expanding every s_λ through
Jacobi–Trudi gives an HPoly in h0, h1, h2, ... with h0 kept explicit.
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import TYPE_CHECKING, Callable, Dict, List, Optional, Tuple, Union

from sympy import Matrix, Rational, Symbol, ZZ
from sympy.polys.matrices import DomainMatrix

from services.errors import ZERO, DivisionByZero, InadmissibleI, LabeledTermsPresent, NotAPartition, ValidationError
from services.grassmann import BasisLayout, IndexSet, admissible, replace
from services.ratfunc import RatFunc, Universe, evaluate

if TYPE_CHECKING:
    from services.solver import FsetRecord, Solution

logger = logging.getLogger(__name__)

GroupKey = Tuple[Tuple[IndexSet, int], ...]


@dataclass(frozen=True, order=True)
class Partition:
    rows: Tuple[int, ...] = ()

    def __post_init__(self):
        rows = tuple(int(x) for x in self.rows)
        if any(x < 0 for x in rows) or any(a < b for a, b in zip(rows, rows[1:])):
            raise NotAPartition(f"{rows} is not a weakly decreasing list of nonnegative integers")
        while rows and rows[-1] == 0:
            rows = rows[:-1]
        object.__setattr__(self, "rows", rows)

    @property
    def size(self) -> int:
        return sum(self.rows)

    def increasing(self) -> Tuple[int, ...]:
        return tuple(reversed(self.rows))

    def __str__(self) -> str:
        return "(" + ",".join(str(x) for x in self.rows) + ")"

    def latex(self) -> str:
        if not self.rows:
            return r"s_{\emptyset}"
        return "s_{(" + ",".join(str(x) for x in self.increasing()) + ")}"


@dataclass(frozen=True, order=True)
class LabeledPartition:
    part: Partition
    label: int = 0

    def __post_init__(self):
        if self.label < 0:
            raise ValueError(f"labels are nonnegative, got {self.label}")

    def __str__(self) -> str:
        return f"{self.part}_{self.label}"

    def latex(self) -> str:
        rows = ",".join(str(x) for x in self.part.increasing())
        return f"s_{{({rows})_{{{self.label}}}}}"


Shape = Union[Partition, LabeledPartition]


class PartitionRule(str, Enum):
    COMPLEMENT = "complement"
    STANDARD = "standard"


def subset_to_partition(index: IndexSet, layout: Union[BasisLayout, int],
                        rule: PartitionRule = PartitionRule.COMPLEMENT) -> Partition:
    """Young diagram of a minor index set"""
    if isinstance(layout, BasisLayout):
        if not admissible(index, layout):
            raise InadmissibleI(f"{index} is not admissible")
        d = layout.d
    else:
        d = layout
    k = len(index)
    if rule is PartitionRule.STANDARD:
        rows = [index.elements[k - j] - (k + 1 - j) for j in range(1, k + 1)]
    else:
        comp = sorted((x for x in range(1, d + 1) if x not in index), reverse=True)
        rows = [c + j - (d - k) for j, c in enumerate(comp, start=1)]
    if any(x < 0 for x in rows):
        raise NotAPartition(f"{index} in d={d} gives negative rows {rows}")
    return Partition(tuple(rows))


# ────────────────────────── h-polynomials ──────────────────────────

HKey = Tuple[int, ...]


def _hkey_latex(key: HKey) -> str:
    if not key:
        return "1"
    out = []
    for h in sorted(set(key), reverse=True):
        e = key.count(h)
        out.append(f"h_{{{h}}}" if e == 1 else f"h_{{{h}}}^{{{e}}}")
    return " ".join(out)


class HPoly:
    """Polynomial in h0, h1, ... with RatFunc coefficients; keys list h indices, largest first"""

    def __init__(self, universe: Universe, terms: Optional[Dict[HKey, RatFunc]] = None):
        self.universe = universe
        self.terms: Dict[HKey, RatFunc] = {}
        for key, c in (terms or {}).items():
            self._add(tuple(sorted(key, reverse=True)), c)

    def _add(self, key: HKey, c: RatFunc) -> None:
        total = self.terms.get(key)
        total = c if total is None else total + c
        if total.is_zero:
            self.terms.pop(key, None)
        else:
            self.terms[key] = total

    def __add__(self, other: "HPoly") -> "HPoly":
        out = HPoly(self.universe, self.terms)
        for key, c in other.terms.items():
            out._add(key, c)
        return out

    def __sub__(self, other: "HPoly") -> "HPoly":
        return self + other.scale(-1)

    def scale(self, c: Union[RatFunc, int, Fraction]) -> "HPoly":
        if not isinstance(c, RatFunc):
            c = self.universe.const(c)
        return HPoly(self.universe, {k: v * c for k, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, HPoly):
            return NotImplemented
        return (self - other).is_zero

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, *h: int) -> RatFunc:
        return self.terms.get(tuple(sorted(h, reverse=True)), self.universe.zero)

    def with_unit_h0(self) -> "HPoly":
        out = HPoly(self.universe)
        for key, c in self.terms.items():
            out._add(tuple(x for x in key if x != 0), c)
        return out

    def sorted_terms(self) -> List[Tuple[HKey, RatFunc]]:
        return sorted(self.terms.items(), key=lambda kv: (-sum(kv[0]), tuple(-x for x in kv[0])))

    def latex(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for key, c in self.sorted_terms():
            mono = _hkey_latex(key)
            if c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            elif c.is_constant:
                parts.append(f"{c.latex()} {mono}" if key else c.latex())
            else:
                parts.append(rf"\left({c.latex()}\right) {mono}" if key else c.latex())
        text = parts[0]
        for p in parts[1:]:
            text += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return text

    def __str__(self) -> str:
        return self.latex()


@lru_cache(maxsize=None)
def _jacobi_trudi_terms(rows: Tuple[int, ...]) -> Tuple[Tuple[HKey, int], ...]:
    n = len(rows)
    if n == 0:
        return (((), 1),)
    top = rows[0] + n - 1
    domain = ZZ[tuple(Symbol(f"h{i}") for i in range(top + 1))]
    gens = domain.gens
    entries = [[gens[rows[i] - i + j] if rows[i] - i + j >= 0 else domain.zero for j in range(n)]
               for i in range(n)]
    det = DomainMatrix(entries, (n, n), domain).det()
    out = []
    for monom, coeff in det.terms():
        key = tuple(h for h in range(top, -1, -1) for _ in range(monom[h]))
        out.append((key, int(coeff)))
    return tuple(out)


def jacobi_trudi(shape: Partition, universe: Optional[Universe] = None) -> HPoly:
    """s_λ = det(h_{λ_i - i + j}) with h_m = 0 for m < 0"""
    universe = universe or Universe()
    return HPoly(universe, {k: universe.const(c) for k, c in _jacobi_trudi_terms(shape.rows)})


# ────────────────────────── Schur expressions ──────────────────────────

def _shape_key(shape: Shape):
    if isinstance(shape, LabeledPartition):
        return (shape.part.rows, shape.label)
    return (shape.rows, -1)


class SchurExpr:
    """Σ coefficient · Δ-group · s_shape"""

    def __init__(self, universe: Universe, terms: Optional[Dict[Tuple[GroupKey, Shape], RatFunc]] = None):
        self.universe = universe
        self.terms: Dict[Tuple[GroupKey, Shape], RatFunc] = {}
        # arc label of each Δ symbol, when the expression comes from a path
        self.labels: Dict[IndexSet, int] = {}
        for key, c in (terms or {}).items():
            self.add_term(key[0], key[1], c)

    def add_term(self, group: GroupKey, shape: Shape, c: RatFunc) -> None:
        key = (group, shape)
        total = self.terms.get(key)
        total = c if total is None else total + c
        if total.is_zero:
            self.terms.pop(key, None)
        else:
            self.terms[key] = total

    def add_value(self, value: RatFunc, shape: Shape, carrier: Optional[IndexSet] = None) -> None:
        """Split ``value`` by the Δ monomials of its numerator

        With a ``carrier`` the Δ-free part is filed under Δ_carrier and a Δ in
        the denominator is an error.
        """
        u = self.universe
        value = u.lift(value)
        if value.is_zero:
            return
        n_params = len(u.params)
        den_has_delta = any(any(m[n_params:]) for m in value.den.itermonoms())
        if den_has_delta:
            if carrier is not None:
                raise ValidationError(f"value {value} has a Δ denominator and cannot be grouped by Δ")
            self.add_term((), shape, value)
            return
        split: Dict[GroupKey, dict] = {}
        for monom, coeff in value.num.iterterms():
            group = tuple((u.key_of(i + n_params), e) for i, e in enumerate(monom[n_params:]) if e)
            if not group and carrier is not None:
                group = ((carrier, 1),)
            param_part = monom[:n_params] + (0,) * (len(monom) - n_params)
            bucket = split.setdefault(group, {})
            bucket[param_part] = bucket.get(param_part, 0) + coeff
        for group, d in split.items():
            self.add_term(group, shape, RatFunc(u, u.ring.from_dict(d), value.den))

    def __add__(self, other: "SchurExpr") -> "SchurExpr":
        out = SchurExpr(self.universe, self.terms)
        for (g, s), c in other.terms.items():
            out.add_term(g, s, self.universe.lift(c))
        return out

    def __sub__(self, other: "SchurExpr") -> "SchurExpr":
        return self + other.scale(-1)

    def scale(self, c: Union[RatFunc, int, Fraction]) -> "SchurExpr":
        if not isinstance(c, RatFunc):
            c = self.universe.const(c)
        return SchurExpr(self.universe, {k: v * c for k, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, SchurExpr):
            return NotImplemented
        return (self - other).is_zero

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def groups(self) -> Dict[GroupKey, Dict[Shape, RatFunc]]:
        out: Dict[GroupKey, Dict[Shape, RatFunc]] = {}
        for (g, s), c in self.sorted_terms():
            out.setdefault(g, {})[s] = c
        return out

    def lift(self, universe: Universe) -> "SchurExpr":
        out = SchurExpr(universe, {k: universe.lift(c) for k, c in self.terms.items()})
        out.labels = dict(self.labels)
        return out

    def group(self, g: GroupKey) -> "SchurExpr":
        return SchurExpr(self.universe, {k: c for k, c in self.terms.items() if k[0] == g})

    def map_shapes(self, fn: Callable[[Shape], Optional[Shape]]) -> "SchurExpr":
        out = SchurExpr(self.universe)
        for (g, s), c in self.terms.items():
            new = fn(s)
            if new is not None:
                out.add_term(g, new, c)
        return out

    def erase_labels(self) -> "SchurExpr":
        return self.map_shapes(lambda s: s.part if isinstance(s, LabeledPartition) else s)

    def sorted_terms(self) -> List[Tuple[Tuple[GroupKey, Shape], RatFunc]]:
        return sorted(self.terms.items(), key=lambda kv: (kv[0][0], _shape_key(kv[0][1])))

    def latex(self) -> str:
        if not self.terms:
            return "0"
        chunks = []
        for g, shapes in self.groups().items():
            inner = []
            for shape, c in shapes.items():
                if c == 1:
                    inner.append(shape.latex())
                elif c == -1:
                    inner.append(f"-{shape.latex()}")
                else:
                    inner.append(rf"\left({c.latex()}\right) {shape.latex()}")
            body = inner[0] + "".join(f" - {t[1:]}" if t.startswith("-") else f" + {t}" for t in inner[1:])
            if not g:
                chunks.append(body)
                continue
            mono = " ".join(
                self.universe.label(self.universe.index(sym), latex=True) + (f"^{{{e}}}" if e > 1 else "")
                for sym, e in g)
            chunks.append(rf"\left({body}\right) {mono}" if len(inner) > 1 else f"{body} {mono}")
        return " + ".join(chunks)

    def __str__(self) -> str:
        return self.latex()


def assemble_invariant(rec: Optional["FsetRecord"], sol: "Solution", layout: BasisLayout, mode: str = "Ptilde",
                       rule: PartitionRule = PartitionRule.COMPLEMENT,
                       labels: Optional[Dict[IndexSet, int]] = None,
                       carrier: Optional[IndexSet] = None) -> SchurExpr:
    """Σ value(I) · s_{λ(I)} over all admissible minors (P) or over the Fset (Ptilde)"""
    expr = SchurExpr(sol.universe)
    if mode == "P":
        items = [(s, sol.value(s)) for s in layout.admissible_subsets() if s in sol.universe]
    elif rec is None:
        items = []
    else:
        items = list(rec.items())
    for sym, value in items:
        shape: Shape = subset_to_partition(sym, layout, rule)
        if labels is not None and sym in labels:
            shape = LabeledPartition(shape, labels[sym])
        expr.add_value(value, shape, carrier)
    if labels is not None:
        expr.labels = {s: labels[s] for s, _ in items if s in labels}
    return expr


def to_hpoly(expr: SchurExpr) -> HPoly:
    u = expr.universe
    out = HPoly(u)
    for (g, shape), c in expr.terms.items():
        if isinstance(shape, LabeledPartition):
            raise LabeledTermsPresent(f"labeled diagram {shape} must be erased before expansion")
        factor = c * u.monomial(dict(g)) if g else c
        out = out + jacobi_trudi(shape, u).scale(factor)
    return out


# ────────────────────────── arrangement ──────────────────────────

@dataclass
class Arrangement:
    """d x d sparse matrix; column c in I holds row r's value of D[I - c + r]"""

    size: int
    universe: Universe
    cells: Dict[Tuple[int, int], RatFunc] = field(default_factory=dict)

    def value(self, r: int, c: int) -> RatFunc:
        return self.cells.get((r, c), self.universe.zero)

    def all_values(self) -> List[RatFunc]:
        return [self.value(r, c) for r in range(1, self.size + 1) for c in range(1, self.size + 1)]

    def rows(self) -> List[List[RatFunc]]:
        return [[self.value(r, c) for c in range(1, self.size + 1)] for r in range(1, self.size + 1)]

    def latex(self) -> str:
        body = r" \\ ".join(" & ".join("" if v.is_zero else v.latex() for v in row) for row in self.rows())
        return r"\begin{pmatrix} " + body + r" \end{pmatrix}"


def arrange(rec: "FsetRecord", layout: BasisLayout, index: IndexSet, keep_inadmissible: bool = False) -> Arrangement:
    values = dict(rec.items())
    universe = rec.values[0].universe if rec.values else Universe()
    raw: Dict[Tuple[int, int], object] = {}
    for c in index:
        for r in range(1, layout.d + 1):
            if r == c:
                if index in values:
                    raw[(r, c)] = index
                continue
            rep = replace(index, c, r)
            if rep is ZERO:
                continue
            sym = rep[0]
            if sym in values or (keep_inadmissible and not admissible(sym, layout)):
                raw[(r, c)] = sym
    extra = [s for s in raw.values() if s not in values]
    if extra:
        universe = universe.extended(symbols=extra)
    out = Arrangement(layout.d, universe)
    for pos, sym in raw.items():
        v = universe.lift(values[sym]) if sym in values else universe.delta(sym)
        if not v.is_zero:
            out.cells[pos] = v
    return out


# ────────────────────────── basis check ──────────────────────────

@dataclass
class BasisReport:
    size: int
    rank: int
    point: Dict[str, str]

    @property
    def independent(self) -> bool:
        return self.rank == self.size


def basis_check(family: List[SchurExpr], seed: int = 0, attempts: int = 10) -> BasisReport:
    """Rank of the h-expansions at a random rational point (h0 = 1)"""
    if not family:
        return BasisReport(0, 0, {})
    polys = [to_hpoly(ex.erase_labels()).with_unit_h0() for ex in family]
    keys = set()
    for p in polys:
        for c in p.terms.values():
            keys |= c.keys()
    columns = sorted({k for p in polys for k in p.terms})
    rng = random.Random(seed)
    for _ in range(attempts):
        point = {k: Fraction(rng.randint(-40, 40) or 1, rng.randint(1, 37)) for k in keys}
        try:
            rows = [[evaluate(p.terms[col], point) if col in p.terms else Fraction(0) for col in columns] for p in polys]
        except DivisionByZero:
            continue
        rank = Matrix([[Rational(x.numerator, x.denominator) for x in row] for row in rows]).rank() if columns else 0
        return BasisReport(len(family), rank, {str(k): str(v) for k, v in sorted(point.items(), key=lambda kv: str(kv[0]))})
    raise DivisionByZero(f"no pole-free point found in {attempts} attempts")


def on_common_universe(*exprs: SchurExpr) -> List[SchurExpr]:
    """Lift expressions from separate solves into one universe"""
    params: List[str] = []
    symbols = set()
    for ex in exprs:
        params.extend(p for p in ex.universe.params if p not in params)
        symbols |= set(ex.universe.symbols)
    universe = Universe(params, symbols)
    return [ex.lift(universe) for ex in exprs]
