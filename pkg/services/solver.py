# services/solver.py
"""Successive linear elimination over the combined relation system.

Pivots are chosen by coefficient tier inside repeated scans of the
relations: a parameter monomial first, then a parameter polynomial, then a
Δ monomial, then anything else that is not identically zero. Every pivot
beyond the first tier records the nonvanishing condition it relies on.
With delta_pivots off only the first two tiers are used, so no solved value
ever carries a Δ in its denominator.

A relation whose Δ part is a single monomial forces one of its factors to
vanish; the latest free factor is set to zero.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import psutil

from services.errors import Inconsistent, ValidationError
from services.grassmann import BasisLayout, IndexSet, Relation, RelationKind, admissible
from services.quiverrep import Quiver, Arrow, RepFamily, SignRule, all_quiver_relations, build_representation
from services.ratfunc import Number, RatFunc, Universe, evaluate, format_poly, split_by_degree
from services.symfunc import Arrangement, arrange

logger = logging.getLogger(__name__)

MAX_TIER = 4


@dataclass
class SolveConfig:
    include_pluecker: bool = False
    normalization: Dict[IndexSet, Union[RatFunc, Number]] = field(default_factory=dict)
    parameter_domain: Tuple[str, ...] = ()
    max_passes: int = 100
    keep_free: FrozenSet[IndexSet] = frozenset()
    layout: Optional[BasisLayout] = None
    delta_pivots: bool = True

    def __post_init__(self):
        if self.max_passes < 1:
            raise ValidationError(f"max_passes must be at least 1, got {self.max_passes}")
        if self.layout is not None:
            for sym in self.normalization:
                if not admissible(sym, self.layout):
                    raise ValidationError(f"pinned symbol {sym} is not admissible")


@dataclass
class Solution:
    universe: Universe
    assignment: Dict[IndexSet, RatFunc] = field(default_factory=dict)
    free: List[IndexSet] = field(default_factory=list)
    residual: List[Relation] = field(default_factory=list)
    log: List[str] = field(default_factory=list)
    genericity: List[str] = field(default_factory=list)

    def value(self, sym: IndexSet) -> RatFunc:
        if sym in self.assignment:
            return self.assignment[sym]
        return self.universe.delta(sym)


@dataclass
class FsetRecord:
    symbols: List[IndexSet]
    values: List[RatFunc]

    def items(self):
        return zip(self.symbols, self.values)


@dataclass(frozen=True)
class SignCount:
    zeros: int
    positives: int
    negatives: int

    @property
    def total(self) -> int:
        return self.zeros + self.positives + self.negatives


@dataclass(frozen=True)
class SweepRow:
    i: int
    plus: int
    minus: int
    zeros: int = 0

    @property
    def ratio(self) -> str:
        return "inf" if self.minus == 0 else f"{self.plus / self.minus:.6f}"

    def csv(self) -> List[str]:
        return [str(self.i), str(self.plus), str(self.minus), self.ratio]


# ────────────────────────── elimination ──────────────────────────

class _Eliminator:
    """Working state of one solve call"""

    def __init__(self, universe: Universe, cfg: SolveConfig):
        self.u = universe
        self.cfg = cfg
        self.assignment: Dict[IndexSet, RatFunc] = {}
        self.work: List[Tuple[Relation, RatFunc]] = []
        self.log: List[str] = []
        self.genericity: List[str] = []
        self.n_params = len(universe.params)

    def assume(self, condition: str) -> None:
        if condition not in self.genericity:
            logger.info(f"genericity assumption: {condition}")
            self.genericity.append(condition)

    def bind(self, sym: IndexSet, value: RatFunc, why: str) -> None:
        self.assignment[sym] = value
        self.log.append(f"{why}: {self.u.label(self.u.index(sym))} = {value}")
        binding = {sym: value}
        for k, v in list(self.assignment.items()):
            if k != sym:
                self.assignment[k] = v.substitute(binding)
        self.work = [(rel, self._numerator(rel, poly.substitute(binding))) for rel, poly in self.work]

    def _numerator(self, rel: Relation, f: RatFunc) -> RatFunc:
        if f.num.is_ground and f.num:
            raise Inconsistent(f"{rel.describe()} reduces to the nonzero constant {f}")
        num = f.num
        if num and not num.is_ground:
            num = self._strip_monomial(num)
        return RatFunc(self.u, num)

    def _strip_monomial(self, num):
        monoms = list(num.itermonoms())
        common = [min(m[i] for m in monoms) for i in range(len(monoms[0]))]
        for i in range(self.n_params):
            common[i] = 0
        if not any(common):
            return num
        quotient = {tuple(a - b for a, b in zip(m, common)): c for m, c in num.iterterms()}
        if not any(any(m[self.n_params:]) for m in quotient):
            return num
        for i, e in enumerate(common):
            if e:
                self.assume(f"{self.u.label(i)} != 0")
        return num.ring.from_dict(quotient)

    def zero_factor(self, rel: Relation, f: RatFunc, n_pass: int) -> bool:
        """Set the latest factor of a relation c(params)·(Δ monomial) to zero"""
        monoms = list(f.num.itermonoms())
        powers = {m[self.n_params:] for m in monoms}
        if len(powers) != 1:
            return False
        (exps,) = powers
        factors = [self.u.key_of(self.n_params + i) for i, e in enumerate(exps) if e]
        factors = [s for s in factors if s not in self.cfg.keep_free]
        if not factors:
            return False
        coeff = f.num.ring.from_dict({m[:self.n_params] + (0,) * len(exps): c for m, c in f.num.iterterms()})
        if not coeff.is_ground:
            self.assume(f"{format_poly(coeff, self.u)} != 0")
        sym = max(factors)
        logger.debug(f"pass {n_pass}: {rel.describe()} -> {sym} = 0")
        self.bind(sym, self.u.zero, f"pass {n_pass} {rel.describe()} zero factor")
        return True

    def _tier(self, coeff) -> int:
        has_delta = any(any(m[self.n_params:]) for m in coeff.itermonoms())
        single = len(coeff) == 1
        if has_delta:
            return 3 if single else 4
        return 1 if single else 2

    def candidate(self, f: RatFunc, limit: int):
        """Best (tier, symbol, coeff, rest) with tier <= limit, or None"""
        best = None
        num = f.num
        used = set()
        for m in num.itermonoms():
            used.update(i for i in range(self.n_params, len(m)) if m[i])
        for i in sorted(used):
            sym = self.u.key_of(i)
            if sym in self.cfg.keep_free:
                continue
            parts = split_by_degree(num, i)
            if max(parts) != 1:
                continue
            coeff = parts[1]
            tier = self._tier(coeff)
            if tier > limit:
                continue
            if best is None or tier < best[0] or (tier == best[0] and sym > best[1]):
                best = (tier, sym, coeff, parts.get(0, num.ring.zero))
        return best

    def pivot(self, rel: Relation, choice, n_pass: int) -> None:
        tier, sym, coeff, rest = choice
        if tier > 1:
            self.assume(f"{format_poly(coeff, self.u)} != 0")
        logger.debug(f"pass {n_pass}: {rel.describe()} -> {sym} (tier {tier})")
        self.bind(sym, RatFunc(self.u, -rest, coeff), f"pass {n_pass} {rel.describe()} tier {tier}")

    def run(self) -> bool:
        top = MAX_TIER if self.cfg.delta_pivots else 2
        tier = 1
        for n_pass in range(1, self.cfg.max_passes + 1):
            progress = False
            for idx in range(len(self.work)):
                rel, f = self.work[idx]
                if f.is_zero:
                    continue
                if self.zero_factor(rel, f, n_pass):
                    progress = True
                    continue
                choice = self.candidate(f, tier)
                if choice is None:
                    continue
                self.pivot(rel, choice, n_pass)
                progress = True
                if tier > 1:
                    break
            if progress:
                tier = 1
            elif tier < top:
                tier += 1
            else:
                return True
        logger.warning(f"solver stopped after max_passes={self.cfg.max_passes}")
        return False


def solve(relations: Sequence[Relation], cfg: SolveConfig, universe: Optional[Universe] = None) -> Solution:
    """Eliminate linear unknowns until no relation offers a usable pivot"""
    if universe is None:
        universe = relations[0].poly.universe if relations else Universe(cfg.parameter_domain)
    elim = _Eliminator(universe, cfg)
    active = [r for r in relations if r.kind is not RelationKind.PLUECKER or cfg.include_pluecker]
    occurring = set()
    for rel in active:
        occurring |= rel.symbols()

    zeros = {r.index for r in active if r.kind is RelationKind.VANISHING}
    for sym in sorted(zeros):
        pinned = cfg.normalization.get(sym)
        if pinned is not None and pinned != 0:
            raise Inconsistent(f"{sym} is pinned to {pinned} but vanishes")

    elim.work = [(r, universe.lift(r.poly)) for r in active if r.kind is not RelationKind.VANISHING]
    for sym in sorted(zeros):
        if sym in universe:
            elim.bind(sym, universe.zero, "vanishing")
    for sym, value in sorted(cfg.normalization.items()):
        if sym not in universe:
            logger.debug(f"pinned symbol {sym} does not occur in any relation")
            continue
        value = value if isinstance(value, RatFunc) else universe.const(value)
        elim.bind(sym, universe.lift(value), "pinned")
    # plain numerators from here on
    elim.work = [(rel, elim._numerator(rel, f)) for rel, f in elim.work]
    elim.run()

    sol = Solution(universe, dict(elim.assignment), log=elim.log, genericity=elim.genericity)
    sol.residual = [rel for rel, f in elim.work if not f.is_zero]
    sol.free = sorted(s for s in occurring if s not in sol.assignment)
    for sym in sol.free:
        sol.assignment[sym] = universe.delta(sym)
    for rel in unsound_relations(active, sol):
        if rel not in sol.residual:
            logger.error(f"solution does not satisfy {rel.describe()}")
            sol.residual.append(rel)
    logger.info(
        f"solved {len(sol.assignment) - len(sol.free)} symbols, {len(sol.free)} free, "
        f"{len(sol.residual)} residual")
    return sol


def unsound_relations(relations: Iterable[Relation], sol: Solution) -> List[Relation]:
    """Relations that do not vanish under the solution"""
    bad = []
    for rel in relations:
        f = sol.universe.lift(rel.poly)
        binding = {k: sol.assignment[k] for k in f.delta_keys() if k in sol.assignment}
        if not f.substitute(binding).is_zero:
            bad.append(rel)
    return bad


def fset(relations: Iterable[Relation], sol: Solution) -> FsetRecord:
    symbols = set()
    for rel in relations:
        if rel.kind is RelationKind.QUIVER:
            symbols |= rel.symbols()
    ordered = sorted(symbols)
    return FsetRecord(ordered, [sol.value(s) for s in ordered])


# ────────────────────────── statistics ──────────────────────────

def sign_stats(values: Union[FsetRecord, Arrangement, Iterable[RatFunc]],
               point: Optional[Mapping[str, Number]] = None,
               free_assignment: Optional[Mapping[IndexSet, Number]] = None,
               default_free: Number = 1) -> SignCount:
    """Count zero, positive and negative values at a rational point"""
    if isinstance(values, FsetRecord):
        values = values.values
    elif isinstance(values, Arrangement):
        values = values.all_values()
    point = dict(point or {})
    free_assignment = dict(free_assignment or {})
    zeros = pos = neg = 0
    for value in values:
        bindings: Dict[object, Number] = dict(point)
        for key in value.delta_keys():
            bindings[key] = free_assignment.get(key, default_free)
        x = evaluate(value, bindings) if not value.is_constant else value.constant()
        if x == 0:
            zeros += 1
        elif x > 0:
            pos += 1
        else:
            neg += 1
    return SignCount(zeros, pos, neg)


def a2_identity_system(i: int, sign_rule: SignRule = SignRule.PRODUCT):
    """A2 with identity block of size i and I the top half of each block"""
    if i < 2 or i % 2:
        raise ValidationError(f"sweep sizes must be even and at least 2, got {i}")
    layout = BasisLayout((i, i), (i // 2, i // 2))
    quiver = Quiver(2, [Arrow("v", 1, 2)])
    rep = build_representation(quiver, layout, {"v": RepFamily.identity()})
    index = layout.top_index_set()
    relations = all_quiver_relations(rep, index, sign_rule=sign_rule)
    return layout, index, relations


def sweep_ratio(sizes: Iterable[int], sign_rule: SignRule = SignRule.PRODUCT,
                free_assignment: Optional[Mapping[IndexSet, Number]] = None,
                default_free: Number = 1, max_passes: int = 100) -> List[SweepRow]:
    """Sign counts over the arrangement cells of each A2 identity system

    Every cell of the arrangement counts, not just the Fset entries. Free
    symbols take `free_assignment` or `default_free`.
    """
    rows = []
    proc = psutil.Process()
    for i in sizes:
        layout, index, relations = a2_identity_system(i, sign_rule)
        cfg = SolveConfig(normalization={index: 1}, max_passes=max_passes, layout=layout)
        sol = solve(relations, cfg)
        rec = fset(relations, sol)
        counts = sign_stats(arrange(rec, layout, index), {}, free_assignment, default_free)
        rows.append(SweepRow(i, counts.positives, counts.negatives, counts.zeros))
        logger.info(
            f"sweep i={i}: +{counts.positives} -{counts.negatives} "
            f"(rss {proc.memory_info().rss / 1e6:.1f} MB)")
    return rows
