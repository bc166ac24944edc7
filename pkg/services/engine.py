# services/engine.py
"""Job-level pipelines used by the CLI commands"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Union

from services.config import Config
from services.errors import ValidationError
from services.grassmann import BasisLayout, IndexSet, Relation, pluecker_relations
from services.jobspec import JobSpec
from services.paths import (
    ArrowAssignment,
    CirculantSpec,
    CirculantSystem,
    LadderWeight,
    Path,
    PathOptions,
    build_circulant,
    check_homomorphism,
    check_ladder,
    check_nullset,
    check_spiral,
    concat,
    normal_loop,
    p_hat,
    p_tilde_path,
    spiral_loop,
    walk,
    z_partial,
)
from services.quiverrep import (
    Quiver,
    SignRule,
    Representation,
    all_quiver_relations,
    build_representation,
    relation_symbols,
    vanishing_relations,
)
from services.ratfunc import Universe
from services.solver import (
    FsetRecord,
    SignCount,
    Solution,
    SolveConfig,
    SweepRow,
    a2_identity_system,
    fset,
    sign_stats,
    solve,
    sweep_ratio,
)
from services.symfunc import (
    Arrangement,
    BasisReport,
    HPoly,
    PartitionRule,
    SchurExpr,
    arrange,
    assemble_invariant,
    basis_check,
    to_hpoly,
)

logger = logging.getLogger(__name__)


@dataclass
class System:
    job: JobSpec
    layout: BasisLayout
    rep: Representation
    index: IndexSet
    universe: Universe
    relations: List[Relation]


@dataclass
class Solved:
    system: System
    solution: Solution
    record: FsetRecord

    @property
    def genericity(self) -> List[str]:
        return self.solution.genericity


@dataclass
class StatsReport:
    row: SweepRow
    arrangement: SignCount
    admissible: SignCount
    fset: SignCount


@dataclass
class PathReport:
    name: str
    plus: SchurExpr
    minus: SchurExpr
    hat: SchurExpr
    warnings: List[str] = field(default_factory=list)


class PluqEngine:
    """Builds and solves the systems a job describes"""

    def __init__(self, config: Config):
        self.config = config
        self.last: Optional[Solved] = None

    # -----------------------
    # systems
    # -----------------------

    def representation(self, job: JobSpec) -> Representation:
        if not job.vertices:
            raise ValidationError("this command needs a [quiver] section")
        quiver = Quiver(job.vertices, list(job.arrows))
        return build_representation(quiver, job.layout, job.families, job.params)

    def system(self, job: JobSpec, include_pluecker: bool = False, all_symbols: bool = False) -> System:
        rep = self.representation(job)
        layout, index = job.layout, job.index_set
        symbols = relation_symbols(rep, index, sign_rule=job.sign_rule) | {index}
        symbols |= set(job.pins) | set(job.free) | set(job.keep_free)
        if include_pluecker or all_symbols:
            symbols |= set(layout.subsets())
        universe = Universe(job.params, symbols)
        relations = all_quiver_relations(rep, index, universe, sign_rule=job.sign_rule)
        relations += vanishing_relations(layout, universe)
        if include_pluecker:
            relations += pluecker_relations(layout.e, layout.d, universe)
        logger.info(f"system: {len(universe.symbols)} symbols, {len(relations)} relations")
        return System(job, layout, rep, index, universe, relations)

    def solve_config(self, job: JobSpec, include_pluecker: bool) -> SolveConfig:
        pins: Dict[IndexSet, object] = {}
        if job.pin_base:
            pins[job.index_set] = 1
        pins.update(job.pins)
        return SolveConfig(
            include_pluecker=include_pluecker,
            normalization=pins,
            parameter_domain=job.params,
            max_passes=self.config.max_passes,
            keep_free=frozenset(job.keep_free),
            layout=job.layout,
        )

    def solve(self, job: JobSpec, include_pluecker: Optional[bool] = None) -> Solved:
        include = job.pluecker if include_pluecker is None else include_pluecker
        system = self.system(job, include)
        sol = solve(system.relations, self.solve_config(job, include), system.universe)
        return Solved(system, sol, fset(system.relations, sol))

    # -----------------------
    # commands
    # -----------------------

    def relations(self, job: JobSpec) -> List[Relation]:
        return self.system(job, job.pluecker, all_symbols=True).relations

    def invariant(self, job: JobSpec, mode: str = "Ptilde", basis: str = "schur") -> Union[SchurExpr, HPoly]:
        if mode not in ("P", "Ptilde"):
            raise ValidationError(f"unknown invariant mode {mode!r}")
        solved = self.solve(job, include_pluecker=(mode == "P"))
        expr = assemble_invariant(solved.record, solved.solution, solved.system.layout, mode, job.partition_rule)
        self.last = solved
        return to_hpoly(expr) if basis == "h" else expr

    def arrange(self, job: JobSpec, keep_inadmissible: bool = False) -> Arrangement:
        solved = self.solve(job, include_pluecker=False)
        self.last = solved
        return arrange(solved.record, solved.system.layout, solved.system.index, keep_inadmissible)

    def stats(self, job: JobSpec) -> StatsReport:
        solved = self.solve(job, include_pluecker=False)
        self.last = solved
        layout, sol = solved.system.layout, solved.solution
        point, free, default = job.point, job.free, self.config.default_free
        cells = sign_stats(arrange(solved.record, layout, solved.system.index), point, free, default)
        minors = []
        for sym in layout.admissible_subsets():
            minors.append(sol.value(sym) if sym in sol.universe else sol.universe.const(free.get(sym, default)))
        return StatsReport(
            SweepRow(layout.dims[0], cells.positives, cells.negatives, cells.zeros),
            cells,
            sign_stats(minors, point, free, default),
            sign_stats(solved.record, point, free, default),
        )

    def sweep(self, job: Optional[JobSpec], sizes: Sequence[int]) -> List[SweepRow]:
        sign_rule = job.sign_rule if job is not None else SignRule.PRODUCT
        free = job.free if job is not None else None
        return sweep_ratio(sizes, sign_rule, free, self.config.default_free, self.config.max_passes)

    def basis(self, job: Optional[JobSpec], sizes: Sequence[int]) -> BasisReport:
        """Linear independence of the A2 identity invariants over ``sizes``"""
        sign_rule = job.sign_rule if job is not None else SignRule.PRODUCT
        rule = job.partition_rule if job is not None else PartitionRule.COMPLEMENT
        family = []
        for i in sizes:
            layout, index, relations = a2_identity_system(i, sign_rule)
            sol = solve(relations, SolveConfig(normalization={index: 1}, max_passes=self.config.max_passes))
            family.append(assemble_invariant(fset(relations, sol), sol, layout, "Ptilde", rule))
        return basis_check(family, seed=self.config.seed)

    # -----------------------
    # circulant paths
    # -----------------------

    def circulant(self, job: JobSpec) -> CirculantSystem:
        spec = job.paths
        if spec is None or not spec.m:
            raise ValidationError("this command needs a [paths] section with a circulant")
        table = ArrowAssignment.sigma0(spec.m, spec.n)
        table.table.update(spec.perms)
        return build_circulant(CirculantSpec(spec.m, spec.n), table)

    def path_options(self, job: JobSpec) -> PathOptions:
        return PathOptions(job.sign_rule, job.partition_rule, self.config.max_passes)

    def resolve_path(self, job: JobSpec, name: str) -> Path:
        spec = job.paths
        m = spec.m
        if name in spec.walks:
            return walk(spec.walks[name], name)
        if name in spec.loops:
            kind, a, b = spec.loops[name]
            loop = normal_loop(m, a, b) if kind == "normal" else spiral_loop(m, a, b)
            return Path(loop.arrows, loop.kind, name)
        if name in spec.unions:
            out = Path()
            for part in spec.unions[name]:
                out = concat(out, self._union_part(job, part))
            return Path(out.arrows, "union", name)
        if name.startswith("G") and "@" in name:
            return self._union_part(job, name)
        raise ValidationError(f"unknown path {name!r}; known: {', '.join(spec.names()) or 'none'}")

    def _union_part(self, job: JobSpec, part: str) -> Path:
        if part.startswith("G") and "@" in part and part not in job.paths.names():
            length, shift = part[1:].split("@")
            return normal_loop(job.paths.m, int(length), int(shift))
        return self.resolve_path(job, part)

    def ladder(self, job: JobSpec) -> Optional[LadderWeight]:
        return LadderWeight(job.paths.ladder) if job.paths.ladder else None

    def path(self, job: JobSpec, name: str) -> PathReport:
        system, options = self.circulant(job), self.path_options(job)
        x = self.resolve_path(job, name)
        plus = p_tilde_path(x, system, 1, options)
        minus = p_tilde_path(x, system, -1, options)
        hat = p_hat(x, system, self.ladder(job), options)
        report = PathReport(name, plus, minus, hat)
        if not x.is_connected:
            report.warnings.append(f"{name} is not a connected path")
        return report

    def zsum(self, job: JobSpec) -> SchurExpr:
        system = self.circulant(job)
        paths = [self.resolve_path(job, n) for n in job.paths.zsum]
        return z_partial(paths, job.paths.zk, system, self.path_options(job))

    def check(self, job: JobSpec, what: str):
        system, options = self.circulant(job), self.path_options(job)
        if what == "homomorphism":
            if not job.paths.homomorphism:
                raise ValidationError("[paths] homomorphism = <x>, <y> is required")
            x, y = (self.resolve_path(job, n) for n in job.paths.homomorphism)
            return check_homomorphism(x, y, system, options)
        if what == "spiral":
            return check_spiral(system, options=options)
        if what == "nullset":
            if not job.paths.nullset:
                raise ValidationError("[paths] nullset = a-b, ... is required")
            return check_nullset(job.paths.nullset, system, options)
        if what == "ladder":
            return check_ladder(system, options)
        raise ValidationError(f"unknown check {what!r}")
