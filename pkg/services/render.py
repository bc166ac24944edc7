# services/render.py
"""JSON, LaTeX and CSV views of computation results"""
import csv
import io
import json
import logging
from typing import Dict, Iterable, List, Optional, Sequence

from services.errors import ValidationError
from services.grassmann import Relation
from services.quiverrep import SOURCE_RULE_WARNING, SignRule
from services.ratfunc import RatFunc
from services.symfunc import Arrangement, BasisReport, GroupKey, HPoly, LabeledPartition, SchurExpr

logger = logging.getLogger(__name__)

FORMATS = ("json", "latex", "csv", "dot")


def group_text(group: GroupKey) -> str:
    """"{1,3,7,8}" for a single Δ, "{1,3}^2*{2,4}" for a monomial, "" for none"""
    return "*".join(f"{sym}^{e}" if e > 1 else str(sym) for sym, e in group)


# ----- payloads -----

def relation_payload(rel: Relation) -> Dict[str, object]:
    out: Dict[str, object] = {"kind": rel.kind.value, "poly": str(rel.poly)}
    if rel.arrow is not None:
        out.update(arrow=rel.arrow, s=rel.s, t=rel.t, components=rel.components)
    if rel.index is not None:
        out["index"] = str(rel.index)
    return out


def assignment_payload(symbols: Iterable, values: Iterable[RatFunc]) -> List[List[str]]:
    return [[str(s), str(v)] for s, v in zip(symbols, values)]


def solved_payload(solved) -> Dict[str, object]:
    sol, rec = solved.solution, solved.record
    return {
        "assignment": assignment_payload(sorted(sol.assignment), (sol.assignment[s] for s in sorted(sol.assignment))),
        "free": [str(s) for s in sol.free],
        "residual": [relation_payload(r) for r in sol.residual],
        "fset": assignment_payload(rec.symbols, rec.values),
        "log": list(sol.log),
    }


def schur_payload(expr: SchurExpr) -> Dict[str, object]:
    terms = []
    for (group, shape), c in expr.sorted_terms():
        if isinstance(shape, LabeledPartition):
            terms.append([str(c), group_text(group), list(shape.part.increasing()), shape.label])
        else:
            terms.append([str(c), group_text(group), list(shape.increasing())])
    return {"terms": terms, "latex": expr.latex()}


def hpoly_payload(poly: HPoly) -> Dict[str, object]:
    return {
        "terms": [[str(c), list(key)] for key, c in poly.sorted_terms()],
        "latex": poly.latex(),
    }


def arrangement_payload(arr: Arrangement) -> Dict[str, object]:
    return {
        "size": arr.size,
        "cells": [[r, c, str(v)] for (r, c), v in sorted(arr.cells.items())],
    }


def basis_payload(report: BasisReport) -> Dict[str, object]:
    return {"size": report.size, "rank": report.rank, "independent": report.independent, "point": report.point}


def envelope(job_echo: Optional[Dict[str, object]], result: object,
             warnings: Sequence[str] = (), genericity: Sequence[str] = ()) -> str:
    warnings = list(warnings)
    if job_echo and job_echo.get("sign_rule") == SignRule.SOURCE.value and SOURCE_RULE_WARNING not in warnings:
        warnings.insert(0, SOURCE_RULE_WARNING)
    payload = {
        "job_echo": job_echo,
        "result": result,
        "warnings": warnings,
        "genericity_assumptions": list(genericity),
    }
    return json.dumps(payload, indent=2, ensure_ascii=False)


# ----- latex -----

def relations_latex(relations: Sequence[Relation]) -> str:
    lines = []
    for rel in relations:
        lines.append(f"% {rel.describe()}")
        lines.append(f"{rel.poly.latex()} = 0")
    return "\n".join(lines)


def assignment_latex(symbols: Iterable, values: Iterable[RatFunc]) -> str:
    lines = []
    for s, v in zip(symbols, values):
        label = v.universe.label(v.universe.index(s), latex=True) if s in v.universe else str(s)
        lines.append(f"{label} = {v.latex()}")
    return "\n".join(lines)


# ----- csv -----

def csv_text(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def require_format(fmt: str, allowed: Sequence[str], command: str) -> None:
    if fmt not in allowed:
        raise ValidationError(f"{command} supports --format {', '.join(allowed)}, not {fmt!r}")
