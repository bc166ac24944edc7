# services/jobspec.py
"""Line-oriented job files.

A job file is a sequence of ``[section]`` headers and ``key = value`` lines;
``#`` starts a comment. Keys with an argument (``arrow v``, ``path Q1``,
``perm 1,2``) name the thing they define. ``serialize`` writes the same
grammar back so that ``parse_jobspec(serialize(job)) == job``.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from services.errors import ParseError, ValidationError
from services.grassmann import BasisLayout, IndexSet, admissible
from services.quiverrep import Arrow, FamilyKind, RepFamily, SignRule
from services.symfunc import PartitionRule

logger = logging.getLogger(__name__)

SECTIONS = ("quiver", "representation", "grassmannian", "solve", "paths")
_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_FAMILY = re.compile(r"^(identity|quantum|sigma_pq|matrix|permutation)\s*(\((.*)\))?$", re.S)
_LOOP = re.compile(r"^(normal|spiral)\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)$")
_INLINE_LOOP = re.compile(r"^G(\d+)@(\d+)$")


@dataclass
class PathsSpec:
    m: int = 0
    n: int = 0
    table: str = "sigma0"
    perms: Dict[Tuple[int, int], Tuple[int, ...]] = field(default_factory=dict)
    walks: Dict[str, Tuple[int, ...]] = field(default_factory=dict)
    loops: Dict[str, Tuple[str, int, int]] = field(default_factory=dict)
    unions: Dict[str, Tuple[str, ...]] = field(default_factory=dict)
    homomorphism: Tuple[str, ...] = ()
    nullset: Tuple[Tuple[int, int], ...] = ()
    zsum: Tuple[str, ...] = ()
    zk: int = 1
    ladder: Tuple[int, ...] = ()

    def names(self) -> List[str]:
        return list(self.walks) + list(self.loops) + list(self.unions)


@dataclass
class JobSpec:
    vertices: int = 0
    arrows: List[Arrow] = field(default_factory=list)
    params: Tuple[str, ...] = ()
    families: Dict[str, RepFamily] = field(default_factory=dict)
    dims: Tuple[int, ...] = ()
    e_vec: Tuple[int, ...] = ()
    index: Optional[IndexSet] = None
    sign_rule: SignRule = SignRule.PRODUCT
    partition_rule: PartitionRule = PartitionRule.COMPLEMENT
    pluecker: bool = False
    pin_base: bool = True
    pins: Dict[IndexSet, Fraction] = field(default_factory=dict)
    free: Dict[IndexSet, Fraction] = field(default_factory=dict)
    keep_free: Tuple[IndexSet, ...] = ()
    point: Dict[str, Fraction] = field(default_factory=dict)
    max_passes: Optional[int] = None
    paths: Optional[PathsSpec] = None

    @property
    def layout(self) -> BasisLayout:
        return BasisLayout(self.dims, self.e_vec)

    @property
    def index_set(self) -> IndexSet:
        return self.index if self.index is not None else self.layout.top_index_set()

    def echo(self) -> Dict[str, object]:
        """Structured echo for JSON output"""
        return {
            "vertices": self.vertices,
            "arrows": [[a.label, a.source, a.target] for a in self.arrows],
            "params": list(self.params),
            "dims": list(self.dims),
            "e": list(self.e_vec),
            "I": str(self.index_set) if self.dims else None,
            "sign_rule": self.sign_rule.value,
            "partition_rule": self.partition_rule.value,
            "pluecker": self.pluecker,
        }


# ────────────────────────── parsing ──────────────────────────

class _Line:
    def __init__(self, number: int, raw: str):
        self.number = number
        self.raw = raw

    def error(self, message: str, fragment: str = "", expected=()) -> ParseError:
        col = self.raw.find(fragment) + 1 if fragment and fragment in self.raw else 1
        return ParseError(message, self.number, col, expected)

    def attempt(self, fn, text: str, what: str):
        try:
            return fn(text)
        except (ValueError, ZeroDivisionError, ValidationError) as e:
            raise self.error(f"bad {what} {text!r}: {getattr(e, 'message', e)}", text) from None


def _fraction(text: str) -> Fraction:
    return Fraction(text.strip())


def _ints(text: str) -> Tuple[int, ...]:
    text = text.strip()
    return tuple(int(x) for x in text.split(",")) if text else ()


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ValueError("expected true or false")


def _pairs(text: str, key_fn) -> list:
    out = []
    for chunk in (c for c in text.split(";") if c.strip()):
        if ":" not in chunk:
            raise ValueError(f"expected 'key: value' in {chunk.strip()!r}")
        k, v = chunk.rsplit(":", 1)
        out.append((key_fn(k.strip()), _fraction(v)))
    return out


def _family(text: str) -> RepFamily:
    m = _FAMILY.match(text.strip())
    if not m:
        raise ValueError("unknown representation family")
    kind, args = m.group(1), (m.group(3) or "").strip()
    if kind == "identity":
        return RepFamily.identity()
    if kind == "quantum":
        return RepFamily.quantum(args)
    if kind == "sigma_pq":
        p, q = (x.strip() for x in args.split(","))
        return RepFamily.sigma_pq(p, q)
    if kind == "permutation":
        return RepFamily.transposition(_ints(args))
    rows = re.findall(r"\[([^\[\]]*)\]", args)
    if not rows:
        raise ValueError("matrix needs rows like [[a, b], [c, d]]")
    return RepFamily.explicit([[x.strip() for x in r.split(",")] for r in rows])


def _family_text(fam: RepFamily) -> str:
    if fam.kind is FamilyKind.IDENTITY:
        return "identity"
    if fam.kind is FamilyKind.QUANTUM:
        return f"quantum({fam.params[0]})"
    if fam.kind is FamilyKind.SIGMA_PQ:
        return f"sigma_pq({fam.params[0]}, {fam.params[1]})"
    if fam.kind is FamilyKind.PERMUTATION:
        return f"permutation({', '.join(str(x) for x in fam.permutation)})"
    return "matrix([" + ", ".join("[" + ", ".join(r) + "]" for r in fam.rows) + "])"


def _arc(text: str) -> Tuple[int, int]:
    a, b = text.split("-")
    return int(a), int(b)


_KEYS = {
    "quiver": ("vertices", "arrow <label>"),
    "representation": ("params", "<arrow label>"),
    "grassmannian": ("dims", "e", "I", "sign_rule", "partition_rule"),
    "solve": ("pluecker", "pin_base", "pin", "free", "keep_free", "point", "max_passes"),
    "paths": ("circulant", "table", "perm <i>,<j>", "path <name>", "loop <name>", "union <name>",
              "homomorphism", "nullset", "zsum", "zk", "ladder"),
}


def parse_jobspec(text: str) -> JobSpec:
    job = JobSpec()
    section: Optional[str] = None
    families: List[Tuple[_Line, str, str]] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = _Line(number, raw)
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if body.startswith("["):
            if not body.endswith("]") or body[1:-1].strip() not in SECTIONS:
                raise line.error("unknown section", body, [f"[{s}]" for s in SECTIONS])
            section = body[1:-1].strip()
            continue
        if "=" not in body:
            raise line.error("missing '='", body, ["key = value"])
        key, value = (x.strip() for x in body.split("=", 1))
        if section is None:
            raise line.error("key outside of any section", key, [f"[{s}]" for s in SECTIONS])
        head, _, arg = key.partition(" ")
        arg = arg.strip()
        if section == "representation" and key not in ("params",):
            families.append((line, key, value))
            continue
        _apply(job, section, head, arg, value, line)
    for line, label, value in families:
        if not _NAME.match(label):
            raise line.error("arrow labels are identifiers", label, _KEYS["representation"])
        job.families[label] = line.attempt(_family, value, "representation")
    validate(job)
    return job


def _apply(job: JobSpec, section: str, head: str, arg: str, value: str, line: _Line) -> None:
    if section == "quiver":
        if head == "vertices" and not arg:
            job.vertices = line.attempt(int, value, "vertex count")
            return
        if head == "arrow" and _NAME.match(arg):
            if "->" not in value:
                raise line.error("arrow needs 'source -> target'", value, ["<int> -> <int>"])
            src, tgt = (line.attempt(int, x, "vertex") for x in value.split("->", 1))
            job.arrows.append(Arrow(arg, src, tgt))
            return
    elif section == "representation":
        job.params = tuple(p.strip() for p in value.split(",") if p.strip())
        return
    elif section == "grassmannian" and not arg:
        if head == "dims":
            job.dims = line.attempt(_ints, value, "dimensions")
            return
        if head == "e":
            job.e_vec = line.attempt(_ints, value, "subspace dimensions")
            return
        if head == "I":
            job.index = None if value == "top" else line.attempt(IndexSet.parse, value, "index set")
            return
        if head == "sign_rule":
            job.sign_rule = line.attempt(SignRule, value, "sign rule")
            return
        if head == "partition_rule":
            job.partition_rule = line.attempt(PartitionRule, value, "partition rule")
            return
    elif section == "solve" and not arg:
        if head == "pluecker":
            job.pluecker = line.attempt(_bool, value, "flag")
            return
        if head == "pin_base":
            job.pin_base = line.attempt(_bool, value, "flag")
            return
        if head in ("pin", "free"):
            pairs = line.attempt(lambda v: _pairs(v, IndexSet.parse), value, head)
            getattr(job, "pins" if head == "pin" else "free").update(pairs)
            return
        if head == "keep_free":
            job.keep_free = tuple(line.attempt(IndexSet.parse, c, "index set")
                                  for c in value.split(";") if c.strip())
            return
        if head == "point":
            job.point.update(line.attempt(lambda v: _pairs(v, str), value, "point"))
            return
        if head == "max_passes":
            job.max_passes = line.attempt(int, value, "pass limit")
            return
    elif section == "paths":
        _apply_paths(job, head, arg, value, line)
        return
    raise line.error(f"unknown key {(head + ' ' + arg).strip()!r} in [{section}]", head, _KEYS[section])


def _apply_paths(job: JobSpec, head: str, arg: str, value: str, line: _Line) -> None:
    spec = job.paths = job.paths or PathsSpec()
    if head == "circulant" and not arg:
        mn = line.attempt(_ints, value, "circulant size")
        if len(mn) != 2:
            raise line.error("circulant needs 'm, n'", value, ["<m>, <n>"])
        spec.m, spec.n = mn
    elif head == "table" and not arg:
        if value != "sigma0":
            raise line.error("unknown table", value, ["sigma0"])
        spec.table = value
    elif head == "perm" and arg:
        pair = line.attempt(_ints, arg, "vertex pair")
        if len(pair) != 2:
            raise line.error("perm needs a vertex pair 'i,j'", arg, ["<i>,<j>"])
        spec.perms[(pair[0], pair[1])] = line.attempt(_ints, value, "permutation")
    elif head == "path" and _NAME.match(arg):
        spec.walks[arg] = line.attempt(lambda v: tuple(int(x) for x in v.split(">")), value, "vertex walk")
    elif head == "loop" and _NAME.match(arg):
        m = _LOOP.match(value.replace(" ", ""))
        if not m:
            raise line.error("bad loop", value, ["normal(<length>, <shift>)", "spiral(<start>, <step>)"])
        spec.loops[arg] = (m.group(1), int(m.group(2)), int(m.group(3)))
    elif head == "union" and _NAME.match(arg):
        spec.unions[arg] = tuple(x.strip() for x in value.split(",") if x.strip())
    elif head in ("homomorphism", "zsum") and not arg:
        setattr(spec, head, tuple(x.strip() for x in value.split(",") if x.strip()))
    elif head == "zk" and not arg:
        spec.zk = line.attempt(int, value, "k")
    elif head == "nullset" and not arg:
        spec.nullset = tuple(line.attempt(_arc, x.strip(), "arc") for x in value.split(",") if x.strip())
    elif head == "ladder" and not arg:
        spec.ladder = () if value == "base" else line.attempt(_ints, value, "ladder")
    else:
        raise line.error(f"unknown key {(head + ' ' + arg).strip()!r} in [paths]", head, _KEYS["paths"])


def validate(job: JobSpec) -> None:
    if job.paths is not None and job.paths.m:
        _validate_paths(job.paths)
    if not job.vertices and not job.dims:
        if job.paths is None or not job.paths.m:
            raise ValidationError("job defines neither a quiver nor a circulant")
        return
    if job.vertices < 1:
        raise ValidationError("[quiver] vertices must be at least 1")
    if len(job.dims) != job.vertices or len(job.e_vec) != job.vertices:
        raise ValidationError(
            f"dims {job.dims} and e {job.e_vec} must both list {job.vertices} vertices")
    layout = job.layout
    for a in job.arrows:
        if not (1 <= a.source <= job.vertices and 1 <= a.target <= job.vertices):
            raise ValidationError(f"arrow {a.label!r} uses a vertex outside 1..{job.vertices}")
        if a.label not in job.families:
            raise ValidationError(f"no representation given for arrow {a.label!r}")
    for label, fam in job.families.items():
        if label not in {a.label for a in job.arrows}:
            raise ValidationError(f"representation for unknown arrow {label!r}")
        missing = [p for p in fam.params if p not in job.params]
        if missing:
            raise ValidationError(f"arrow {label!r} uses undeclared parameter(s) {', '.join(missing)}")
    index = job.index_set
    if len(index) != layout.e or index.elements[-1] > layout.d:
        raise ValidationError(f"I={index} is not an {layout.e}-subset of 1..{layout.d}")
    if not admissible(index, layout):
        raise ValidationError(f"I={index} does not meet the block dimensions {layout.e_vec}")
    for sym in list(job.pins) + list(job.free) + list(job.keep_free):
        if len(sym) != layout.e or not admissible(sym, layout):
            raise ValidationError(f"{sym} is not an admissible minor")
    for name in job.point:
        if name not in job.params:
            raise ValidationError(f"point gives a value for undeclared parameter {name!r}")
    if job.max_passes is not None and job.max_passes < 1:
        raise ValidationError("max_passes must be at least 1")


def _validate_paths(spec: PathsSpec) -> None:
    names = spec.names()
    if len(set(names)) != len(names):
        raise ValidationError("path names must be unique")
    for name, walk in spec.walks.items():
        if any(not 1 <= v <= spec.m for v in walk):
            raise ValidationError(f"path {name!r} leaves the vertices 1..{spec.m}")
    for name, parts in spec.unions.items():
        for part in parts:
            if part not in names and not _INLINE_LOOP.match(part):
                raise ValidationError(f"union {name!r} refers to unknown path {part!r}")
    for part in spec.homomorphism + spec.zsum:
        if part not in names:
            raise ValidationError(f"unknown path {part!r}")
    if spec.homomorphism and len(spec.homomorphism) != 2:
        raise ValidationError("homomorphism needs exactly two paths")


# ────────────────────────── serialization ──────────────────────────

def _frac(x: Fraction) -> str:
    return str(Fraction(x))


def serialize(job: JobSpec) -> str:
    out: List[str] = []
    if job.vertices:
        out.append("[quiver]")
        out.append(f"vertices = {job.vertices}")
        out.extend(f"arrow {a.label} = {a.source} -> {a.target}" for a in job.arrows)
        out.append("")
        out.append("[representation]")
        if job.params:
            out.append(f"params = {', '.join(job.params)}")
        out.extend(f"{label} = {_family_text(fam)}" for label, fam in job.families.items())
        out.append("")
        out.append("[grassmannian]")
        out.append(f"dims = {', '.join(map(str, job.dims))}")
        out.append(f"e = {', '.join(map(str, job.e_vec))}")
        out.append(f"I = {job.index if job.index is not None else 'top'}")
        out.append(f"sign_rule = {job.sign_rule.value}")
        out.append(f"partition_rule = {job.partition_rule.value}")
        out.append("")
        out.append("[solve]")
        out.append(f"pluecker = {str(job.pluecker).lower()}")
        out.append(f"pin_base = {str(job.pin_base).lower()}")
        if job.pins:
            out.append("pin = " + "; ".join(f"{k}: {_frac(v)}" for k, v in job.pins.items()))
        if job.free:
            out.append("free = " + "; ".join(f"{k}: {_frac(v)}" for k, v in job.free.items()))
        if job.keep_free:
            out.append("keep_free = " + "; ".join(str(k) for k in job.keep_free))
        if job.point:
            out.append("point = " + "; ".join(f"{k}: {_frac(v)}" for k, v in job.point.items()))
        if job.max_passes is not None:
            out.append(f"max_passes = {job.max_passes}")
        out.append("")
    if job.paths is not None:
        p = job.paths
        out.append("[paths]")
        out.append(f"circulant = {p.m}, {p.n}")
        out.append(f"table = {p.table}")
        out.extend(f"perm {i},{j} = {', '.join(map(str, perm))}" for (i, j), perm in p.perms.items())
        out.extend(f"path {name} = {' > '.join(map(str, w))}" for name, w in p.walks.items())
        out.extend(f"loop {name} = {kind}({a}, {b})" for name, (kind, a, b) in p.loops.items())
        out.extend(f"union {name} = {', '.join(parts)}" for name, parts in p.unions.items())
        if p.homomorphism:
            out.append(f"homomorphism = {', '.join(p.homomorphism)}")
        if p.nullset:
            out.append("nullset = " + ", ".join(f"{a}-{b}" for a, b in p.nullset))
        if p.zsum:
            out.append(f"zsum = {', '.join(p.zsum)}")
        out.append(f"zk = {p.zk}")
        out.append("ladder = " + (", ".join(map(str, p.ladder)) if p.ladder else "base"))
        out.append("")
    return "\n".join(out)


def parse_sizes(text: str) -> Tuple[int, ...]:
    """"2..8" gives the even sizes 2, 4, 6, 8; "2, 6" lists sizes directly"""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split("..", 1))
            sizes = tuple(i for i in range(lo, hi + 1) if i % 2 == 0)
        else:
            sizes = _ints(text)
    except ValueError:
        raise ValidationError(f"bad size range {text!r}; expected 'a..b' or a comma list")
    if not sizes:
        raise ValidationError(f"size range {text!r} is empty")
    return sizes
