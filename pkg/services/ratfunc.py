# services/ratfunc.py
"""Exact multivariate polynomials and rational functions over QQ.

All arithmetic happens in one sympy ``PolyRing`` per job (the *universe*):
parameters come first, followed by the Plücker symbols that actually occur,
sorted lexicographically, under graded lexicographic order.

A ``RatFunc`` is kept in canonical form: numerator and denominator are
coprime, both have integer coefficients with joint content 1, and the
leading coefficient of the denominator is positive.
"""
from __future__ import annotations

import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Hashable, Iterable, Mapping, Optional, Sequence, Tuple, Union

from sympy import QQ, Symbol, fraction, together
from sympy.parsing.sympy_parser import parse_expr, standard_transformations
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement, PolyRing

from services.errors import NOT_LINEAR, DivisionByZero, NotLinear, ValidationError

logger = logging.getLogger(__name__)

Number = Union[int, Fraction]
SymbolKey = Hashable


def delta_name(key: SymbolKey) -> str:
    """ASCII generator name of a Plücker symbol, e.g. ``D_1_3_7_8``"""
    return "D_" + "_".join(str(x) for x in key)


@lru_cache(maxsize=256)
def _ring(names: Tuple[str, ...]) -> PolyRing:
    return PolyRing([Symbol(n) for n in names], QQ, grlex)


class Universe:
    """The ordered generator set shared by every value of one computation"""

    def __init__(self, params: Sequence[str] = (), symbols: Iterable[SymbolKey] = ()):
        seen = []
        for p in params:
            if p not in seen:
                seen.append(p)
        self.params: Tuple[str, ...] = tuple(seen)
        self.symbols: Tuple[SymbolKey, ...] = tuple(sorted(set(symbols)))
        names = self.params + tuple(delta_name(s) for s in self.symbols)
        self.ring = _ring(names)
        self._index: Dict[SymbolKey, int] = {p: i for i, p in enumerate(self.params)}
        offset = len(self.params)
        for i, s in enumerate(self.symbols):
            self._index[s] = offset + i

    def __repr__(self) -> str:
        return f"Universe(params={self.params}, symbols={len(self.symbols)})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Universe) and self.ring == other.ring

    def __hash__(self) -> int:
        return hash(self.ring)

    def __contains__(self, key: SymbolKey) -> bool:
        return key in self._index

    # -----------------------
    # generators
    # -----------------------

    def index(self, key: SymbolKey) -> int:
        try:
            return self._index[key]
        except KeyError:
            raise ValidationError(f"unknown symbol {key!s} in this computation") from None

    def is_param_index(self, i: int) -> bool:
        return i < len(self.params)

    def key_of(self, i: int) -> SymbolKey:
        if i < len(self.params):
            return self.params[i]
        return self.symbols[i - len(self.params)]

    def extended(self, params: Sequence[str] = (), symbols: Iterable[SymbolKey] = ()) -> "Universe":
        return Universe(self.params + tuple(params), set(self.symbols) | set(symbols))

    # -----------------------
    # constructors
    # -----------------------

    def const(self, value: Number) -> "RatFunc":
        value = Fraction(value)
        return RatFunc(self, self.ring.ground_new(QQ(value.numerator, value.denominator)))

    @property
    def zero(self) -> "RatFunc":
        return RatFunc(self, self.ring.zero, canonical=True)

    @property
    def one(self) -> "RatFunc":
        return RatFunc(self, self.ring.one, canonical=True)

    def gen(self, key: SymbolKey) -> "RatFunc":
        return RatFunc(self, self.ring.gens[self.index(key)], canonical=True)

    def param(self, name: str) -> "RatFunc":
        return self.gen(name)

    def delta(self, key: SymbolKey) -> "RatFunc":
        return self.gen(key)

    def monomial(self, powers: Mapping[SymbolKey, int]) -> "RatFunc":
        exps = [0] * self.ring.ngens
        for key, e in powers.items():
            exps[self.index(key)] += e
        return RatFunc(self, self.ring.from_dict({tuple(exps): QQ.one}), canonical=True)

    def parse(self, text: str) -> "RatFunc":
        """Parse a rational expression over the declared parameters"""
        local = {p: Symbol(p) for p in self.params}
        try:
            expr = parse_expr(str(text), local_dict=local, transformations=standard_transformations)
        except Exception as e:
            raise ValidationError(f"cannot parse expression {text!r}: {e}") from None
        unknown = {s.name for s in expr.free_symbols} - set(self.params)
        if unknown:
            raise ValidationError(f"undeclared parameter(s) {', '.join(sorted(unknown))} in {text!r}")
        num, den = fraction(together(expr))
        try:
            return RatFunc(self, self.ring.from_expr(num), self.ring.from_expr(den))
        except (ValueError, TypeError) as e:
            raise ValidationError(f"{text!r} is not a rational function over QQ: {e}") from None

    def lift(self, f: "RatFunc") -> "RatFunc":
        if f.universe == self:
            return f
        return RatFunc(self, f.num.set_ring(self.ring), f.den.set_ring(self.ring), canonical=True)

    def label(self, i: int, latex: bool = False) -> str:
        key = self.key_of(i)
        if self.is_param_index(i):
            return str(key)
        if latex:
            return r"\Delta_{\{" + ",".join(str(x) for x in key) + r"\}}"
        return "D{" + ",".join(str(x) for x in key) + "}"


# ────────────────────────── canonical form ──────────────────────────

def _used_gens(*polys: PolyElement) -> Tuple[int, ...]:
    used = set()
    for poly in polys:
        for monom in poly.itermonoms():
            used.update(i for i, e in enumerate(monom) if e)
    return tuple(sorted(used))


def _normalize_scalar(num: PolyElement, den: PolyElement) -> Tuple[PolyElement, PolyElement]:
    dom = num.ring.domain
    coeffs = list(num.itercoeffs()) + list(den.itercoeffs())
    lcm = 1
    for c in coeffs:
        lcm = math.lcm(lcm, int(dom.denom(c)))
    g = 0
    for c in coeffs:
        g = math.gcd(g, int(dom.numer(c)) * (lcm // int(dom.denom(c))))
    scale = QQ(lcm, g)
    if den.LC < 0:
        scale = -scale
    if scale == 1:
        return num, den
    return num.mul_ground(scale), den.mul_ground(scale)


def _canonical(num: PolyElement, den: PolyElement) -> Tuple[PolyElement, PolyElement]:
    ring = num.ring
    if not den:
        raise DivisionByZero("denominator is zero")
    if not num:
        return ring.zero, ring.one
    if not den.is_ground:
        used = _used_gens(num, den)
        if len(used) < ring.ngens:
            sub = ring.clone(symbols=[ring.symbols[i] for i in used])
            p, q = num.set_ring(sub).cancel(den.set_ring(sub))
            num, den = p.set_ring(ring), q.set_ring(ring)
        else:
            num, den = num.cancel(den)
    return _normalize_scalar(num, den)


def split_by_degree(poly: PolyElement, i: int) -> Dict[int, PolyElement]:
    """Coefficients of ``poly`` with respect to generator ``i``"""
    ring = poly.ring
    parts: Dict[int, dict] = {}
    for monom, coeff in poly.iterterms():
        k = monom[i]
        parts.setdefault(k, {})[monom[:i] + (0,) + monom[i + 1:]] = coeff
    return {k: ring.from_dict(d) for k, d in parts.items()}


def _subst_poly(poly: PolyElement, i: int, a: PolyElement, b: PolyElement):
    parts = split_by_degree(poly, i)
    n = max(parts) if parts else 0
    if n <= 0:
        return poly, poly.ring.one
    total = poly.ring.zero
    for k, c in parts.items():
        total += c * a ** k * b ** (n - k)
    return total, b ** n


# ────────────────────────── value types ──────────────────────────

class MultiPoly:
    """A polynomial of a universe"""

    __slots__ = ("universe", "poly")

    def __init__(self, universe: Universe, poly: PolyElement):
        self.universe = universe
        self.poly = poly

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        return poly_arith(self, other, "+")

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return poly_arith(self, other, "-")

    def __mul__(self, other: "MultiPoly") -> "MultiPoly":
        return poly_arith(self, other, "*")

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.universe, -self.poly)

    def __eq__(self, other) -> bool:
        return isinstance(other, MultiPoly) and self.poly == other.poly

    def __hash__(self) -> int:
        return hash(self.poly)

    @property
    def is_zero(self) -> bool:
        return not self.poly

    def terms(self):
        return self.poly.terms()

    def degree(self, key: SymbolKey) -> int:
        parts = split_by_degree(self.poly, self.universe.index(key))
        return max(parts) if parts and self.poly else -1

    def to_ratfunc(self) -> "RatFunc":
        return RatFunc(self.universe, self.poly, canonical=True)

    def __str__(self) -> str:
        return format_poly(self.poly, self.universe)


class RatFunc:
    """num/den in canonical form"""

    __slots__ = ("universe", "num", "den")

    def __init__(self, universe: Universe, num: PolyElement, den: Optional[PolyElement] = None,
                 canonical: bool = False):
        self.universe = universe
        if den is None:
            den = universe.ring.one
        if not canonical:
            num, den = _canonical(num, den)
        self.num = num
        self.den = den

    # -----------------------
    # structure
    # -----------------------

    @property
    def numerator(self) -> MultiPoly:
        return MultiPoly(self.universe, self.num)

    @property
    def denominator(self) -> MultiPoly:
        return MultiPoly(self.universe, self.den)

    @property
    def is_zero(self) -> bool:
        return not self.num

    @property
    def is_constant(self) -> bool:
        return self.num.is_ground and self.den.is_ground

    def constant(self) -> Fraction:
        if not self.is_constant:
            raise ValueError(f"{self} is not a constant")
        if not self.num:
            return Fraction(0)
        dom = self.universe.ring.domain
        c = self.num.LC / self.den.LC
        return Fraction(int(dom.numer(c)), int(dom.denom(c)))

    def keys(self) -> set:
        """Symbols and parameters this value depends on"""
        return {self.universe.key_of(i) for i in _used_gens(self.num, self.den)}

    def delta_keys(self) -> set:
        u = self.universe
        return {u.key_of(i) for i in _used_gens(self.num, self.den) if not u.is_param_index(i)}

    # -----------------------
    # arithmetic
    # -----------------------

    def _coerce(self, other) -> "RatFunc":
        if isinstance(other, RatFunc):
            if other.universe != self.universe:
                raise ValueError("operands belong to different universes")
            return other
        if isinstance(other, (int, Fraction)):
            return self.universe.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return ratfunc_arith(self, other, "+")

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return ratfunc_arith(self, other, "-")

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return ratfunc_arith(other, self, "-")

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return ratfunc_arith(self, other, "*")

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return ratfunc_arith(self, other, "/")

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return ratfunc_arith(other, self, "/")

    def __neg__(self) -> "RatFunc":
        return RatFunc(self.universe, -self.num, self.den, canonical=True)

    def __pow__(self, n: int) -> "RatFunc":
        if n < 0:
            return self.universe.one / (self ** -n)
        return RatFunc(self.universe, self.num ** n, self.den ** n, canonical=True)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.universe.const(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def substitute(self, bindings: Mapping[SymbolKey, Union["RatFunc", Number]]) -> "RatFunc":
        return substitute(self, bindings)

    def __repr__(self) -> str:
        return f"RatFunc({self})"

    def __str__(self) -> str:
        return format_ratfunc(self)

    def latex(self) -> str:
        return format_ratfunc(self, latex=True)


# ────────────────────────── operations ──────────────────────────

def poly_arith(a: MultiPoly, b: MultiPoly, op: str) -> MultiPoly:
    if a.universe != b.universe:
        raise ValueError("operands belong to different universes")
    if op == "+":
        return MultiPoly(a.universe, a.poly + b.poly)
    if op == "-":
        return MultiPoly(a.universe, a.poly - b.poly)
    if op == "*":
        return MultiPoly(a.universe, a.poly * b.poly)
    raise ValueError(f"unknown polynomial operation {op!r}")


def ratfunc_arith(a: RatFunc, b: RatFunc, op: str) -> RatFunc:
    u = a.universe
    if op in ("+", "-"):
        other = b.num if op == "+" else -b.num
        if a.den == b.den:
            return RatFunc(u, a.num + other, a.den)
        return RatFunc(u, a.num * b.den + other * a.den, a.den * b.den)
    if op == "*":
        if not a.num or not b.num:
            return u.zero
        return RatFunc(u, a.num * b.num, a.den * b.den)
    if op == "/":
        if not b.num:
            raise DivisionByZero(f"division by zero value ({a}) / ({b})")
        return RatFunc(u, a.num * b.den, a.den * b.num)
    raise ValueError(f"unknown rational operation {op!r}")


def substitute(f: RatFunc, bindings: Mapping[SymbolKey, Union[RatFunc, Number]]) -> RatFunc:
    """Replace each bound generator by its value and re-canonicalize"""
    u = f.universe
    num, den = f.num, f.den
    for key, value in bindings.items():
        if key not in u:
            continue
        i = u.index(key)
        if isinstance(value, RatFunc):
            value = u.lift(value)
        else:
            value = u.const(value)
        nn, nd = _subst_poly(num, i, value.num, value.den)
        dn, dd = _subst_poly(den, i, value.num, value.den)
        if not dn:
            raise DivisionByZero(f"substituting {key!s} = {value} makes the denominator vanish")
        num, den = nn * dd, nd * dn
    if num is f.num and den is f.den:
        return f
    return RatFunc(u, num, den)


def extract_linear(f: MultiPoly, key: SymbolKey) -> Union[Tuple[MultiPoly, MultiPoly], NotLinear]:
    """Split ``f = coeff*x + rest``; a symbol that does not occur has coeff 0"""
    u = f.universe
    parts = split_by_degree(f.poly, u.index(key))
    if any(k > 1 for k in parts):
        return NOT_LINEAR
    coeff = parts.get(1, u.ring.zero)
    rest = parts.get(0, u.ring.zero)
    return MultiPoly(u, coeff), MultiPoly(u, rest)


def evaluate(f: RatFunc, values: Mapping[SymbolKey, Number], default: Optional[Number] = None) -> Fraction:
    """Exact value at a point; unbound generators take ``default`` when given"""
    bindings: Dict[SymbolKey, Number] = {}
    for key in f.keys():
        if key in values:
            bindings[key] = values[key]
        elif default is not None:
            bindings[key] = default
        else:
            raise ValidationError(f"no value for {key!s}")
    return substitute(f, bindings).constant()


# ────────────────────────── printing ──────────────────────────

def _format_coeff(c, latex: bool) -> str:
    frac = Fraction(int(QQ.numer(c)), int(QQ.denom(c)))
    if frac.denominator == 1:
        return str(frac.numerator)
    if latex:
        return rf"\frac{{{frac.numerator}}}{{{frac.denominator}}}"
    return f"{frac.numerator}/{frac.denominator}"


def format_poly(poly: PolyElement, universe: Universe, latex: bool = False) -> str:
    if not poly:
        return "0"
    out = []
    for monom, coeff in poly.terms():
        negative = coeff < 0
        mag = -coeff if negative else coeff
        factors = []
        for i, e in enumerate(monom):
            if not e:
                continue
            name = universe.label(i, latex)
            if e == 1:
                factors.append(name)
            else:
                factors.append(f"{name}^{{{e}}}" if latex else f"{name}^{e}")
        body = (" " if latex else "*").join(factors)
        cstr = _format_coeff(mag, latex)
        if not body:
            term = cstr
        elif cstr == "1":
            term = body
        else:
            term = f"{cstr} {body}" if latex else f"{cstr}*{body}"
        if not out:
            out.append(f"-{term}" if negative else term)
        else:
            out.append(f" - {term}" if negative else f" + {term}")
    return "".join(out)


def format_ratfunc(f: RatFunc, latex: bool = False) -> str:
    num = format_poly(f.num, f.universe, latex)
    if f.den == f.universe.ring.one:
        return num
    den = format_poly(f.den, f.universe, latex)
    if latex:
        return rf"\frac{{{num}}}{{{den}}}"
    if len(f.num) > 1:
        num = f"({num})"
    if len(f.den) > 1 or "*" in den:
        den = f"({den})"
    return f"{num}/{den}"
