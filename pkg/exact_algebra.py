"""
Exact arithmetic substrates for the cluster braiding verifier.
Provides rational functions in commuting cluster variables, cyclotomic field
elements and sparse matrices over cyclotomic fields.
"""

import logging
import re
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import sympy
from sympy import QQ
from sympy.parsing.sympy_parser import parse_expr
from sympy.polys.fields import field as frac_field

logger = logging.getLogger(__name__)

__all__ = [
    "AlgebraError",
    "DivisionByZeroError",
    "RatFunc",
    "ratfunc_arith",
    "parse_ratfunc",
    "variable_names",
    "Cyclotomic",
    "cyclo_arith",
    "CycloMatrix",
]

Number = Union[int, Fraction, float, complex]

_VARIABLE_RE = re.compile(r"^[xy][1-9]\d*$")
_RATFUNC_CHARS_RE = re.compile(r"^[0-9xy+\-*/^()\s]+$")


class AlgebraError(ValueError):
    """Raised for malformed algebraic input (bad variable names, bad strings)."""


class DivisionByZeroError(ArithmeticError):
    """Raised when dividing by or inverting an exact zero."""


def _name_key(name: str) -> Tuple[str, int]:
    return name[0], int(name[1:])


def variable_names(prefix: str, count: int) -> Tuple[str, ...]:
    """
    Build the standard variable tuple ``prefix1..prefixN``.

    Args:
        prefix (str): ``"x"`` or ``"y"``
        count (int): number of variables

    Returns:
        tuple: variable names in index order
    """
    if prefix not in ("x", "y"):
        raise AlgebraError(f"Unsupported variable prefix: {prefix!r}")
    return tuple(f"{prefix}{k}" for k in range(1, count + 1))


@lru_cache(maxsize=None)
def _field(names: Tuple[str, ...]):
    for name in names:
        if not _VARIABLE_RE.match(name):
            raise AlgebraError(f"Invalid variable name: {name!r}")
    generated = frac_field(",".join(names), QQ)
    return generated[0]


def _union(a: Tuple[str, ...], b: Tuple[str, ...]) -> Tuple[str, ...]:
    return tuple(sorted(set(a) | set(b), key=_name_key))


def _to_fraction(coeff) -> Fraction:
    return Fraction(int(coeff.numerator), int(coeff.denominator))


class RatFunc:
    """
    Immutable rational function over the rationals in named variables.

    The value is held as a sympy fraction-field element, which keeps numerator
    and denominator gcd-reduced, so equality is structural.
    """

    __slots__ = ("_names", "_elem")

    def __init__(self, names: Tuple[str, ...], elem):
        self._names = names
        self._elem = elem

    # construction -------------------------------------------------------

    @classmethod
    def variables(cls, names: Sequence[str]) -> Tuple["RatFunc", ...]:
        """Return the generators of the field over ``names``."""
        names = tuple(names)
        fld = _field(names)
        return tuple(cls(names, g) for g in fld.gens)

    @classmethod
    def constant(cls, value: Union[int, Fraction], names: Sequence[str] = ("x1",)) -> "RatFunc":
        names = tuple(names) or ("x1",)
        fld = _field(names)
        value = Fraction(value)
        return cls(names, fld(sympy.Rational(value.numerator, value.denominator)))

    @classmethod
    def from_expr(cls, expr, names: Optional[Sequence[str]] = None) -> "RatFunc":
        """Convert a sympy expression in ``x<k>``/``y<k>`` symbols."""
        symbols = sorted((s.name for s in expr.free_symbols), key=_name_key) if expr.free_symbols else []
        for name in symbols:
            if not _VARIABLE_RE.match(name):
                raise AlgebraError(f"Unknown symbol in rational function: {name!r}")
        if names is None:
            names = tuple(symbols) or ("x1",)
        else:
            names = _union(tuple(names), tuple(symbols))
        fld = _field(names)
        return cls(names, fld.from_expr(expr))

    # properties ---------------------------------------------------------

    @property
    def names(self) -> Tuple[str, ...]:
        return self._names

    @property
    def numer(self):
        return self._elem.numer

    @property
    def denom(self):
        return self._elem.denom

    def is_zero(self) -> bool:
        return not self._elem.numer

    def is_one(self) -> bool:
        return self._elem.numer == self._elem.denom

    def free_variables(self) -> Tuple[str, ...]:
        used = set()
        for poly in (self._elem.numer, self._elem.denom):
            for monom in poly.monoms():
                used.update(n for n, e in zip(self._names, monom) if e)
        return tuple(sorted(used, key=_name_key))

    def as_expr(self):
        return self._elem.as_expr()

    # arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> Tuple[Tuple[str, ...], object, object]:
        if isinstance(other, RatFunc):
            if other._names == self._names:
                return self._names, self._elem, other._elem
            names = _union(self._names, other._names)
            fld = _field(names)
            return names, fld.from_expr(self._elem.as_expr()), fld.from_expr(other._elem.as_expr())
        if isinstance(other, (int, Fraction)):
            value = Fraction(other)
            fld = _field(self._names)
            return self._names, self._elem, fld(sympy.Rational(value.numerator, value.denominator))
        return NotImplemented, None, None

    def __add__(self, other):
        names, a, b = self._coerce(other)
        if names is NotImplemented:
            return NotImplemented
        return RatFunc(names, a + b)

    __radd__ = __add__

    def __sub__(self, other):
        names, a, b = self._coerce(other)
        if names is NotImplemented:
            return NotImplemented
        return RatFunc(names, a - b)

    def __rsub__(self, other):
        names, a, b = self._coerce(other)
        if names is NotImplemented:
            return NotImplemented
        return RatFunc(names, b - a)

    def __mul__(self, other):
        names, a, b = self._coerce(other)
        if names is NotImplemented:
            return NotImplemented
        return RatFunc(names, a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        names, a, b = self._coerce(other)
        if names is NotImplemented:
            return NotImplemented
        if not b.numer:
            raise DivisionByZeroError("Division by the zero rational function")
        return RatFunc(names, a / b)

    def __rtruediv__(self, other):
        names, a, b = self._coerce(other)
        if names is NotImplemented:
            return NotImplemented
        if not a.numer:
            raise DivisionByZeroError("Division by the zero rational function")
        return RatFunc(names, b / a)

    def __neg__(self):
        return RatFunc(self._names, -self._elem)

    def inv(self) -> "RatFunc":
        if self.is_zero():
            raise DivisionByZeroError("Inverse of the zero rational function")
        return RatFunc(self._names, 1 / self._elem)

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            raise AlgebraError("Only integer powers of rational functions are supported")
        if exponent < 0:
            return self.inv() ** (-exponent)
        return RatFunc(self._names, self._elem ** exponent)

    def __eq__(self, other):
        if isinstance(other, (RatFunc, int, Fraction)):
            names, a, b = self._coerce(other)
            return not (a - b).numer
        return NotImplemented

    def __hash__(self):
        return hash(self.to_string())

    # evaluation ---------------------------------------------------------

    def _eval_poly(self, poly, values: Sequence[Number]):
        total = 0
        for monom, coeff in poly.terms():
            term = _to_fraction(coeff)
            for value, power in zip(values, monom):
                if power:
                    term = term * value ** power
            total = total + term
        return total

    def evaluate(self, point: Mapping[str, Number]):
        """
        Specialise every variable.

        Args:
            point (dict): variable name -> value (int, Fraction, float or complex)

        Returns:
            The value; exact Fraction when all inputs are rational.

        Raises:
            AlgebraError: If a used variable is missing from ``point``
            DivisionByZeroError: If the denominator vanishes at ``point``
        """
        values = []
        for name in self._names:
            if name in point:
                values.append(point[name])
            elif name in self.free_variables():
                raise AlgebraError(f"No value supplied for variable {name}")
            else:
                values.append(0)
        den = self._eval_poly(self._elem.denom, values)
        if den == 0:
            raise DivisionByZeroError(f"Denominator vanishes at {dict(point)}")
        return self._eval_poly(self._elem.numer, values) / den

    def substitute(self, mapping: Mapping[str, "RatFunc"]) -> "RatFunc":
        """Compose: replace variables by rational functions."""
        expr = self._elem.as_expr()
        subs = {sympy.Symbol(k): v.as_expr() for k, v in mapping.items()}
        names: Tuple[str, ...] = ()
        for value in mapping.values():
            names = _union(names, value.names)
        untouched = tuple(n for n in self._names if n not in mapping)
        names = _union(names, untouched)
        return RatFunc.from_expr(sympy.sympify(expr).xreplace(subs), names)

    # printing -----------------------------------------------------------

    @staticmethod
    def _integral_parts(poly) -> Tuple[Fraction, List[Tuple[Tuple[int, ...], int]]]:
        coeffs = [(m, _to_fraction(c)) for m, c in poly.terms()]
        lcm = 1
        for _, c in coeffs:
            lcm = lcm * c.denominator // gcd(lcm, c.denominator)
        ints = [(m, int(c * lcm)) for m, c in coeffs]
        return Fraction(1, lcm), ints

    def _format_poly(self, terms: List[Tuple[Tuple[int, ...], int]]) -> str:
        poly = sum(
            (c * sympy.Mul(*[sympy.Symbol(n) ** e for n, e in zip(self._names, m) if e]) for m, c in terms),
            sympy.Integer(0),
        )
        return str(poly).replace("**", "^")

    def to_string(self) -> str:
        """Canonical string: integer coefficients, content removed, ``^`` powers."""
        if self.is_zero():
            return "0"
        scale_n, num = self._integral_parts(self._elem.numer)
        scale_d, den = self._integral_parts(self._elem.denom)
        # value = scale_n*num / (scale_d*den)
        factor = scale_n / scale_d
        num = [(m, c * factor.numerator) for m, c in num]
        den = [(m, c * factor.denominator) for m, c in den]
        content = 0
        for _, c in num + den:
            content = gcd(content, abs(c))
        num = [(m, c // content) for m, c in num]
        den = [(m, c // content) for m, c in den]
        lead = max(den, key=lambda t: t[0])[1]
        if lead < 0:
            num = [(m, -c) for m, c in num]
            den = [(m, -c) for m, c in den]
        num_text = self._format_poly(num)
        if len(den) == 1 and den[0] == ((0,) * len(self._names), 1):
            return num_text
        return f"({num_text})/({self._format_poly(den)})"

    def __str__(self):
        return self.to_string()

    def __repr__(self):
        return f"RatFunc({self.to_string()!r})"


def ratfunc_arith(a: RatFunc, b: Optional[RatFunc], op: str) -> RatFunc:
    """
    Dispatch one of the five field operations.

    Args:
        a (RatFunc): left operand
        b (RatFunc): right operand (ignored for ``neg`` and ``inv``)
        op (str): one of ``add``, ``mul``, ``div``, ``neg``, ``inv``

    Returns:
        RatFunc: canonical reduced result

    Raises:
        DivisionByZeroError: For ``div``/``inv`` with a zero divisor
        AlgebraError: For an unknown operation
    """
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "neg":
        return -a
    if op == "inv":
        return a.inv()
    raise AlgebraError(f"Unknown rational-function operation: {op!r}")


def parse_ratfunc(text: str, names: Optional[Sequence[str]] = None) -> RatFunc:
    """
    Parse the canonical rational-function grammar.

    Args:
        text (str): e.g. ``"(1+x2)/x1"`` or ``"x1^2*y3 - 4"``
        names (sequence, optional): field variables to embed into

    Returns:
        RatFunc: parsed value

    Raises:
        AlgebraError: If the string is outside the grammar
        DivisionByZeroError: If the expression divides by zero
    """
    text = text.strip()
    if not text or not _RATFUNC_CHARS_RE.match(text):
        raise AlgebraError(f"Malformed rational function: {text!r}")
    tokens = set(re.findall(r"[xy]\d+", text))
    local = {name: sympy.Symbol(name) for name in tokens}
    for name in tokens:
        if not _VARIABLE_RE.match(name):
            raise AlgebraError(f"Invalid variable name: {name!r}")
    try:
        expr = parse_expr(text.replace("^", "**"), local_dict=local, evaluate=True)
    except (SyntaxError, TypeError, sympy.SympifyError) as exc:
        raise AlgebraError(f"Malformed rational function: {text!r}") from exc
    if expr.has(sympy.zoo) or expr.has(sympy.nan):
        raise DivisionByZeroError(f"Division by zero in {text!r}")
    return RatFunc.from_expr(expr, names)


# ---------------------------------------------------------------------------
# cyclotomic fields


@lru_cache(maxsize=None)
def _cyclotomic_modulus(m: int) -> Tuple[Fraction, ...]:
    x = sympy.Symbol("t")
    poly = sympy.Poly(sympy.cyclotomic_poly(m, x), x)
    return tuple(Fraction(int(c)) for c in reversed(poly.all_coeffs()))


def _reduce(coeffs: List[Fraction], m: int) -> Tuple[Fraction, ...]:
    modulus = _cyclotomic_modulus(m)
    degree = len(modulus) - 1
    coeffs = list(coeffs)
    for top in range(len(coeffs) - 1, degree - 1, -1):
        lead = coeffs[top]
        if lead:
            shift = top - degree
            for k, c in enumerate(modulus):
                coeffs[shift + k] -= lead * c
    coeffs = coeffs[:degree] + [Fraction(0)] * max(0, degree - len(coeffs))
    return tuple(coeffs)


class Cyclotomic:
    """
    Immutable element of Q(zeta_m), stored as coefficients of zeta^0..zeta^(phi(m)-1).
    """

    __slots__ = ("m", "coeffs")

    def __init__(self, m: int, coeffs: Iterable[Union[int, Fraction]]):
        if m < 1:
            raise AlgebraError(f"Cyclotomic order must be positive, got {m}")
        self.m = m
        self.coeffs = _reduce([Fraction(c) for c in coeffs], m)

    @classmethod
    def _raw(cls, m: int, coeffs: Tuple[Fraction, ...]) -> "Cyclotomic":
        obj = cls.__new__(cls)
        obj.m = m
        obj.coeffs = coeffs
        return obj

    @classmethod
    def zero(cls, m: int) -> "Cyclotomic":
        return cls._raw(m, tuple(Fraction(0) for _ in range(len(_cyclotomic_modulus(m)) - 1)))

    @classmethod
    def one(cls, m: int) -> "Cyclotomic":
        return cls.from_rational(m, 1)

    @classmethod
    def from_rational(cls, m: int, value: Union[int, Fraction]) -> "Cyclotomic":
        zero = cls.zero(m)
        return cls._raw(m, (Fraction(value),) + zero.coeffs[1:])

    @classmethod
    def zeta(cls, m: int, power: int = 1) -> "Cyclotomic":
        """zeta_m ** power, reduced."""
        return _zeta_power(m, power % m)

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def _check(self, other: "Cyclotomic"):
        if not isinstance(other, Cyclotomic) or other.m != self.m:
            raise AlgebraError("Cyclotomic operands must share the same order m")

    def _lift(self, other) -> "Cyclotomic":
        if isinstance(other, (int, Fraction)):
            return Cyclotomic.from_rational(self.m, other)
        self._check(other)
        return other

    def __add__(self, other):
        other = self._lift(other)
        return Cyclotomic._raw(self.m, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        return Cyclotomic._raw(self.m, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __neg__(self):
        return Cyclotomic._raw(self.m, tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Cyclotomic._raw(self.m, tuple(a * other for a in self.coeffs))
        self._check(other)
        product = [Fraction(0)] * (2 * self.degree - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        product[i + j] += a * b
        return Cyclotomic._raw(self.m, _reduce(product, self.m))

    __rmul__ = __mul__

    def inv(self) -> "Cyclotomic":
        """Multiplicative inverse modulo the cyclotomic polynomial."""
        if self.is_zero():
            raise DivisionByZeroError("Inverse of zero in a cyclotomic field")
        if self.degree == 1:
            return Cyclotomic._raw(self.m, (1 / self.coeffs[0],))
        t = sympy.Symbol("t")
        poly = sympy.Poly(
            [sympy.Rational(c.numerator, c.denominator) for c in reversed(self.coeffs)], t, domain=QQ
        )
        modulus = sympy.Poly([int(c) for c in reversed(_cyclotomic_modulus(self.m))], t, domain=QQ)
        inverse = poly.invert(modulus)
        coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(inverse.all_coeffs())]
        return Cyclotomic(self.m, coeffs)

    def __truediv__(self, other):
        return self * self._lift(other).inv()

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inv() ** (-exponent)
        result = Cyclotomic.one(self.m)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def conjugate(self) -> "Cyclotomic":
        """Image under zeta -> zeta^-1 (complex conjugation)."""
        total = Cyclotomic.zero(self.m)
        for k, c in enumerate(self.coeffs):
            if c:
                total = total + Cyclotomic.zeta(self.m, -k) * c
        return total

    def to_complex(self) -> complex:
        powers = np.exp(2j * np.pi * np.arange(self.degree) / self.m)
        return complex(np.dot(np.array([float(c) for c in self.coeffs]), powers))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Cyclotomic.from_rational(self.m, other)
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        return self.m == other.m and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.m, self.coeffs))

    def __repr__(self):
        terms = [f"{c}*z^{k}" for k, c in enumerate(self.coeffs) if c]
        return f"Cyclotomic(m={self.m}, {' + '.join(terms) or '0'})"


@lru_cache(maxsize=None)
def _zeta_power(m: int, power: int) -> Cyclotomic:
    coeffs = [Fraction(0)] * (power + 1)
    coeffs[power] = Fraction(1)
    return Cyclotomic(m, coeffs)


def cyclo_arith(a: Cyclotomic, b: Optional[Cyclotomic], op: str) -> Cyclotomic:
    """
    Dispatch a cyclotomic field operation (``add``, ``mul``, ``inv``).

    Raises:
        DivisionByZeroError: For ``inv`` of zero
        AlgebraError: For an unknown operation or mismatched orders
    """
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "inv":
        return a.inv()
    raise AlgebraError(f"Unknown cyclotomic operation: {op!r}")


# ---------------------------------------------------------------------------
# sparse matrices over Q(zeta_m)


class CycloMatrix:
    """
    Sparse square matrix over Q(zeta_m), rows stored as dicts of nonzero entries.
    """

    def __init__(self, m: int, dim: int, rows: Optional[Dict[int, Dict[int, Cyclotomic]]] = None):
        self.m = m
        self.dim = dim
        self.rows: Dict[int, Dict[int, Cyclotomic]] = {}
        for r, row in (rows or {}).items():
            kept = {c: v for c, v in row.items() if not v.is_zero()}
            if kept:
                self.rows[r] = kept

    @classmethod
    def identity(cls, m: int, dim: int) -> "CycloMatrix":
        one = Cyclotomic.one(m)
        return cls(m, dim, {r: {r: one} for r in range(dim)})

    @classmethod
    def from_entries(cls, m: int, dim: int, entries: Mapping[Tuple[int, int], Cyclotomic]) -> "CycloMatrix":
        rows: Dict[int, Dict[int, Cyclotomic]] = {}
        for (r, c), v in entries.items():
            rows.setdefault(r, {})[c] = v
        return cls(m, dim, rows)

    @property
    def nnz(self) -> int:
        return sum(len(row) for row in self.rows.values())

    def get(self, r: int, c: int) -> Cyclotomic:
        return self.rows.get(r, {}).get(c, Cyclotomic.zero(self.m))

    def _check(self, other: "CycloMatrix"):
        if other.m != self.m or other.dim != self.dim:
            raise AlgebraError("CycloMatrix operands must share order and dimension")

    def __matmul__(self, other: "CycloMatrix") -> "CycloMatrix":
        self._check(other)
        out: Dict[int, Dict[int, Cyclotomic]] = {}
        for r, row in self.rows.items():
            acc: Dict[int, Cyclotomic] = {}
            for k, a in row.items():
                for c, b in other.rows.get(k, {}).items():
                    prod = a * b
                    acc[c] = acc[c] + prod if c in acc else prod
            out[r] = acc
        return CycloMatrix(self.m, self.dim, out)

    def __add__(self, other: "CycloMatrix") -> "CycloMatrix":
        self._check(other)
        out = {r: dict(row) for r, row in self.rows.items()}
        for r, row in other.rows.items():
            target = out.setdefault(r, {})
            for c, v in row.items():
                target[c] = target[c] + v if c in target else v
        return CycloMatrix(self.m, self.dim, out)

    def __sub__(self, other: "CycloMatrix") -> "CycloMatrix":
        return self + other.scale(Cyclotomic.from_rational(self.m, -1))

    def scale(self, factor: Cyclotomic) -> "CycloMatrix":
        return CycloMatrix(self.m, self.dim, {r: {c: v * factor for c, v in row.items()} for r, row in self.rows.items()})

    def kron(self, other: "CycloMatrix") -> "CycloMatrix":
        if other.m != self.m:
            raise AlgebraError("Kronecker factors must share the cyclotomic order")
        out: Dict[int, Dict[int, Cyclotomic]] = {}
        for r1, row1 in self.rows.items():
            for r2, row2 in other.rows.items():
                target = out.setdefault(r1 * other.dim + r2, {})
                for c1, v1 in row1.items():
                    for c2, v2 in row2.items():
                        target[c1 * other.dim + c2] = v1 * v2
        return CycloMatrix(self.m, self.dim * other.dim, out)

    def equals(self, other: "CycloMatrix") -> bool:
        self._check(other)
        return (self - other).nnz == 0

    def inverse(self) -> "CycloMatrix":
        """
        Gauss-Jordan inverse.

        Raises:
            DivisionByZeroError: If the matrix is singular
        """
        n = self.dim
        work = [dict(self.rows.get(r, {})) for r in range(n)]
        inv = [{r: Cyclotomic.one(self.m)} for r in range(n)]
        for col in range(n):
            pivot = next((r for r in range(col, n) if col in work[r]), None)
            if pivot is None:
                raise DivisionByZeroError("Singular cyclotomic matrix")
            work[col], work[pivot] = work[pivot], work[col]
            inv[col], inv[pivot] = inv[pivot], inv[col]
            scale = work[col][col].inv()
            work[col] = {c: v * scale for c, v in work[col].items()}
            inv[col] = {c: v * scale for c, v in inv[col].items()}
            for r in range(n):
                if r != col and col in work[r]:
                    factor = work[r][col]
                    for src, dst in ((work[col], work[r]), (inv[col], inv[r])):
                        for c, v in src.items():
                            updated = dst.get(c, Cyclotomic.zero(self.m)) - factor * v
                            if updated.is_zero():
                                dst.pop(c, None)
                            else:
                                dst[c] = updated
        return CycloMatrix(self.m, n, dict(enumerate(inv)))

    def to_numpy(self) -> np.ndarray:
        dense = np.zeros((self.dim, self.dim), dtype=complex)
        for r, row in self.rows.items():
            for c, v in row.items():
                dense[r, c] = v.to_complex()
        return dense
