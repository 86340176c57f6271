"""
Quantum torus of q-commuting y-variables.
Holds the Weyl-ordered torus algebra, quantum mutations as ordered factor
chains, the closed form of the quantum braiding operator and finite
clock/shift representations used to compare skew-field elements.
"""

import itertools
import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from braid_classical import BraidError, R_mutation_word, apply_R_y, build_braid_matrix, strand_count
from check_report import CheckReport, check_entry
from cluster_core import ExchangeMatrix, SeedError, generic_y_seed, mutate_matrix
from exact_algebra import (
    CycloMatrix,
    Cyclotomic,
    DivisionByZeroError,
    RatFunc,
    variable_names,
)

logger = logging.getLogger(__name__)

__all__ = [
    "RepresentationError",
    "SingularEvaluationError",
    "QTorusContext",
    "QTorusElement",
    "q_multiply",
    "Monomial",
    "Binomial",
    "FactorChain",
    "QSeed",
    "quantum_mutate",
    "mutate_qseed",
    "apply_qword",
    "mu_prime",
    "mu_sharp",
    "apply_Rq",
    "skew_normal_form",
    "Representation",
    "rep_build",
    "check_relations",
    "central_generators",
    "heisenberg_realisation",
    "verify_heisenberg_realisation",
    "central_elements_check",
    "mu_decompose_check",
    "verify_quantum_involution",
    "verify_Rq_equals_mutations",
    "verify_quantum_braid",
    "with_retries",
]

MAX_RETRIES = 5


class RepresentationError(ValueError):
    """Raised when a representation cannot be built or violates the torus relations."""


class SingularEvaluationError(ArithmeticError):
    """Raised when a binomial factor evaluates to a singular matrix."""


# ---------------------------------------------------------------------------
# torus algebra


class QTorusContext:
    """
    Quantum torus attached to an exchange matrix.

    Weyl-ordered monomials E(a) multiply as E(a)E(c) = q^<a,c> E(a+c) with
    <a,c> = c^T B a, which gives Y_k Y_j = q^{2 b_jk} Y_j Y_k on generators.
    """

    RINGS = ("formal", "cyclotomic", "complex")

    def __init__(self, B: ExchangeMatrix, ring: str = "formal"):
        if ring not in self.RINGS:
            raise ValueError(f"Unknown coefficient ring: {ring!r}")
        self.B = B
        self.ring = ring

    @property
    def size(self) -> int:
        return self.B.size

    def pairing(self, a: Sequence[int], c: Sequence[int]) -> int:
        return int(np.asarray(c, dtype=int) @ self.B.array @ np.asarray(a, dtype=int))

    def weyl_shift(self, a: Sequence[int]) -> int:
        """q-power relating E(a) to the ordered product Y_1^{a_1}...Y_m^{a_m}."""
        M = self.B.array
        total = 0
        for j in range(len(a)):
            if a[j]:
                for k in range(j + 1, len(a)):
                    total -= a[j] * a[k] * M[k, j]
        return int(total)

    def unit(self, k: int) -> Tuple[int, ...]:
        self.B.check_index(k)
        return tuple(1 if j == k - 1 else 0 for j in range(self.size))

    def generator(self, k: int) -> "QTorusElement":
        return QTorusElement(self, {self.unit(k): {0: 1}})

    def monomial(self, exps: Sequence[int], qpow: int = 0) -> "QTorusElement":
        return QTorusElement(self, {tuple(int(e) for e in exps): {qpow: 1}})

    def one(self) -> "QTorusElement":
        return self.monomial((0,) * self.size)

    def __eq__(self, other):
        return isinstance(other, QTorusContext) and self.B == other.B

    def __hash__(self):
        return hash(self.B)


def _laurent_add(a: Dict[int, int], b: Dict[int, int], sign: int = 1) -> Dict[int, int]:
    out = dict(a)
    for p, c in b.items():
        out[p] = out.get(p, 0) + sign * c
        if not out[p]:
            del out[p]
    return out


class QTorusElement:
    """
    Finite sum of Weyl-ordered monomials with coefficients in Z[q, q^-1].
    """

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: QTorusContext, terms: Dict[Tuple[int, ...], Dict[int, int]]):
        self.ctx = ctx
        self.terms = {a: dict(c) for a, c in terms.items() if any(c.values())}
        for a, coeff in self.terms.items():
            if len(a) != ctx.size:
                raise ValueError(f"Exponent vector {a} does not match torus rank {ctx.size}")
            for p in [p for p, v in coeff.items() if not v]:
                del coeff[p]

    def _check(self, other: "QTorusElement"):
        if not isinstance(other, QTorusElement) or other.ctx != self.ctx:
            raise ValueError("Quantum torus elements belong to different contexts")

    def __add__(self, other):
        self._check(other)
        terms = {a: dict(c) for a, c in self.terms.items()}
        for a, c in other.terms.items():
            terms[a] = _laurent_add(terms.get(a, {}), c)
        return QTorusElement(self.ctx, terms)

    def __sub__(self, other):
        self._check(other)
        terms = {a: dict(c) for a, c in self.terms.items()}
        for a, c in other.terms.items():
            terms[a] = _laurent_add(terms.get(a, {}), c, -1)
        return QTorusElement(self.ctx, terms)

    def __mul__(self, other):
        if isinstance(other, int):
            return QTorusElement(self.ctx, {a: {p: v * other for p, v in c.items()} for a, c in self.terms.items()})
        return q_multiply(self, other)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, QTorusElement):
            return NotImplemented
        return self.ctx == other.ctx and (self - other).is_zero()

    __hash__ = None

    def at_q(self, q) -> Dict[Tuple[int, ...], object]:
        """Coefficients specialised at a value of q."""
        return {a: sum(v * q ** p for p, v in c.items()) for a, c in self.terms.items()}

    def classical(self, names: Optional[Sequence[str]] = None) -> RatFunc:
        """q = 1 projection onto the commutative Laurent polynomial ring."""
        names = tuple(names or variable_names("y", self.ctx.size))
        ys = RatFunc.variables(names)
        total = RatFunc.constant(0, names)
        for a, c in self.terms.items():
            term = RatFunc.constant(sum(c.values()), names)
            for y, e in zip(ys, a):
                if e:
                    term = term * y ** e
            total = total + term
        return total

    def __repr__(self):
        parts = []
        for a, c in sorted(self.terms.items()):
            coeff = " + ".join(f"{v}q^{p}" for p, v in sorted(c.items()))
            parts.append(f"({coeff})E{a}")
        return " + ".join(parts) or "0"


def q_multiply(a: QTorusElement, b: QTorusElement) -> QTorusElement:
    """
    Product in the quantum torus, E(a)E(c) = q^<a,c> E(a+c).

    Raises:
        ValueError: If the operands live in different contexts
    """
    a._check(b)
    ctx = a.ctx
    terms: Dict[Tuple[int, ...], Dict[int, int]] = {}
    for ea, ca in a.terms.items():
        for eb, cb in b.terms.items():
            shift = ctx.pairing(ea, eb)
            exps = tuple(x + y for x, y in zip(ea, eb))
            acc = terms.setdefault(exps, {})
            for pa, va in ca.items():
                for pb, vb in cb.items():
                    p = pa + pb + shift
                    acc[p] = acc.get(p, 0) + va * vb
    return QTorusElement(ctx, terms)


# ---------------------------------------------------------------------------
# factor chains


@dataclass(frozen=True, eq=False)
class Monomial:
    """q^qpow E(exps) in the initial generators."""

    exps: Tuple[int, ...]
    qpow: int = 0

    def inverse(self) -> "Monomial":
        return Monomial(tuple(-e for e in self.exps), -self.qpow)


@dataclass(frozen=True, eq=False)
class Binomial:
    """(1 + q^qpow * inner)^power for a factor chain ``inner``."""

    inner: "FactorChain"
    qpow: int
    power: int

    def inverse(self) -> "Binomial":
        return Binomial(self.inner, self.qpow, -self.power)


Factor = Union[Monomial, Binomial]


class FactorChain:
    """
    Ordered product of monomial and binomial factors, an element of the skew field.
    """

    __slots__ = ("factors",)

    def __init__(self, factors: Sequence[Factor] = ()):
        self.factors = tuple(factors)

    @classmethod
    def generator(cls, size: int, k: int) -> "FactorChain":
        return cls((Monomial(tuple(1 if j == k - 1 else 0 for j in range(size))),))

    @classmethod
    def monomial(cls, exps: Sequence[int], qpow: int = 0) -> "FactorChain":
        return cls((Monomial(tuple(int(e) for e in exps), qpow),))

    @classmethod
    def binomial(cls, inner: "FactorChain", qpow: int = 1, power: int = 1) -> "FactorChain":
        return cls((Binomial(inner, qpow, power),))

    def __mul__(self, other: "FactorChain") -> "FactorChain":
        return FactorChain(self.factors + other.factors)

    def inverse(self) -> "FactorChain":
        return FactorChain(tuple(f.inverse() for f in reversed(self.factors)))

    def __pow__(self, exponent: int) -> "FactorChain":
        base = self if exponent >= 0 else self.inverse()
        return FactorChain(base.factors * abs(exponent))

    def depth(self) -> int:
        inner = [f.inner.depth() for f in self.factors if isinstance(f, Binomial)]
        return 1 + max(inner, default=0)

    def classical(self, names: Sequence[str], memo: Optional[Dict[int, RatFunc]] = None) -> RatFunc:
        """q = 1 projection as a commutative rational function."""
        memo = {} if memo is None else memo
        key = id(self)
        if key in memo:
            return memo[key]
        ys = RatFunc.variables(names)
        value = RatFunc.constant(1, names)
        for factor in self.factors:
            if isinstance(factor, Monomial):
                for y, e in zip(ys, factor.exps):
                    if e:
                        value = value * y ** e
            else:
                value = value * (1 + factor.inner.classical(names, memo)) ** factor.power
        memo[key] = value
        return value

    def __len__(self):
        return len(self.factors)

    def __repr__(self):
        return f"FactorChain({len(self.factors)} factors, depth {self.depth()})"


@dataclass(frozen=True)
class QSeed:
    """Quantum y-seed: generator images as chains in the initial torus, with the current B."""

    B: ExchangeMatrix
    Y: Tuple[FactorChain, ...]

    @classmethod
    def initial(cls, B: ExchangeMatrix) -> "QSeed":
        return cls(B, tuple(FactorChain.generator(B.size, k) for k in range(1, B.size + 1)))


def quantum_mutate(ctx: QTorusContext, Ys: Sequence[FactorChain], k: int) -> List[FactorChain]:
    """
    Quantum y-mutation at k with respect to ``ctx.B``.

    Args:
        ctx (QTorusContext): torus of the current seed
        Ys (sequence): current generators as chains
        k (int): mutation vertex (1-based)

    Returns:
        list: mutated generators

    Raises:
        SeedError: If k is out of range
    """
    ctx.B.check_index(k)
    if len(Ys) != ctx.size:
        raise SeedError(f"Expected {ctx.size} generators, got {len(Ys)}")
    Yk = Ys[k - 1]
    Yk_inv = Yk.inverse()
    out = []
    for i in range(1, ctx.size + 1):
        if i == k:
            out.append(Yk_inv)
            continue
        b = ctx.B.b(k, i)
        chain = Ys[i - 1]
        if b > 0:
            for m in range(1, b + 1):
                chain = chain * FactorChain.binomial(Yk_inv, 2 * m - 1, -1)
        elif b < 0:
            for m in range(1, -b + 1):
                chain = chain * FactorChain.binomial(Yk, 2 * m - 1, 1)
        out.append(chain)
    return out


def mutate_qseed(seed: QSeed, k: int) -> QSeed:
    Ys = quantum_mutate(QTorusContext(seed.B), seed.Y, k)
    return QSeed(mutate_matrix(seed.B, k), tuple(Ys))


def _permute_qseed(seed: QSeed, i: int, j: int) -> QSeed:
    seed.B.check_index(i)
    seed.B.check_index(j)
    order = list(range(seed.B.size))
    order[i - 1], order[j - 1] = order[j - 1], order[i - 1]
    Y = list(seed.Y)
    Y[i - 1], Y[j - 1] = Y[j - 1], Y[i - 1]
    return QSeed(ExchangeMatrix(seed.B.array[np.ix_(order, order)]), tuple(Y))


def apply_qword(seed: QSeed, word) -> QSeed:
    """Apply a mutation/permutation word with quantum mutations."""
    for step in word:
        if step[0] == "mu":
            seed = mutate_qseed(seed, step[1])
        else:
            seed = _permute_qseed(seed, step[1], step[2])
    return seed


def mu_prime(ctx: QTorusContext, k: int) -> List[FactorChain]:
    """
    Monomial part of the quantum mutation on the initial generators:
    Y_k -> Y_k^-1, Y_i -> q^{b_ik b_ki} Y_i Y_k^{b_ki} when b_ki >= 0, else Y_i.
    """
    ctx.B.check_index(k)
    m = ctx.size
    out = []
    for i in range(1, m + 1):
        Yi = FactorChain.generator(m, i)
        if i == k:
            out.append(Yi.inverse())
            continue
        b = ctx.B.b(k, i)
        if b >= 0:
            scalar = FactorChain.monomial((0,) * m, ctx.B.b(i, k) * b)
            out.append(scalar * Yi * FactorChain.generator(m, k) ** b)
        else:
            out.append(Yi)
    return out


def _shift_factors(ctx: QTorusContext, k: int, exps: Sequence[int]) -> FactorChain:
    """Phi(y_k - i b s) Phi(y_k)^-1 with s = sum_j a_j b_kj, from the shift rule."""
    s = sum(a * ctx.B.array[k - 1, j] for j, a in enumerate(exps))
    Yk = FactorChain.generator(ctx.size, k)
    chain = FactorChain()
    if s >= 0:
        for j in range(1, s + 1):
            chain = chain * FactorChain.binomial(Yk, 1 - 2 * j, -1)
    else:
        for j in range(1, -s + 1):
            chain = chain * FactorChain.binomial(Yk, 2 * j - 1, 1)
    return chain


def mu_sharp(ctx: QTorusContext, k: int, chain: FactorChain) -> FactorChain:
    """
    Conjugation by Phi(y_k) on a chain of monomials, each monomial E(a)
    picking up the binomials produced by the shift rule.
    """
    out = FactorChain()
    for factor in chain.factors:
        if not isinstance(factor, Monomial):
            raise ValueError("Conjugation by the dilogarithm is only tracked on monomial chains")
        out = out * FactorChain((factor,)) * _shift_factors(ctx, k, factor.exps)
    return out


def apply_Rq(ctx: QTorusContext, i: int, Ys: Optional[Sequence[FactorChain]] = None) -> Tuple[FactorChain, ...]:
    """
    Closed form of the i-th quantum braiding operator.

    Args:
        ctx (QTorusContext): torus of a braid exchange matrix
        i (int): generator index, 1..n-1
        Ys (sequence, optional): current generators; defaults to the initial ones

    Returns:
        tuple: all 3n+1 generator images, unchanged outside the window 3i-2..3i+4

    Raises:
        BraidError: If ctx.B is not a braid exchange matrix or i is out of range
    """
    n = strand_count(ctx.B)
    if not 1 <= i <= n - 1:
        raise BraidError(f"Generator index {i} out of range 1..{n - 1}")
    if Ys is None:
        Ys = QSeed.initial(ctx.B).Y
    start = 3 * i - 3
    Y1, Y2, Y3, Y4, Y5, Y6, Y7 = Ys[start:start + 7]

    def plus(chain: FactorChain, power: int = 1) -> FactorChain:
        return FactorChain.binomial(chain, 1, power)

    Y2p = Y2 * plus(Y4)
    Y6p = Y6 * plus(Y4)
    Y4pp = Y4.inverse() * plus(Y2p) * plus(Y6p)
    tail = plus(Y4.inverse(), -1) * plus(Y2p.inverse(), -1) * plus(Y6p.inverse(), -1) * plus(Y4pp.inverse(), -1)
    window = (
        Y1 * plus(Y2p),
        Y5 * tail,
        Y2p.inverse() * plus(Y4pp),
        Y4pp.inverse(),
        Y6p.inverse() * plus(Y4pp),
        Y3 * tail,
        Y7 * plus(Y6p),
    )
    out = list(Ys)
    out[start:start + 7] = window
    return tuple(out)


# ---------------------------------------------------------------------------
# representations


def skew_normal_form(B: ExchangeMatrix) -> Tuple[np.ndarray, List[int]]:
    """
    Integral congruence normal form B = Q D Q^T with Q unimodular and
    D = diag(d_1 J, ..., d_r J, 0), J = [[0, 1], [-1, 0]].

    Returns:
        tuple: (Q, [d_1, ..., d_r])
    """
    M = B.array.astype(np.int64).copy()
    m = M.shape[0]
    Q = np.eye(m, dtype=np.int64)

    def swap(a: int, b: int):
        if a == b:
            return
        M[[a, b], :] = M[[b, a], :]
        M[:, [a, b]] = M[:, [b, a]]
        Q[:, [a, b]] = Q[:, [b, a]]

    def add(c: int, a: int, r: int):
        # index r += c * index a
        if not c:
            return
        M[r, :] += c * M[a, :]
        M[:, r] += c * M[:, a]
        Q[:, a] -= c * Q[:, r]

    divisors = []
    t = 0
    while t + 1 < m:
        sub = np.abs(M[t:, t:])
        if not sub.any():
            break
        while True:
            sub = np.abs(M[t:, t:]).astype(float)
            sub[sub == 0] = np.inf
            i, j = np.unravel_index(np.argmin(sub), sub.shape)
            i, j = int(i) + t, int(j) + t
            swap(t, i)
            j = i if j == t else j
            swap(t + 1, j)
            if M[t, t + 1] < 0:
                swap(t, t + 1)
            p = M[t, t + 1]
            for r in range(t + 2, m):
                add(-(M[t, r] // p), t + 1, r)
                add(M[t + 1, r] // p, t, r)
            if not M[t, t + 2:].any() and not M[t + 1, t + 2:].any():
                break
        divisors.append(int(M[t, t + 1]))
        t += 2
    return Q, divisors


class _ComplexAlgebra:
    """Dense complex matrices with q = exp(i pi / N)."""

    exact = False

    def __init__(self, N: int, dim: int):
        self.N = N
        self.dim = dim

    def q(self, power: int) -> complex:
        return complex(np.exp(1j * np.pi * power / self.N))

    def identity(self):
        return np.eye(self.dim, dtype=complex)

    def weyl_matrix(self, cols: Sequence[int], qpows: Sequence[int], scalar) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        out[np.arange(self.dim), cols] = scalar * np.exp(1j * np.pi * np.asarray(qpows) / self.N)
        return out

    def scalar(self, value) -> complex:
        return complex(value)

    def scale(self, a, c):
        return c * a

    def add(self, a, b):
        return a + b

    def inverse(self, a):
        if np.linalg.cond(a) > 1e12:
            raise SingularEvaluationError("Binomial factor is numerically singular")
        return np.linalg.inv(a)

    def distance(self, a, b) -> float:
        return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(b)))))

    def equal(self, a, b, tol: float) -> bool:
        return self.distance(a, b) <= tol

    def entry(self, a, r: int, c: int) -> complex:
        return complex(a[r, c])


class _CyclotomicAlgebra:
    """Sparse matrices over Q(zeta_2N) with q = zeta_2N."""

    exact = True

    def __init__(self, N: int, dim: int):
        self.N = N
        self.m = 2 * N
        self.dim = dim

    def q(self, power: int) -> Cyclotomic:
        return Cyclotomic.zeta(self.m, power)

    def identity(self):
        return CycloMatrix.identity(self.m, self.dim)

    def weyl_matrix(self, cols: Sequence[int], qpows: Sequence[int], scalar) -> CycloMatrix:
        scalar = self.scalar(scalar)
        rows = {r: {int(c): Cyclotomic.zeta(self.m, int(p)) * scalar} for r, (c, p) in enumerate(zip(cols, qpows))}
        return CycloMatrix(self.m, self.dim, rows)

    def scalar(self, value) -> Cyclotomic:
        if isinstance(value, Cyclotomic):
            return value
        return Cyclotomic.from_rational(self.m, Fraction(value))

    def scale(self, a, c):
        return a.scale(self.scalar(c))

    def add(self, a, b):
        return a + b

    def inverse(self, a):
        try:
            return a.inverse()
        except DivisionByZeroError as exc:
            raise SingularEvaluationError("Binomial factor is singular over the cyclotomic field") from exc

    def distance(self, a, b) -> float:
        if a.equals(b):
            return 0.0
        return float(np.max(np.abs((a - b).to_numpy())))

    def equal(self, a, b, tol: float) -> bool:
        return a.equals(b)

    def entry(self, a, r: int, c: int) -> Cyclotomic:
        return a.get(r, c)


class Representation:
    """
    Finite-dimensional evaluation of a quantum torus at q^2 = omega = exp(2 pi i / N).
    """

    def __init__(self, ctx: QTorusContext, N: int, mode: str, kappa: List, alpha: np.ndarray, beta: np.ndarray):
        self.ctx = ctx
        self.N = N
        self.mode = mode
        self.kappa = list(kappa)
        self.alpha = alpha
        self.beta = beta
        factors = alpha.shape[1]
        self.dim = N ** factors
        self.algebra = _CyclotomicAlgebra(N, self.dim) if mode == "cyclotomic" else _ComplexAlgebra(N, self.dim)
        self._indices = list(itertools.product(range(N), repeat=factors))
        self.generators = [self._clock_shift(j) for j in range(ctx.size)]
        self.inverses = [self.algebra.inverse(g) for g in self.generators]
        self._power_cache: Dict[Tuple[int, int], object] = {}

    def _clock_shift(self, j: int):
        """kappa_j times the tensor product of Z^alpha X^beta over factors."""
        N = self.N
        alpha = self.alpha[j] % N
        beta = self.beta[j] % N
        cols, qpows = [], []
        for index in self._indices:
            target = [(r + b) % N for r, b in zip(index, beta)]
            col = 0
            for t in target:
                col = col * N + t
            cols.append(col)
            qpows.append(2 * int(np.dot(alpha, index)) % (2 * N))
        return self.algebra.weyl_matrix(cols, qpows, self.kappa[j])

    def generator_power(self, j: int, e: int):
        key = (j, e)
        if key not in self._power_cache:
            base = self.generators[j] if e > 0 else self.inverses[j]
            out = self.algebra.identity()
            for _ in range(abs(e)):
                out = out @ base
            self._power_cache[key] = out
        return self._power_cache[key]

    def monomial(self, exps: Sequence[int], qpow: int = 0):
        """Evaluate q^qpow E(exps)."""
        out = self.algebra.identity()
        for j, e in enumerate(exps):
            if e:
                out = out @ self.generator_power(j, int(e))
        shift = qpow + self.ctx.weyl_shift(exps)
        return self.algebra.scale(out, self.algebra.q(shift)) if shift else out

    def evaluate(self, obj, memo: Optional[Dict[int, object]] = None):
        """Evaluate a FactorChain, a single factor or a QTorusElement."""
        if isinstance(obj, QTorusElement):
            total = None
            for a, coeff in obj.terms.items():
                scalar = sum((self.algebra.scalar(v) * self.algebra.q(p) for p, v in coeff.items()),
                             self.algebra.scalar(0))
                term = self.algebra.scale(self.monomial(a), scalar)
                total = term if total is None else self.algebra.add(total, term)
            return total if total is not None else self.algebra.scale(self.algebra.identity(), 0)
        memo = {} if memo is None else memo
        key = id(obj)
        if key in memo:
            return memo[key]
        if isinstance(obj, Monomial):
            value = self.monomial(obj.exps, obj.qpow)
        elif isinstance(obj, Binomial):
            inner = self.evaluate(obj.inner, memo)
            base = self.algebra.add(self.algebra.identity(), self.algebra.scale(inner, self.algebra.q(obj.qpow)))
            if obj.power < 0:
                base = self.algebra.inverse(base)
            value = self.algebra.identity()
            for _ in range(abs(obj.power)):
                value = value @ base
        elif isinstance(obj, FactorChain):
            value = self.algebra.identity()
            for factor in obj.factors:
                value = value @ self.evaluate(factor, memo)
        else:
            raise TypeError(f"Cannot evaluate {type(obj).__name__} in a representation")
        memo[key] = value
        return value

    def central_scalar(self, exps: Sequence[int]):
        return self.algebra.entry(self.monomial(exps), 0, 0)


def check_relations(B: ExchangeMatrix, matrices: Sequence, q) -> float:
    """
    Largest violation of Y_k Y_j = q^{2 b_jk} Y_j Y_k over all pairs.

    Works for numpy arrays with complex q and for CycloMatrix with Cyclotomic q;
    the exact case returns 0.0 or 1.0.
    """
    worst = 0.0
    m = B.size
    for j in range(m):
        for k in range(j + 1, m):
            b = int(B.array[j, k])
            lhs = matrices[k] @ matrices[j]
            rhs = matrices[j] @ matrices[k]
            if isinstance(lhs, CycloMatrix):
                ok = lhs.equals(rhs.scale(q ** (2 * b)))
                worst = max(worst, 0.0 if ok else 1.0)
            else:
                scale = max(1.0, float(np.max(np.abs(lhs))))
                worst = max(worst, float(np.max(np.abs(lhs - q ** (2 * b) * rhs))) / scale)
    return worst


def _random_kappa(rng: np.random.Generator, size: int, mode: str) -> List:
    if mode == "cyclotomic":
        kappa = []
        for _ in range(size):
            num, den = (int(v) for v in rng.integers(2, 10, size=2))
            if num == den:
                num += 1
            kappa.append(Fraction(num, den) * (1 if rng.random() < 0.5 else -1))
        return kappa
    modulus = rng.uniform(0.4, 0.9, size=size)
    phase = rng.uniform(-np.pi, np.pi, size=size)
    return list(modulus * np.exp(1j * phase))


def rep_build(ctx: QTorusContext, N: int, mode: str = "complex", seed: int = 42,
              with_centre: bool = False, max_dim: int = 4096,
              kappa: Optional[Sequence] = None) -> Representation:
    """
    Clock/shift representation of the torus at q^2 = exp(2 pi i / N).

    The exponents come from the integral normal form B = Q D Q^T: in factor s the
    generator Y_j carries Z^{d_s Q_j,2s} X^{Q_j,2s+1}, scaled by a parameter kappa_j.

    Args:
        ctx (QTorusContext): torus to represent
        N (int): root order, at least 2
        mode (str): ``complex`` or ``cyclotomic``
        seed (int): seed of the kappa generator
        with_centre (bool): rescale kappa_{3i} so every Y_{3i-1}Y_{3i} acts by the same scalar
        max_dim (int): refuse representations above this dimension
        kappa (sequence, optional): explicit scaling parameters

    Returns:
        Representation: verified representation

    Raises:
        RepresentationError: For N < 2, oversize dimension or violated relations
    """
    if N < 2:
        raise RepresentationError(f"Root order must be at least 2, got {N}")
    if mode not in ("complex", "cyclotomic"):
        raise RepresentationError(f"Unknown representation mode: {mode!r}")
    Q, divisors = skew_normal_form(ctx.B)
    r = len(divisors)
    if N ** r > max_dim:
        raise RepresentationError(f"Representation dimension {N}^{r} exceeds the limit {max_dim}")
    alpha = np.zeros((ctx.size, r), dtype=np.int64)
    beta = np.zeros((ctx.size, r), dtype=np.int64)
    for s, d in enumerate(divisors):
        alpha[:, s] = d * Q[:, 2 * s]
        beta[:, s] = Q[:, 2 * s + 1]
    if kappa is None:
        kappa = _random_kappa(np.random.default_rng(seed), ctx.size, mode)
    rep = Representation(ctx, N, mode, list(kappa), alpha, beta)
    if with_centre:
        n = strand_count(ctx.B)
        pairs = [(3 * i - 1, 3 * i) for i in range(1, n + 1)]
        target = rep.central_scalar(_pair_vector(ctx.size, *pairs[0]))
        kappa = list(rep.kappa)
        for a, b in pairs[1:]:
            value = rep.central_scalar(_pair_vector(ctx.size, a, b))
            kappa[b - 1] = kappa[b - 1] * (target / value)
        rep = Representation(ctx, N, mode, kappa, alpha, beta)
    deviation = check_relations(ctx.B, rep.generators, rep.algebra.q(1))
    if deviation > 1e-10:
        raise RepresentationError(f"Representation violates the torus relations (deviation {deviation:.3e})")
    logger.debug("Built %s representation of rank %d torus: N=%d, dim=%d", mode, ctx.size, N, rep.dim)
    return rep


def _pair_vector(size: int, a: int, b: int) -> Tuple[int, ...]:
    return tuple(1 if j in (a - 1, b - 1) else 0 for j in range(size))


# ---------------------------------------------------------------------------
# centre and Heisenberg realisation


def central_generators(n: int) -> List[Tuple[int, ...]]:
    """Exponent vectors of Y_{3i-1}Y_{3i} (i = 1..n) and Y_1 Y_4 ... Y_{3n+1}."""
    size = 3 * n + 1
    vectors = [_pair_vector(size, 3 * i - 1, 3 * i) for i in range(1, n + 1)]
    vectors.append(tuple(1 if j % 3 == 0 else 0 for j in range(size)))
    return vectors


def heisenberg_realisation(n: int) -> List[Dict[str, object]]:
    """
    Linear forms of y_k in canonical pairs [x_i, p_j] = (i / 2 pi) delta_ij:
    y_{3i-2} = x_{i-1} - x_i, y_{3i-1} = p_i + c', y_{3i} = -p_i + c''
    with x_0 = x_{n+1} = 0, so y_{3n+1} = x_n.

    Returns:
        list: per generator {"x": vector, "p": vector, "const": "c'" | "c''" | None}
    """
    forms = []
    for i in range(1, n + 1):
        x = np.zeros(n, dtype=int)
        if i > 1:
            x[i - 2] = 1
        x[i - 1] = -1
        forms.append({"x": x, "p": np.zeros(n, dtype=int), "const": None})
        p = np.zeros(n, dtype=int)
        p[i - 1] = 1
        forms.append({"x": np.zeros(n, dtype=int), "p": p, "const": "c'"})
        forms.append({"x": np.zeros(n, dtype=int), "p": -p, "const": "c''"})
    x = np.zeros(n, dtype=int)
    x[n - 1] = 1
    forms.append({"x": x, "p": np.zeros(n, dtype=int), "const": None})
    return forms


def verify_heisenberg_realisation(n: int) -> CheckReport:
    """Commutators of the linear forms reproduce the braid exchange matrix."""
    report = CheckReport(title=f"Heisenberg realisation n={n}")
    B = build_braid_matrix(n).array
    forms = heisenberg_realisation(n)
    # [y_k, y_j] in units of i/2pi
    table = np.array([[int(fk["x"] @ fj["p"] - fk["p"] @ fj["x"]) for fj in forms] for fk in forms])
    report.add(check_entry(
        f"qtorus.heisenberg.n{n}.commutators",
        "[y_k, y_j] = (i/2pi) b_jk from canonical pairs",
        bool(np.array_equal(table, B.T)),
        metric=float(np.max(np.abs(table - B.T))),
    ))
    sums = [forms[3 * i - 2]["p"] + forms[3 * i - 1]["p"] for i in range(1, n + 1)]
    report.add(check_entry(
        f"qtorus.heisenberg.n{n}.centre",
        "y_{3i-1} + y_{3i} = c' + c'' on every strand",
        all(not s.any() for s in sums),
    ))
    return report


def central_elements_check(ctx: QTorusContext, rep: Optional[Representation] = None) -> CheckReport:
    """
    Exponent-level centrality of the braid central elements, with the commutator
    computed by q_multiply and optionally in a representation.
    """
    n = strand_count(ctx.B)
    report = CheckReport(title=f"central elements n={n}")
    for vector in central_generators(n):
        label = "Y" + "Y".join(str(j + 1) for j, e in enumerate(vector) if e)
        element = ctx.monomial(vector)
        pairings = [ctx.pairing(vector, ctx.unit(k)) for k in range(1, ctx.size + 1)]
        commute = all(
            (q_multiply(element, ctx.generator(k)) - q_multiply(ctx.generator(k), element)).is_zero()
            for k in range(1, ctx.size + 1)
        )
        details = {"pairings": pairings}
        ok = commute and not any(pairings)
        if rep is not None:
            M = rep.monomial(vector)
            deviation = max(rep.algebra.distance(M @ g, g @ M) for g in rep.generators)
            details["rep_deviation"] = deviation
            ok = ok and deviation <= 1e-10
        report.add(check_entry(f"qtorus.central.n{n}.{label}", "central elements of the braid torus", ok, **details))
    return report


# ---------------------------------------------------------------------------
# verification in representations


def _max_deviation(rep: Representation, lhs: Sequence[FactorChain], rhs: Sequence[FactorChain]) -> List[float]:
    memo: Dict[int, object] = {}
    return [rep.algebra.distance(rep.evaluate(a, memo), rep.evaluate(b, memo)) for a, b in zip(lhs, rhs)]


def with_retries(build, label: str):
    """Call build(attempt) until no singular binomial is met."""
    last = None
    for attempt in range(MAX_RETRIES):
        try:
            return build(attempt)
        except SingularEvaluationError as exc:
            last = exc
            logger.warning("%s: singular binomial, re-randomising kappa (attempt %d)", label, attempt + 1)
    raise SingularEvaluationError(f"{label}: singular after {MAX_RETRIES} attempts") from last


def mu_decompose_check(ctx: QTorusContext, k: int, rep: Representation, tol: float = 1e-9) -> CheckReport:
    """
    Monomial part followed by conjugation with Phi(y_k), versus quantum_mutate.
    """
    report = CheckReport(title=f"mutation decomposition k={k}")
    start = time.perf_counter()
    initial = QSeed.initial(ctx.B).Y
    direct = quantum_mutate(ctx, initial, k)
    composed = [mu_sharp(ctx, k, chain) for chain in mu_prime(ctx, k)]
    deviations = _max_deviation(rep, direct, composed)
    for i, deviation in enumerate(deviations, 1):
        report.add(check_entry(
            f"qtorus.decompose.k{k}.Y{i}",
            "quantum mutation = conjugation by Phi(y_k) after the monomial part",
            deviation <= tol, metric=deviation, tolerance=tol,
        ))
    for entry in report.entries:
        entry.runtime = (time.perf_counter() - start) / max(1, len(report))
    return report


def verify_quantum_involution(B: ExchangeMatrix, N: int = 5, mode: str = "complex", seed: int = 42,
                              tol: float = 1e-9) -> CheckReport:
    """Quantum mutation applied twice at each vertex returns the generators."""
    ctx = QTorusContext(B)
    report = CheckReport(title="quantum mutation involution")

    def run(attempt: int):
        rep = rep_build(ctx, N, mode, seed + attempt)
        out = []
        for k in range(1, B.size + 1):
            seed0 = QSeed.initial(B)
            twice = mutate_qseed(mutate_qseed(seed0, k), k)
            deviation = max(_max_deviation(rep, twice.Y, seed0.Y))
            out.append(check_entry(
                f"qtorus.involution.k{k}", "quantum mutation is an involution",
                deviation <= tol and twice.B == B, metric=deviation, tolerance=tol,
            ))
        return out

    for entry in with_retries(run, "involution"):
        report.add(entry)
    return report


def verify_Rq_equals_mutations(N: int = 3, n: int = 2, mode: str = "complex", seed: int = 42,
                               tol: float = 1e-9) -> CheckReport:
    """
    Closed form of the quantum braiding operator versus four quantum mutations
    and three transpositions, compared in a representation; plus the q = 1 limit.

    Returns:
        CheckReport: per generator max deviation (0 in cyclotomic mode)
    """

    B = build_braid_matrix(n)
    ctx = QTorusContext(B, "cyclotomic" if mode == "cyclotomic" else "complex")
    report = CheckReport(title=f"quantum braiding operator n={n} N={N} {mode}")

    def run(attempt: int):
        rep = rep_build(ctx, N, mode, seed + attempt)
        out = []
        for i in range(1, n):
            start = time.perf_counter()
            closed = apply_Rq(ctx, i)
            literal = apply_qword(QSeed.initial(B), R_mutation_word(i))
            deviation = max(_max_deviation(rep, closed, literal.Y))
            ok = deviation == 0.0 if rep.algebra.exact else deviation <= tol
            entry = check_entry(
                f"qtorus.Rq.n{n}.N{N}.{mode}.R{i}",
                "closed form equals the quantum mutation word",
                ok and literal.B == B, metric=deviation, tolerance=0.0 if rep.algebra.exact else tol,
            )
            entry.runtime = time.perf_counter() - start
            out.append(entry)
        return out

    for entry in with_retries(run, "Rq"):
        report.add(entry)

    names = variable_names("y", B.size)
    generic = generic_y_seed(B)
    for i in range(1, n):
        memo: Dict[int, RatFunc] = {}
        classical = tuple(chain.classical(names, memo) for chain in apply_Rq(ctx, i))
        expected = apply_R_y(generic, i).y
        report.add(check_entry(
            f"qtorus.Rq.n{n}.classical.R{i}",
            "q = 1 limit equals the classical y-action",
            all(a == b for a, b in zip(classical, expected)),
        ))
    return report


def verify_quantum_braid(n: int = 3, N: int = 3, mode: str = "complex", seed: int = 42,
                         tol: float = 1e-9) -> CheckReport:
    """Braid relations of the quantum y-action compared in a representation."""
    B = build_braid_matrix(n)
    ctx = QTorusContext(B)
    report = CheckReport(title=f"quantum braid relations n={n} N={N} {mode}")

    def word(letters: Sequence[int]) -> Tuple[FactorChain, ...]:
        Ys = QSeed.initial(B).Y
        for i in letters:
            Ys = apply_Rq(ctx, i, Ys)
        return Ys

    def run(attempt: int):
        rep = rep_build(ctx, N, mode, seed + attempt)
        out = []
        for i in range(1, n - 1):
            deviation = max(_max_deviation(rep, word((i, i + 1, i)), word((i + 1, i, i + 1))))
            ok = deviation == 0.0 if rep.algebra.exact else deviation <= tol
            out.append(check_entry(
                f"qtorus.braid.n{n}.N{N}.{mode}.R{i}R{i + 1}R{i}",
                "quantum braid relation on the y-variables",
                ok, metric=deviation, tolerance=tol,
            ))
        for i in range(1, n):
            for j in range(i + 2, n):
                deviation = max(_max_deviation(rep, word((i, j)), word((j, i))))
                out.append(check_entry(
                    f"qtorus.braid.n{n}.N{N}.{mode}.R{i}R{j}",
                    "quantum far commutation on the y-variables",
                    deviation <= tol, metric=deviation, tolerance=tol,
                ))
        return out

    for entry in with_retries(run, "quantum braid"):
        report.add(entry)
    return report
