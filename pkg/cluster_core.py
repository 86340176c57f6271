"""
Cluster seeds, exchange matrices and mutations.
Implements x-, y- and exchange-matrix mutation, subscript permutations and the
quiver correspondence. All user-facing indices are 1-based.
"""

import logging
import time
from fractions import Fraction
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from check_report import CheckReport, check_entry
from exact_algebra import RatFunc, variable_names

logger = logging.getLogger(__name__)

__all__ = [
    "SeedError",
    "ExchangeMatrix",
    "ClusterSeed",
    "YSeed",
    "quiver_from_matrix",
    "matrix_from_quiver",
    "mutate_matrix",
    "mutate_seed",
    "mutate_y",
    "exchange_x_values",
    "exchange_y_values",
    "y_values_from_x",
    "y_from_x",
    "permute",
    "mutate_sequence",
    "evaluate_seed",
    "generic_x_seed",
    "generic_y_seed",
    "flip_exchange_matrix",
    "random_exchange_matrix",
    "verify_mutation_properties",
]


class SeedError(ValueError):
    """Raised for invalid exchange matrices, seeds or indices."""


class ExchangeMatrix:
    """
    Immutable skew-symmetric integer matrix.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries: Union[Sequence[Sequence[int]], np.ndarray]):
        B = np.array(entries, dtype=int)
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise SeedError("Exchange matrix must be a square 2D array")
        if B.shape[0] == 0:
            raise SeedError("Exchange matrix must have positive size")
        if not np.array_equal(B, -B.T):
            raise SeedError("Exchange matrix must be skew-symmetric")
        B.setflags(write=False)
        self._entries = B

    @classmethod
    def zeros(cls, size: int) -> "ExchangeMatrix":
        return cls(np.zeros((size, size), dtype=int))

    @property
    def size(self) -> int:
        return self._entries.shape[0]

    @property
    def array(self) -> np.ndarray:
        return self._entries

    def b(self, i: int, j: int) -> int:
        """Entry b_ij with 1-based indices."""
        self.check_index(i)
        self.check_index(j)
        return int(self._entries[i - 1, j - 1])

    def check_index(self, k: int):
        if not isinstance(k, (int, np.integer)) or not (1 <= k <= self.size):
            raise SeedError(f"Index {k} out of range for size {self.size}")

    def to_list(self) -> List[List[int]]:
        return self._entries.tolist()

    def __eq__(self, other):
        if not isinstance(other, ExchangeMatrix):
            return NotImplemented
        return np.array_equal(self._entries, other._entries)

    def __hash__(self):
        return hash(self._entries.tobytes())

    def __repr__(self):
        return f"ExchangeMatrix({self.to_list()})"


def mutate_matrix(B: ExchangeMatrix, k: int) -> ExchangeMatrix:
    """
    Mutate an exchange matrix at vertex k (1-based).

    Args:
        B (ExchangeMatrix): skew-symmetric matrix
        k (int): mutation vertex

    Returns:
        ExchangeMatrix: mutated matrix

    Raises:
        SeedError: If k is out of range
    """
    B.check_index(k)
    M = B.array
    kk = k - 1
    col = M[:, kk][:, None]
    row = M[kk, :][None, :]
    mutated = M + (np.abs(col) * row + col * np.abs(row)) // 2
    mutated[kk, :] = -M[kk, :]
    mutated[:, kk] = -M[:, kk]
    return ExchangeMatrix(mutated)


@dataclass(frozen=True)
class ClusterSeed:
    """Cluster seed (x, B) with x stored as rational functions."""

    x: Tuple[RatFunc, ...]
    B: ExchangeMatrix

    def __post_init__(self):
        if len(self.x) != self.B.size:
            raise SeedError(f"Seed has {len(self.x)} variables but B has size {self.B.size}")
        for index, value in enumerate(self.x, 1):
            if value.is_zero():
                raise SeedError(f"Cluster variable x{index} must be nonzero")

    @property
    def size(self) -> int:
        return self.B.size

    def variables(self) -> Tuple[RatFunc, ...]:
        return self.x

    def replace(self, variables: Sequence[RatFunc], B: ExchangeMatrix = None) -> "ClusterSeed":
        return ClusterSeed(tuple(variables), self.B if B is None else B)

    def __eq__(self, other):
        if not isinstance(other, ClusterSeed):
            return NotImplemented
        return self.B == other.B and all(a == b for a, b in zip(self.x, other.x))

    __hash__ = None


@dataclass(frozen=True)
class YSeed:
    """Y-seed (y, B)."""

    y: Tuple[RatFunc, ...]
    B: ExchangeMatrix

    def __post_init__(self):
        if len(self.y) != self.B.size:
            raise SeedError(f"Seed has {len(self.y)} variables but B has size {self.B.size}")
        for index, value in enumerate(self.y, 1):
            if value.is_zero():
                raise SeedError(f"y-variable y{index} must be nonzero")

    @property
    def size(self) -> int:
        return self.B.size

    def variables(self) -> Tuple[RatFunc, ...]:
        return self.y

    def replace(self, variables: Sequence[RatFunc], B: ExchangeMatrix = None) -> "YSeed":
        return YSeed(tuple(variables), self.B if B is None else B)

    def __eq__(self, other):
        if not isinstance(other, YSeed):
            return NotImplemented
        return self.B == other.B and all(a == b for a, b in zip(self.y, other.y))

    __hash__ = None


Seed = Union[ClusterSeed, YSeed]


def quiver_from_matrix(B: ExchangeMatrix) -> nx.MultiDiGraph:
    """
    Quiver of B: max(b_ij, 0) arrows from i to j on vertices 1..n.
    """
    quiver = nx.MultiDiGraph()
    quiver.add_nodes_from(range(1, B.size + 1))
    M = B.array
    for i, j in zip(*np.nonzero(M > 0)):
        for _ in range(int(M[i, j])):
            quiver.add_edge(int(i) + 1, int(j) + 1)
    return quiver


def matrix_from_quiver(quiver: nx.MultiDiGraph) -> ExchangeMatrix:
    """
    Inverse of quiver_from_matrix.

    Raises:
        SeedError: For loops, 2-cycles or vertices not labelled 1..n
    """
    nodes = sorted(quiver.nodes())
    if nodes != list(range(1, len(nodes) + 1)):
        raise SeedError("Quiver vertices must be labelled 1..n")
    size = len(nodes)
    M = np.zeros((size, size), dtype=int)
    for i, j in quiver.edges():
        if i == j:
            raise SeedError(f"Quiver has a loop at vertex {i}")
        M[i - 1, j - 1] += 1
    if np.any((M > 0) & (M.T > 0)):
        raise SeedError("Quiver has a 2-cycle; it does not define an exchange matrix")
    return ExchangeMatrix(M - M.T)


def exchange_x_values(x: Sequence, B: ExchangeMatrix, k: int, one=1) -> List:
    """
    Exchange relation at k on any field elements (RatFunc, Fraction, ...):
    x_k -> (prod_{b_jk>0} x_j^{b_jk} + prod_{b_jk<0} x_j^{-b_jk}) / x_k.

    Raises:
        SeedError: If k is out of range or the lengths disagree
    """
    B.check_index(k)
    if len(x) != B.size:
        raise SeedError(f"Got {len(x)} values for an exchange matrix of size {B.size}")
    x = list(x)
    positive, negative = one, one
    for j in range(1, B.size + 1):
        b = B.b(j, k)
        if b > 0:
            positive = positive * x[j - 1] ** b
        elif b < 0:
            negative = negative * x[j - 1] ** (-b)
    x[k - 1] = (positive + negative) / x[k - 1]
    return x


def y_values_from_x(x: Sequence, B: ExchangeMatrix, one=1) -> List:
    """y_j = prod_k x_k^{b_kj} on any field elements."""
    if len(x) != B.size:
        raise SeedError(f"Got {len(x)} values for an exchange matrix of size {B.size}")
    y = []
    for j in range(1, B.size + 1):
        value = one
        for k in range(1, B.size + 1):
            b = B.b(k, j)
            if b:
                value = value * x[k - 1] ** b
        y.append(value)
    return y


def exchange_y_values(y: Sequence, B: ExchangeMatrix, k: int, one=1) -> List:
    """
    y-mutation at k on any field elements: y_k -> y_k^-1 and
    y_i -> y_i (1 + y_k^-1)^{-b_ki} for b_ki > 0, y_i (1 + y_k)^{-b_ki} for b_ki < 0.

    Raises:
        SeedError: If k is out of range or the lengths disagree
    """
    B.check_index(k)
    if len(y) != B.size:
        raise SeedError(f"Got {len(y)} values for an exchange matrix of size {B.size}")
    y = list(y)
    yk = y[k - 1]
    for i in range(1, B.size + 1):
        if i == k:
            continue
        b = B.b(k, i)
        if b > 0:
            y[i - 1] = y[i - 1] * (one + one / yk) ** (-b)
        elif b < 0:
            y[i - 1] = y[i - 1] * (one + yk) ** (-b)
    y[k - 1] = one / yk
    return y


def mutate_seed(s: ClusterSeed, k: int) -> ClusterSeed:
    """
    Mutate a cluster seed at k (1-based) by the exchange relation.

    Raises:
        SeedError: If k is out of range
    """
    one = RatFunc.constant(1, s.x[0].names)
    return ClusterSeed(tuple(exchange_x_values(s.x, s.B, k, one)), mutate_matrix(s.B, k))


def y_from_x(s: ClusterSeed) -> YSeed:
    """y_j = prod_k x_k^{b_kj}."""
    return YSeed(tuple(y_values_from_x(s.x, s.B, RatFunc.constant(1, s.x[0].names))), s.B)


def mutate_y(s: YSeed, k: int) -> YSeed:
    """
    Mutate a y-seed at k (1-based).

    Raises:
        SeedError: If k is out of range
    """
    one = RatFunc.constant(1, s.y[0].names)
    return YSeed(tuple(exchange_y_values(s.y, s.B, k, one)), mutate_matrix(s.B, k))


def _swap_matrix(B: ExchangeMatrix, i: int, j: int) -> ExchangeMatrix:
    order = list(range(B.size))
    order[i - 1], order[j - 1] = order[j - 1], order[i - 1]
    return ExchangeMatrix(B.array[np.ix_(order, order)])


def permute(s: Seed, i: int, j: int) -> Seed:
    """
    Swap subscripts i and j of the variables and of B simultaneously.

    Raises:
        SeedError: If i == j or either index is out of range
    """
    s.B.check_index(i)
    s.B.check_index(j)
    if i == j:
        raise SeedError("Permutation needs two distinct indices")
    values = list(s.variables())
    values[i - 1], values[j - 1] = values[j - 1], values[i - 1]
    return s.replace(values, _swap_matrix(s.B, i, j))


def mutate_sequence(s: Seed, ks: Iterable[int]) -> Seed:
    """Apply mutations left to right."""
    for k in ks:
        s = mutate_seed(s, k) if isinstance(s, ClusterSeed) else mutate_y(s, k)
    return s


def evaluate_seed(s: Seed, point: Mapping[str, object]) -> List[object]:
    """Specialise every variable of a seed at ``point``."""
    return [value.evaluate(point) for value in s.variables()]


def generic_x_seed(B: ExchangeMatrix) -> ClusterSeed:
    """Seed whose x-variables are the independent symbols x1..xn."""
    return ClusterSeed(RatFunc.variables(variable_names("x", B.size)), B)


def generic_y_seed(B: ExchangeMatrix) -> YSeed:
    """Y-seed whose variables are the independent symbols y1..yn."""
    return YSeed(RatFunc.variables(variable_names("y", B.size)), B)


def flip_exchange_matrix() -> ExchangeMatrix:
    """
    Five-vertex quiver of a single diagonal flip; vertex 3 is the diagonal.
    """
    M = np.zeros((5, 5), dtype=int)
    for i, j, b in ((3, 1, -1), (3, 2, 1), (3, 4, 1), (3, 5, -1)):
        M[i - 1, j - 1] = b
        M[j - 1, i - 1] = -b
    return ExchangeMatrix(M)


def random_exchange_matrix(size: int, rng: np.random.Generator, bound: int = 2) -> ExchangeMatrix:
    """Skew-symmetric matrix with entries drawn uniformly from [-bound, bound]."""
    upper = np.triu(rng.integers(-bound, bound + 1, size=(size, size)), 1)
    return ExchangeMatrix(upper - upper.T)


def _random_positive_point(size: int, rng: np.random.Generator) -> List[Fraction]:
    numerators = rng.integers(1, 10, size)
    denominators = rng.integers(1, 10, size)
    return [Fraction(int(p), int(q)) for p, q in zip(numerators, denominators)]


def _disconnect(B: ExchangeMatrix, j: int, k: int) -> ExchangeMatrix:
    M = B.array.copy()
    M[j - 1, k - 1] = 0
    M[k - 1, j - 1] = 0
    return ExchangeMatrix(M)


def verify_mutation_properties(samples: int = 200, size: int = 4, seed: int = 42, depth: int = 2) -> CheckReport:
    """
    Involutivity of x- and y-mutation, the compatibility
    mutate_y(y_from_x(s), k) == y_from_x(mutate_seed(s, k)) and the
    commutation mu_j mu_k == mu_k mu_j for b_jk = 0, on random seeds.

    Each sample draws a random exchange matrix and a random point with positive
    rational coordinates, then applies ``depth`` random mutations before the
    checked ones. The exchange relations are subtraction-free, so every value
    stays a positive Fraction and the comparisons are exact.
    """
    if size < 2:
        raise SeedError("Mutation properties need size >= 2")
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    failures = {"involution.x": 0, "involution.y": 0, "compatibility": 0, "commutation": 0}
    for _ in range(samples):
        B = random_exchange_matrix(size, rng)
        x = _random_positive_point(size, rng)
        for step in rng.integers(1, size + 1, depth):
            x = exchange_x_values(x, B, int(step))
            B = mutate_matrix(B, int(step))
        k = int(rng.integers(1, size + 1))
        y = y_values_from_x(x, B)
        if exchange_x_values(exchange_x_values(x, B, k), mutate_matrix(B, k), k) != x:
            failures["involution.x"] += 1
        if exchange_y_values(exchange_y_values(y, B, k), mutate_matrix(B, k), k) != y:
            failures["involution.y"] += 1
        if exchange_y_values(y, B, k) != y_values_from_x(exchange_x_values(x, B, k), mutate_matrix(B, k)):
            failures["compatibility"] += 1

        j, k = (int(v) for v in rng.choice(np.arange(1, size + 1), 2, replace=False))
        D = _disconnect(B, j, k)
        Dj, Dk = mutate_matrix(D, j), mutate_matrix(D, k)
        yD = y_values_from_x(x, D)
        same = (
            mutate_matrix(Dj, k) == mutate_matrix(Dk, j)
            and exchange_x_values(exchange_x_values(x, D, j), Dj, k)
            == exchange_x_values(exchange_x_values(x, D, k), Dk, j)
            and exchange_y_values(exchange_y_values(yD, D, j), Dj, k)
            == exchange_y_values(exchange_y_values(yD, D, k), Dk, j)
        )
        if not same:
            failures["commutation"] += 1
    anchors = {
        "involution.x": "mutation at k twice is the identity on x-seeds",
        "involution.y": "mutation at k twice is the identity on y-seeds",
        "compatibility": "y-mutation is the image of x-mutation under y_j = prod_k x_k^{b_kj}",
        "commutation": "mutations at j and k commute when b_jk = 0",
    }
    report = CheckReport(title=f"mutation properties size={size}")
    for key, count in failures.items():
        entry = report.add(check_entry(f"cluster.{key}", anchors[key], count == 0, metric=float(count),
                                       tolerance=0.0, samples=samples))
        entry.runtime = (time.perf_counter() - start) / len(failures)
    logger.info("Mutation properties on %d seeds: %s", samples, report.status.value)
    return report
