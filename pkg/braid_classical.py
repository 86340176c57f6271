"""
Classical braiding operator on cluster seeds.
Builds the (3n+1)x(3n+1) braid exchange matrix, applies the R-operator to x-
and y-seeds through its windowed closed form or its literal mutation word, and
verifies the braid relations exactly on generic symbolic seeds.
"""

import logging
import re
import time
from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import numpy as np

from check_report import CheckReport, check_entry
from cluster_core import (
    ClusterSeed,
    ExchangeMatrix,
    YSeed,
    generic_x_seed,
    generic_y_seed,
    mutate_seed,
    mutate_y,
    permute,
    y_from_x,
)
from exact_algebra import RatFunc

logger = logging.getLogger(__name__)

__all__ = [
    "BraidError",
    "BraidWord",
    "build_braid_matrix",
    "strand_count",
    "parse_braid_word",
    "R_mutation_word",
    "R_inverse_word",
    "apply_word",
    "apply_R_x",
    "apply_R_y",
    "apply_R_y_values",
    "apply_R",
    "evaluate_braid_word",
    "verify_braid_relations",
    "verify_definition_consistency",
    "verify_naturality",
]

_LETTER_RE = re.compile(r"^s([1-9]\d*)(\^-1)?$")

Seed = Union[ClusterSeed, YSeed]
# ("mu", k) or ("s", i, j), in application order
WordStep = Tuple


class BraidError(ValueError):
    """Raised for malformed braid words or seeds that do not fit the braid matrix."""


@dataclass(frozen=True)
class BraidWord:
    """Braid word on n strands; letters are (index, +1|-1)."""

    n: int
    letters: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.n < 2:
            raise BraidError(f"A braid word needs at least 2 strands, got {self.n}")
        for index, sign in self.letters:
            if not 1 <= index <= self.n - 1:
                raise BraidError(f"Generator s{index} does not exist on {self.n} strands")
            if sign not in (1, -1):
                raise BraidError(f"Letter exponent must be +1 or -1, got {sign}")

    def inverse(self) -> "BraidWord":
        return BraidWord(self.n, tuple((i, -e) for i, e in reversed(self.letters)))

    def __str__(self):
        return " ".join(f"s{i}" if e == 1 else f"s{i}^-1" for i, e in self.letters)


def parse_braid_word(text: str, n: int) -> BraidWord:
    """
    Parse whitespace separated ``s<k>`` / ``s<k>^-1`` tokens.

    Raises:
        BraidError: For unknown tokens or indices >= n
    """
    letters = []
    for token in text.split():
        match = _LETTER_RE.match(token)
        if not match:
            raise BraidError(f"Malformed braid letter: {token!r}")
        letters.append((int(match.group(1)), -1 if match.group(2) else 1))
    return BraidWord(n, tuple(letters))


def build_braid_matrix(n: int) -> ExchangeMatrix:
    """
    Exchange matrix for the braid group on n strands.

    Args:
        n (int): number of strands, at least 2

    Returns:
        ExchangeMatrix: skew-symmetric matrix of size 3n+1

    Raises:
        BraidError: If n < 2
    """
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise BraidError(f"Braid matrix needs n >= 2, got {n}")
    size = 3 * n + 1
    M = np.zeros((size, size), dtype=int)
    for block in range(n):
        v = 3 * block  # 0-based position of vertex 3i-2
        for i, j, b in ((v, v + 1, 1), (v, v + 2, -1), (v + 1, v + 3, 1), (v + 2, v + 3, -1)):
            M[i, j] = b
            M[j, i] = -b
    return ExchangeMatrix(M)


def strand_count(B: ExchangeMatrix) -> int:
    """Number of strands of a braid exchange matrix."""
    if (B.size - 1) % 3 or B.size < 7:
        raise BraidError(f"Seed of size {B.size} does not fit a braid exchange matrix")
    n = (B.size - 1) // 3
    if B != build_braid_matrix(n):
        raise BraidError("Seed exchange matrix is not the braid exchange matrix")
    return n


def _check_generator(i: int, n: int):
    if not isinstance(i, (int, np.integer)) or not 1 <= i <= n - 1:
        raise BraidError(f"Generator index {i} out of range 1..{n - 1}")


def R_mutation_word(i: int) -> List[WordStep]:
    """
    Literal mutation/permutation word of the i-th generator in application order:
    mu_{3i+1}, mu_{3i+3}, mu_{3i-1}, mu_{3i+1}, then s_{3i,3i+3}, s_{3i-1,3i+2}, s_{3i,3i+2}.
    """
    return [
        ("mu", 3 * i + 1),
        ("mu", 3 * i + 3),
        ("mu", 3 * i - 1),
        ("mu", 3 * i + 1),
        ("s", 3 * i, 3 * i + 3),
        ("s", 3 * i - 1, 3 * i + 2),
        ("s", 3 * i, 3 * i + 2),
    ]


def R_inverse_word(i: int) -> List[WordStep]:
    """Every step is an involution, so the inverse is the reversed word."""
    return list(reversed(R_mutation_word(i)))


def apply_word(s: Seed, word: Sequence[WordStep]) -> Seed:
    """Apply a mutation/permutation word step by step."""
    for step in word:
        if step[0] == "mu":
            s = mutate_seed(s, step[1]) if isinstance(s, ClusterSeed) else mutate_y(s, step[1])
        elif step[0] == "s":
            s = permute(s, step[1], step[2])
        else:
            raise BraidError(f"Unknown word step: {step!r}")
    return s


def _R_x_window(x: Sequence[RatFunc]) -> Tuple[RatFunc, ...]:
    x1, x2, x3, x4, x5, x6, x7 = x
    return (
        x1,
        x5,
        (x1 * x3 * x5 + x3 * x4 * x5 + x1 * x2 * x6) / (x2 * x4),
        (x1 * x3 * x4 * x5 + x3 * x4 ** 2 * x5 + x1 * x3 * x5 * x7 + x3 * x4 * x5 * x7 + x1 * x2 * x6 * x7)
        / (x2 * x4 * x6),
        (x3 * x4 * x5 + x3 * x5 * x7 + x2 * x6 * x7) / (x4 * x6),
        x3,
        x7,
    )


def _R_y_window(y: Sequence[RatFunc]) -> Tuple[RatFunc, ...]:
    y1, y2, y3, y4, y5, y6, y7 = y
    left = 1 + y2 + y2 * y4
    right = 1 + y6 + y4 * y6
    common = 1 + y2 + y6 + y2 * y6 + y2 * y4 * y6
    return (
        y1 * left,
        y2 * y4 * y5 * y6 / common,
        common / (y2 * y4),
        y4 / (left * right),
        common / (y4 * y6),
        y2 * y3 * y4 * y6 / common,
        right * y7,
    )


def _apply_window(values: Sequence[RatFunc], i: int, window) -> Tuple[RatFunc, ...]:
    start = 3 * i - 3
    values = list(values)
    values[start:start + 7] = window(values[start:start + 7])
    return tuple(values)


def apply_R_x(s: ClusterSeed, i: int) -> ClusterSeed:
    """
    Apply the i-th braiding operator to a cluster seed via the windowed closed form.

    Raises:
        BraidError: If the seed matrix is not the braid matrix or i is out of range
    """
    n = strand_count(s.B)
    _check_generator(i, n)
    return ClusterSeed(_apply_window(s.x, i, _R_x_window), s.B)


def apply_R_y(s: YSeed, i: int) -> YSeed:
    """
    Apply the i-th braiding operator to a y-seed via the windowed closed form.

    Raises:
        BraidError: If the seed matrix is not the braid matrix or i is out of range
    """
    n = strand_count(s.B)
    _check_generator(i, n)
    return YSeed(_apply_window(s.y, i, _R_y_window), s.B)


def apply_R_y_values(y: Sequence[complex], i: int) -> Tuple[complex, ...]:
    """
    Windowed closed form of the i-th braiding operator on plain numbers.

    Raises:
        BraidError: If len(y) is not 3n+1, i is out of range, or a denominator vanishes
    """
    if len(y) < 4 or (len(y) - 1) % 3:
        raise BraidError(f"Expected 3n+1 y-values, got {len(y)}")
    _check_generator(i, (len(y) - 1) // 3)
    try:
        return _apply_window([complex(v) for v in y], i, _R_y_window)
    except ZeroDivisionError as exc:
        raise BraidError(f"Degenerate y-values for R_{i}: {list(y)}") from exc


def apply_R(s: Seed, i: int, inverse: bool = False) -> Seed:
    """Forward letters use the closed form, inverse letters the reversed mutation word."""
    if inverse:
        _check_generator(i, strand_count(s.B))
        return apply_word(s, R_inverse_word(i))
    return apply_R_x(s, i) if isinstance(s, ClusterSeed) else apply_R_y(s, i)


def evaluate_braid_word(w: BraidWord, s: Seed) -> Seed:
    """
    Apply the letters of ``w`` left to right.

    Raises:
        BraidError: If the seed does not match the strand count of ``w``
    """
    if s.B.size != 3 * w.n + 1:
        raise BraidError(f"Seed of size {s.B.size} does not match a braid word on {w.n} strands")
    strand_count(s.B)
    for index, sign in w.letters:
        s = apply_R(s, index, inverse=sign < 0)
    logger.debug("Evaluated braid word %s on %d strands", w, w.n)
    return s


def _generic_seed(n: int, mode: str) -> Seed:
    B = build_braid_matrix(n)
    if mode == "x":
        return generic_x_seed(B)
    if mode == "y":
        return generic_y_seed(B)
    raise BraidError(f"Unknown seed mode: {mode!r}")


def _same(a: Seed, b: Seed) -> bool:
    return a == b


def verify_braid_relations(n: int, mode: str = "y") -> CheckReport:
    """
    Exact braid relations on a generic symbolic seed.

    Checks R_i R_{i+1} R_i = R_{i+1} R_i R_{i+1} for every i (n >= 3) and
    R_i R_j = R_j R_i for |i - j| > 1 (n >= 4).

    Returns:
        CheckReport: one entry per identity
    """
    report = CheckReport(title=f"braid relations n={n} mode={mode}")
    s = _generic_seed(n, mode)
    for i in range(1, n - 1):
        start = time.perf_counter()
        lhs = evaluate_braid_word(BraidWord(n, ((i, 1), (i + 1, 1), (i, 1))), s)
        rhs = evaluate_braid_word(BraidWord(n, ((i + 1, 1), (i, 1), (i + 1, 1))), s)
        entry = report.add(check_entry(
            f"braid.{mode}.n{n}.R{i}R{i + 1}R{i}",
            "braid relation R_i R_{i+1} R_i = R_{i+1} R_i R_{i+1}",
            _same(lhs, rhs),
            message="exact symbolic equality",
        ))
        entry.runtime = time.perf_counter() - start
    for i in range(1, n):
        for j in range(i + 2, n):
            start = time.perf_counter()
            lhs = evaluate_braid_word(BraidWord(n, ((i, 1), (j, 1))), s)
            rhs = evaluate_braid_word(BraidWord(n, ((j, 1), (i, 1))), s)
            entry = report.add(check_entry(
                f"braid.{mode}.n{n}.R{i}R{j}",
                "far commutation R_i R_j = R_j R_i for |i-j| > 1",
                _same(lhs, rhs),
                message="exact symbolic equality",
            ))
            entry.runtime = time.perf_counter() - start
    logger.info("Braid relations n=%d mode=%s: %s", n, mode, report.status.value)
    return report


def verify_definition_consistency(n: int, mode: str = "x") -> CheckReport:
    """
    Windowed closed form versus the literal mutation/permutation word, per generator,
    together with invariance of the exchange matrix.
    """
    report = CheckReport(title=f"definition consistency n={n} mode={mode}")
    s = _generic_seed(n, mode)
    for i in range(1, n):
        start = time.perf_counter()
        closed = apply_R(s, i)
        literal = apply_word(s, R_mutation_word(i))
        entry = report.add(check_entry(
            f"braid.{mode}.n{n}.definition.R{i}",
            "windowed closed form equals four mutations followed by three transpositions",
            _same(closed, literal),
        ))
        entry.runtime = time.perf_counter() - start
        report.add(check_entry(
            f"braid.{mode}.n{n}.invariant_B.R{i}",
            "exchange matrix is invariant under the braiding operator",
            literal.B == s.B,
        ))
        roundtrip = apply_R(closed, i, inverse=True)
        report.add(check_entry(
            f"braid.{mode}.n{n}.inverse.R{i}",
            "reversed mutation word inverts the braiding operator",
            _same(roundtrip, s),
        ))
    return report


def verify_naturality(n: int) -> CheckReport:
    """y_from_x after R_x equals R_y after y_from_x, per generator."""
    report = CheckReport(title=f"naturality n={n}")
    s = _generic_seed(n, "x")
    for i in range(1, n):
        start = time.perf_counter()
        lhs = y_from_x(apply_R_x(s, i))
        rhs = apply_R_y(y_from_x(s), i)
        entry = report.add(check_entry(
            f"braid.naturality.n{n}.R{i}",
            "y-variables of the transformed seed equal the transformed y-variables",
            _same(lhs, rhs),
        ))
        entry.runtime = time.perf_counter() - start
    return report
