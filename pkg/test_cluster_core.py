"""
Tests for exchange matrices, seeds, mutations and quivers.
"""

import time
from fractions import Fraction

import numpy as np
import pytest

from cluster_core import (
    ClusterSeed,
    ExchangeMatrix,
    SeedError,
    YSeed,
    evaluate_seed,
    exchange_x_values,
    exchange_y_values,
    flip_exchange_matrix,
    generic_x_seed,
    generic_y_seed,
    matrix_from_quiver,
    mutate_matrix,
    mutate_seed,
    mutate_sequence,
    mutate_y,
    permute,
    quiver_from_matrix,
    random_exchange_matrix,
    verify_mutation_properties,
    y_from_x,
    y_values_from_x,
)
from exact_algebra import RatFunc, parse_ratfunc

A2 = ExchangeMatrix([[0, 1], [-1, 0]])


def test_exchange_matrix_validation():
    with pytest.raises(SeedError):
        ExchangeMatrix([[0, 1], [1, 0]])
    with pytest.raises(SeedError):
        ExchangeMatrix([[0, 1, 2]])
    with pytest.raises(SeedError):
        ExchangeMatrix(np.zeros((0, 0)))
    assert A2.b(1, 2) == 1
    with pytest.raises(SeedError):
        A2.b(3, 1)


def test_mutate_matrix_is_involution():
    rng = np.random.default_rng(7)
    for _ in range(10):
        B = random_exchange_matrix(5, rng)
        for k in range(1, 6):
            assert mutate_matrix(mutate_matrix(B, k), k) == B
    with pytest.raises(SeedError):
        mutate_matrix(A2, 0)


def test_mutate_matrix_triangle():
    # 1 -> 2 -> 3 with mutation at 2 creates 1 -> 3
    B = ExchangeMatrix([[0, 1, 0], [-1, 0, 1], [0, -1, 0]])
    mutated = mutate_matrix(B, 2)
    assert mutated.to_list() == [[0, -1, 1], [1, 0, -1], [-1, 1, 0]]


def test_a2_pentagon_periodicity():
    s = generic_x_seed(A2)
    x1, x2 = s.x
    s1 = mutate_seed(s, 1)
    assert s1.x[0] == (1 + x2) / x1
    after_five = mutate_sequence(s, [1, 2, 1, 2, 1])
    swapped = permute(after_five, 1, 2)
    assert swapped == s


def test_a2_y_seed_periodicity():
    s = generic_y_seed(A2)
    after_five = mutate_sequence(s, [1, 2, 1, 2, 1])
    assert permute(after_five, 1, 2) == s


def test_flip_mutation_y_values():
    s = generic_y_seed(flip_exchange_matrix())
    y1, y2, y3, y4, y5 = s.y
    mutated = mutate_y(s, 3)
    assert mutated.y[0] == y1 * (1 + y3)
    assert mutated.y[1] == y2 * y3 / (1 + y3)
    assert mutated.y[2] == 1 / y3
    assert mutated.y[3] == y4 * y3 / (1 + y3)
    assert mutated.y[4] == y5 * (1 + y3)
    assert mutated.B == mutate_matrix(flip_exchange_matrix(), 3)


def test_y_from_x_compatibility():
    B = flip_exchange_matrix()
    s = generic_x_seed(B)
    for k in range(1, 6):
        assert mutate_y(y_from_x(s), k) == y_from_x(mutate_seed(s, k))


def test_seed_rejects_size_mismatch_and_zero():
    x1, x2 = RatFunc.variables(("x1", "x2"))
    with pytest.raises(SeedError):
        ClusterSeed((x1,), A2)
    with pytest.raises(SeedError):
        YSeed((x1, x2 - x2), A2)


def test_permute_swaps_matrix_and_values():
    B = flip_exchange_matrix()
    s = generic_y_seed(B)
    swapped = permute(s, 1, 3)
    assert swapped.y[0] == s.y[2]
    assert swapped.B.b(1, 2) == B.b(3, 2)
    assert permute(swapped, 1, 3) == s
    with pytest.raises(SeedError):
        permute(s, 2, 2)


def test_evaluate_seed_exact():
    s = mutate_seed(generic_x_seed(A2), 1)
    assert evaluate_seed(s, {"x1": 2, "x2": 3}) == [2, 3]


def test_quiver_roundtrip():
    rng = np.random.default_rng(11)
    for _ in range(5):
        B = random_exchange_matrix(4, rng)
        quiver = quiver_from_matrix(B)
        assert sorted(quiver.nodes()) == [1, 2, 3, 4]
        assert quiver.number_of_edges() == int(np.sum(np.maximum(B.array, 0)))
        assert matrix_from_quiver(quiver) == B


def test_quiver_with_two_cycle_rejected():
    quiver = quiver_from_matrix(A2)
    quiver.add_edge(2, 1)
    with pytest.raises(SeedError):
        matrix_from_quiver(quiver)


def test_mixed_seed_from_parsed_values():
    y = tuple(parse_ratfunc(t, ("y1", "y2")) for t in ("y1", "1/y2"))
    s = YSeed(y, A2)
    assert mutate_y(mutate_y(s, 2), 2) == s


def test_verify_mutation_properties_passes():
    report = verify_mutation_properties(samples=5, size=4, seed=3)
    assert report.is_pass
    assert report.get("cluster.compatibility").metric == 0.0
    assert report.get("cluster.commutation").metric == 0.0
    assert len(report) == 4


def test_default_mutation_properties_are_fast():
    start = time.perf_counter()
    report = verify_mutation_properties()
    assert time.perf_counter() - start < 30.0
    assert report.is_pass
    assert all(entry.details["samples"] == 200 for entry in report.entries)


def test_exchange_values_on_dense_matrix():
    B = ExchangeMatrix([[0, 1, -2, 1], [-1, 0, -2, 2], [2, 2, 0, 1], [-1, -2, -1, 0]])
    x = [Fraction(2), Fraction(1, 3), Fraction(5, 7), Fraction(4)]
    mutated = exchange_x_values(x, B, 3)
    assert mutated[2] == (1 + x[0] ** 2 * x[1] ** 2 * x[3]) / x[2]
    assert exchange_x_values(mutated, mutate_matrix(B, 3), 3) == x
    y = y_values_from_x(x, B)
    assert exchange_y_values(y, B, 3) == y_values_from_x(mutated, mutate_matrix(B, 3))


def test_exchange_values_agree_with_symbolic_mutation():
    B = flip_exchange_matrix()
    point = {f"x{i}": Fraction(i, i + 2) for i in range(1, 6)}
    x = [point[f"x{i}"] for i in range(1, 6)]
    for k in range(1, 6):
        symbolic = mutate_seed(generic_x_seed(B), k)
        assert evaluate_seed(symbolic, point) == exchange_x_values(x, B, k)


def test_mutations_at_disconnected_pair_commute():
    B = ExchangeMatrix([[0, 0, 1], [0, 0, -1], [-1, 1, 0]])
    s = generic_x_seed(B)
    assert mutate_sequence(s, [1, 2]) == mutate_sequence(s, [2, 1])
    y = generic_y_seed(B)
    assert mutate_sequence(y, [1, 2]) == mutate_sequence(y, [2, 1])
    connected = generic_y_seed(A2)
    assert mutate_sequence(connected, [1, 2]) != mutate_sequence(connected, [2, 1])
