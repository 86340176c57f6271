"""
Tests for the quantum torus, quantum mutations and clock/shift representations.
"""

import numpy as np
import pytest

from braid_classical import BraidError, build_braid_matrix
from check_report import CheckStatus
from cluster_core import ExchangeMatrix, SeedError, flip_exchange_matrix, generic_y_seed, mutate_y
from exact_algebra import variable_names
from quantum_torus import (
    FactorChain,
    QSeed,
    QTorusContext,
    RepresentationError,
    apply_Rq,
    central_elements_check,
    central_generators,
    check_relations,
    heisenberg_realisation,
    mu_decompose_check,
    mutate_qseed,
    q_multiply,
    quantum_mutate,
    rep_build,
    skew_normal_form,
    verify_heisenberg_realisation,
    verify_quantum_braid,
    verify_quantum_involution,
    verify_Rq_equals_mutations,
)


@pytest.fixture
def flip_ctx():
    return QTorusContext(flip_exchange_matrix())


def test_generators_q_commute(flip_ctx):
    B = flip_ctx.B
    for j in range(1, 6):
        for k in range(1, 6):
            Yj, Yk = flip_ctx.generator(j), flip_ctx.generator(k)
            exps = tuple(a + b for a, b in zip(flip_ctx.unit(j), flip_ctx.unit(k)))
            assert q_multiply(Yk, Yj) == flip_ctx.monomial(exps, B.b(j, k))
            assert q_multiply(Yj, Yk) == flip_ctx.monomial(exps, -B.b(j, k))


def test_torus_element_arithmetic(flip_ctx):
    Y1 = flip_ctx.generator(1)
    assert (Y1 - Y1).is_zero()
    assert (Y1 + Y1) == 2 * Y1
    assert q_multiply(flip_ctx.one(), Y1) == Y1
    with pytest.raises(ValueError):
        Y1 + QTorusContext(build_braid_matrix(2)).generator(1)
    with pytest.raises(ValueError):
        QTorusContext(flip_ctx.B, "p-adic")


def test_classical_projection(flip_ctx):
    element = flip_ctx.monomial((1, 0, 1, 0, 0), 3) + flip_ctx.one()
    y1, _, y3, _, _ = generic_y_seed(flip_ctx.B).y
    assert element.classical() == y1 * y3 + 1


def test_quantum_mutation_has_classical_limit(flip_ctx):
    names = variable_names("y", 5)
    initial = QSeed.initial(flip_ctx.B)
    classical = mutate_y(generic_y_seed(flip_ctx.B), 3)
    mutated = quantum_mutate(flip_ctx, initial.Y, 3)
    assert tuple(chain.classical(names) for chain in mutated) == classical.y
    with pytest.raises(SeedError):
        quantum_mutate(flip_ctx, initial.Y[:4], 3)


def test_factor_chain_inverse_and_depth():
    Y = FactorChain.generator(3, 1)
    chain = Y * FactorChain.binomial(Y, 1, -1)
    assert len(chain.inverse()) == 2
    assert chain.depth() == 2
    assert [f.exps for f in (Y ** -2).factors] == [(-1, 0, 0), (-1, 0, 0)]


def test_skew_normal_form_reconstructs_matrix():
    for B in (flip_exchange_matrix(), build_braid_matrix(2), build_braid_matrix(3)):
        Q, divisors = skew_normal_form(B)
        D = np.zeros_like(B.array, dtype=np.int64)
        for s, d in enumerate(divisors):
            D[2 * s, 2 * s + 1] = d
            D[2 * s + 1, 2 * s] = -d
        assert np.array_equal(Q @ D @ Q.T, B.array)
        assert round(abs(np.linalg.det(Q))) == 1
        assert all(d > 0 for d in divisors)


@pytest.mark.parametrize("mode", ["complex", "cyclotomic"])
def test_representation_satisfies_relations(flip_ctx, mode):
    rep = rep_build(flip_ctx, 3, mode, seed=5)
    assert check_relations(flip_ctx.B, rep.generators, rep.algebra.q(1)) <= 1e-10


def test_representation_limits(flip_ctx):
    with pytest.raises(RepresentationError):
        rep_build(flip_ctx, 1)
    with pytest.raises(RepresentationError):
        rep_build(flip_ctx, 5, max_dim=4)
    with pytest.raises(RepresentationError):
        rep_build(flip_ctx, 3, mode="float")


def test_mutation_decomposes_into_monomial_part_and_conjugation(flip_ctx):
    rep = rep_build(flip_ctx, 5, "complex", seed=7)
    assert mu_decompose_check(flip_ctx, 3, rep).is_pass


def test_quantum_mutation_involution():
    assert verify_quantum_involution(flip_exchange_matrix(), N=3).is_pass


def test_double_mutation_restores_matrix(flip_ctx):
    seed = mutate_qseed(mutate_qseed(QSeed.initial(flip_ctx.B), 3), 3)
    assert seed.B == flip_ctx.B


def test_apply_Rq_window_and_range():
    ctx = QTorusContext(build_braid_matrix(2))
    images = apply_Rq(ctx, 1)
    assert len(images) == 7
    with pytest.raises(BraidError):
        apply_Rq(ctx, 2)
    with pytest.raises(BraidError):
        apply_Rq(QTorusContext(ExchangeMatrix.zeros(7)), 1)


def test_Rq_matches_mutation_word_exactly():
    report = verify_Rq_equals_mutations(N=3, n=2, mode="cyclotomic")
    assert report.is_pass
    assert report.get("qtorus.Rq.n2.N3.cyclotomic.R1").metric == 0.0
    assert report.get("qtorus.Rq.n2.classical.R1").is_pass


def test_Rq_matches_mutation_word_in_complex_representation():
    report = verify_Rq_equals_mutations(N=5, n=2, mode="complex")
    assert report.status == CheckStatus.PASS
    assert report.get("qtorus.Rq.n2.N5.complex.R1").metric <= 1e-9


def test_quantum_braid_relation():
    report = verify_quantum_braid(n=3, N=3)
    assert report.is_pass


def test_centre_of_braid_torus():
    ctx = QTorusContext(build_braid_matrix(2))
    rep = rep_build(ctx, 3, "complex", seed=1)
    report = central_elements_check(ctx, rep)
    assert report.is_pass
    assert len(report) == 3


def test_heisenberg_realisation():
    forms = heisenberg_realisation(2)
    assert len(forms) == 7
    assert forms[1]["const"] == "c'"
    assert forms[2]["const"] == "c''"
    assert verify_heisenberg_realisation(3).is_pass


def test_central_generators_pair_trivially():
    B = build_braid_matrix(2).array
    vectors = central_generators(2)
    assert vectors[0] == (0, 1, 1, 0, 0, 0, 0)
    assert vectors[-1] == (1, 0, 0, 1, 0, 0, 1)
    for v in vectors:
        assert not np.any(B @ np.array(v))
