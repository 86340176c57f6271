"""
Tests for the dilogarithm operator calculus.
Rule side conditions, rewrites on small words, the conjugation formula and
the replayed operator braid relation.
"""

from fractions import Fraction

import pytest

from braid_classical import BraidError
from check_report import CheckStatus
from exact_algebra import RatFunc, variable_names
from operator_calculus import (
    DEFAULT_PROOF_SCRIPT,
    LinearForm,
    OperatorContext,
    OperatorWord,
    ProofLog,
    ProofScriptError,
    RuleInapplicableError,
    apply_pentagon,
    apply_rule,
    apply_shift,
    apply_theta,
    cancel,
    commutator,
    commute,
    dilog_word,
    exp_token,
    insert,
    load_proof_script,
    parse_proof_script,
    parse_token,
    phi,
    replay_braid_proof,
    shift_binomials,
    substitute_center,
    theta,
    verify_adjoint,
)

y = LinearForm.y


@pytest.fixture
def ctx():
    return OperatorContext.braid(2)


def word(ctx, *tokens):
    return OperatorWord(ctx, tuple(tokens))


# linear forms and commutators

def test_parse_and_render_linear_forms():
    assert str(LinearForm.parse("y6-y7-c")) == "y6-y7-c"
    assert str(LinearForm.parse("c+y4")) == "y4+c"
    assert str(LinearForm.parse("2*c+y4")) == "y4+2*c"
    assert LinearForm.parse("y1+y1").get("y1") == Fraction(2)
    assert LinearForm.parse("y2-y2").is_zero()


@pytest.mark.parametrize("text", ["y1*y2", "foo", "x1", "y0", "", "y1+"])
def test_parse_rejects_bad_forms(text):
    with pytest.raises(ProofScriptError):
        LinearForm.parse(text)


def test_commutator_follows_exchange_matrix(ctx):
    assert commutator(ctx, y(2), y(1)) == 1
    assert commutator(ctx, y(1), y(2)) == -1
    assert commutator(ctx, y(1), y(4)) == 0
    assert commutator(ctx, y(4) + LinearForm.of({"c": 1}), y(1)) == 0


def test_constraint_identifies_centre(ctx):
    assert ctx.same_form(y(3), LinearForm.parse("c-y2"))
    assert not OperatorContext.braid(2, constrained=False).same_form(y(3), LinearForm.parse("c-y2"))
    a = word(ctx, phi(y(3)))
    b = word(ctx, phi("c-y2"))
    assert a.equals(b)


def test_parse_token():
    assert str(parse_token("Phi(y4)^-1")) == "Phi(y4)^-1"
    assert str(parse_token("theta(c+y4)")) == "theta(y4+c)"
    assert str(parse_token("E(y2)")) == "E(y2)"
    with pytest.raises(ProofScriptError):
        parse_token("Psi(y4)")


def test_word_rejects_out_of_rank_forms(ctx):
    with pytest.raises(RuleInapplicableError):
        word(ctx, phi(y(12)))


# pentagon

def test_pentagon_forward_and_reverse(ctx):
    start = word(ctx, phi(y(2)), phi(y(1)))
    forward = apply_pentagon(start, 1, "forward")
    assert str(forward) == "Phi(y1) Phi(y1+y2) Phi(y2)"
    back = apply_pentagon(forward, 1, "reverse")
    assert str(back) == "Phi(y2) Phi(y1)"


def test_pentagon_side_condition(ctx):
    with pytest.raises(RuleInapplicableError):
        apply_pentagon(word(ctx, phi(y(1)), phi(y(2))), 1, "forward")
    with pytest.raises(RuleInapplicableError):
        apply_pentagon(word(ctx, phi(y(1)), phi(y(4))), 1, "forward")
    with pytest.raises(RuleInapplicableError):
        apply_pentagon(word(ctx, phi(y(2)), exp_token(y(1))), 1, "forward")


@pytest.mark.parametrize("tokens, expected", [
    (("Phi(y1)^-1", "Phi(y2)"), "Phi(y1+y2) Phi(y2) Phi(y1)^-1"),
    (("Phi(y2)^-1", "Phi(y1)"), "Phi(y1) Phi(y2)^-1 Phi(y1+y2)^-1"),
    (("Phi(y2)", "Phi(y1)^-1"), "Phi(y1+y2)^-1 Phi(y1)^-1 Phi(y2)"),
    (("Phi(y1)^-1", "Phi(y2)^-1"), "Phi(y2)^-1 Phi(y1+y2)^-1 Phi(y1)^-1"),
])
def test_pentagon_inverse_variants(ctx, tokens, expected):
    start = word(ctx, *(parse_token(t) for t in tokens))
    forward = apply_pentagon(start, 1, "forward")
    assert str(forward) == expected
    assert apply_pentagon(forward, 1, "reverse").equals(start)


def test_pentagon_relator_form(ctx):
    start = word(ctx, phi(y(2)), phi(y(1)))
    out = apply_rule(start, "pentagon", 1, "relator 2 : Phi(y1) Phi(y1+y2) Phi(y2)")
    assert out.equals(apply_pentagon(start, 1, "forward"))
    with pytest.raises(RuleInapplicableError):
        apply_rule(start, "pentagon", 1, "relator 2 : Phi(y1) Phi(y2)")


# theta rules

def test_theta_moves_phi(ctx):
    start = word(ctx, theta("c+y4"), phi(y(6)))
    out = apply_theta(start, 1, "right")
    assert str(out) == "Phi(y4+y6+c) theta(y4+c)"


def test_theta_left_inverts_right(ctx):
    start = word(ctx, phi(y(6)), theta("c+y4"))
    left = apply_theta(start, 2, "left")
    assert str(left) == "theta(y4+c) Phi(-y4+y6-c)"
    assert apply_theta(left, 1, "right").equals(start)


def test_theta_multiple_commutators(ctx):
    phi_word = word(ctx, theta("c+y4"), phi("2*y6"))
    assert str(apply_theta(phi_word, 1, "right")) == "Phi(2*y4+2*y6+2*c) theta(y4+c)"
    exp_word = word(ctx, theta("c+y4"), exp_token("2*y6"))
    with pytest.raises(RuleInapplicableError):
        apply_theta(exp_word, 1, "right")


def test_fuse_and_split(ctx):
    fused = apply_theta(word(ctx, phi(y(4)), phi("-y4")), 1, "fuse")
    assert str(fused) == "theta(y4)"
    assert str(apply_theta(fused, 1, "split")) == "Phi(y4) Phi(-y4)"
    constrained = apply_theta(word(ctx, phi(y(3)), phi("y2-c")), 1, "fuse")
    assert constrained.tokens[0].kind == "theta"
    with pytest.raises(RuleInapplicableError):
        apply_theta(word(ctx, phi(y(4)), phi(y(4))), 1, "fuse")


def test_fuse_of_scalar_form_goes_to_scalar(ctx):
    out = apply_theta(word(ctx, phi("c"), phi("-c")), 1, "fuse")
    assert len(out) == 0
    assert out.scalar_dict() == {"theta(c)": Fraction(1)}


# bookkeeping

def test_commute_cancel_insert(ctx):
    assert str(commute(word(ctx, phi(y(1)), phi(y(4))), 1)) == "Phi(y4) Phi(y1)"
    with pytest.raises(RuleInapplicableError):
        commute(word(ctx, phi(y(1)), phi(y(2))), 1)
    assert len(cancel(word(ctx, phi(y(4)), phi(y(4), -1)), 1)) == 0
    assert len(cancel(word(ctx, exp_token(y(3)), exp_token("y2-c")), 1)) == 0
    with pytest.raises(RuleInapplicableError):
        cancel(word(ctx, phi(y(4)), phi(y(4))), 1)
    inserted = insert(word(ctx), 1, "Phi(y2)^-1")
    assert str(inserted) == "Phi(y2)^-1 Phi(y2)"
    with pytest.raises(RuleInapplicableError):
        insert(word(ctx), 3, "Phi(y2)")


# shift

def test_shift_binomials(ctx):
    assert len(shift_binomials(ctx, y(2), 0)) == 0
    up = shift_binomials(ctx, y(2), 2)
    assert [(f.qpow, f.power) for f in up.factors] == [(1, 1), (3, 1)]
    down = shift_binomials(ctx, y(2), -1)
    assert [(f.qpow, f.power) for f in down.factors] == [(-1, -1)]


def test_shift_left_reproduces_mutation_factor(ctx):
    out = apply_shift(word(ctx, phi(y(2)), exp_token(y(1))), 1, "left")
    assert [t.kind for t in out.tokens] == ["exp", "chain", "phi"]
    names = variable_names("y", ctx.size)
    ys = RatFunc.variables(names)
    assert out.tokens[1].chain.classical(names) == 1 + ys[1]


def test_shift_right_and_commuting_case(ctx):
    out = apply_shift(word(ctx, exp_token(y(1)), phi(y(2))), 1, "right")
    assert [t.kind for t in out.tokens] == ["phi", "chain", "exp"]
    plain = apply_shift(word(ctx, exp_token(y(1)), phi(y(4))), 1, "right")
    assert [t.kind for t in plain.tokens] == ["phi", "exp"]


# centre substitution

def test_substitute_center_picks_disjoint_pair(ctx):
    out = substitute_center(word(ctx, exp_token("y2+y4+c")))
    assert str(out) == "E(y2+y4+y5+y6)"
    assert out.scalar_dict() == {}
    literal = substitute_center(word(ctx, exp_token("y2+y4+c")), literal_phase=True)
    assert literal.scalar_dict() == {"q": Fraction(1)}


def test_substitute_center_needs_constraint():
    free = OperatorContext.braid(2, constrained=False)
    with pytest.raises(RuleInapplicableError):
        substitute_center(word(free, exp_token("y2+c")))


# audit log

def test_proof_log_revalidates_and_detects_tampering(ctx):
    start = word(ctx, phi(y(2)), phi(y(1)), phi(y(4)), phi(y(4), -1))
    log = ProofLog(start)
    current = apply_rule(start, "pentagon", 1, "forward", log)
    current = apply_rule(current, "cancel", 4, "", log)
    assert str(current) == "Phi(y1) Phi(y1+y2) Phi(y2)"
    assert len(log) == 2
    assert log.revalidate()
    log.steps[1].word = "Phi(y1)"
    assert not log.revalidate()


# braiding operator

def test_dilog_word(ctx):
    assert " ".join(str(t) for t in dilog_word(ctx, 1)) == "Phi(y4) Phi(y2) Phi(y6) Phi(y4)^-1 theta(y4+c)"
    with pytest.raises(BraidError):
        dilog_word(ctx, 2)


def test_adjoint_action_matches_closed_form():
    report = verify_adjoint(i=1, Ns=(3,))
    assert report.is_pass, [e.check_id for e in report.failures()]
    assert report.get("opcalc.adjoint.i1.Y1.N3").status == CheckStatus.PASS
    assert report.get("opcalc.adjoint.i1.Y4.classical").status == CheckStatus.PASS
    assert report.get("opcalc.adjoint.i1.Y2.audit").status == CheckStatus.PASS


@pytest.mark.slow
def test_adjoint_action_second_window_and_literal_phase():
    assert verify_adjoint(i=2, Ns=(3,)).is_pass
    literal = verify_adjoint(i=1, Ns=(3, 5), literal_phase=True)
    assert literal.is_pass
    assert literal.get("opcalc.adjoint.i1.Y2.N5.residual").status == CheckStatus.INFO


# proof scripts

def test_parse_proof_script():
    script = parse_proof_script(
        "strands 3\nstart R1 R2 R1\ngoal R2 R1 R2\n"
        "theta 10 right 5  # comment\npentagon 11 forward\ninsert 11 Phi(y4)\n"
    )
    assert script.strands == 3 and script.start == [1, 2, 1] and script.goal == [2, 1, 2]
    assert [(s.rule, s.position, s.argument, s.count) for s in script.steps] == [
        ("theta", 10, "right", 5),
        ("pentagon", 11, "forward", 1),
        ("insert", 11, "Phi(y4)", 1),
    ]


@pytest.mark.parametrize("text", [
    "start R1 R2 R1\ngoal R2 R1 R2\n",
    "strands 3\nstart R1 X2\ngoal R2\n",
    "strands 3\nstart R1\ngoal R1\nfrobnicate 1\n",
    "strands 3\nstart R1\ngoal R1\ncommute first\n",
])
def test_malformed_scripts(text):
    with pytest.raises(ProofScriptError):
        parse_proof_script(text)


def test_missing_script_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_proof_script(tmp_path / "missing.steps")


def test_checked_in_braid_proof_replays():
    assert DEFAULT_PROOF_SCRIPT.exists()
    report = replay_braid_proof()
    assert report.is_pass, [(e.check_id, e.message) for e in report.failures()]
    steps = [e for e in report.entries if ".step" in e.check_id]
    assert len(steps) == 60
    assert report.get("opcalc.braid.n3.goal").status == CheckStatus.PASS
    assert report.get("opcalc.braid.n3.residual_scalar").status == CheckStatus.PASS
    assert report.get("opcalc.braid.n3.audit").status == CheckStatus.PASS


def test_replay_stops_at_inapplicable_step():
    script = parse_proof_script("strands 3\nstart R1 R2 R1\ngoal R2 R1 R2\ncommute 1\ncommute 2\n")
    report = replay_braid_proof(script)
    assert not report.is_pass
    assert report.get("opcalc.braid.n3.step001").status == CheckStatus.FAIL
    assert len(report) == 1
