import math
import random

import pytest

from ringswarm.deformation import (
    BinOp,
    Call,
    DeformationSpec,
    EvaluationError,
    ExprSyntaxError,
    Neg,
    Num,
    Pow,
    UnknownIdentifier,
    UnknownPreset,
    Var,
    evaluate,
    parse,
    preset,
    preset_names,
    to_text,
)


def test_parse_fig1a_shape():
    e = parse("s*sin(6*phi)*cos(6*phi)")
    assert evaluate(e, 0.1, 0.3) == pytest.approx(0.3 * math.sin(0.6) * math.cos(0.6))


def test_parse_constant_zero():
    assert parse("0") == Num(0.0)
    assert evaluate(parse("0"), 1.0, 1.0) == 0.0


def test_unknown_function():
    with pytest.raises(UnknownIdentifier) as exc:
        parse("s*tan(phi)")
    assert exc.value.name == "tan"


def test_unknown_variable():
    with pytest.raises(UnknownIdentifier):
        parse("phi + theta")


def test_syntax_error_has_position():
    with pytest.raises(ExprSyntaxError) as exc:
        parse("1 + * 2")
    assert exc.value.position == 4


@pytest.mark.parametrize(
    "text,phi,s,want",
    [
        # direct closed-form evaluations of the bundled scenario shape
        ("s*(cos(phi)*sin(phi) - sin(phi)^3)", math.pi / 2, 0.4, -0.4),
        ("s*cos(phi)^2*sin(-phi)", 0.0, 0.4, 0.0),
        ("s*cos(phi)^2*sin(-phi)", math.pi / 4, 0.4, 0.4 * 0.5 * math.sin(-math.pi / 4)),
    ],
)
def test_eval_closed_forms(text, phi, s, want):
    assert evaluate(parse(text), phi, s) == pytest.approx(want, abs=1e-15)


def test_eval_s_zero_kills_s_scaled_terms():
    e = parse("s*(cos(phi)*sin(phi) - sin(phi)^3) + s*cos(phi)")
    for k in range(32):
        assert evaluate(e, 2 * math.pi * k / 32, 0.0) == 0.0


def test_precedence_pow_over_neg():
    # -phi^2 is -(phi^2)
    assert evaluate(parse("-phi^2"), 3.0, 0.0) == -9.0


def test_precedence_mul_over_add():
    assert evaluate(parse("1 + 2*3"), 0.0, 0.0) == 7.0


def test_unary_minus_binds_tighter_than_mul():
    # -a*b parses as (-a)*b; same value either way, check the tree shape
    e = parse("-phi*s")
    assert isinstance(e, BinOp) and e.op == "*"
    assert isinstance(e.left, Neg)


def test_pow_right_assoc_literal_chain():
    assert evaluate(parse("phi^2^3"), 2.0, 0.0) == 2.0 ** 8


def test_pow_requires_integer_literal():
    with pytest.raises(ExprSyntaxError):
        parse("phi^s")
    with pytest.raises(ExprSyntaxError):
        parse("phi^2.5")
    with pytest.raises(ExprSyntaxError):
        parse("phi^-2")


def test_division_by_zero():
    with pytest.raises(EvaluationError):
        evaluate(parse("1/(s - s)"), 0.0, 1.0)


def test_parens_and_whitespace():
    assert evaluate(parse("  ( phi + 1 ) * 2 "), 2.0, 0.0) == 6.0


def test_trailing_garbage_rejected():
    with pytest.raises(ExprSyntaxError):
        parse("phi phi")


def _random_expr(rng, depth=0):
    choices = ["num", "var"]
    if depth < 4:
        choices += ["add", "sub", "mul", "div", "neg", "pow", "sin", "cos"]
    kind = rng.choice(choices)
    if kind == "num":
        # literals are non-negative in parsed trees; negation is a Neg node
        return Num(round(rng.uniform(0, 3), 3))
    if kind == "var":
        return Var(rng.choice(["phi", "s"]))
    if kind in ("add", "sub", "mul", "div"):
        op = {"add": "+", "sub": "-", "mul": "*", "div": "/"}[kind]
        return BinOp(op, _random_expr(rng, depth + 1), _random_expr(rng, depth + 1))
    if kind == "neg":
        return Neg(_random_expr(rng, depth + 1))
    if kind == "pow":
        return Pow(_random_expr(rng, depth + 1), rng.randint(0, 4))
    return Call(kind, _random_expr(rng, depth + 1))


def test_print_parse_fixpoint_random():
    rng = random.Random(42)
    for _ in range(300):
        e = _random_expr(rng)
        assert parse(to_text(e)) == e


def test_print_parse_fixpoint_evaluates_identically():
    rng = random.Random(43)
    for _ in range(100):
        e = _random_expr(rng)
        e2 = parse(to_text(e))
        for _ in range(5):
            phi, s = rng.uniform(-7, 7), rng.uniform(-2, 2)
            try:
                a = evaluate(e, phi, s)
            except EvaluationError:
                continue
            assert evaluate(e2, phi, s) == a  # exact, same tree


def test_preset_fig1c():
    d = preset("fig1c")
    assert d.s == 0.6
    assert d.omega_zd == 0.5
    phi = 0.7
    assert d.rates(phi)[0] == pytest.approx(0.6 * math.cos(2 * phi))
    assert d.rates(phi)[1] == pytest.approx(0.6 * math.cos(phi) ** 2)


def test_preset_eq23():
    d = preset("eq23")
    assert d.s == 0.4
    assert d.omega_zd == 1.5
    phi = 1.1
    wx, wy = d.rates(phi)
    assert wx == pytest.approx(0.4 * (math.cos(phi) * math.sin(phi) - math.sin(phi) ** 3))
    assert wy == pytest.approx(0.4 * math.cos(phi) ** 2 * math.sin(-phi))


def test_preset_metadata_table():
    meta = {n: preset(n) for n in preset_names()}
    assert meta["fig1a"].s == 0.3 and meta["fig1a"].omega_zd == 0.8
    assert meta["fig1b"].s == 1.0 and meta["fig1b"].omega_zd == 2.0
    assert meta["fig1d"].s == 0.9 and meta["fig1d"].omega_zd == 1.8


def test_unknown_preset():
    with pytest.raises(UnknownPreset):
        preset("circle")


def test_all_presets_finite_on_dense_grid():
    for name in preset_names():
        d = preset(name)
        for k in range(4096):
            wx, wy = d.rates(2 * math.pi * k / 4096)
            assert math.isfinite(wx) and math.isfinite(wy)


def test_check_finite_raises_on_singular_spec():
    d = DeformationSpec(parse("1/sin(phi)"), parse("0"), 1.0)
    with pytest.raises(EvaluationError):
        d.check_finite()
