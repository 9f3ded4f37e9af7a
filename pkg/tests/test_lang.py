import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hankellab.lang import (
    BinOp,
    Call,
    LoweringError,
    Num,
    Pow,
    SymbolSyntaxError,
    TrigPoly,
    Unary,
    Var,
    lower,
    parse,
    sample,
    to_text,
)
from hankellab.symbols import SymbolError


@pytest.mark.parametrize("text", [
    "zbar",
    "arc(0, 1.5708) * (1 + z)",
    "blaschke(0.5)^2 - conj(z)",
    "trigpoly(-2: 1, 0: 0.5i, 3: 2)",
    "-z^2",
    "2i*z",
    "decay(2) + tilde(z^3)",
    "arc(pi - 0.5, pi + 0.5)",
])
def test_print_parse_fixpoint(text):
    tree = parse(text)
    assert parse(to_text(tree)) == tree


def test_precedence():
    assert parse("-z^2") == Unary("neg", Pow(Var("z"), 2))
    assert parse("1 + z * zbar") == BinOp("add", Num(1), BinOp("mul", Var("z"), Var("zbar")))
    assert parse("z - z - z") == BinOp("sub", BinOp("sub", Var("z"), Var("z")), Var("z"))
    assert parse("z ** 3") == parse("z^3")


@pytest.mark.parametrize("text,col", [
    ("z +", 4), ("foo(1)", 1), ("arc(1)", 1), ("1e999", 1), ("z^-1", 3), ("((((", 5), ("z $ 1", 3),
])
def test_syntax_errors_report_position(text, col):
    with pytest.raises(SymbolSyntaxError) as info:
        parse(text)
    assert info.value.col == col


def test_error_line_numbers():
    with pytest.raises(SymbolSyntaxError) as info:
        parse("z +\n  * 2")
    assert info.value.line == 2


@pytest.mark.parametrize("text", ["blaschke(2)", "arc(z, 1)", "arc(1i, 2)", "decay(0.5)", "arc(0, 0)"])
def test_lowering_errors(text):
    with pytest.raises((LoweringError, SymbolError)):
        lower(text)


def test_nul_byte_is_a_syntax_error():
    with pytest.raises(SymbolSyntaxError):
        parse("\x00")


def test_deep_nesting_is_rejected_cleanly():
    with pytest.raises(SymbolSyntaxError):
        parse("(" * 5000 + "z" + ")" * 5000)


def test_lowering_oracles():
    assert lower("z + zbar").coeffs == {-1: 1, 1: 1}
    assert lower("z * zbar").coeffs == {0: 1}
    assert lower("conj(2i * z)").coeffs == {-1: -2j}
    assert lower("tilde(z^2)").coeffs == {-2: 1}
    assert lower("star(1i*z)").coeffs == {1: -1j}
    b = lower("blaschke(0.5)")
    np.testing.assert_allclose(b.coef(np.arange(3)), [0.5, -0.75, -0.375])
    a = lower("arc(1, 0)")  # endpoints are ordered
    assert a.coef(0) == pytest.approx(1 / (2 * np.pi))


def test_sample_on_grid():
    theta, vals = sample("z + zbar")
    np.testing.assert_allclose(vals, 2 * np.cos(theta), atol=1e-12)


# -- generated trees -------------------------------------------------------------

small = st.floats(0, 4, allow_nan=False).map(lambda x: round(x, 3))
leaves = st.one_of(
    small.map(lambda x: Num(complex(x))),
    small.map(lambda x: Num(complex(0, x))),
    st.sampled_from([Var("z"), Var("zbar")]),
)


def _extend(children):
    return st.one_of(
        st.builds(Unary, st.sampled_from(["neg", "conj", "tilde", "star"]), children),
        st.builds(BinOp, st.sampled_from(["add", "sub", "mul"]), children, children),
        st.builds(Pow, children, st.integers(0, 3)),
    )


trees = st.recursive(leaves, _extend, max_leaves=8)


@given(trees)
def test_generated_trees_round_trip(tree):
    assert parse(to_text(tree)) == tree


def _evaluate(node, w):
    """Pointwise value on the circle, independent of the symbol algebra."""
    if isinstance(node, Num):
        return np.full(w.shape, node.value)
    if isinstance(node, Var):
        return w if node.name == "z" else np.conj(w)
    if isinstance(node, Unary):
        if node.op == "neg":
            return -_evaluate(node.operand, w)
        if node.op == "conj":
            return np.conj(_evaluate(node.operand, w))
        if node.op == "tilde":
            return _evaluate(node.operand, np.conj(w))
        return np.conj(_evaluate(node.operand, np.conj(w)))
    if isinstance(node, BinOp):
        a, b = _evaluate(node.left, w), _evaluate(node.right, w)
        return {"add": a + b, "sub": a - b, "mul": a * b}[node.op]
    if isinstance(node, Pow):
        return _evaluate(node.base, w) ** node.exponent
    raise TypeError(node)


@given(trees)
def test_lowering_matches_pointwise_semantics(tree):
    t = np.linspace(0, 2 * np.pi, 13)
    w = np.exp(1j * t)
    f = lower(tree)
    expected = _evaluate(tree, w)
    np.testing.assert_allclose(f.evaluate(t), expected, atol=1e-9 * (1 + np.max(np.abs(expected))))
    assert np.max(np.abs(expected)) <= f.sup_norm_bound * (1 + 1e-9) + 1e-9


alphabet = st.sampled_from(list("z bar()+-*^,:.0123456789ijeEpiconjtldsarcblaschkedecaytrigpoly\n\t$") + ["zbar", "arc(", "pi"])


@given(st.lists(alphabet, max_size=25).map("".join))
def test_fuzzed_text_only_raises_syntax_errors(text):
    try:
        tree = parse(text)
    except SymbolSyntaxError as exc:
        assert exc.line >= 1 and exc.col >= 1
        return
    assert parse(to_text(tree)) == tree


def test_trigpoly_node():
    assert parse("trigpoly(1: 2)") == TrigPoly(((1, Num(2)),))
    assert parse("arc(0, 1)") == Call("arc", (Num(0), Num(1)))
