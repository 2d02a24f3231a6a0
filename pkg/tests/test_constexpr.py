import pytest

from satoseries.constexpr import (
    BinOp,
    Neg,
    Num,
    Sqrt,
    exact_value,
    eval_expr,
    evaluate_text,
    load_table,
    parse,
    parse_point,
    parse_table,
    to_text,
    verify_table,
)
from satoseries.exceptions import CatalogError, DomainError, ExpressionSyntaxError, InsufficientPrecision
from satoseries.specfun import PrecisionContext


def test_parse_builds_expected_tree():
    tree = parse("-17-12*sqrt(2)")
    assert tree == BinOp("-", Neg(Num(17)), BinOp("*", Num(12), Sqrt(Num(2))))
    assert to_text(tree) == "-17-12*sqrt(2)"


@pytest.mark.parametrize(
    "text",
    [
        "gamma(1/8)^(-2)",
        "(1/2)*(5-sqrt(5))",
        "2^(9/2)*gamma(1/8)^(-2)*gamma(3/8)^(-2)",
        "(sqrt(5)-2)^(1/2)",
        "3^(1/8)*expi(-1/24)/(2*pi)",
    ],
)
def test_printer_reparses_to_same_tree(text):
    tree = parse(text)
    assert parse(to_text(tree)) == tree


def test_syntax_errors_carry_position():
    with pytest.raises(ExpressionSyntaxError) as exc:
        parse("x+1")
    assert exc.value.position == 0
    with pytest.raises(ExpressionSyntaxError) as exc:
        parse("gamma(1/0)")
    assert exc.value.position == 7
    with pytest.raises(ExpressionSyntaxError):
        parse("1+")


@pytest.mark.parametrize("text, position", [("1/0", 1), ("sqrt(2)/(0)", 7), ("3*pi/-0", 4)])
def test_literal_zero_denominator_is_a_syntax_error(text, position):
    with pytest.raises(ExpressionSyntaxError, match="zero denominator") as exc:
        parse(text)
    assert exc.value.position == position


def test_i_only_in_points():
    with pytest.raises(ExpressionSyntaxError):
        parse("i*sqrt(2)")
    assert to_text(parse_point("i*sqrt(2)")) == "i*sqrt(2)"


def test_exact_folding():
    assert exact_value(parse("(1/2)*(3-1)^2")) == 2
    assert exact_value(parse("sqrt(2)")) is None


def test_evaluation(ctx):
    mp = ctx.mp
    assert abs(evaluate_text("-17-12*sqrt(2)", ctx) - (-17 - 12 * mp.sqrt(2))) < mp.mpf(10) ** -25
    assert abs(evaluate_text("(1/2)*(5-sqrt(5))", ctx) - (5 - mp.sqrt(5)) / 2) < mp.mpf(10) ** -25
    assert evaluate_text("0*pi", ctx) == 0
    assert abs(evaluate_text("(-8)^(1/3)", ctx) + 2) < mp.mpf(10) ** -25


def test_gamma_reflection_through_expressions(ctx):
    mp = ctx.mp
    value = evaluate_text("gamma(1/8)*gamma(7/8)", ctx)
    assert abs(value - mp.pi / mp.sin(mp.pi / 8)) < mp.mpf(10) ** -25


def test_evaluation_domain_errors(ctx):
    with pytest.raises(DomainError):
        evaluate_text("1/(2-2)", ctx)
    with pytest.raises(DomainError):
        evaluate_text("(-4)^(1/2)", ctx)
    with pytest.raises(DomainError):
        evaluate_text("gamma(-1)", ctx)


def test_verify_table_passes_flags_and_fails():
    table = parse_table(
        "jvals",
        [
            "# j-values",
            "i | j | 1728 | classical",
            "i*sqrt(2) | j | 8000 | classical",
            "i*sqrt(3) | j | 54001 | suspect: printed value",
            "i/sqrt(3) | j | 54001 | printed value",
        ],
    )
    report = verify_table(table, PrecisionContext(40))
    assert [row.passed for row in report.rows] == [True, True, False, False]
    assert [row.flagged for row in report.rows] == [False, False, True, False]
    assert (report.passed, report.failed, report.flagged) == (2, 1, 1)
    assert not report.ok


def test_verify_table_needs_forty_digits(ctx):
    table = parse_table("jvals", ["i | j | 1728 | classical"])
    with pytest.raises(InsufficientPrecision):
        verify_table(table, ctx)


def test_table_parse_errors(tmp_path):
    with pytest.raises(CatalogError):
        parse_table("jvals", ["i | j | 1728"])
    with pytest.raises(CatalogError):
        parse_table("jvals", ["i | j | 17++ | classical"])
    with pytest.raises(CatalogError):
        load_table("nope", tmp_path)
    (tmp_path / "tables").mkdir()
    (tmp_path / "tables" / "jvals.txt").write_text("-i | j | 1728 | lower half plane\n")
    with pytest.raises(CatalogError):
        load_table("jvals", tmp_path)
