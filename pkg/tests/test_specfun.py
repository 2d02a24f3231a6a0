from fractions import Fraction

import pytest

from satoseries import specfun
from satoseries.exceptions import DomainError, OutOfDisc, PrecisionError
from satoseries.qalg import G02, G03, G04, PSL2Z, G02plus, G03plus
from satoseries.specfun import (
    PrecisionContext,
    act,
    digits_matched,
    double_evaluate,
    eval_2f1,
    eval_3f2,
    eval_delta,
    eval_dx_dtau,
    eval_e2n,
    eval_eisenstein,
    eval_eta,
    eval_gamma,
    eval_hauptmodul,
    eval_j,
    eval_lambda,
    eval_theta,
    eval_u,
    eval_z,
    group_elements,
    positive_power,
    rechecked,
    to_mp,
)


def test_precision_context_validates_and_raises():
    with pytest.raises(DomainError):
        PrecisionContext(5)
    with pytest.raises(DomainError):
        PrecisionContext(30, guard=4)
    ctx = PrecisionContext(30)
    assert ctx.working_digits == 50
    assert ctx.raised().digits == 46
    assert ctx.mp.dps == 50


def test_contexts_do_not_share_precision():
    low, high = PrecisionContext(15), PrecisionContext(60)
    assert low.mp.dps == 35
    assert high.mp.dps == 80


def test_j_at_classical_points(ctx):
    mp = ctx.mp
    assert abs(eval_j(mp.mpc(0, 1), ctx) - 1728) < mp.mpf(10) ** -20
    assert abs(eval_j(mp.mpc(0, mp.sqrt(2)), ctx) - 8000) < mp.mpf(10) ** -20
    assert abs(eval_j(mp.mpc(0, 1) / mp.sqrt(3), ctx) - 54000) < mp.mpf(10) ** -20


def test_eta_at_i_is_chowla_selberg(ctx):
    mp = ctx.mp
    expected = mp.gamma(mp.mpf(1) / 4) / (2 * mp.pi ** (mp.mpf(3) / 4))
    assert digits_matched(eval_eta(mp.mpc(0, 1), ctx), expected, mp) >= 28


def test_eta_reduces_low_points(ctx):
    mp = ctx.mp
    tau = mp.mpc(0, 1) / 5
    # eta(-1/tau) = sqrt(-i tau) eta(tau)
    assert digits_matched(eval_eta(-1 / tau, ctx), mp.sqrt(-mp.j * tau) * eval_eta(tau, ctx), mp) >= 28


def test_lambda_at_i_is_one_half(ctx):
    mp = ctx.mp
    assert abs(eval_lambda(mp.mpc(0, 1), ctx) - mp.mpf(1) / 2) < mp.mpf(10) ** -25


def test_t2_at_fixed_point_of_w2(ctx):
    mp = ctx.mp
    value = eval_hauptmodul(G02, mp.mpc(0, 1) / mp.sqrt(2), ctx)
    assert abs(value + 1) < mp.mpf(10) ** -25


def test_hypergeometric_route_matches_modular_form(ctx):
    mp = ctx.mp
    tau = mp.mpc(0, mp.mpf(3) / 2)
    for group in (G02, G04, PSL2Z):
        modular = eval_z(group, tau, ctx)
        assert digits_matched(eval_z(group, tau, ctx, route="hypergeometric"), modular, mp) >= 25


def test_domain_errors(ctx):
    mp = ctx.mp
    with pytest.raises(DomainError):
        eval_theta(3, mp.mpc(0, -1), ctx)
    with pytest.raises(DomainError):
        eval_theta(5, mp.mpc(0, 1), ctx)
    with pytest.raises(OutOfDisc):
        eval_2f1(Fraction(1, 2), Fraction(1, 2), 1, 1, ctx)
    with pytest.raises(DomainError):
        eval_gamma(-2, ctx)
    with pytest.raises(DomainError):
        positive_power(mp.mpf(-1), Fraction(1, 2), mp)
    with pytest.raises(DomainError):
        eval_z(G02, mp.mpc(0, 1), ctx, route="series")


def test_gamma_reflection(ctx):
    mp = ctx.mp
    product = eval_gamma(Fraction(1, 8), ctx) * eval_gamma(Fraction(7, 8), ctx)
    assert digits_matched(product, mp.pi / mp.sin(mp.pi / 8), mp) >= 28


def test_double_evaluate_returns_agreeing_value(ctx):
    mp = ctx.mp
    value = double_evaluate(eval_j, mp.mpc(0, 1), ctx=ctx)
    assert abs(value - 1728) < mp.mpf(10) ** -20


def test_group_elements_fix_the_hauptmodul(ctx):
    mp = ctx.mp
    tau = mp.mpc(mp.mpf(1) / 7, mp.mpf(9) / 10)
    names = [name for name, _ in group_elements(PSL2Z, mp)]
    assert names == ["T", "S"]
    for group in (G02, G04):
        x = eval_hauptmodul(group, tau, ctx)
        for name, matrix in group_elements(group, mp):
            moved = eval_hauptmodul(group, act(matrix, tau, mp), ctx)
            assert digits_matched(moved, x, mp) >= 25, name


def test_precision_loss_is_caught(ctx):
    @rechecked
    def drifting(x, ctx):
        mp = ctx.mp
        return mp.mpf(x) + mp.mpf(10) ** (5 - ctx.digits)

    with pytest.raises(PrecisionError):
        drifting(3, ctx)


def test_nested_evaluators_recheck_once(ctx):
    calls = []

    @rechecked
    def inner(x, ctx):
        calls.append(ctx.digits)
        return ctx.mp.mpf(x)

    @rechecked
    def outer(x, ctx):
        return 2 * inner(x, ctx)

    assert outer(3, ctx) == 6
    assert calls == [30, 46]


def test_eta_drift_surfaces_in_dependents(ctx, monkeypatch):
    direct = specfun._eta_direct
    monkeypatch.setattr(specfun, "_eta_direct", lambda tau, mp: direct(tau, mp) + mp.mpf(10) ** (25 - mp.dps))
    mp = ctx.mp
    with pytest.raises(PrecisionError):
        eval_eta(mp.mpc(0, 1), ctx)
    with pytest.raises(PrecisionError):
        eval_hauptmodul(G02, mp.mpc(0, 1), ctx)


@pytest.mark.parametrize(
    "evaluate",
    [
        pytest.param(lambda tau, ctx: eval_eta(tau, ctx), id="eta"),
        pytest.param(lambda tau, ctx: eval_theta(4, tau, ctx), id="theta4"),
        pytest.param(lambda tau, ctx: eval_lambda(tau, ctx), id="lambda"),
        pytest.param(lambda tau, ctx: eval_eisenstein(2, tau, ctx), id="E2"),
        pytest.param(lambda tau, ctx: eval_eisenstein(6, tau, ctx), id="E6"),
        pytest.param(lambda tau, ctx: eval_e2n(3, tau, ctx), id="E2_3"),
        pytest.param(lambda tau, ctx: eval_delta(tau, ctx), id="delta"),
        pytest.param(lambda tau, ctx: eval_2f1(Fraction(1, 4), Fraction(3, 4), 1, tau / 4, ctx), id="2F1"),
        pytest.param(
            lambda tau, ctx: eval_3f2(Fraction(1, 2), Fraction(1, 2), Fraction(1, 2), 1, 1, tau / 4, ctx), id="3F2"
        ),
        pytest.param(lambda tau, ctx: eval_hauptmodul(G03plus, tau, ctx), id="t26"),
        pytest.param(lambda tau, ctx: eval_z(G03, tau, ctx), id="Z"),
        pytest.param(lambda tau, ctx: eval_u(G02plus, tau, ctx), id="U"),
        pytest.param(lambda tau, ctx: eval_dx_dtau(G04, tau, ctx), id="dX"),
    ],
)
def test_evaluators_hold_their_digits(evaluate, ctx):
    wide = PrecisionContext(60)
    low = evaluate(ctx.mp.mpc(ctx.mp.mpf(1) / 5, ctx.mp.mpf(4) / 5), ctx)
    high = evaluate(wide.mp.mpc(wide.mp.mpf(1) / 5, wide.mp.mpf(4) / 5), wide)
    assert digits_matched(to_mp(low, wide.mp), high, wide.mp) >= 28


@pytest.mark.parametrize(
    "evaluator",
    [eval_gamma, eval_eta, eval_theta, eval_lambda, eval_eisenstein, eval_e2n, eval_delta, eval_j,
     eval_2f1, eval_3f2, eval_hauptmodul, eval_z, eval_u, eval_dx_dtau],
)
def test_every_evaluator_is_rechecked(evaluator):
    assert hasattr(evaluator, "__wrapped__")
