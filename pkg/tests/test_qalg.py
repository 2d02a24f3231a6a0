from fractions import Fraction

import pytest

from satoseries.exceptions import CatalogError, DomainError, InsufficientPrecision, InvalidTruncation, LatticeError
from satoseries.qalg import (
    G02,
    G03,
    G04,
    PSL2Z,
    G02plus,
    G03plus,
    QSeries,
    eisenstein_expansion,
    eta_expansion,
    get_group,
    hauptmodul_expansion,
    j_expansion,
    q_derivative,
    series_pow,
    sturm_bound,
    sturm_verify,
    theta_expansion,
    to_ticks,
    u_expansion,
    z_expansion,
)
from satoseries.specfun import eval_eisenstein


def test_to_ticks_rejects_off_lattice_exponents():
    assert to_ticks(Fraction(1, 24)) == 1
    assert to_ticks(2) == 48
    with pytest.raises(LatticeError):
        to_ticks(Fraction(1, 48))


def test_get_group_accepts_name_or_hauptmodul():
    assert get_group("G02") is G02
    assert get_group("t26").name == "G03plus"
    with pytest.raises(CatalogError):
        get_group("t5")


def test_eta_follows_pentagonal_numbers():
    eta = eta_expansion(1, 8)
    offset = Fraction(1, 24)
    expected = {0: 1, 1: -1, 2: -1, 3: 0, 4: 0, 5: 1, 6: 0, 7: 1}
    for n, c in expected.items():
        assert eta.coefficient(n + offset) == c


def test_eisenstein_and_j_leading_coefficients():
    assert [eisenstein_expansion(4, 4).coefficient(n) for n in range(4)] == [1, 240, 2160, 6720]
    assert [eisenstein_expansion(2, 3).coefficient(n) for n in range(3)] == [1, -24, -72]
    j = j_expansion(3)
    assert j.coefficient(-1) == 1
    assert j.coefficient(0) == 744
    assert j.coefficient(1) == 196884
    assert j.coefficient(2) == 21493760


@pytest.mark.parametrize(
    "group, first, second",
    [
        (G02, -64, -1536),
        (G03, -27, -324),
        (G04, 16, -128),
        (PSL2Z, 1728, -1285632),
    ],
)
def test_hauptmoduln_start_at_q(group, first, second):
    x = hauptmodul_expansion(group, 5)
    assert x.valuation == 1
    assert x.coefficient(1) == first
    assert x.coefficient(2) == second


@pytest.mark.parametrize(
    "group, lead",
    [(G02, -64), (G03, -27), (G04, 16), (PSL2Z, 1728), (G02plus, 256), (G03plus, 108)],
)
def test_normalized_hauptmoduln_have_integer_coefficients(group, lead):
    x = hauptmodul_expansion(group, 12)
    assert x.valuation == 1
    assert x.leading_coefficient() == lead
    assert (x * Fraction(1, lead)).has_integer_coefficients()


def test_theta_expansions_at_doubled_argument():
    t3 = theta_expansion(3, 2, 10)
    t4 = theta_expansion(4, 2, 10)
    assert [t3.coefficient(n) for n in range(10)] == [1, 2, 0, 0, 2, 0, 0, 0, 0, 2]
    assert [t4.coefficient(n) for n in range(5)] == [1, -2, 0, 0, 2]
    assert [z_expansion(G04, 5).coefficient(n) for n in range(5)] == [1, 8, 24, 32, 24]


@pytest.mark.parametrize(
    "series, expected",
    [
        (eta_expansion(1, 5), [(Fraction(1, 24), 1), (Fraction(25, 24), -1), (Fraction(49, 24), -1)]),
        (eta_expansion(2, 2), [(Fraction(1, 12), 1)]),
        (eta_expansion(4, 6), [(Fraction(1, 6), 1), (Fraction(25, 6), -1)]),
        (theta_expansion(3, 2, 5), [(0, 1), (1, 2), (4, 2)]),
        (theta_expansion(2, 2, 2), [(Fraction(1, 4), 2)]),
        (theta_expansion(4, 1, 3), [(0, 1), (Fraction(1, 2), -2), (2, 2)]),
    ],
)
def test_worked_eta_and_theta_expansions(series, expected):
    assert list(series.terms()) == expected


def test_inverse_and_rational_power():
    one_minus_q = QSeries.from_terms({0: 1, 24: -1}, 24 * 5)
    inverse = 1 / one_minus_q
    assert [inverse.coefficient(n) for n in range(5)] == [1, 1, 1, 1, 1]

    root = QSeries.from_terms({0: 1, 24: 4}, 24 * 4) ** Fraction(1, 2)
    assert [root.coefficient(n) for n in range(4)] == [1, 2, -2, 4]


@pytest.mark.parametrize(
    "series, k",
    [
        (QSeries.from_terms({0: 1, 24: 2}, 24 * 6), 2),
        (eisenstein_expansion(4, 10), 3),
        (theta_expansion(3, 1, 6), 4),
        (hauptmodul_expansion(G02, 8) * Fraction(-1, 64), 3),
    ],
)
def test_root_then_integer_power_recovers_series(series, k):
    back = series_pow(series_pow(series, Fraction(1, k)), k)
    assert back.trunc_order == series.trunc_order
    assert (back - series).is_zero()


def test_power_of_zero_series_keeps_truncation():
    zero = QSeries.from_terms({}, 24 * 3)
    root = zero ** Fraction(1, 2)
    assert root.is_zero()
    assert root.trunc_order == 3
    with pytest.raises(DomainError):
        zero ** -1


def test_rational_power_needs_unit_leading_coefficient():
    with pytest.raises(DomainError):
        QSeries.from_terms({0: 2, 24: 1}, 24 * 3) ** Fraction(1, 2)


def test_truncate_never_extends():
    x = hauptmodul_expansion(G02, 10)
    assert x.truncate(5).trunc_order == 5
    with pytest.raises(InvalidTruncation):
        x.truncate(11)


def test_rescale_matches_scaled_eta():
    assert (eta_expansion(1, 5).rescale(2) - eta_expansion(2, 10)).is_zero()
    with pytest.raises(DomainError):
        eta_expansion(1, 5).rescale(0)


def test_q_derivative_scales_by_exponent():
    assert q_derivative(QSeries.monomial(2, 5, 3)).coefficient(2) == 6
    assert q_derivative(j_expansion(3)).coefficient(-1) == -1


def test_u_is_constant_for_gamma0_2():
    u = u_expansion(G02, 10)
    assert u.coefficient(0) == 1
    assert all(u.coefficient(n) == 0 for n in range(1, 10))


def test_sturm_bounds():
    assert sturm_bound(2, G04) == 1
    assert sturm_bound(4, PSL2Z) == Fraction(1, 3)
    assert sturm_bound(4, G02plus) == Fraction(1, 2)


def test_sturm_verify_proves_jacobi():
    t2, t3, t4 = (theta_expansion(k, 2, 20) ** 4 for k in (2, 3, 4))
    assert sturm_verify(t2 + t4 - t3, 2, G04) is True
    assert sturm_verify(t2 + t4, 2, G04) is False


def test_sturm_verify_rejects_short_expansions():
    t2, t3, t4 = (theta_expansion(k, 2, 5) ** 4 for k in (2, 3, 4))
    with pytest.raises(InsufficientPrecision):
        sturm_verify(t2 + t4 - t3, 2, G04)


def test_evaluate_matches_direct_eisenstein(ctx):
    mp = ctx.mp
    tau = mp.mpc(0, 1)
    series = z_expansion(PSL2Z, 40).evaluate(tau, mp)
    assert abs(series - eval_eisenstein(4, tau, ctx)) < mp.mpf(10) ** -25
