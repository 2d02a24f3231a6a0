from fractions import Fraction

import pytest

from satoseries.exceptions import CatalogError, DomainError, InsufficientPrecision, OutOfDisc
from satoseries.qalg import G02, G03, G04, PSL2Z
from satoseries.rsseries import (
    CoefficientRecipe,
    Family,
    catalog_theorem_cases,
    certify,
    coeff,
    derive_constants,
    lemma_transform_check,
    linear_sum,
    parse_catalog,
    recipe_matches_reversion,
    select_series,
    sum_series,
    theorem_identity_check,
)
from satoseries.specfun import PrecisionContext, digits_matched

from tests.factories import CoefficientRecipeFactory


@pytest.mark.parametrize(
    "family,m,j,expected",
    [
        ("POCH3", None, 0, Fraction(1)),
        ("POCH3", None, 1, Fraction(1, 8)),
        ("POCH3", None, 2, Fraction(27, 512)),
        ("T3SUM", None, 1, Fraction(2, 9)),
        ("TINF", None, 1, Fraction(1, 2)),
        ("TINF", None, 2, Fraction(11, 32)),
        ("GENM", 3, 1, Fraction(5, 36)),
        ("GENM", 4, 1, Fraction(3, 16)),
        ("GENM", 6, 1, Fraction(2, 9)),
    ],
)
def test_coefficients(family, m, j, expected):
    assert coeff(CoefficientRecipeFactory(family=family, m=m), j) == expected


def test_recipe_validation():
    with pytest.raises(CatalogError):
        CoefficientRecipe(Family.GENM, 5)
    with pytest.raises(CatalogError):
        CoefficientRecipe(Family.POCH3, 3)
    assert str(CoefficientRecipe("GENM", 4)) == "GENM(m=4)"
    with pytest.raises(DomainError):
        coeff(CoefficientRecipeFactory(), -1)


@pytest.mark.parametrize("group", [G02, G03, G04, PSL2Z])
def test_recipe_is_the_reversion(group):
    assert recipe_matches_reversion(group, 15)


def test_partial_sum_converges_to_target(ctx, catalog):
    spec = catalog["t2_n3"]
    total = sum_series(spec, ctx, terms=40)
    assert total.terms_used == 40
    assert digits_matched(total.value, 4 / ctx.mp.pi, ctx.mp) >= 20


def test_linear_sum_outside_disc(ctx):
    with pytest.raises(OutOfDisc):
        linear_sum(1, 6, 1, CoefficientRecipeFactory(), ctx)


def test_catalog_contents(catalog):
    assert len(catalog) == 11
    spec = catalog["t2_n3"]
    assert spec.group is G02
    assert spec.N == 3
    assert spec.e1 == Fraction(1, 2)
    assert parse_catalog(spec.to_text())["t2_n3"] == spec


def test_select_series_keeps_catalog_order():
    ids = [spec.id for spec in select_series(["t2_n3", "t2_n3_w2"])]
    assert ids == ["t2_n3_w2", "t2_n3"]
    assert len(select_series("all")) == 11
    with pytest.raises(CatalogError):
        select_series(["t2_n3", "nope"])


@pytest.mark.parametrize(
    "alias, name",
    [("sect4ex1", "t2_n3_w2"), ("sect4ex2", "t2_n5_w2"), ("sect4ex3", "t2_n3"), ("sect4ex4", "t2_n5"), ("sect4ex5", "t3_n2")],
)
def test_select_series_by_alias(alias, name):
    assert [spec.id for spec in select_series([alias])] == [name]


def test_alias_and_name_select_once():
    assert [spec.id for spec in select_series(["sect4ex3", "t2_n3"])] == ["t2_n3"]


def test_duplicate_alias_is_rejected(catalog):
    text = catalog["t2_n3"].to_text() + "\n" + catalog["t2_n5"].to_text().replace("sect4ex4", "sect4ex3")
    with pytest.raises(CatalogError, match="sect4ex3"):
        parse_catalog(text)


def test_alias_cannot_shadow_a_name(catalog):
    text = catalog["t2_n3"].to_text() + "\n" + catalog["t2_n5"].to_text().replace("sect4ex4", "t2_n3")
    with pytest.raises(CatalogError):
        parse_catalog(text)


@pytest.mark.parametrize(
    "text",
    [
        "[broken]\ngroup = G02\n",
        "[broken]\ngroup = G09\nN = 3\n",
        (
            "[broken]\ngroup = G02\nN = 3\ntau0 = 1/2+i/(2*sqrt(3))\ngamma = 1, -1, 2, -1\n"
            "recipe = T3SUM\nx0 = 1/4\nprefactor = 1\na = 1\nb = 6\ntarget = 4/pi\ne0 = 0\ne1 = 1/2\n"
        ),
        (
            "[broken]\ngroup = G02\nN = 3\ntau0 = 1/2+i/(2*sqrt(3))\ngamma = 1, -1, 2, -1\n"
            "recipe = POCH3\nx0 = 5/4\nprefactor = 1\na = 1\nb = 6\ntarget = 4/pi\ne0 = 0\ne1 = 1/2\n"
        ),
        (
            "[broken]\ngroup = G02\nN = 3\ntau0 = i\ngamma = 1, -1, 2, -1\n"
            "recipe = POCH3\nx0 = 1/4\nprefactor = 1\na = 1\nb = 6\ntarget = 4/pi\ne0 = 0\ne1 = 1/2\n"
        ),
    ],
)
def test_bad_catalog_text(text):
    with pytest.raises(CatalogError):
        parse_catalog(text)


def test_certify_passes(catalog):
    report = certify(catalog["t2_n3"], 30, PrecisionContext(50))
    assert report.passed
    assert report.digits_matched >= 30
    assert not report.derivation_flagged
    assert report.to_dict()["passed"] is True


def test_certify_needs_headroom(catalog):
    with pytest.raises(InsufficientPrecision):
        certify(catalog["t2_n3"], 30, PrecisionContext(40))


def test_certify_reports_wrong_target(catalog):
    spec = parse_catalog(catalog["t2_n3"].to_text().replace("target = 4/pi", "target = 3/pi"))["t2_n3"]
    report = certify(spec, 30, PrecisionContext(50))
    assert not report.passed
    assert report.derivation_flagged


def test_derived_constants(ctx, catalog):
    derived = derive_constants(catalog["t2_n3"], ctx)
    mp = ctx.mp
    assert abs(derived.x0 - mp.mpf(1) / 4) < mp.mpf(10) ** -20
    assert abs(derived.a / derived.b - mp.mpf(1) / 6) < mp.mpf(10) ** -20


def test_theorem_identity(ctx):
    assert theorem_identity_check(G02, 3, ((1, -1), (2, -1)), ctx) < ctx.mp.mpf(10) ** -20
    with pytest.raises(DomainError):
        theorem_identity_check(G02, 3, ((1, -1), (2, 1)), ctx)


def test_catalog_theorem_cases_are_distinct(catalog):
    cases = catalog_theorem_cases(catalog)
    assert 0 < len(cases) <= len(catalog)
    assert len({(g.name, n, tuple(map(str, gamma))) for g, n, gamma in cases}) == len(cases)


def test_lemma_transform(ctx):
    assert lemma_transform_check(PSL2Z, 2, 1, ctx) < ctx.mp.mpf(10) ** -20
    with pytest.raises(DomainError):
        lemma_transform_check(PSL2Z, 2, 2, ctx)


@pytest.mark.slow
def test_whole_catalog_certifies(catalog):
    for spec in catalog.values():
        report = certify(spec, 30, PrecisionContext(50))
        assert report.passed, (spec.id, report.residual, report.error)
        assert not report.derivation_flagged, (spec.id, report.detail, report.error)
