import pytest

from satoseries.exceptions import CatalogError
from satoseries.identities import (
    COEFFICIENTS,
    NUMERIC,
    STURM,
    SuiteContext,
    get_identity,
    identity_names,
    run_identities,
    run_identity,
)


def test_registry_kinds():
    names = identity_names()
    assert names[0] == "jacobi"
    assert len(names) == len(set(names))
    assert get_identity("jacobi").kind == STURM
    assert get_identity("pentagonal").kind == COEFFICIENTS
    assert get_identity("clausen").kind == NUMERIC


def test_unknown_identity():
    with pytest.raises(CatalogError):
        get_identity("nope")
    with pytest.raises(CatalogError):
        run_identities(["jacobi", "nope"], 60, None)


def test_jacobi_is_proved(ctx):
    result = run_identity("jacobi", 60, ctx)
    assert result.passed
    assert not result.flagged
    assert result.error == ""


def test_short_truncation_is_flagged(ctx):
    result = run_identity("jacobi", 5, ctx)
    assert not result.passed
    assert result.flagged
    assert "Sturm bound" in result.error


def test_random_points_are_reproducible(ctx):
    first = SuiteContext(60, ctx, seed=7).points(3)
    again = SuiteContext(60, ctx, seed=7).points(3)
    assert first == again
    assert all(abs(ctx.mp.re(tau)) <= 0.5 and 0.6 <= ctx.mp.im(tau) <= 1.6 for tau in first)


def test_selection_in_given_order(ctx):
    results = run_identities(["pentagonal", "lambda_transform", "lemma_transform"], 60, ctx)
    assert [r.name for r in results] == ["pentagonal", "lambda_transform", "lemma_transform"]
    assert all(r.passed for r in results), [r.detail or r.error for r in results]


@pytest.mark.slow
def test_whole_suite(ctx):
    results = run_identities(None, 100, ctx)
    assert [r.name for r in results] == identity_names()
    assert all(r.passed for r in results), [(r.name, r.detail or r.error) for r in results]
