"""Ramanujan-Sato series: coefficient families, catalog, derivation and certification."""

from __future__ import annotations

import configparser
import enum
import logging
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

from . import CATALOG_DIR
from .constexpr import Expr, eval_expr, parse, parse_point, to_text
from .exceptions import (
    CatalogError,
    DomainError,
    ExpressionSyntaxError,
    InsufficientPrecision,
    OutOfDisc,
    PrecisionError,
    SatoSeriesError,
)
from .modpoly import DerivativeBundle, dMN_dX
from .qalg import (
    G02,
    G03,
    G04,
    PSL2Z,
    GroupLabel,
    G02plus,
    G03plus,
    QSeries,
    get_group,
    hauptmodul_expansion,
    q_derivative,
    to_ticks,
    z_expansion,
)
from .specfun import (
    PrecisionContext,
    act,
    digits_matched,
    eval_hauptmodul,
    eval_u,
    eval_z,
    positive_power,
    to_mp,
)

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)
THIRD = Fraction(1, 3)


# ---------------------------------------------------------------------------
# Coefficient families
# ---------------------------------------------------------------------------
class Family(str, enum.Enum):
    POCH3 = "POCH3"
    T3SUM = "T3SUM"
    TINF = "TINF"
    GENM = "GENM"


@dataclass(frozen=True)
class CoefficientRecipe:
    family: Family
    m: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", Family(self.family))
        if self.family is Family.GENM:
            if self.m not in (3, 4, 6):
                raise CatalogError(f"GENM needs m in {{3, 4, 6}}, got {self.m}")
        elif self.m is not None:
            raise CatalogError(f"{self.family.value} takes no m")

    def __str__(self) -> str:
        return self.family.value if self.m is None else f"{self.family.value}(m={self.m})"


def _poch(a: Fraction, n: int) -> Fraction:
    result = Fraction(1)
    for i in range(n):
        result *= a + i
    return result


def _squared_sum(j: int, top: Fraction, shift: Fraction) -> Fraction:
    """sum_k [(-j)_k (top)_k / (k! (shift - j)_k)]^2, built term by term."""

    total, term = Fraction(1), Fraction(1)
    for k in range(j):
        term *= (k - j) * (top + k) / ((k + 1) * (shift - j + k))
        total += term * term
    return total


def _genm_sum(j: int, m: int) -> Fraction:
    p, r = HALF - Fraction(1, m), HALF + Fraction(1, m)
    total, term = Fraction(1), Fraction(1)
    for n in range(j):
        numerator = Fraction(n - j) ** 3 * (HALF + n) * (p + n) * (r + n)
        denominator = (HALF - j + n) * (r - j + n) * (p - j + n) * (n + 1) ** 3
        term *= numerator / denominator
        total += term
    return total


@lru_cache(maxsize=8192)
def coeff(recipe: CoefficientRecipe, j: int) -> Fraction:
    """Exact A_j of the recipe."""

    if j < 0:
        raise DomainError(f"coefficient index must be non-negative, got {j}")
    factorial = math.factorial(j)
    if recipe.family is Family.POCH3:
        return (_poch(HALF, j) / factorial) ** 3
    if recipe.family is Family.T3SUM:
        return (_poch(THIRD, j) / factorial) ** 2 * _squared_sum(j, THIRD, 2 * THIRD)
    if recipe.family is Family.TINF:
        return (_poch(HALF, j) / factorial) ** 2 * _squared_sum(j, HALF, HALF)
    m = recipe.m
    outer = _poch(HALF, j) * _poch(HALF - Fraction(1, m), j) * _poch(HALF + Fraction(1, m), j)
    return outer / factorial**3 * _genm_sum(j, m)


# Z = X^e0 (1 - X)^e1 sum A_j X^j for each group
GROUP_RECIPES: dict[GroupLabel, tuple[CoefficientRecipe, Fraction, Fraction]] = {
    G02: (CoefficientRecipe(Family.POCH3), Fraction(0), HALF),
    G03: (CoefficientRecipe(Family.T3SUM), Fraction(0), 2 * THIRD),
    G04: (CoefficientRecipe(Family.TINF), Fraction(0), Fraction(0)),
    PSL2Z: (CoefficientRecipe(Family.GENM, 3), Fraction(0), Fraction(0)),
    G02plus: (CoefficientRecipe(Family.GENM, 4), Fraction(0), Fraction(0)),
    G03plus: (CoefficientRecipe(Family.GENM, 6), Fraction(0), Fraction(0)),
}


def recipe_series(group: GroupLabel | str, order: int = 30) -> QSeries:
    """X^e0 (1 - X)^e1 sum A_j X^j re-expanded in q through O(q^order)."""

    group = get_group(group)
    recipe, e0, e1 = GROUP_RECIPES[group]
    x = hauptmodul_expansion(group, order)
    total = QSeries.constant(coeff(recipe, 0), to_ticks(order))
    power = x
    for j in range(1, order):
        total = total + power.scale(coeff(recipe, j))
        power = power * x
    if e1:
        total = total * (1 - x) ** e1
    if e0:
        total = total * x**e0
    return total.truncate(order)


def recipe_matches_reversion(group: GroupLabel | str, order: int = 30) -> bool:
    group = get_group(group)
    return (recipe_series(group, order) - z_expansion(group, order)).is_zero()


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------
_EXPR_FIELDS = ("x0", "prefactor", "a", "b", "target", "dmdx")


@dataclass(frozen=True)
class SeriesSpec:
    id: str
    group: GroupLabel
    N: int
    tau0: Expr
    gamma: tuple[Expr, Expr, Expr, Expr]
    recipe: CoefficientRecipe
    x0: Expr
    prefactor: Expr
    a: Expr
    b: Expr
    target: Expr
    e0: Fraction = Fraction(0)
    e1: Fraction = Fraction(0)
    dmdx: Expr | None = None
    note: str = ""
    aliases: tuple[str, ...] = ()

    def __str__(self) -> str:
        return self.id

    def matrix(self, ctx: PrecisionContext) -> tuple[tuple, tuple]:
        a, b, c, d = (eval_expr(e, ctx) for e in self.gamma)
        return (a, b), (c, d)

    def to_text(self) -> str:
        lines = [
            f"[{self.id}]",
            f"group = {self.group.name}",
            f"N = {self.N}",
            f"tau0 = {to_text(self.tau0)}",
            "gamma = " + ", ".join(to_text(e) for e in self.gamma),
            f"recipe = {self.recipe.family.value}",
        ]
        if self.recipe.m is not None:
            lines.append(f"m = {self.recipe.m}")
        for name in ("x0", "prefactor", "a", "b", "target"):
            lines.append(f"{name} = {to_text(getattr(self, name))}")
        lines += [f"e0 = {self.e0}", f"e1 = {self.e1}"]
        if self.dmdx is not None:
            lines.append(f"dmdx = {to_text(self.dmdx)}")
        if self.note:
            lines.append(f"note = {self.note}")
        if self.aliases:
            lines.append("aliases = " + ", ".join(self.aliases))
        return "\n".join(lines) + "\n"


def _spec_from_section(name: str, section: configparser.SectionProxy, source: str) -> SeriesSpec:
    where = f"{source}[{name}]"
    try:
        group = get_group(section["group"])
        level = int(section["N"])
        recipe = CoefficientRecipe(section["recipe"], int(section["m"]) if "m" in section else None)
        exprs = {key: parse(section[key]) for key in _EXPR_FIELDS if key in section}
        gamma = tuple(parse(entry) for entry in section["gamma"].split(","))
        tau0 = parse_point(section["tau0"])
        e0 = Fraction(section.get("e0", "0"))
        e1 = Fraction(section.get("e1", "0"))
    except KeyError as exc:
        raise CatalogError(f"{where}: missing field {exc.args[0]}") from None
    except ExpressionSyntaxError as exc:
        raise CatalogError(f"{where}: {exc}") from exc
    except ValueError as exc:
        raise CatalogError(f"{where}: {exc}") from exc
    missing = [key for key in _EXPR_FIELDS[:-1] if key not in exprs]
    if missing:
        raise CatalogError(f"{where}: missing field {missing[0]}")
    if len(gamma) != 4:
        raise CatalogError(f"{where}: gamma needs four entries")
    if level < 1:
        raise CatalogError(f"{where}: N must be positive")
    expected = GROUP_RECIPES[group]
    if (recipe, e0, e1) != expected:
        raise CatalogError(f"{where}: {recipe} with e0={e0}, e1={e1} does not describe Z on {group}")
    spec = SeriesSpec(
        name, group, level, tau0, gamma, recipe,
        exprs["x0"], exprs["prefactor"], exprs["a"], exprs["b"], exprs["target"],
        e0, e1, exprs.get("dmdx"), section.get("note", ""),
        tuple(alias.strip() for alias in section.get("aliases", "").split(",") if alias.strip()),
    )
    _check_spec(spec, where)
    return spec


def _check_spec(spec: SeriesSpec, where: str) -> None:
    probe = PrecisionContext(15)
    mp = probe.mp
    if abs(eval_expr(spec.x0, probe)) >= 1:
        raise CatalogError(f"{where}: |x0| must be below 1")
    if eval_expr(spec.b, probe) <= 0:
        raise CatalogError(f"{where}: the slope b must be positive")
    if mp.im(eval_expr(spec.tau0, probe)) <= 0:
        raise CatalogError(f"{where}: tau0 is not in the upper half plane")
    (a, _), (c, _) = spec.matrix(probe)
    expected = a / c + mp.mpc(0, 1) / (c * mp.sqrt(spec.N))
    if abs(expected - eval_expr(spec.tau0, probe)) > mp.mpf(10) ** -10:
        raise CatalogError(f"{where}: tau0 is not a/c + i/(c*sqrt(N)) for the stored gamma")


def parse_catalog(text: str, source: str = "series") -> dict[str, SeriesSpec]:
    parser = configparser.ConfigParser(interpolation=None, strict=True)
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise CatalogError(f"{source}: {exc}") from exc
    catalog = {name: _spec_from_section(name, parser[name], source) for name in parser.sections()}
    seen = set(catalog)
    for spec in catalog.values():
        for alias in spec.aliases:
            if alias in seen or alias == "all":
                raise CatalogError(f"{source}[{spec.id}]: alias {alias} is already taken")
            seen.add(alias)
    return catalog


@lru_cache(maxsize=8)
def load_catalog(catalog_dir: Path | str = CATALOG_DIR) -> dict[str, SeriesSpec]:
    path = Path(catalog_dir) / "series.txt"
    if not path.exists():
        raise CatalogError(f"series catalog {path} is missing")
    return parse_catalog(path.read_text(encoding="utf-8"), str(path))


def select_series(ids: Iterable[str] | str, catalog_dir: Path | str = CATALOG_DIR) -> list[SeriesSpec]:
    """Catalog entries for ``ids`` (or ``"all"``), always in catalog order.

    An id may be an entry name or one of its ``aliases``.
    """

    catalog = load_catalog(catalog_dir)
    wanted = [ids] if isinstance(ids, str) else list(ids)
    if "all" in wanted:
        return list(catalog.values())
    names = {name: name for name in catalog}
    names.update({alias: spec.id for spec in catalog.values() for alias in spec.aliases})
    unknown = [i for i in wanted if i not in names]
    if unknown:
        raise CatalogError(f"unknown series {', '.join(unknown)}; known: {', '.join(catalog)}")
    resolved = {names[i] for i in wanted}
    return [spec for name, spec in catalog.items() if name in resolved]


# ---------------------------------------------------------------------------
# Summation
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class SeriesSum:
    value: object
    terms_used: int
    ratio: object = None


def _term_limit(magnitude, ctx: PrecisionContext) -> int:
    mp = ctx.mp
    if magnitude == 0:
        return 1
    rate = -mp.log(magnitude)
    return int(mp.ceil(ctx.working_digits * mp.log(10) / rate)) * 2 + 100


def linear_sum(a, b, x, recipe: CoefficientRecipe, ctx: PrecisionContext, terms: int | None = None) -> SeriesSum:
    """sum_j (b*j + a) A_j x^j.

    With ``terms`` the partial sum of that many terms is returned.  Otherwise
    summation stops once a term and the tail bound |x|/(1-|x|)*|term|*(1+1/j)
    both fall below 10^-(digits+guard).
    """

    mp = ctx.mp
    a, b, x = to_mp(a, mp), to_mp(b, mp), to_mp(x, mp)
    magnitude = abs(x)
    if magnitude >= 1:
        raise OutOfDisc(f"series argument {mp.nstr(x, 10)} lies outside the unit disc")
    eps = ctx.epsilon()
    limit = terms if terms is not None else _term_limit(magnitude, ctx)
    total = mp.mpf(0)
    power = mp.mpf(1)
    previous = ratio = None
    for j in range(limit):
        a_j = coeff(recipe, j)
        term = (b * j + a) * (mp.mpf(a_j.numerator) / a_j.denominator) * power
        total += term
        if previous:
            ratio = abs(term) / previous
        previous = abs(term)
        if terms is None and j > 0 and abs(term) < eps:
            tail = magnitude / (1 - magnitude) * abs(term) * (1 + mp.mpf(1) / j)
            if tail < eps:
                logger.debug("%s converged after %s terms (ratio %s)", recipe, j + 1, mp.nstr(ratio, 8))
                return SeriesSum(total, j + 1, ratio)
        power *= x
    if terms is None:
        raise PrecisionError(f"{recipe} series at |x| = {mp.nstr(magnitude, 8)} did not converge in {limit} terms")
    return SeriesSum(total, limit, ratio)


def sum_series(spec: SeriesSpec, ctx: PrecisionContext, terms: int | None = None) -> SeriesSum:
    """prefactor * sum_j (b*j + a) A_j x0^j with the catalog's printed constants."""

    partial = linear_sum(
        eval_expr(spec.a, ctx), eval_expr(spec.b, ctx), eval_expr(spec.x0, ctx), spec.recipe, ctx, terms
    )
    return SeriesSum(eval_expr(spec.prefactor, ctx) * partial.value, partial.terms_used, partial.ratio)


# ---------------------------------------------------------------------------
# Derivation of the constants
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class DerivedConstants:
    """Series constants recomputed from X, U and dM_N/dX.

    ``lhs`` is c*k*sqrt(N)/(2*pi); the identity reads
    lhs = X^e0 (1-X)^e1 sum (b*j + a) A_j X^j at X = x0 = X(gamma*tau0).
    """

    a: object
    b: object
    x0: object
    lhs: object
    tau0: object
    image: object
    x_tau0: object
    y_tau0: object
    u_tau0: object
    u_image: object
    bundle: DerivativeBundle

    def __iter__(self):
        return iter((self.a, self.b, self.x0))

    @property
    def dmdx(self):
        return self.bundle.dMdX


def derive_constants(spec: SeriesSpec, ctx: PrecisionContext) -> DerivedConstants:
    mp = ctx.mp
    group, level = spec.group, spec.N
    matrix = spec.matrix(ctx)
    (a_g, _), (c_g, _) = matrix
    tau0 = a_g / c_g + mp.mpc(0, 1) / (c_g * mp.sqrt(level))
    image = act(matrix, tau0, mp)
    x = eval_hauptmodul(group, image, ctx)
    x_tau0 = eval_hauptmodul(group, tau0, ctx)
    y_tau0 = eval_hauptmodul(group, level * tau0, ctx)
    bundle = dMN_dX(group, level, x_tau0, y_tau0, ctx, tau0=tau0)
    u_image, u_tau0 = eval_u(group, image, ctx), eval_u(group, tau0, ctx)
    e0, e1 = to_mp(spec.e0, mp), to_mp(spec.e1, mp)
    b = 2 * level * u_image
    a = b * (e0 + e1 * x / (x - 1)) + u_tau0 * x_tau0 * bundle.dMdX
    lhs = c_g * group.weight * mp.sqrt(level) / (2 * mp.pi)
    logger.debug(
        "%s: X(gamma tau0)=%s a=%s b=%s dM/dX=%s node=%s",
        spec.id, mp.nstr(x, 12), mp.nstr(a, 12), mp.nstr(b, 12), mp.nstr(bundle.dMdX, 12), bundle.node,
    )
    return DerivedConstants(a, b, x, lhs, tau0, image, x_tau0, y_tau0, u_tau0, u_image, bundle)


def _relative(value, reference, mp):
    return abs(value - reference) / max(abs(reference), mp.mpf(1))


def derivation_residuals(spec: SeriesSpec, derived: DerivedConstants, ctx: PrecisionContext) -> dict[str, object]:
    """Machinery against printed constants, one relative residual per quantity.

    The printed linear form may be any multiple of the derived one, so it is
    compared through a/b and through kappa = target / (prefactor * b).
    """

    mp = ctx.mp
    a_p, b_p = eval_expr(spec.a, ctx), eval_expr(spec.b, ctx)
    outer = positive_power(1 - derived.x0, spec.e1, mp)
    if spec.e0:
        outer *= mp.power(derived.x0, to_mp(spec.e0, mp))
    kappa_printed = eval_expr(spec.target, ctx) / (eval_expr(spec.prefactor, ctx) * b_p)
    kappa_derived = derived.lhs / (outer * derived.b)
    residuals = {
        "tau0": abs(derived.tau0 - eval_expr(spec.tau0, ctx)),
        "x0": _relative(derived.x0, eval_expr(spec.x0, ctx), mp),
        "linear_form": _relative(derived.a / derived.b, a_p / b_p, mp),
        "kappa": _relative(kappa_derived, kappa_printed, mp),
    }
    if spec.dmdx is not None:
        residuals["dmdx"] = _relative(derived.dmdx, eval_expr(spec.dmdx, ctx), mp)
    return residuals


def derived_sum(spec: SeriesSpec, derived: DerivedConstants, ctx: PrecisionContext) -> SeriesSum:
    mp = ctx.mp
    partial = linear_sum(derived.a, derived.b, derived.x0, spec.recipe, ctx)
    outer = positive_power(1 - derived.x0, spec.e1, mp)
    if spec.e0:
        outer *= mp.power(derived.x0, to_mp(spec.e0, mp))
    return SeriesSum(outer * partial.value, partial.terms_used, partial.ratio)


# ---------------------------------------------------------------------------
# Certification
# ---------------------------------------------------------------------------
@dataclass
class CertReport:
    id: str
    digits_requested: int
    digits_matched: int = 0
    terms_used: int = 0
    residual: str = "nan"
    derivation_residual: str = "nan"
    derived_digits_matched: int = 0
    derivation_flagged: bool = False
    detail: dict[str, str] = field(default_factory=dict)
    error: str = ""

    @property
    def passed(self) -> bool:
        return self.digits_matched >= self.digits_requested

    def to_dict(self) -> dict:
        data = asdict(self)
        data["passed"] = self.passed
        return data


def certify(spec: SeriesSpec, digits: int, ctx: PrecisionContext | None = None) -> CertReport:
    """Sum the printed series against its target and cross-check the derivation.

    Passing depends on the printed sum alone; derivation mismatches are
    recorded and flagged.
    """

    ctx = ctx or PrecisionContext(digits + 20)
    if ctx.digits < digits + 20:
        raise InsufficientPrecision(f"certifying {digits} digits needs a context of at least {digits + 20}")
    mp = ctx.mp
    report = CertReport(spec.id, digits)
    try:
        total = sum_series(spec, ctx)
        target = eval_expr(spec.target, ctx)
    except SatoSeriesError as exc:
        logger.warning("%s: summation failed: %s", spec.id, exc)
        report.error = str(exc)
        return report
    report.digits_matched = digits_matched(total.value, target, mp)
    report.terms_used = total.terms_used
    report.residual = mp.nstr(abs(total.value - target), 5)
    if total.ratio is not None:
        report.detail["term_ratio"] = mp.nstr(total.ratio, 8)

    try:
        derived = derive_constants(spec, ctx)
        residuals = derivation_residuals(spec, derived, ctx)
        rebuilt = derived_sum(spec, derived, ctx)
    except SatoSeriesError as exc:
        logger.warning("%s: derivation failed: %s", spec.id, exc)
        report.derivation_flagged = True
        report.error = f"derivation: {exc}"
        return report
    worst = max(residuals.values())
    report.derivation_residual = mp.nstr(worst, 5)
    report.derived_digits_matched = digits_matched(rebuilt.value, derived.lhs, mp)
    report.derivation_flagged = bool(
        worst > mp.mpf(10) ** (-(digits - 10)) or report.derived_digits_matched < digits
    )
    report.detail.update({name: mp.nstr(value, 5) for name, value in residuals.items()})
    report.detail["derived_a"] = mp.nstr(mp.re(derived.a), 20)
    report.detail["derived_b"] = mp.nstr(mp.re(derived.b), 20)
    report.detail["derived_x0"] = mp.nstr(mp.re(derived.x0), 20)
    report.detail["dmdx"] = mp.nstr(mp.re(derived.dmdx), 20)
    report.detail["node"] = str(derived.bundle.node).lower()
    return report


# ---------------------------------------------------------------------------
# Theorem-level checks
# ---------------------------------------------------------------------------
def _expansion_order(tau, ctx: PrecisionContext) -> int:
    mp = ctx.mp
    rate = 2 * mp.pi * mp.im(tau)
    return int(mp.ceil((ctx.working_digits + 10) * mp.log(10) / rate)) + 10


def _log_derivative(group: GroupLabel, tau, ctx: PrecisionContext):
    """Z'(tau)/Z(tau) from the exact q-expansion, with ' = q d/dq."""

    z = z_expansion(group, _expansion_order(tau, ctx))
    return q_derivative(z).evaluate(tau, ctx.mp) / z.evaluate(tau, ctx.mp)


def theorem_identity_check(group: GroupLabel | str, level: int, gamma: Sequence, ctx: PrecisionContext):
    """|c k sqrt(N)/(2 pi) - Z'(tau0)/Z(tau0) - N Z'(gamma tau0)/Z(gamma tau0)|."""

    group = get_group(group)
    mp = ctx.mp
    (a, b), (c, d) = gamma
    a, b, c, d = (to_mp(v, mp) for v in (a, b, c, d))
    if abs(a + d) > ctx.tolerance():
        raise DomainError("the identity needs gamma = (a, b; c, -a)")
    tau0 = a / c + mp.mpc(0, 1) / (c * mp.sqrt(level))
    image = act(((a, b), (c, d)), tau0, mp)
    lhs = c * group.weight * mp.sqrt(level) / (2 * mp.pi)
    rhs = _log_derivative(group, tau0, ctx) + level * _log_derivative(group, image, ctx)
    return abs(lhs - rhs)


def catalog_theorem_cases(catalog: dict[str, SeriesSpec]) -> list[tuple[GroupLabel, int, tuple[Expr, ...]]]:
    """Distinct (group, N, gamma) triples used by the catalog, in catalog order."""

    seen: dict[tuple[str, int, str], tuple[GroupLabel, int, tuple[Expr, ...]]] = {}
    for spec in catalog.values():
        key = (spec.group.name, spec.N, ",".join(to_text(e) for e in spec.gamma))
        seen.setdefault(key, (spec.group, spec.N, spec.gamma))
    return list(seen.values())


def lemma_transform_check(group: GroupLabel | str, r, s: int, ctx: PrecisionContext):
    """|Z(i/sqrt(rs)) - (-r)^(k/2) Z(i sqrt(r/s))| for a group containing gamma_s."""

    group = get_group(group)
    if group.s != s:
        raise DomainError(f"{group} does not contain gamma_{s}")
    mp = ctx.mp
    r = to_mp(r, mp)
    k = group.weight
    left = eval_z(group, mp.mpc(0, 1) / mp.sqrt(r * s), ctx)
    right = (-r) ** (k // 2) * eval_z(group, mp.mpc(0, 1) * mp.sqrt(r / s), ctx)
    return abs(left - right)
