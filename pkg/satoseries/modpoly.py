"""Modular polynomial catalog, exact q-series checks and implicit differentiation."""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Mapping

from . import CATALOG_DIR
from .exceptions import (
    CatalogError,
    DomainError,
    InvalidTruncation,
    SingularityError,
)
from .qalg import G04, GroupLabel, QSeries, get_group, hauptmodul_expansion
from .specfun import PrecisionContext, eval_dx_dtau, eval_z, to_mp

logger = logging.getLogger(__name__)

MIN_RELATION_ORDER = 50


@dataclass(frozen=True)
class ModularPolynomial:
    """Sparse Phi_N(X, Y) = sum c_ij X^i Y^j with X = t(tau), Y = t(N tau)."""

    group: GroupLabel
    level: int
    terms: tuple[tuple[tuple[int, int], int], ...]

    @classmethod
    def from_mapping(cls, group: GroupLabel | str, level: int, terms: Mapping[tuple[int, int], int]):
        live = tuple(sorted(((k, int(c)) for k, c in terms.items() if c), reverse=True))
        if not live:
            raise CatalogError(f"empty modular polynomial for {group} level {level}")
        return cls(get_group(group), level, live)

    @property
    def coefficients(self) -> dict[tuple[int, int], int]:
        return dict(self.terms)

    @property
    def symmetric(self) -> bool:
        coeffs = self.coefficients
        return all(coeffs.get((j, i)) == c for (i, j), c in coeffs.items())

    @property
    def degree(self) -> tuple[int, int]:
        return max(i for (i, _), _ in self.terms), max(j for (_, j), _ in self.terms)

    @property
    def key(self) -> tuple[str, int]:
        return self.group.hauptmodul, self.level

    def __str__(self) -> str:
        return f"Phi_{self.level}[{self.group.hauptmodul}]"

    def coefficient(self, i: int, j: int) -> int:
        return self.coefficients.get((i, j), 0)

    def derivative(self, dx: int = 0, dy: int = 0) -> dict[tuple[int, int], int]:
        """Exact coefficients of the mixed partial d^dx/dX^dx d^dy/dY^dy."""

        out: dict[tuple[int, int], int] = {}
        for (i, j), c in self.terms:
            if i < dx or j < dy:
                continue
            factor = math.perm(i, dx) * math.perm(j, dy)
            out[(i - dx, j - dy)] = out.get((i - dx, j - dy), 0) + c * factor
        return out

    def to_text(self) -> str:
        body = " ".join(f"{c}:{i}:{j}" for (i, j), c in self.terms)
        return f"{self.group.hauptmodul} {self.level}\n    {body}\n"


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------
def parse_polynomials(lines: Iterable[str], source: str = "polynomials") -> dict[tuple[str, int], ModularPolynomial]:
    catalog: dict[tuple[str, int], ModularPolynomial] = {}
    header: tuple[str, int] | None = None
    terms: dict[tuple[int, int], int] = {}

    def flush() -> None:
        if header is None:
            return
        if header in catalog:
            raise CatalogError(f"{source}: duplicate entry {header[0]} level {header[1]}")
        catalog[header] = ModularPolynomial.from_mapping(header[0], header[1], terms)

    for number, raw in enumerate(lines, start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        if not raw[0].isspace():
            flush()
            parts = raw.split()
            if len(parts) != 2 or not parts[1].isdigit():
                raise CatalogError(f"{source}:{number}: expected '<hauptmodul> <level>'")
            get_group(parts[0])
            header, terms = (parts[0], int(parts[1])), {}
            continue
        if header is None:
            raise CatalogError(f"{source}:{number}: terms before any header")
        for token in raw.split():
            try:
                c, i, j = (int(x) for x in token.split(":"))
            except ValueError:
                raise CatalogError(f"{source}:{number}: bad term {token!r}") from None
            if (i, j) in terms:
                raise CatalogError(f"{source}:{number}: repeated monomial X^{i}Y^{j}")
            terms[(i, j)] = c
    flush()
    return catalog


@lru_cache(maxsize=8)
def load_polynomials(catalog_dir: Path | str = CATALOG_DIR) -> dict[tuple[str, int], ModularPolynomial]:
    path = Path(catalog_dir) / "polynomials.txt"
    if not path.exists():
        raise CatalogError(f"polynomial catalog {path} is missing")
    return parse_polynomials(path.read_text(encoding="utf-8").splitlines(), str(path))


def get_polynomial(
    group: GroupLabel | str, level: int, catalog_dir: Path | str = CATALOG_DIR
) -> ModularPolynomial:
    symbol = get_group(group).hauptmodul
    try:
        return load_polynomials(catalog_dir)[(symbol, level)]
    except KeyError:
        raise CatalogError(f"no modular polynomial of level {level} for {symbol}") from None


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------
def _evaluate_terms(terms: Mapping[tuple[int, int], int], x, y):
    """Horner in X over Horner-in-Y rows."""

    if not terms:
        return 0 * x
    rows: dict[int, dict[int, int]] = {}
    for (i, j), c in terms.items():
        rows.setdefault(i, {})[j] = c
    result = 0 * x
    for i in range(max(rows), -1, -1):
        row = rows.get(i, {})
        inner = 0 * y
        for j in range(max(row, default=0), -1, -1):
            inner = inner * y + row.get(j, 0)
        result = result * x + inner
    return result


def phi_eval(p: ModularPolynomial, x, y):
    return _evaluate_terms(p.coefficients, x, y)


def _magnitude(p: ModularPolynomial, x, y):
    return sum(abs(c) * abs(x) ** i * abs(y) ** j for (i, j), c in p.terms)


def verify_relation_qseries(p: ModularPolynomial, order: int) -> bool:
    """True iff Phi(X(q), X(q^N)) vanishes identically through O(q^order)."""

    if order < MIN_RELATION_ORDER:
        raise InvalidTruncation(f"relation checks need order >= {MIN_RELATION_ORDER}, got {order}")
    x = hauptmodul_expansion(p.group, order)
    y = x.rescale(p.level).truncate(order)
    max_i, max_j = p.degree
    x_powers = [QSeries.constant(1, x.trunc)]
    for _ in range(max_i):
        x_powers.append(x_powers[-1] * x)
    y_powers = [QSeries.constant(1, y.trunc)]
    for _ in range(max_j):
        y_powers.append(y_powers[-1] * y)
    total = QSeries.constant(0, x.trunc)
    for (i, j), c in p.terms:
        total = total + (x_powers[i] * y_powers[j]).scale(c)
    logger.debug("%s through O(q^%s): %s", p, order, "zero" if total.is_zero() else total)
    return total.is_zero()


# ---------------------------------------------------------------------------
# Implicit differentiation and dM_N/dX
# ---------------------------------------------------------------------------
class Route(str, enum.Enum):
    U_EQUALS_1 = "U_equals_1"
    U_EQUALS_1_MINUS_X = "U_equals_1_minus_X"
    U_SQUARED_FAMILY = "U_squared_family"


def route_for(group: GroupLabel | str) -> Route:
    group = get_group(group)
    if group.weight == 4:
        return Route.U_SQUARED_FAMILY
    if group is G04:
        return Route.U_EQUALS_1_MINUS_X
    return Route.U_EQUALS_1


@dataclass(frozen=True)
class DerivativeBundle:
    X0: object
    Y0: object
    dYdX: object
    d2YdX2: object
    dMdX: object
    route: Route
    node: bool = False


def implicit_derivatives(p: ModularPolynomial, x0, y0, ctx: PrecisionContext, slope_hint=None):
    """(dY/dX, d2Y/dX2) along Phi(X, Y) = 0 through (x0, y0).

    At a node (Phi_X = Phi_Y = 0) the two branch slopes solve a quadratic; the
    one closest to ``slope_hint`` is taken.
    """

    mp = ctx.mp
    x0, y0 = to_mp(x0, mp), to_mp(y0, mp)
    scale = max(_magnitude(p, x0, y0), 1)
    if abs(phi_eval(p, x0, y0)) > mp.mpf(10) ** (-(ctx.digits - 15)) * scale:
        raise DomainError(f"({mp.nstr(x0, 10)}, {mp.nstr(y0, 10)}) is not on {p}")

    def d(dx: int, dy: int):
        return _evaluate_terms(p.derivative(dx, dy), x0, y0)

    fx, fy = d(1, 0), d(0, 1)
    fxx, fxy, fyy = d(2, 0), d(1, 1), d(0, 2)
    small = mp.mpf(10) ** (-(ctx.digits // 2)) * scale
    if abs(fy) > small:
        slope = -fx / fy
        curvature = -(fxx + 2 * fxy * slope + fyy * slope**2) / fy
        return slope, curvature, False
    if abs(fx) > small:
        raise SingularityError(f"vertical tangent of {p} at X = {mp.nstr(x0, 10)}")
    if slope_hint is None:
        raise SingularityError(f"{p} has a node at X = {mp.nstr(x0, 10)}; a slope hint is required")
    if fyy == 0:
        if fxy == 0:
            raise SingularityError(f"{p} has a degenerate singular point at X = {mp.nstr(x0, 10)}")
        candidates = [-fxx / (2 * fxy)]
    else:
        disc = mp.sqrt(fxy**2 - fxx * fyy)
        candidates = [(-fxy + disc) / fyy, (-fxy - disc) / fyy]
    slope = min(candidates, key=lambda m: abs(m - slope_hint))
    logger.debug("%s node at %s: slope candidates %s", p, mp.nstr(x0, 8), [mp.nstr(m, 8) for m in candidates])
    denominator = 3 * (fxy + fyy * slope)
    if denominator == 0:
        raise SingularityError(f"{p} node at X = {mp.nstr(x0, 10)} has a tacnode branch")
    third = d(3, 0) + 3 * d(2, 1) * slope + 3 * d(1, 2) * slope**2 + d(0, 3) * slope**3
    return slope, -third / denominator, True


def slope_oracle(group: GroupLabel | str, level: int, tau0, ctx: PrecisionContext):
    """dY/dX = N X'(N tau) / X'(tau) computed in tau-space."""

    mp = ctx.mp
    tau0 = to_mp(tau0, mp)
    return level * eval_dx_dtau(group, level * tau0, ctx) / eval_dx_dtau(group, tau0, ctx)


def dMN_dX(
    group: GroupLabel | str,
    level: int,
    x0,
    y0,
    ctx: PrecisionContext,
    tau0=None,
    polynomial: ModularPolynomial | None = None,
) -> DerivativeBundle:
    """dM_N/dX at X = x0, Y = y0 with M_N(tau) = Z(tau)/Z(N tau)."""

    group = get_group(group)
    p = polynomial or get_polynomial(group, level)
    if p.group is not group or p.level != level:
        raise DomainError(f"{p} does not belong to {group} level {level}")
    mp = ctx.mp
    x, y = to_mp(x0, mp), to_mp(y0, mp)
    hint = slope_oracle(group, level, tau0, ctx) if tau0 is not None else None
    slope, curvature, node = implicit_derivatives(p, x, y, ctx, slope_hint=hint)
    if slope == 0:
        raise SingularityError(f"dY/dX vanishes on {p} at X = {mp.nstr(x, 10)}")
    D = 1 / slope
    D1 = -curvature / slope**2
    n = level
    route = route_for(group)
    dratio = (x * slope - y) / x**2  # d(Y/X)/dX
    if route is Route.U_EQUALS_1:
        value = n * (D1 * y / x + 1 / x - D * y / x**2)
    elif route is Route.U_EQUALS_1_MINUS_X:
        r = (1 - y) / (1 - x)
        r1 = ((1 - x) * (-slope) + (1 - y)) / (1 - x) ** 2
        value = n * (dratio * r * D + (y / x) * r1 * D + (y / x) * r * D1)
    else:
        r = (1 - y) / (1 - x)
        r1 = ((1 - x) * (-slope) + (1 - y)) / (1 - x) ** 2
        w = D * y / x
        w1 = D1 * y / x + D * dratio
        value = n**2 * (2 * w * w1 * r + w**2 * r1)
    return DerivativeBundle(x, y, slope, curvature, value, route, node)


def fd_dMN_dX(group: GroupLabel | str, level: int, tau0, ctx: PrecisionContext):
    """Finite-difference oracle: (dM_N/dtau) / (dX/dtau) with M_N = Z(tau)/Z(N tau)."""

    mp = ctx.mp
    tau0 = to_mp(tau0, mp)

    def m_n(t):
        return eval_z(group, t, ctx) / eval_z(group, level * t, ctx)

    return mp.diff(m_n, tau0) / eval_dx_dtau(group, tau0, ctx)
