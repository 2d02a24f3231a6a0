"""Exact q-expansion algebra.

Series live on the exponent lattice (1/24)Z.  Internally every exponent is an
integer number of *ticks* (1 tick = 1/24); the public ``valuation`` and
``trunc_order`` properties convert back to rationals.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Mapping, Union

from .exceptions import (
    CatalogError,
    DomainError,
    InsufficientPrecision,
    InvalidTruncation,
    LatticeError,
    UnsupportedWeight,
)

logger = logging.getLogger(__name__)

TICKS = 24
STURM_SLACK = 5

Rational = Union[int, Fraction]


def to_ticks(exponent: Rational) -> int:
    """Convert a rational exponent to lattice ticks, rejecting off-lattice values."""

    value = Fraction(exponent) * TICKS
    if value.denominator != 1:
        raise LatticeError(f"exponent {exponent} is not a multiple of 1/{TICKS}")
    return value.numerator


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


# ---------------------------------------------------------------------------
# Groups
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class GroupLabel:
    """One of the six arithmetic triangle groups handled by the library.

    ``triple`` uses ``None`` for a cusp (order infinity).  ``s`` is set when the
    group contains the involution gamma_s = (0, -1; s, 0)/sqrt(s).
    """

    name: str
    index: int
    plus: bool
    triple: tuple[int | None, int | None, int | None]
    weight: int
    hauptmodul: str
    s: int | None = None

    def __str__(self) -> str:
        return self.name

    @property
    def triple_label(self) -> str:
        return "(" + ",".join("∞" if e is None else str(e) for e in self.triple) + ")"


G02 = GroupLabel("G02", 3, False, (2, None, None), 2, "t2")
G03 = GroupLabel("G03", 4, False, (3, None, None), 2, "t3")
G04 = GroupLabel("G04", 6, False, (None, None, None), 2, "tinf")
PSL2Z = GroupLabel("PSL2Z", 1, False, (2, 3, None), 4, "t23", s=1)
G02plus = GroupLabel("G02plus", 3, True, (2, 4, None), 4, "t24", s=2)
G03plus = GroupLabel("G03plus", 4, True, (2, 6, None), 4, "t26", s=3)

GROUPS: dict[str, GroupLabel] = {g.name: g for g in (G02, G03, G04, PSL2Z, G02plus, G03plus)}
HAUPTMODUL_GROUPS: dict[str, GroupLabel] = {g.hauptmodul: g for g in GROUPS.values()}


def get_group(label: str | GroupLabel) -> GroupLabel:
    """Resolve a group by its name (``G02``) or Hauptmodul symbol (``t2``)."""

    if isinstance(label, GroupLabel):
        return label
    if label in GROUPS:
        return GROUPS[label]
    if label in HAUPTMODUL_GROUPS:
        return HAUPTMODUL_GROUPS[label]
    raise CatalogError(f"unknown group {label!r}")


def sturm_bound(weight: int, group: GroupLabel) -> Fraction:
    """k/12 times the index for Gamma_0(N); k/24 times the index for the plus groups."""

    return Fraction(weight, 24 if group.plus else 12) * group.index


# ---------------------------------------------------------------------------
# QSeries
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class QSeries:
    """Truncated q-series sum(coeffs[i] * q^(val + i*step)) + O(q^trunc).

    ``val``, ``step`` and ``trunc`` are in ticks.  A series that is zero below
    its truncation has ``coeffs == ()`` and ``val == trunc``.
    """

    val: int
    step: int
    coeffs: tuple[Fraction, ...]
    trunc: int

    # -- construction -------------------------------------------------------
    @classmethod
    def make(cls, val: int, step: int, coeffs, trunc: int) -> "QSeries":
        coeffs = [Fraction(c) for c in coeffs]
        if step <= 0:
            raise LatticeError("series step must be positive")
        while coeffs and coeffs[0] == 0:
            coeffs.pop(0)
            val += step
        if not coeffs or val >= trunc:
            return cls(trunc, TICKS, (), trunc)
        length = _ceil_div(trunc - val, step)
        if len(coeffs) > length:
            del coeffs[length:]
        else:
            coeffs.extend([Fraction(0)] * (length - len(coeffs)))

        g = 0
        for i, c in enumerate(coeffs):
            if c:
                g = math.gcd(g, i)
        if g > 1:
            coeffs = coeffs[::g]
            step *= g
        return cls(val, step, tuple(coeffs), trunc)

    @classmethod
    def from_terms(cls, terms: Mapping[int, Rational], trunc: int) -> "QSeries":
        """Build from a ``{ticks: coefficient}`` mapping; exponents >= trunc are dropped."""

        live = {e: Fraction(c) for e, c in terms.items() if c and e < trunc}
        if not live:
            return cls(trunc, TICKS, (), trunc)
        val = min(live)
        step = 0
        for e in live:
            step = math.gcd(step, e - val)
        step = step or TICKS
        coeffs = [Fraction(0)] * ((max(live) - val) // step + 1)
        for e, c in live.items():
            coeffs[(e - val) // step] = c
        return cls.make(val, step, coeffs, trunc)

    @classmethod
    def constant(cls, c: Rational, trunc: int) -> "QSeries":
        return cls.from_terms({0: c}, trunc)

    @classmethod
    def monomial(cls, exponent: Rational, trunc_order: Rational, c: Rational = 1) -> "QSeries":
        return cls.from_terms({to_ticks(exponent): c}, to_ticks(trunc_order))

    # -- views ----------------------------------------------------------------
    @property
    def valuation(self) -> Fraction:
        return Fraction(self.val, TICKS)

    @property
    def trunc_order(self) -> Fraction:
        return Fraction(self.trunc, TICKS)

    def is_zero(self) -> bool:
        return not self.coeffs

    def terms(self) -> Iterator[tuple[Fraction, Fraction]]:
        """Yield ``(exponent, coefficient)`` for the nonzero known terms."""

        for i, c in enumerate(self.coeffs):
            if c:
                yield Fraction(self.val + i * self.step, TICKS), c

    def coefficient(self, exponent: Rational) -> Fraction:
        e = to_ticks(exponent)
        if e >= self.trunc:
            raise InvalidTruncation(f"coefficient of q^{exponent} is beyond O(q^{self.trunc_order})")
        offset = e - self.val
        if offset < 0 or offset % self.step:
            return Fraction(0)
        return self.coeffs[offset // self.step]

    def leading_coefficient(self) -> Fraction:
        if not self.coeffs:
            raise DomainError("zero series has no leading coefficient")
        return self.coeffs[0]

    def has_integer_coefficients(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def __str__(self) -> str:
        parts = []
        for exponent, c in self.terms():
            if exponent == 0:
                parts.append(f"{c}")
            else:
                parts.append(f"{c}*q^{exponent}")
            if len(parts) == 6:
                parts.append("...")
                break
        parts.append(f"O(q^{self.trunc_order})")
        return " + ".join(parts)

    # -- arithmetic -------------------------------------------------------------
    def _coerce(self, other) -> "QSeries":
        if isinstance(other, QSeries):
            return other
        if isinstance(other, (int, Fraction)):
            return QSeries.constant(other, self.trunc)
        return NotImplemented

    def __neg__(self) -> "QSeries":
        return QSeries(self.val, self.step, tuple(-c for c in self.coeffs), self.trunc)

    def __add__(self, other) -> "QSeries":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        trunc = min(self.trunc, other.trunc)
        val = min(self.val, other.val)
        if val >= trunc:
            return QSeries(trunc, TICKS, (), trunc)
        step = math.gcd(self.step, other.step, abs(self.val - other.val)) or TICKS
        out = [Fraction(0)] * _ceil_div(trunc - val, step)
        for series in (self, other):
            base = (series.val - val) // step
            ratio = series.step // step
            for i, c in enumerate(series.coeffs):
                k = base + i * ratio
                if k >= len(out):
                    break
                out[k] += c
        return QSeries.make(val, step, out, trunc)

    __radd__ = __add__

    def __sub__(self, other) -> "QSeries":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "QSeries":
        return (-self) + other

    def scale(self, c: Rational) -> "QSeries":
        c = Fraction(c)
        return QSeries.make(self.val, self.step, [c * x for x in self.coeffs], self.trunc)

    def __mul__(self, other) -> "QSeries":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, QSeries):
            return NotImplemented
        trunc = min(self.val + other.trunc, other.val + self.trunc)
        if not self.coeffs or not other.coeffs:
            return QSeries(trunc, TICKS, (), trunc)
        val = self.val + other.val
        step = math.gcd(self.step, other.step)
        length = _ceil_div(trunc - val, step)
        if length <= 0:
            return QSeries(trunc, TICKS, (), trunc)
        fa, fden = _integer_vector(self.coeffs)
        ga, gden = _integer_vector(other.coeffs)
        rf, rg = self.step // step, other.step // step
        out = [0] * length
        for i, a in enumerate(fa):
            pos = i * rf
            if pos >= length:
                break
            if not a:
                continue
            jmax = min(len(ga), (length - 1 - pos) // rg + 1)
            for j in range(jmax):
                b = ga[j]
                if b:
                    out[pos + j * rg] += a * b
        den = fden * gden
        return QSeries.make(val, step, [Fraction(x, den) for x in out], trunc)

    __rmul__ = __mul__

    def inverse(self) -> "QSeries":
        if not self.coeffs:
            raise DomainError("division by a series with zero leading coefficient")
        c = self.coeffs[0]
        r = [x / c for x in self.coeffs]
        n = len(r)
        u = [Fraction(0)] * n
        u[0] = Fraction(1)
        for k in range(1, n):
            acc = Fraction(0)
            for i in range(1, k + 1):
                if r[i]:
                    acc += r[i] * u[k - i]
            u[k] = -acc
        inv_c = 1 / c
        return QSeries.make(
            -self.val, self.step, [inv_c * x for x in u], self.trunc - 2 * self.val
        )

    def __truediv__(self, other) -> "QSeries":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("series divided by zero")
            return self.scale(1 / Fraction(other))
        if not isinstance(other, QSeries):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> "QSeries":
        return self.inverse() * other

    def __pow__(self, exponent: Rational) -> "QSeries":
        r = Fraction(exponent)
        if not self.coeffs:
            if r > 0:
                trunc = self.trunc
                return QSeries(trunc, TICKS, (), trunc)
            raise DomainError("non-positive power of a zero series")
        c = self.coeffs[0]
        if r.denominator == 1:
            lead = c ** r.numerator
        elif c == 1:
            lead = Fraction(1)
        else:
            raise DomainError(
                f"rational power {r} of a series with leading coefficient {c} != 1"
            )
        new_val = self.val * r
        if new_val.denominator != 1:
            raise LatticeError(f"q^({self.valuation})^{r} leaves the 1/{TICKS} lattice")
        a = [x / c for x in self.coeffs]
        n = len(a)
        p = [Fraction(0)] * n
        p[0] = Fraction(1)
        for k in range(1, n):
            acc = Fraction(0)
            for i in range(1, k + 1):
                if a[i]:
                    acc += ((r + 1) * i - k) * a[i] * p[k - i]
            p[k] = acc / k
        val = int(new_val)
        return QSeries.make(val, self.step, [lead * x for x in p], val + self.trunc - self.val)

    # -- transformations ----------------------------------------------------
    def rescale(self, n: int) -> "QSeries":
        """Substitute q -> q^n."""

        if n <= 0:
            raise DomainError("rescale factor must be a positive integer")
        if not self.coeffs:
            return QSeries(self.trunc * n, TICKS, (), self.trunc * n)
        return QSeries(self.val * n, self.step * n, self.coeffs, self.trunc * n)

    def truncate(self, order: Rational) -> "QSeries":
        trunc = to_ticks(order)
        if trunc > self.trunc:
            raise InvalidTruncation(
                f"cannot extend O(q^{self.trunc_order}) to O(q^{Fraction(order)})"
            )
        return QSeries.make(self.val, self.step, self.coeffs, trunc)

    def evaluate(self, tau, mp):
        """Sum the known terms at q = exp(2*pi*i*tau) inside the mpmath context ``mp``."""

        tau = mp.mpmathify(tau)
        if not self.coeffs:
            return mp.mpc(0)
        two_pi_i_tau = 2 * mp.pi * mp.j * tau
        base = mp.exp(two_pi_i_tau * self.val / TICKS)
        w = mp.exp(two_pi_i_tau * self.step / TICKS)
        acc = mp.mpc(0)
        for c in reversed(self.coeffs):
            acc = acc * w + mp.mpf(c.numerator) / c.denominator
        return base * acc


def _integer_vector(coeffs) -> tuple[list[int], int]:
    den = math.lcm(*(c.denominator for c in coeffs)) if coeffs else 1
    return [c.numerator * (den // c.denominator) for c in coeffs], den


def q_derivative(f: QSeries) -> QSeries:
    """Termwise q d/dq, i.e. (1/2*pi*i) d/dtau."""

    out = [c * Fraction(f.val + i * f.step, TICKS) for i, c in enumerate(f.coeffs)]
    return QSeries.make(f.val, f.step, out, f.trunc)


def series_mul(f: QSeries, g: QSeries) -> QSeries:
    return f * g


def series_div(f: QSeries, g: QSeries) -> QSeries:
    return f / g


def series_pow(f: QSeries, exponent: Rational) -> QSeries:
    return f ** exponent


# ---------------------------------------------------------------------------
# Building blocks
# ---------------------------------------------------------------------------
@lru_cache(maxsize=256)
def eta_expansion(scale: Rational, order: Rational) -> QSeries:
    """q^(scale/24) * prod_{n>=1} (1 - q^(scale*n)) via the pentagonal number theorem."""

    scale = Fraction(scale)
    if scale <= 0:
        raise DomainError("eta scale must be positive")
    val = to_ticks(scale / TICKS)
    trunc = to_ticks(order)
    if trunc <= val:
        raise InvalidTruncation(f"order {order} does not exceed valuation {scale / TICKS}")
    unit = to_ticks(scale)
    terms: dict[int, int] = {}
    k = 0
    while True:
        hits = 0
        for kk in {k, -k}:
            e = val + unit * (kk * (3 * kk - 1) // 2)
            if e < trunc:
                terms[e] = -1 if kk % 2 else 1
                hits += 1
        if not hits:
            break
        k += 1
    return QSeries.from_terms(terms, trunc)


def eta_quotient(factors: Mapping[int, int], order: Rational) -> QSeries:
    """prod eta(scale*tau)^power, exact through ``order``."""

    total = sum(Fraction(scale, TICKS) * power for scale, power in factors.items())
    relative = Fraction(order) - total
    if relative <= 0:
        raise InvalidTruncation(f"order {order} does not exceed valuation {total}")
    result = None
    for scale, power in sorted(factors.items()):
        if not power:
            continue
        base = eta_expansion(scale, Fraction(scale, TICKS) + relative) ** power
        result = base if result is None else result * base
    if result is None:
        return QSeries.constant(1, to_ticks(order))
    return result


_BERNOULLI = {2: Fraction(1, 6), 4: Fraction(-1, 30), 6: Fraction(1, 42)}


@lru_cache(maxsize=64)
def eisenstein_expansion(k: int, order: int) -> QSeries:
    """E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n for k in {2, 4, 6}."""

    if k not in _BERNOULLI:
        raise UnsupportedWeight(f"Eisenstein series of weight {k} is not supported")
    if order < 1:
        raise InvalidTruncation("Eisenstein order must be at least 1")
    factor = -Fraction(2 * k) / _BERNOULLI[k]
    sigma = [0] * order
    for d in range(1, order):
        power = d ** (k - 1)
        for m in range(d, order, d):
            sigma[m] += power
    coeffs = [Fraction(1)] + [factor * s for s in sigma[1:]]
    return QSeries.make(0, TICKS, coeffs, order * TICKS)


def e2n_expansion(n: int, order: int) -> QSeries:
    """E_{2,N}(tau) = E_2(tau) - N*E_2(N*tau)."""

    e2 = eisenstein_expansion(2, order)
    return e2 - e2.rescale(n).truncate(order) * n


def theta_expansion(kind: int, scale: Rational, order: Rational) -> QSeries:
    """theta_kind(scale*tau) by direct lattice sum; exponents are scale*m^2/2."""

    if kind not in (2, 3, 4):
        raise DomainError(f"theta kind must be 2, 3 or 4, got {kind}")
    scale = Fraction(scale)
    if scale <= 0 or Fraction(order) <= 0:
        raise InvalidTruncation("theta expansion needs positive scale and order")
    trunc = to_ticks(order)
    terms: dict[int, Fraction] = {}
    n = 0
    while True:
        m = Fraction(2 * n + 1, 2) if kind == 2 else Fraction(n)
        e = to_ticks(scale * m * m / 2)
        if e >= trunc:
            break
        if kind == 2:
            terms[e] = Fraction(2)
        elif n == 0:
            terms[e] = Fraction(1)
        else:
            terms[e] = Fraction(2 if kind == 3 or n % 2 == 0 else -2)
        n += 1
    return QSeries.from_terms(terms, trunc)


# ---------------------------------------------------------------------------
# Hauptmoduln, j, Z and U
# ---------------------------------------------------------------------------
def _delta(scale: int, order: Rational) -> QSeries:
    return eta_quotient({scale: 24}, order)


def j_expansion(order: int) -> QSeries:
    """j = 1728 E4^3 / (E4^3 - E6^2), exact through ``order``."""

    e4 = eisenstein_expansion(4, order + 2) ** 3
    e6 = eisenstein_expansion(6, order + 2) ** 2
    return ((e4 * 1728) / (e4 - e6)).truncate(order)


def j_from_t2(order: int) -> QSeries:
    t2 = hauptmodul_expansion(G02, order + 2)
    return ((t2 * 4 - 1) ** 3 * 64 / t2).truncate(order)


def j_from_t3(order: int) -> QSeries:
    t3 = hauptmodul_expansion(G03, order + 2)
    return ((t3 - 1) * (t3 * 9 - 1) ** 3 * -27 / t3).truncate(order)


@lru_cache(maxsize=64)
def hauptmodul_expansion(group: GroupLabel | str, order: int) -> QSeries:
    """q-expansion of the chosen Hauptmodul; every one has valuation exactly 1."""

    group = get_group(group)
    if order < 2:
        raise InvalidTruncation("Hauptmodul order must be at least 2")
    logger.debug("expanding %s to O(q^%s)", group.hauptmodul, order)
    if group is G02:
        return eta_quotient({1: -24, 2: 24}, order) * -64
    if group is G03:
        return eta_quotient({1: -12, 3: 12}, order) * -27
    if group is G04:
        return eta_quotient({1: 8, 2: -24, 4: 16}, order) * 16
    if group is PSL2Z:
        e4 = eisenstein_expansion(4, order) ** 3
        e6 = eisenstein_expansion(6, order) ** 2
        return ((e4 - e6) / e4).truncate(order)
    if group is G02plus:
        f, g = _delta(1, order + 2), _delta(2, order + 2)
        return ((f * g * 256) / (f + g * 64) ** 2).truncate(order)
    if group is G03plus:
        f, g = eta_quotient({1: 12}, order + 2), eta_quotient({3: 12}, order + 2)
        return ((f * g * 108) / (f + g * 27) ** 2).truncate(order)
    raise CatalogError(f"no Hauptmodul for {group}")


@lru_cache(maxsize=64)
def z_expansion(group: GroupLabel | str, order: int) -> QSeries:
    """Closed modular form Z for the group (weight 2 or 4)."""

    group = get_group(group)
    if group is G02:
        return -e2n_expansion(2, order)
    if group is G03:
        return e2n_expansion(3, order) * Fraction(-1, 2)
    if group is G04:
        return theta_expansion(3, 2, order) ** 4
    if group is PSL2Z:
        return eisenstein_expansion(4, order)
    if group is G02plus:
        return e2n_expansion(2, order) ** 2
    if group is G03plus:
        return e2n_expansion(3, order) ** 2 * Fraction(1, 4)
    raise CatalogError(f"no Z form for {group}")


@lru_cache(maxsize=64)
def u_expansion(group: GroupLabel | str, order: int) -> QSeries:
    """U with (1/2*pi*i) dX/dtau = U * X * Z."""

    group = get_group(group)
    if group in (G02, G03):
        return QSeries.constant(1, to_ticks(order))
    if group is G04:
        return 1 - hauptmodul_expansion(G04, order)
    if group is PSL2Z:
        return eisenstein_expansion(6, order) / eisenstein_expansion(4, order) ** 2
    if group is G02plus:
        f, g = _delta(1, order + 2), _delta(2, order + 2) * 64
        ratio = (f - g) / (f + g)
        return (-ratio / e2n_expansion(2, order + 2)).truncate(order)
    if group is G03plus:
        f, g = eta_quotient({1: 12}, order + 2), eta_quotient({3: 12}, order + 2) * 27
        ratio = (f - g) / (f + g)
        return (ratio * -2 / e2n_expansion(3, order + 2)).truncate(order)
    raise CatalogError(f"no U function for {group}")


def sturm_verify(
    f: QSeries,
    weight: int,
    group: GroupLabel | str,
    slack: int = STURM_SLACK,
    index: int | None = None,
) -> bool:
    """Prove ``f == 0`` from its truncated expansion, or return False.

    ``index`` replaces the group's index when the forms involved live on a
    finer Gamma_0(M).  Raises InsufficientPrecision when the truncation does
    not clear the bound.
    """

    group = get_group(group)
    bound = sturm_bound(weight, group) if index is None else Fraction(weight, 12) * index
    if f.trunc_order <= bound + slack:
        raise InsufficientPrecision(
            f"O(q^{f.trunc_order}) does not clear Sturm bound {bound} + {slack} for {group}"
        )
    return f.is_zero()
