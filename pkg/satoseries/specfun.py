"""Arbitrary-precision evaluation of the analytic objects on the upper half plane.

Every function takes an explicit :class:`PrecisionContext`; nothing here touches
mpmath's global ``mp`` object, so concurrent runs at different precisions do
not interfere.  Each public evaluator is recomputed at
``digits + recheck_delta`` and raises PrecisionError when the two disagree.
"""

from __future__ import annotations

import logging
from contextvars import ContextVar
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, wraps
from typing import Callable, Sequence

from mpmath import mpc as APComplex
from mpmath.ctx_mp import MPContext

from .exceptions import (
    CatalogError,
    DomainError,
    OutOfDisc,
    PrecisionError,
    SingularityError,
)
from .qalg import G02, G03, G04, PSL2Z, GroupLabel, G02plus, G03plus, get_group

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision for one evaluation: ``digits`` wanted, ``guard`` extra."""

    digits: int = 50
    guard: int = 20
    recheck_delta: int = 16

    def __post_init__(self) -> None:
        if self.digits < 10:
            raise DomainError(f"precision must be at least 10 digits, got {self.digits}")
        if self.guard < 10:
            raise DomainError(f"guard digits must be at least 10, got {self.guard}")
        if self.recheck_delta < 16:
            raise DomainError(f"recheck delta must be at least 16, got {self.recheck_delta}")

    @cached_property
    def mp(self) -> MPContext:
        ctx = MPContext()
        ctx.dps = self.digits + self.guard
        return ctx

    @property
    def working_digits(self) -> int:
        return self.digits + self.guard

    def raised(self) -> "PrecisionContext":
        return PrecisionContext(self.digits + self.recheck_delta, self.guard, self.recheck_delta)

    def with_digits(self, digits: int) -> "PrecisionContext":
        return PrecisionContext(digits, self.guard, self.recheck_delta)

    def epsilon(self):
        return self.mp.mpf(10) ** (-self.working_digits)

    def tolerance(self, digits: int | None = None):
        return self.mp.mpf(10) ** (-(self.digits if digits is None else digits))

    def __getstate__(self):
        return {"digits": self.digits, "guard": self.guard, "recheck_delta": self.recheck_delta}

    def __setstate__(self, state):
        for key, value in state.items():
            object.__setattr__(self, key, value)


def to_mp(value, mp):
    """Lift ints, Fractions, Python complex and foreign mpmath numbers into ``mp``."""

    if isinstance(value, Fraction):
        return mp.mpf(value.numerator) / value.denominator
    if isinstance(value, complex):
        return mp.mpc(value.real, value.imag)
    return mp.mpmathify(value)


def digits_matched(a, b, mp) -> int:
    """Number of agreeing decimal digits between ``a`` and ``b`` (relative, capped at dps)."""

    diff = abs(a - b)
    if diff == 0:
        return mp.dps
    scale = max(abs(b), mp.mpf(1))
    return max(0, min(mp.dps, int(mp.floor(-mp.log10(diff / scale)))))


_RECHECKING: ContextVar[bool] = ContextVar("sato_rechecking", default=False)


def double_evaluate(fn: Callable, *args, ctx: PrecisionContext, **kwargs):
    """Evaluate ``fn`` at ``ctx`` and at ``ctx.raised()``; raise when they disagree.

    Evaluators reached from inside ``fn`` skip their own recheck.
    """

    token = _RECHECKING.set(True)
    try:
        low = fn(*args, ctx=ctx, **kwargs)
        high = fn(*args, ctx=ctx.raised(), **kwargs)
    finally:
        _RECHECKING.reset(token)
    mp = ctx.mp
    low, high = to_mp(low, mp), to_mp(high, mp)
    if abs(low - high) > ctx.tolerance() * max(abs(high), 1):
        raise PrecisionError(
            f"{getattr(fn, '__name__', fn)} disagrees between {ctx.digits} and "
            f"{ctx.raised().digits} digits"
        )
    return low


def rechecked(fn: Callable) -> Callable:
    """Route the outermost call of an evaluator through :func:`double_evaluate`."""

    @wraps(fn)
    def wrapper(*args, ctx: PrecisionContext | None = None, **kwargs):
        if ctx is None:
            *args, ctx = args
        if _RECHECKING.get():
            return fn(*args, ctx=ctx, **kwargs)
        return double_evaluate(fn, *args, ctx=ctx, **kwargs)

    return wrapper


def _upper(tau, mp):
    tau = to_mp(tau, mp)
    if mp.im(tau) <= 0:
        raise DomainError(f"tau must lie in the upper half plane, got {tau}")
    return mp.mpc(tau)


def act(matrix: Sequence, tau, mp):
    """Moebius action of ((a, b), (c, d)) on ``tau``."""

    (a, b), (c, d) = matrix
    a, b, c, d = (to_mp(x, mp) for x in (a, b, c, d))
    return (a * tau + b) / (c * tau + d)


# ----------------------------------------------------------------------------
# Gamma
# ----------------------------------------------------------------------------
@rechecked
def eval_gamma(x, ctx: PrecisionContext):
    """Gamma(x), confirmed by recomputation at ``digits + recheck_delta``."""

    mp = ctx.mp
    x = to_mp(x, mp)
    if mp.im(x) == 0 and x <= 0 and x == mp.floor(x):
        raise DomainError(f"Gamma has a pole at {x}")
    return mp.gamma(x)


# ----------------------------------------------------------------------------
# Eta and theta
# ----------------------------------------------------------------------------
def _eta_direct(tau, mp):
    q = mp.exp(2 * mp.pi * mp.j * tau)
    eps = mp.mpf(10) ** (-mp.dps)
    total = mp.mpc(1)
    k = 1
    while True:
        small = q ** (k * (3 * k - 1) // 2)
        if abs(small) < eps:
            break
        sign = -1 if k % 2 else 1
        total += sign * (small + q ** (k * (3 * k + 1) // 2))
        k += 1
    return mp.exp(2 * mp.pi * mp.j * tau / 24) * total


@rechecked
def eval_eta(tau, ctx: PrecisionContext):
    """Dedekind eta; points with Im < 1/2 are first moved up with T and S."""

    mp = ctx.mp
    tau = _upper(tau, mp)
    half = mp.mpf(1) / 2
    factor = mp.mpc(1)
    while mp.im(tau) < half:
        n = int(mp.nint(mp.re(tau)))
        if n:
            factor *= mp.exp(mp.pi * mp.j * n / 12)
            tau -= n
        if mp.im(tau) >= half:
            break
        factor /= mp.sqrt(-mp.j * tau)
        tau = -1 / tau
    return factor * _eta_direct(tau, mp)


def _theta_direct(kind: int, tau, mp):
    nome = mp.exp(mp.pi * mp.j * tau)
    eps = mp.mpf(10) ** (-mp.dps)
    if kind == 2:
        total, n = mp.mpc(0), 0
        while True:
            term = nome ** (n * (n + 1))
            total += term
            if abs(term) < eps:
                break
            n += 1
        return 2 * mp.exp(mp.pi * mp.j * tau / 4) * total
    sign = 1 if kind == 3 else -1
    total, n = mp.mpc(1), 1
    while True:
        term = 2 * sign**n * nome ** (n * n)
        total += term
        if abs(term) < eps:
            break
        n += 1
    return total


@rechecked
def eval_theta(kind: int, tau, ctx: PrecisionContext):
    """Jacobi theta_kind(tau) with theta_3 = sum exp(pi i n^2 tau)."""

    if kind not in (2, 3, 4):
        raise DomainError(f"theta kind must be 2, 3 or 4, got {kind}")
    mp = ctx.mp
    tau = _upper(tau, mp)
    if mp.im(tau) >= mp.mpf(1) / 2:
        return _theta_direct(kind, tau, mp)
    eta, eta2 = eval_eta(tau, ctx), eval_eta(2 * tau, ctx)
    if kind == 2:
        return 2 * eta2**2 / eta
    eta_half = eval_eta(tau / 2, ctx)
    if kind == 3:
        return eta**5 / (eta_half**2 * eta2**2)
    return eta_half**2 / eta


@rechecked
def eval_lambda(tau, ctx: PrecisionContext):
    return (eval_theta(2, tau, ctx) / eval_theta(3, tau, ctx)) ** 4


# ----------------------------------------------------------------------------
# Eisenstein series and j
# ----------------------------------------------------------------------------
_EISENSTEIN_FACTOR = {2: -24, 4: 240, 6: -504}


def _eisenstein_direct(k: int, tau, mp):
    q = mp.exp(2 * mp.pi * mp.j * tau)
    eps = mp.mpf(10) ** (-mp.dps)
    total = mp.mpc(0)
    qn = mp.mpc(1)
    n = 0
    while True:
        n += 1
        qn *= q
        term = mp.mpf(n) ** (k - 1) * qn / (1 - qn)
        total += term
        if abs(term) < eps:
            break
    return 1 + _EISENSTEIN_FACTOR[k] * total


@rechecked
def eval_eisenstein(k: int, tau, ctx: PrecisionContext):
    """E_2, E_4 or E_6; E_2 picks up its quasi-modular correction under S."""

    if k not in _EISENSTEIN_FACTOR:
        raise DomainError(f"Eisenstein series of weight {k} is not supported")
    mp = ctx.mp
    tau = _upper(tau, mp)
    scale, shift = mp.mpc(1), mp.mpc(0)
    half = mp.mpf(1) / 2
    while mp.im(tau) < half:
        tau -= mp.nint(mp.re(tau))
        if mp.im(tau) >= half:
            break
        if k == 2:
            shift -= scale * 6 / (mp.pi * mp.j * tau)
        scale *= tau ** (-k)
        tau = -1 / tau
    return scale * _eisenstein_direct(k, tau, mp) + shift


@rechecked
def eval_e2n(n: int, tau, ctx: PrecisionContext):
    """E_{2,N}(tau) = E_2(tau) - N*E_2(N*tau)."""

    mp = ctx.mp
    tau = _upper(tau, mp)
    return eval_eisenstein(2, tau, ctx) - n * eval_eisenstein(2, n * tau, ctx)


@rechecked
def eval_delta(tau, ctx: PrecisionContext):
    return eval_eta(tau, ctx) ** 24


@rechecked
def eval_j(tau, ctx: PrecisionContext):
    e4 = eval_eisenstein(4, tau, ctx) ** 3
    e6 = eval_eisenstein(6, tau, ctx) ** 2
    denominator = e4 - e6
    if denominator == 0:
        raise SingularityError("E4^3 = E6^2 exactly; j is undefined here")
    return 1728 * e4 / denominator


# ----------------------------------------------------------------------------
# Hypergeometric functions
# ----------------------------------------------------------------------------
def _check_lower(params, mp) -> None:
    for c in params:
        c = to_mp(c, mp)
        if c <= 0 and c == mp.floor(c):
            raise DomainError(f"lower parameter {c} is a nonpositive integer")


@rechecked
def eval_2f1(a, b, c, z, ctx: PrecisionContext):
    """Gauss 2F1 inside the unit disc; no analytic continuation."""

    mp = ctx.mp
    z = to_mp(z, mp)
    if abs(z) >= 1:
        raise OutOfDisc(f"|z| = {mp.nstr(abs(z), 8)} is outside the unit disc")
    _check_lower([c], mp)
    return mp.hyp2f1(to_mp(a, mp), to_mp(b, mp), to_mp(c, mp), z)


@rechecked
def eval_3f2(a1, a2, a3, b1, b2, z, ctx: PrecisionContext):
    mp = ctx.mp
    z = to_mp(z, mp)
    if abs(z) >= 1:
        raise OutOfDisc(f"|z| = {mp.nstr(abs(z), 8)} is outside the unit disc")
    _check_lower([b1, b2], mp)
    return mp.hyp3f2(*(to_mp(p, mp) for p in (a1, a2, a3, b1, b2)), z)


# ----------------------------------------------------------------------------
# Hauptmoduln, Z and U
# ----------------------------------------------------------------------------
@rechecked
def eval_hauptmodul(group: GroupLabel | str, tau, ctx: PrecisionContext):
    group = get_group(group)
    mp = ctx.mp
    tau = _upper(tau, mp)
    if group is G02:
        return -64 * (eval_eta(2 * tau, ctx) / eval_eta(tau, ctx)) ** 24
    if group is G03:
        return -27 * (eval_eta(3 * tau, ctx) / eval_eta(tau, ctx)) ** 12
    if group is G04:
        e1, e2, e4 = eval_eta(tau, ctx), eval_eta(2 * tau, ctx), eval_eta(4 * tau, ctx)
        return 16 * e1**8 * e4**16 / e2**24
    if group is PSL2Z:
        e4 = eval_eisenstein(4, tau, ctx) ** 3
        return (e4 - eval_eisenstein(6, tau, ctx) ** 2) / e4
    if group is G02plus:
        f, g = eval_eta(tau, ctx) ** 24, eval_eta(2 * tau, ctx) ** 24
        return 256 * f * g / (f + 64 * g) ** 2
    if group is G03plus:
        f, g = eval_eta(tau, ctx) ** 12, eval_eta(3 * tau, ctx) ** 12
        return 108 * f * g / (f + 27 * g) ** 2
    raise DomainError(f"no Hauptmodul for {group}")


# (upper parameters of 2F1, power of 2F1, exponent of (1 - X)) per group
HYPERGEOMETRIC_Z = {
    G02: ((Fraction(1, 4), Fraction(1, 4)), 2, Fraction(1, 2)),
    G03: ((Fraction(1, 3), Fraction(1, 3)), 2, Fraction(2, 3)),
    G04: ((Fraction(1, 2), Fraction(1, 2)), 2, Fraction(0)),
    PSL2Z: ((Fraction(1, 12), Fraction(5, 12)), 4, Fraction(0)),
    G02plus: ((Fraction(1, 8), Fraction(3, 8)), 4, Fraction(0)),
    G03plus: ((Fraction(1, 6), Fraction(1, 3)), 4, Fraction(0)),
}


def positive_power(base, exponent: Fraction, mp):
    """Principal power of a base that must sit on the positive real axis."""

    if exponent == 0:
        return mp.mpf(1)
    if abs(mp.im(base)) > mp.mpf(10) ** (-(mp.dps // 2)) * max(abs(base), 1) or mp.re(base) <= 0:
        raise DomainError(f"fractional power of {mp.nstr(base, 10)} would cross the branch cut")
    return mp.power(mp.re(base), to_mp(exponent, mp))


@rechecked
def eval_z(group: GroupLabel | str, tau, ctx: PrecisionContext, route: str = "modular"):
    """Z through its closed modular form, or through the hypergeometric route."""

    group = get_group(group)
    mp = ctx.mp
    tau = _upper(tau, mp)
    if route == "hypergeometric":
        (a, b), power, exponent = HYPERGEOMETRIC_Z[group]
        x = eval_hauptmodul(group, tau, ctx)
        value = eval_2f1(a, b, 1, x, ctx) ** power
        return positive_power(1 - x, exponent, mp) * value
    if route != "modular":
        raise DomainError(f"unknown Z route {route!r}")
    if group is G02:
        return -eval_e2n(2, tau, ctx)
    if group is G03:
        return -eval_e2n(3, tau, ctx) / 2
    if group is G04:
        return eval_theta(3, 2 * tau, ctx) ** 4
    if group is PSL2Z:
        return eval_eisenstein(4, tau, ctx)
    if group is G02plus:
        return eval_e2n(2, tau, ctx) ** 2
    return eval_e2n(3, tau, ctx) ** 2 / 4


@rechecked
def eval_u(group: GroupLabel | str, tau, ctx: PrecisionContext):
    """U with (1/2 pi i) dX/dtau = U X Z."""

    group = get_group(group)
    mp = ctx.mp
    tau = _upper(tau, mp)
    if group in (G02, G03):
        return mp.mpc(1)
    if group is G04:
        return 1 - eval_hauptmodul(G04, tau, ctx)
    if group is PSL2Z:
        return eval_eisenstein(6, tau, ctx) / eval_eisenstein(4, tau, ctx) ** 2
    if group is G02plus:
        f, g = eval_delta(tau, ctx), 64 * eval_delta(2 * tau, ctx)
        return -(f - g) / ((f + g) * eval_e2n(2, tau, ctx))
    f, g = eval_eta(tau, ctx) ** 12, 27 * eval_eta(3 * tau, ctx) ** 12
    return -2 * (f - g) / ((f + g) * eval_e2n(3, tau, ctx))


@rechecked
def eval_dx_dtau(group: GroupLabel | str, tau, ctx: PrecisionContext):
    """Numerical dX/dtau by mpmath's differentiator."""

    mp = ctx.mp
    tau = _upper(tau, mp)
    return mp.diff(lambda t: eval_hauptmodul(group, t, ctx), tau)


FUNCTIONS: dict[str, Callable] = {
    "j": eval_j,
    "eta": eval_eta,
    "delta": eval_delta,
    "E2": lambda tau, ctx: eval_eisenstein(2, tau, ctx),
    "E4": lambda tau, ctx: eval_eisenstein(4, tau, ctx),
    "E6": lambda tau, ctx: eval_eisenstein(6, tau, ctx),
    "E2_2": lambda tau, ctx: eval_e2n(2, tau, ctx),
    "E2_3": lambda tau, ctx: eval_e2n(3, tau, ctx),
    "t2": lambda tau, ctx: eval_hauptmodul(G02, tau, ctx),
    "t3": lambda tau, ctx: eval_hauptmodul(G03, tau, ctx),
    "tinf": lambda tau, ctx: eval_hauptmodul(G04, tau, ctx),
    "t23": lambda tau, ctx: eval_hauptmodul(PSL2Z, tau, ctx),
    "t24": lambda tau, ctx: eval_hauptmodul(G02plus, tau, ctx),
    "t26": lambda tau, ctx: eval_hauptmodul(G03plus, tau, ctx),
}


def eval_function(function_id: str, tau, ctx: PrecisionContext):
    try:
        fn = FUNCTIONS[function_id]
    except KeyError:
        raise CatalogError(f"unknown function id {function_id!r}") from None
    return fn(tau, ctx)


# ----------------------------------------------------------------------------
# Group elements (numeric modular-invariance checks)
# ----------------------------------------------------------------------------
def group_elements(group: GroupLabel | str, mp) -> list[tuple[str, tuple]]:
    """Named generators and elliptic elements, normalized to determinant 1."""

    group = get_group(group)
    one, zero = mp.mpf(1), mp.mpf(0)
    translation = ("T", ((one, one), (zero, one)))
    if group is PSL2Z:
        return [translation, ("S", ((zero, -one), (one, zero)))]
    if group.plus:
        r = mp.sqrt(group.s)
        return [translation, (f"w{group.s}", ((zero, -1 / r), (r, zero)))]
    level = {G02: 2, G03: 3, G04: 4}[group]
    elements = [translation, (f"L{level}", ((one, zero), (mp.mpf(level), one)))]
    if group is G02:
        elements.append(("e2", ((one, -one), (mp.mpf(2), -one))))
    if group is G03:
        elements.append(("e3", ((mp.mpf(2), -one), (mp.mpf(3), -one))))
    return elements
