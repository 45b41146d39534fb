"""
Exact-rational univariate polynomials and real root isolation.

Coefficients are ``fractions.Fraction``; nothing in this module rounds.
Root isolation bisects an interval and prunes with Descartes' rule of
signs applied through the Moebius map (a, b) -> (0, inf), so a
subinterval with zero sign variations holds no root and one with a single
variation holds exactly one simple root.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .geometry import Curvature

RationalLike = Fraction | int | str

DEFAULT_DEPTH = 40

#  x^k coefficient of Q as 2k-th coefficient of P, before the kappa^k factor.
KITE_COEFFS: dict[int, Fraction] = {
    24: Fraction(6697290145, 16777216),
    22: Fraction(-2884257825, 524288),
    20: Fraction(18063189465, 524288),
    18: Fraction(-4241985935, 32768),
    16: Fraction(21267471735, 65536),
    14: Fraction(-584429805, 1024),
    12: Fraction(737853351, 1024),
    10: Fraction(-41995431, 64),
    8: Fraction(109080063, 256),
    6: Fraction(-1530101, 8),
    4: Fraction(446217, 8),
    2: Fraction(-9318),
    0: Fraction(649),
}


def as_fraction(value: RationalLike) -> Fraction:
    """Parse ``"p/q"``, an integer, a decimal string or a Fraction exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, Curvature):
        if value.exact is None:
            raise TypeError("curvature has no exact rational value")
        return value.exact
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational; pass 'p/q' or a Fraction")


@dataclass(frozen=True)
class RationalPolynomial:
    """Coefficients in increasing powers; trailing zeros are trimmed."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        c = [as_fraction(a) for a in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x: RationalLike) -> Fraction:
        return eval_exact(self, x)

    def eval_float(self, x: float) -> float:
        acc = 0.0
        for a in reversed(self.coeffs):
            acc = acc * x + float(a)
        return acc

    def taylor_shift(self, a: Fraction) -> "RationalPolynomial":
        """p(x + a)."""
        n = len(self.coeffs)
        out = [Fraction(0)] * n
        for k, ck in enumerate(self.coeffs):
            if ck == 0:
                continue
            apow = Fraction(1)
            for i in range(k, -1, -1):
                # term ck * C(k, i) a^(k-i) x^i
                out[i] += ck * comb(k, i) * apow
                apow *= a
        return RationalPolynomial(tuple(out))

    def scale(self, s: Fraction) -> "RationalPolynomial":
        """p(s x)."""
        out, spow = [], Fraction(1)
        for ck in self.coeffs:
            out.append(ck * spow)
            spow *= s
        return RationalPolynomial(tuple(out))

    def reversed(self) -> "RationalPolynomial":
        """x^deg p(1/x)."""
        return RationalPolynomial(tuple(reversed(self.coeffs)))

    def __str__(self):
        terms = [f"({a})*x^{k}" for k, a in enumerate(self.coeffs) if a != 0]
        return " + ".join(reversed(terms)) or "0"


@dataclass(frozen=True)
class RootInterval:
    """Open interval (lo, hi) on whose endpoints the polynomial has opposite signs."""

    lo: Fraction
    hi: Fraction
    sign_lo: int
    sign_hi: int

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2


@dataclass
class Isolation:
    """Result of ``isolate``: certified intervals plus anything left unresolved."""

    intervals: list[RootInterval] = field(default_factory=list)
    unresolved: list[tuple[Fraction, Fraction, int]] = field(default_factory=list)


def q_coefficients(kappa: RationalLike) -> RationalPolynomial:
    """Q(x) = sum a_(2k) kappa^k x^k for exact rational kappa."""
    k = as_fraction(kappa)
    return RationalPolynomial(tuple(KITE_COEFFS[2 * i] * k**i for i in range(13)))


def p_coefficients(kappa: RationalLike) -> RationalPolynomial:
    """P(r), the even polynomial in r with P(r) = Q(r^2)."""
    q = q_coefficients(kappa).coeffs
    out = [Fraction(0)] * 25
    for i, a in enumerate(q):
        out[2 * i] = a
    return RationalPolynomial(tuple(out))


def eval_exact(p: RationalPolynomial, x: RationalLike) -> Fraction:
    x = as_fraction(x)
    acc = Fraction(0)
    for a in reversed(p.coeffs):
        acc = acc * x + a
    return acc


def _sign(v: Fraction) -> int:
    return (v > 0) - (v < 0)


def descartes_sign_changes(p: RationalPolynomial | list | tuple) -> int:
    """Strict sign alternations in the coefficient sequence, zeros skipped."""
    coeffs = p.coeffs if isinstance(p, RationalPolynomial) else p
    signs = [_sign(as_fraction(a) if not isinstance(a, Fraction) else a) for a in coeffs]
    signs = [s for s in signs if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def interval_sign_changes(p: RationalPolynomial, lo: Fraction, hi: Fraction) -> int:
    """Descartes bound on the number of roots in the open interval (lo, hi)."""
    t = p.taylor_shift(lo).scale(hi - lo)
    t = t.reversed().taylor_shift(Fraction(1))
    return descartes_sign_changes(t)


def _refine(p, lo, hi, slo, shi, width):
    while hi - lo > width:
        mid = (lo + hi) / 2
        sm = _sign(eval_exact(p, mid))
        if sm == 0:
            half = width / 4
            return _refine_at_root(p, mid, half, lo, hi)
        if sm == slo:
            lo, slo = mid, sm
        else:
            hi, shi = mid, sm
    return RootInterval(lo, hi, slo, shi)


def _refine_at_root(p, x0, half, lo, hi):
    """Bracket an exact rational root x0 known to be the only root in (lo, hi)."""
    half = min(half, (x0 - lo) / 2, (hi - x0) / 2)
    while True:
        a, b = x0 - half, x0 + half
        sa, sb = _sign(eval_exact(p, a)), _sign(eval_exact(p, b))
        if sa != 0 and sb != 0 and sa != sb:
            return RootInterval(a, b, sa, sb)
        if sa == sb and sa != 0 and interval_sign_changes(p, a, b) == 0:
            return None  # even multiplicity: no sign change to certify
        half /= 2


def _nudge_off_roots(p, lo, hi, width):
    """Move an endpoint that is itself a root inward past a root-free gap."""
    if eval_exact(p, lo) == 0:
        d = width / 2
        while interval_sign_changes(p, lo, lo + d) or eval_exact(p, lo + d) == 0:
            d /= 2
        lo = lo + d
    if eval_exact(p, hi) == 0:
        d = width / 2
        while interval_sign_changes(p, hi - d, hi) or eval_exact(p, hi - d) == 0:
            d /= 2
        hi = hi - d
    return lo, hi


def isolate(p: RationalPolynomial, lo: RationalLike, hi: RationalLike, depth: int = DEFAULT_DEPTH) -> Isolation:
    """Isolate odd-multiplicity roots of ``p`` in the open interval (lo, hi)."""
    lo, hi = as_fraction(lo), as_fraction(hi)
    if not lo < hi:
        raise ValueError(f"need lo < hi, got ({lo}, {hi})")
    if depth < 1:
        raise ValueError("depth must be at least 1")
    result = Isolation()
    if p.is_zero() or p.degree == 0:
        return result
    width = (hi - lo) / 2**depth
    lo, hi = _nudge_off_roots(p, lo, hi, width)
    stack = [(lo, hi, 0)]
    found = []
    while stack:
        a, b, level = stack.pop()
        v = interval_sign_changes(p, a, b)
        if v == 0:
            continue
        sa, sb = _sign(eval_exact(p, a)), _sign(eval_exact(p, b))
        if v == 1 and sa != 0 and sb != 0:
            # exactly one simple root inside, so the endpoint signs differ
            found.append(_refine(p, a, b, sa, sb, width))
            continue
        if level >= depth:
            if sa != 0 and sb != 0 and sa != sb:
                found.append(RootInterval(a, b, sa, sb))
            else:
                result.unresolved.append((a, b, v))
            continue
        mid = (a + b) / 2
        if eval_exact(p, mid) == 0:
            # carve out a small certified bracket around the rational root
            half = (b - a) / 4
            while half > width / 4 and (
                interval_sign_changes(p, mid - half, mid + half) > 1
                or eval_exact(p, mid - half) == 0
                or eval_exact(p, mid + half) == 0
            ):
                half /= 2
            if interval_sign_changes(p, mid - half, mid + half) == 1:
                r = _refine_at_root(p, mid, min(half, width / 4), mid - half, mid + half)
                if r is not None:
                    found.append(r)
            else:
                result.unresolved.append((mid - half, mid + half, interval_sign_changes(p, mid - half, mid + half)))
            stack.append((a, mid - half, level + 1))
            stack.append((mid + half, b, level + 1))
        else:
            stack.append((a, mid, level + 1))
            stack.append((mid, b, level + 1))
    result.intervals = sorted((r for r in found if r is not None), key=lambda r: r.lo)
    result.unresolved.sort()
    return result


def isolate_roots(p: RationalPolynomial, lo: RationalLike, hi: RationalLike,
                  depth: int = DEFAULT_DEPTH) -> list[RootInterval]:
    """Certified sign-change intervals of width <= (hi - lo) / 2^depth."""
    return isolate(p, lo, hi, depth).intervals


def cauchy_bound(p: RationalPolynomial) -> Fraction:
    """Every real root has |x| < 1 + max |a_k / a_n|."""
    lead = p.coeffs[-1]
    return 1 + max(abs(a / lead) for a in p.coeffs[:-1])


def fraction_to_decimal(v: Fraction, digits: int = 15) -> str:
    """Correctly rounded decimal string with ``digits`` significant digits."""
    import decimal

    with decimal.localcontext() as ctx:
        ctx.prec = digits
        d = decimal.Decimal(v.numerator) / decimal.Decimal(v.denominator)
    return format(d, "g") if d != 0 else "0"
