"""Special functions used throughout the package.

Gamma and log-gamma (Lanczos, g=7, with reflection), Pochhammer symbols,
generalized binomials, associated Laguerre and Gegenbauer polynomials of
real order, and terminating generalized hypergeometric series.

Everything here is a pure function of its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "PoleError",
    "HypergeometricError",
    "gamma",
    "lgamma",
    "lgamma_signed",
    "gamma_ratio",
    "LogProduct",
    "pochhammer",
    "binomial",
    "laguerre",
    "gegenbauer",
    "HypergeometricSpec",
    "hypergeometric_pfq",
]

_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


class PoleError(ValueError):
    """Gamma evaluated at a non-positive integer."""


class HypergeometricError(ValueError):
    """Series is non-terminating or hits a vanishing denominator."""


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0.0 and x == math.floor(x)


def _lanczos_sum(x: float) -> float:
    # x here is the shifted argument z - 1 with z >= 0.5
    acc = _LANCZOS_COEF[0]
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        acc += c / (x + i)
    return acc


def lgamma_signed(x: float) -> tuple[float, float]:
    """Return ``(log|Gamma(x)|, sign(Gamma(x)))``.

    Raises
    ------
    PoleError
        If ``x`` is zero or a negative integer.
    """
    x = float(x)
    if _is_nonpositive_integer(x):
        raise PoleError(f"Gamma has a pole at {x!r}")
    if x < 0.5:
        # reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        s = math.sin(math.pi * x)
        log_rest, _ = lgamma_signed(1.0 - x)
        return math.log(math.pi / abs(s)) - log_rest, math.copysign(1.0, s)
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(_lanczos_sum(z)), 1.0


def lgamma(x: float) -> float:
    """Natural log of ``|Gamma(x)|``."""
    return lgamma_signed(x)[0]


def gamma(x: float) -> float:
    """Gamma function for real ``x``.

    Uses the Lanczos form directly (no logarithm round trip) for
    ``0.5 <= x <= 140`` to keep the relative error near machine precision.
    """
    x = float(x)
    if _is_nonpositive_integer(x):
        raise PoleError(f"Gamma has a pole at {x!r}")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma(1.0 - x))
    if x > 171.7:
        raise OverflowError(f"Gamma({x}) overflows a double; use lgamma")
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    if x <= 140.0:
        return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * math.exp(-t) * _lanczos_sum(z)
    # split the power to avoid intermediate overflow
    half = t ** (0.5 * (z + 0.5))
    return math.sqrt(2.0 * math.pi) * half * math.exp(-t) * half * _lanczos_sum(z)


@dataclass
class LogProduct:
    """Running product kept as ``sign * exp(log_abs)``.

    ``zero`` is set once any factor is exactly zero (e.g. ``1/Gamma`` at a
    pole); further factors are then ignored.
    """

    log_abs: float = 0.0
    sign: float = 1.0
    zero: bool = False

    def mul(self, value: float) -> "LogProduct":
        if self.zero:
            return self
        if value == 0.0:
            self.zero = True
        else:
            self.log_abs += math.log(abs(value))
            if value < 0:
                self.sign = -self.sign
        return self

    def mul_gamma(self, x: float, power: int = 1) -> "LogProduct":
        """Multiply by ``Gamma(x)**power``; a pole in a denominator gives 0."""
        if self.zero:
            return self
        if _is_nonpositive_integer(x):
            if power < 0:
                self.zero = True
                return self
            raise PoleError(f"Gamma has a pole at {x!r}")
        la, sg = lgamma_signed(x)
        self.log_abs += power * la
        if sg < 0 and power % 2:
            self.sign = -self.sign
        return self

    def value(self) -> float:
        if self.zero:
            return 0.0
        if self.log_abs > 709.0:
            raise OverflowError("log-space product exceeds double range")
        return self.sign * math.exp(self.log_abs)


def gamma_ratio(num: Iterable[float], den: Iterable[float] = ()) -> float:
    """``prod Gamma(num) / prod Gamma(den)`` assembled in log space."""
    acc = LogProduct()
    for x in num:
        acc.mul_gamma(x, 1)
    for x in den:
        acc.mul_gamma(x, -1)
    return acc.value()


def pochhammer(z: float, n: int) -> float:
    """Rising factorial ``z (z+1) ... (z+n-1)``; 1 for ``n == 0``."""
    if n < 0:
        raise ValueError("pochhammer needs n >= 0")
    out = 1.0
    for i in range(n):
        out *= z + i
    return out


def binomial(x: float, k: int) -> float:
    """Generalized binomial coefficient with real upper argument.

    Zero for negative ``k``. Evaluated as a finite product, which equals
    ``Gamma(x+1) / (Gamma(k+1) Gamma(x-k+1))`` wherever that is defined.
    """
    if k < 0:
        return 0.0
    out = 1.0
    for i in range(k):
        out *= (x - i) / (i + 1)
    return out


def laguerre(n: int, alpha: float, x):
    """Associated Laguerre polynomial ``L_n^(alpha)(x)`` by degree recurrence."""
    if n < 0:
        raise ValueError("degree must be >= 0")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + alpha - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + alpha - x) * cur - (k + alpha) * prev) / (k + 1)
    return cur if cur.ndim else float(cur)


def gegenbauer(n: int, lam: float, x):
    """Gegenbauer polynomial ``C_n^(lam)(x)`` by degree recurrence."""
    if n < 0:
        raise ValueError("degree must be >= 0")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 2.0 * lam * x
    for k in range(1, n):
        prev, cur = cur, (2.0 * (k + lam) * x * cur - (k + 2.0 * lam - 1.0) * prev) / (k + 1)
    return cur if cur.ndim else float(cur)


@dataclass(frozen=True)
class HypergeometricSpec:
    """Parameters of a terminating ``pFq(upper; lower; argument)``."""

    upper: Sequence[float]
    lower: Sequence[float]
    argument: float
    n_terms: int = field(init=False)

    def __post_init__(self):
        stops = [-int(a) for a in self.upper if _is_nonpositive_integer(float(a))]
        if not stops:
            raise HypergeometricError("series does not terminate: no non-positive integer upper parameter")
        # several terminating parameters: stop at the smallest |value|
        n = min(stops)
        for b in self.lower:
            if _is_nonpositive_integer(float(b)) and -int(b) < n:
                raise HypergeometricError(
                    f"lower parameter {b} vanishes before the series terminates at k={n}"
                )
        object.__setattr__(self, "n_terms", n)


def hypergeometric_pfq(upper: Sequence[float], lower: Sequence[float], x: float, extra_terms: int = 0) -> float:
    """Terminating generalized hypergeometric series.

    Sums ``k = 0 .. n`` where ``-n`` is the terminating upper parameter,
    with compensated (``math.fsum``) accumulation. ``extra_terms`` appends
    terms past the terminating index; they are exactly zero.
    """
    spec = HypergeometricSpec(tuple(upper), tuple(lower), float(x))
    terms = [1.0]
    term = 1.0
    for k in range(spec.n_terms + extra_terms):
        if term == 0.0:
            terms.append(0.0)
            continue
        num = 1.0
        for a in spec.upper:
            num *= a + k
        den = float(k + 1)
        for b in spec.lower:
            den *= b + k
        if num == 0.0:
            term = 0.0
        elif den == 0.0:
            raise HypergeometricError(f"vanishing denominator at term {k + 1}")
        else:
            term *= num * spec.argument / den
        terms.append(term)
    return math.fsum(terms)
