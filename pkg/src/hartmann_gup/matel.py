"""Matrix elements of ``r^s`` and ``(1 - x^2)^(-t)`` between Hartmann states.

Every quantity has up to three routes:

* ``printed``   -- the literature closed form, transcribed as-is;
* ``validated`` -- an independent closed form known to be right (corrected
  Gegenbauer product integral, explicit Laguerre expansion);
* ``oracle``    -- double-exponential quadrature of the defining integral.

The oracle is the reference. Closed forms are compared against it and the
outcome is kept as a :class:`Verdict`; a printed form that disagrees is a
finding, not an exception.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .model import HartmannModel, QuantumState, angular_log_norm, printed_angular_norm, radial_log_envelope
from .quad_oracle import DEFAULT_SPEC, DivergentIntegralError, IntegralResult, QuadratureSpec, integrate_angular, integrate_radial
from .specfun import HypergeometricError, LogProduct, PoleError, binomial, gegenbauer, hypergeometric_pfq, lgamma, pochhammer

__all__ = [
    "Verdict",
    "verdict_for",
    "MatrixElement",
    "radial_oracle",
    "angular_oracle",
    "radial_diagonal",
    "radial_general",
    "radial_series",
    "gegenbauer_product_integral",
    "angular_offdiagonal",
    "angular_diagonal_seed",
    "potential_elements",
    "matrix_element",
    "element_table",
    "ELEMENT_COLUMNS",
]

ABS_MATCH = 1e-9
REL_MATCH = 1e-8


class Verdict(str, enum.Enum):
    MATCH = "match"
    MISMATCH = "mismatch"
    UNAVAILABLE = "closed_form_unavailable"


def verdict_for(closed_form: float | None, reference: float) -> Verdict:
    if closed_form is None or not math.isfinite(closed_form):
        return Verdict.UNAVAILABLE
    if abs(closed_form - reference) <= max(ABS_MATCH, REL_MATCH * abs(reference)):
        return Verdict.MATCH
    return Verdict.MISMATCH


# ---------------------------------------------------------------- oracles


def radial_oracle(bra: QuantumState, ket: QuantumState, s: float, spec: QuadratureSpec = DEFAULT_SPEC) -> IntegralResult:
    """Quadrature of ``int_0^inf R_bra R_ket r^s dr``."""
    if not s > -(bra.l + ket.l + 3.0):
        raise DivergentIntegralError(f"r^{s} diverges at the origin for l1+l2={bra.l + ket.l}")

    def f(r):
        e1, p1 = radial_log_envelope(bra, r)
        e2, p2 = radial_log_envelope(ket, r)
        return np.exp(e1 + e2 + s * np.log(r)) * p1 * p2

    return integrate_radial(f, 0.5 * (bra.a + ket.a), spec)


def angular_oracle(n1: int, k1: float, n2: int, k2: float, power: float, spec: QuadratureSpec = DEFAULT_SPEC) -> IntegralResult:
    """Quadrature of ``int_-1^1 (1-x^2)^power Theta_{n1,k1} Theta_{n2,k2} dx``."""
    exponent = 0.5 * (k1 + k2) + power

    norm = math.exp(angular_log_norm(n1, k1) + angular_log_norm(n2, k2))

    def f(x, w):
        # one combined power of w: w**power alone overflows near the endpoints
        return norm * np.power(w, exponent) * gegenbauer(n1, k1 + 0.5, x) * gegenbauer(n2, k2 + 0.5, x)

    return integrate_angular(f, exponent, spec)


# ---------------------------------------------------------------- radial closed forms


def _check_radial(l1: float, l2: float, s: float) -> None:
    if not s > -(l1 + l2 + 3.0):
        raise DivergentIntegralError(f"<r^{s}> diverges for l1 + l2 = {l1 + l2}")


def radial_diagonal(state: QuantumState, s: int) -> float:
    """Printed diagonal averages ``<r^s>`` for ``s`` in ``{-1, -2, -3, -4}``."""
    a, npr, l = state.a, state.n_prime, state.l
    _check_radial(l, l, s)
    if s == -1:
        return a / (2.0 * npr)
    if s == -2:
        return a**2 / (2.0 * npr * (2.0 * l + 1.0))
    if s == -3:
        return a**3 * math.exp(lgamma(2 * l) - lgamma(2 * l + 3))
    if s == -4:
        return a**4 * (3.0 * npr**2 - l * (l + 1.0)) / npr * math.exp(lgamma(2 * l - 1) - lgamma(2 * l + 4))
    raise ValueError("radial_diagonal covers s in {-1, -2, -3, -4}")


def radial_general(bra: QuantumState, ket: QuantumState, s: int) -> float:
    """Printed triple-sum for ``int R1 R2 r^s dr``, transcribed term by term.

    Reading used: the inverse Bohr radius ``mu eta sigma^2 e^2 / hbar^2``
    replaces ``eta sigma^2``; ``N`` is ``N1`` in the ``m1`` sum and ``N2`` in
    the ``m2`` sum; binomials with real upper argument are finite products.
    """
    model = bra.model
    c = model.inverse_bohr
    l1, l2, N1, N2 = bra.l, ket.l, bra.N, ket.N
    _check_radial(l1, l2, s)
    inv1, inv2 = 1.0 / bra.n_prime, 1.0 / ket.n_prime
    delta = (inv1 - inv2) / (inv1 + inv2)
    L = l1 + l2 + s

    pref = LogProduct()
    pref.mul(c * inv1 * inv2)
    pref.log_abs += 0.5 * (lgamma(N1 + 1) + lgamma(N2 + 1) - lgamma(2 * l1 + N1 + 2) - lgamma(2 * l2 + N2 + 2))
    pref.log_abs += (l1 + 1) * math.log(2 * c * inv1) + (l2 + 1) * math.log(2 * c * inv2)
    pref.log_abs += (-s - l1 - l2 - 3) * math.log(c * (inv1 + inv2))

    terms = []
    for m1 in range(N1 + 1):
        for m2 in range(N2 + 1):
            power = m1 + m2
            dfac = 1.0 if power == 0 else delta**power
            if dfac == 0.0:
                continue
            inner = math.fsum(
                binomial(L + m2 + 1, N1 - m1 - m3)
                * binomial(L + m1 + 1, N2 - m2 - m3)
                * binomial(L + m1 + m2 + m3 + 2, m3)
                for m3 in range(min(N1 - m1, N2 - m2) + 1)
            )
            if inner == 0.0:
                continue
            t = LogProduct(pref.log_abs, pref.sign)
            t.mul((-1.0) ** (N1 + N2 + m2) * dfac * inner / (math.factorial(m1) * math.factorial(m2)))
            t.mul_gamma(L + m1 + m2 + 3)
            terms.append(t.value())
    return math.fsum(terms)


def radial_series(bra: QuantumState, ket: QuantumState, s: float) -> float:
    """``int R1 R2 r^s dr`` from the explicit power series of both Laguerre
    factors; an exact finite double sum, used as the validated closed form."""
    l1, l2 = bra.l, ket.l
    _check_radial(l1, l2, s)
    a1, a2 = bra.a, ket.a
    kappa = 0.5 * (a1 + a2)
    c = bra.model.inverse_bohr

    def log_norm(st: QuantumState) -> float:
        return 0.5 * (math.log(c / st.n_prime) + lgamma(st.N + 1) - math.log(st.n_prime) - lgamma(st.n_prime + st.l + 1))

    base = log_norm(bra) + log_norm(ket) + (l1 + 1) * math.log(a1) + (l2 + 1) * math.log(a2)
    terms = []
    for j1 in range(bra.N + 1):
        c1 = binomial(bra.N + 2 * l1 + 1, bra.N - j1) / math.factorial(j1)
        for j2 in range(ket.N + 1):
            c2 = binomial(ket.N + 2 * l2 + 1, ket.N - j2) / math.factorial(j2)
            p = l1 + l2 + 2 + s + j1 + j2  # power of r
            t = LogProduct(base)
            t.mul((-1.0) ** (j1 + j2) * c1 * c2)
            t.log_abs += j1 * math.log(a1) + j2 * math.log(a2) - (p + 1) * math.log(kappa)
            t.mul_gamma(p + 1)
            terms.append(t.value())
    return math.fsum(terms)


# ---------------------------------------------------------------- angular closed forms


def gegenbauer_product_integral(n1: int, th: float, n2: int, mu: float, lam: float, printed: bool = False) -> float:
    """``int_-1^1 C_n1^(th) C_n2^(mu) (1-x^2)^(lam-1/2) dx`` as a finite sum.

    The sum runs over ``p = 0 .. n1//2`` with the partner index
    ``s = (n2 - n1 + 2p)/2``. ``printed=True`` keeps the literature factor
    ``Gamma(n1 - th - p)``; the connection-coefficient derivation gives
    ``Gamma(n1 + th - p)``, used otherwise.
    """
    if (n1 + n2) % 2:
        return 0.0
    if not lam > -0.5:
        raise DivergentIntegralError(f"weight (1-x^2)^{lam - 0.5} is not integrable")
    terms = []
    for p in range(n1 // 2 + 1):
        s2 = n2 - n1 + 2 * p
        if s2 < 0:
            continue
        s = s2 // 2
        j = n1 - 2 * p
        t = LogProduct()
        t.mul(1.0 / (math.factorial(j) * math.factorial(p) * math.factorial(s)))
        t.mul(pochhammer(th - lam, p) * pochhammer(mu - lam, s))
        t.mul_gamma(n1 - th - p if printed else n1 + th - p)
        t.mul_gamma(n1 + lam - p + 1, -1)
        if j == 0:
            # lam Gamma(2 lam) = Gamma(2 lam + 1) / 2, finite at lam = 0
            t.mul(0.5).mul_gamma(2 * lam + 1)
        else:
            t.mul(j + lam).mul_gamma(j + 2 * lam)
        t.mul_gamma(n2 + mu - s)
        t.mul_gamma(n2 + lam - s + 1, -1)
        terms.append(t.value())
    pref = LogProduct()
    pref.mul(math.pi * 2.0 ** (1.0 - 2.0 * lam))
    pref.mul_gamma(mu, -1).mul_gamma(th, -1)
    return pref.value() * math.fsum(terms)


def angular_offdiagonal(n1: int, k1: float, n2: int, k2: float, t: int, printed: bool = False) -> float:
    """``int (1-x^2)^(-t) Theta_{n1,k1} Theta_{n2,k2} dx`` in closed form.

    Exactly zero when ``n1 + n2`` is odd. ``printed=True`` reproduces the
    literature route: its normalization constants (no ``n!``) and its
    Gegenbauer product sum. Otherwise the normalization comes from the
    wavefunction and the sum uses the corrected Gamma factor.
    """
    if (n1 + n2) % 2:
        return 0.0
    if not 0.5 * (k1 + k2) - t > -1.0:
        raise DivergentIntegralError(f"(1-x^2)^({(k1 + k2) / 2 - t}) is not integrable")
    lam = 0.5 * (k1 + k2 + 1.0) - t
    core = gegenbauer_product_integral(n1, k1 + 0.5, n2, k2 + 0.5, lam, printed=printed)
    if printed:
        return printed_angular_norm(n1, k1) * printed_angular_norm(n2, k2) * core
    return math.exp(angular_log_norm(n1, k1) + angular_log_norm(n2, k2)) * core


def angular_diagonal_seed(n: int, k: float, t: int) -> float:
    """Printed 5F4 closed forms for ``<(1-x^2)^-t>`` over ``Theta_{n,k}^2``, t in {1, 2}.

    Raises ``DivergentIntegralError`` when ``k <= t - 1``; ``PoleError`` or
    ``HypergeometricError`` when the printed expression itself is undefined.
    """
    if t not in (1, 2):
        raise ValueError("printed 5F4 forms exist for t = 1 and t = 2")
    if not k > t - 1:
        raise DivergentIntegralError(f"<sin^-{2 * t}> diverges for k = {k}")
    acc = LogProduct()
    acc.mul(math.pi * (2 * n + 2 * k + 1))
    acc.log_abs -= 2.0 * lgamma(n + 1)
    acc.mul_gamma(k + 1, -2).mul_gamma(n + 2 * k + 1)
    if t == 1:
        acc.log_abs -= (4 * k - 3) * math.log(2.0)
        acc.mul_gamma(2 * k - 3).mul_gamma(k - 1.5, -1).mul_gamma(k - 0.5, -1)
        series = hypergeometric_pfq((-n, k + 0.5, n + 2 * k + 1, k - 0.5, k), (k + 1, 2 * k + 1, k - 0.5, k + 0.5), 1.0)
    else:
        acc.log_abs -= 4 * k * math.log(2.0)
        acc.mul_gamma(2 * k - 1).mul_gamma(k - 0.5, -1).mul_gamma(k + 0.5, -1)
        series = hypergeometric_pfq((-n, k + 0.5, n + 2 * k + 1, k - 1.5, k - 1), (k + 1, 2 * k + 1, k - 1.5, k - 0.5), 1.0)
    return acc.value() * series


# ---------------------------------------------------------------- elements


@dataclass(frozen=True)
class MatrixElement:
    bra: QuantumState
    ket: QuantumState
    s: int
    t: int
    closed_form: float | None
    oracle: IntegralResult
    verdict: Verdict

    @property
    def abs_err(self) -> float | None:
        if self.closed_form is None or not math.isfinite(self.closed_form):
            return None
        return abs(self.closed_form - self.oracle.value)

    def row(self) -> dict:
        b, k = self.bra, self.ket
        return {
            "N1": b.N, "n1": b.n, "m1": b.m, "N2": k.N, "n2": k.n, "m2": k.m,
            "s": self.s, "t": self.t,
            "closed_form": self.closed_form,
            "oracle": self.oracle.value,
            "abs_err": self.abs_err,
            "verdict": self.verdict.value,
        }


ELEMENT_COLUMNS = ("N1", "n1", "m1", "N2", "n2", "m2", "s", "t", "closed_form", "oracle", "abs_err", "verdict")

_CLOSED_FORM_FAILURES = (PoleError, HypergeometricError, OverflowError, ZeroDivisionError)


def _try(fn, *args, **kw) -> float | None:
    try:
        return fn(*args, **kw)
    except _CLOSED_FORM_FAILURES:
        return None


def _radial_closed(bra: QuantumState, ket: QuantumState, s: int, track: str) -> float | None:
    if track == "validated":
        return _try(radial_series, bra, ket, s)
    if bra.label == ket.label and s in (-1, -2, -3, -4):
        return _try(radial_diagonal, bra, s)
    return _try(radial_general, bra, ket, s)


def _angular_closed(bra: QuantumState, ket: QuantumState, t: int, track: str) -> float | None:
    if track == "printed" and bra.label[1:] == ket.label[1:] and t in (1, 2):
        return _try(angular_diagonal_seed, bra.n, bra.k, t)
    return _try(angular_offdiagonal, bra.n, bra.k, ket.n, ket.k, t, printed=(track == "printed"))


def matrix_element(bra: QuantumState, ket: QuantumState, s: int, t: int, track: str = "printed", spec: QuadratureSpec = DEFAULT_SPEC) -> MatrixElement:
    """``<bra| r^s sin^(-2t) theta |ket>`` for equal ``m`` with closed form and oracle.

    The oracle is the product of the radial and polar quadratures (the
    azimuthal factor is 1 for equal ``m``).
    """
    if bra.m != ket.m:
        raise ValueError("matrix elements are evaluated between equal-m states")
    if track not in ("printed", "validated"):
        raise ValueError("track must be 'printed' or 'validated'")
    ang = angular_oracle(bra.n, bra.k, ket.n, ket.k, -t, spec)
    if (bra.n + ket.n) % 2:
        rad_value = 0.0
        rad = IntegralResult(0.0, 0.0, 0, True)
    else:
        rad = radial_oracle(bra, ket, s, spec)
        rad_value = rad.value
    oracle = IntegralResult(
        rad_value * ang.value,
        abs(rad_value) * ang.error_estimate + abs(ang.value) * rad.error_estimate,
        rad.nodes_used + ang.nodes_used,
        rad.converged and ang.converged,
    )
    rc = _radial_closed(bra, ket, s, track)
    ac = _angular_closed(bra, ket, t, track)
    if ac == 0.0:
        closed = 0.0
    elif rc is None or ac is None:
        closed = None
    else:
        closed = rc * ac
    return MatrixElement(bra, ket, s, t, closed, oracle, verdict_for(closed, oracle.value))


def element_table(
    pairs: Iterable[tuple[QuantumState, QuantumState]],
    observables: Sequence[tuple[int, int]],
    track: str = "printed",
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> list[MatrixElement]:
    """All convergent ``(s, t)`` elements for each pair; divergent ones are skipped."""
    out = []
    for bra, ket in pairs:
        for s, t in observables:
            try:
                out.append(matrix_element(bra, ket, s, t, track, spec))
            except DivergentIntegralError:
                continue
    return out


# ---------------------------------------------------------------- potential


def potential_elements(
    bra: QuantumState,
    ket: QuantumState,
    source: str = "oracle",
    printed: bool = False,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> tuple[float, float]:
    """``(<bra|V|ket>, <bra|V^2|ket>)``.

    With ``V = C/r + B/(r^2 sin^2)``:
    ``V^2 = C^2 r^-2 + 2 C B r^-3 sin^-2 + B^2 r^-4 sin^-4``.
    ``source`` selects quadrature (``"oracle"``) or the validated closed
    forms (``"closed_form"``); ``printed`` selects the literature potential
    coefficients instead of the Hamiltonian-consistent ones.
    """
    if bra.model != ket.model:
        raise ValueError("states belong to different models")
    if bra.m != ket.m:
        return 0.0, 0.0
    C, B = bra.model.potential_coefficients(printed)

    def rad(s: int) -> float:
        if source == "oracle":
            res = radial_oracle(bra, ket, s, spec)
            _require(res)
            return res.value
        return radial_series(bra, ket, s)

    def ang(t: int) -> float:
        if (bra.n + ket.n) % 2:
            return 0.0
        if source == "oracle":
            res = angular_oracle(bra.n, bra.k, ket.n, ket.k, -t, spec)
            _require(res)
            return res.value
        return angular_offdiagonal(bra.n, bra.k, ket.n, ket.k, t)

    def term(coef: float, s: int, t: int) -> float:
        if coef == 0.0:
            return 0.0
        a = ang(t)
        return 0.0 if a == 0.0 else coef * rad(s) * a

    V = term(C, -1, 0) + term(B, -2, 1)
    V2 = term(C * C, -2, 0) + term(2.0 * C * B, -3, 1) + term(B * B, -4, 2)
    return V, V2


class OracleFailure(RuntimeError):
    """Quadrature did not reach its tolerance."""


def _require(res: IntegralResult) -> None:
    if not res.converged:
        raise OracleFailure(f"quadrature did not converge (err={res.error_estimate:.3g})")
