"""First-order energy shifts from the minimal-length term ``beta p^4 / mu``.

On an eigenstate ``p^2 psi = 2 mu (E0 - V) psi``, so

    <1|p^4|2> = 4 mu^2 [E1 E2 <1|2> - (E1 + E2) <1|V|2> + <1|V^2|2>]

which is symmetric in bra and ket. Inside a degenerate block it equals the
``-2 E <V>`` form. ``<V>`` and ``<V^2>`` come from quadrature.

``<V^2>`` contains ``<sin^-4 theta>``, which diverges for ``k <= 1``. When
the ring term is present such states raise :class:`ValidityError` instead of
returning a number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .matel import Verdict, potential_elements, verdict_for
from .model import DEGENERACY_RTOL, HartmannModel, QuantumState, derive_state
from .quad_oracle import DEFAULT_SPEC, QuadratureSpec
from .specfun import HypergeometricError, LogProduct, PoleError, hypergeometric_pfq, lgamma

__all__ = [
    "ValidityError",
    "check_validity",
    "p4_element",
    "jacobi_eigh",
    "DegenerateBlock",
    "group_by_energy",
    "assemble_block",
    "block_for_energy",
    "degenerate_blocks",
    "SplittingClosedForm",
    "splitting_closed_form",
    "printed_diagonal_p4",
    "DiagonalCheck",
    "diagonal_check",
    "diagonal_correction",
    "trust_flag",
    "TRUST_FRACTION",
]

TRUST_FRACTION = 0.1


class ValidityError(ValueError):
    """First-order theory is undefined: ``<sin^-4 theta>`` diverges (k <= 1 with a ring term)."""


def check_validity(state: QuantumState) -> None:
    _, ring = state.model.potential_coefficients()
    if ring != 0.0 and state.k <= 1.0:
        raise ValidityError(
            f"state {state}: k = {state.k:.6g} <= 1 with q = {state.model.q}; "
            "<sin^-4 theta> diverges, no first-order correction exists"
        )


def p4_element(bra: QuantumState, ket: QuantumState, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """``<bra|p^4|ket>`` in the symmetric-energy form."""
    check_validity(bra)
    check_validity(ket)
    if bra.m != ket.m:
        return 0.0
    mu = bra.model.mu
    V, V2 = potential_elements(bra, ket, spec=spec)
    overlap = 1.0 if bra.label == ket.label else 0.0
    return 4.0 * mu * mu * (bra.E0 * ket.E0 * overlap - (bra.E0 + ket.E0) * V + V2)


# ---------------------------------------------------------------- eigen-solver


def jacobi_eigh(a, tol: float = 1e-15, max_sweeps: int = 50) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi diagonalization of a real symmetric matrix.

    Returns eigenvalues in ascending order and the matching eigenvectors as
    columns.
    """
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("need a square matrix")
    if not np.allclose(a, a.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(a).max(initial=0.0))):
        raise ValueError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    v = np.eye(n)
    scale = np.linalg.norm(a)
    for _ in range(max_sweeps):
        off = math.sqrt(sum(a[i, j] ** 2 for i in range(n) for j in range(n) if i != j))
        if off <= tol * scale or off == 0.0:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(1.0, theta))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q], rot[q, p] = s, -s
                a = rot.T @ a @ rot
                v = v @ rot
    else:
        raise ArithmeticError("Jacobi iteration did not converge")
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


# ---------------------------------------------------------------- blocks


@dataclass(frozen=True)
class DegenerateBlock:
    states: tuple[QuantumState, ...]
    p4_matrix: np.ndarray = field(repr=False)
    eigenvalues: tuple[float, ...]
    corrections: tuple[float, ...]
    eigenvectors: np.ndarray = field(repr=False)

    @property
    def E0(self) -> float:
        return self.states[0].E0

    @property
    def lifted(self) -> bool:
        """True when all corrections are pairwise distinct (relative 1e-10)."""
        c = self.corrections
        return all(
            abs(c[i + 1] - c[i]) > 1e-10 * max(abs(c[i]), abs(c[i + 1])) for i in range(len(c) - 1)
        )


def group_by_energy(states, rtol: float = DEGENERACY_RTOL) -> list[tuple[QuantumState, ...]]:
    """Partition ``states`` into groups sharing ``E0``; each group sorted by label."""
    ordered = sorted(states, key=lambda st: (st.E0, st.label))
    groups: list[list[QuantumState]] = []
    for st in ordered:
        if groups and abs(st.E0 - groups[-1][0].E0) <= rtol * abs(groups[-1][0].E0):
            groups[-1].append(st)
        else:
            groups.append([st])
    return [tuple(sorted(g, key=lambda st: st.label)) for g in groups]


def assemble_block(states: tuple[QuantumState, ...], spec: QuadratureSpec = DEFAULT_SPEC) -> DegenerateBlock:
    """p^4 matrix and its eigen-decomposition for states already known to be degenerate."""
    for st in states:
        check_validity(st)
    n = len(states)
    mat = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            mat[i, j] = mat[j, i] = p4_element(states[i], states[j], spec)
    eig, vec = jacobi_eigh(mat)
    model = states[0].model
    corr = tuple(float(model.beta / model.mu * e) for e in eig)
    mat.setflags(write=False)
    vec.setflags(write=False)
    return DegenerateBlock(tuple(states), mat, tuple(float(e) for e in eig), corr, vec)


def block_for_energy(
    model: HartmannModel,
    states,
    energy: float | None = None,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> DegenerateBlock:
    """Block of the candidates degenerate with ``energy`` (default: the first candidate's)."""
    states = list(states)
    if not states:
        raise ValueError("no candidate states")
    if any(st.model != model for st in states):
        raise ValueError("candidate states belong to a different model")
    e = states[0].E0 if energy is None else energy
    members = tuple(sorted((st for st in states if abs(st.E0 - e) <= DEGENERACY_RTOL * abs(e)), key=lambda st: st.label))
    if not members:
        raise ValueError(f"no candidate state has E0 = {e}")
    return assemble_block(members, spec)


def degenerate_blocks(model: HartmannModel, states, spec: QuadratureSpec = DEFAULT_SPEC) -> list[DegenerateBlock | ValidityError]:
    """One entry per energy group; groups failing the validity guard yield the error."""
    out: list[DegenerateBlock | ValidityError] = []
    for group in group_by_energy(states):
        try:
            out.append(assemble_block(group, spec))
        except ValidityError as exc:
            out.append(exc)
    return out


def trust_flag(correction: float, energy: float, other_energies, fraction: float = TRUST_FRACTION) -> bool:
    """False when ``|correction|`` exceeds ``fraction`` of the gap to the nearest other level."""
    gaps = [abs(e - energy) for e in other_energies if abs(e - energy) > DEGENERACY_RTOL * abs(energy)]
    if not gaps:
        return True
    return abs(correction) <= fraction * min(gaps)


# ---------------------------------------------------------------- literature closed forms


def _g2(x: float) -> float:
    return math.exp(2.0 * lgamma(x))


def _ratio(two_pow: float, gam_sq_arg: float, gam_den_arg: float) -> float:
    """``2^two_pow Gamma(gam_sq_arg)^2 / Gamma(gam_den_arg)``."""
    acc = LogProduct()
    acc.log_abs += two_pow * math.log(2.0)
    acc.mul_gamma(gam_sq_arg, 2).mul_gamma(gam_den_arg, -1)
    return acc.value()


def _printed_b(n: int, k: float) -> float:
    return math.exp(2.0 * (lgamma(2 * k + 1) - lgamma(k + 1)) - (2 * k + 1) * math.log(2.0) - lgamma(n + 2 * k + 1)) * (
        2 * n + 2 * k + 1
    )


@dataclass(frozen=True)
class SplittingClosedForm:
    """Literature ``<p^4>`` for the ``|010>``/``|100>`` pair next to the numeric values.

    ``dE010`` and ``dE100`` hold the bracketed expressions (``<p^4>``); the
    energy shifts are ``beta / mu`` times these.
    """

    A: float
    B: float
    a: float
    b010: float
    b100: float
    k0: float
    E0: float
    dE010: float
    dE100: float
    numeric010: float
    numeric100: float
    offdiagonal: float
    verdict010: Verdict
    verdict100: Verdict


def splitting_closed_form(model: HartmannModel, spec: QuadratureSpec = DEFAULT_SPEC) -> SplittingClosedForm:
    k0 = model.k0
    if not k0 > 1.0:
        raise ValidityError(f"k0 = {k0:.6g} <= 1: the printed splitting and <sin^-4> are undefined")
    s010 = derive_state(model, 0, 1, 0)
    s100 = derive_state(model, 1, 0, 0)
    mu, hbar = model.mu, model.hbar
    A = model.coupling * model.e2
    B = model.eta * model.q * model.sigma**2 * hbar**2 / (2.0 * mu)
    npr = 2.0 + k0
    a = 2.0 * mu * model.coupling * model.e2 / (hbar**2 * npr)
    E = -mu * model.coupling**2 * model.e2**2 / (2.0 * hbar**2) / npr**2
    b1, b0 = _printed_b(1, k0), _printed_b(0, k0)
    k = k0
    r = _ratio

    d010 = 4 * mu**2 * (
        E**2
        - a * b1 * A * E * (2 * k + 1) ** 2 / (k + 2) * (r(2 * k + 1, k + 1, 2 * k + 2) - r(2 * k + 3, k + 2, 2 * k + 4))
        - a**2 * b1 * B * E * (2 * k + 1) ** 2 / ((k + 2) * (2 * k + 3)) * (r(2 * k - 1, k, 2 * k) - r(2 * k + 1, k + 1, 2 * k + 2))
        + a**2 * b1 * A**2 * (2 * k + 1) ** 2 / (2 * (k + 2) * (2 * k + 3)) * (r(2 * k + 1, k + 1, 2 * k + 2) - r(2 * k + 3, k + 2, 2 * k + 4))
        + a**4 * b1 * B**2 * (2 * k + 1) / (2 * (k + 2) * (2 * k + 3) * (2 * k + 2)) * (r(2 * k - 1, k - 1, 2 * k - 2) - r(2 * k + 1, k, 2 * k))
        + a**3 * b1 * A * B * (2 * k + 1) ** 2 / ((k + 2) * (2 * k + 3) * (2 * k + 2)) * (r(2 * k - 1, k, 2 * k) - r(2 * k + 1, k + 1, 2 * k + 2))
    )
    d100 = 4 * mu**2 * (
        E**2
        - a * b0 * A * E / (2 + k) * r(2 * k + 1, k + 1, 2 * k + 2)
        - a**2 * b0 * B * E * r(2 * k - 1, k, 2 * k) / ((2 + k) * (2 * k + 1))
        + a**2 * b0 * A**2 * r(2 * k, k + 1, 2 * k + 2) / ((2 + k) * (2 * k + 1))
        + a**4 * b0 * B**2 * 2 ** (2 * k - 3) * (2 * k - 2) * (4 + k) * _g2(k - 1) / ((2 + k) * (2 * k + 3))
        + a**3 * b0 * A * B * r(2 * k, k, 2 * k + 3)
    )
    n010 = p4_element(s010, s010, spec)
    n100 = p4_element(s100, s100, spec)
    off = p4_element(s100, s010, spec)
    return SplittingClosedForm(
        A, B, a, b1, b0, k0, E, d010, d100, n010, n100, off, verdict_for(d010, n010), verdict_for(d100, n100)
    )


@dataclass(frozen=True)
class DiagonalCheck:
    state: QuantumState
    p4: float
    correction: float
    printed_p4: float | None
    verdict: Verdict


def printed_diagonal_p4(state: QuantumState) -> float:
    """Literature closed form for the diagonal ``<p^4>`` (report only)."""
    m = state.model
    mu, hbar, a, npr, l, n, k = m.mu, m.hbar, state.a, state.n_prime, state.l, state.n, state.k
    inner = hbar**2 / (8 * mu) * (hbar**2 / 2 + npr / (2 * l + 1))
    if m.q != 0.0:
        common = LogProduct()
        common.log_abs -= 2.0 * lgamma(n + 1)
        common.mul(math.pi * (2 * n + 2 * k + 1)).mul_gamma(k + 1, -2).mul_gamma(n + 2 * k + 1)

        t1 = LogProduct(common.log_abs, common.sign, common.zero)
        t1.log_abs -= (4 * k - 2) * math.log(2.0)
        t1.mul_gamma(2 * k - 3).mul_gamma(k - 1.5, -1).mul_gamma(k - 0.5, -1)
        f1 = hypergeometric_pfq((-n, k + 0.5, n + 2 * k + 1, k - 0.5, k), (k + 1, 2 * k + 1, k - 0.5, k + 0.5), 1.0)
        radial1 = 1.0 / (2 * npr * (2 * l + 1)) + 4 * npr * math.exp(lgamma(2 * l) - lgamma(2 * l + 3))
        inner += m.eta * m.q * m.sigma**2 * hbar**4 / mu * radial1 * t1.value() * f1

        t2 = LogProduct(common.log_abs, common.sign, common.zero)
        t2.log_abs -= (4 * k + 2) * math.log(2.0)
        t2.mul_gamma(2 * k - 1).mul_gamma(k - 0.5, -1).mul_gamma(k + 0.5, -1)
        f2 = hypergeometric_pfq((-n, k + 0.5, n + 2 * k + 1, k - 1.5, k - 1), (k + 1, 2 * k + 1, k - 1.5, k - 0.5), 1.0)
        radial2 = (3 * npr**2 - l * (l + 1)) * math.exp(lgamma(2 * l - 1) - lgamma(2 * l + 4)) / npr
        inner += m.eta**2 * m.q**2 * m.sigma**4 * hbar**4 / mu * radial2 * t2.value() * f2
    # printed: beta/(4 mu) <p^4> = beta a^4 / n'^8 {inner}
    return 4 * mu * a**4 / npr**8 * inner


def diagonal_check(state: QuantumState, spec: QuadratureSpec = DEFAULT_SPEC) -> DiagonalCheck:
    p4 = p4_element(state, state, spec)
    try:
        printed = printed_diagonal_p4(state)
    except (PoleError, HypergeometricError, OverflowError, ZeroDivisionError):
        printed = None
    corr = state.model.beta / state.model.mu * p4
    return DiagonalCheck(state, p4, corr, printed, verdict_for(printed, p4))


def diagonal_correction(state: QuantumState, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """``(beta / mu) <p^4>`` for one state (numeric path)."""
    return diagonal_check(state, spec).correction
