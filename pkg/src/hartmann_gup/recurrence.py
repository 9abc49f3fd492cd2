"""Tables of diagonal averages ``<r^s>`` and ``<sin^(2t) theta>_{n,k}``.

Radial entries come from three-term recurrences in the power ``s``. Two sets
of coefficients are evaluated side by side:

* ``kramers`` -- Kramers-Pasternack for an effective hydrogenic problem
  with charge ``eta sigma^2`` and angular momentum ``l``:

      (s+1)/n'^2 <r^s> - (2s+1)/c <r^(s-1)> + s/4 ((2l+1)^2 - s^2)/c^2 <r^(s-2)> = 0

  with ``c = mu eta sigma^2 e^2 / hbar^2``;
* ``printed`` -- the literature relation, which lacks the ``(2s+1)`` factor.

The relation has no ``<r^(s-2)>`` term at ``s = 0``, so ``<r^-2>`` cannot be
reached from ``<r^0>`` and ``<r^-1>``; it is seeded from its closed form.

Angular entries treat ``k`` as a free real parameter of the family
``Theta_{n,k}`` (the recurrence steps ``k -> k+1``, which is not another
``m`` of the same model). Seeds at ``n = 0, 1`` and the printed step in
``t`` are all checked against quadrature; a cell whose printed value fails
the check ships the quadrature value instead, with provenance ``oracle``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from .matel import Verdict, angular_oracle, radial_diagonal, radial_oracle, verdict_for
from .model import QuantumState
from .quad_oracle import DEFAULT_SPEC, DivergentIntegralError, QuadratureSpec
from .specfun import lgamma

__all__ = [
    "ZeroCoefficientError",
    "MissingParentError",
    "radial_recurrence_step",
    "radial_recurrence_step_printed",
    "radial_downward_step",
    "radial_downward_step_printed",
    "angular_seed",
    "angular_recurrence_step",
    "Entry",
    "Check",
    "RecurrenceTable",
    "build_table",
    "build_angular",
    "NONCONVERGED",
]


class ZeroCoefficientError(ArithmeticError):
    """The coefficient of the unknown vanishes at this ``s``."""


class MissingParentError(KeyError):
    """A recurrence step needs a table entry that is absent or a gap."""


# ---------------------------------------------------------------- radial steps


def _kp_coefficients(state: QuantumState, s: int) -> tuple[float, float, float]:
    """``(A, B, C)`` with ``A <r^s> + B <r^(s-1)> + C <r^(s-2)> = 0``."""
    c = state.model.inverse_bohr
    return (
        (s + 1) / state.n_prime**2,
        -(2 * s + 1) / c,
        s / 4.0 * ((2 * state.l + 1) ** 2 - s * s) / c**2,
    )


def _printed_coefficients(state: QuantumState, s: int) -> tuple[float, float, float]:
    m = state.model
    a = state.a
    return (
        m.hbar**4 * a * a / (4.0 * m.mu**2 * m.e2**2) * (s + 1),
        -m.hbar * state.n_prime * a / (2.0 * m.mu * m.e2),
        s * ((2 * state.l + 1) ** 2 - s * s) / 4.0,
    )


def _solve_top(coef, lower1: float, lower2: float) -> float:
    A, B, C = coef
    if A == 0.0:
        raise ZeroCoefficientError("coefficient of <r^s> vanishes (s = -1); <r^-1> must be seeded")
    return -(B * lower1 + C * lower2) / A


def _solve_bottom(coef, upper0: float, upper1: float) -> float:
    A, B, C = coef
    if C == 0.0:
        raise ZeroCoefficientError("coefficient of <r^(s-2)> vanishes; seed this power instead")
    return -(A * upper0 + B * upper1) / C


def radial_recurrence_step(state: QuantumState, s: int, lower1: float, lower2: float) -> float:
    """``<r^s>`` from ``<r^(s-1)>`` and ``<r^(s-2)>`` (Kramers-Pasternack)."""
    return _solve_top(_kp_coefficients(state, s), lower1, lower2)


def radial_recurrence_step_printed(state: QuantumState, s: int, lower1: float, lower2: float) -> float:
    """Same step with the literature coefficients."""
    return _solve_top(_printed_coefficients(state, s), lower1, lower2)


def radial_downward_step(state: QuantumState, s: int, upper0: float, upper1: float) -> float:
    """``<r^(s-2)>`` from ``<r^s>`` and ``<r^(s-1)>`` (Kramers-Pasternack)."""
    return _solve_bottom(_kp_coefficients(state, s), upper0, upper1)


def radial_downward_step_printed(state: QuantumState, s: int, upper0: float, upper1: float) -> float:
    return _solve_bottom(_printed_coefficients(state, s), upper0, upper1)


# ---------------------------------------------------------------- angular


def angular_seed(n: int, k: float, t: int) -> float:
    """Printed closed forms for ``<sin^(2t) theta>_{n,k}`` at ``n = 0`` and ``n = 1``.

    The ``n = 0`` form is exact. The ``n = 1`` form gives 6/5 at
    ``k = 0, t = 1`` where direct integration gives 2/5.
    """
    if not k > -0.5:
        raise ValueError("angular seeds need k > -1/2")
    if n == 0:
        return math.exp(
            2 * t * math.log(2.0) + lgamma(2 * k + 2) - lgamma(2 * (k + t + 1)) + 2 * (lgamma(k + t + 1) - lgamma(k + 1))
        )
    if n == 1:
        return (
            2.0 ** (2 * t) * (2 * k + 3) / (2 * k + 2 * t + 3)
            * math.exp(4 * lgamma(2 * k + 1) - lgamma(2 * k + 2) - lgamma(2 * k + 2 * t + 1) + 2 * (lgamma(k + t + 1) - lgamma(k + 1)))
        )
    raise ValueError("angular seeds exist for n = 0 and n = 1 only")


def angular_recurrence_step(
    n: int,
    k: float,
    t: int,
    same: float | None,
    up_next: float | None,
    up_same: float | None,
    down_same: float | None,
) -> float:
    """Printed step giving ``<sin^(2(t+1))>_{n,k}`` from

    ``same = <sin^2t>_{n,k}``, ``up_next = <sin^2(t+1)>_{n-1,k+1}``,
    ``up_same = <sin^2t>_{n-1,k+1}`` and ``down_same = <sin^2t>_{n-1,k}``.
    """
    if n < 1:
        raise ValueError("the angular step needs n >= 1")
    if any(v is None for v in (same, up_next, up_same, down_same)):
        raise MissingParentError("a parent entry is absent or a gap")
    return (
        same
        - 0.25 * (n + 2 * k + 1) * up_next
        - (n + 2 * k + 2) * (n + 2 * k + 1) / (n * (2 * n + 2 * k + 1)) * up_same
        - (n + 2 * k + 2) / ((2 * n + 2 * k + 1) * (2 * n + 2 * k - 1)) * down_same
    )


# ---------------------------------------------------------------- tables


@dataclass
class Entry:
    value: float | None
    provenance: str  # seed | recurrence | oracle | gap
    printed_value: float | None = None
    verdict: Verdict = Verdict.UNAVAILABLE
    oracle: float | None = None
    formula: str = ""


@dataclass(frozen=True)
class Check:
    """One evaluation of a printed formula against quadrature."""

    formula: str
    key: tuple
    printed: float | None
    oracle: float
    verdict: Verdict
    validated: float | None = None


@dataclass
class RecurrenceTable:
    state: QuantumState
    radial: dict[int, Entry] = field(default_factory=dict)
    angular: dict[tuple[int, float, int], Entry] = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)

    def combined(self, p: int, t: int) -> float | None:
        """``<r^p sin^(2t) theta>`` for the table's own state (separable)."""
        r = self.radial.get(p)
        a = self.angular.get((self.state.n, self.state.k, t))
        if r is None or a is None or r.value is None or a.value is None:
            return None
        return r.value * a.value

    def radial_rows(self) -> list[dict]:
        return [
            {"s": s, "value": e.value, "provenance": e.provenance, "printed_value": e.printed_value, "verdict": e.verdict.value}
            for s, e in sorted(self.radial.items())
        ]

    def angular_rows(self) -> list[dict]:
        return [
            {"n": n, "k": k, "t": t, "value": e.value, "provenance": e.provenance, "printed_value": e.printed_value, "verdict": e.verdict.value}
            for (n, k, t), e in sorted(self.angular.items())
        ]

    def nonconverged(self) -> list[tuple]:
        """Keys of gaps caused by quadrature missing its tolerance."""
        out: list[tuple] = [(s,) for s, e in self.radial.items() if e.formula == NONCONVERGED]
        return out + [key for key, e in self.angular.items() if e.formula == NONCONVERGED]


_TRUST_RTOL = 1e-8
# formula tag of a gap left by quadrature that missed its tolerance
NONCONVERGED = "oracle_nonconverged"


def _agrees(value: float | None, reference: float) -> bool:
    return value is not None and math.isfinite(value) and abs(value - reference) <= max(1e-12, _TRUST_RTOL * abs(reference))


def _safe(fn, *args):
    try:
        return fn(*args)
    except (ZeroCoefficientError, MissingParentError, OverflowError, ValueError):
        return None


def _radial_cells(table: RecurrenceTable, s_lo: int, s_hi: int, spec: QuadratureSpec) -> None:
    st = table.state
    vals: dict[int, float | None] = {}
    nonconverged: set[int] = set()

    def oracle(s: int) -> float | None:
        try:
            res = radial_oracle(st, st, s, spec)
        except DivergentIntegralError:
            return None
        if not res.converged:
            nonconverged.add(s)
            return None
        return res.value

    def record(s: int, validated: float | None, printed: float | None, formula: str, provenance: str) -> None:
        ref = oracle(s)
        if ref is None:
            tag = NONCONVERGED if s in nonconverged else formula
            table.radial[s] = Entry(None, "gap", printed, Verdict.UNAVAILABLE, None, tag)
            vals[s] = None
            return
        verdict = verdict_for(printed, ref)
        table.checks.append(Check(formula, (s,), printed, ref, verdict, validated if formula == "eq_A" else None))
        if _agrees(validated, ref):
            table.radial[s] = Entry(validated, provenance, printed, verdict, ref, formula)
        else:
            table.radial[s] = Entry(ref, "oracle", printed, verdict, ref, formula)
        vals[s] = table.radial[s].value

    def printed_diag(s: int) -> float | None:
        try:
            return radial_diagonal(st, s)
        except (DivergentIntegralError, ValueError, OverflowError):
            return None

    record(0, 1.0, 1.0, "normalization", "seed")
    record(-1, printed_diag(-1), printed_diag(-1), "closed_form_r^-1", "seed")
    if s_lo <= -2:
        record(-2, printed_diag(-2), printed_diag(-2), "closed_form_r^-2", "seed")

    for s in range(1, s_hi + 1):
        lo1, lo2 = vals.get(s - 1), vals.get(s - 2)
        if lo1 is None or lo2 is None:
            table.radial[s] = Entry(None, "gap")
            vals[s] = None
            continue
        record(s, _safe(radial_recurrence_step, st, s, lo1, lo2), _safe(radial_recurrence_step_printed, st, s, lo1, lo2), "eq_A", "recurrence")

    for target in range(-3, s_lo - 1, -1):
        top = target + 2
        up0, up1 = vals.get(top), vals.get(top - 1)
        if up0 is None or up1 is None or not target > -(2 * st.l + 3):
            table.radial[target] = Entry(None, "gap")
            vals[target] = None
            continue
        record(
            target,
            _safe(radial_downward_step, st, top, up0, up1),
            _safe(radial_downward_step_printed, st, top, up0, up1),
            "eq_A",
            "recurrence",
        )
        # the closed forms at -3, -4 are an extra check on the chain
        cf = printed_diag(target) if target >= -4 else None
        if cf is not None and table.radial[target].oracle is not None:
            table.checks.append(Check(f"closed_form_r^{target}", (target,), cf, table.radial[target].oracle, verdict_for(cf, table.radial[target].oracle)))

    for s in range(s_lo, s_hi + 1):
        table.radial.setdefault(s, Entry(None, "gap"))
    table.radial = {s: table.radial[s] for s in range(s_lo, s_hi + 1)}


def build_angular(
    n_max: int,
    k: float,
    t_max: int,
    t_min: int = 0,
    spec: QuadratureSpec = DEFAULT_SPEC,
    table: RecurrenceTable | None = None,
) -> tuple[dict[tuple[int, float, int], Entry], list[Check]]:
    """Angular cells ``(n, k + i, t)`` for ``n <= n_max``, ``i <= n_max - n``.

    The ``k + i`` columns are exactly the parents the printed step needs.
    """
    # cells keyed by the integer shift i of k; converted to k + i at the end
    cells: dict[tuple[int, int, int], Entry] = {}
    checks: list[Check] = []

    def oracle(n: int, kk: float, t: int) -> float | None:
        try:
            res = angular_oracle(n, kk, n, kk, t, spec)
        except DivergentIntegralError:
            return None
        if not res.converged:
            return NONCONVERGED
        return res.value

    def val(n: int, i: int, t: int) -> float | None:
        e = cells.get((n, i, t))
        return None if e is None else e.value

    for n in range(n_max + 1):
        for i in range(n_max - n + 1):
            kk = k + i
            for t in range(t_min, t_max + 1):
                key = (n, kk, t)
                ref = oracle(n, kk, t)
                if ref is None or ref == NONCONVERGED:
                    cells[n, i, t] = Entry(None, "gap", formula=ref or "")
                    continue
                if t == 0:
                    cells[n, i, t] = Entry(1.0, "seed", 1.0, verdict_for(1.0, ref), ref, "normalization")
                    continue
                step = None
                if n >= 1 and t >= 1:
                    step = _safe(
                        angular_recurrence_step, n, kk, t - 1,
                        val(n, i, t - 1), val(n - 1, i + 1, t), val(n - 1, i + 1, t - 1), val(n - 1, i, t - 1),
                    )
                    checks.append(Check("eq_B", key, step, ref, verdict_for(step, ref)))
                if n <= 1:
                    printed = _safe(angular_seed, n, kk, t)
                    formula, provenance = f"seed_n{n}", "seed"
                    checks.append(Check(formula, key, printed, ref, verdict_for(printed, ref)))
                elif t >= 1:
                    printed, formula, provenance = step, "eq_B", "recurrence"
                else:
                    printed, formula, provenance = None, "", "oracle"
                verdict = verdict_for(printed, ref)
                if _agrees(printed, ref):
                    cells[n, i, t] = Entry(printed, provenance, printed, verdict, ref, formula)
                else:
                    cells[n, i, t] = Entry(ref, "oracle", printed, verdict, ref, formula)
    return {(n, k + i, t): e for (n, i, t), e in cells.items()}, checks


def build_table(
    state: QuantumState,
    s_range: tuple[int, int] = (-4, 2),
    t_max: int = 3,
    t_min: int = 0,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> RecurrenceTable:
    """Radial and angular tables for ``state``; every cell carries provenance.

    Cells where the defining integral diverges are gaps (``value is None``).
    """
    s_lo, s_hi = s_range
    if s_lo > -1 or s_hi < 0:
        raise ValueError("s_range must include -1 and 0 (the seeds)")
    table = RecurrenceTable(state)
    _radial_cells(table, s_lo, s_hi, spec)
    cells, checks = build_angular(state.n, state.k, t_max, t_min, spec)
    table.angular = cells
    table.checks.extend(checks)
    return table
