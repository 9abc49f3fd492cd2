"""Command-line front end.

Subcommands: ``spectrum``, ``matel``, ``splitting``, ``recurrence-table``,
``verify``. Configuration is a flat ``key = value`` file with ``#``
comments; every key may be overridden by an environment variable
``HARTMANN_<KEY>`` and then by command-line flags.

Exit codes: 0 success (printed-formula mismatches are findings, not
failures), 2 invalid configuration, 3 quadrature non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import sys
from dataclasses import dataclass, fields
from typing import Any, Sequence

from . import __version__
from .gup_perturb import (
    DegenerateBlock,
    ValidityError,
    assemble_block,
    diagonal_check,
    group_by_energy,
    printed_diagonal_p4,
    splitting_closed_form,
    trust_flag,
)
from .matel import (
    ELEMENT_COLUMNS,
    OracleFailure,
    Verdict,
    angular_diagonal_seed,
    angular_offdiagonal,
    angular_oracle,
    element_table,
    radial_diagonal,
    radial_general,
    radial_oracle,
    radial_series,
    verdict_for,
)
from .model import SI, ATOMIC, HartmannModel, ImaginaryKError, UnitSystem, derive_state, scan_states
from .quad_oracle import DivergentIntegralError, QuadratureSpec
from .recurrence import build_angular, build_table
from .specfun import HypergeometricError, PoleError

ENV_PREFIX = "HARTMANN_"
EXIT_CONFIG = 2
EXIT_NONCONVERGED = 3

# k values of the angular verification grid
K_GRID = (0.0, 0.5, 1.0, math.sqrt(2.0), 2.3)


class ConfigError(ValueError):
    pass


class NonConvergence(RuntimeError):
    pass


@dataclass(frozen=True)
class RunConfig:
    mu: float = 1.0
    e2: float = 1.0
    hbar: float = 1.0
    eta: float = 1.0
    sigma: float = 1.0
    q: float = 0.0
    beta: float = 0.0
    units: str = "atomic"
    unit_length: float = 1.0
    unit_energy: float = 1.0
    unit_mass: float = 1.0
    unit_action: float = 1.0
    cap_level: int = 2
    cap_m: int = 1
    s_min: int = -4
    s_max: int = 2
    t_max: int = 3
    abs_tol: float = 1e-13
    rel_tol: float = 1e-11
    max_levels: int = 8
    state: str = "0,0,0"
    track: str = "printed"
    format: str = ""
    out: str = ""
    display: bool = False

    def __post_init__(self):
        if self.cap_level < 0 or self.cap_m < 0:
            raise ConfigError("cap_level and cap_m must be >= 0")
        if self.t_max < 0:
            raise ConfigError("t_max must be >= 0")
        if not self.s_min <= -1 < 0 <= self.s_max:
            raise ConfigError("s_min must be <= -1 and s_max >= 0")
        if self.units not in ("atomic", "SI", "custom"):
            raise ConfigError(f"units must be atomic, SI or custom, got {self.units!r}")
        if self.track not in ("printed", "validated"):
            raise ConfigError("track must be printed or validated")
        if self.format not in ("", "csv", "json", "text"):
            raise ConfigError("format must be csv, json or text")
        self.state_label()

    def state_label(self) -> tuple[int, int, int]:
        try:
            N, n, m = (int(v) for v in self.state.split(","))
        except ValueError:
            raise ConfigError(f"state must be 'N,n,m', got {self.state!r}") from None
        return N, n, m

    def unit_system(self) -> UnitSystem:
        if self.units == "atomic":
            return ATOMIC
        if self.units == "SI":
            return SI
        return UnitSystem("custom", self.unit_length, self.unit_energy, self.unit_mass, self.unit_action)

    def model(self) -> HartmannModel:
        try:
            return HartmannModel(
                self.mu, self.e2, self.hbar, self.eta, self.sigma, self.q, self.beta, self.unit_system()
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def quadrature(self) -> QuadratureSpec:
        try:
            return QuadratureSpec(abs_tol=self.abs_tol, rel_tol=self.rel_tol, max_levels=self.max_levels)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


_FIELDS = {f.name: f for f in fields(RunConfig)}


def _coerce(key: str, raw: str) -> Any:
    kind = _FIELDS[key].type
    raw = raw.strip()
    try:
        if kind == "float":
            return float(raw)
        if kind == "int":
            return int(raw)
        if kind == "bool":
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot read {raw!r} as {kind}") from None
    return raw


def parse_config_text(text: str, source: str = "<config>") -> dict[str, Any]:
    """Parse ``key = value`` lines; errors carry ``source:line``."""
    out: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line.strip()!r}")
        key, value = (part.strip() for part in body.split("=", 1))
        if key not in _FIELDS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            out[key] = _coerce(key, value)
        except ConfigError as exc:
            raise ConfigError(f"{source}:{lineno}: {exc}") from None
    return out


def env_overrides(environ: dict[str, str]) -> dict[str, Any]:
    out = {}
    for name in sorted(environ):
        if not name.startswith(ENV_PREFIX):
            continue
        key = name[len(ENV_PREFIX):].lower()
        if key not in _FIELDS:
            raise ConfigError(f"environment: unknown key {name}")
        try:
            out[key] = _coerce(key, environ[name])
        except ConfigError as exc:
            raise ConfigError(f"environment {name}: {exc}") from None
    return out


def load_config(path: str | None, environ: dict[str, str] | None = None, **flags: Any) -> RunConfig:
    """Defaults, then file, then environment, then non-None ``flags``."""
    values: dict[str, Any] = {}
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"{path}: {exc.strerror}") from None
        values.update(parse_config_text(text, path))
    values.update(env_overrides(dict(os.environ) if environ is None else environ))
    values.update({k: v for k, v in flags.items() if v is not None})
    return RunConfig(**values)


# ---------------------------------------------------------------- output


def _fmt(value: Any, display: bool) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return format(value, ".6g" if display else ".17g")
    return str(value)


def _round(value: Any, display: bool) -> Any:
    if display and isinstance(value, float) and math.isfinite(value):
        return float(format(value, ".6g"))
    return value


def to_csv(columns: Sequence[str], rows: Sequence[dict], display: bool = False) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c), display) for c in columns])
    return buf.getvalue()


def to_json(payload: dict, display: bool = False) -> str:
    def clean(obj):
        if isinstance(obj, dict):
            return {k: clean(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [clean(v) for v in obj]
        if isinstance(obj, float) and not math.isfinite(obj):
            return None
        return _round(obj, display)

    return json.dumps(clean(payload), indent=2, sort_keys=False, allow_nan=False) + "\n"


def _table(command: str, columns: Sequence[str], rows: list[dict], cfg: RunConfig, extra: dict | None = None) -> str:
    fmt = cfg.format or "csv"
    if fmt == "json":
        payload = {"command": command, "columns": list(columns), "rows": [{c: r.get(c) for c in columns} for r in rows]}
        payload.update(extra or {})
        return to_json(payload, cfg.display)
    return to_csv(columns, rows, cfg.display)


# ---------------------------------------------------------------- commands


SPECTRUM_COLUMNS = ("N", "n", "m", "k", "l", "n_prime", "E0", "group")


def cmd_spectrum(cfg: RunConfig) -> str:
    model = cfg.model()
    states = scan_states(model, cfg.cap_level, cfg.cap_m)
    rows = []
    for gid, group in enumerate(group_by_energy(states)):
        for st in group:
            rows.append({"N": st.N, "n": st.n, "m": st.m, "k": st.k, "l": st.l, "n_prime": st.n_prime, "E0": st.E0, "group": gid})
    return _table("spectrum", SPECTRUM_COLUMNS, rows, cfg)


def cmd_matel(cfg: RunConfig) -> str:
    model = cfg.model()
    spec = cfg.quadrature()
    states = sorted(scan_states(model, cfg.cap_level, cfg.cap_m), key=lambda st: st.label)
    pairs = [(a, b) for i, a in enumerate(states) for b in states[i:] if a.m == b.m]
    observables = [(s, t) for s in range(cfg.s_min, cfg.s_max + 1) for t in range(cfg.t_max + 1)]
    elements = element_table(pairs, observables, cfg.track, spec)
    bad = [e for e in elements if not e.oracle.converged]
    if bad:
        e = bad[0]
        raise NonConvergence(f"oracle did not converge for {e.bra}, {e.ket}, s={e.s}, t={e.t}")
    return _table("matel", ELEMENT_COLUMNS, [e.row() for e in elements], cfg, {"track": cfg.track})


SPLITTING_COLUMNS = ("block_id", "E0", "N", "n", "m", "dE_numeric", "dE_printed", "verdict", "validity_flags")


def _splitting_rows(cfg: RunConfig) -> tuple[list[dict], list[dict]]:
    model = cfg.model()
    spec = cfg.quadrature()
    states = scan_states(model, cfg.cap_level, cfg.cap_m)
    energies = sorted({st.E0 for st in states})
    rows: list[dict] = []
    summary: list[dict] = []
    scale = model.beta / model.mu
    for bid, group in enumerate(group_by_energy(states)):
        try:
            block = assemble_block(group, spec)
        except ValidityError as exc:
            for st in group:
                rows.append({"block_id": bid, "E0": st.E0, "N": st.N, "n": st.n, "m": st.m,
                             "verdict": Verdict.UNAVAILABLE.value, "validity_flags": "invalid_k_le_1"})
            summary.append({"block_id": bid, "E0": group[0].E0, "size": len(group), "distinct": None, "status": "invalid", "reason": str(exc)})
            continue
        except OracleFailure as exc:
            raise NonConvergence(f"block {bid}: {exc}") from None
        rows.extend(_block_rows(bid, block, scale, energies))
        distinct = _count_distinct(block.corrections)
        status = "lifted" if distinct == len(group) else ("partially_lifted" if distinct > 1 else "surviving")
        if len(group) == 1:
            status = "nondegenerate"
        summary.append({"block_id": bid, "E0": block.E0, "size": len(group), "distinct": distinct, "status": status})
    return rows, summary


def _count_distinct(values: Sequence[float]) -> int:
    count = 1 if values else 0
    for a, b in zip(values, values[1:]):
        if abs(b - a) > 1e-10 * max(abs(a), abs(b)):
            count += 1
    return count


def _block_rows(bid: int, block: DegenerateBlock, scale: float, energies: list[float]) -> list[dict]:
    mat, vec = block.p4_matrix, block.eigenvectors
    offdiag = max((abs(mat[i, j]) for i in range(mat.shape[0]) for j in range(mat.shape[0]) if i != j), default=0.0)
    diagonal = offdiag <= 1e-12 * max(1.0, abs(mat).max())
    rows = []
    for i, corr in enumerate(block.corrections):
        st = block.states[int(abs(vec[:, i]).argmax())]
        printed = None
        if diagonal:
            try:
                printed = printed_diagonal_p4(st)
            except (PoleError, HypergeometricError, OverflowError, ZeroDivisionError):
                printed = None
        flags = [] if trust_flag(corr, block.E0, energies) else ["first_order_untrusted"]
        rows.append({
            "block_id": bid, "E0": block.E0, "N": st.N, "n": st.n, "m": st.m,
            "dE_numeric": corr,
            "dE_printed": None if printed is None else scale * printed,
            "verdict": verdict_for(printed, block.eigenvalues[i]).value,
            "validity_flags": ";".join(flags) or "ok",
        })
    return rows


def cmd_splitting(cfg: RunConfig, err=sys.stderr) -> str:
    rows, summary = _splitting_rows(cfg)
    for s in summary:
        if s["status"] == "invalid":
            print(f"block {s['block_id']}: {s['reason']}", file=err)
        else:
            print(f"block {s['block_id']} E0={s['E0']:.17g}: {s['size']} states, {s['distinct']} distinct corrections ({s['status']})", file=err)
    return _table("splitting", SPLITTING_COLUMNS, rows, cfg, {"summary": summary})


RADIAL_COLUMNS = ("s", "value", "provenance", "printed_value", "verdict")
ANGULAR_COLUMNS = ("n", "k", "t", "value", "provenance", "printed_value", "verdict")


def cmd_recurrence(cfg: RunConfig) -> dict[str, str]:
    """Returns ``{suffix: text}``; CSV output has one radial and one angular table."""
    model = cfg.model()
    try:
        state = derive_state(model, *cfg.state_label())
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    table = build_table(state, (cfg.s_min, cfg.s_max), cfg.t_max, spec=cfg.quadrature())
    missing = table.nonconverged()
    if missing:
        raise NonConvergence(f"oracle did not converge for cells {missing}")
    if (cfg.format or "csv") == "json":
        payload = {
            "command": "recurrence-table",
            "state": list(state.label),
            "radial": table.radial_rows(),
            "angular": table.angular_rows(),
        }
        return {"": to_json(payload, cfg.display)}
    return {
        "radial": to_csv(RADIAL_COLUMNS, table.radial_rows(), cfg.display),
        "angular": to_csv(ANGULAR_COLUMNS, table.angular_rows(), cfg.display),
    }


# ---------------------------------------------------------------- verify


@dataclass
class _Row:
    formula: str
    key: str
    printed: float | None
    oracle: float
    verdict: str

    @property
    def abs_err(self) -> float | None:
        if self.printed is None or not math.isfinite(self.printed):
            return None
        return abs(self.printed - self.oracle)


CHECK_COLUMNS = ("formula", "key", "printed", "oracle", "abs_err", "verdict")

_CF_ERRORS = (PoleError, HypergeometricError, OverflowError, ZeroDivisionError, ValueError)


def _key(*parts: Any) -> str:
    return "(" + ", ".join(_fmt(float(p), False) if isinstance(p, float) else str(p) for p in parts) + ")"


def _closed(fn, *args) -> float | None:
    try:
        return fn(*args)
    except DivergentIntegralError:
        raise
    except _CF_ERRORS:
        return None


class _Collector:
    def __init__(self):
        self.rows: list[_Row] = []
        self.nonconverged: list[str] = []
        self.parity_zero = 0
        self.parity_total = 0

    def add(self, formula: str, key: str, printed: float | None, res) -> None:
        if not res.converged:
            self.nonconverged.append(f"{formula} {key}")
            return
        self.rows.append(_Row(formula, key, printed, res.value, verdict_for(printed, res.value).value))

    def add_value(self, formula: str, key: str, printed: float | None, oracle: float) -> None:
        self.rows.append(_Row(formula, key, printed, oracle, verdict_for(printed, oracle).value))


def _verify_radial(col: _Collector, states, spec) -> None:
    for st in states:
        for s in (-1, -2, -3, -4):
            try:
                res = radial_oracle(st, st, s, spec)
            except DivergentIntegralError:
                continue
            col.add(f"radial_diagonal_r^{s}", _key(st.N, st.n, st.m), _closed(radial_diagonal, st, s), res)
    for i, a in enumerate(states):
        for b in states[i + 1:]:
            if a.m != b.m or (a.n + b.n) % 2:
                continue
            for s in (-1, -2, -3, -4):
                try:
                    res = radial_oracle(a, b, s, spec)
                except DivergentIntegralError:
                    continue
                key = _key(a.N, a.n, a.m, b.N, b.n, b.m, s)
                col.add("radial_general", key, _closed(radial_general, a, b, s), res)
                col.add("radial_series", key, _closed(radial_series, a, b, s), res)


def _verify_angular(col: _Collector, spec) -> None:
    for k in K_GRID:
        for n1 in range(6):
            for n2 in range(n1, 6):
                for t in (0, 1, 2):
                    try:
                        cf = _closed(angular_offdiagonal, n1, k, n2, k, t, True)
                    except DivergentIntegralError:
                        continue
                    if (n1 + n2) % 2:
                        col.parity_total += 1
                        col.parity_zero += cf == 0.0
                        continue
                    if n1 == n2 or n2 > 3:
                        continue
                    res = angular_oracle(n1, k, n2, k, -t, spec)
                    col.add("angular_offdiagonal", _key(n1, n2, k, t), cf, res)
                    col.add("angular_offdiagonal_corrected", _key(n1, n2, k, t), _closed(angular_offdiagonal, n1, k, n2, k, t), res)
        for n in range(4):
            for t in (1, 2):
                try:
                    cf = _closed(angular_diagonal_seed, n, k, t)
                    res = angular_oracle(n, k, n, k, -t, spec)
                except DivergentIntegralError:
                    continue
                col.add(f"angular_diagonal_5F4_t{t}", _key(n, k), cf, res)


def _verify_recurrence(col: _Collector, states, cfg: RunConfig, spec) -> None:
    for st in states:
        table = build_table(st, (cfg.s_min, cfg.s_max), cfg.t_max, spec=spec)
        col.nonconverged.extend(f"recurrence {st} {key}" for key in table.nonconverged())
        for c in table.checks:
            key = _key(st.N, st.n, st.m, *c.key)
            if c.formula == "eq_A":
                col.add_value("eq_A", key, c.printed, c.oracle)
                col.add_value("eq_A_kramers", key, c.validated, c.oracle)
            elif c.formula.startswith("closed_form"):
                col.add_value("radial_" + c.formula, key, c.printed, c.oracle)
    for k in K_GRID:
        cells, checks = build_angular(4, k, 3, spec=spec)
        col.nonconverged.extend(f"angular {key}" for key, e in cells.items() if e.formula == "oracle_nonconverged")
        for c in checks:
            if c.formula in ("eq_B", "seed_n0", "seed_n1"):
                col.add_value(c.formula, _key(*c.key), c.printed, c.oracle)


def _verify_splitting(col: _Collector, model: HartmannModel, states, spec) -> list[str]:
    notes = []
    try:
        sc = splitting_closed_form(model, spec)
    except ValidityError as exc:
        notes.append(f"splitting example skipped: {exc}")
    except ImaginaryKError as exc:
        notes.append(f"splitting example skipped: {exc}")
    else:
        col.add_value("dE010_printed", _key(0, 1, 0), sc.dE010, sc.numeric010)
        col.add_value("dE100_printed", _key(1, 0, 0), sc.dE100, sc.numeric100)
        col.add_value("p4_offdiagonal_100_010", _key(1, 0, 0, 0, 1, 0), 0.0, sc.offdiagonal)
    for st in states:
        try:
            chk = diagonal_check(st, spec)
        except ValidityError:
            continue
        col.add_value("p4_diagonal_printed", _key(st.N, st.n, st.m), chk.printed_p4, chk.p4)
    return notes


REPORT_NOTES = (
    "potential: V = -eta sigma^2 e^2 / r + hbar^2 (k^2 - m^2) / (2 mu r^2 sin^2 theta)",
    "p^4 elements use the symmetric-energy form 4 mu^2 [E1 E2 d - (E1 + E2) <V> + <V^2>]",
    "angular recurrence: k is a free real parameter of Theta_{n,k}, not tied to m",
    "printed splitting forms: evaluated verbatim with k -> k0 throughout, scaled by beta / mu",
    "verdict: match iff |printed - oracle| <= max(1e-9, 1e-8 |oracle|)",
)


def run_verify(cfg: RunConfig) -> dict:
    model = cfg.model()
    spec = cfg.quadrature()
    states = [st for st in sorted(scan_states(model, cfg.cap_level, cfg.cap_m), key=lambda s: s.label) if st.m >= 0]
    col = _Collector()
    _verify_radial(col, states, spec)
    _verify_angular(col, spec)
    _verify_recurrence(col, states, cfg, spec)
    notes = list(REPORT_NOTES) + _verify_splitting(col, model, states, spec)

    summary: dict[str, dict] = {}
    for r in col.rows:
        s = summary.setdefault(r.formula, {"match": 0, "mismatch": 0, "closed_form_unavailable": 0, "worst_abs_err": 0.0, "worst_key": ""})
        s[r.verdict] += 1
        if r.abs_err is not None and r.abs_err > s["worst_abs_err"]:
            s["worst_abs_err"], s["worst_key"] = r.abs_err, r.key
    findings = [r for r in col.rows if r.verdict == Verdict.MISMATCH.value]
    return {
        "command": "verify",
        "version": __version__,
        # output-only keys are left out so reports depend on inputs alone
        "config": {k: v for k, v in dataclasses.asdict(cfg).items() if k not in ("format", "out", "display")},
        "notes": notes,
        "summary": [{"formula": f, **summary[f]} for f in sorted(summary)],
        "parity": {"odd_pairs": col.parity_total, "exact_zero": col.parity_zero},
        "findings": [_row_dict(r) for r in findings],
        "checks": [_row_dict(r) for r in col.rows],
        "nonconverged": col.nonconverged,
    }


def _row_dict(r: _Row) -> dict:
    return {"formula": r.formula, "key": r.key, "printed": r.printed, "oracle": r.oracle, "abs_err": r.abs_err, "verdict": r.verdict}


def render_report(report: dict, display: bool = False) -> str:
    f = lambda v: _fmt(v, display)  # noqa: E731
    lines = [f"fidelity report (hartmann-gup {report['version']})", ""]
    lines += [f"note: {n}" for n in report["notes"]]
    lines += ["", "config:"]
    lines += [f"  {k} = {f(v)}" for k, v in report["config"].items()]
    lines += ["", f"{'formula':32s} {'match':>6s} {'mismatch':>8s} {'n/a':>5s}  worst_abs_err  worst_key"]
    for s in report["summary"]:
        lines.append(
            f"{s['formula']:32s} {s['match']:6d} {s['mismatch']:8d} {s['closed_form_unavailable']:5d}  "
            f"{f(s['worst_abs_err'])}  {s['worst_key']}"
        )
    p = report["parity"]
    lines += ["", f"parity: {p['exact_zero']} of {p['odd_pairs']} odd n1+n2 angular elements are exactly zero", ""]
    lines.append("findings (printed value disagrees with quadrature):")
    for r in report["findings"]:
        lines.append(f"  {r['formula']} {r['key']}: printed={f(r['printed'])} oracle={f(r['oracle'])} verdict={r['verdict']}")
    if report["nonconverged"]:
        lines += ["", "quadrature did not converge:"] + [f"  {x}" for x in report["nonconverged"]]
    return "\n".join(lines) + "\n"


def cmd_verify(cfg: RunConfig) -> tuple[str, bool]:
    """Report text and whether every oracle converged."""
    report = run_verify(cfg)
    fmt = cfg.format or "text"
    if fmt == "json":
        text = to_json(report, cfg.display)
    elif fmt == "csv":
        text = to_csv(CHECK_COLUMNS, report["checks"], cfg.display)
    else:
        text = render_report(report, cfg.display)
    return text, not report["nonconverged"]


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hartmann-gup", description="Hartmann potential with a minimal-length correction.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--format", choices=("csv", "json", "text"), help="output format")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--tol", type=float, help="relative quadrature tolerance")
    common.add_argument("--display", action="store_true", default=None, help="round floats to 6 significant digits")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("spectrum", "energy levels within the scan caps"),
        ("matel", "matrix elements, closed form against quadrature"),
        ("splitting", "first-order corrections per degenerate block"),
        ("recurrence-table", "radial and angular averages with provenance"),
        ("verify", "fidelity report for every literature formula"),
    ):
        sub.add_parser(name, parents=[common], help=text)
    return parser


def _write(cfg: RunConfig, outputs: dict[str, str], stdout) -> None:
    if not cfg.out:
        stdout.write("\n".join(outputs.values()) if len(outputs) > 1 else next(iter(outputs.values())))
        return
    for suffix, text in outputs.items():
        path = cfg.out
        if suffix:
            root, ext = os.path.splitext(cfg.out)
            path = f"{root}_{suffix}{ext or '.csv'}"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def main(argv: Sequence[str] | None = None, stdout=None, stderr=None, environ=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, environ, format=args.format, out=args.out, rel_tol=args.tol, display=args.display)
        if args.command == "spectrum":
            outputs = {"": cmd_spectrum(cfg)}
        elif args.command == "matel":
            outputs = {"": cmd_matel(cfg)}
        elif args.command == "splitting":
            outputs = {"": cmd_splitting(cfg, stderr)}
        elif args.command == "recurrence-table":
            outputs = cmd_recurrence(cfg)
        else:
            text, ok = cmd_verify(cfg)
            _write(cfg, {"": text}, stdout)
            if not ok:
                print("error: quadrature did not converge; see report", file=stderr)
                return EXIT_NONCONVERGED
            return 0
    except (ConfigError, ImaginaryKError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_CONFIG
    except (NonConvergence, OracleFailure) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_NONCONVERGED
    _write(cfg, outputs, stdout)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
