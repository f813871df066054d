"""Scenario configuration, orchestration and deterministic CSV/JSON emission."""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .longrun import Mode, solve_longrun_effective, spatial_profile
from .params import AvEffects, CityParameters, ParameterError, SolverError, apply_av_effects
from .perimeter import controlled_trajectory, queue_profile, solve_perimeter
from .shortrun import build_trajectory, solve_shortrun

RUN_KINDS = ("shortrun", "perimeter", "longrun", "tables", "sensitivity", "bias-sweep",
             "trajectory")

CASES = (
    ("Base", 1.0, 1.0),
    ("Case I", 0.59, 1.029),
    ("Case II", 0.76, 1.19),
)

# Reference values per case: short run (C_b, C_bp, ratio) and long run (N_s, C_b, U, N_s_p, C_bp, U_p).
REFERENCE_SHORTRUN = {
    "Base": (39.8, 30.1, 0.76),
    "Case I": (54.8, 26.9, 0.49),
    "Case II": (34.9, 24.8, 0.71),
}
REFERENCE_LONGRUN = {
    "Base": (224.0, 27.8, 4.594, 252.2, 26.3, 4.684),
    "Case I": (221.2, 31.4, 4.586, 305.5, 27.4, 4.883),
    "Case II": (256.6, 28.1, 4.699, 308.1, 25.4, 4.894),
}
TABLE1_COLUMNS = ("case", "eta", "xi", "C_b", "C_bp", "ratio", "status")
TABLE2_COLUMNS = ("case", "eta", "xi", "N_s", "C_b", "U", "N_s_p", "C_bp", "U_p", "status")
DIFF_COLUMNS = ("table", "case", "column", "computed", "reference", "abs_deviation")


class ConfigError(ParameterError):
    """Malformed or out-of-range scenario configuration."""


@dataclass(frozen=True)
class ScenarioConfig:
    v_f: float = 20.0
    n_j: float = 100.0
    L: float = 5.0
    T_d: float = 1.0 / 12.0
    alpha: float = 20.0
    beta: float = 10.0
    gamma: float = 40.0
    t_star: float = 0.0
    w: float = 60.0
    r_A: float = 30.0
    mu: float = 0.25
    A_d: float = 2.0
    A_s: float = 1.0
    N: float = 600.0
    eta: float = 1.0
    xi: float = 1.0
    mode: str = "UE"
    epsilon: float = 1.0
    run: str = "tables"
    N_s_fixed: float = 300.0
    grid: int = 2001
    eta_grid: tuple = (0.55, 1.0, 10)
    xi_grid: tuple = (1.0, 1.3, 4)
    epsilons: tuple = (0.7, 1.0, 1.3)
    out: str = "out"
    format: str = "csv"
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.mode not in ("UE", "perimeter"):
            raise ConfigError(f"mode must be UE or perimeter, got {self.mode!r}")
        if self.run not in RUN_KINDS:
            raise ConfigError(f"run must be one of {RUN_KINDS}, got {self.run!r}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        if self.grid < 3:
            raise ConfigError("grid must be at least 3 points")
        if self.N_s_fixed < 0:
            raise ConfigError("N_s_fixed must be nonnegative")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")
        for name in ("eta_grid", "xi_grid"):
            lo, hi, steps = getattr(self, name)
            if int(steps) < 1 or (int(steps) == 1 and lo != hi) or hi < lo:
                raise ConfigError(f"{name} must be lo:hi:steps with lo <= hi, steps >= 1")
        if not self.epsilons or any(not 0.0 < e < 2.0 for e in self.epsilons):
            raise ConfigError("every epsilon must lie in (0, 2)")
        lower = self.beta / self.alpha
        if self.eta_grid[0] <= lower:
            raise ConfigError(f"eta grid must stay above beta/alpha = {lower:g}")
        # Surface parameter violations before any computation.
        self.effective()
        if self.mode == "perimeter" and not 0.0 < self.epsilon < 2.0:
            raise ConfigError("epsilon must lie in (0, 2)")

    def city(self) -> CityParameters:
        names = [f.name for f in fields(CityParameters)]
        return CityParameters(**{name: getattr(self, name) for name in names})

    def av(self) -> AvEffects:
        return AvEffects(self.eta, self.xi)

    def effective(self, eta: float | None = None, xi: float | None = None):
        return apply_av_effects(self.city(), AvEffects(self.eta if eta is None else eta,
                                                       self.xi if xi is None else xi))

    def long_mode(self) -> Mode:
        return Mode.ue() if self.mode == "UE" else Mode.perimeter(self.epsilon)


# -- config text format -------------------------------------------------------

_INT_KEYS = {"grid", "jobs"}
_RANGE_KEYS = {"eta_grid", "xi_grid"}
_LIST_KEYS = {"epsilons"}
_STR_KEYS = {"mode", "run", "out", "format"}


def parse_range(text: str) -> tuple:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"range must look like a:b:steps, got {text!r}")
    try:
        return (float(parts[0]), float(parts[1]), int(parts[2]))
    except ValueError as exc:
        raise ConfigError(f"bad range {text!r}") from exc


def parse_list(text: str) -> tuple:
    try:
        return tuple(float(item) for item in text.replace(" ", "").split(",") if item)
    except ValueError as exc:
        raise ConfigError(f"bad number list {text!r}") from exc


def _coerce(key: str, raw: str) -> Any:
    if key in _RANGE_KEYS:
        return parse_range(raw)
    if key in _LIST_KEYS:
        return parse_list(raw)
    if key in _INT_KEYS:
        try:
            return int(raw)
        except ValueError as exc:
            raise ConfigError(f"{key} must be an integer, got {raw!r}") from exc
    if key in _STR_KEYS:
        return raw
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{key} must be a number, got {raw!r}") from exc


def parse_config(text: str, base: ScenarioConfig | None = None) -> ScenarioConfig:
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    known = {f.name for f in fields(ScenarioConfig)}
    values: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = _coerce(key, raw)
    try:
        return replace(base or ScenarioConfig(), **values)
    except ParameterError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path, base: ScenarioConfig | None = None) -> ScenarioConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"), base)


def _emit_value(value: Any) -> str:
    if isinstance(value, tuple) and len(value) == 3 and isinstance(value[2], int):
        return f"{value[0]!r}:{value[1]!r}:{value[2]}"
    if isinstance(value, tuple):
        return ",".join(repr(float(v)) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_config(cfg: ScenarioConfig) -> str:
    lines = ["# hypercity scenario"]
    for f in fields(ScenarioConfig):
        lines.append(f"{f.name} = {_emit_value(getattr(cfg, f.name))}")
    return "\n".join(lines) + "\n"


# -- tables and emission ------------------------------------------------------

@dataclass
class Table:
    name: str
    columns: Sequence[str]
    rows: list = field(default_factory=list)

    def records(self) -> list[dict]:
        return [dict(zip(self.columns, row)) for row in self.rows]


def _csv_cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return ""
        text = f"{value:.6f}"
        return "0.000000" if text == "-0.000000" else text
    if value is None:
        return ""
    return str(value)


def to_csv(table: Table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def _json_value(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return "null"
        return format(value, ".17g")
    if value is None:
        return "null"
    if isinstance(value, dict):
        inner = ", ".join(f"{_json_string(k)}: {_json_value(v)}" for k, v in value.items())
        return "{" + inner + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_json_value(v) for v in value) + "]"
    return _json_string(str(value))


def _json_string(text: str) -> str:
    return json.dumps(text, ensure_ascii=False)


def to_json(payload: Any) -> str:
    if isinstance(payload, Table):
        payload = payload.records()
    return _json_value(payload) + "\n"


def write_outputs(tables: Iterable[Table], out: str | Path, fmt: str) -> list[Path]:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for table in tables:
        path = out / f"{table.name}.{fmt}"
        text = to_csv(table) if fmt == "csv" else to_json(table)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        written.append(path)
    return written


def grid_values(spec: tuple) -> list[float]:
    lo, hi, steps = spec
    if int(steps) == 1:
        return [float(lo)]
    return [float(v) for v in np.linspace(lo, hi, int(steps))]


# -- runners ------------------------------------------------------------------

def run_shortrun(cfg: ScenarioConfig) -> list[Table]:
    p = cfg.effective()
    eq = solve_shortrun(cfg.N_s_fixed, p)
    table = Table("shortrun", ("N_s", "eta", "xi", "theta", "cost", "t_s", "t_e", "n_peak",
                               "hypercongested"))
    table.rows.append((eq.N_s, cfg.eta, cfg.xi, eq.theta, eq.cost, eq.t_s, eq.t_e, eq.n_peak,
                       eq.hypercongested))
    return [table]


def run_perimeter(cfg: ScenarioConfig) -> list[Table]:
    p = cfg.effective()
    ue = solve_shortrun(cfg.N_s_fixed, p)
    eq = solve_perimeter(cfg.N_s_fixed, p, cfg.epsilon)
    queue = queue_profile(eq, p, cfg.grid)
    peak = float(queue.q.max()) if queue.q.size else 0.0
    table = Table("perimeter", ("N_s", "eta", "xi", "epsilon", "theta_p", "cost", "I_p", "t_s",
                                "t_s_p", "t_e_p", "t_e", "binding", "peak_queue", "ue_cost",
                                "ratio"))
    table.rows.append((eq.N_s, cfg.eta, cfg.xi, eq.epsilon, eq.theta_p, eq.cost, eq.I_p, eq.t_s,
                       eq.t_s_p, eq.t_e_p, eq.t_e, eq.binding, peak, ue.cost,
                       eq.cost / ue.cost))
    return [table]


LONGRUN_COLUMNS = ("mode", "N_d", "N_s_total", "r_s0", "r_d", "x_f", "U_star", "C_bathtub",
                   "z_d", "z_s0")


def run_longrun(cfg: ScenarioConfig) -> list[Table]:
    p = cfg.effective()
    eq = solve_longrun_effective(p, cfg.long_mode())
    summary = Table("longrun_summary", LONGRUN_COLUMNS)
    summary.rows.append(tuple(getattr(eq, c) for c in LONGRUN_COLUMNS))
    prof = spatial_profile(eq, p, cfg.grid)
    profile = Table("spatial_profile", prof.columns, list(prof.rows()))
    return [summary, profile]


def _table_rows(cfg: ScenarioConfig) -> tuple[Table, Table]:
    t1 = Table("table1", TABLE1_COLUMNS)
    t2 = Table("table2", TABLE2_COLUMNS)
    for name, eta, xi in CASES:
        try:
            p = cfg.effective(eta, xi)
            c_b = solve_shortrun(cfg.N_s_fixed, p).cost
            c_bp = solve_perimeter(cfg.N_s_fixed, p, 1.0).cost
            t1.rows.append((name, eta, xi, c_b, c_bp, c_bp / c_b, "ok"))
        except (ParameterError, SolverError) as exc:
            t1.rows.append((name, eta, xi, None, None, None, f"error: {exc}"))
        try:
            p = cfg.effective(eta, xi)
            ue = solve_longrun_effective(p, Mode.ue())
            pc = solve_longrun_effective(p, Mode.perimeter(1.0))
            t2.rows.append((name, eta, xi, ue.N_s_total, ue.C_bathtub, ue.U_star,
                            pc.N_s_total, pc.C_bathtub, pc.U_star, "ok"))
        except (ParameterError, SolverError) as exc:
            t2.rows.append((name, eta, xi) + (None,) * 6 + (f"error: {exc}",))
    return t1, t2


def _diff(table: Table, reference: dict, value_columns: Sequence[str]) -> list[tuple]:
    rows = []
    for rec in table.records():
        ref = reference.get(rec["case"])
        if ref is None:
            continue
        for col, pub in zip(value_columns, ref):
            got = rec[col]
            dev = abs(got - pub) if got is not None else None
            rows.append((table.name, rec["case"], col, got, pub, dev))
    return rows


def run_tables(cfg: ScenarioConfig) -> list[Table]:
    t1, t2 = _table_rows(cfg)
    diff = Table("reference_diff", DIFF_COLUMNS)
    diff.rows.extend(_diff(t1, REFERENCE_SHORTRUN, ("C_b", "C_bp", "ratio")))
    diff.rows.extend(_diff(t2, REFERENCE_LONGRUN, ("N_s", "C_b", "U", "N_s_p", "C_bp", "U_p")))
    return [t1, t2, diff]


SENSITIVITY_COLUMNS = ("eta", "xi", "U_UE", "U_PC", "N_s_UE", "N_s_PC", "C_UE", "C_PC",
                       "x_f_UE", "x_f_PC", "status")


def sensitivity_cell(cfg: ScenarioConfig, eta: float, xi: float) -> tuple:
    """One independent (eta, xi) cell; safe to evaluate in a worker process."""
    try:
        p = cfg.effective(eta, xi)
        ue = solve_longrun_effective(p, Mode.ue())
        pc = solve_longrun_effective(p, Mode.perimeter(cfg.epsilon))
    except (ParameterError, SolverError) as exc:
        return (eta, xi) + (None,) * 8 + (f"error: {exc}",)
    return (eta, xi, ue.U_star, pc.U_star, ue.N_s_total, pc.N_s_total, ue.C_bathtub,
            pc.C_bathtub, ue.x_f, pc.x_f, "ok")


def run_sensitivity(cfg: ScenarioConfig) -> list[Table]:
    cells = [(eta, xi) for xi in grid_values(cfg.xi_grid) for eta in grid_values(cfg.eta_grid)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            rows = list(pool.map(sensitivity_cell, [cfg] * len(cells),
                                 [c[0] for c in cells], [c[1] for c in cells]))
    else:
        rows = [sensitivity_cell(cfg, eta, xi) for eta, xi in cells]
    return [Table("sensitivity", SENSITIVITY_COLUMNS, rows)]


BIAS_COLUMNS = ("label", "epsilon", "cost", "t_s", "t_s_p", "t_e_p", "t_e", "peak_queue",
                "binding")


def run_bias_sweep(cfg: ScenarioConfig) -> list[Table]:
    p = cfg.effective()
    table = Table("bias_sweep", BIAS_COLUMNS)
    ue = solve_shortrun(cfg.N_s_fixed, p)
    table.rows.append(("UE", None, ue.cost, ue.t_s, None, None, ue.t_e, 0.0, False))
    for eps in cfg.epsilons:
        eq = solve_perimeter(cfg.N_s_fixed, p, eps)
        queue = queue_profile(eq, p, cfg.grid)
        peak = float(queue.q.max()) if queue.q.size else 0.0
        table.rows.append((f"epsilon={eps:g}", eps, eq.cost, eq.t_s, eq.t_s_p, eq.t_e_p, eq.t_e,
                           peak, eq.binding))
    return [table]


def run_trajectory(cfg: ScenarioConfig) -> list[Table]:
    p = cfg.effective()
    if cfg.mode == "UE":
        traj = build_trajectory(solve_shortrun(cfg.N_s_fixed, p), p, cfg.grid)
        return [Table("trajectory_ue", traj.columns, list(traj.rows()))]
    eq = solve_perimeter(cfg.N_s_fixed, p, cfg.epsilon)
    traj = controlled_trajectory(eq, p, cfg.grid)
    return [Table("trajectory_perimeter", traj.columns, list(traj.rows()))]


RUNNERS = {
    "shortrun": run_shortrun,
    "perimeter": run_perimeter,
    "longrun": run_longrun,
    "tables": run_tables,
    "sensitivity": run_sensitivity,
    "bias-sweep": run_bias_sweep,
    "trajectory": run_trajectory,
}


def run(cfg: ScenarioConfig) -> list[Table]:
    return RUNNERS[cfg.run](cfg)
