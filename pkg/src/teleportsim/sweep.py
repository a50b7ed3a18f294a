"""(alpha, gamma) grid sweeps over both protocols, with resumable
delimiter-separated output and per-figure data emission.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .evolution import EvolutionConfig
from .metrics import MetricsRecord, average_over_inputs
from .protocol import EncodingKind

GRID_MATCH_ATOL = 1e-9

COLUMNS = (
    "protocol", "alpha", "gamma", "fidelity_avg", "purity_avg",
    "purity_of_mean", "neg_cut34", "neg_total_t1", "neg_total_t2",
    "neg_total_t3", "delta_E_U", "delta_E_M", "success_prob_avg",
    "dt", "log_base", "rate_convention", "error",
)


@dataclass(frozen=True)
class GridSpec:
    min: float
    max: float
    count: int

    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.count)


@dataclass
class SweepConfig:
    protocols: list[EncodingKind] = field(
        default_factory=lambda: [EncodingKind.SCRAMBLING, EncodingKind.SWAP]
    )
    alpha_grid: GridSpec = GridSpec(0.0, 1.0, 51)
    gamma_grid: GridSpec = GridSpec(0.0, 0.06, 31)
    dt: float = 0.01
    log_base: float = 2.0
    rate_convention: str = "kraus"
    output_path: str = "sweep.csv"
    resume: bool = False


class ConfigError(ValueError):
    """Malformed sweep configuration."""


_KNOWN_KEYS = {
    "protocols", "alpha_min", "alpha_max", "alpha_count", "gamma_min",
    "gamma_max", "gamma_count", "dt", "log_base", "rate_convention",
    "output", "resume",
}


def parse_config(text: str) -> SweepConfig:
    """Parse `key = value` configuration text; unknown keys are errors."""
    cfg = SweepConfig()
    raw: dict[str, tuple[int, str]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        raw[key] = (lineno, value)

    def take(key, conv, default):
        if key not in raw:
            return default
        lineno, value = raw[key]
        try:
            return conv(value)
        except ConfigError:
            raise
        except Exception:
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}")

    def parse_protocols(value):
        kinds = []
        for name in value.split(","):
            kinds.append(EncodingKind(name.strip().lower()))
        return kinds

    cfg.protocols = take("protocols", parse_protocols, cfg.protocols)
    a_min = take("alpha_min", float, 0.0)
    a_max = take("alpha_max", float, 1.0)
    a_cnt = take("alpha_count", int, 51)
    g_min = take("gamma_min", float, 0.0)
    g_max = take("gamma_max", float, 0.06)
    g_cnt = take("gamma_count", int, 31)
    if not (0 <= a_min <= a_max <= 1):
        raise ConfigError(
            f"alpha grid [{a_min}, {a_max}] must lie within [0, 1] "
            f"(fields alpha_min/alpha_max)"
        )
    if not (0 <= g_min <= g_max):
        raise ConfigError(
            f"gamma grid [{g_min}, {g_max}] must be nonnegative "
            f"(fields gamma_min/gamma_max)"
        )
    if a_cnt < 1 or g_cnt < 1:
        raise ConfigError("grid counts must be positive (alpha_count/gamma_count)")
    cfg.alpha_grid = GridSpec(a_min, a_max, a_cnt)
    cfg.gamma_grid = GridSpec(g_min, g_max, g_cnt)
    cfg.dt = take("dt", float, cfg.dt)
    if cfg.dt <= 0:
        raise ConfigError("dt must be positive")

    def parse_base(value):
        if value.strip().lower() == "e":
            return float(np.e)
        base = float(value)
        if base not in (2.0,) and abs(base - np.e) > 1e-12:
            raise ConfigError("log_base must be 2 or e")
        return base

    cfg.log_base = take("log_base", parse_base, cfg.log_base)
    cfg.rate_convention = take("rate_convention", str.strip, cfg.rate_convention)
    if cfg.rate_convention not in ("kraus", "lindblad"):
        raise ConfigError(
            f"rate_convention must be kraus or lindblad, got "
            f"{cfg.rate_convention!r}"
        )
    cfg.output_path = take("output", str.strip, cfg.output_path)
    cfg.resume = take(
        "resume", lambda v: v.strip().lower() in ("1", "true", "yes"), cfg.resume
    )
    return cfg


def grid_points(cfg: SweepConfig) -> list[tuple[EncodingKind, float, float]]:
    """Row order of the sweep: protocol-major, then alpha, then gamma."""
    return [
        (kind, float(a), float(g))
        for kind in cfg.protocols
        for a in cfg.alpha_grid.values()
        for g in cfg.gamma_grid.values()
    ]


def _format_row(rec: MetricsRecord | None, point, cfg: SweepConfig,
                error: str = "") -> str:
    kind, alpha, gamma = point
    if rec is None:
        vals = [""] * 10
    else:
        vals = [
            f"{v:.12g}" for v in (
                rec.fidelity_avg, rec.purity_avg, rec.purity_of_mean,
                rec.neg_cut34, rec.neg_total_t1, rec.neg_total_t2,
                rec.neg_total_t3, rec.delta_E_U, rec.delta_E_M,
                rec.success_prob_avg,
            )
        ]
        if rec.failed_inputs:
            error = "skipped_inputs:" + "+".join(rec.failed_inputs)
    base = "2" if cfg.log_base == 2 else "e"
    return ",".join(
        [kind.value, f"{alpha:.12g}", f"{gamma:.12g}", *vals,
         f"{cfg.dt:.12g}", base, cfg.rate_convention, error]
    )


def _compute_row(args) -> str:
    point, cfg = args
    kind, alpha, gamma = point
    try:
        rec = average_over_inputs(
            kind, alpha, gamma, EvolutionConfig(cfg.dt),
            rate_convention=cfg.rate_convention, log_base=cfg.log_base,
        )
        return _format_row(rec, point, cfg)
    except Exception as exc:
        return _format_row(None, point, cfg, error=f"{type(exc).__name__}:{exc}")


def _header_lines(cfg: SweepConfig) -> list[str]:
    base = "2" if cfg.log_base == 2 else "e"
    return [
        "# teleportation-protocol sweep",
        f"# protocols={','.join(k.value for k in cfg.protocols)}",
        f"# alpha_grid={cfg.alpha_grid.min},{cfg.alpha_grid.max},"
        f"{cfg.alpha_grid.count}",
        f"# gamma_grid={cfg.gamma_grid.min},{cfg.gamma_grid.max},"
        f"{cfg.gamma_grid.count}",
        f"# dt={cfg.dt} log_base={base} rate_convention={cfg.rate_convention}",
        "# alpha, gamma dimensionless; gamma in units of inverse gate time",
        ",".join(COLUMNS),
    ]


def worker_count() -> int:
    env = os.environ.get("SIM_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_sweep(cfg: SweepConfig, out_path: str | None = None) -> list[str]:
    """Evaluate the full grid, writing one row per point in fixed order.

    The output file is rewritten row-by-row so an interrupted sweep can be
    resumed; with cfg.resume, rows already present are reused verbatim.
    Returns the data rows.
    """
    out_path = out_path or cfg.output_path
    points = grid_points(cfg)
    done: dict[str, str] = {}
    if cfg.resume and os.path.exists(out_path):
        with open(out_path) as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line or line.startswith("#") or line.startswith("protocol,"):
                    continue
                parts = line.split(",")
                done[",".join(parts[:3])] = line

    keys = [_format_row(None, p, cfg).split(",")[:3] for p in points]
    keys = [",".join(k) for k in keys]
    rows: list[str | None] = [done.get(k) for k in keys]
    pending = [i for i, r in enumerate(rows) if r is None]

    if pending:
        nworkers = min(worker_count(), len(pending))
        if nworkers > 1:
            with ProcessPoolExecutor(max_workers=nworkers) as pool:
                for i, row in zip(pending, pool.map(
                        _compute_row, [(points[i], cfg) for i in pending])):
                    rows[i] = row
                    _write_rows(out_path, cfg, rows)
        else:
            for i in pending:
                rows[i] = _compute_row((points[i], cfg))
                _write_rows(out_path, cfg, rows)
    _write_rows(out_path, cfg, rows)
    return [r for r in rows if r is not None]


def _write_rows(out_path: str, cfg: SweepConfig, rows) -> None:
    tmp = out_path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write("\n".join(_header_lines(cfg)) + "\n")
        for row in rows:
            if row is not None:
                fh.write(row + "\n")
    os.replace(tmp, out_path)


def _load_records(rows: list[str]) -> list[dict]:
    records = []
    for row in rows:
        parts = row.split(",")
        rec = {"protocol": parts[0], "alpha": float(parts[1]),
               "gamma": float(parts[2])}
        for name, value in zip(COLUMNS[3:13], parts[3:13]):
            rec[name] = float(value) if value else float("nan")
        records.append(rec)
    return records


def _pick(records, protocol, alpha=None, gamma=None):
    out = []
    for r in records:
        if r["protocol"] != protocol:
            continue
        if alpha is not None and abs(r["alpha"] - alpha) > GRID_MATCH_ATOL:
            continue
        if gamma is not None and abs(r["gamma"] - gamma) > GRID_MATCH_ATOL:
            continue
        out.append(r)
    return out


def _cut_table(records, protocol, metric, gammas) -> list[str]:
    """Lines of alpha vs metric at fixed gamma cuts."""
    columns = []
    alphas = None
    for g in gammas:
        sel = sorted(_pick(records, protocol, gamma=g), key=lambda r: r["alpha"])
        if not sel:
            raise ValueError(
                f"missing grid coverage: protocol={protocol} gamma={g}"
            )
        cur = [r["alpha"] for r in sel]
        if alphas is None:
            alphas = cur
        elif len(cur) != len(alphas):
            raise ValueError("inconsistent alpha coverage across gamma cuts")
        columns.append([r[metric] for r in sel])
    header = "alpha," + ",".join(f"{metric}@gamma={g:.12g}" for g in gammas)
    lines = [header]
    for i, a in enumerate(alphas):
        lines.append(",".join([f"{a:.12g}"] + [f"{c[i]:.12g}" for c in columns]))
    return lines


def _decay_table(records, protocol, metric, alphas) -> list[str]:
    columns = []
    gammas = None
    for a in alphas:
        sel = sorted(_pick(records, protocol, alpha=a), key=lambda r: r["gamma"])
        if not sel:
            raise ValueError(
                f"missing grid coverage: protocol={protocol} alpha={a}"
            )
        cur = [r["gamma"] for r in sel]
        if gammas is None:
            gammas = cur
        elif len(cur) != len(gammas):
            raise ValueError("inconsistent gamma coverage across alpha cuts")
        columns.append([r[metric] for r in sel])
    header = "gamma," + ",".join(f"{metric}@alpha={a:.12g}" for a in alphas)
    lines = [header]
    for i, g in enumerate(gammas):
        lines.append(",".join([f"{g:.12g}"] + [f"{c[i]:.12g}" for c in columns]))
    return lines


FIGURE_IDS = ("fig2", "fig3", "fig4", "fig7")
_CUT_GAMMAS = (0.0, 0.038, 0.06)
_CUT_ALPHAS = (0.0, 0.5, 1.0)


def emit_figure_data(rows: list[str], figure_id: str, out_dir: str,
                     cfg: SweepConfig) -> list[str]:
    """Write plot-ready panel files for one figure; returns the file paths."""
    if figure_id not in FIGURE_IDS:
        raise ValueError(f"figure must be one of {FIGURE_IDS}")
    records = _load_records(rows)
    os.makedirs(out_dir, exist_ok=True)
    panels: list[tuple[str, list[str]]] = []
    if figure_id in ("fig2", "fig3"):
        protocol = "scrambling" if figure_id == "fig2" else "swap"
        for metric in ("fidelity_avg", "purity_avg", "neg_cut34"):
            panels.append((
                f"{figure_id}_{metric}.csv",
                _cut_table(records, protocol, metric, _CUT_GAMMAS),
            ))
    elif figure_id == "fig4":
        for protocol in ("scrambling", "swap"):
            for metric in ("delta_E_U", "delta_E_M"):
                panels.append((
                    f"fig4_{metric}_{protocol}.csv",
                    _cut_table(records, protocol, metric, _CUT_GAMMAS),
                ))
    else:
        for protocol in ("scrambling", "swap"):
            for metric in ("fidelity_avg", "purity_avg"):
                panels.append((
                    f"fig7_{metric}_{protocol}.csv",
                    _decay_table(records, protocol, metric, _CUT_ALPHAS),
                ))
    paths = []
    for name, lines in panels:
        path = os.path.join(out_dir, name)
        with open(path, "w") as fh:
            fh.write("\n".join(_header_lines(cfg)[:6]) + "\n")
            fh.write("\n".join(lines) + "\n")
        paths.append(path)
    return paths
