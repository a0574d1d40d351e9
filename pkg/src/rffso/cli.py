"""Command-line front end: JSON scenarios in, CSV outage curves out.

Subcommands::

    rffso run --config scenario.json [--out curve.csv]
    rffso validate --config scenario.json
    rffso figure fig1|fig2|fig3 [--gamma-th-db X] [--lengths a,b,c]
                 [--cn2-strong X] [--mu-fixed-db X]
                 [--mc-samples N --seed S] [--out DIR]

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

from .channels import (BETA_EXPONENT_VARIANTS, FisherSnedecorParams, FsoGeometry,
                       GammaGammaParams, rytov_variance, turbulence_params)
from .montecarlo import McConfig
from .relay import AXES, OutageQuery, RelaySystem, db_to_linear, linear_to_db, sweep
from .specfun import ConvergenceError, DomainError

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "CurveRow",
    "parse_config",
    "db_to_linear",
    "linear_to_db",
    "scenario_rows",
    "rows_to_csv",
    "run_scenario",
    "reproduce_figure",
    "main",
]

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

CSV_COLUMNS = ("axis_value", "pout_analytic", "pout_mc", "mc_stderr",
               "alpha", "beta", "sigma_r2")

WAVELENGTH = 1550e-9
# Fisher-Snedecor (m, m_s) pairs for the indoor D2D channels
RF_STATES = {
    "h2h_los": (1.12, 1.42),
    "h2p_los": (0.98, 2.03),
    "h2h_nlos": (1.09, 2.25),
    "h2p_nlos": (0.75, 4.27),
}
CN2_WEAK = 6e-15
CN2_MODERATE = 2e-14


class ConfigError(ValueError):
    """Invalid scenario document; ``errors`` lists every problem found."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    start: float
    stop: float
    step: float

    def grid(self) -> list[float]:
        if self.step <= 0:
            return [self.start]
        n = int(round((self.stop - self.start) / self.step))
        return [self.start + i * self.step for i in range(n + 1)]


@dataclass(frozen=True)
class ScenarioConfig:
    m: float
    m_s: float
    gamma_th_db: float
    sweep: SweepSpec
    mu1_db: Optional[float] = None
    mu2_db: Optional[float] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None
    cn2: Optional[float] = None
    wavelength_m: Optional[float] = None
    length_m: Optional[float] = None
    mc: Optional[McConfig] = None
    beta_exponent_variant: str = "paper_7_6"

    @property
    def geometric(self) -> bool:
        return self.cn2 is not None

    def geometry(self) -> Optional[FsoGeometry]:
        if not self.geometric:
            return None
        return FsoGeometry(self.cn2, self.wavelength_m, self.length_m)


@dataclass(frozen=True)
class CurveRow:
    axis_value: float
    pout_analytic: float
    alpha: float
    beta: float
    pout_mc: Optional[float] = None
    mc_stderr: Optional[float] = None
    sigma_r2: Optional[float] = None


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------

_TOP_KEYS = {"rf", "fso", "gamma_th_db", "sweep", "mc", "beta_exponent_variant"}


def _number(errors, where, block, key, required=True, positive=False):
    name = f"{where}.{key}" if where else key
    if key not in block:
        if required:
            errors.append(f"{name}: missing")
        return None
    v = block[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        errors.append(f"{name}: expected a finite number, got {v!r}")
        return None
    if positive and v <= 0:
        errors.append(f"{name}: must be > 0, got {v}")
        return None
    return float(v)


def _block(errors, doc, key, required=True):
    if key not in doc:
        if required:
            errors.append(f"{key}: missing block")
        return None
    b = doc[key]
    if not isinstance(b, dict):
        errors.append(f"{key}: expected an object")
        return None
    return b


def _unknown(errors, where, block, allowed):
    for k in sorted(set(block) - set(allowed)):
        errors.append(f"{where}.{k}: unknown field")


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a JSON scenario document.

    Raises :class:`ConfigError` listing every problem found (with line and
    column for syntax errors).
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"line {exc.lineno} column {exc.colno}: {exc.msg}"]) from None
    if not isinstance(doc, dict):
        raise ConfigError(["document: expected a JSON object"])
    errors: list[str] = []
    for k in sorted(set(doc) - _TOP_KEYS):
        errors.append(f"{k}: unknown field")

    sw = _block(errors, doc, "sweep")
    axis = None
    spec = None
    if sw is not None:
        _unknown(errors, "sweep", sw, ("axis", "start", "stop", "step"))
        axis = sw.get("axis")
        if axis not in AXES:
            errors.append(f"sweep.axis: expected one of {', '.join(AXES)}, got {axis!r}")
            axis = None
        start = _number(errors, "sweep", sw, "start")
        stop = _number(errors, "sweep", sw, "stop")
        step = _number(errors, "sweep", sw, "step", required=False)
        if start is not None and stop is not None:
            if step is None:
                step = 0.0 if stop == start else None
            if step is None:
                errors.append("sweep.step: missing")
            elif step < 0 or (step == 0 and stop != start):
                errors.append("sweep: grid must be increasing (step > 0)")
            elif stop < start:
                errors.append("sweep: stop must be >= start")
            elif step > 0 and (stop - start) / step > 1e6:
                errors.append("sweep: more than a million points")
            else:
                spec = SweepSpec(axis or "mu1", start, stop, step)

    rf = _block(errors, doc, "rf")
    m = m_s = mu1_db = None
    if rf is not None:
        _unknown(errors, "rf", rf, ("m", "m_s", "mu1_db"))
        m = _number(errors, "rf", rf, "m", positive=True)
        m_s = _number(errors, "rf", rf, "m_s", positive=True)
        mu1_db = _number(errors, "rf", rf, "mu1_db",
                         required=axis not in ("mu1", "mu1_and_mu2"))

    fso = _block(errors, doc, "fso")
    mu2_db = alpha = beta = cn2 = wl = length = None
    if fso is not None:
        _unknown(errors, "fso", fso, ("mu2_db", "explicit", "geometric"))
        mu2_db = _number(errors, "fso", fso, "mu2_db",
                         required=axis not in ("mu2", "mu1_and_mu2"))
        has_exp, has_geo = "explicit" in fso, "geometric" in fso
        if has_exp and has_geo:
            errors.append("fso: both 'explicit' and 'geometric' turbulence blocks given; "
                          "supply exactly one")
        elif not (has_exp or has_geo):
            errors.append("fso: needs an 'explicit' {alpha, beta} or a 'geometric' "
                          "{cn2, wavelength_m, length_m} block")
        elif has_exp:
            ex = _block(errors, fso, "explicit")
            if ex is not None:
                _unknown(errors, "fso.explicit", ex, ("alpha", "beta"))
                alpha = _number(errors, "fso.explicit", ex, "alpha", positive=True)
                beta = _number(errors, "fso.explicit", ex, "beta", positive=True)
            if axis == "fso_length":
                errors.append("sweep.axis: fso_length needs a 'geometric' fso block")
        else:
            geo = _block(errors, fso, "geometric")
            if geo is not None:
                _unknown(errors, "fso.geometric", geo, ("cn2", "wavelength_m", "length_m"))
                cn2 = _number(errors, "fso.geometric", geo, "cn2", positive=True)
                wl = _number(errors, "fso.geometric", geo, "wavelength_m", positive=True)
                length = _number(errors, "fso.geometric", geo, "length_m",
                                 required=axis != "fso_length", positive=True)

    gth = _number(errors, "", doc, "gamma_th_db")

    variant = doc.get("beta_exponent_variant", "paper_7_6")
    if variant not in BETA_EXPONENT_VARIANTS:
        errors.append(f"beta_exponent_variant: expected one of "
                      f"{', '.join(BETA_EXPONENT_VARIANTS)}, got {variant!r}")

    mc = None
    mcb = _block(errors, doc, "mc", required=False)
    if mcb is not None:
        _unknown(errors, "mc", mcb, ("samples", "seed", "streams"))
        vals = {k: mcb.get(k, d) for k, d in (("samples", None), ("seed", 0), ("streams", 1))}
        if vals["samples"] is None:
            errors.append("mc.samples: missing")
        else:
            try:
                mc = McConfig(vals["samples"], vals["seed"], vals["streams"])
            except DomainError as exc:
                errors.append(f"mc: {exc}")

    if errors:
        raise ConfigError(errors)
    return ScenarioConfig(
        m=m, m_s=m_s, gamma_th_db=gth, sweep=spec, mu1_db=mu1_db, mu2_db=mu2_db,
        alpha=alpha, beta=beta, cn2=cn2, wavelength_m=wl, length_m=length,
        mc=mc, beta_exponent_variant=variant)


# ---------------------------------------------------------------------------
# evaluation and CSV
# ---------------------------------------------------------------------------

def _base_system(cfg: ScenarioConfig):
    mu1 = db_to_linear(cfg.mu1_db) if cfg.mu1_db is not None else 1.0
    mu2 = db_to_linear(cfg.mu2_db) if cfg.mu2_db is not None else 1.0
    rf = FisherSnedecorParams(cfg.m, cfg.m_s, mu1)
    s2 = None
    if cfg.geometric:
        if cfg.length_m is not None:
            s2 = rytov_variance(cfg.geometry())
            alpha, beta = turbulence_params(s2, cfg.beta_exponent_variant)
        else:
            alpha = beta = 1.0  # replaced per point by the length sweep
    else:
        alpha, beta = cfg.alpha, cfg.beta
    return RelaySystem(rf, GammaGammaParams(alpha, beta, mu2)), s2


def scenario_rows(cfg: ScenarioConfig, workers: Optional[int] = None) -> list[CurveRow]:
    base, s2_base = _base_system(cfg)
    q = OutageQuery(db_to_linear(cfg.gamma_th_db))
    geometry = None
    if cfg.sweep.axis == "fso_length":
        geometry = FsoGeometry(cfg.cn2, cfg.wavelength_m,
                               cfg.length_m if cfg.length_m else cfg.sweep.grid()[0])
    curve = sweep(base, q, cfg.sweep.axis, cfg.sweep.grid(), geometry=geometry,
                  variant=cfg.beta_exponent_variant, mc=cfg.mc, workers=workers)
    rows = []
    for i, x in enumerate(curve.axis_values):
        sys_i = curve.systems[i]
        s2 = curve.sigma_r2[i] if curve.sigma_r2[i] is not None else s2_base
        est = curve.mc_pout[i] if curve.mc_pout is not None else (None, None)
        rows.append(CurveRow(x, curve.analytic_pout[i], sys_i.fso.alpha, sys_i.fso.beta,
                             est[0], est[1], s2))
    return rows


def _fmt(v):
    return "" if v is None else format(v, ".17g")


def rows_to_csv(rows, comments=()) -> str:
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_fmt(r.axis_value), _fmt(r.pout_analytic), _fmt(r.pout_mc),
                    _fmt(r.mc_stderr), _fmt(r.alpha), _fmt(r.beta), _fmt(r.sigma_r2)])
    return buf.getvalue()


def _scenario_comments(cfg):
    unit = "m" if cfg.sweep.axis == "fso_length" else "dB"
    out = [f"axis: {cfg.sweep.axis} [{unit}]",
           f"rf: m={cfg.m:g} m_s={cfg.m_s:g}",
           f"gamma_th_db: {cfg.gamma_th_db:g}"]
    if cfg.geometric:
        out.append(f"fso: cn2={cfg.cn2:g} wavelength_m={cfg.wavelength_m:g} "
                   f"beta_exponent_variant={cfg.beta_exponent_variant}")
    if cfg.mc is not None:
        out.append(f"mc: samples={cfg.mc.samples} seed={cfg.mc.seed} streams={cfg.mc.streams}")
    return out


def run_scenario(cfg: ScenarioConfig, workers: Optional[int] = None) -> str:
    """Evaluate a scenario and render it as CSV (byte-deterministic for a given config)."""
    return rows_to_csv(scenario_rows(cfg, workers), _scenario_comments(cfg))


# ---------------------------------------------------------------------------
# figure reproduction
# ---------------------------------------------------------------------------

@dataclass
class FigureOutput:
    curves: dict = field(default_factory=dict)  # label -> CSV text
    rows: dict = field(default_factory=dict)    # label -> list[CurveRow]
    defaults_applied: list = field(default_factory=list)


_FIGURE_DEFAULTS = {
    "gamma_th_db": (0.0, "outage threshold gamma_th = 0 dB"),
    "cn2_strong": (6e-14, "strong-turbulence C_n^2 = 6e-14 m^-2/3"),
    "length_m": (1000.0, "FSO link length L = 1000 m"),
    "lengths": ((1000.0, 2000.0, 3000.0), "FSO link lengths L = 1000, 2000, 3000 m"),
    "mu_fixed_db": (20.0, "SNR of the unswept hop = 20 dB"),
}
_FIGURE_GRIDS = {"fig1": (0.0, 40.0, 1.0), "fig2": (0.0, 60.0, 1.0), "fig3": (0.0, 60.0, 1.0)}
_FIGURE_NEEDS = {
    "fig1": ("gamma_th_db", "length_m"),
    "fig2": ("gamma_th_db", "cn2_strong", "length_m", "mu_fixed_db"),
    "fig3": ("gamma_th_db", "lengths", "mu_fixed_db"),
}


def _resolve(fig_id, overrides):
    opts = dict(overrides or {})
    unknown = set(opts) - set(_FIGURE_DEFAULTS) - {"start", "stop", "step", "mc", "workers"}
    if unknown:
        raise ConfigError([f"unknown figure override {k!r}" for k in sorted(unknown)])
    applied = []
    for key in _FIGURE_NEEDS[fig_id]:
        if opts.get(key) is None:
            value, text = _FIGURE_DEFAULTS[key]
            opts[key] = value
            applied.append(f"{key} not supplied; assuming {text}")
    start, stop, step = _FIGURE_GRIDS[fig_id]
    for k, v in (("start", start), ("stop", stop), ("step", step)):
        if opts.get(k) is None:
            opts[k] = v
    return opts, applied


def _figure_curves(fig_id, o):
    """Yield (label, ScenarioConfig) for every curve of a figure."""
    sw = lambda axis: SweepSpec(axis, o["start"], o["stop"], o["step"])  # noqa: E731
    common = dict(gamma_th_db=o["gamma_th_db"], mc=o.get("mc"), wavelength_m=WAVELENGTH)
    if fig_id == "fig1":
        for name, (m, ms) in RF_STATES.items():
            yield f"fig1_{name}", ScenarioConfig(
                m=m, m_s=ms, sweep=sw("mu1_and_mu2"), cn2=CN2_MODERATE,
                length_m=o["length_m"], **common)
    elif fig_id == "fig2":
        regimes = (("weak", CN2_WEAK), ("moderate", CN2_MODERATE),
                   ("strong", o["cn2_strong"]))
        for rf_name in ("h2h_los", "h2h_nlos"):
            m, ms = RF_STATES[rf_name]
            for reg, cn2 in regimes:
                yield f"fig2_{rf_name}_{reg}", ScenarioConfig(
                    m=m, m_s=ms, sweep=sw("mu2"), mu1_db=o["mu_fixed_db"], cn2=cn2,
                    length_m=o["length_m"], **common)
    else:
        m, ms = RF_STATES["h2h_los"]
        for length in o["lengths"]:
            yield f"fig3_L{length:g}m", ScenarioConfig(
                m=m, m_s=ms, sweep=sw("mu1"), mu2_db=o["mu_fixed_db"], cn2=CN2_MODERATE,
                length_m=float(length), **common)


def reproduce_figure(fig_id: str, overrides: Optional[dict] = None) -> FigureOutput:
    """Outage curves for one of the three built-in scenarios.

    fig1 sweeps mu1 = mu2 for the four indoor RF states under moderate
    turbulence; fig2 sweeps mu2 for the head-to-head RF states under weak,
    moderate and strong turbulence; fig3 sweeps mu1 for several FSO link
    lengths.  Values the scenarios leave open are taken from ``overrides``
    or defaulted; every default is listed in ``defaults_applied`` and echoed
    as a comment row at the top of each CSV.
    """
    if fig_id not in _FIGURE_NEEDS:
        raise ConfigError([f"unknown figure {fig_id!r}; expected fig1, fig2 or fig3"])
    opts, applied = _resolve(fig_id, overrides)
    if opts["step"] <= 0 or opts["stop"] < opts["start"]:
        raise ConfigError(["figure grid must be increasing"])
    out = FigureOutput(defaults_applied=applied)
    for label, cfg in _figure_curves(fig_id, opts):
        rows = scenario_rows(cfg, opts.get("workers"))
        comments = [f"curve: {label}"] + [f"default: {a}" for a in applied] \
            + _scenario_comments(cfg)
        if cfg.mu1_db is not None:
            comments.append(f"mu1_db: {cfg.mu1_db:g}")
        if cfg.mu2_db is not None:
            comments.append(f"mu2_db: {cfg.mu2_db:g}")
        if cfg.length_m is not None:
            comments.append(f"length_m: {cfg.length_m:g}")
        out.rows[label] = rows
        out.curves[label] = rows_to_csv(rows, comments)
    return out


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _read_config(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _float_list(text):
    try:
        vals = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not vals or any(not (v > 0 and math.isfinite(v)) for v in vals):
        raise argparse.ArgumentTypeError("lengths must be positive numbers")
    return vals


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rffso", description="Outage probability of a mixed RF/FSO decode-and-forward link.")
    parser.add_argument("--workers", type=int, default=None,
                        help="threads for sweep points (default: RFFSO_THREADS or 1)")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="evaluate a JSON scenario and emit CSV")
    run.add_argument("--config", required=True, help="scenario file, or - for stdin")
    run.add_argument("--out", help="CSV destination (default: stdout)")

    val = sub.add_parser("validate", help="check a JSON scenario without evaluating it")
    val.add_argument("--config", required=True)

    fig = sub.add_parser("figure", help="compute the curves of a built-in figure scenario")
    fig.add_argument("figure", choices=sorted(_FIGURE_NEEDS))
    fig.add_argument("--gamma-th-db", type=float)
    fig.add_argument("--lengths", type=_float_list, help="comma-separated FSO lengths in m (fig3)")
    fig.add_argument("--cn2-strong", type=float, help="strong-turbulence C_n^2 (fig2)")
    fig.add_argument("--mu-fixed-db", type=float,
                     help="SNR of the hop that is not swept (fig2, fig3)")
    fig.add_argument("--start", type=float)
    fig.add_argument("--stop", type=float)
    fig.add_argument("--step", type=float)
    fig.add_argument("--mc-samples", type=int)
    fig.add_argument("--seed", type=int, default=0)
    fig.add_argument("--mc-streams", type=int, default=1)
    fig.add_argument("--out", help="directory for one CSV per curve (default: stdout)")
    return parser


def _write(text, path):
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    workers = args.workers
    if workers is None and os.environ.get("RFFSO_THREADS"):
        workers = int(os.environ["RFFSO_THREADS"])
    try:
        if args.command in ("run", "validate"):
            cfg = parse_config(_read_config(args.config))
            if args.command == "validate":
                print("ok", file=sys.stderr)
                return EXIT_OK
            _write(run_scenario(cfg, workers), args.out)
            return EXIT_OK

        mc = None
        if args.mc_samples is not None:
            mc = McConfig(args.mc_samples, args.seed, args.mc_streams)
        overrides = dict(gamma_th_db=args.gamma_th_db, lengths=args.lengths,
                         cn2_strong=args.cn2_strong, mu_fixed_db=args.mu_fixed_db,
                         start=args.start, stop=args.stop, step=args.step,
                         mc=mc, workers=workers)
        result = reproduce_figure(args.figure, overrides)
        for note in result.defaults_applied:
            print(f"rffso: {note}", file=sys.stderr)
        if args.out:
            os.makedirs(args.out, exist_ok=True)
            for label, text in result.curves.items():
                _write(text, os.path.join(args.out, f"{label}.csv"))
        else:
            sys.stdout.write("\n".join(result.curves.values()))
        return EXIT_OK
    except ConfigError as exc:
        for e in exc.errors:
            print(f"rffso: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"rffso: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DomainError as exc:
        print(f"rffso: invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"rffso: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
