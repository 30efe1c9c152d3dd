"""Command-line front end.

    gravicaustic simulate  --mirror "parabola:fm=1" --x0 0 --y0 3 --vx 1 --vy 0 --bounces 500
    gravicaustic foci      --mirror hyperbola --L 4 --k-range -5:5:1001 --format csv,svg
    gravicaustic envelope  --mirror "parabola:fm=1" --L 2 --H 5
    gravicaustic verify    scenario.json
    gravicaustic sweep     --config base.json --param L --values 0.5,4 --jobs 2

Every run writes into ``--out`` (default ``out``).  Settings come from an
optional JSON ``--config`` file; flags override it.  Exit codes: 0 ok,
1 configuration error, 2 the simulation got stuck, 3 verification failed.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import verify
from .caustics import (
    EnvelopePair,
    FociCurve,
    launch_state,
    match_L,
    sample_envelopes,
    sample_foci,
)
from .dynamics import FlightParabola, State, Trajectory, directrix_of, simulate
from .errors import ConfigError, FocusNotReachableError, GravicausticError, MirrorEvaluationError, MirrorSyntaxError
from .mirror import DEFAULT_DOMAIN, Mirror, parse_mirror
from .svg import Plot
from .vec2 import Vec2

EXIT_OK, EXIT_CONFIG, EXIT_STUCK, EXIT_VERIFY = 0, 1, 2, 3
FORMATS = ("csv", "json", "svg")
ARC_SAMPLES = 64

TRAJECTORY_COLUMNS = ("bounce_index", "t_flight", "x", "y", "vx", "vy", "focus_x", "focus_y", "alpha")


@dataclass
class RunConfig:
    mirror: str | None = None
    x0: float | None = None
    y0: float | None = None
    vx: float | None = None
    vy: float | None = None
    g: float = 1.0
    bounces: int = 100
    L: float | None = None
    H: float | None = None
    k0: float | None = None
    k_range: tuple[float, float, int] = (-10.0, 10.0, 2001)
    out_dir: str = "out"
    formats: tuple[str, ...] = ("csv", "json")
    domain: tuple[float, float] = DEFAULT_DOMAIN

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["k_range"] = list(self.k_range)
        d["formats"] = list(self.formats)
        d["domain"] = list(self.domain)
        return d


_FLOAT_FIELDS = ("x0", "y0", "vx", "vy", "g", "L", "H", "k0")
# config keys accepted besides the field names
_ALIASES = {"out": "out_dir", "format": "formats"}


def parse_k_range(v) -> tuple[float, float, int]:
    if isinstance(v, str):
        parts = v.split(":")
        if len(parts) != 3:
            raise ConfigError(f"k_range must look like min:max:count, got {v!r}")
    elif isinstance(v, (list, tuple)) and len(v) == 3:
        parts = v
    else:
        raise ConfigError(f"k_range must be 'min:max:count' or a 3-element list, got {v!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except (TypeError, ValueError):
        raise ConfigError(f"k_range has non-numeric parts: {v!r}") from None
    if n < 2:
        raise ConfigError(f"k_range count must be >= 2, got {n}")
    if not lo < hi:
        raise ConfigError(f"k_range needs min < max, got {lo} and {hi}")
    return (lo, hi, n)


def parse_formats(v) -> tuple[str, ...]:
    items = v.split(",") if isinstance(v, str) else list(v)
    items = [s.strip() for s in items if str(s).strip()]
    if not items:
        raise ConfigError("formats must name at least one of csv, json, svg")
    bad = [s for s in items if s not in FORMATS]
    if bad:
        raise ConfigError(f"unknown format(s) {bad}; choose from {list(FORMATS)}")
    return tuple(dict.fromkeys(items))


def _set(cfg: RunConfig, key: str, value, where: str) -> None:
    key = _ALIASES.get(key, key)
    if key not in {f.name for f in dataclasses.fields(RunConfig)}:
        raise ConfigError(f"{where}: unknown field {key!r}")
    if value is None:
        setattr(cfg, key, None)
        return
    try:
        if key in _FLOAT_FIELDS:
            if isinstance(value, bool):
                raise ValueError
            value = float(value)
        elif key == "bounces":
            if isinstance(value, bool) or float(value) != int(float(value)):
                raise ValueError
            value = int(float(value))
            if value < 0:
                raise ValueError
        elif key == "k_range":
            value = parse_k_range(value)
        elif key == "formats":
            value = parse_formats(value)
        elif key == "domain":
            lo, hi = (float(s) for s in (value.split(":") if isinstance(value, str) else value))
            if not lo < hi:
                raise ValueError
            value = (lo, hi)
        elif key in ("mirror", "out_dir"):
            value = str(value)
    except ConfigError as exc:
        raise ConfigError(f"{where}: {exc}") from None
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: bad value {value!r} for field {key!r}") from None
    setattr(cfg, key, value)


def load_config(path: str | None, overrides: dict) -> RunConfig:
    cfg = RunConfig()
    if path:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
        if not isinstance(doc, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        for k, v in doc.items():
            line = _line_of(text, k)
            _set(cfg, k, v, f"{path}:{line}" if line else str(path))
    for k, v in overrides.items():
        if v is not None:
            _set(cfg, k, v, f"--{k.replace('_', '-')}")
    return cfg


def _line_of(text: str, key: str) -> int | None:
    needle = json.dumps(key)
    for i, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return i
    return None


# -- shared helpers -----------------------------------------------------------


def build_mirror(cfg: RunConfig) -> Mirror:
    if not cfg.mirror:
        raise ConfigError("field 'mirror' is required")
    try:
        return parse_mirror(cfg.mirror, cfg.domain)
    except (MirrorSyntaxError, ValueError) as exc:
        raise ConfigError(f"field 'mirror': {exc}") from None


def initial_state(cfg: RunConfig, m: Mirror) -> State:
    if cfg.k0 is not None:
        if cfg.L is None or cfg.H is None:
            raise ConfigError("launching from k0 needs both L and H")
        try:
            return launch_state(m, cfg.L, cfg.H, cfg.k0, cfg.g)
        except (ValueError, MirrorEvaluationError) as exc:
            raise ConfigError(f"cannot launch from k0={cfg.k0}: {exc}") from None
    missing = [k for k in ("x0", "y0", "vx", "vy") if getattr(cfg, k) is None]
    if missing:
        raise ConfigError(f"missing field(s) {missing} (or give k0, L and H)")
    if not cfg.g > 0:
        raise ConfigError(f"field 'g' must be positive, got {cfg.g}")
    return State(Vec2(cfg.x0, cfg.y0), Vec2(cfg.vx, cfg.vy))


def has_launch(cfg: RunConfig) -> bool:
    return cfg.k0 is not None or all(getattr(cfg, k) is not None for k in ("x0", "y0", "vx", "vy"))


def resolve_L(cfg: RunConfig, m: Mirror) -> tuple[float, str]:
    if cfg.L is not None:
        return cfg.L, "given"
    if not has_launch(cfg):
        raise ConfigError("field 'L' is required (or give a launch state to match it from)")
    p = FlightParabola(initial_state(cfg, m), cfg.g)
    if p.is_degenerate:
        raise ConfigError("cannot match L from a vertical launch; give L explicitly")
    try:
        return match_L(m, p.focus).L, "matched"
    except FocusNotReachableError as exc:
        raise ConfigError(str(exc)) from None


def resolve_H(cfg: RunConfig, m: Mirror) -> float:
    if cfg.H is not None:
        return cfg.H
    if not has_launch(cfg):
        raise ConfigError("field 'H' is required (or give a launch state to derive it from)")
    return directrix_of(FlightParabola(initial_state(cfg, m), cfg.g))


def k_grid(cfg: RunConfig) -> np.ndarray:
    lo, hi, n = cfg.k_range
    return np.linspace(lo, hi, n)


def _cell(v) -> str:
    if v is None or (isinstance(v, float) and not math.isfinite(v)):
        return ""
    return format(float(v), ".17g")


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_cell(v) for v in r])


def write_json(path: Path, doc) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(_clean(doc), fh, indent=2)
        fh.write("\n")


def _clean(v):
    # strict JSON: no NaN or infinity
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return v


def _mirror_curve(m: Mirror, x_lo: float, x_hi: float, n: int = 801):
    xs = np.linspace(max(x_lo, m.x_min), min(x_hi, m.x_max), n)
    ys = np.full_like(xs, np.nan)
    for i, x in enumerate(xs):
        try:
            ys[i] = float(m.height(float(x)))
        except MirrorEvaluationError:
            pass
    return xs, ys


def _out(cfg: RunConfig) -> Path:
    d = Path(cfg.out_dir)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _check_dict(c: verify.CheckResult) -> dict:
    return {
        "max_residual": c.max_residual,
        "tolerance": c.tolerance,
        "passed": c.passed,
        "worst_location": list(c.worst_location) if c.worst_location else None,
        "note": c.note,
    }


# -- simulate -----------------------------------------------------------------


def trajectory_rows(t: Trajectory):
    for i, b in enumerate(t.bounces, 1):
        yield (i, b.t_flight, b.impact.x, b.impact.y, b.v_out.x, b.v_out.y, b.focus_out.x, b.focus_out.y, b.alpha)


def cmd_simulate(cfg: RunConfig) -> int:
    m = build_mirror(cfg)
    s0 = initial_state(cfg, m)
    H_energy = directrix_of(FlightParabola(s0, cfg.g))
    if cfg.H is not None and abs(cfg.H - H_energy) > 1e-9 * max(1.0, abs(H_energy)):
        raise ConfigError(f"H={cfg.H} disagrees with the launch energy (H={H_energy!r})")
    try:
        t = simulate(s0, m, cfg.g, cfg.bounces)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    out = _out(cfg)

    stats = {
        "directrix": _check_dict(verify.check_directrix(t)),
        "foci_circle": _check_dict(verify.check_foci_circle(t)),
        "foci_slope": _check_dict(verify.check_foci_slope(t)),
    }
    L, L_source = cfg.L, "given"
    if L is None:
        try:
            got = verify.matched_L(t)
        except FocusNotReachableError:
            got = None
        L, L_source = (got[0], "matched") if got else (None, None)
    if L is not None:
        stats["foci_on_curve"] = _check_dict(verify.check_foci_on_curve(t, L=L))

    if "csv" in cfg.formats:
        write_csv(out / "trajectory.csv", TRAJECTORY_COLUMNS, trajectory_rows(t))
    if "json" in cfg.formats:
        write_json(
            out / "summary.json",
            {
                "command": "simulate",
                "config": cfg.to_dict(),
                "termination": t.termination.kind,
                "termination_reason": t.termination.reason,
                "bounces": len(t.bounces),
                "grazings": t.grazings,
                "H": t.H,
                "L": L,
                "L_source": L_source,
                "residuals": stats,
            },
        )
    if "svg" in cfg.formats:
        trajectory_svg(t, L).save(out / "trajectory.svg")
    return EXIT_STUCK if t.termination.kind == "stuck" else EXIT_OK


def trajectory_svg(t: Trajectory, L: float | None) -> Plot:
    plot = Plot(title=f"trajectory in {t.mirror.text}")
    xs, ys = [], []
    for seg, dur in t.arcs():
        for tt in np.linspace(0.0, dur, ARC_SAMPLES):
            P = seg.position_at(float(tt))
            xs.append(P.x)
            ys.append(P.y)
        xs.append(math.nan)
        ys.append(math.nan)
    fin = [x for x in xs if math.isfinite(x)] or [t.initial.pos.x]
    lo, hi = min(fin), max(fin)
    pad = 0.1 * (hi - lo if hi > lo else 1.0)
    mx, my = _mirror_curve(t.mirror, lo - pad, hi + pad)
    plot.polyline(mx, my, color="#000", width=2.0, label="mirror")
    if L is not None:
        e = EnvelopePair(FociCurve(t.mirror, L), t.H)
        _envelopes_clipped(plot, e, np.sinh(np.linspace(-math.asinh(1e4), math.asinh(1e4), 4001)),
                           (lo - pad, hi + pad), (float(np.nanmin(my)), t.H))
    plot.polyline(xs, ys, color="#2a7", width=0.6, label="flight arcs")
    foci = [b.focus_out for b in t.bounces]
    if foci:
        plot.dots([F.x for F in foci], [F.y for F in foci], color="#c33")
    plot.hline(t.H)
    return plot


def _envelopes_clipped(plot: Plot, e: EnvelopePair, ks, xlim, ylim) -> None:
    # keep the picture on the region of interest: envelopes run off to
    # infinity near singular k
    span = ylim[1] - ylim[0] if ylim[1] > ylim[0] else 1.0
    y_lo = ylim[0] - 0.25 * span
    for name, color in (("plus", "#36c"), ("minus", "#c6c")):
        c = sample_envelopes(e, ks)[name]
        x, y = c.x.copy(), c.y.copy()
        bad = (x < xlim[0]) | (x > xlim[1]) | (y < y_lo) | (y > e.H + 0.05 * span)
        x[bad] = np.nan
        y[bad] = np.nan
        plot.polyline(x, y, color=color, width=1.2, dash="6 3", label=f"{name} envelope")


# -- foci ---------------------------------------------------------------------


def cmd_foci(cfg: RunConfig) -> int:
    m = build_mirror(cfg)
    L, L_source = resolve_L(cfg, m)
    c = FociCurve(m, L)
    s = sample_foci(c, k_grid(cfg))
    out = _out(cfg)
    if "csv" in cfg.formats:
        write_csv(out / "foci.csv", ("k", "x", "y"), zip(s.k, s.x, s.y))
    if "json" in cfg.formats:
        write_json(
            out / "summary.json",
            {
                "command": "foci",
                "config": cfg.to_dict(),
                "L": L,
                "L_source": L_source,
                "samples": len(s),
                "singularities": [{"k": k, "reason": why} for k, why in s.singularities],
            },
        )
    if "svg" in cfg.formats:
        plot = Plot(title=f"foci curve L={L!r} in {m.text}")
        lo, hi, _ = cfg.k_range
        mx, my = _mirror_curve(m, lo, hi)
        plot.polyline(mx, my, color="#000", width=2.0, label="mirror")
        # the circle family whose envelope is the foci curve, at a few k
        for k in np.linspace(lo, hi, 9):
            try:
                f = float(m.height(float(k)))
            except MirrorEvaluationError:
                continue
            r = abs(L - f)
            if 0 < r < 10.0 * (1.0 + abs(L)):
                plot.circle(float(k), f, r, color="#bbb", width=0.6)
        plot.polyline(s.x, s.y, color="#c33", width=1.5, label="foci curve")
        plot.save(out / "foci.svg")
    return EXIT_OK


# -- envelope -----------------------------------------------------------------


def cmd_envelope(cfg: RunConfig) -> int:
    m = build_mirror(cfg)
    L, L_source = resolve_L(cfg, m)
    H = resolve_H(cfg, m)
    e = EnvelopePair(FociCurve(m, L), H)
    ks = k_grid(cfg)
    env = sample_envelopes(e, ks)
    out = _out(cfg)
    if "csv" in cfg.formats:
        cols = {name: {float(k): (x, y) for k, x, y in zip(c.k, c.x, c.y)} for name, c in env.items()}
        rows = []
        for k in ks:
            p = cols["plus"].get(float(k), (None, None))
            q = cols["minus"].get(float(k), (None, None))
            rows.append((k, p[0], p[1], q[0], q[1]))
        write_csv(out / "envelope.csv", ("k", "x_plus", "y_plus", "x_minus", "y_minus"), rows)
    if "json" in cfg.formats:
        write_json(
            out / "summary.json",
            {
                "command": "envelope",
                "config": cfg.to_dict(),
                "L": L,
                "L_source": L_source,
                "H": H,
                "singularities": {
                    name: [{"k": k, "reason": why} for k, why in c.singularities] for name, c in env.items()
                },
            },
        )
    if "svg" in cfg.formats:
        plot = Plot(title=f"envelopes L={L!r} H={H!r} in {m.text}")
        lo, hi, _ = cfg.k_range
        mx, my = _mirror_curve(m, lo, hi)
        plot.polyline(mx, my, color="#000", width=2.0, label="mirror")
        s = sample_foci(e.foci, ks)
        fx, fy = s.x.copy(), s.y.copy()
        y_floor = float(np.nanmin(my)) if np.isfinite(my).any() else min(0.0, H)
        off = (fx < lo) | (fx > hi) | (fy < y_floor - (H - y_floor))
        fx[off], fy[off] = np.nan, np.nan
        plot.polyline(fx, fy, color="#c33", width=1.2, label="foci curve")
        _envelopes_clipped(plot, e, ks, (lo, hi), (y_floor, H))
        plot.hline(H)
        plot.save(out / "envelope.svg")
    return EXIT_OK


# -- verify -------------------------------------------------------------------


def cmd_verify(scenario: str, out_dir: str) -> int:
    report = verify.run_suite(scenario)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report.to_json() + "\n")
    for c in report.checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"{status} {c.name}: residual {c.max_residual:.3g} (tol {c.tolerance:g})")
    return EXIT_OK if report.passed else EXIT_VERIFY


# -- sweep --------------------------------------------------------------------

COMMANDS = {"simulate": cmd_simulate, "foci": cmd_foci, "envelope": cmd_envelope}


def _run_one(command: str, cfg: RunConfig) -> int:
    try:
        return COMMANDS[command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def cmd_sweep(cfg: RunConfig, param: str, values: list[str], command: str = "simulate", jobs: int = 1) -> int:
    if command not in COMMANDS:
        raise ConfigError(f"sweep command must be one of {sorted(COMMANDS)}, got {command!r}")
    if not values:
        raise ConfigError("sweep needs at least one value")
    base = Path(cfg.out_dir)
    runs = []
    for v in values:
        c = dataclasses.replace(cfg)
        _set(c, param, v, f"--param {param}")
        c.out_dir = str(base / f"{param}={v}")
        runs.append((v, c))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            codes = list(ex.map(_run_one, [command] * len(runs), [c for _, c in runs]))
    else:
        codes = [_run_one(command, c) for _, c in runs]
    base.mkdir(parents=True, exist_ok=True)
    write_json(
        base / "index.json",
        {
            "command": command,
            "param": param,
            "runs": [
                {"value": v, "dir": Path(c.out_dir).name, "exit_code": code}
                for (v, c), code in zip(runs, codes)
            ],
        },
    )
    return max(codes)


# -- argument parsing ---------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--mirror", help='mirror text, e.g. "parabola:fm=1", "line:alpha_deg=30", "0.25*x^2"')
    for name in ("x0", "y0", "vx", "vy", "g", "L", "H", "k0"):
        p.add_argument(f"--{name}", type=str, default=None)
    p.add_argument("--bounces", type=str, default=None)
    p.add_argument("--k-range", dest="k_range", help="min:max:count")
    p.add_argument("--domain", help="mirror domain min:max")
    p.add_argument("--out", dest="out_dir", help="output directory (default: out)")
    p.add_argument("--format", dest="formats", help="comma-separated subset of csv,json,svg")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gravicaustic", description="Gravitational billiards in a mirror y=f(x).")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("simulate", "bounce a particle and write trajectory.csv / summary.json"),
        ("foci", "sample the foci curve into foci.csv"),
        ("envelope", "sample both envelope branches into envelope.csv"),
    ):
        _common(sub.add_parser(name, help=help_))
    v = sub.add_parser("verify", help="run a verification scenario and write report.json")
    v.add_argument("scenario", nargs="?", help="scenario JSON file")
    v.add_argument("--config", help="scenario JSON file (same as the positional argument)")
    v.add_argument("--out", dest="out_dir", default="out")
    s = sub.add_parser("sweep", help="repeat a run over several values of one field")
    _common(s)
    s.add_argument("--param", required=True, help="field to vary, e.g. L")
    s.add_argument("--values", required=True, help="comma-separated values")
    s.add_argument("--command", dest="sweep_command", default="simulate", choices=sorted(COMMANDS))
    s.add_argument("--jobs", type=int, default=1)
    return ap


_OVERRIDE_KEYS = ("mirror", "x0", "y0", "vx", "vy", "g", "bounces", "L", "H", "k0", "k_range", "domain",
                  "out_dir", "formats")


def _glue_ranges(argv: list[str]) -> list[str]:
    # "--k-range -5:5:11" would read as an unknown option to argparse
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in ("--k-range", "--domain") and i + 1 < len(argv):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = make_parser().parse_args(_glue_ranges(argv))
    try:
        if args.command == "verify":
            path = args.scenario or args.config
            if not path:
                raise ConfigError("verify needs a scenario file")
            return cmd_verify(path, args.out_dir)
        cfg = load_config(args.config, {k: getattr(args, k) for k in _OVERRIDE_KEYS})
        if args.command == "sweep":
            return cmd_sweep(cfg, args.param, [v.strip() for v in args.values.split(",") if v.strip()],
                             args.sweep_command, args.jobs)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GravicausticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
