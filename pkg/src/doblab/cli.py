"""Command-line front end: scenario config parsing, experiment execution,
observer comparison, and CSV/metrics emission.

Exit codes: 0 success, 2 config/usage error, 3 runtime divergence.
"""

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import metrics as metrics_mod
from . import observer as observer_mod
from .control import PdGains, PolynomialTrajectory, SetPoint, SineTrajectory
from .disturbance import Constant, Parabola, Ramp, Sine, Step, Sum
from .plant import ServoParams, build_continuous, discretize
from .sim import (
    ContinuousTruth,
    ConventionalObserver,
    DiscreteNominal,
    DivergenceError,
    HpObserver,
    Scenario,
    run,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3

CSV_COLUMNS = [
    "k", "t", "ref_pos", "theta", "omega", "u_pd", "u",
    "tau_d_true", "tau_dn_true", "tau_hat", "est_err",
]


class ConfigError(ValueError):
    """Bad scenario file or option combination."""


# ---------------------------------------------------------------------------
# scenario parsing

def _require(d, key, where):
    if key not in d:
        raise ConfigError(f"missing key {key!r} in {where}")
    return d[key]


def _parse_params(d, where) -> ServoParams:
    try:
        return ServoParams(J=float(_require(d, "J", where)), b=float(d.get("b", 0.0)))
    except ValueError as e:
        raise ConfigError(f"{where}: {e}") from e


def parse_disturbance(d, where="disturbance"):
    kind = _require(d, "type", where)
    if kind == "constant":
        return Constant(amp=float(_require(d, "amp", where)))
    if kind == "step":
        return Step(t0=float(_require(d, "t0", where)), amp=float(_require(d, "amp", where)))
    if kind == "ramp":
        return Ramp(slope=float(_require(d, "slope", where)), t0=float(d.get("t0", 0.0)))
    if kind == "parabola":
        return Parabola(accel=float(_require(d, "accel", where)), t0=float(d.get("t0", 0.0)))
    if kind == "sine":
        return Sine(
            amp=float(_require(d, "amp", where)),
            freq=float(_require(d, "freq", where)),
            phase=float(d.get("phase", 0.0)),
        )
    if kind == "sum":
        terms = _require(d, "terms", where)
        if not terms:
            raise ConfigError(f"{where}: sum needs at least one term")
        return Sum(terms=tuple(parse_disturbance(t, f"{where}.terms") for t in terms))
    raise ConfigError(f"{where}: unknown disturbance type {kind!r}")


def parse_reference(d, where="reference"):
    kind = _require(d, "type", where)
    if kind == "setpoint":
        return SetPoint(pos=float(_require(d, "pos", where)))
    if kind == "sine":
        return SineTrajectory(
            amp=float(_require(d, "amp", where)),
            freq=float(_require(d, "freq", where)),
            phase=float(d.get("phase", 0.0)),
            offset=float(d.get("offset", 0.0)),
        )
    if kind == "polynomial":
        return PolynomialTrajectory(coeffs=tuple(_require(d, "coeffs", where)))
    raise ConfigError(f"{where}: unknown reference type {kind!r}")


def _parse_eig(v, where):
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ConfigError(f"{where}: complex eigenvalue needs [re, im]")
        return complex(float(v[0]), float(v[1]))
    return complex(float(v))


def _parse_eig_str(s, where):
    try:
        parts = [float(p) for p in str(s).split(",")]
    except ValueError as e:
        raise ConfigError(f"{where}: cannot parse eigenvalue {s!r}") from e
    if len(parts) == 1:
        return complex(parts[0])
    if len(parts) == 2:
        return complex(parts[0], parts[1])
    raise ConfigError(f"{where}: expected 're' or 're,im', got {s!r}")


def parse_observer(d, where="observer"):
    if d is None:
        return None
    kind = _require(d, "type", where)
    if kind == "none":
        return None
    if kind == "conventional":
        return ConventionalObserver(k=float(_require(d, "k", where)))
    if kind == "hp":
        return HpObserver(
            lam1=_parse_eig(_require(d, "lambda1", where), where),
            lam2=_parse_eig(_require(d, "lambda2", where), where),
        )
    raise ConfigError(f"{where}: unknown observer type {kind!r}")


def parse_mode(d, where="mode"):
    if d is None:
        return DiscreteNominal()
    kind = _require(d, "type", where)
    if kind == "discrete":
        return DiscreteNominal()
    if kind == "continuous":
        return ContinuousTruth(substeps=int(d.get("substeps", 10)))
    raise ConfigError(f"{where}: unknown mode {kind!r}")


def parse_pd(d, where="pd"):
    try:
        return PdGains(
            Kp=float(_require(d, "Kp", where)),
            Kd=float(_require(d, "Kd", where)),
            derivative_on=d.get("derivative_on", "error"),
            u_max=None if d.get("u_max") is None else float(d["u_max"]),
        )
    except ValueError as e:
        raise ConfigError(f"{where}: {e}") from e


def parse_scenario(doc: dict, observer_override=None) -> Scenario:
    """Build a Scenario from a parsed config document.

    DOBLAB_SEED in the environment overrides the file's seed.
    """
    timing = _require(doc, "timing", "scenario")
    noise = doc.get("noise")
    seed = int(doc.get("seed", 0))
    env_seed = os.environ.get("DOBLAB_SEED")
    if env_seed is not None:
        try:
            seed = int(env_seed)
        except ValueError as e:
            raise ConfigError(f"DOBLAB_SEED must be an integer, got {env_seed!r}") from e
    if observer_override is None:
        obs = parse_observer(doc.get("observer"))
    else:
        obs = parse_observer(observer_override)
    try:
        return Scenario(
            truth=_parse_params(_require(doc, "plant_truth", "scenario"), "plant_truth"),
            nominal=_parse_params(_require(doc, "plant_nominal", "scenario"), "plant_nominal"),
            Ts=float(_require(timing, "Ts", "timing")),
            duration=float(_require(timing, "duration", "timing")),
            mode=parse_mode(doc.get("mode")),
            observer=obs,
            pd=parse_pd(_require(doc, "pd", "scenario")),
            reference=parse_reference(_require(doc, "reference", "scenario")),
            disturbance=parse_disturbance(_require(doc, "disturbance", "scenario")),
            noise_std=0.0 if noise is None else float(noise.get("omega_std", 0.0)),
            seed=seed,
        )
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError(str(e)) from e


def load_config(path) -> dict:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"scenario file not found: {p}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"{p}: invalid JSON at line {e.lineno}: {e.msg}") from e


def _apply_overrides(doc: dict, args) -> dict:
    doc = dict(doc)
    if getattr(args, "mode", None):
        mode = {"type": args.mode}
        if args.mode == "continuous":
            base = doc.get("mode") or {}
            mode["substeps"] = base.get("substeps", 10)
        doc["mode"] = mode
    if getattr(args, "substeps", None):
        mode = dict(doc.get("mode") or {"type": "continuous"})
        mode["substeps"] = args.substeps
        doc["mode"] = mode
    return doc


# ---------------------------------------------------------------------------
# output

def _fmt(v) -> str:
    return f"{v:.17g}"


def write_trace_csv(trace, path):
    """Write the canonical trace CSV: LF endings, 17 significant digits."""
    with open(path, "w", newline="\n") as f:
        f.write(",".join(CSV_COLUMNS) + "\n")
        for i in range(len(trace)):
            row = [str(int(trace.k[i]))] + [
                _fmt(getattr(trace, c)[i]) for c in CSV_COLUMNS[1:]
            ]
            f.write(",".join(row) + "\n")


def write_compare_csv(traces: dict, path):
    """Base columns from the first trace plus suffixed estimate/error
    columns for every observer."""
    names = list(traces)
    first = traces[names[0]]
    header = list(CSV_COLUMNS)
    for name in names:
        header += [f"tau_hat_{name}", f"est_err_{name}"]
    with open(path, "w", newline="\n") as f:
        f.write(",".join(header) + "\n")
        for i in range(len(first)):
            row = [str(int(first.k[i]))] + [
                _fmt(getattr(first, c)[i]) for c in CSV_COLUMNS[1:]
            ]
            for name in names:
                tr = traces[name]
                row += [_fmt(tr.tau_hat[i]), _fmt(tr.est_err[i])]
            f.write(",".join(row) + "\n")


def _print_mat(label, m):
    m = np.asarray(m)
    if m.ndim == 1:
        print(f"{label} = [{', '.join(f'{v:.12g}' for v in m)}]")
    else:
        rows = "; ".join(", ".join(f"{v:.12g}" for v in row) for row in m)
        print(f"{label} = [{rows}]")


# ---------------------------------------------------------------------------
# subcommands

def cmd_discretize(args) -> int:
    p = ServoParams(J=args.J, b=args.b)
    dm = discretize(build_continuous(p), args.Ts)
    _print_mat("Ad", dm.Ad)
    _print_mat("Bd", dm.Bd)
    _print_mat("Dd", dm.Dd)
    print(f"Ts = {dm.Ts:.12g}")
    return EXIT_OK


def cmd_tune(args) -> int:
    p = ServoParams(J=args.J, b=args.b)
    dm = discretize(build_continuous(p), args.Ts)
    if args.observer == "conventional":
        gain = observer_mod.conv_gain(args.k, dm.Dd)
        ed = observer_mod.error_dynamics("conventional", gain, dm.Dd)
        _print_mat("L", gain)
    else:
        lam1 = _parse_eig_str(args.lambda1, "--lambda1")
        lam2 = _parse_eig_str(args.lambda2, "--lambda2")
        l1, l2 = observer_mod.hp_gains(lam1, lam2, dm.Dd, allow_unstable=True)
        ed = observer_mod.error_dynamics("hp", (l1, l2), dm.Dd)
        _print_mat("L1", l1)
        _print_mat("L2", l2)
    lams = [complex(v) for v in np.linalg.eigvals(ed.matrix)]
    print("eigenvalues = " + ", ".join(f"{v.real:.12g}{v.imag:+.12g}j" for v in lams))
    print(f"spectral_radius = {ed.spectral_radius:.12g}")
    if ed.spectral_radius < 1.0 - 1e-12:
        verdict = "stable (deadbeat)" if ed.spectral_radius == 0.0 else "stable"
    elif ed.spectral_radius <= 1.0 + 1e-12:
        verdict = "marginal"
    else:
        verdict = "unstable"
    print(f"verdict = {verdict}")
    if verdict == "unstable":
        print("warning: estimation error will diverge with these gains")
    return EXIT_OK


def _emit_set(args):
    return set((args.emit or "trace,metrics,summary").split(","))


def cmd_sim(args) -> int:
    doc = _apply_overrides(load_config(args.config), args)
    sc = parse_scenario(doc)
    trace = run(sc)
    report = metrics_mod.evaluate(trace)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    emit = _emit_set(args)
    if "trace" in emit:
        write_trace_csv(trace, out / "trace.csv")
    if "metrics" in emit:
        (out / "metrics.txt").write_text("\n".join(report.lines()) + "\n")
    if "summary" in emit:
        print(f"steps = {len(trace)}")
        for line in report.lines():
            print(line)
    return EXIT_OK


def cmd_compare(args) -> int:
    doc = _apply_overrides(load_config(args.config), args)
    observers = doc.get("observers")
    if not observers or len(observers) < 2:
        raise ConfigError("compare config needs an 'observers' list with >= 2 entries")
    base_ts = float(_require(_require(doc, "timing", "scenario"), "Ts", "timing"))
    traces = {}
    reports = {}
    for i, entry in enumerate(observers):
        entry = dict(entry)
        name = entry.pop("name", None) or f"obs{i}"
        if name in traces:
            name = f"{name}_{i}"
        if "Ts" in entry and float(entry.pop("Ts")) != base_ts:
            raise ConfigError(f"observer {name!r}: mismatched Ts across compare configs")
        sc = parse_scenario(doc, observer_override=entry)
        traces[name] = run(sc)
        reports[name] = metrics_mod.evaluate(traces[name])
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    emit = _emit_set(args)
    if "trace" in emit:
        write_compare_csv(traces, out / "compare.csv")
    ranked = sorted(reports, key=lambda n: reports[n].rms_est_err)
    lines = ["ranked by rms_est_err:"]
    prev = None
    for name in ranked:
        r = reports[name]
        margin = ""
        if prev is not None and r.rms_est_err > 0:
            margin = f"  margin_vs_prev = {100.0 * (1.0 - prev / r.rms_est_err):.1f}%"
        lines.append(
            f"{name}: rms_est_err = {r.rms_est_err:.12g}  "
            f"rms_track_err = {r.rms_track_err:.12g}  "
            f"ss_est_err = {r.ss_est_err:.12g}{margin}"
        )
        prev = r.rms_est_err
    if "metrics" in emit:
        (out / "summary.txt").write_text("\n".join(lines) + "\n")
    if "summary" in emit:
        for line in lines:
            print(line)
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="doblab",
        description="Discrete-time disturbance-observer simulation toolbox",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    d = sub.add_parser("discretize", help="print the ZOH-discretized servo model")
    d.add_argument("--J", type=float, required=True)
    d.add_argument("--b", type=float, default=0.0)
    d.add_argument("--Ts", type=float, required=True)
    d.set_defaults(func=cmd_discretize)

    t = sub.add_parser("tune", help="build observer gains and report stability")
    t.add_argument("observer", choices=["conventional", "hp"])
    t.add_argument("--k", type=float, default=0.5, help="conventional gain parameter")
    t.add_argument("--lambda1", default="0", help="HP desired eigenvalue (re or re,im)")
    t.add_argument("--lambda2", default="0")
    t.add_argument("--J", type=float, required=True)
    t.add_argument("--b", type=float, default=0.0)
    t.add_argument("--Ts", type=float, required=True)
    t.set_defaults(func=cmd_tune)

    s = sub.add_parser("sim", help="run one scenario, write trace.csv + metrics.txt")
    s.add_argument("--config", required=True)
    s.add_argument("--out", default=None)
    s.add_argument("--mode", choices=["discrete", "continuous"], default=None)
    s.add_argument("--substeps", type=int, default=None)
    s.add_argument("--emit", default=None, help="comma list: trace,metrics,summary")
    s.set_defaults(func=cmd_sim)

    c = sub.add_parser("compare", help="run multiple observers on one scenario")
    c.add_argument("--config", required=True)
    c.add_argument("--out", default=None)
    c.add_argument("--mode", choices=["discrete", "continuous"], default=None)
    c.add_argument("--substeps", type=int, default=None)
    c.add_argument("--emit", default=None)
    c.set_defaults(func=cmd_compare)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ConfigError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DIVERGED


if __name__ == "__main__":
    sys.exit(main())
