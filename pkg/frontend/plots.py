#!/usr/bin/env python3
"""Render figures from doblab trace / comparison CSVs.

Figure kinds:
  position       reference and measured position vs time
  disturbance    true disturbances and the observer estimate vs time
  error-compare  one estimation-error curve per observer column

Usage: plots.py --csv trace.csv --kind position --out position.png
The CSVs are the unmodified output of `doblab sim` / `doblab compare`;
nothing is recomputed here.
"""

import argparse
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


class FigureError(RuntimeError):
    pass


def load_csv(path):
    try:
        df = pd.read_csv(path)
    except (FileNotFoundError, pd.errors.EmptyDataError) as e:
        raise FigureError(f"cannot read {path}: {e}") from e
    if len(df) == 0:
        raise FigureError(f"{path} contains no data rows")
    return df


def need(df, *columns):
    for col in columns:
        if col not in df.columns:
            raise FigureError(f"missing column {col!r}")
    return [df[c].to_numpy() for c in columns]


def plot_position(df, ax, title):
    t, ref, theta = need(df, "t", "ref_pos", "theta")
    ax.plot(t, ref, "k--", label="reference")
    ax.plot(t, theta, label="position")
    ax.set_ylabel("position [rad]")
    ax.set_title(title or "Position response")


def plot_disturbance(df, ax, title):
    t, tau_d, tau_dn, tau_hat = need(df, "t", "tau_d_true", "tau_dn_true", "tau_hat")
    ax.plot(t, tau_d, label="external torque")
    ax.plot(t, tau_dn, label="lumped disturbance")
    ax.plot(t, tau_hat, "--", label="estimate")
    ax.set_ylabel("torque [N m]")
    ax.set_title(title or "Disturbance and estimate")


def plot_error_compare(df, ax, title):
    (t,) = need(df, "t")
    suffixed = [c for c in df.columns if c.startswith("est_err_")]
    if suffixed:
        for col in suffixed:
            ax.plot(t, df[col].to_numpy(), label=col[len("est_err_"):])
    else:
        (err,) = need(df, "est_err")
        ax.plot(t, err, label="est_err")
    ax.set_ylabel("estimation error [N m]")
    ax.set_title(title or "Disturbance estimation error")


KINDS = {
    "position": plot_position,
    "disturbance": plot_disturbance,
    "error-compare": plot_error_compare,
}


def render(csv_path, kind, out_path, title=None):
    if kind not in KINDS:
        raise FigureError(f"unknown figure kind {kind!r}")
    df = load_csv(csv_path)
    fig, ax = plt.subplots(figsize=(8, 4.5))
    KINDS[kind](df, ax, title)
    ax.set_xlabel("time [s]")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--csv", required=True, help="trace or comparison CSV")
    ap.add_argument("--kind", required=True, choices=sorted(KINDS))
    ap.add_argument("--out", required=True, help="output image path (png/svg/pdf)")
    ap.add_argument("--title", default=None)
    args = ap.parse_args(argv)
    try:
        render(args.csv, args.kind, args.out, title=args.title)
    except FigureError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
