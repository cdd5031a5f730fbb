"""Trace evaluation: error norms, settling detection, finite-difference
surrogates of the observer forcing terms, and the ultimate-bound envelope."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .observer import ErrorDynamics
from .sim import Trace

# Settling band as a fraction of peak |est_err|; final-window fraction for
# steady-state statistics.
DEFAULT_BAND_FRACTION = 0.02
DEFAULT_WINDOW = 0.2


@dataclass(frozen=True)
class MetricsReport:
    rms_est_err: float
    max_est_err: float
    rms_track_err: float
    max_track_err: float
    settle_step: Optional[int]
    ss_est_err: float

    def lines(self):
        return [
            f"rms_est_err = {self.rms_est_err:.12g}",
            f"max_est_err = {self.max_est_err:.12g}",
            f"rms_track_err = {self.rms_track_err:.12g}",
            f"max_track_err = {self.max_track_err:.12g}",
            f"settle_step = {self.settle_step if self.settle_step is not None else 'none'}",
            f"ss_est_err = {self.ss_est_err:.12g}",
        ]


def first_difference(seq) -> np.ndarray:
    """seq[k+1] - seq[k]; the forcing of the conventional error recursion."""
    seq = np.asarray(seq, dtype=float)
    if seq.size < 2:
        raise ValueError("need at least 2 samples for a first difference")
    return np.diff(seq)


def second_difference(seq) -> np.ndarray:
    """seq[k+1] - 2 seq[k] + seq[k-1]; the forcing of the HP error recursion."""
    seq = np.asarray(seq, dtype=float)
    if seq.size < 3:
        raise ValueError("need at least 3 samples for a second difference")
    return np.diff(seq, n=2)


def settle_step(err, band: float) -> Optional[int]:
    """First index after which |err| stays within the band, or None."""
    err = np.abs(np.asarray(err, dtype=float))
    inside = err <= band
    if not inside[-1]:
        return None
    # last index that is outside the band, +1
    outside = np.nonzero(~inside)[0]
    return 0 if outside.size == 0 else int(outside[-1]) + 1


def evaluate(
    trace: Trace,
    window: float = DEFAULT_WINDOW,
    band_fraction: float = DEFAULT_BAND_FRACTION,
) -> MetricsReport:
    """Summary metrics over a trace.

    ss_est_err is the signed mean over the final `window` fraction so the
    predicted ramp offsets are visible; the settle band is `band_fraction`
    of peak |est_err|.
    """
    if len(trace) == 0:
        raise ValueError("empty trace")
    if not (0 < window <= 0.5):
        raise ValueError(f"window fraction must be in (0, 0.5], got {window}")
    est = trace.est_err
    track = trace.ref_pos - trace.theta
    tail = max(1, int(round(window * len(trace))))
    peak = float(np.max(np.abs(est)))
    return MetricsReport(
        rms_est_err=float(np.sqrt(np.mean(est**2))),
        max_est_err=peak,
        rms_track_err=float(np.sqrt(np.mean(track**2))),
        max_track_err=float(np.max(np.abs(track))),
        settle_step=settle_step(est, band_fraction * peak),
        ss_est_err=float(np.mean(est[-tail:])),
    )


def uub_bound(ed: ErrorDynamics, forcing_sup: float, e0=None, tol: float = 1e-15) -> float:
    """Ultimate bound on the error-recursion state in the max norm.

    Transient term |e0|_inf * max_k |M^k|_inf plus the forced term
    forcing_sup * sum_i |M^i|_inf, with the series summed until the
    increment drops below tol. Requires spectral radius < 1.
    """
    if not ed.stable:
        raise ValueError("error dynamics are not stable; bound is infinite")
    m = ed.matrix
    power = np.eye(m.shape[0])
    series = 0.0
    peak_norm = 0.0
    for _ in range(100_000):
        norm = float(np.max(np.sum(np.abs(power), axis=1)))
        peak_norm = max(peak_norm, norm)
        series += norm
        if norm < tol:
            break
        power = power @ m
    e0_norm = 0.0 if e0 is None else float(np.max(np.abs(np.asarray(e0, dtype=float))))
    return e0_norm * peak_norm + abs(forcing_sup) * series
