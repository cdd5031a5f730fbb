"""Outer-loop PD controller, reference trajectories, and the inner-loop
disturbance compensation law."""

from dataclasses import dataclass
from typing import Union

import numpy as np


@dataclass(frozen=True)
class PdGains:
    Kp: float
    Kd: float
    # "error" feeds the reference velocity into the derivative term;
    # "measurement" damps measured velocity only.
    derivative_on: str = "error"
    u_max: float | None = None  # symmetric saturation, None = off

    def __post_init__(self):
        if self.Kp < 0 or self.Kd < 0:
            raise ValueError("PD gains must be non-negative")
        if self.derivative_on not in ("error", "measurement"):
            raise ValueError(f"unknown derivative mode {self.derivative_on!r}")
        if self.u_max is not None and self.u_max <= 0:
            raise ValueError("saturation limit must be positive")


@dataclass(frozen=True)
class SetPoint:
    pos: float

    def at(self, t):
        t = np.asarray(t, dtype=float)
        return self.pos * np.ones_like(t), np.zeros_like(t)


@dataclass(frozen=True)
class SineTrajectory:
    """pos = offset + amp * sin(2 pi f t + phase); velocity is analytic."""

    amp: float
    freq: float
    phase: float = 0.0
    offset: float = 0.0

    def at(self, t):
        t = np.asarray(t, dtype=float)
        w = 2.0 * np.pi * self.freq
        pos = self.offset + self.amp * np.sin(w * t + self.phase)
        vel = self.amp * w * np.cos(w * t + self.phase)
        return pos, vel


@dataclass(frozen=True)
class PolynomialTrajectory:
    """pos = sum coeffs[i] * t^i; velocity is the analytic derivative."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    def at(self, t):
        t = np.asarray(t, dtype=float)
        c = np.array(self.coeffs[::-1])
        pos = np.polyval(c, t)
        vel = np.polyval(np.polyder(c), t) if len(self.coeffs) > 1 else np.zeros_like(t)
        return pos, vel


Reference = Union[SetPoint, SineTrajectory, PolynomialTrajectory]


def pd_control(g: PdGains, ref_pos: float, ref_vel: float, x) -> float:
    """PD torque on the tracking error."""
    theta, omega = float(x[0]), float(x[1])
    vel_term = (ref_vel - omega) if g.derivative_on == "error" else -omega
    return g.Kp * (ref_pos - theta) + g.Kd * vel_term


def compensate(u_pd: float, tau_hat: float, u_max: float | None = None) -> float:
    """Add the disturbance estimate to the PD command; the nominal model's
    input and disturbance channels coincide, so this cancels the lumped
    disturbance when the estimate is exact. Optional symmetric saturation."""
    u = u_pd + tau_hat
    if u_max is not None:
        u = float(np.clip(u, -u_max, u_max))
    return u
