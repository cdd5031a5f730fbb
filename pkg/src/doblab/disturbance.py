"""Composable disturbance-torque signals.

Each signal is an immutable value with an `at(t)` method; `Sum` composes.
Step-like signals switch on at t >= t0 so sampled sequences are unambiguous
at the sample instants.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np


@dataclass(frozen=True)
class Constant:
    amp: float

    def at(self, t):
        return self.amp * np.ones_like(np.asarray(t, dtype=float))


@dataclass(frozen=True)
class Step:
    t0: float
    amp: float

    def at(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t >= self.t0, self.amp, 0.0)


@dataclass(frozen=True)
class Ramp:
    slope: float
    t0: float = 0.0

    def at(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t >= self.t0, self.slope * (t - self.t0), 0.0)


@dataclass(frozen=True)
class Parabola:
    """0.5 * accel * (t - t0)^2 for t >= t0; `accel` is the literal second
    derivative, matching the finite-difference oracles."""

    accel: float
    t0: float = 0.0

    def at(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t >= self.t0, 0.5 * self.accel * (t - self.t0) ** 2, 0.0)


@dataclass(frozen=True)
class Sine:
    amp: float
    freq: float
    phase: float = 0.0

    def __post_init__(self):
        if self.freq < 0:
            raise ValueError(f"frequency must be non-negative, got {self.freq}")

    def at(self, t):
        t = np.asarray(t, dtype=float)
        return self.amp * np.sin(2.0 * np.pi * self.freq * t + self.phase)


@dataclass(frozen=True)
class Sum:
    terms: tuple

    def __post_init__(self):
        if len(self.terms) == 0:
            raise ValueError("Sum needs at least one term")
        object.__setattr__(self, "terms", tuple(self.terms))

    def at(self, t):
        out = self.terms[0].at(t)
        for term in self.terms[1:]:
            out = out + term.at(t)
        return out


DisturbanceSignal = Union[Constant, Step, Ramp, Parabola, Sine, Sum]


def evaluate(sig: DisturbanceSignal, t: float) -> float:
    """Disturbance torque at time t (scalar)."""
    return float(sig.at(t))


def sample_sequence(sig: DisturbanceSignal, ts: float, n: int) -> np.ndarray:
    """Samples at t = 0, Ts, ..., (n-1) Ts."""
    if ts <= 0:
        raise ValueError(f"sampling period must be positive, got {ts}")
    if n < 1:
        raise ValueError(f"need at least one sample, got {n}")
    return np.asarray(sig.at(np.arange(n) * ts), dtype=float)
