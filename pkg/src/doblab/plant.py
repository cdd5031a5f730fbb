"""Servo plant models: continuous state space, ZOH discretization, and the
lumped disturbance that aggregates external torque and parameter mismatch."""

from dataclasses import dataclass, field

import numpy as np

from . import numkit


@dataclass(frozen=True)
class ServoParams:
    """Inertia J (kg m^2) and viscous friction b (N m s/rad)."""

    J: float
    b: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.J) and np.isfinite(self.b)):
            raise ValueError("servo parameters must be finite")
        if self.J <= 0:
            raise ValueError(f"inertia must be positive, got {self.J}")
        if self.b < 0:
            raise ValueError(f"friction must be non-negative, got {self.b}")


@dataclass(frozen=True)
class ContinuousModel:
    """x_dot = A x + B u - D tau_d with x = (position, velocity)."""

    A: np.ndarray
    B: np.ndarray
    D: np.ndarray
    params: ServoParams = field(compare=False)


@dataclass(frozen=True)
class DiscreteModel:
    """Exact ZOH sampling of a ContinuousModel at period Ts."""

    Ad: np.ndarray
    Bd: np.ndarray
    Dd: np.ndarray
    Ts: float


def build_continuous(p: ServoParams) -> ContinuousModel:
    """Continuous servo model for the given parameters."""
    a = np.array([[0.0, 1.0], [0.0, -p.b / p.J]])
    b = np.array([0.0, 1.0 / p.J])
    return ContinuousModel(A=a, B=b, D=b.copy(), params=p)


def discretize(m: ContinuousModel, ts: float) -> DiscreteModel:
    """ZOH discretization: Ad = e^{A Ts}, Bd = Phi(Ts) B, Dd = Phi(Ts) D.

    Dd treats the disturbance as held over the interval, which is the
    observers' model; time-varying truth is handled by substep integration
    in the simulator.
    """
    if ts <= 0:
        raise ValueError(f"sampling period must be positive, got {ts}")
    ad = numkit.expm2(m.A * ts)
    phi = numkit.phi_integral(m.A, ts)
    return DiscreteModel(Ad=ad, Bd=phi @ m.B, Dd=phi @ m.D, Ts=ts)


def lumped_coeffs(truth: ServoParams, nominal: ServoParams) -> tuple[float, float, float]:
    """Coefficients (c_w, c_u, c_tau) so that the lumped disturbance is
    c_w * omega + c_u * u + c_tau * tau_d.

    This is the scalar reduction of projecting the model mismatch onto the
    nominal disturbance channel; exact because the channel is [0, 1/J_n].
    """
    c_w = nominal.J * (truth.b / truth.J - nominal.b / nominal.J)
    c_u = nominal.J * (1.0 / nominal.J - 1.0 / truth.J)
    c_tau = nominal.J / truth.J
    return c_w, c_u, c_tau


def lumped_disturbance(
    truth: ServoParams,
    nominal: ServoParams,
    x,
    u: float,
    tau_d: float,
) -> float:
    """Lumped (nominal) disturbance torque for state x, input u, and external
    torque tau_d. Equals tau_d when truth == nominal."""
    omega = float(np.asarray(x, dtype=float).reshape(-1)[1])
    c_w, c_u, c_tau = lumped_coeffs(truth, nominal)
    return c_w * omega + c_u * u + c_tau * tau_d
