"""Deterministic fixed-step closed-loop simulation.

Couples the servo plant, a disturbance signal, the outer-loop PD controller,
and an optional disturbance observer. Two plant modes:

* DiscreteNominal -- the plant IS the nominal discrete model driven by the
  lumped disturbance. Observer error recursions hold exactly here.
* ContinuousTruth -- the true continuous plant propagated exactly per
  substep with the disturbance held at the substep midpoint (the only
  approximation; O(h^2) in the substep length).
"""

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import _kernels, numkit, observer
from .control import PdGains, Reference
from .disturbance import DisturbanceSignal
from .plant import ServoParams, build_continuous, discretize, lumped_coeffs


class DivergenceError(RuntimeError):
    """Plant state exceeded the divergence limit."""

    def __init__(self, step: int):
        super().__init__(f"simulation diverged at step {step}")
        self.step = step


@dataclass(frozen=True)
class DiscreteNominal:
    pass


@dataclass(frozen=True)
class ContinuousTruth:
    substeps: int = 10

    def __post_init__(self):
        if self.substeps < 1:
            raise ValueError("substeps must be >= 1")


SimMode = Union[DiscreteNominal, ContinuousTruth]


@dataclass(frozen=True)
class ConventionalObserver:
    k: float


@dataclass(frozen=True)
class HpObserver:
    lam1: complex
    lam2: complex


ObserverConfig = Union[ConventionalObserver, HpObserver]


@dataclass(frozen=True)
class Scenario:
    truth: ServoParams
    nominal: ServoParams
    Ts: float
    duration: float
    mode: SimMode
    observer: Optional[ObserverConfig]
    pd: PdGains
    reference: Reference
    disturbance: DisturbanceSignal
    noise_std: float = 0.0
    seed: int = 0
    x0: tuple = (0.0, 0.0)

    def __post_init__(self):
        if self.Ts <= 0:
            raise ValueError(f"sampling period must be positive, got {self.Ts}")
        if self.duration <= self.Ts:
            raise ValueError("duration must exceed the sampling period")
        if self.noise_std < 0:
            raise ValueError("noise std must be non-negative")


@dataclass
class Trace:
    """Per-step record of the closed loop on the uniform grid t = k Ts."""

    k: np.ndarray
    t: np.ndarray
    ref_pos: np.ndarray
    ref_vel: np.ndarray
    theta: np.ndarray
    omega: np.ndarray
    u_pd: np.ndarray
    u: np.ndarray
    tau_d_true: np.ndarray
    tau_dn_true: np.ndarray
    tau_hat: np.ndarray
    est_err: np.ndarray

    def __len__(self):
        return len(self.k)


def _observer_setup(sc: Scenario, dd: np.ndarray):
    """Map the scenario's observer config onto kernel gain vectors."""
    zeros = np.zeros(2)
    if sc.observer is None:
        return _kernels.OBS_NONE, zeros, zeros, zeros
    if isinstance(sc.observer, ConventionalObserver):
        return _kernels.OBS_CONV, observer.conv_gain(sc.observer.k, dd), zeros, zeros
    if isinstance(sc.observer, HpObserver):
        l1, l2 = observer.hp_gains(sc.observer.lam1, sc.observer.lam2, dd)
        return _kernels.OBS_HP, zeros, l1, l2
    raise TypeError(f"unknown observer config {sc.observer!r}")


def run(sc: Scenario) -> Trace:
    """Run a scenario and return its trace.

    Deterministic for a fixed scenario (including seed). Raises
    DivergenceError naming the step if the state blows up.
    """
    n = int(np.floor(sc.duration / sc.Ts)) + 1
    t = np.arange(n) * sc.Ts

    nominal_d = discretize(build_continuous(sc.nominal), sc.Ts)
    obs_kind, gl, gl1, gl2 = _observer_setup(sc, nominal_d.Dd)

    if isinstance(sc.mode, ContinuousTruth):
        mode = _kernels.MODE_CONTINUOUS
        substeps = sc.mode.substeps
        h = sc.Ts / substeps
        truth_c = build_continuous(sc.truth)
        ah = numkit.expm2(truth_c.A * h)
        phi = numkit.phi_integral(truth_c.A, h)
        bh, dh = phi @ truth_c.B, phi @ truth_c.D
        mids = t[:-1, None] + (np.arange(substeps) + 0.5) * h
        tau_mid = np.asarray(sc.disturbance.at(mids), dtype=float)
    else:
        mode = _kernels.MODE_DISCRETE
        substeps = 1
        ah, bh, dh = nominal_d.Ad, nominal_d.Bd, nominal_d.Dd
        tau_mid = np.zeros((1, 1))

    ref_pos, ref_vel = sc.reference.at(t)
    ref_pos = np.ascontiguousarray(ref_pos, dtype=float)
    ref_vel = np.ascontiguousarray(ref_vel, dtype=float)
    tau_samples = np.asarray(sc.disturbance.at(t), dtype=float)

    if sc.noise_std > 0:
        rng = np.random.default_rng(sc.seed)
        noise = rng.normal(0.0, sc.noise_std, n)
    else:
        noise = np.zeros(n)

    c_w, c_u, c_tau = lumped_coeffs(sc.truth, sc.nominal)
    u_max = sc.pd.u_max if sc.pd.u_max is not None else np.inf

    theta = np.empty(n)
    omega = np.empty(n)
    u_pd = np.empty(n)
    u = np.empty(n)
    tau_hat = np.empty(n)
    tau_dn = np.empty(n)

    status = _kernels.sim_loop(
        mode,
        nominal_d.Ad, nominal_d.Bd, nominal_d.Dd,
        ah, bh, dh, substeps,
        tau_samples, tau_mid, ref_pos, ref_vel, noise,
        c_w, c_u, c_tau,
        sc.pd.Kp, sc.pd.Kd, sc.pd.derivative_on == "error", float(u_max),
        obs_kind, gl, gl1, gl2,
        np.asarray(sc.x0, dtype=float),
        theta, omega, u_pd, u, tau_hat, tau_dn,
    )
    if status >= 0:
        raise DivergenceError(status)

    return Trace(
        k=np.arange(n),
        t=t,
        ref_pos=ref_pos,
        ref_vel=ref_vel,
        theta=theta,
        omega=omega,
        u_pd=u_pd,
        u=u,
        tau_d_true=tau_samples,
        tau_dn_true=tau_dn,
        tau_hat=tau_hat,
        est_err=tau_dn - tau_hat,
    )


def step_plant_continuous(model, x, u: float, sig: DisturbanceSignal, t: float, h: float):
    """Propagate the continuous plant over [t, t+h] with u held and the
    disturbance held at its midpoint value. Exact for constant disturbances."""
    if h <= 0:
        raise ValueError(f"substep must be positive, got {h}")
    ah = numkit.expm2(model.A * h)
    phi = numkit.phi_integral(model.A, h)
    td = float(sig.at(t + h / 2.0))
    return ah @ numkit.as_vec2(x) + (phi @ model.B) * u - (phi @ model.D) * td
