"""Conventional and high-performance disturbance observers.

Both observers estimate the lumped disturbance from measured state and
applied input via auxiliary-variable recursions. The conventional observer
has scalar error dynamics forced by the first difference of the sampled
disturbance; the high-performance observer has 2x2 error dynamics forced by
the second difference, so ramps are tracked without bias.

Estimates are produced from the pre-update internal state:
tau_hat_k = z_hat_k - L . x_k, then the state advances using (x_k, u_k).
"""

from dataclasses import dataclass, replace

import numpy as np

from . import numkit
from .plant import DiscreteModel


@dataclass(frozen=True)
class ConvDobState:
    """Conventional observer: one auxiliary estimate and its gain."""

    L: np.ndarray
    z_hat: float = 0.0


@dataclass(frozen=True)
class HpDobState:
    """High-performance observer: two auxiliary estimates and gains."""

    L1: np.ndarray
    L2: np.ndarray
    z1_hat: float = 0.0
    z2_hat: float = 0.0


@dataclass(frozen=True)
class ErrorDynamics:
    """Error propagation matrix and its spectral radius.

    kind is "conventional" (scalar coefficient embedded as 1x1) or "hp"
    (the 2x2 matrix whose eigenvalues the gains assign).
    """

    kind: str
    matrix: np.ndarray
    spectral_radius: float

    @property
    def stable(self) -> bool:
        return self.spectral_radius < 1.0


def conv_gain(k: float, dd) -> np.ndarray:
    """Conventional gain L = k / |Dd|_1 * [1, 1], so L . Dd = k when Dd has
    non-negative entries."""
    dd = numkit.as_vec2(dd)
    norm1 = np.sum(np.abs(dd))
    if norm1 == 0.0:
        raise ValueError("disturbance input vector is zero; cannot scale gain")
    return (k / norm1) * np.ones(2)


def hp_gains(lam1, lam2, dd, *, allow_unstable: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Gains placing the HP error-matrix eigenvalues at (lam1, lam2).

    The dot products are pinned by the requested eigenvalues:
    L1 . Dd = 1 - lam1*lam2 and L2 . Dd = 2 - lam1 - lam2; the direction is
    fixed to [1, 1]. Complex requests must form a conjugate pair so both
    right-hand sides stay real.
    """
    lam1, lam2 = complex(lam1), complex(lam2)
    if lam1.imag != 0.0 or lam2.imag != 0.0:
        if abs(lam1 - lam2.conjugate()) > 1e-12:
            raise ValueError("complex eigenvalues must form a conjugate pair")
    if not allow_unstable and max(abs(lam1), abs(lam2)) >= 1.0:
        raise ValueError(
            "requested eigenvalues lie on or outside the unit circle; "
            "pass allow_unstable=True to build the gains anyway"
        )
    dd = numkit.as_vec2(dd)
    norm1 = np.sum(np.abs(dd))
    if norm1 == 0.0:
        raise ValueError("disturbance input vector is zero; cannot scale gains")
    k1 = (1.0 - lam1 * lam2).real
    k2 = (2.0 - lam1 - lam2).real
    direction = np.ones(2) / norm1
    return k1 * direction, k2 * direction


def init_conv(L, x0=(0.0, 0.0)) -> ConvDobState:
    """Zero initial disturbance estimate: z_hat0 = L . x0."""
    L = numkit.as_vec2(L)
    return ConvDobState(L=L, z_hat=float(L @ numkit.as_vec2(x0)))


def init_hp(L1, L2, x0=(0.0, 0.0)) -> HpDobState:
    """Zero initial disturbance estimates for both auxiliary variables."""
    L1, L2 = numkit.as_vec2(L1), numkit.as_vec2(L2)
    x0 = numkit.as_vec2(x0)
    return HpDobState(L1=L1, L2=L2, z1_hat=float(L1 @ x0), z2_hat=float(L2 @ x0))


def conv_step(s: ConvDobState, x, u: float, dm: DiscreteModel) -> tuple[ConvDobState, float]:
    """One conventional-observer update.

    Returns the advanced state and the estimate tau_hat_k computed from the
    pre-update state.
    """
    x = numkit.as_vec2(x)
    L, dd = s.L, dm.Dd
    tau_hat = s.z_hat - float(L @ x)
    ld = float(L @ dd)
    z_next = (
        (1.0 - ld) * s.z_hat
        + float(L @ (dm.Ad @ x) + ld * (L @ x) - L @ x)
        + float(L @ dm.Bd) * u
    )
    return replace(s, z_hat=z_next), tau_hat


def hp_step(s: HpDobState, x, u: float, dm: DiscreteModel) -> tuple[HpDobState, float]:
    """One high-performance-observer update (both auxiliary estimates).

    Returns the advanced state and tau_hat_k = z2_hat_k - L2 . x_k from the
    pre-update state.
    """
    x = numkit.as_vec2(x)
    L1, L2, dd = s.L1, s.L2, dm.Dd
    tau_hat = s.z2_hat - float(L2 @ x)
    l1d = float(L1 @ dd)
    l2d = float(L2 @ dd)
    l1x = float(L1 @ x)
    l2x = float(L2 @ x)
    l1ax = float(L1 @ (dm.Ad @ x))
    l2ax = float(L2 @ (dm.Ad @ x))
    z1_next = (1.0 - l1d) * s.z2_hat + float(L1 @ dm.Bd) * u + (l1ax + l1d * l2x - l2x)
    z2_next = (
        -s.z1_hat
        + (2.0 - l2d) * s.z2_hat
        + float(L2 @ dm.Bd) * u
        + (l1x + l2ax + l2d * l2x - 2.0 * l2x)
    )
    return replace(s, z1_hat=z1_next, z2_hat=z2_next), tau_hat


def error_dynamics(kind: str, gains, dd) -> ErrorDynamics:
    """Error propagation matrix for the given observer configuration.

    kind "conventional": gains is the vector L, matrix is [[1 - L . Dd]].
    kind "hp": gains is (L1, L2), matrix is
    [[0, 1 - L1 . Dd], [-1, 2 - L2 . Dd]].
    """
    dd = numkit.as_vec2(dd)
    if kind == "conventional":
        L = numkit.as_vec2(gains)
        coeff = 1.0 - float(L @ dd)
        return ErrorDynamics(kind=kind, matrix=np.array([[coeff]]), spectral_radius=abs(coeff))
    if kind == "hp":
        L1, L2 = (numkit.as_vec2(g) for g in gains)
        m = np.array([[0.0, 1.0 - float(L1 @ dd)], [-1.0, 2.0 - float(L2 @ dd)]])
        return ErrorDynamics(kind=kind, matrix=m, spectral_radius=numkit.spectral_radius(m))
    raise ValueError(f"unknown observer kind {kind!r}")


def predicted_ss_error(ed: ErrorDynamics, ts: float, signal_class: str, rate: float) -> float:
    """Steady-state estimation error predicted by the error recursion.

    signal_class "ramp" takes rate = slope (N m/s): the conventional
    observer settles to slope*Ts / (L . Dd) while the HP observer settles to
    zero. signal_class "parabola" takes rate = accel (N m/s^2) and is only
    defined for the HP observer: accel*Ts^2 / ((1-lam1)(1-lam2)).
    """
    if not ed.stable:
        raise ValueError("error dynamics are not stable; no finite steady state")
    if ts <= 0:
        raise ValueError(f"sampling period must be positive, got {ts}")
    if ed.kind == "conventional":
        if signal_class == "ramp":
            coeff = float(ed.matrix[0, 0])  # 1 - L . Dd
            return rate * ts / (1.0 - coeff)
        raise ValueError(
            "conventional observer has no bounded steady state for "
            f"signal class {signal_class!r}"
        )
    if ed.kind == "hp":
        if signal_class == "ramp":
            return 0.0
        if signal_class == "parabola":
            lam1, lam2 = numkit.eig2(ed.matrix)
            det = ((1.0 - lam1) * (1.0 - lam2)).real
            return rate * ts * ts / det
        raise ValueError(f"unknown signal class {signal_class!r}")
    raise ValueError(f"unknown observer kind {ed.kind!r}")
