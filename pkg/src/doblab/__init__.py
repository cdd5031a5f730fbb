"""Discrete-time disturbance observers for servo motion control.

Implements the conventional disturbance observer (zero-order truncation
error dynamics) and the high-performance variant (first-order), together
with a deterministic closed-loop simulator and evaluation metrics.
"""

from .control import PdGains, PolynomialTrajectory, SetPoint, SineTrajectory
from .disturbance import Constant, Parabola, Ramp, Sine, Step, Sum
from .observer import (
    ConvDobState,
    ErrorDynamics,
    HpDobState,
    conv_gain,
    conv_step,
    error_dynamics,
    hp_gains,
    hp_step,
    predicted_ss_error,
)
from .plant import (
    ContinuousModel,
    DiscreteModel,
    ServoParams,
    build_continuous,
    discretize,
    lumped_disturbance,
)
from .sim import (
    ContinuousTruth,
    ConventionalObserver,
    DiscreteNominal,
    DivergenceError,
    HpObserver,
    Scenario,
    Trace,
    run,
)

__version__ = "0.1.0"

__all__ = [
    "PdGains", "PolynomialTrajectory", "SetPoint", "SineTrajectory",
    "Constant", "Parabola", "Ramp", "Sine", "Step", "Sum",
    "ConvDobState", "ErrorDynamics", "HpDobState",
    "conv_gain", "conv_step", "error_dynamics", "hp_gains", "hp_step",
    "predicted_ss_error",
    "ContinuousModel", "DiscreteModel", "ServoParams",
    "build_continuous", "discretize", "lumped_disturbance",
    "ContinuousTruth", "ConventionalObserver", "DiscreteNominal",
    "DivergenceError", "HpObserver", "Scenario", "Trace", "run",
]
