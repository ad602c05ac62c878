"""1D shallow water + Exner sediment solver with semi-implicit IMEX stepping."""

from .boundary import BoundaryStrategy, SimpleWaveState, WaveTrainForcing
from .driver import (
    ReflectionMetric,
    RunConfig,
    RunResult,
    StepDiagnostics,
    reflection_metric,
    run,
)
from .model import EigenTriple, PhysicalParams, PrimitiveCell
from .spatial import Grid
from .stepper import ImexTableau, State, first_order_step, second_order_step

__version__ = "0.1.0"

__all__ = [
    "BoundaryStrategy",
    "EigenTriple",
    "Grid",
    "ImexTableau",
    "PhysicalParams",
    "PrimitiveCell",
    "ReflectionMetric",
    "RunConfig",
    "RunResult",
    "SimpleWaveState",
    "State",
    "StepDiagnostics",
    "WaveTrainForcing",
    "first_order_step",
    "reflection_metric",
    "run",
    "second_order_step",
]
