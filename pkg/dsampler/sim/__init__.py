"""
Стабилизаторная симуляция схем с ошибками.
"""

from dsampler.sim.circuit import (
    NO_FAULT,
    Circuit,
    FaultEvent,
    Location,
    MeasurementRecord,
    run_with_faults,
)
from dsampler.sim.noise import (
    Category,
    NoiseParams,
    draw_mc_fault,
    draw_subset_fault,
    shot_rng,
)
from dsampler.sim.pauli import PauliOperator
from dsampler.sim.serialize import dump_circuit, load_circuit, parse_circuit
from dsampler.sim.tableau import StabilizerState

__all__ = [
    "NO_FAULT",
    "Circuit",
    "FaultEvent",
    "Location",
    "MeasurementRecord",
    "run_with_faults",
    "Category",
    "NoiseParams",
    "draw_mc_fault",
    "draw_subset_fault",
    "shot_rng",
    "PauliOperator",
    "dump_circuit",
    "load_circuit",
    "parse_circuit",
    "StabilizerState",
]
