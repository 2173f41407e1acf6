"""
Фикстуры для тестов.
"""

import numpy as np
import pytest

from dsampler.protocols.det_prep import steane_det_prep
from dsampler.protocols.flag_prep import steane_flag_prep
from dsampler.protocols.ghz import ghz_protocol
from dsampler.sampling.tree import SampleTree, TraceStep
from dsampler.sim.circuit import Circuit
from dsampler.sim.noise import NoiseParams


@pytest.fixture
def rng():
    """Генератор с фиксированным зерном."""
    return np.random.default_rng(1234)


@pytest.fixture
def ghz():
    """Встроенный GHZ-протокол."""
    return ghz_protocol()


@pytest.fixture
def det_prep():
    """Детерминированная подготовка |0⟩_L."""
    return steane_det_prep()


@pytest.fixture
def flag_prep():
    """Подготовка |0⟩_L флаговыми измерениями."""
    return steane_flag_prep()


@pytest.fixture
def single_noise():
    """Одна вероятность p = 1e-3 для всех мест."""
    return NoiseParams.single_parameter(1e-3)


@pytest.fixture
def bell_circuit():
    """Белловская пара с измерением обоих кубитов."""
    return Circuit.build("BELL", 2, [
        ("init", "Z", 0),
        ("init", "Z", 1),
        ("single_qubit_gate", "H", 0),
        ("two_qubit_gate", "CNOT", (0, 1)),
        ("measurement", "Z", 0, "a"),
        ("measurement", "Z", 1, "b"),
    ])


@pytest.fixture
def branching_tree():
    """
    Синтетическое дерево из трёх схем A -> B -> C (45 выстрелов).

    A: w=(0,) всегда NOFAIL, w=(1,) в B или FAIL; B: w=(0,) в C или NOFAIL,
    w=(1,) FAIL/NOFAIL; C: w=(0,) NOFAIL, w=(1,) FAIL/NOFAIL.
    """
    tree = SampleTree("synthetic", "A", {"A": (4,), "B": (3,), "C": (2,)}, ("p",))
    a1_b = [TraceStep("A", (1,), "B")]
    b0_c = a1_b + [TraceStep("B", (0,), "C")]
    traces = [[TraceStep("A", (0,), "NOFAIL")]] * 20
    traces += [a1_b + [TraceStep("B", (0,), "NOFAIL")]] * 6
    traces += [b0_c + [TraceStep("C", (0,), "NOFAIL")]] * 4
    traces += [b0_c + [TraceStep("C", (1,), "FAIL")]] * 2
    traces += [b0_c + [TraceStep("C", (1,), "NOFAIL")]] * 3
    traces += [a1_b + [TraceStep("B", (1,), "FAIL")]] * 2
    traces += [a1_b + [TraceStep("B", (1,), "NOFAIL")]] * 5
    traces += [[TraceStep("A", (1,), "FAIL")]] * 3
    for trace in traces:
        tree.record_shot(trace)
    return tree
