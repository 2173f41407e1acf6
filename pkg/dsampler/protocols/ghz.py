"""
Подготовка пятикубитного GHZ-состояния с флаговой проверкой.
"""

from dsampler.protocols.graph import END, History, ProtocolGraph, Terminate
from dsampler.sim.circuit import Circuit

GHZ = "GHZ"


def ghz_circuit() -> Circuit:
    """
    Лестница H(0), CNOT(0,1), CNOT(1,2), CNOT(2,3) и проверка чётности
    Z_0 Z_3 на флаговом кубите 4.
    """
    ops = [("init", "Z", q) for q in range(5)]
    ops += [
        ("single_qubit_gate", "H", 0),
        ("two_qubit_gate", "CNOT", (0, 1)),
        ("two_qubit_gate", "CNOT", (1, 2)),
        ("two_qubit_gate", "CNOT", (2, 3)),
        ("two_qubit_gate", "CNOT", (0, 4)),
        ("two_qubit_gate", "CNOT", (3, 4)),
        ("measurement", "Z", 4, "flag"),
    ]
    return Circuit.build(GHZ, 5, ops)


def _transition(name: str, history: History) -> Terminate:
    _, record = history[-1]
    return Terminate(fail=record["flag"] == 1)


def ghz_protocol() -> ProtocolGraph:
    """Отказ протокола = срабатывание флага."""
    return ProtocolGraph(
        name="ghz",
        circuits={GHZ: ghz_circuit()},
        root=GHZ,
        transition=_transition,
        successors={GHZ: (END,)},
        ft_order=0,
        max_ft_length=1,
        deterministic_root=True,
        source="ghz",
    )
