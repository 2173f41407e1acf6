"""
Детерминированная подготовка |0⟩_L кода Стина: кодирование с флаговым
измерением Z3Z5Z6, условное измерение Z1Z2Z4Z7 и коррекция X7.

Кубиты 0..6 хранят данные (кубит i кода = индекс i - 1),
7 - флаговый вспомогательный кубит, 8 - вспомогательный кубит SZ.
"""

import numpy as np

from dsampler.protocols.graph import END, History, Next, ProtocolGraph, Terminate
from dsampler.protocols.steane import DATA, is_logical_failure
from dsampler.sim.circuit import NO_FAULT, Circuit, run_with_faults
from dsampler.sim.tableau import StabilizerState

N_QUBITS = 9
FLAG = 7
SZ_ANCILLA = 8

ENC, SZ, X7, MEAS = "ENC", "SZ", "X7", "MEAS"

# Ведущие кубиты |+⟩ и их цели (нумерация с единицы); последняя цель
# ни одной ветви не равна 7, чтобы висячие ошибки ловились флагом
_PIVOTS = (
    (1, (7, 5, 3)),
    (2, (7, 3, 6)),
    (4, (7, 6, 5)),
)


def encoder() -> Circuit:
    """Кодирующая схема |0⟩_L с флаговым измерением Z3Z5Z6."""
    ops = [("init", "X", p - 1) for p, _ in _PIVOTS]
    ops += [("init", "Z", q - 1) for q in (3, 5, 6, 7)]
    ops.append(("init", "Z", FLAG))
    for pivot, targets in _PIVOTS:
        ops += [("two_qubit_gate", "CNOT", (pivot - 1, t - 1)) for t in targets]
    ops += [("two_qubit_gate", "CNOT", (q - 1, FLAG)) for q in (3, 5, 6)]
    ops.append(("measurement", "Z", FLAG, "flag"))
    return Circuit.build(ENC, N_QUBITS, ops)


def z_check() -> Circuit:
    """Измерение Z1Z2Z4Z7 на вспомогательном кубите."""
    ops = [("init", "Z", SZ_ANCILLA)]
    ops += [("two_qubit_gate", "CNOT", (q - 1, SZ_ANCILLA)) for q in (1, 2, 4, 7)]
    ops.append(("measurement", "Z", SZ_ANCILLA, "syndrome"))
    return Circuit.build(SZ, N_QUBITS, ops)


def x7_correction() -> Circuit:
    return Circuit.build(X7, N_QUBITS, [("single_qubit_gate", "X", 6)])


def data_measurement(name: str = MEAS, n_qubits: int = N_QUBITS) -> Circuit:
    """Разрушающее измерение всех кубитов данных в Z-базисе."""
    ops = [("measurement", "Z", q, f"m{q + 1}") for q in DATA]
    return Circuit.build(name, n_qubits, ops)


def data_bits(record) -> tuple[int, ...]:
    return tuple(record[f"m{q + 1}"] for q in DATA)


def _transition(name: str, history: History):
    record = history[-1][1]
    if name == ENC:
        return Next(SZ) if record["flag"] else Next(MEAS)
    if name == SZ:
        return Next(X7) if record["syndrome"] else Next(MEAS)
    if name == X7:
        return Next(MEAS)
    return Terminate(fail=is_logical_failure(data_bits(record)))


def steane_det_prep() -> ProtocolGraph:
    circuits = {c.name: c for c in (encoder(), z_check(), x7_correction(), data_measurement())}
    return ProtocolGraph(
        name="steane-det-0",
        circuits=circuits,
        root=ENC,
        transition=_transition,
        successors={ENC: (MEAS, SZ), SZ: (X7, MEAS), X7: (MEAS,), MEAS: (END,)},
        ft_order=1,
        max_ft_length=4,
        deterministic_root=True,
        source="steane-det-0",
    )


def encode_zero(rng=None) -> StabilizerState:
    """Состояние после ENC без ошибок: |0⟩_L на кубитах 0..6, флаг измерен в 0."""
    state = StabilizerState(N_QUBITS)
    run_with_faults(state, encoder(), NO_FAULT, rng if rng is not None else np.random.default_rng(0))
    return state
