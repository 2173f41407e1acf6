"""
Подготовка |0⟩_L кода Стина последовательными флаговыми измерениями
X-стабилизаторов.

Кубиты 0..6 хранят данные, 7 - синдромный кубит s, 8 - флаговый кубит f.
Порядок схем: SX1a, SX2a, SX3a, SX1b, SX2b, SX3b. После каждой схемы:
  - флаг сработал -> NFS (полное нефлаговое измерение синдрома);
  - во втором раунде синдром не совпал с первым -> NFS;
  - после SX3b -> MEAS, иначе следующая SX.
В MEAS X-коррекция берётся по Z-синдрому из NFS: совпадение с множеством
ошибок флага, иначе табличный декодер.
"""

from dsampler.protocols.det_prep import data_bits, data_measurement
from dsampler.protocols.graph import END, History, Next, ProtocolGraph, Terminate
from dsampler.protocols.steane import (
    DATA,
    SUPPORTS,
    apply_x_correction,
    flag_error_set,
    is_logical_failure,
    lookup_decode,
    single_qubit_x,
)
from dsampler.sim.circuit import Circuit

N_QUBITS = 9
SYNDROME = 7
FLAG = 8

ORDER = ("SX1a", "SX2a", "SX3a", "SX1b", "SX2b", "SX3b")
NFS, MEAS = "NFS", "MEAS"


def flag_circuit(name: str, stabilizer: int, init_data: bool = False) -> Circuit:
    """
    Флаговое измерение X-стабилизатора K_stabilizer.

    CNOT из s по данным (d_a, f, d_b, d_c, f, d_d) в порядке возрастания номеров,
    s готовится в |+⟩ и измеряется в X, f готовится в |0⟩ и измеряется в Z.
    """
    ops = [("init", "Z", q) for q in DATA] if init_data else []
    d_a, d_b, d_c, d_d = (q - 1 for q in SUPPORTS[stabilizer - 1])
    ops += [
        ("init", "X", SYNDROME),
        ("init", "Z", FLAG),
        ("two_qubit_gate", "CNOT", (SYNDROME, d_a)),
        ("two_qubit_gate", "CNOT", (SYNDROME, FLAG)),
        ("two_qubit_gate", "CNOT", (SYNDROME, d_b)),
        ("two_qubit_gate", "CNOT", (SYNDROME, d_c)),
        ("two_qubit_gate", "CNOT", (SYNDROME, FLAG)),
        ("two_qubit_gate", "CNOT", (SYNDROME, d_d)),
        ("measurement", "X", SYNDROME, "syndrome"),
        ("measurement", "Z", FLAG, "flag"),
    ]
    return Circuit.build(name, N_QUBITS, ops)


def full_syndrome() -> Circuit:
    """Шесть последовательных измерений стабилизаторов без флагов."""
    ops = []
    for k, support in enumerate(SUPPORTS, start=1):
        ops.append(("init", "X", SYNDROME))
        ops += [("two_qubit_gate", "CNOT", (SYNDROME, q - 1)) for q in support]
        ops.append(("measurement", "X", SYNDROME, f"x{k}"))
    for k, support in enumerate(SUPPORTS, start=1):
        ops.append(("init", "Z", FLAG))
        ops += [("two_qubit_gate", "CNOT", (q - 1, FLAG)) for q in support]
        ops.append(("measurement", "Z", FLAG, f"z{k}"))
    return Circuit.build(NFS, N_QUBITS, ops)


def _circuits() -> dict[str, Circuit]:
    circuits = {}
    for position, name in enumerate(ORDER):
        circuits[name] = flag_circuit(name, position % 3 + 1, init_data=position == 0)
    circuits[NFS] = full_syndrome()
    circuits[MEAS] = data_measurement(MEAS, N_QUBITS)
    return circuits


def _make_transition(circuits: dict[str, Circuit]):
    flag_sets = {name: flag_error_set(circuits[name]) for name in ORDER}

    def transition(name: str, history: History):
        record = history[-1][1]
        if name in ORDER:
            position = ORDER.index(name)
            if record["flag"]:
                return Next(NFS)
            if position >= 3:
                earlier = dict(history)[ORDER[position - 3]]
                if earlier["syndrome"] != record["syndrome"]:
                    return Next(NFS)
            return Next(MEAS) if position == len(ORDER) - 1 else Next(ORDER[position + 1])
        if name == NFS:
            return Next(MEAS)

        bits = data_bits(record)
        names = [n for n, _ in history]
        if NFS in names:
            at = names.index(NFS)
            syndrome = tuple(history[at][1][f"z{k}"] for k in (1, 2, 3))
            trigger, trigger_record = history[at - 1]
            correction = None
            if trigger_record["flag"]:
                correction = flag_sets[trigger].correction_for(syndrome)
            if correction is None:
                correction = single_qubit_x(lookup_decode(syndrome))
            bits = apply_x_correction(bits, correction)
        return Terminate(fail=is_logical_failure(bits))

    return transition


def steane_flag_prep() -> ProtocolGraph:
    circuits = _circuits()
    successors = {}
    for position, name in enumerate(ORDER):
        follow = MEAS if position == len(ORDER) - 1 else ORDER[position + 1]
        successors[name] = (follow, NFS)
    successors[NFS] = (MEAS,)
    successors[MEAS] = (END,)
    return ProtocolGraph(
        name="steane-flag-0",
        circuits=circuits,
        root=ORDER[0],
        transition=_make_transition(circuits),
        successors=successors,
        ft_order=1,
        max_ft_length=8,
        deterministic_root=False,
        source="steane-flag-0",
    )
