"""
Граф протокола: именованные схемы, корень, функция переходов и FT-метаданные.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence, Union

from dsampler.config import COIN_DEPTH, SHOT_STEP_LIMIT
from dsampler.errors import ProtocolError, ShotLimitError
from dsampler.sim.circuit import NO_FAULT, Circuit, FaultEvent, MeasurementRecord, run_with_faults
from dsampler.sim.coins import expand_coins
from dsampler.sim.tableau import StabilizerState
from dsampler.states import Verdict

logger = logging.getLogger(__name__)

# Служебное имя "завершения" в списке последователей
END = "END"

HistoryEntry = tuple[str, MeasurementRecord]
History = tuple[HistoryEntry, ...]


@dataclass(frozen=True)
class Next:
    """Перейти к схеме circuit."""
    circuit: str


@dataclass(frozen=True)
class Terminate:
    """Завершить выстрел; fail=True означает логический отказ."""
    fail: bool

    @property
    def verdict(self) -> Verdict:
        return Verdict.FAIL if self.fail else Verdict.NOFAIL


Decision = Union[Next, Terminate]
Transition = Callable[[str, History], Decision]


@dataclass(frozen=True)
class ProtocolGraph:
    """
    Недетерминированный протокол.

    Attributes:
        name: Имя протокола
        circuits: Имя схемы -> схема
        root: Имя корневой схемы
        transition: Чистая функция (имя исполненной схемы, история) -> Next | Terminate
        successors: Объявленные последователи каждой схемы (END для завершения)
        ft_order: Порядок отказоустойчивости t (0 или 1)
        max_ft_length: Максимальная длина отказоустойчивой последовательности L
        deterministic_root: Исход корневой схемы без ошибок фиксирован
        source: Ссылка для восстановления протокола в другом процессе
    """
    name: str
    circuits: Mapping[str, Circuit]
    root: str
    transition: Transition = field(compare=False)
    successors: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    ft_order: int = 0
    max_ft_length: int = 1
    deterministic_root: bool = False
    source: str | None = None

    @property
    def n_qubits(self) -> int:
        return max(c.n_qubits for c in self.circuits.values())

    def next_node(self, history: Sequence[HistoryEntry]) -> Decision:
        """
        Следующая схема или вердикт по полной истории измерений.
        """
        if not history:
            raise ProtocolError("История пуста: нет исполненной схемы")
        for name, _ in history:
            if name not in self.circuits:
                raise ProtocolError(f"История ссылается на неизвестную схему {name}")
        name = history[-1][0]
        decision = self.transition(name, tuple(history))
        target = END if isinstance(decision, Terminate) else decision.circuit
        if target != END and target not in self.circuits:
            raise ProtocolError(f"Переход из {name} в неизвестную схему {target}")
        declared = self.successors.get(name)
        if declared is not None and target not in declared:
            raise ProtocolError(f"Переход {name} -> {target} не объявлен")
        return decision


@dataclass(frozen=True)
class ProtocolReport:
    """Результат проверки протокола."""
    name: str
    root: str
    circuits: dict[str, dict[str, int]]
    ft_order: int
    max_ft_length: int
    fault_free_sequence: tuple[str, ...]

    def lines(self) -> list[str]:
        out = [f"protocol {self.name}", f"root {self.root}",
               f"t={self.ft_order} L={self.max_ft_length}",
               "fault-free " + " -> ".join(self.fault_free_sequence)]
        for name, counts in self.circuits.items():
            parts = " ".join(f"{kind}={n}" for kind, n in counts.items())
            out.append(f"circuit {name} {parts}")
        return out


@dataclass(frozen=True)
class Execution:
    """Полная история одного выстрела и его вердикт."""
    history: History
    faults: tuple[FaultEvent, ...]
    verdict: Terminate

    @property
    def sequence(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.history)


# === Исполнение ===

def execute(protocol: ProtocolGraph, fault_for: Callable[[str, Circuit, History], FaultEvent],
            rng, step_limit: int = SHOT_STEP_LIMIT) -> Execution:
    """
    Исполнить один выстрел протокола.

    Args:
        protocol: Протокол
        fault_for: Выбор события ошибок для очередной схемы (имя, схема, история)
        rng: Генератор для недетерминированных измерений
        step_limit: Максимальное число схем в выстреле

    Returns:
        История выстрела с вердиктом

    Raises:
        ShotLimitError: если протокол не завершился за step_limit схем
    """
    state = StabilizerState(protocol.n_qubits)
    history: History = ()
    faults: list[FaultEvent] = []
    name = protocol.root
    for _ in range(step_limit):
        circuit = protocol.circuits[name]
        fault = fault_for(name, circuit, history)
        record = run_with_faults(state, circuit, fault, rng)
        faults.append(fault)
        history = history + ((name, record),)
        decision = protocol.next_node(history)
        if isinstance(decision, Terminate):
            return Execution(history, tuple(faults), decision)
        name = decision.circuit
    raise ShotLimitError(f"Протокол {protocol.name} не завершился за {step_limit} схем")


def expand_step(protocol: ProtocolGraph, state: StabilizerState, history: History, name: str,
                fault: FaultEvent = NO_FAULT, coin_depth: int = COIN_DEPTH):
    """
    Исполнить одну схему для всех исходов случайных измерений.

    Returns:
        Список (вероятность, состояние, история, решение)
    """
    circuit = protocol.circuits[name]

    def run(coins):
        local = state.copy()
        record = run_with_faults(local, circuit, fault, coins)
        return local, record

    out = []
    for (local, record), prob in expand_coins(run, coin_depth):
        extended = history + ((name, record),)
        out.append((prob, local, extended, protocol.next_node(extended)))
    return out


def fault_free_sequences(protocol: ProtocolGraph, step_limit: int = SHOT_STEP_LIMIT) -> dict[tuple[str, ...], bool]:
    """
    Все последовательности схем без ошибок с учётом всех исходов монет.

    Returns:
        Последовательность -> был ли на ней отказ
    """
    found: dict[tuple[str, ...], bool] = {}
    stack = [(StabilizerState(protocol.n_qubits), (), protocol.root)]
    while stack:
        state, history, name = stack.pop()
        if len(history) >= step_limit:
            raise ShotLimitError(f"Протокол {protocol.name} не завершился за {step_limit} схем")
        for _, local, extended, decision in expand_step(protocol, state, history, name):
            if isinstance(decision, Terminate):
                sequence = tuple(n for n, _ in extended)
                found[sequence] = found.get(sequence, False) or decision.fail
            else:
                stack.append((local, extended, decision.circuit))
    return found


# === Проверка ===

def validate(protocol: ProtocolGraph) -> ProtocolReport:
    """
    Структурная проверка протокола и прогон без ошибок.

    Raises:
        ProtocolError: при нарушении любого правила
    """
    if protocol.root not in protocol.circuits:
        raise ProtocolError(f"Корневая схема {protocol.root} не найдена")
    for name, circuit in protocol.circuits.items():
        if circuit.name != name:
            raise ProtocolError(f"Схема зарегистрирована как {name}, но называется {circuit.name}")
    for name, targets in protocol.successors.items():
        if name not in protocol.circuits:
            raise ProtocolError(f"Последователи объявлены для неизвестной схемы {name}")
        distinct = set(targets)
        if len(distinct) > 2:
            raise ProtocolError(f"У схемы {name} больше двух последователей: {sorted(distinct)}")
        for target in distinct:
            if target != END and target not in protocol.circuits:
                raise ProtocolError(f"Висячий переход {name} -> {target}")
    if protocol.ft_order not in (0, 1):
        raise ProtocolError(f"Поддерживается только t в {{0, 1}}, получено {protocol.ft_order}")
    if protocol.max_ft_length < 1:
        raise ProtocolError("L должно быть не меньше 1")

    sequences = fault_free_sequences(protocol)
    if len(sequences) != 1:
        raise ProtocolError(f"Протокол {protocol.name} имеет несколько путей без ошибок: {sorted(sequences)}")
    (sequence, failed), = sequences.items()
    if failed:
        raise ProtocolError(f"Протокол {protocol.name} отказывает без ошибок")

    counts = {
        name: {kind.value: n for kind, n in circuit.category_counts.items()}
        for name, circuit in protocol.circuits.items()
    }
    logger.debug("Протокол %s проверен, путь без ошибок: %s", protocol.name, sequence)
    return ProtocolReport(protocol.name, protocol.root, counts, protocol.ft_order,
                          protocol.max_ft_length, sequence)
