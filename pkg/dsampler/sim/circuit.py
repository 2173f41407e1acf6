"""
Модель схемы: места ошибок, схемы, события ошибок и их исполнение.
"""

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

from dsampler.errors import CircuitError
from dsampler.sim.pauli import SINGLE_QUBIT_GATES, TWO_QUBIT_GATES, PauliOperator
from dsampler.sim.tableau import StabilizerState
from dsampler.states import LocationKind

# Полезная нагрузка ошибки: оператор Паули для вентилей, переворот для init/meas
Payload = Union[PauliOperator, bool]

BASES = ("Z", "X")


@dataclass(frozen=True)
class Location:
    """
    Место возможной ошибки: одна операция схемы.

    Attributes:
        index: Позиция в схеме (0, 1, 2, ...)
        kind: Тип места
        operation: Имя вентиля либо базис подготовки/измерения
        targets: Кубиты
        label: Метка исхода для измерений
    """
    index: int
    kind: LocationKind
    operation: str
    targets: tuple[int, ...]
    label: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", LocationKind(self.kind))
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        kind, op, targets = self.kind, self.operation, self.targets
        if kind is LocationKind.SINGLE_QUBIT_GATE:
            ok = op in SINGLE_QUBIT_GATES and len(targets) == 1
        elif kind is LocationKind.TWO_QUBIT_GATE:
            ok = op in TWO_QUBIT_GATES and len(targets) == 2 and targets[0] != targets[1]
        else:
            ok = op in BASES and len(targets) == 1
        if not ok:
            raise CircuitError(f"Некорректная операция {kind.value} {op} {targets}")
        if self.label is not None and kind is not LocationKind.MEASUREMENT:
            raise CircuitError(f"Метка допустима только у измерения: {self.label}")


@dataclass(frozen=True)
class Circuit:
    """
    Неизменяемая последовательность мест ошибок.

    Attributes:
        name: Имя схемы, уникальное внутри протокола
        n_qubits: Число кубитов
        locations: Места ошибок в порядке исполнения
    """
    name: str
    n_qubits: int
    locations: tuple[Location, ...]
    _labels: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "locations", tuple(self.locations))
        labels = {}
        for position, loc in enumerate(self.locations):
            if loc.index != position:
                raise CircuitError(f"Схема {self.name}: индекс {loc.index} на позиции {position}")
            for q in loc.targets:
                if not 0 <= q < self.n_qubits:
                    raise CircuitError(f"Схема {self.name}: кубит {q} вне диапазона")
            if loc.label is not None:
                if loc.label in labels:
                    raise CircuitError(f"Схема {self.name}: повтор метки {loc.label}")
                labels[loc.label] = loc.index
        object.__setattr__(self, "_labels", labels)

    @classmethod
    def build(cls, name: str, n_qubits: int, ops: Iterable[tuple]) -> "Circuit":
        """
        Собрать схему из кортежей (kind, operation, targets[, label]).
        """
        locations = []
        for index, op in enumerate(ops):
            kind, operation, targets, *rest = op
            if isinstance(targets, int):
                targets = (targets,)
            label = rest[0] if rest else None
            locations.append(Location(index, LocationKind(kind), operation, tuple(targets), label))
        return cls(name, n_qubits, tuple(locations))

    def __len__(self) -> int:
        return len(self.locations)

    @property
    def category_counts(self) -> dict[LocationKind, int]:
        """Число мест каждого типа."""
        counts = Counter(loc.kind for loc in self.locations)
        return {kind: counts.get(kind, 0) for kind in LocationKind}

    @property
    def labels(self) -> dict[str, int]:
        """Метка измерения -> индекс места."""
        return dict(self._labels)

    def location_of(self, label: str) -> Location:
        try:
            return self.locations[self._labels[label]]
        except KeyError:
            raise CircuitError(f"Схема {self.name}: нет измерения с меткой {label}")


@dataclass(frozen=True)
class FaultEvent:
    """
    Событие ошибок в одной схеме.

    faulted содержит все места, где произошла ошибка (учитываются в весе),
    в том числе ошибки init/meas, оказавшиеся тождественными.
    payloads содержит только нетривиальные нагрузки.
    """
    faulted: frozenset[int] = frozenset()
    payloads: Mapping[int, Payload] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "faulted", frozenset(self.faulted))
        object.__setattr__(self, "payloads", dict(self.payloads))
        extra = set(self.payloads) - self.faulted
        if extra:
            raise CircuitError(f"Нагрузки вне множества ошибок: {sorted(extra)}")

    @classmethod
    def from_payloads(cls, payloads: Mapping[int, Payload]) -> "FaultEvent":
        return cls(frozenset(payloads), payloads)

    @property
    def total_weight(self) -> int:
        return len(self.faulted)

    def validate(self, circuit: Circuit) -> None:
        """Проверить соответствие нагрузок типам мест схемы."""
        for index in self.faulted:
            if not 0 <= index < len(circuit):
                raise CircuitError(f"Место {index} вне схемы {circuit.name}")
        for index, payload in self.payloads.items():
            loc = circuit.locations[index]
            if loc.kind in (LocationKind.INIT, LocationKind.MEASUREMENT):
                if payload is not True:
                    raise CircuitError(f"Место {index}: ожидался переворот True")
            else:
                if not isinstance(payload, PauliOperator) or payload.n != len(loc.targets):
                    raise CircuitError(f"Место {index}: неверный размер оператора Паули")
                if payload.is_identity:
                    raise CircuitError(f"Место {index}: тождественная нагрузка не хранится")


NO_FAULT = FaultEvent()


@dataclass(frozen=True)
class MeasurementRecord:
    """
    Исходы измерений одного исполнения схемы.

    Attributes:
        outcomes: Индекс места измерения -> бит
        labels: Метка -> индекс места
    """
    outcomes: Mapping[int, int]
    labels: Mapping[str, int] = field(default_factory=dict)

    def __getitem__(self, key: str | int) -> int:
        if isinstance(key, str):
            try:
                key = self.labels[key]
            except KeyError:
                raise CircuitError(f"Нет исхода с меткой {key}")
        return self.outcomes[key]

    def bits(self, keys: Iterable[str | int] | None = None) -> tuple[int, ...]:
        """Исходы в порядке keys (по умолчанию все измерения по порядку)."""
        if keys is None:
            keys = sorted(self.outcomes)
        return tuple(self[k] for k in keys)


def run_with_faults(state: StabilizerState, circuit: Circuit, fault: FaultEvent, rng) -> MeasurementRecord:
    """
    Исполнить схему на состоянии с учётом события ошибок.

    Ошибка вентиля применяется после идеального вентиля, ошибка init
    переворачивает подготовленное состояние, ошибка meas переворачивает бит.

    Args:
        state: Состояние, изменяется на месте
        circuit: Схема
        fault: Событие ошибок
        rng: Источник случайных битов для недетерминированных измерений

    Returns:
        Исходы измерений схемы
    """
    if state.n < circuit.n_qubits:
        raise CircuitError(f"Схема {circuit.name} требует {circuit.n_qubits} кубитов")
    fault.validate(circuit)
    outcomes = {}
    for loc in circuit.locations:
        payload = fault.payloads.get(loc.index)
        if loc.kind is LocationKind.INIT:
            (q,) = loc.targets
            state.reset(q, loc.operation, rng)
            if payload:
                state.apply_gate("X" if loc.operation == "Z" else "Z", (q,))
        elif loc.kind is LocationKind.MEASUREMENT:
            (q,) = loc.targets
            bit, _ = state.measure(q, loc.operation, rng)
            outcomes[loc.index] = bit ^ int(bool(payload))
        else:
            state.apply_gate(loc.operation, loc.targets)
            if payload is not None:
                state.apply_pauli(payload.embed(state.n, loc.targets))
    return MeasurementRecord(outcomes, circuit.labels)
