"""
Модель шума: категории мест ошибок, розыгрыш событий ошибок.
"""

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from dsampler.errors import NoiseError
from dsampler.sim.circuit import Circuit, FaultEvent, Location, Payload
from dsampler.sim.pauli import PauliOperator
from dsampler.states import LocationKind

# Ошибка init/meas переворачивает результат с вероятностью 2/3
FLIP_PROBABILITY = 2 / 3

_PAULI = "IXYZ"


@dataclass(frozen=True)
class Category:
    """Категория мест ошибок с общей вероятностью ошибки."""
    name: str
    kinds: frozenset[LocationKind]
    rate: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kinds", frozenset(LocationKind(k) for k in self.kinds))
        if not 0.0 <= self.rate <= 1.0:
            raise NoiseError(f"Вероятность категории {self.name} вне [0, 1]: {self.rate}")


@dataclass(frozen=True)
class NoiseParams:
    """
    Разбиение типов мест на категории с вероятностями ошибок.

    Каждый тип места принадлежит ровно одной категории.
    """
    categories: tuple[Category, ...]

    def __post_init__(self):
        object.__setattr__(self, "categories", tuple(self.categories))
        if not self.categories:
            raise NoiseError("Нужна хотя бы одна категория шума")
        seen: set[LocationKind] = set()
        for cat in self.categories:
            if seen & cat.kinds:
                raise NoiseError(f"Тип места входит в несколько категорий: {cat.name}")
            seen |= cat.kinds
        if seen != set(LocationKind):
            missing = sorted(k.value for k in set(LocationKind) - seen)
            raise NoiseError(f"Типы мест без категории: {missing}")

    @classmethod
    def single_parameter(cls, p: float = 0.0) -> "NoiseParams":
        """Одна вероятность p для всех мест."""
        return cls((Category("p", frozenset(LocationKind), p),))

    @classmethod
    def two_parameter(cls, p1: float = 0.0, p2: float = 0.0) -> "NoiseParams":
        """p1 для однокубитных вентилей, init и meas; p2 для двухкубитных вентилей."""
        one = frozenset({LocationKind.SINGLE_QUBIT_GATE, LocationKind.INIT, LocationKind.MEASUREMENT})
        return cls((Category("p1", one, p1), Category("p2", frozenset({LocationKind.TWO_QUBIT_GATE}), p2)))

    @property
    def size(self) -> int:
        return len(self.categories)

    @property
    def rates(self) -> tuple[float, ...]:
        return tuple(c.rate for c in self.categories)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.categories)

    def with_rates(self, rates: Sequence[float]) -> "NoiseParams":
        """Та же категоризация с новыми вероятностями."""
        if len(rates) != self.size:
            raise NoiseError(f"Ожидалось {self.size} вероятностей, получено {len(rates)}")
        return NoiseParams(tuple(Category(c.name, c.kinds, float(r)) for c, r in zip(self.categories, rates)))

    def category_of(self, kind: LocationKind) -> int:
        for i, cat in enumerate(self.categories):
            if kind in cat.kinds:
                return i
        raise NoiseError(f"Тип места без категории: {kind}")

    def locations(self, circuit: Circuit) -> tuple[tuple[int, ...], ...]:
        """Индексы мест схемы по категориям."""
        groups: list[list[int]] = [[] for _ in self.categories]
        for loc in circuit.locations:
            groups[self.category_of(loc.kind)].append(loc.index)
        return tuple(tuple(g) for g in groups)

    def counts(self, circuit: Circuit) -> tuple[int, ...]:
        """Вектор N_k: число мест схемы в каждой категории."""
        return tuple(len(g) for g in self.locations(circuit))

    def weight_of(self, fault: FaultEvent, circuit: Circuit) -> tuple[int, ...]:
        """Вектор весов события ошибок по категориям."""
        weights = [0] * self.size
        for index in fault.faulted:
            weights[self.category_of(circuit.locations[index].kind)] += 1
        return tuple(weights)


def shot_rng(seed: int, shot_index: int) -> np.random.Generator:
    """Генератор выстрела: зависит только от seed и номера выстрела."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(shot_index,)))


def draw_payload(location: Location, rng) -> Payload | None:
    """
    Разыграть нагрузку ошибки в месте.

    Returns:
        Оператор Паули, True (переворот) или None (ошибка оказалась тождественной)
    """
    kind = location.kind
    if kind is LocationKind.SINGLE_QUBIT_GATE:
        return PauliOperator.from_label(_PAULI[int(rng.integers(1, 4))])
    if kind is LocationKind.TWO_QUBIT_GATE:
        a, b = divmod(int(rng.integers(1, 16)), 4)
        return PauliOperator.from_label(_PAULI[a] + _PAULI[b])
    return True if rng.random() < FLIP_PROBABILITY else None


def enumerate_payloads(location: Location) -> list[tuple[Payload | None, float]]:
    """Все нагрузки места с их условными вероятностями."""
    kind = location.kind
    if kind is LocationKind.SINGLE_QUBIT_GATE:
        return [(PauliOperator.from_label(p), 1 / 3) for p in "XYZ"]
    if kind is LocationKind.TWO_QUBIT_GATE:
        return [(PauliOperator.from_label(a + b), 1 / 15)
                for a in _PAULI for b in _PAULI if a + b != "II"]
    return [(True, FLIP_PROBABILITY), (None, 1 - FLIP_PROBABILITY)]


def _build(circuit: Circuit, faulted: Iterable[int], rng) -> FaultEvent:
    faulted = sorted(int(i) for i in faulted)
    payloads = {}
    for index in faulted:
        payload = draw_payload(circuit.locations[index], rng)
        if payload is not None:
            payloads[index] = payload
    return FaultEvent(frozenset(faulted), payloads)


def draw_subset_fault(circuit: Circuit, weights: Sequence[int], noise: NoiseParams, rng) -> FaultEvent:
    """
    Равномерно выбрать w_k различных мест в каждой категории k и разыграть нагрузки.

    Args:
        circuit: Схема
        weights: Вектор весов по категориям
        noise: Категоризация мест
        rng: Генератор numpy

    Returns:
        Событие ошибок с весом ровно weights
    """
    groups = noise.locations(circuit)
    if len(weights) != len(groups):
        raise NoiseError(f"Ожидался вектор весов длины {len(groups)}")
    chosen: list[int] = []
    for w, group in zip(weights, groups):
        if w < 0 or w > len(group):
            raise NoiseError(f"Вес {w} вне диапазона 0..{len(group)} в схеме {circuit.name}")
        if w:
            chosen.extend(int(i) for i in rng.choice(np.array(group), size=w, replace=False))
    return _build(circuit, chosen, rng)


def draw_mc_fault(circuit: Circuit, noise: NoiseParams, rng) -> FaultEvent:
    """Каждое место независимо получает ошибку с вероятностью своей категории."""
    chosen = [loc.index for loc in circuit.locations
              if rng.random() < noise.categories[noise.category_of(loc.kind)].rate]
    return _build(circuit, chosen, rng)
