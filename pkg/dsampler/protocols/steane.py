"""
Код Стина [[7,1,3]]: стабилизаторы, кодовые слова |0⟩_L, табличный декодер
и множества ошибок флаговых схем.

Кубиты нумеруются с нуля: кубит i кода соответствует индексу i - 1.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from dsampler.sim.circuit import Circuit
from dsampler.sim.noise import enumerate_payloads
from dsampler.sim.pauli import PauliOperator
from dsampler.states import LocationKind

DATA = tuple(range(7))

# Носители генераторов K_1, K_2, K_3 (нумерация с единицы)
SUPPORTS = (
    (4, 5, 6, 7),
    (1, 3, 5, 7),
    (2, 3, 6, 7),
)

CODEWORDS = (
    "0000000", "1010101", "0110011", "1100110",
    "0001111", "1011010", "0111100", "1101001",
)


@dataclass(frozen=True)
class SteaneCode:
    """Генераторы, логический Z, кодовые слова и табличный декодер."""
    x_generators: tuple[PauliOperator, ...]
    z_generators: tuple[PauliOperator, ...]
    logical_z: PauliOperator
    codewords: tuple[tuple[int, ...], ...]

    @property
    def generators(self) -> tuple[PauliOperator, ...]:
        return self.x_generators + self.z_generators


def _on(n: int, letter: str, qubits: Iterable[int]) -> PauliOperator:
    return PauliOperator.from_sparse(n, {q: letter for q in qubits})


@lru_cache(maxsize=None)
def steane_code(n_qubits: int = 7) -> SteaneCode:
    """
    Код Стина на первых семи кубитах регистра из n_qubits.
    """
    xs = tuple(_on(n_qubits, "X", (i - 1 for i in sup)) for sup in SUPPORTS)
    zs = tuple(_on(n_qubits, "Z", (i - 1 for i in sup)) for sup in SUPPORTS)
    codewords = tuple(tuple(int(c) for c in word) for word in CODEWORDS)
    return SteaneCode(xs, zs, _on(n_qubits, "Z", (0, 1, 2)), codewords)


def lookup_decode(syndrome: Sequence[int]) -> int | None:
    """
    Табличный декодер: синдром (s1, s2, s3) -> кубит коррекции.

    Returns:
        Индекс кубита (с нуля) или None для тривиального синдрома
    """
    s1, s2, s3 = (int(b) & 1 for b in syndrome)
    position = 4 * s1 + s2 + 2 * s3
    return position - 1 if position else None


def syndrome_of(x_bits: Sequence[int]) -> tuple[int, int, int]:
    """Z-синдром X-ошибки на данных: чётности пересечения с K_1, K_2, K_3."""
    return tuple(sum(int(x_bits[i - 1]) for i in sup) % 2 for sup in SUPPORTS)


def hamming_distance(a: Sequence[int], b: Sequence[int]) -> int:
    return int(np.count_nonzero(np.asarray(a) != np.asarray(b)))


def is_logical_failure(bits: Sequence[int]) -> bool:
    """Отказ: минимальное расстояние Хэмминга до кодовых слов |0⟩_L больше 1."""
    return min(hamming_distance(bits, word) for word in steane_code().codewords) > 1


def apply_x_correction(bits: Sequence[int], x_bits: Sequence[int] | None) -> tuple[int, ...]:
    """Применить X-коррекцию к результату измерения в Z-базисе (переворот битов)."""
    if x_bits is None:
        return tuple(bits)
    return tuple(int(b) ^ int(x) for b, x in zip(bits, x_bits))


def single_qubit_x(qubit: int | None) -> tuple[int, ...] | None:
    if qubit is None:
        return None
    return tuple(int(i == qubit) for i in DATA)


# === Множество ошибок флаговой схемы ===

@dataclass(frozen=True)
class FlagError:
    """X-ошибка на данных от одной ошибки, вызвавшей флаг."""
    x_bits: tuple[int, ...]
    syndrome: tuple[int, int, int]


@dataclass(frozen=True)
class FlagErrorSet:
    """Множество ошибок флаговой схемы с их синдромами."""
    circuit: str
    errors: tuple[FlagError, ...]

    def correction_for(self, syndrome: Sequence[int]) -> tuple[int, ...] | None:
        """X-ошибка из множества с совпадающим синдромом или None."""
        syndrome = tuple(int(b) for b in syndrome)
        for error in self.errors:
            if error.syndrome == syndrome:
                return error.x_bits
        return None


def propagate_fault(circuit: Circuit, start: int, pauli: PauliOperator) -> PauliOperator:
    """
    Провести оператор Паули, возникший после места start, до конца схемы.

    Повторная инициализация кубита стирает ошибку на нём.
    """
    current = pauli
    for loc in circuit.locations[start + 1:]:
        if loc.kind is LocationKind.INIT:
            (q,) = loc.targets
            x = current.x.copy()
            z = current.z.copy()
            x[q] = z[q] = False
            current = PauliOperator(x, z)
        elif loc.kind in (LocationKind.SINGLE_QUBIT_GATE, LocationKind.TWO_QUBIT_GATE):
            current = current.conjugated(loc.operation, loc.targets)
    return current


def _fault_operator(circuit: Circuit, index: int, payload) -> PauliOperator | None:
    loc = circuit.locations[index]
    n = circuit.n_qubits
    if loc.kind is LocationKind.INIT:
        (q,) = loc.targets
        return PauliOperator.from_sparse(n, {q: "X" if loc.operation == "Z" else "Z"})
    if loc.kind is LocationKind.MEASUREMENT:
        return None
    return payload.embed(n, loc.targets)


@lru_cache(maxsize=None)
def flag_error_set(circuit: Circuit, flag_label: str = "flag", data: tuple[int, ...] = DATA) -> FlagErrorSet:
    """
    Перечислить все одиночные ошибки схемы и оставить вызвавшие флаг.

    Ошибка измерения флага даёт флаг без ошибки на данных и в множество не входит.

    Args:
        circuit: Флаговая схема с одним измерением флага
        flag_label: Метка измерения флага
        data: Кубиты данных

    Returns:
        Множество различных X-ошибок на данных с их синдромами
    """
    flag_loc = circuit.location_of(flag_label)
    (flag_qubit,) = flag_loc.targets
    basis = flag_loc.operation
    found: dict[tuple[int, ...], FlagError] = {}
    for loc in circuit.locations:
        if loc.index >= flag_loc.index:
            break
        for payload, _ in enumerate_payloads(loc):
            if payload is None:
                continue
            fault = _fault_operator(circuit, loc.index, payload)
            if fault is None:
                continue
            final = propagate_fault(circuit, loc.index, fault)
            flipped = final.z[flag_qubit] if basis == "X" else final.x[flag_qubit]
            if not flipped:
                continue
            x_bits = tuple(int(final.x[q]) for q in data)
            if any(x_bits) and x_bits not in found:
                found[x_bits] = FlagError(x_bits, syndrome_of(x_bits))
    errors = tuple(sorted(found.values(), key=lambda e: (sum(e.x_bits), e.x_bits)))
    return FlagErrorSet(circuit.name, errors)
