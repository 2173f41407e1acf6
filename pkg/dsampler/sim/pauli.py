"""
Операторы Паули в симплектическом представлении.
"""

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from dsampler.errors import CircuitError

# (x, z) -> буква
_LETTERS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_BITS = {letter: bits for bits, letter in _LETTERS.items()}

SINGLE_QUBIT_GATES = ("I", "X", "Y", "Z", "H", "S")
TWO_QUBIT_GATES = ("CNOT",)


def phase_exponent(x1, z1, x2, z2) -> np.ndarray:
    """
    Показатель степени i, возникающий при умножении букв Паули (x1,z1)·(x2,z2).

    Работает поэлементно над массивами одинаковой формы.
    """
    x1 = np.asarray(x1, dtype=np.int8)
    z1 = np.asarray(z1, dtype=np.int8)
    x2 = np.asarray(x2, dtype=np.int8)
    z2 = np.asarray(z2, dtype=np.int8)
    return np.where(
        (x1 == 1) & (z1 == 1), z2 - x2,
        np.where(
            (x1 == 1) & (z1 == 0), z2 * (2 * x2 - 1),
            np.where((x1 == 0) & (z1 == 1), x2 * (1 - 2 * z2), 0),
        ),
    )


@dataclass(frozen=True, eq=False)
class PauliOperator:
    """
    Оператор Паули на n кубитах: i^phase · ⊗ X^x Z^z (Y хранится как x=z=1).

    Attributes:
        x: Булев вектор X-компонент длины n
        z: Булев вектор Z-компонент длины n
        phase: Степень i по модулю 4
    """
    x: np.ndarray
    z: np.ndarray
    phase: int = 0
    _key: tuple = field(init=False, repr=False)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=bool).copy()
        z = np.asarray(self.z, dtype=bool).copy()
        if x.shape != z.shape or x.ndim != 1:
            raise CircuitError("Векторы x и z оператора Паули должны иметь одну длину")
        x.setflags(write=False)
        z.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "phase", int(self.phase) % 4)
        object.__setattr__(self, "_key", (x.tobytes(), z.tobytes(), self.phase))

    # === Конструкторы ===

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(np.zeros(n, dtype=bool), np.zeros(n, dtype=bool))

    @classmethod
    def from_label(cls, label: str) -> "PauliOperator":
        """
        Разобрать строку вида "XIZ", "+XZ", "-YY" или "iX".

        Args:
            label: Буквы I/X/Y/Z, при необходимости со знаком впереди
        """
        phase = 0
        body = label.strip()
        for prefix, value in (("-i", 3), ("+i", 1), ("i", 1), ("-", 2), ("+", 0)):
            if body.startswith(prefix):
                phase = value
                body = body[len(prefix):]
                break
        try:
            bits = [_BITS[letter] for letter in body.upper()]
        except KeyError:
            raise CircuitError(f"Некорректная строка Паули: {label!r}")
        x = np.array([b[0] for b in bits], dtype=bool)
        z = np.array([b[1] for b in bits], dtype=bool)
        # Y = i·X·Z, поэтому каждая буква Y добавляет i
        phase += int(np.count_nonzero(x & z))
        return cls(x, z, phase)

    @classmethod
    def from_sparse(cls, n: int, letters: Mapping[int, str]) -> "PauliOperator":
        """Собрать оператор по словарю {кубит: буква}."""
        chars = ["I"] * n
        for qubit, letter in letters.items():
            if not 0 <= qubit < n:
                raise CircuitError(f"Кубит {qubit} вне диапазона 0..{n - 1}")
            chars[qubit] = letter
        return cls.from_label("".join(chars))

    # === Свойства ===

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def weight(self) -> int:
        return int(np.count_nonzero(self.x | self.z))

    @property
    def is_identity(self) -> bool:
        return not (self.x.any() or self.z.any())

    @property
    def is_hermitian(self) -> bool:
        return self.sign_phase % 2 == 0

    @property
    def sign_phase(self) -> int:
        """Степень i перед произведением букв (с учётом Y = iXZ)."""
        return (self.phase - int(np.count_nonzero(self.x & self.z))) % 4

    @property
    def letters(self) -> str:
        return "".join(_LETTERS[(int(a), int(b))] for a, b in zip(self.x, self.z))

    @property
    def label(self) -> str:
        prefix = {0: "+", 1: "+i", 2: "-", 3: "-i"}[self.sign_phase]
        return prefix + self.letters

    def __repr__(self) -> str:
        return f"PauliOperator({self.label!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliOperator):
            return NotImplemented
        return self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    # === Алгебра ===

    def commutes_with(self, other: "PauliOperator") -> bool:
        """Коммутируют ли операторы (симплектическое произведение равно 0)."""
        self._check_size(other)
        product = np.count_nonzero(self.x & other.z) + np.count_nonzero(self.z & other.x)
        return product % 2 == 0

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        self._check_size(other)
        # В представлении X^x Z^z: Z^z1 X^x2 = (-1)^(z1·x2) X^x2 Z^z1
        swap = 2 * int(np.count_nonzero(self.z & other.x))
        return PauliOperator(self.x ^ other.x, self.z ^ other.z, self.phase + other.phase + swap)

    def embed(self, n: int, targets: Iterable[int]) -> "PauliOperator":
        """Вложить локальный оператор в n кубитов на позиции targets."""
        targets = tuple(targets)
        if len(targets) != self.n:
            raise CircuitError("Число позиций не совпадает с размером оператора")
        x = np.zeros(n, dtype=bool)
        z = np.zeros(n, dtype=bool)
        for local, qubit in enumerate(targets):
            x[qubit] = self.x[local]
            z[qubit] = self.z[local]
        return PauliOperator(x, z, self.phase)

    def conjugated(self, operation: str, targets: tuple[int, ...]) -> "PauliOperator":
        """
        Оператор U·P·U† после прохождения через вентиль U.

        Args:
            operation: Имя вентиля из SINGLE_QUBIT_GATES или TWO_QUBIT_GATES
            targets: Кубиты вентиля

        Returns:
            Новый оператор Паули с учётом знака
        """
        x = self.x.copy()
        z = self.z.copy()
        flip = 0
        if operation in ("I",):
            pass
        elif operation in ("X", "Y", "Z"):
            gate = PauliOperator.from_label(operation).embed(self.n, targets)
            flip = 0 if self.commutes_with(gate) else 2
        elif operation == "H":
            (a,) = targets
            flip = 2 * int(x[a] and z[a])
            x[a], z[a] = z[a], x[a]
        elif operation == "S":
            (a,) = targets
            flip = 2 * int(x[a] and z[a])
            z[a] ^= x[a]
        elif operation == "CNOT":
            a, b = targets
            flip = 2 * int(x[a] and z[b] and not (x[b] ^ z[a]))
            x[b] ^= x[a]
            z[a] ^= z[b]
        else:
            raise CircuitError(f"Неизвестный вентиль: {operation}")
        # phase хранит степень i с учётом Y, поэтому пересчитываем из знака
        sign = self.sign_phase + flip
        return PauliOperator(x, z, sign + int(np.count_nonzero(x & z)))

    def _check_size(self, other: "PauliOperator") -> None:
        if self.n != other.n:
            raise CircuitError(f"Размеры операторов не совпадают: {self.n} и {other.n}")
