"""
Стабилизаторный симулятор на таблице Аронсона-Готтесмана.

Строки 0..n-1 хранят дестабилизаторы, строки n..2n-1 стабилизаторы.
Знак строки хранится битом r, буквы Паули битами x и z.
"""

import numpy as np

from dsampler.errors import CircuitError
from dsampler.sim.pauli import PauliOperator, phase_exponent


def gf2_rank(matrix: np.ndarray) -> int:
    """Ранг матрицы над GF(2)."""
    m = np.array(matrix, dtype=np.uint8) % 2
    rank = 0
    rows, cols = m.shape
    for col in range(cols):
        pivots = np.nonzero(m[rank:, col])[0]
        if len(pivots) == 0:
            continue
        pivot = rank + pivots[0]
        m[[rank, pivot]] = m[[pivot, rank]]
        mask = m[:, col].astype(bool)
        mask[rank] = False
        m[mask] ^= m[rank]
        rank += 1
        if rank == rows:
            break
    return rank


class StabilizerState:
    """
    Стабилизаторное состояние n кубитов.

    Начальное состояние |0...0⟩. Операции изменяют состояние на месте,
    измерения с недетерминированным исходом берут бит из переданного rng.
    """

    def __init__(self, n: int):
        if n < 1:
            raise CircuitError("Число кубитов должно быть положительным")
        self.n = n
        self.x = np.zeros((2 * n, n), dtype=np.uint8)
        self.z = np.zeros((2 * n, n), dtype=np.uint8)
        self.r = np.zeros(2 * n, dtype=np.uint8)
        idx = np.arange(n)
        self.x[idx, idx] = 1
        self.z[n + idx, idx] = 1

    def copy(self) -> "StabilizerState":
        clone = StabilizerState.__new__(StabilizerState)
        clone.n = self.n
        clone.x = self.x.copy()
        clone.z = self.z.copy()
        clone.r = self.r.copy()
        return clone

    # === Вентили ===

    def apply_gate(self, operation: str, targets: tuple[int, ...]) -> None:
        """
        Применить вентиль Клиффорда.

        Args:
            operation: I, X, Y, Z, H, S или CNOT
            targets: Кубиты (для CNOT: управляющий, целевой)
        """
        self._check_targets(targets)
        x, z, r = self.x, self.z, self.r
        if operation == "CNOT":
            if len(targets) != 2 or targets[0] == targets[1]:
                raise CircuitError(f"CNOT требует два различных кубита: {targets}")
            a, b = targets
            r ^= x[:, a] & z[:, b] & (x[:, b] ^ z[:, a] ^ 1)
            x[:, b] ^= x[:, a]
            z[:, a] ^= z[:, b]
            return

        if len(targets) != 1:
            raise CircuitError(f"Вентиль {operation} действует на один кубит")
        (a,) = targets
        if operation == "I":
            pass
        elif operation == "H":
            r ^= x[:, a] & z[:, a]
            x[:, a], z[:, a] = z[:, a].copy(), x[:, a].copy()
        elif operation == "S":
            r ^= x[:, a] & z[:, a]
            z[:, a] ^= x[:, a]
        elif operation == "X":
            r ^= z[:, a]
        elif operation == "Z":
            r ^= x[:, a]
        elif operation == "Y":
            r ^= x[:, a] ^ z[:, a]
        else:
            raise CircuitError(f"Неизвестный вентиль: {operation}")

    def apply_pauli(self, pauli: PauliOperator) -> None:
        """Применить оператор Паули: меняет знак всех строк, антикоммутирующих с ним."""
        if pauli.n != self.n:
            raise CircuitError(f"Оператор на {pauli.n} кубитах, состояние на {self.n}")
        px = pauli.x.astype(np.uint8)
        pz = pauli.z.astype(np.uint8)
        anti = (self.x @ pz + self.z @ px) % 2
        self.r ^= anti.astype(np.uint8)

    # === Измерения ===

    def measure(self, qubit: int, basis: str, rng) -> tuple[int, bool]:
        """
        Измерить кубит в базисе Z или X.

        Args:
            qubit: Номер кубита
            basis: "Z" или "X"
            rng: Источник случайных битов с методом integers()

        Returns:
            (исход, был ли исход детерминированным)
        """
        if basis == "X":
            self.apply_gate("H", (qubit,))
            result = self._measure_z(qubit, rng)
            self.apply_gate("H", (qubit,))
            return result
        if basis != "Z":
            raise CircuitError(f"Неизвестный базис измерения: {basis}")
        return self._measure_z(qubit, rng)

    def reset(self, qubit: int, basis: str, rng) -> None:
        """Подготовить кубит в |0⟩ (basis="Z") или |+⟩ (basis="X")."""
        outcome, _ = self.measure(qubit, basis, rng)
        if outcome:
            self.apply_gate("X" if basis == "Z" else "Z", (qubit,))

    def _measure_z(self, a: int, rng) -> tuple[int, bool]:
        self._check_targets((a,))
        n = self.n
        candidates = np.nonzero(self.x[n:, a])[0]
        if len(candidates):
            p = n + int(candidates[0])
            outcome = int(rng.integers(2))
            for i in range(2 * n):
                if i != p and self.x[i, a]:
                    self._rowsum(i, p)
            self.x[p - n] = self.x[p]
            self.z[p - n] = self.z[p]
            self.r[p - n] = self.r[p]
            self.x[p] = 0
            self.z[p] = 0
            self.z[p, a] = 1
            self.r[p] = outcome
            return outcome, False

        # Детерминированный исход: собираем ±Z_a из стабилизаторов
        sx = np.zeros(n, dtype=np.uint8)
        sz = np.zeros(n, dtype=np.uint8)
        sr = 0
        for i in np.nonzero(self.x[:n, a])[0]:
            sx, sz, sr = self._product(sx, sz, sr, self.x[i + n], self.z[i + n], self.r[i + n])
        return int(sr), True

    # === Запросы ===

    def is_stabilized_by(self, pauli: PauliOperator) -> bool:
        """
        Является ли оператор элементом стабилизаторной группы состояния (со знаком).
        """
        if pauli.n != self.n:
            raise CircuitError(f"Оператор на {pauli.n} кубитах, состояние на {self.n}")
        if not pauli.is_hermitian:
            return False
        n = self.n
        px = pauli.x.astype(np.uint8)
        pz = pauli.z.astype(np.uint8)
        anti = (self.x @ pz + self.z @ px) % 2
        if anti[n:].any():
            return False
        sx = np.zeros(n, dtype=np.uint8)
        sz = np.zeros(n, dtype=np.uint8)
        sr = 0
        for i in np.nonzero(anti[:n])[0]:
            sx, sz, sr = self._product(sx, sz, sr, self.x[i + n], self.z[i + n], self.r[i + n])
        if not (np.array_equal(sx, px) and np.array_equal(sz, pz)):
            return False
        return int(sr) == pauli.sign_phase // 2

    def is_valid(self) -> bool:
        """Проверка инварианта таблицы: ранг 2n и канонические коммутационные соотношения."""
        n = self.n
        if gf2_rank(np.hstack([self.x, self.z])) != 2 * n:
            return False
        form = (self.x.astype(int) @ self.z.T.astype(int) + self.z.astype(int) @ self.x.T.astype(int)) % 2
        expected = np.zeros((2 * n, 2 * n), dtype=int)
        idx = np.arange(n)
        expected[idx, n + idx] = 1
        expected[n + idx, idx] = 1
        return bool(np.array_equal(form, expected))

    # === Внутренние операции ===

    def _rowsum(self, h: int, i: int) -> None:
        self.x[h], self.z[h], self.r[h] = self._product(
            self.x[h], self.z[h], self.r[h], self.x[i], self.z[i], self.r[i])

    @staticmethod
    def _product(xh, zh, rh, xi, zi, ri):
        """Строка i, умноженная на строку h (порядок rowsum)."""
        total = 2 * int(rh) + 2 * int(ri) + int(phase_exponent(xi, zi, xh, zh).sum())
        return xh ^ xi, zh ^ zi, np.uint8(1 if total % 4 == 2 else 0)

    def _check_targets(self, targets) -> None:
        for q in targets:
            if not 0 <= q < self.n:
                raise CircuitError(f"Кубит {q} вне диапазона 0..{self.n - 1}")
