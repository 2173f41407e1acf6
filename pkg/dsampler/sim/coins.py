"""
Перебор исходов недетерминированных измерений.
"""

from typing import Callable, TypeVar

from dsampler.errors import BudgetExceededError

T = TypeVar("T")


class ScriptedCoins:
    """
    Источник битов по заданному префиксу; после префикса возвращает 0.

    Совместим с StabilizerState.measure (использует только integers(2)).
    """

    def __init__(self, prefix: tuple[int, ...] = ()):
        self.prefix = tuple(prefix)
        self.used = 0

    def integers(self, low, high=None):
        if (low, high) not in ((2, None), (0, 2)):
            raise ValueError("ScriptedCoins поддерживает только честную монету")
        bit = self.prefix[self.used] if self.used < len(self.prefix) else 0
        self.used += 1
        return bit


def expand_coins(run: Callable[[ScriptedCoins], T], max_depth: int) -> list[tuple[T, float]]:
    """
    Исполнить run для всех последовательностей исходов честных монет.

    Args:
        run: Функция, получающая источник монет
        max_depth: Максимальное число монет в одной ветви

    Returns:
        Список (результат, вероятность ветви)

    Raises:
        BudgetExceededError: если ветвь требует больше max_depth монет
    """
    results = []
    stack: list[tuple[int, ...]] = [()]
    while stack:
        prefix = stack.pop()
        coins = ScriptedCoins(prefix)
        value = run(coins)
        used = max(coins.used, len(prefix))
        if used > max_depth:
            raise BudgetExceededError(f"Ветвь требует {used} монет (предел {max_depth})")
        results.append((value, 0.5 ** used))
        for k in range(len(prefix), used):
            stack.append(prefix + (0,) * (k - len(prefix)) + (1,))
    return results
