"""
Перечисления, общие для всего пакета.
"""

from enum import Enum, IntEnum, auto


class LocationKind(str, Enum):
    """Тип места возможной ошибки в схеме."""
    SINGLE_QUBIT_GATE = "single_qubit_gate"
    TWO_QUBIT_GATE = "two_qubit_gate"
    INIT = "init"
    MEASUREMENT = "measurement"


class Criterion(str, Enum):
    """Критерий выбора подмножества ошибок."""
    BINOMIAL = "binomial"           # Случайный выбор по биномиальным весам
    ERU = "eru"                     # Максимальное ожидаемое снижение неопределённости


class Verdict(str, Enum):
    """Терминальный исход выстрела."""
    FAIL = "FAIL"
    NOFAIL = "NOFAIL"


class DeltaKind(IntEnum):
    """Значение δ-узла для недостающей ветви."""
    ONE = auto()                    # Худший случай: отказ с вероятностью 1
    L_TIMES_ONE_MINUS_M0 = auto()   # FT-оценка L(1 - M0)
