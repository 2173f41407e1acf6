"""
Исключения пакета.
"""


class CircuitError(ValueError):
    """Некорректная схема, операция или полезная нагрузка ошибки."""


class NoiseError(ValueError):
    """Некорректная модель шума или вес подмножества."""


class ProtocolError(ValueError):
    """Некорректное описание протокола или история измерений."""


class TreeError(ValueError):
    """Трасса выстрела не согласуется с деревом событий."""


class BudgetExceededError(RuntimeError):
    """Полный перебор превышает заданный бюджет."""


class ShotLimitError(RuntimeError):
    """Выстрел не завершился за допустимое число схем."""
