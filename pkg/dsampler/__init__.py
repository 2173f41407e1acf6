"""
Динамическое подмножественное сэмплирование (DSS) частоты логических отказов
протоколов коррекции квантовых ошибок.
"""

__version__ = "0.1.0"
