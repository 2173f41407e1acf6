"""
Конфигурация сэмплера.
Загрузка переменных окружения из .env файла.
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# Загружаем переменные окружения из .env
load_dotenv()

# Уровень логирования
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")

# Директории для логов и результатов
LOGS_DIR = Path(os.getenv("LOGS_DIR", "logs"))
OUTPUT_DIR = Path(os.getenv("OUTPUT_DIR", "output"))

# Параметры по умолчанию для запусков
DEFAULT_SEED = int(os.getenv("DSS_SEED", "1234"))
DEFAULT_WORKERS = int(os.getenv("DSS_WORKERS", "1"))
if DEFAULT_WORKERS < 1:
    raise ValueError("DSS_WORKERS должен быть не меньше 1! Проверьте .env файл.")

# z-квантиль интервала Уилсона (z=1 соответствует 68%)
WILSON_Z = float(os.getenv("DSS_WILSON_Z", "1.0"))
if WILSON_Z <= 0:
    raise ValueError("DSS_WILSON_Z должен быть положительным! Проверьте .env файл.")

# Предполагаемая вероятность отказа для ещё не открытого подмножества (ERU)
ERU_ASSUMED_FAIL = float(os.getenv("DSS_ERU_ASSUMED_FAIL", "0.5"))
if not 0.0 <= ERU_ASSUMED_FAIL <= 1.0:
    raise ValueError("DSS_ERU_ASSUMED_FAIL должен лежать в [0, 1]! Проверьте .env файл.")

# Вместо фиксированного значения брать среднюю частоту отказов листьев дерева
ERU_RUNNING_AVERAGE = os.getenv("DSS_ERU_RUNNING_AVERAGE", "0").lower() in ("1", "true", "yes")

# Максимум схем в одном выстреле
SHOT_STEP_LIMIT = int(os.getenv("DSS_SHOT_STEP_LIMIT", "64"))

# Шаг проверки условия остановки и размер пакета выстрелов для воркеров
CHECK_EVERY = int(os.getenv("DSS_CHECK_EVERY", "10"))
if CHECK_EVERY < 1:
    raise ValueError("DSS_CHECK_EVERY должен быть не меньше 1! Проверьте .env файл.")

# Ограничения полного перебора
EXHAUSTIVE_BUDGET = int(os.getenv("DSS_EXHAUSTIVE_BUDGET", "2000000"))
COIN_DEPTH = int(os.getenv("DSS_COIN_DEPTH", "16"))
ORACLE_FALLBACK_SHOTS = int(os.getenv("DSS_ORACLE_FALLBACK_SHOTS", "20000"))

# Число выстрелов, если не заданы ни --shots, ни --eta-max
DEFAULT_SHOTS = int(os.getenv("DSS_SHOTS", "1000"))
