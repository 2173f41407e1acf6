"""
Анализ дерева событий: пересчёт границ по сетке вероятностей, сравнение
с прямым Монте-Карло и вспомогательные функции для проверки масштабирования.
"""

import io
import logging
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd

from dsampler.config import DEFAULT_SEED, WILSON_Z
from dsampler.protocols.graph import ProtocolGraph
from dsampler.sampling.bounds import bounds
from dsampler.sampling.dss import StopRule, dss_run
from dsampler.sampling.mc import mc_run
from dsampler.sampling.tree import SampleTree
from dsampler.sim.noise import NoiseParams
from dsampler.states import Criterion

logger = logging.getLogger(__name__)

BOUND_COLUMNS = ["p_L", "sigma_L", "p_U", "sigma_U", "delta", "p_hat"]


def rate_columns(size: int) -> list[str]:
    return [f"p_phys_{k + 1}" for k in range(size)]


# === Сетки ===

def ray_grid(p_max: Sequence[float], start: float, stop: float, points: int) -> list[tuple[float, ...]]:
    """
    Точки на луче p = s·p_max с логарифмическим шагом по s.

    Args:
        p_max: Вероятности ошибок запуска
        start, stop: Крайние множители s (> 0)
        points: Число точек
    """
    if start <= 0 or stop <= 0:
        raise ValueError("Множители сетки должны быть положительными")
    if points < 1:
        raise ValueError("В сетке должна быть хотя бы одна точка")
    scales = np.logspace(np.log10(start), np.log10(stop), points) if points > 1 else np.array([stop])
    return [tuple(float(s * p) for p in p_max) for s in scales]


def _reference_rate(p_max: Sequence[float]) -> float:
    for p in p_max:
        if p > 0:
            return p
    raise ValueError("Для сетки по лучу нужна хотя бы одна положительная вероятность p_max")


def parse_grid(text: str, p_max: Sequence[float]) -> list[tuple[float, ...]]:
    """
    Разобрать сетку из строки.

    "start:stop:points" - логарифмическая сетка, "a,b,c" - явный список.
    Значения задают первую положительную компоненту p, остальные масштабируются по лучу p_max.
    """
    ref = _reference_rate(p_max)
    text = text.strip()
    try:
        if ":" in text:
            start, stop, points = text.split(":")
            return ray_grid(p_max, float(start) / ref, float(stop) / ref, int(points))
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ValueError(f"Некорректная сетка {text!r}: ожидалось start:stop:points или список через запятую")
    if not values:
        raise ValueError("Пустая сетка")
    return [tuple(v / ref * p for p in p_max) for v in values]


# === Кривые ===

def rescale_curve(tree: SampleTree, grid: Sequence[Sequence[float]], z: float = WILSON_Z) -> pd.DataFrame:
    """
    Границы частоты отказа в каждой точке сетки без повторного сэмплирования.

    Returns:
        DataFrame с колонками p_phys_1..p_phys_K, p_L, sigma_L, p_U, sigma_U, delta, p_hat,
        строки упорядочены по вероятностям
    """
    columns = rate_columns(len(tree.categories))
    rows = []
    for point in sorted(tuple(float(p) for p in point) for point in grid):
        result = bounds(tree, point, z)
        rows.append(list(point) + [result.p_lower, result.sigma_lower, result.p_upper,
                                   result.sigma_upper, result.delta, result.p_hat])
    return pd.DataFrame(rows, columns=columns + BOUND_COLUMNS)


def curve_to_csv(curve: pd.DataFrame, path: str | Path | None = None) -> str:
    """CSV с 12 значащими цифрами и переводами строк LF; при path ещё и записывается в файл."""
    text = curve.to_csv(index=False, float_format="%.12g", lineterminator="\n")
    if path is not None:
        Path(path).write_text(text, encoding="utf-8", newline="")
    return text


def read_curve_csv(source: str | Path) -> pd.DataFrame:
    """Прочитать CSV кривой из файла или строки."""
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source and Path(source).is_file()):
        return pd.read_csv(source, dtype=float)
    return pd.read_csv(io.StringIO(source), dtype=float)


def loglog_slope(curve: pd.DataFrame, window: tuple[float, float] | None = None,
                 rate_column: str = "p_phys_1", value_column: str = "p_L") -> float:
    """
    Наклон log p_L от log p методом наименьших квадратов.

    Args:
        curve: Таблица rescale_curve
        window: Диапазон значений rate_column (включительно)

    Raises:
        ValueError: если в окне меньше трёх строк или есть неположительные значения
    """
    data = curve
    if window is not None:
        low, high = window
        data = data[(data[rate_column] >= low) & (data[rate_column] <= high)]
    if len(data) < 3:
        raise ValueError(f"Для наклона нужно не меньше 3 точек, получено {len(data)}")
    x = data[rate_column].to_numpy(dtype=float)
    y = data[value_column].to_numpy(dtype=float)
    if (x <= 0).any() or (y <= 0).any():
        raise ValueError("Логарифмический наклон требует положительных значений")
    slope, _ = np.polyfit(np.log(x), np.log(y), 1)
    return float(slope)


# === Сравнение с Монте-Карло ===

def compare(protocol: ProtocolGraph, noise: NoiseParams, dss_shots: int, mc_shots: int,
            seed: int = DEFAULT_SEED, criterion: Criterion | str = Criterion.ERU, prohibit_zero: bool = False,
            z: float = WILSON_Z) -> pd.DataFrame:
    """
    Запустить DSS и прямой Монте-Карло при p_max = noise.rates.

    Returns:
        DataFrame(method, shot, uncertainty): η для DSS и ширина интервала Уилсона для MC
    """
    run = dss_run(protocol, noise, criterion, StopRule(max_shots=dss_shots), seed=seed,
                  prohibit_zero=prohibit_zero, z=z)
    mc = mc_run(protocol, noise, mc_shots, seed=seed, z=z)
    rows = [("dss", shot, eta) for shot, eta in run.eta_trace]
    rows += [("mc", shot, width) for shot, width in mc.width_trace]
    logger.info("Сравнение %s: DSS η=%.3e за %d, MC ширина=%.3e за %d",
                protocol.name, run.bounds.eta, dss_shots, mc.high - mc.low, mc_shots)
    return pd.DataFrame(rows, columns=["method", "shot", "uncertainty"])


def pmax_study(protocol: ProtocolGraph, noise: NoiseParams, p_max_values: Sequence[Sequence[float]],
               grid: Sequence[Sequence[float]], shots: int, seed: int = DEFAULT_SEED,
               criterion: Criterion | str = Criterion.BINOMIAL, z: float = WILSON_Z) -> pd.DataFrame:
    """
    Одинаковые запуски при разных p_max и оценка на общей сетке.

    Большее p_max открывает больше подмножеств и сужает границы при малых p.

    Returns:
        Таблица rescale_curve с колонкой run (номер p_max) и колонками pmax_1..pmax_K
    """
    frames = []
    for index, p_max in enumerate(p_max_values):
        run = dss_run(protocol, noise.with_rates(p_max), criterion, StopRule(max_shots=shots), seed=seed, z=z)
        curve = rescale_curve(run.tree, grid, z)
        curve.insert(0, "run", index)
        for k, p in enumerate(p_max):
            curve.insert(1 + k, f"pmax_{k + 1}", float(p))
        frames.append(curve)
    return pd.concat(frames, ignore_index=True)
