"""
Прямой Монте-Карло: каждое место независимо получает ошибку с вероятностью своей категории.
"""

import logging
from dataclasses import dataclass, field

from dsampler.config import CHECK_EVERY, DEFAULT_SEED, SHOT_STEP_LIMIT, WILSON_Z
from dsampler.protocols.graph import ProtocolGraph, execute
from dsampler.sim.noise import NoiseParams, draw_mc_fault, shot_rng
from dsampler.utils.stats import wald_error, wilson_interval

logger = logging.getLogger(__name__)


@dataclass
class MCResult:
    """
    Результат прямого сэмплирования.

    Attributes:
        failures: Число отказов
        shots: Число выстрелов
        p_hat: Частота отказов
        low, high: Интервал Уилсона
        width_trace: (число выстрелов, ширина интервала) в точках проверки
    """
    failures: int
    shots: int
    p_hat: float
    low: float
    high: float
    width_trace: list[tuple[int, float]] = field(default_factory=list)

    @property
    def std_error(self) -> float:
        """Стандартное отклонение оценки sqrt(p(1-p)/N)."""
        return wald_error(self.p_hat, self.shots)


def mc_shot(protocol: ProtocolGraph, noise: NoiseParams, rng, step_limit: int = SHOT_STEP_LIMIT) -> bool:
    """Один выстрел; True при отказе."""
    execution = execute(protocol, lambda name, circuit, history: draw_mc_fault(circuit, noise, rng),
                        rng, step_limit)
    return execution.verdict.fail


def mc_run(protocol: ProtocolGraph, noise: NoiseParams, shots: int, seed: int = DEFAULT_SEED,
           z: float = WILSON_Z, check_every: int = CHECK_EVERY) -> MCResult:
    """
    Оценить частоту отказа прямым Монте-Карло при вероятностях noise.rates.

    Raises:
        ValueError: если shots < 1
    """
    if shots < 1:
        raise ValueError("Число выстрелов Монте-Карло должно быть положительным")
    logger.info("MC %s: %d выстрелов при p=%s", protocol.name, shots, noise.rates)
    failures = 0
    trace = []
    for i in range(shots):
        failures += mc_shot(protocol, noise, shot_rng(seed, i))
        done = i + 1
        if done % check_every == 0 or done == shots:
            low, high = wilson_interval(failures, done, z)
            trace.append((done, high - low))
    low, high = wilson_interval(failures, shots, z)
    logger.info("MC %s: %d отказов из %d", protocol.name, failures, shots)
    return MCResult(failures, shots, failures / shots, low, high, trace)
