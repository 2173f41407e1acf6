"""
Цикл динамического подмножественного сэмплирования.

Каждый выстрел проходит протокол от корня: для очередной схемы критерий
выбирает вектор весов w, в схему вносится случайная ошибка веса w, исход
определяет следующую схему. Трасса выстрела добавляется в дерево событий.
"""

import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from dsampler.config import CHECK_EVERY, DEFAULT_SEED, SHOT_STEP_LIMIT, WILSON_Z
from dsampler.protocols import get_protocol
from dsampler.protocols.graph import History, ProtocolGraph, execute
from dsampler.sampling.bounds import BoundsResult, bounds
from dsampler.sampling.criteria import EruOptions, choose_subset_binomial, choose_subset_eru
from dsampler.sampling.tree import NodeKey, SampleTree, TraceStep, Weight
from dsampler.sim.circuit import NO_FAULT, Circuit
from dsampler.sim.noise import NoiseParams, draw_subset_fault, shot_rng
from dsampler.states import Criterion

logger = logging.getLogger(__name__)

Chooser = Callable[[NodeKey, Circuit, np.random.Generator], Weight]


@dataclass(frozen=True)
class StopRule:
    """Остановка по числу выстрелов или по целевой неопределённости, что наступит раньше."""
    max_shots: int | None = None
    eta_max: float | None = None

    def __post_init__(self):
        if self.max_shots is None and self.eta_max is None:
            raise ValueError("Нужно задать max_shots или eta_max")
        if self.max_shots is not None and self.max_shots < 0:
            raise ValueError("max_shots не может быть отрицательным")

    def reached(self, shots: int, eta: float) -> bool:
        if self.max_shots is not None and shots >= self.max_shots:
            return True
        return self.eta_max is not None and eta <= self.eta_max


@dataclass
class DssRun:
    """
    Результат запуска DSS.

    Attributes:
        tree: Дерево событий
        bounds: Границы при p_max
        eta_trace: (число выстрелов, η) в точках проверки
        choices: Сколько раз выбиралась пара (схема, w)
    """
    tree: SampleTree
    bounds: BoundsResult
    eta_trace: list[tuple[int, float]] = field(default_factory=list)
    choices: Counter = field(default_factory=Counter)

    @property
    def shots(self) -> int:
        return self.tree.shots


def probe_rng(seed: int) -> np.random.Generator:
    """Генератор выстрела-пробы, не пересекающийся с генераторами выстрелов."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0, 1)))


def _trace_of(execution, weights: Sequence[Weight]) -> tuple[TraceStep, ...]:
    names = execution.sequence
    steps = []
    for i, (name, weight) in enumerate(zip(names, weights)):
        outcome = names[i + 1] if i + 1 < len(names) else execution.verdict.verdict.value
        steps.append(TraceStep(name, tuple(weight), outcome))
    return tuple(steps)


def context_key(root: str, history: History, weights: Sequence[Weight], name: str) -> NodeKey:
    """
    Ключ узла дерева для очередной схемы: корень, затем пары (w, следующая схема).
    """
    key: tuple = (root,)
    for i, weight in enumerate(weights[:len(history)]):
        following = history[i + 1][0] if i + 1 < len(history) else name
        key = key + (tuple(weight), following)
    return key


def sample_shot(protocol: ProtocolGraph, noise: NoiseParams, rng, chooser: Chooser,
                step_limit: int = SHOT_STEP_LIMIT) -> tuple[TraceStep, ...]:
    """
    Один выстрел DSS.

    Args:
        protocol: Протокол
        noise: Категории мест ошибок (вероятности не используются)
        rng: Генератор выстрела
        chooser: (ключ контекста, схема, rng) -> вектор весов
        step_limit: Максимальное число схем

    Returns:
        Трасса выстрела
    """
    weights: list[Weight] = []

    def fault_for(name: str, circuit: Circuit, history: History):
        key = context_key(protocol.root, history, weights, name)
        weight = tuple(int(w) for w in chooser(key, circuit, rng))
        weights.append(weight)
        if not any(weight):
            return NO_FAULT
        return draw_subset_fault(circuit, weight, noise, rng)

    execution = execute(protocol, fault_for, rng, step_limit)
    return _trace_of(execution, weights)


def binomial_chooser(protocol: ProtocolGraph, noise: NoiseParams, rates: Sequence[float],
                     prohibit_zero: bool = False) -> Chooser:
    """Биномиальный критерий; запрет нулевого веса действует только в корне."""
    root_key = (protocol.root,)

    def choose(key: NodeKey, circuit: Circuit, rng) -> Weight:
        return choose_subset_binomial(noise.counts(circuit), rates, rng,
                                      prohibit_zero and key == root_key)

    return choose


def _binomial_batch(args) -> list[tuple[TraceStep, ...]]:
    """Пакет выстрелов в процессе-исполнителе; протокол восстанавливается по ссылке."""
    ref, noise, rates, seed, indices, prohibit_zero, step_limit = args
    protocol = get_protocol(ref)
    chooser = binomial_chooser(protocol, noise, rates, prohibit_zero)
    return [sample_shot(protocol, noise, shot_rng(seed, i), chooser, step_limit) for i in indices]


def _split(indices: range, parts: int) -> list[range]:
    size = -(-len(indices) // parts)
    return [indices[i:i + size] for i in range(0, len(indices), size)]


def _warn_large_rates(protocol: ProtocolGraph, noise: NoiseParams, rates: Sequence[float]) -> None:
    for name, circuit in protocol.circuits.items():
        for category, n, p in zip(noise.names, noise.counts(circuit), rates):
            if n and p >= 1 / (n + 1):
                logger.warning("p_max=%g категории %s не меньше 1/(N+1) для схемы %s (N=%d): "
                               "подмножество без ошибок перестаёт быть самым вероятным",
                               p, category, name, n)


def dss_run(protocol: ProtocolGraph, noise: NoiseParams, criterion: Criterion | str, stop: StopRule,
            seed: int = DEFAULT_SEED, workers: int = 1, prohibit_zero: bool = False,
            eru: EruOptions = EruOptions(), z: float = WILSON_Z, check_every: int = CHECK_EVERY,
            step_limit: int = SHOT_STEP_LIMIT) -> DssRun:
    """
    Запустить DSS при вероятностях ошибок p_max = noise.rates.

    Выстрел i использует генератор shot_rng(seed, i), поэтому результат
    биномиального критерия не зависит от числа процессов. Критерий ERU
    выбирает подмножество по текущему дереву и выполняется последовательно.

    Args:
        protocol: Протокол
        noise: Разбиение шума; вероятности категорий задают p_max
        criterion: binomial или eru
        stop: Правило остановки
        seed: Зерно запуска
        workers: Число процессов для биномиального критерия
        prohibit_zero: Исключить нулевой вес в корневой схеме
        eru: Параметры ERU
        z: Квантиль интервала Уилсона
        check_every: Период проверки правила остановки для биномиального критерия

    Returns:
        DssRun
    """
    criterion = Criterion(criterion)
    rates = noise.rates
    _warn_large_rates(protocol, noise, rates)
    tree = SampleTree.for_protocol(protocol, noise)
    run = DssRun(tree, bounds(tree, rates, z))

    prohibit = prohibit_zero and protocol.deterministic_root
    if prohibit_zero and not protocol.deterministic_root:
        logger.warning("Протокол %s: корневая схема не детерминирована без ошибок, запрет нулевого веса отключён",
                       protocol.name)
    if prohibit:
        # Путь без ошибок известен заранее: одна проба вместо выстрелов с w = 0
        probe = sample_shot(protocol, noise, probe_rng(seed), lambda key, circuit, rng: (0,) * noise.size,
                            step_limit)
        tree.record_shot(probe, count=False)

    logger.info("DSS %s: критерий %s, p_max=%s, seed=%d", protocol.name, criterion.value, rates, seed)
    shots = 0
    eta = float("inf")
    if criterion is Criterion.ERU:
        if workers > 1:
            logger.warning("Критерий ERU выполняется последовательно, workers=%d игнорируется", workers)
        while not stop.reached(shots, eta):
            chooser = lambda key, circuit, rng: choose_subset_eru(tree, key, rates, eru)  # noqa: E731
            trace = sample_shot(protocol, noise, shot_rng(seed, shots), chooser, step_limit)
            _record(run, trace)
            shots += 1
            eta = bounds(tree, rates, z).eta
            run.eta_trace.append((shots, eta))
    else:
        parallel = workers > 1 and protocol.source is not None
        if workers > 1 and not parallel:
            logger.warning("Протокол %s не имеет ссылки для процессов-исполнителей, выстрелы идут последовательно",
                           protocol.name)
        chooser = binomial_chooser(protocol, noise, rates, prohibit)
        pool = ProcessPoolExecutor(max_workers=workers) if parallel else None
        try:
            while not stop.reached(shots, eta):
                size = check_every if stop.max_shots is None else min(check_every, stop.max_shots - shots)
                indices = range(shots, shots + size)
                if pool is None:
                    traces = [sample_shot(protocol, noise, shot_rng(seed, i), chooser, step_limit) for i in indices]
                else:
                    jobs = [(protocol.source, noise, rates, seed, part, prohibit, step_limit)
                            for part in _split(indices, workers)]
                    traces = [trace for batch in pool.map(_binomial_batch, jobs) for trace in batch]
                for trace in traces:
                    _record(run, trace)
                shots += size
                eta = bounds(tree, rates, z).eta
                run.eta_trace.append((shots, eta))
                logger.debug("DSS %s: %d выстрелов, η=%.3e", protocol.name, shots, eta)
        finally:
            if pool is not None:
                pool.shutdown()

    run.bounds = bounds(tree, rates, z)
    logger.info("DSS %s завершён: %d выстрелов, p_L=%.3e, p_U=%.3e, η=%.3e",
                protocol.name, tree.shots, run.bounds.p_lower, run.bounds.p_upper, run.bounds.eta)
    return run


def _record(run: DssRun, trace: Sequence[TraceStep]) -> None:
    run.tree.record_shot(trace)
    for step in trace:
        run.choices[(step.circuit, step.weight)] += 1
