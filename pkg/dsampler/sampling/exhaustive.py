"""
Полный перебор: точная частота отказа подмножества и аудит отказоустойчивости.

Ошибки подмножества размещаются только в корневой схеме, продолжение
протокола исполняется без ошибок. Исходы недетерминированных измерений
перебираются как честные монеты.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

from dsampler.config import COIN_DEPTH, DEFAULT_SEED, EXHAUSTIVE_BUDGET, ORACLE_FALLBACK_SHOTS, SHOT_STEP_LIMIT, WILSON_Z
from dsampler.errors import BudgetExceededError, CircuitError, ShotLimitError
from dsampler.protocols.graph import END, History, ProtocolGraph, Terminate, execute, expand_step
from dsampler.sim.circuit import NO_FAULT, Circuit, FaultEvent, MeasurementRecord, run_with_faults
from dsampler.sim.coins import expand_coins
from dsampler.sim.noise import NoiseParams, draw_subset_fault, enumerate_payloads, shot_rng
from dsampler.sim.tableau import StabilizerState
from dsampler.utils.stats import wilson_interval

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OracleResult:
    """
    Частота отказа подмножества.

    exact=False означает оценку выстрелами (превышена глубина монет),
    тогда [low, high] - интервал Уилсона.
    """
    rate: float
    low: float
    high: float
    exact: bool
    configurations: int


def _circuit_protocol(circuit: Circuit, coin_depth: int) -> ProtocolGraph:
    """Односхемный протокол: отказ = запись измерений отличается от записи без ошибок."""
    records = {tuple(sorted(record.outcomes.items()))
               for (_, record), _ in expand_coins(lambda coins: _bare_run(circuit, NO_FAULT, coins), coin_depth)}
    if len(records) != 1:
        raise CircuitError(f"Схема {circuit.name} без ошибок даёт случайные исходы, эталонной записи нет")
    (reference,) = records

    def transition(name: str, history: History):
        return Terminate(fail=tuple(sorted(history[-1][1].outcomes.items())) != reference)

    return ProtocolGraph(name=circuit.name, circuits={circuit.name: circuit}, root=circuit.name,
                         transition=transition, successors={circuit.name: (END,)}, deterministic_root=True)


def _bare_run(circuit: Circuit, fault: FaultEvent, coins) -> tuple[StabilizerState, MeasurementRecord]:
    state = StabilizerState(circuit.n_qubits)
    return state, run_with_faults(state, circuit, fault, coins)


def _payload_sizes(circuit: Circuit, group: Sequence[int]) -> list[int]:
    return [len(enumerate_payloads(circuit.locations[i])) for i in group]


def configuration_count(circuit: Circuit, weights: Sequence[int], noise: NoiseParams) -> int:
    """Число конфигураций (места и нагрузки) подмножества: элементарные симметрические многочлены."""
    total = 1
    for w, group in zip(weights, noise.locations(circuit)):
        e = [1] + [0] * w
        for size in _payload_sizes(circuit, group):
            for j in range(w, 0, -1):
                e[j] += e[j - 1] * size
        total *= e[w]
    return total


def _configurations(circuit: Circuit, weights: Sequence[int], noise: NoiseParams):
    """(вероятность, событие ошибок) для всех конфигураций подмножества."""
    groups = noise.locations(circuit)
    norm = math.prod(math.comb(len(g), w) for w, g in zip(weights, groups))
    choices = [itertools.combinations(g, w) for w, g in zip(weights, groups)]
    for picked in itertools.product(*choices):
        faulted = tuple(i for part in picked for i in part)
        options = [enumerate_payloads(circuit.locations[i]) for i in faulted]
        for combo in itertools.product(*options):
            prob = math.prod(p for _, p in combo) / norm
            payloads = {i: payload for i, (payload, _) in zip(faulted, combo) if payload is not None}
            yield prob, FaultEvent(frozenset(faulted), payloads)


def _failure_probability(protocol: ProtocolGraph, state: StabilizerState, history: History, name: str,
                         fault: FaultEvent, coin_depth: int, step_limit: int) -> float:
    if len(history) >= step_limit:
        raise ShotLimitError(f"Протокол {protocol.name} не завершился за {step_limit} схем")
    total = 0.0
    for prob, local, extended, decision in expand_step(protocol, state, history, name, fault, coin_depth):
        if isinstance(decision, Terminate):
            total += prob * decision.fail
        else:
            total += prob * _failure_probability(protocol, local, extended, decision.circuit,
                                                 NO_FAULT, coin_depth, step_limit)
    return total


def _estimate(protocol: ProtocolGraph, weights: Sequence[int], noise: NoiseParams, shots: int,
              seed: int, z: float, configurations: int) -> OracleResult:
    failures = 0
    root = protocol.circuits[protocol.root]
    for i in range(shots):
        rng = shot_rng(seed, i)

        def fault_for(name, circuit, history, rng=rng):
            return draw_subset_fault(root, weights, noise, rng) if not history else NO_FAULT

        failures += execute(protocol, fault_for, rng).verdict.fail
    low, high = wilson_interval(failures, shots, z)
    return OracleResult(failures / shots, low, high, False, configurations)


def exhaustive_subset(target: ProtocolGraph | Circuit, weights: Sequence[int], noise: NoiseParams | None = None,
                      budget: int = EXHAUSTIVE_BUDGET, coin_depth: int = COIN_DEPTH,
                      fallback_shots: int = ORACLE_FALLBACK_SHOTS, seed: int = DEFAULT_SEED,
                      z: float = WILSON_Z, step_limit: int = SHOT_STEP_LIMIT) -> OracleResult:
    """
    Точная частота отказа подмножества w корневой схемы.

    Args:
        target: Протокол или отдельная схема (для схемы отказ - отличие записи от эталонной)
        weights: Вектор весов по категориям
        noise: Категоризация мест, по умолчанию одна категория
        budget: Предел числа конфигураций
        coin_depth: Предел числа монет в одном исполнении схемы
        fallback_shots: Число выстрелов оценки при превышении глубины монет

    Returns:
        OracleResult

    Raises:
        BudgetExceededError: если конфигураций больше budget
    """
    noise = noise or NoiseParams.single_parameter()
    protocol = _circuit_protocol(target, coin_depth) if isinstance(target, Circuit) else target
    root = protocol.circuits[protocol.root]
    weights = tuple(int(w) for w in weights)
    counts = noise.counts(root)
    if len(weights) != len(counts) or any(not 0 <= w <= n for w, n in zip(weights, counts)):
        raise ValueError(f"Вектор весов {weights} недопустим для схемы {root.name} с местами {counts}")

    total = configuration_count(root, weights, noise)
    if total > budget:
        raise BudgetExceededError(f"Подмножество {weights} схемы {root.name}: {total} конфигураций (предел {budget})")
    logger.info("Полный перебор %s, w=%s: %d конфигураций", protocol.name, weights, total)

    parts = []
    try:
        for prob, fault in _configurations(root, weights, noise):
            state = StabilizerState(protocol.n_qubits)
            parts.append(prob * _failure_probability(protocol, state, (), protocol.root, fault,
                                                     coin_depth, step_limit))
    except BudgetExceededError:
        logger.warning("Глубина монет %d превышена для %s, оценка по %d выстрелам",
                       coin_depth, protocol.name, fallback_shots)
        return _estimate(protocol, weights, noise, fallback_shots, seed, z, total)
    rate = min(1.0, max(0.0, math.fsum(parts)))
    return OracleResult(rate, rate, rate, True, total)


# === Аудит отказоустойчивости ===

@dataclass(frozen=True)
class AuditFailure:
    """Единичная ошибка, приведшая к отказу."""
    sequence: tuple[str, ...]
    circuit: str
    location: int
    payload: str


@dataclass
class AuditReport:
    protocol: str
    configurations: int = 0
    failures: list[AuditFailure] = field(default_factory=list)
    longest: int = 0
    fault_free_sequences: set[tuple[str, ...]] = field(default_factory=set)

    @property
    def passed(self) -> bool:
        return not self.failures and len(self.fault_free_sequences) == 1

    def lines(self) -> list[str]:
        status = "OK" if self.passed else "FAIL"
        out = [f"{self.protocol}: {status}, конфигураций {self.configurations}, "
               f"отказов {len(self.failures)}, максимальная длина {self.longest}"]
        out += [f"  {'>'.join(f.sequence)} {f.circuit}[{f.location}] {f.payload}" for f in self.failures]
        return out


def _payload_label(payload) -> str:
    return "flip" if payload is True else payload.label


def audit_ft(protocol: ProtocolGraph, coin_depth: int = COIN_DEPTH, step_limit: int = SHOT_STEP_LIMIT) -> AuditReport:
    """
    Перебрать все выстрелы ровно с одной ошибкой (любое место, любая нетривиальная
    нагрузка, любые исходы монет) и без ошибок.

    Протокол с t >= 1 проходит аудит, если ни одна такая ошибка не приводит
    к отказу и путь без ошибок единственен.
    """
    report = AuditReport(protocol.name)
    # (состояние, история, схема, размещённая ошибка или None)
    stack = [(StabilizerState(protocol.n_qubits), (), protocol.root, None)]
    while stack:
        state, history, name, placed = stack.pop()
        if len(history) >= step_limit:
            raise ShotLimitError(f"Протокол {protocol.name} не завершился за {step_limit} схем")
        options = [(NO_FAULT, placed)]
        if placed is None:
            circuit = protocol.circuits[name]
            for loc in circuit.locations:
                for payload, _ in enumerate_payloads(loc):
                    if payload is None:
                        continue
                    fault = FaultEvent(frozenset({loc.index}), {loc.index: payload})
                    options.append((fault, (name, loc.index, _payload_label(payload))))
                    report.configurations += 1
        for fault, marker in options:
            for _, local, extended, decision in expand_step(protocol, state, history, name, fault, coin_depth):
                if not isinstance(decision, Terminate):
                    stack.append((local, extended, decision.circuit, marker))
                    continue
                sequence = tuple(n for n, _ in extended)
                report.longest = max(report.longest, len(sequence))
                if marker is None:
                    report.fault_free_sequences.add(sequence)
                    if decision.fail:
                        report.failures.append(AuditFailure(sequence, "-", -1, "none"))
                elif decision.fail:
                    circuit_name, location, label = marker
                    failure = AuditFailure(sequence, circuit_name, location, label)
                    if failure not in report.failures:
                        report.failures.append(failure)
    logger.info("Аудит FT %s: %d конфигураций, %d отказов", protocol.name, report.configurations, len(report.failures))
    return report
