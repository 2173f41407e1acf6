"""
Дерево событий: достаточная статистика выборки DSS.

Узел схемы хранит узлы подмножеств по вектору весов w; узел подмножества
считает, куда ушли выстрелы: в следующую схему или в вердикт FAIL/NOFAIL.
Узлы адресуются полным контекстом пути, поэтому одна и та же схема в разных
местах истории получает независимые счётчики.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Iterator, Mapping, Sequence

from dsampler.errors import TreeError
from dsampler.protocols.graph import END, ProtocolGraph
from dsampler.sim.noise import NoiseParams
from dsampler.states import Verdict
from dsampler.utils.stats import RateEstimate

logger = logging.getLogger(__name__)

VERDICTS = (Verdict.FAIL.value, Verdict.NOFAIL.value)

Weight = tuple[int, ...]
NodeKey = tuple


@dataclass(frozen=True)
class TraceStep:
    """Шаг выстрела: схема, выбранный вектор весов и исход (следующая схема или вердикт)."""
    circuit: str
    weight: Weight
    outcome: str


@dataclass
class SubsetNode:
    weight: Weight
    path_weight: int
    counts: dict[str, int] = field(default_factory=dict)
    children: dict[str, "CircuitNode"] = field(default_factory=dict)

    @property
    def shots(self) -> int:
        return sum(self.counts.values())

    @property
    def labels(self) -> tuple[str, ...]:
        """Наблюдавшиеся исходы в каноническом порядке."""
        return tuple(sorted(self.counts, key=lambda label: (label not in VERDICTS, label)))

    @property
    def is_terminal(self) -> bool:
        return bool(self.counts) and all(label in VERDICTS for label in self.counts)

    @property
    def failures(self) -> int:
        return self.counts.get(Verdict.FAIL.value, 0)


@dataclass
class CircuitNode:
    circuit: str
    key: NodeKey
    path_weight: int
    subsets: dict[Weight, SubsetNode] = field(default_factory=dict)


class SampleTree:
    """
    Дерево событий одного протокола.

    Хранит всё, что нужно для пересчёта оценок при любых вероятностях ошибок:
    счётчики переходов, число мест по категориям для каждой схемы и FT-метаданные.
    """

    def __init__(self, protocol: str, root: str, circuit_counts: Mapping[str, Sequence[int]],
                 categories: Sequence[str], ft_order: int = 0, max_ft_length: int = 1,
                 fixed_successors: Mapping[str, str] | None = None):
        self.protocol = protocol
        self.categories = tuple(categories)
        self.circuit_counts = {name: tuple(int(n) for n in counts) for name, counts in circuit_counts.items()}
        self.ft_order = int(ft_order)
        self.max_ft_length = int(max_ft_length)
        # Схемы с единственным объявленным последователем-схемой
        self.fixed_successors = dict(fixed_successors or {})
        if root not in self.circuit_counts:
            raise TreeError(f"Корневая схема {root} не описана")
        self.root = CircuitNode(root, (root,), 0)
        self.shots = 0

    @classmethod
    def for_protocol(cls, protocol: ProtocolGraph, noise: NoiseParams) -> "SampleTree":
        """Пустое дерево с метаданными протокола и разбиением шума."""
        counts = {name: noise.counts(c) for name, c in protocol.circuits.items()}
        fixed = {}
        for name, targets in protocol.successors.items():
            distinct = set(targets)
            if len(distinct) == 1 and END not in distinct:
                fixed[name] = next(iter(distinct))
        return cls(protocol.name, protocol.root, counts, noise.names,
                   protocol.ft_order, protocol.max_ft_length, fixed)

    # === Запись ===

    def record_shot(self, trace: Sequence[TraceStep], count: bool = True) -> None:
        """
        Добавить выстрел: создать недостающие узлы и увеличить счётчики вдоль пути.

        Raises:
            TreeError: если трасса не согласуется со структурой дерева
        """
        self._check_trace(trace)
        node = self.root
        for position, step in enumerate(trace):
            subset = node.subsets.get(step.weight)
            if subset is None:
                subset = SubsetNode(step.weight, node.path_weight + sum(step.weight))
                node.subsets[step.weight] = subset
            subset.counts[step.outcome] = subset.counts.get(step.outcome, 0) + 1
            if len(subset.counts) > 2:
                raise TreeError(f"У подмножества {step.weight} схемы {step.circuit} больше двух исходов")
            if subset.path_weight == 0 and len(subset.counts) == 2:
                logger.warning("Подмножество веса 0 схемы %s имеет два исхода: путь без ошибок не единственен",
                               step.circuit)
            if step.outcome == Verdict.FAIL.value and subset.path_weight <= self.ft_order:
                logger.warning("Нарушение FT: отказ при суммарном весе %d в схеме %s",
                               subset.path_weight, step.circuit)
            if position + 1 < len(trace):
                child = subset.children.get(step.outcome)
                if child is None:
                    child = CircuitNode(step.outcome, node.key + (step.weight, step.outcome), subset.path_weight)
                    subset.children[step.outcome] = child
                node = child
        if count:
            self.shots += 1

    def _check_trace(self, trace: Sequence[TraceStep]) -> None:
        if not trace:
            raise TreeError("Пустая трасса")
        if trace[0].circuit != self.root.circuit:
            raise TreeError(f"Трасса начинается с {trace[0].circuit}, корень {self.root.circuit}")
        for position, step in enumerate(trace):
            counts = self.circuit_counts.get(step.circuit)
            if counts is None:
                raise TreeError(f"Неизвестная схема в трассе: {step.circuit}")
            if len(step.weight) != len(counts) or any(not 0 <= w <= n for w, n in zip(step.weight, counts)):
                raise TreeError(f"Вектор весов {step.weight} недопустим для схемы {step.circuit}")
            last = position == len(trace) - 1
            if last != (step.outcome in VERDICTS):
                raise TreeError(f"Вердикт должен стоять ровно в последнем шаге трассы: {step}")
            if not last and trace[position + 1].circuit != step.outcome:
                raise TreeError(f"Шаг {position}: исход {step.outcome}, следующая схема {trace[position + 1].circuit}")

    def merge(self, other: "SampleTree") -> None:
        """Сложить счётчики другого дерева того же протокола."""
        if (other.protocol, other.root.circuit, other.circuit_counts) != (self.protocol, self.root.circuit, self.circuit_counts):
            raise TreeError("Объединять можно только деревья одного протокола и разбиения шума")
        _merge_circuit(self.root, other.root)
        self.shots += other.shots

    # === Запросы ===

    def find(self, key: NodeKey) -> CircuitNode | None:
        """Узел схемы по ключу контекста или None, если путь ещё не открыт."""
        if not key or key[0] != self.root.circuit:
            return None
        node = self.root
        for i in range(1, len(key), 2):
            subset = node.subsets.get(tuple(key[i]))
            if subset is None:
                return None
            node = subset.children.get(key[i + 1])
            if node is None:
                return None
        return node

    def is_frozen(self, node: CircuitNode, subset: SubsetNode) -> bool:
        """
        Частота перехода известна точно.

        - у схемы единственный объявленный последователь-схема;
        - суммарный вес 0 и не больше одного исхода (путь без ошибок единственен);
        - t >= 1, терминальное подмножество с суммарным весом <= t без отказов.
        """
        if node.circuit in self.fixed_successors and not subset.is_terminal:
            return True
        if subset.path_weight == 0 and len(subset.counts) <= 1:
            return True
        return (self.ft_order >= 1 and subset.is_terminal
                and subset.path_weight <= self.ft_order and subset.failures == 0)

    def estimate(self, node: CircuitNode, subset: SubsetNode) -> RateEstimate:
        """Оценка частоты первого исхода (FAIL для терминальных подмножеств)."""
        if subset.is_terminal:
            m = subset.failures
        else:
            m = subset.counts[subset.labels[0]]
        return RateEstimate(m, subset.shots, self.is_frozen(node, subset))

    def walk(self) -> Iterator[tuple[CircuitNode, SubsetNode]]:
        """Все пары (узел схемы, узел подмножества) в детерминированном порядке."""
        stack = [self.root]
        while stack:
            node = stack.pop()
            for weight in sorted(node.subsets):
                subset = node.subsets[weight]
                yield node, subset
            for weight in sorted(node.subsets, reverse=True):
                subset = node.subsets[weight]
                for label in sorted(subset.children, reverse=True):
                    stack.append(subset.children[label])

    def subset_statistics(self) -> list[dict[str, Any]]:
        """Сводка по подмножествам: схема, путь, w, m, N, frozen."""
        rows = []
        for node, subset in self.walk():
            est = self.estimate(node, subset)
            rows.append({
                "circuit": node.circuit,
                "depth": len(node.key) // 2,
                "weight": subset.weight,
                "path_weight": subset.path_weight,
                "m": est.m,
                "N": est.n,
                "frozen": est.frozen,
                "outcomes": dict(sorted(subset.counts.items())),
            })
        return rows

    # === Сериализация ===

    def dump(self) -> str:
        """Детерминированный текстовый дамп, по строке на узел."""
        lines = [f"tree {self.protocol} shots={self.shots} t={self.ft_order} L={self.max_ft_length}"]
        self._dump_circuit(self.root, 0, lines)
        return "\n".join(lines) + "\n"

    def _dump_circuit(self, node: CircuitNode, depth: int, lines: list[str]) -> None:
        pad = "  " * depth
        lines.append(f"{pad}circuit {node.circuit} path_weight={node.path_weight}")
        for weight in sorted(node.subsets):
            subset = node.subsets[weight]
            est = self.estimate(node, subset)
            w = ",".join(map(str, weight))
            lines.append(f"{pad}  subset w=({w}) m={est.m} N={est.n} frozen={int(est.frozen)}")
            for label in subset.labels:
                if label in VERDICTS:
                    lines.append(f"{pad}    {label} {subset.counts[label]}")
                else:
                    lines.append(f"{pad}    next {label} {subset.counts[label]}")
                    self._dump_circuit(subset.children[label], depth + 3, lines)

    def to_dict(self) -> dict[str, Any]:
        return {
            "protocol": self.protocol,
            "categories": list(self.categories),
            "circuit_counts": {k: list(v) for k, v in sorted(self.circuit_counts.items())},
            "ft_order": self.ft_order,
            "max_ft_length": self.max_ft_length,
            "fixed_successors": dict(sorted(self.fixed_successors.items())),
            "shots": self.shots,
            "root": _circuit_to_dict(self.root),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SampleTree":
        try:
            root = data["root"]
            tree = cls(data["protocol"], root["circuit"], data["circuit_counts"], data["categories"],
                       data.get("ft_order", 0), data.get("max_ft_length", 1), data.get("fixed_successors"))
            tree.shots = int(data.get("shots", 0))
            _circuit_from_dict(tree.root, root)
        except (KeyError, TypeError) as e:
            raise TreeError(f"Некорректное описание дерева: {e}")
        return tree


def _merge_circuit(target: CircuitNode, source: CircuitNode) -> None:
    for weight, theirs in source.subsets.items():
        ours = target.subsets.get(weight)
        if ours is None:
            ours = SubsetNode(weight, theirs.path_weight)
            target.subsets[weight] = ours
        for label, count in theirs.counts.items():
            ours.counts[label] = ours.counts.get(label, 0) + count
        if len(ours.counts) > 2:
            raise TreeError(f"После объединения у подмножества {weight} больше двух исходов")
        for label, child in theirs.children.items():
            mine = ours.children.get(label)
            if mine is None:
                mine = CircuitNode(label, target.key + (weight, label), child.path_weight)
                ours.children[label] = mine
            _merge_circuit(mine, child)


def _circuit_to_dict(node: CircuitNode) -> dict[str, Any]:
    return {
        "circuit": node.circuit,
        "subsets": [
            {
                "weight": list(weight),
                "counts": dict(sorted(subset.counts.items())),
                "children": {label: _circuit_to_dict(child) for label, child in sorted(subset.children.items())},
            }
            for weight, subset in sorted(node.subsets.items())
        ],
    }


def _circuit_from_dict(node: CircuitNode, data: Mapping[str, Any]) -> None:
    for raw in data.get("subsets", []):
        weight = tuple(int(w) for w in raw["weight"])
        subset = SubsetNode(weight, node.path_weight + sum(weight), {k: int(v) for k, v in raw["counts"].items()})
        node.subsets[weight] = subset
        for label, child_data in raw.get("children", {}).items():
            child = CircuitNode(label, node.key + (weight, label), subset.path_weight)
            subset.children[label] = child
            _circuit_from_dict(child, child_data)
