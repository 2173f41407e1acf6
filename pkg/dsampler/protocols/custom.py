"""
Пользовательские протоколы из декларативного файла TOML или JSON.

    name = "ghz-custom"
    root = "GHZ"
    ft_order = 0
    max_ft_length = 1
    deterministic_root = true

    [circuits]
    GHZ = "ghz.circuit"

    [[transitions]]
    from = "GHZ"
    when = { flag = 1 }
    verdict = "FAIL"

    [[transitions]]
    from = "GHZ"
    verdict = "NOFAIL"

Строки переходов проверяются по порядку, срабатывает первая подходящая.
Условия when ссылаются на метки измерений последней схемы.
"""

import json

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

from dsampler.errors import ProtocolError
from dsampler.protocols.graph import END, History, Next, ProtocolGraph, Terminate
from dsampler.sim.serialize import load_circuit
from dsampler.states import Verdict


@dataclass(frozen=True)
class TransitionRow:
    """Строка таблицы переходов."""
    source: str
    when: tuple[tuple[str, int], ...]
    target: str | None = None
    verdict: Verdict | None = None

    def matches(self, name: str, record) -> bool:
        return name == self.source and all(record[label] == bit for label, bit in self.when)

    def decision(self):
        if self.verdict is not None:
            return Terminate(fail=self.verdict is Verdict.FAIL)
        return Next(self.target)


def read_document(path: str | Path) -> dict[str, Any]:
    """Прочитать TOML или JSON по расширению файла."""
    path = Path(path)
    try:
        if path.suffix.lower() == ".json":
            return json.loads(path.read_text(encoding="utf-8"))
        with path.open("rb") as f:
            return tomllib.load(f)
    except (OSError, ValueError) as e:
        raise ProtocolError(f"Не удалось прочитать {path}: {e}")


def _parse_row(raw: Mapping[str, Any]) -> TransitionRow:
    try:
        source = raw["from"]
    except KeyError:
        raise ProtocolError(f"Строка перехода без поля from: {raw}")
    when = tuple(sorted((str(k), int(v)) for k, v in raw.get("when", {}).items()))
    if ("to" in raw) == ("verdict" in raw):
        raise ProtocolError(f"Строка перехода из {source} должна содержать ровно одно из to/verdict")
    if "verdict" in raw:
        try:
            return TransitionRow(source, when, verdict=Verdict(str(raw["verdict"]).upper()))
        except ValueError:
            raise ProtocolError(f"Неизвестный вердикт: {raw['verdict']}")
    return TransitionRow(source, when, target=str(raw["to"]))


def protocol_from_document(doc: Mapping[str, Any], base_dir: Path, source: str | None = None) -> ProtocolGraph:
    """
    Собрать протокол из разобранного документа.

    Args:
        doc: Содержимое файла протокола
        base_dir: Каталог, относительно которого ищутся файлы схем
        source: Ссылка на файл для восстановления в воркерах
    """
    try:
        name = str(doc["name"])
        root = str(doc["root"])
        circuit_files = dict(doc["circuits"])
    except KeyError as e:
        raise ProtocolError(f"В описании протокола нет поля {e}")

    circuits = {cname: load_circuit(base_dir / fname, cname) for cname, fname in circuit_files.items()}
    qubits = doc.get("qubits")
    if qubits is not None:
        for circuit in circuits.values():
            if circuit.n_qubits > int(qubits):
                raise ProtocolError(f"Схема {circuit.name} использует больше {qubits} кубитов")

    rows = tuple(_parse_row(raw) for raw in doc.get("transitions", []))
    successors: dict[str, list[str]] = {cname: [] for cname in circuits}
    for row in rows:
        if row.source not in circuits:
            raise ProtocolError(f"Переход из неизвестной схемы {row.source}")
        target = END if row.verdict is not None else row.target
        if target not in successors[row.source]:
            successors[row.source].append(target)

    def transition(current: str, history: History):
        record = history[-1][1]
        for row in rows:
            if row.matches(current, record):
                return row.decision()
        raise ProtocolError(f"Нет подходящего перехода из {current}")

    return ProtocolGraph(
        name=name,
        circuits=circuits,
        root=root,
        transition=transition,
        successors={k: tuple(v) for k, v in successors.items()},
        ft_order=int(doc.get("ft_order", 0)),
        max_ft_length=int(doc.get("max_ft_length", 1)),
        deterministic_root=bool(doc.get("deterministic_root", False)),
        source=source,
    )


def load_protocol_file(path: str | Path) -> ProtocolGraph:
    """Загрузить пользовательский протокол из файла."""
    path = Path(path)
    return protocol_from_document(read_document(path), path.parent, source=str(path))
