"""
Текстовый формат схем.

    # комментарий
    qubits: 5
    init Z 0
    single_qubit_gate H 0
    two_qubit_gate CNOT 0 1
    measurement Z 4 @flag
"""

from pathlib import Path

from dsampler.errors import CircuitError
from dsampler.sim.circuit import Circuit, Location
from dsampler.states import LocationKind


def parse_circuit(text: str, name: str) -> Circuit:
    """
    Разобрать схему из текста.

    Args:
        text: Содержимое в формате модуля
        name: Имя схемы

    Returns:
        Схема

    Raises:
        CircuitError: Нет заголовка qubits: N, он повторён или стоит после операций
    """
    n_qubits = None
    locations = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower().startswith("qubits:"):
            if n_qubits is not None or locations:
                raise CircuitError(f"{name}:{lineno}: заголовок qubits: должен быть первой строкой схемы")
            try:
                n_qubits = int(line.split(":", 1)[1])
            except ValueError:
                raise CircuitError(f"{name}:{lineno}: некорректное число кубитов")
            continue
        if n_qubits is None:
            raise CircuitError(f"{name}:{lineno}: нет заголовка qubits: N перед операциями")
        tokens = line.split()
        label = None
        if tokens[-1].startswith("@"):
            label = tokens.pop()[1:]
        if len(tokens) < 3:
            raise CircuitError(f"{name}:{lineno}: ожидается KIND OP TARGETS...")
        try:
            kind = LocationKind(tokens[0])
            targets = tuple(int(t) for t in tokens[2:])
        except ValueError:
            raise CircuitError(f"{name}:{lineno}: не удалось разобрать строку {raw!r}")
        locations.append(Location(len(locations), kind, tokens[1], targets, label))

    if n_qubits is None:
        raise CircuitError(f"{name}: нет заголовка qubits: N")
    return Circuit(name, n_qubits, tuple(locations))


def load_circuit(path: str | Path, name: str | None = None) -> Circuit:
    """Загрузить схему из файла; имя по умолчанию берётся из имени файла."""
    path = Path(path)
    return parse_circuit(path.read_text(encoding="utf-8"), name or path.stem)


def dump_circuit(circuit: Circuit) -> str:
    """Сериализовать схему в текстовый формат."""
    lines = [f"qubits: {circuit.n_qubits}"]
    for loc in circuit.locations:
        parts = [loc.kind.value, loc.operation, *map(str, loc.targets)]
        if loc.label is not None:
            parts.append(f"@{loc.label}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"
