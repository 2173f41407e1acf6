"""
Файл настроек запуска (TOML или JSON).

    protocol = "ghz"
    criterion = "eru"
    shots = 200
    seed = 7
    p_max = [1e-3]
    grid = "1e-4:1e-3:10"

    [noise]
    [[noise.categories]]
    name = "p"
    kinds = ["single_qubit_gate", "two_qubit_gate", "init", "measurement"]

Флаги командной строки важнее значений файла, значения файла важнее .env.
"""

from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Mapping

from dsampler.config import DEFAULT_SEED, DEFAULT_WORKERS, WILSON_Z
from dsampler.errors import NoiseError
from dsampler.protocols.custom import read_document
from dsampler.sim.noise import Category, NoiseParams
from dsampler.states import Criterion


@dataclass(frozen=True)
class RunSettings:
    """Параметры запуска после слияния источников."""
    protocol: str = "ghz"
    criterion: Criterion = Criterion.BINOMIAL
    shots: int | None = None
    eta_max: float | None = None
    seed: int = DEFAULT_SEED
    workers: int = DEFAULT_WORKERS
    prohibit_zero: bool = False
    z: float = WILSON_Z
    p_max: tuple[float, ...] = (1e-3,)
    grid: str | list[float] | None = None
    categories: tuple[Mapping[str, Any], ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "criterion", Criterion(self.criterion))
        object.__setattr__(self, "p_max", tuple(float(p) for p in self.p_max))
        if self.workers < 1:
            raise ValueError("Число процессов должно быть не меньше 1")
        if self.z <= 0:
            raise ValueError("z должно быть положительным")

    def noise(self) -> NoiseParams:
        """
        Разбиение шума с вероятностями p_max.

        Без явных категорий: одна вероятность на всё или пара (p1, p2),
        где p2 относится к двухкубитным вентилям.
        """
        if self.categories:
            if len(self.categories) != len(self.p_max):
                raise NoiseError(f"Категорий {len(self.categories)}, а вероятностей p_max {len(self.p_max)}")
            cats = tuple(Category(c["name"], frozenset(c["kinds"]), p) for c, p in zip(self.categories, self.p_max))
            return NoiseParams(cats)
        if len(self.p_max) == 1:
            return NoiseParams.single_parameter(self.p_max[0])
        if len(self.p_max) == 2:
            return NoiseParams.two_parameter(*self.p_max)
        raise NoiseError("Для более чем двух вероятностей задайте [[noise.categories]]")


def load_run_config(path: str | Path) -> dict[str, Any]:
    """Прочитать файл настроек в словарь полей RunSettings."""
    doc = read_document(path)
    values = {k: v for k, v in doc.items() if k != "noise"}
    noise = doc.get("noise", {})
    if noise.get("categories"):
        values["categories"] = tuple(noise["categories"])
        rates = [c["rate"] for c in noise["categories"] if "rate" in c]
        if "p_max" not in values and len(rates) == len(noise["categories"]):
            values["p_max"] = rates
    known = {f.name for f in fields(RunSettings)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ValueError(f"Неизвестные ключи в {path}: {unknown}")
    if "p_max" in values and not isinstance(values["p_max"], (list, tuple)):
        values["p_max"] = [values["p_max"]]
    return values


def resolve_settings(config: str | Path | None = None, **overrides: Any) -> RunSettings:
    """
    Слить настройки: значения по умолчанию, файл, затем флаги (None и пустые значения пропускаются).
    """
    settings = RunSettings(**load_run_config(config)) if config else RunSettings()
    given = {k: v for k, v in overrides.items() if v is not None and v != ()}
    return replace(settings, **given)
