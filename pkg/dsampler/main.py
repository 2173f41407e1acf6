"""
Главный модуль сэмплера.
Точка входа командной строки: run, curve, compare, audit-ft, oracle.
"""

import functools
import json
import logging
from pathlib import Path

import click

from dsampler.config import DEFAULT_SHOTS, LOG_LEVEL, LOGS_DIR, OUTPUT_DIR
from dsampler.protocols import BUILTIN_PROTOCOLS, get_protocol, validate
from dsampler.sampling.dss import DssRun, StopRule, dss_run
from dsampler.sampling.exhaustive import audit_ft, exhaustive_subset
from dsampler.sampling.tree import SampleTree
from dsampler.sim.noise import NoiseParams
from dsampler.states import Criterion
from dsampler.utils.analysis import compare, curve_to_csv, parse_grid, ray_grid, rescale_curve
from dsampler.utils.export import create_curve_report
from dsampler.utils.settings import RunSettings, resolve_settings
from dsampler.utils.stats import multi_binomial_factor

logger = logging.getLogger(__name__)


def setup_logging(level: str) -> None:
    """Журнал в файл и stderr; stdout остаётся для результатов."""
    LOGS_DIR.mkdir(parents=True, exist_ok=True)
    logging.basicConfig(
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        level=getattr(logging, level.upper()),
        handlers=[
            logging.FileHandler(LOGS_DIR / "dsampler.log", encoding="utf-8"),
            logging.StreamHandler(),
        ],
    )


def _cli_errors(func):
    """Ошибки пакета превращаются в сообщение и ненулевой код выхода."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (ValueError, RuntimeError, OSError) as e:
            logger.error("%s: %s", func.__name__, e)
            raise click.ClickException(str(e))
    return wrapper


def run_options(func):
    """Общие флаги запуска DSS."""
    options = [
        click.option("--protocol", default=None,
                     help=f"Встроенный протокол ({', '.join(sorted(BUILTIN_PROTOCOLS))}) или файл описания"),
        click.option("--config", "config", type=click.Path(exists=True, dir_okay=False), default=None,
                     help="Файл настроек TOML/JSON"),
        click.option("--pmax", "p_max", type=float, multiple=True, help="p_max по категориям (повторяемый)"),
        click.option("--criterion", type=click.Choice([c.value for c in Criterion]), default=None),
        click.option("--shots", type=int, default=None, help="Максимум выстрелов"),
        click.option("--eta-max", type=float, default=None, help="Целевая неопределённость η"),
        click.option("--seed", type=int, default=None),
        click.option("--workers", type=int, default=None, help="Число процессов (биномиальный критерий)"),
        click.option("--prohibit-zero/--allow-zero", default=None, help="Запрет нулевого веса в корневой схеме"),
        click.option("--z", type=float, default=None, help="Квантиль интервала Уилсона"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _sample(settings: RunSettings) -> DssRun:
    protocol = get_protocol(settings.protocol)
    validate(protocol)
    shots = settings.shots
    if shots is None and settings.eta_max is None:
        shots = DEFAULT_SHOTS
    return dss_run(protocol, settings.noise(), settings.criterion, StopRule(shots, settings.eta_max),
                   seed=settings.seed, workers=settings.workers, prohibit_zero=settings.prohibit_zero,
                   z=settings.z)


def _grid(settings: RunSettings, text: str | None):
    source = text if text is not None else settings.grid
    if source is None:
        return ray_grid(settings.p_max, 1e-2, 1.0, 9)
    if isinstance(source, (list, tuple)):
        source = ",".join(str(v) for v in source)
    return parse_grid(str(source), settings.p_max)


@click.group()
@click.option("--log-level", default=LOG_LEVEL, show_default=True, help="Уровень логирования")
def main(log_level: str):
    """Динамическое подмножественное сэмплирование частоты отказа протоколов КИО."""
    setup_logging(log_level)


@main.command()
@run_options
@click.option("--out", type=click.Path(file_okay=False), default=None,
              help="Каталог для tree.txt, tree.json и bounds.csv")
@_cli_errors
def run(config, out, **flags):
    """Сэмплировать протокол и вывести границы при p_max."""
    settings = resolve_settings(config, **flags)
    result = _sample(settings)
    table = curve_to_csv(rescale_curve(result.tree, [settings.p_max], settings.z))
    out_dir = Path(out) if out else OUTPUT_DIR / result.tree.protocol
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "tree.txt").write_text(result.tree.dump(), encoding="utf-8", newline="")
    (out_dir / "tree.json").write_text(json.dumps(result.tree.to_dict(), indent=2, sort_keys=True) + "\n",
                                       encoding="utf-8", newline="")
    (out_dir / "bounds.csv").write_text(table, encoding="utf-8", newline="")
    logger.info("Результаты записаны в %s", out_dir)
    click.echo(table, nl=False)


@main.command()
@run_options
@click.option("--tree", "tree_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Сохранённое дерево tree.json (иначе сначала сэмплировать)")
@click.option("--grid", default=None, help="start:stop:points или список через запятую")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="CSV-файл (иначе stdout)")
@click.option("--xlsx", type=click.Path(dir_okay=False), default=None, help="Отчёт Excel")
@_cli_errors
def curve(config, tree_path, grid, out, xlsx, **flags):
    """Пересчитать границы по сетке вероятностей."""
    settings = resolve_settings(config, **flags)
    if tree_path:
        tree = SampleTree.from_dict(json.loads(Path(tree_path).read_text(encoding="utf-8")))
        if len(settings.p_max) != len(tree.categories):
            raise ValueError(f"Дерево имеет {len(tree.categories)} категорий, задано p_max {settings.p_max}")
    else:
        tree = _sample(settings).tree
    table = rescale_curve(tree, _grid(settings, grid), settings.z)
    text = curve_to_csv(table, out)
    if xlsx:
        Path(xlsx).write_bytes(create_curve_report(table, f"Границы {tree.protocol}").getvalue())
    if out is None:
        click.echo(text, nl=False)


@main.command(name="compare")
@run_options
@click.option("--mc-shots", type=int, default=10000, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="CSV-файл (иначе stdout)")
@_cli_errors
def compare_command(config, mc_shots, out, **flags):
    """Сравнить неопределённость DSS и прямого Монте-Карло."""
    settings = resolve_settings(config, **flags)
    protocol = get_protocol(settings.protocol)
    validate(protocol)
    table = compare(protocol, settings.noise(), settings.shots or DEFAULT_SHOTS, mc_shots,
                    seed=settings.seed, criterion=settings.criterion,
                    prohibit_zero=settings.prohibit_zero, z=settings.z)
    text = table.to_csv(index=False, float_format="%.12g", lineterminator="\n")
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="")
    else:
        click.echo(text, nl=False)


@main.command(name="audit-ft")
@click.option("--protocol", "protocols", multiple=True, default=("steane-det-0", "steane-flag-0"),
              show_default=True)
@_cli_errors
def audit_ft_command(protocols):
    """Перебрать все одиночные ошибки и проверить отсутствие отказов."""
    failed = []
    for ref in protocols:
        protocol = get_protocol(ref)
        report = audit_ft(protocol)
        for line in report.lines():
            click.echo(line)
        if not report.passed:
            failed.append(protocol.name)
    if failed:
        raise click.ClickException(f"Аудит FT не пройден: {', '.join(failed)}")


@main.command()
@click.option("--protocol", default="ghz", show_default=True)
@click.option("--weight", "weights", type=int, multiple=True, required=True, help="Вес по категориям (повторяемый)")
@click.option("--pmax", "p_max", type=float, multiple=True, help="Вероятности для Σ A_w·rate")
@click.option("--seed", type=int, default=None)
@_cli_errors
def oracle(protocol, weights, p_max, seed):
    """Точная частота отказа подмножества корневой схемы."""
    if len(weights) > 2:
        raise ValueError("Оракул поддерживает одну или две категории")
    graph = get_protocol(protocol)
    noise = NoiseParams.single_parameter() if len(weights) == 1 else NoiseParams.two_parameter()
    kwargs = {"seed": seed} if seed is not None else {}
    result = exhaustive_subset(graph, weights, noise, **kwargs)
    w = ",".join(map(str, weights))
    click.echo(f"protocol={graph.name} w=({w}) rate={result.rate:.12g} low={result.low:.12g} "
               f"high={result.high:.12g} exact={int(result.exact)} configurations={result.configurations}")
    if p_max:
        counts = noise.counts(graph.circuits[graph.root])
        factor = multi_binomial_factor(counts, weights, p_max)
        click.echo(f"A_w={factor:.12g} contribution={factor * result.rate:.12g}")


if __name__ == "__main__":
    main()
