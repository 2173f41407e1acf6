"""
Тесты анализа кривых, настроек запуска и отчёта Excel.
"""

from pathlib import Path

import pandas as pd
import pytest
from openpyxl import load_workbook

from dsampler.errors import NoiseError
from dsampler.sampling.dss import StopRule, dss_run
from dsampler.sim.noise import NoiseParams
from dsampler.states import Criterion
from dsampler.utils.analysis import (
    BOUND_COLUMNS,
    compare,
    curve_to_csv,
    loglog_slope,
    parse_grid,
    pmax_study,
    ray_grid,
    read_curve_csv,
    rescale_curve,
)
from dsampler.utils.export import create_curve_report
from dsampler.utils.settings import RunSettings, load_run_config, resolve_settings

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture
def ghz_run(ghz):
    """Короткий запуск DSS на GHZ при p_max = 1e-3."""
    return dss_run(ghz, NoiseParams.single_parameter(1e-3), "binomial", StopRule(max_shots=40), seed=11)


class TestGrids:
    """Тесты сеток вероятностей."""

    def test_ray_grid(self):
        """Логарифмический шаг по лучу p_max."""
        grid = ray_grid((1e-3, 1e-2), 0.1, 1.0, 3)
        assert len(grid) == 3
        assert grid[0] == pytest.approx((1e-4, 1e-3))
        assert grid[1][0] == pytest.approx(10 ** -3.5)
        assert grid[2] == pytest.approx((1e-3, 1e-2))

    def test_ray_grid_single_point(self):
        """Одна точка - конец луча."""
        assert ray_grid((1e-3,), 0.1, 0.5, 1) == [pytest.approx((5e-4,))]

    @pytest.mark.parametrize("start,stop,points", [(0.0, 1.0, 3), (0.1, -1.0, 3), (0.1, 1.0, 0)])
    def test_ray_grid_errors(self, start, stop, points):
        """Неположительные множители и пустая сетка."""
        with pytest.raises(ValueError):
            ray_grid((1e-3,), start, stop, points)

    def test_parse_range(self):
        """start:stop:points задаёт первую компоненту p."""
        grid = parse_grid("1e-5:1e-3:3", (1e-3, 1e-2))
        assert grid[0] == pytest.approx((1e-5, 1e-4))
        assert grid[1] == pytest.approx((1e-4, 1e-3))
        assert grid[2] == pytest.approx((1e-3, 1e-2))

    def test_parse_list(self):
        """Явный список через запятую."""
        grid = parse_grid("1e-4, 2e-4,5e-4", (1e-3,))
        assert [p for (p,) in grid] == pytest.approx([1e-4, 2e-4, 5e-4])

    @pytest.mark.parametrize("text", ["", "1e-4:1e-3", "a,b", "1e-4:1e-3:x"])
    def test_parse_errors(self, text):
        """Некорректная строка сетки."""
        with pytest.raises(ValueError):
            parse_grid(text, (1e-3,))

    def test_parse_needs_positive_pmax(self):
        """Для луча нужна положительная компонента p_max."""
        with pytest.raises(ValueError):
            parse_grid("1e-4,1e-3", (0.0,))


class TestCurves:
    """Тесты пересчёта границ по сетке."""

    def test_rescale_at_pmax_matches_run(self, ghz_run):
        """В точке p_max кривая совпадает с границами запуска."""
        curve = rescale_curve(ghz_run.tree, [(1e-3,)])
        row = curve.iloc[0]
        assert row["p_L"] == pytest.approx(ghz_run.bounds.p_lower)
        assert row["p_U"] == pytest.approx(ghz_run.bounds.p_upper)
        assert row["delta"] == pytest.approx(ghz_run.bounds.delta)

    def test_rescale_columns_and_order(self, ghz_run):
        """Колонки вероятностей, затем границы; строки по возрастанию p."""
        curve = rescale_curve(ghz_run.tree, [(1e-3,), (1e-5,), (1e-4,)])
        assert list(curve.columns) == ["p_phys_1"] + BOUND_COLUMNS
        assert list(curve["p_phys_1"]) == [1e-5, 1e-4, 1e-3]
        assert (curve["p_L"] <= curve["p_U"]).all()

    def test_csv_round_trip(self, ghz_run, tmp_path):
        """CSV читается обратно с точностью 12 значащих цифр."""
        curve = rescale_curve(ghz_run.tree, ray_grid((1e-3,), 0.1, 1.0, 4))
        path = tmp_path / "curve.csv"
        text = curve_to_csv(curve, path)
        assert path.read_text(encoding="utf-8") == text
        assert "\r\n" not in text
        pd.testing.assert_frame_equal(read_curve_csv(path), curve, check_exact=False, rtol=1e-10)
        pd.testing.assert_frame_equal(read_curve_csv(text), curve, check_exact=False, rtol=1e-10)

    def test_loglog_slope(self):
        """Наклон степенной зависимости."""
        curve = pd.DataFrame({"p_phys_1": [1e-4, 1e-3, 1e-2, 1e-1],
                              "p_L": [3e-8, 3e-6, 3e-4, 3e-2],
                              "p_U": [1e-4, 1e-3, 1e-2, 1e-1]})
        assert loglog_slope(curve) == pytest.approx(2.0)
        assert loglog_slope(curve, value_column="p_U") == pytest.approx(1.0)
        assert loglog_slope(curve, window=(1e-3, 1e-1)) == pytest.approx(2.0)

    def test_loglog_slope_errors(self):
        """Мало точек или нулевые значения."""
        curve = pd.DataFrame({"p_phys_1": [1e-4, 1e-3, 1e-2], "p_L": [0.0, 1e-6, 1e-4]})
        with pytest.raises(ValueError):
            loglog_slope(curve)
        with pytest.raises(ValueError):
            loglog_slope(curve, window=(1e-3, 1e-2))


class TestComparisons:
    """Тесты сравнения с Монте-Карло и серии p_max."""

    def test_compare(self, ghz):
        """Таблица содержит η DSS после каждого выстрела и ширину MC в точках проверки."""
        table = compare(ghz, NoiseParams.single_parameter(1e-3), 20, 50, seed=2)
        assert list(table.columns) == ["method", "shot", "uncertainty"]
        assert (table["method"] == "dss").sum() == 20
        assert list(table.loc[table["method"] == "mc", "shot"]) == [10, 20, 30, 40, 50]

    def test_pmax_study(self, ghz):
        """Запуски при разных p_max оцениваются на общей сетке."""
        table = pmax_study(ghz, NoiseParams.single_parameter(), [(1e-3,), (1e-2,)], [(1e-4,), (1e-3,)],
                           shots=20, seed=3)
        assert len(table) == 4
        assert set(table["run"]) == {0, 1}
        assert list(table.columns[:3]) == ["run", "pmax_1", "p_phys_1"]
        assert set(table["pmax_1"]) == {1e-3, 1e-2}


class TestSettings:
    """Тесты файла настроек."""

    def test_load_toml(self):
        """Значения TOML переходят в поля RunSettings."""
        values = load_run_config(CONFIGS / "ghz.toml")
        settings = RunSettings(**values)
        assert settings.protocol == "ghz"
        assert settings.criterion is Criterion.ERU
        assert settings.shots == 200
        assert settings.p_max == (1e-3,)
        assert settings.grid == "1e-4:1e-3:10"

    def test_noise_categories(self):
        """Категории шума и их вероятности из [[noise.categories]]."""
        settings = RunSettings(**load_run_config(CONFIGS / "steane_det.toml"))
        assert settings.p_max == (1e-3, 1e-2)
        noise = settings.noise()
        assert noise.names == ("p1", "p2")
        assert noise.rates == (1e-3, 1e-2)

    def test_load_json(self):
        """JSON с сеткой-списком."""
        settings = RunSettings(**load_run_config(CONFIGS / "steane_flag.json"))
        assert settings.protocol == "steane-flag-0"
        assert settings.grid == [0.0001, 0.001, 0.01]

    def test_unknown_key(self, tmp_path):
        """Неизвестный ключ отвергается."""
        path = tmp_path / "bad.toml"
        path.write_text('protocol = "ghz"\nbogus = 1\n', encoding="utf-8")
        with pytest.raises(ValueError):
            load_run_config(path)

    def test_scalar_pmax(self, tmp_path):
        """Скалярное p_max превращается в список."""
        path = tmp_path / "scalar.toml"
        path.write_text("p_max = 0.01\n", encoding="utf-8")
        assert load_run_config(path)["p_max"] == [0.01]

    def test_flags_override_file(self):
        """Флаги важнее файла, пустые флаги пропускаются."""
        settings = resolve_settings(CONFIGS / "ghz.toml", shots=50, seed=None, p_max=(), criterion="binomial")
        assert settings.shots == 50
        assert settings.seed == 1234
        assert settings.p_max == (1e-3,)
        assert settings.criterion is Criterion.BINOMIAL

    def test_defaults(self):
        """Без файла - значения по умолчанию."""
        settings = resolve_settings(None, p_max=(1e-3, 1e-2))
        assert settings.protocol == "ghz"
        assert settings.noise().names == ("p1", "p2")

    def test_invalid_settings(self):
        """Недопустимые значения."""
        with pytest.raises(ValueError):
            RunSettings(workers=0)
        with pytest.raises(ValueError):
            RunSettings(z=0.0)
        with pytest.raises(NoiseError):
            RunSettings(p_max=(1e-3, 1e-3, 1e-3)).noise()


class TestExcelReport:
    """Тесты отчёта Excel."""

    def test_report_layout(self, ghz_run):
        """Заголовок, шапка таблицы и числовые ячейки."""
        curve = rescale_curve(ghz_run.tree, [(1e-4,), (1e-3,)])
        workbook = load_workbook(create_curve_report(curve, "Границы ghz"))
        ws = workbook.active
        assert ws.title == "Границы"
        assert ws["A1"].value == "Границы ghz"
        assert [ws.cell(row=3, column=i).value for i in range(1, 8)] == ["p_phys_1"] + BOUND_COLUMNS
        assert ws.cell(row=3, column=1).font.bold
        assert ws.cell(row=4, column=1).value == pytest.approx(1e-4)
        assert ws.cell(row=5, column=1).value == pytest.approx(1e-3)
        assert ws.max_row == 5
