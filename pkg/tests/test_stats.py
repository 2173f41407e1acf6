"""
Тесты для модуля статистики.
"""

import math

import pytest

from dsampler.utils.stats import (
    RateEstimate,
    binomial_cutoff_for,
    binomial_factor,
    multi_binomial_factor,
    single_circuit_cutoff,
    subset_sampling_error,
    weight_distribution,
    wald_error,
    wilson_interval,
    wilson_variance,
)


class TestBinomialFactors:
    """Тесты биномиальных весов подмножеств."""

    def test_binomial_factor(self):
        """C(5, 2)·0.1²·0.9³."""
        assert binomial_factor(5, 2, 0.1) == pytest.approx(10 * 0.01 * 0.729)

    @pytest.mark.parametrize("w,n,p", [(6, 5, 0.1), (-1, 5, 0.1), (1, 5, -0.1), (1, 5, 1.5)])
    def test_invalid_arguments(self, w, n, p):
        """Вес вне 0..N или вероятность вне [0, 1] отвергаются."""
        with pytest.raises(ValueError):
            binomial_factor(n, w, p)

    def test_invalid_weight_in_product(self):
        """Неверный вес одной категории не превращается в нулевой множитель."""
        with pytest.raises(ValueError):
            multi_binomial_factor((2, 3), (3, 0), (0.1, 0.2))

    def test_small_rate_weight(self):
        """A_0 при N = 50 и p = 0.002 около 0.9047."""
        assert binomial_factor(50, 0, 0.002) == pytest.approx(0.998 ** 50)
        assert binomial_factor(50, 0, 0.002) == pytest.approx(0.9047, abs=1e-4)

    def test_zero_rate(self):
        """При p = 0 вся масса в w = 0."""
        assert binomial_factor(7, 0, 0.0) == pytest.approx(1.0)
        assert binomial_factor(7, 1, 0.0) == 0.0

    def test_multi_binomial_factor(self):
        """Произведение по категориям."""
        value = multi_binomial_factor((2, 3), (1, 0), (0.1, 0.2))
        assert value == pytest.approx(2 * 0.1 * 0.9 * 0.8 ** 3)
        assert multi_binomial_factor((2, 1), (1, 1), (0.1, 0.2)) == pytest.approx(0.036)
        assert multi_binomial_factor((5,), (2,), (0.1,)) == pytest.approx(binomial_factor(5, 2, 0.1))
        with pytest.raises(ValueError):
            multi_binomial_factor((2, 3), (1,), (0.1, 0.2))

    def test_weight_distribution(self):
        """Распределение весов нормировано."""
        assert weight_distribution(12, 0.3).sum() == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("n", [5, 12, 30])
    def test_zero_weight_dominates_below_boundary(self, n):
        """A_0 = A_1 при p = 1/(N+1), ниже границы A_0 > A_1."""
        p = 1 / (n + 1)
        assert binomial_factor(n, 0, p) == pytest.approx(binomial_factor(n, 1, p), rel=1e-12)
        assert binomial_factor(n, 0, 0.9 * p) > binomial_factor(n, 1, 0.9 * p)
        assert binomial_factor(n, 0, 1.1 * p) < binomial_factor(n, 1, 1.1 * p)

    def test_single_circuit_cutoff(self):
        """Хвост выше w_max = 1."""
        expected = 1 - 0.9 ** 10 - 10 * 0.1 * 0.9 ** 9
        assert single_circuit_cutoff(10, 1, 0.1) == pytest.approx(expected)

    def test_single_circuit_cutoff_edges(self):
        """Хвост при w_max = N и при p = 0 пуст; w_max > N отвергается."""
        assert single_circuit_cutoff(7, 7, 0.3) == 0.0
        assert single_circuit_cutoff(7, 0, 0.0) == 0.0
        expected = 1 - 0.998 ** 50 - 50 * 0.002 * 0.998 ** 49
        assert single_circuit_cutoff(50, 1, 0.002) == pytest.approx(expected)
        with pytest.raises(ValueError):
            single_circuit_cutoff(5, 6, 0.1)

    def test_cutoff_prefix_uses_survival(self):
        """Префикс 0..w_max совпадает с функцией выживания."""
        cutoff = binomial_cutoff_for((10,), [(0,), (1,)], (0.1,))
        assert cutoff == pytest.approx(single_circuit_cutoff(10, 1, 0.1))

    def test_cutoff_multi_category(self):
        """Для нескольких категорий: 1 минус сумма весов."""
        cutoff = binomial_cutoff_for((2, 3), [(0, 0)], (0.1, 0.2))
        assert cutoff == pytest.approx(1 - 0.81 * 0.512)

    def test_cutoff_of_nothing_sampled(self):
        """Без подмножеств недостающая масса равна 1."""
        assert binomial_cutoff_for((4,), [], (0.1,)) == 1.0


class TestWilson:
    """Тесты интервала Уилсона."""

    def test_variance_is_half_width_squared(self):
        """Дисперсия равна квадрату полуширины необрезанного интервала."""
        low, high = wilson_interval(3, 10, z=1.0)
        assert wilson_variance(3, 10, z=1.0) == pytest.approx(((high - low) / 2) ** 2)

    def test_zero_failures(self):
        """m = 0: интервал (0, 0.2) при N = 4 и z = 1, дисперсия не нулевая."""
        low, high = wilson_interval(0, 4, z=1.0)
        assert low == 0.0
        assert high == pytest.approx(0.2)
        assert wilson_variance(0, 4, z=1.0) == pytest.approx(0.01)

    def test_fractional_counts(self):
        """Гипотетическое обновление с дробными m и N."""
        assert wilson_variance(0.5, 4.0) < wilson_variance(0.5, 3.0)

    def test_interval_shrinks(self):
        """Интервал сужается с ростом N."""
        low1, high1 = wilson_interval(10, 100)
        low2, high2 = wilson_interval(100, 1000)
        assert high2 - low2 < high1 - low1
        assert low2 <= 0.1 <= high2

    def test_zero_shots(self):
        """N = 0 не допускается."""
        with pytest.raises(ValueError):
            wilson_variance(0, 0)
        with pytest.raises(ValueError):
            wilson_interval(0, 0)

    def test_subset_sampling_error(self):
        """Ошибка одноуровневой оценки."""
        assert subset_sampling_error([0.5], [0.5], [25]) == pytest.approx(0.05)
        assert subset_sampling_error([0.5], [0.5], [0]) == 0.0


class TestRateEstimate:
    """Тесты оценки частоты."""

    def test_rate_and_variance(self):
        """Частота m/N и дисперсия Уилсона."""
        estimate = RateEstimate(3, 10)
        assert estimate.rate == pytest.approx(0.3)
        assert estimate.variance(1.0) == pytest.approx(wilson_variance(3, 10, 1.0))

    def test_frozen_has_no_variance(self):
        """Замороженная оценка точна."""
        assert RateEstimate(5, 5, frozen=True).variance() == 0.0
        with pytest.raises(ValueError):
            RateEstimate(1, 2, frozen=True)

    def test_invalid(self):
        """m вне 0..N и частота при N = 0."""
        with pytest.raises(ValueError):
            RateEstimate(3, 2)
        with pytest.raises(ValueError):
            _ = RateEstimate(0, 0).rate
        assert math.isfinite(RateEstimate(0, 1).variance())


class TestWaldError:
    """Тесты стандартной ошибки прямого Монте-Карло."""

    @pytest.mark.parametrize("q_hat,n,expected", [(0.5, 100, 0.05), (0.0, 40, 0.0), (1.0, 40, 0.0), (0.1, 900, 0.01)])
    def test_values(self, q_hat, n, expected):
        """Ошибка sqrt(q(1-q)/N) по оценке частоты, а не по числу отказов."""
        assert wald_error(q_hat, n) == pytest.approx(expected)

    def test_invalid(self):
        """N = 0 и частота вне [0, 1]."""
        with pytest.raises(ValueError):
            wald_error(0.5, 0)
        with pytest.raises(ValueError):
            wald_error(50, 100)
