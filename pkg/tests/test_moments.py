"""Moment recurrences, their enumeration oracle, and tail estimation.

Claims covered here:
    - hand-checked rows: uniform E[R_4] = 16/5, E[T_4] = 6; Yule
      E[R_4] = 10/3, E[T_3] = 3
    - recurrence tables equal brute-force enumeration exactly (n <= 12
      here; the acceptance suite pushes to 15)
    - float mode tracks exact mode to ~1e-12 in the log domain
    - table invariants: nonnegative variances, |rho| <= 1, total >= root
    - tail estimators recover exact geometric growth and the documented
      asymptotic constants
"""

import math
from fractions import Fraction

import pytest

from treeconfigs import moments
from treeconfigs.errors import CapacityError, TreeDomainError
from treeconfigs.moments import (
    estimate_exponential_order,
    estimate_subexp_constant,
    exhaustive_moments,
    uniform_moments,
    yule_moments,
)

NEG_INF = float("-inf")


@pytest.fixture(scope="module")
def uniform_exact():
    return uniform_moments(60)


@pytest.fixture(scope="module")
def yule_exact():
    return yule_moments(60)


@pytest.fixture(scope="module")
def uniform_float():
    return uniform_moments(400, "float")


@pytest.fixture(scope="module")
def yule_float():
    return yule_moments(400, "float")


def test_hand_rows_uniform(uniform_exact):
    assert uniform_exact.row(1).e_r == 0 and uniform_exact.row(1).e_t == 0
    assert uniform_exact.row(2).e_r == 1 and uniform_exact.row(2).e_t == 1
    assert uniform_exact.row(3).e_r == 2 and uniform_exact.row(3).e_t == 3
    assert uniform_exact.row(4).e_r == Fraction(16, 5)
    assert uniform_exact.row(4).e_t == 6
    assert uniform_exact.row(4).e_r2 == Fraction(52, 5)
    assert uniform_exact.row(4).e_tr == Fraction(96, 5)
    assert uniform_exact.row(4).e_t2 == 36


def test_hand_rows_yule(yule_exact):
    assert yule_exact.row(2).e_r == 1 and yule_exact.row(2).e_t == 1
    assert yule_exact.row(3).e_t == 3
    assert yule_exact.row(4).e_r == Fraction(10, 3)
    assert yule_exact.row(4).e_t == 6
    assert yule_exact.row(4).e_r2 == Fraction(34, 3)
    assert yule_exact.row(4).e_tr == 20
    assert yule_exact.row(4).e_t2 == 36


@pytest.mark.parametrize("model", ["uniform", "yule"])
@pytest.mark.parametrize("stat", ["r", "t", "r2", "tr", "t2"])
def test_recurrence_equals_enumeration(model, stat, uniform_exact, yule_exact):
    table = uniform_exact if model == "uniform" else yule_exact
    for n in range(1, 13):
        assert getattr(table.row(n), "e_" + stat) == exhaustive_moments(n, model, stat)


def test_float_tracks_exact(uniform_exact, yule_exact, uniform_float, yule_float):
    for exact, approx in ((uniform_exact, uniform_float), (yule_exact, yule_float)):
        for stat in ("r", "t", "r2", "tr", "t2"):
            le = exact.log_sequence(stat)
            lf = approx.log_sequence(stat)
            for n in range(1, 61):
                a, b = le[n - 1], lf[n - 1]
                if a == NEG_INF or b == NEG_INF:
                    assert a == b
                else:
                    assert abs(a - b) < 1e-11


@pytest.mark.parametrize("mode", ["exact", "float"])
@pytest.mark.parametrize("model", ["uniform", "yule"])
def test_table_invariants(mode, model, request):
    table = request.getfixturevalue(
        ("uniform_" if model == "uniform" else "yule_") + ("exact" if mode == "exact" else "float")
    )
    first = table.row(1)
    assert first.e_r == 0 and first.e_t == 0 and first.e_t2 == 0
    for row in table.rows:
        assert row.var_t >= 0 and row.var_r >= 0
        assert row.e_t >= row.e_r
        if row.rho_tr is not None:
            assert abs(row.rho_tr) <= 1 + 1e-12


def test_float_invariants_to_1000():
    for model_fn in (uniform_moments, yule_moments):
        table = model_fn(1000, "float")
        logs = table.logs
        for n in range(2, 1001):
            assert logs["e_t"][n] >= logs["e_r"][n] - 1e-9
            assert logs["e_t2"][n] >= 2 * logs["e_t"][n] - 1e-9
            row = table.row(n)
            if row.rho_tr is not None:
                assert abs(row.rho_tr) <= 1 + 1e-9


def test_exact_caps():
    with pytest.raises(CapacityError):
        uniform_moments(301)
    with pytest.raises(CapacityError):
        yule_moments(5001, "float")
    with pytest.raises(TreeDomainError):
        uniform_moments(10, "symbolic")


def test_negative_covariance_is_real(yule_exact):
    # the exact joint moments dip below independence at n = 5
    assert yule_exact.row(5).cov_tr == Fraction(-1, 36)
    assert yule_exact.row(5).rho_tr < 0


def test_exponential_order_geometric():
    est = estimate_exponential_order([3.0 ** n for n in range(1, 80)])
    assert est.value == pytest.approx(3.0, abs=1e-12)
    assert est.diagnostic < 1e-12


def test_subexp_constant_trivial():
    est = estimate_subexp_constant([7.0] * 60, 1.0)
    assert est.value == pytest.approx(7.0, abs=1e-12)


def test_estimators_validate_input():
    with pytest.raises(TreeDomainError):
        estimate_exponential_order([1.0, 2.0])
    with pytest.raises(TreeDomainError):
        estimate_subexp_constant([1.0, 2.0, 4.0], -1.0)


def test_ratio_trends(uniform_float, yule_float):
    # mean total over mean root: toward 2 under uniform, toward 1 under Yule
    ratios_u = [
        math.exp(uniform_float.logs["e_t"][n] - uniform_float.logs["e_r"][n])
        for n in range(2, 401)
    ]
    assert abs(ratios_u[-1] - 2) < 0.02
    ratios_y = [
        math.exp(yule_float.logs["e_t"][n] - yule_float.logs["e_r"][n])
        for n in range(2, 401)
    ]
    assert abs(ratios_y[-1] - 1) < 0.02
    # both settle monotonically once past their early peak
    assert all(a > b for a, b in zip(ratios_u[20:-1], ratios_u[21:]))
    assert all(a > b for a, b in zip(ratios_y[20:-1], ratios_y[21:]))


def test_yule_constants_converge():
    table = yule_moments(1200, "float")
    alpha1_inv = 1.0 / (1.0 - math.exp(-2 * math.pi * math.sqrt(3) / 9))
    est = estimate_exponential_order(table.log_sequence("t"), log=True)
    assert est.value == pytest.approx(alpha1_inv, abs=1e-4)
    est = estimate_exponential_order(table.log_sequence("r"), log=True)
    assert est.value == pytest.approx(alpha1_inv, abs=1e-4)


def test_uniform_constants_converge():
    table = uniform_moments(1200, "float")
    est = estimate_subexp_constant(table.log_sequence("t"), 4.0 / 3.0, log=True)
    assert est.value == pytest.approx(math.sqrt(6), rel=5e-3)
    est = estimate_exponential_order(table.log_sequence("r"), log=True)
    assert est.value == pytest.approx(4.0 / 3.0, abs=1e-4)


def test_variance_orders_dominate_squared_means():
    # the second moment outgrows the squared mean under both models
    for model_fn in (uniform_moments, yule_moments):
        table = model_fn(800, "float")
        order_sq = estimate_exponential_order(
            [2 * v for v in table.log_sequence("t")], log=True
        )
        order_t2 = estimate_exponential_order(table.log_sequence("t2"), log=True)
        assert order_t2.value > order_sq.value + 0.01
