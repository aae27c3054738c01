import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from muntz import (
    DomainError,
    ExponentRule,
    MuntzPoly,
    abel_bound_check,
    bernstein_estimate,
    inner_inf,
    newman_inequality_stats,
    newman_sequence,
    sup_norm,
)
from muntz.bernstein import (
    NewmanSequence,
    OptimizerBudget,
    PoolExhausted,
    _basis_poly,
    newman_factor,
)
from muntz.norms import l1_norm
from muntz.operators import get_operator

SMALL = OptimizerBudget(starts=8, evals_per_start=2000)


def test_newman_examples():
    seq = newman_sequence(1, 0.1, 2)
    # independent monotone scan over the integers
    lam2 = next(L for L in range(2, 10_000) if 2 * (1 + math.log(L)) / L <= 0.1)
    assert seq.exponents == (1.0, float(lam2))
    assert 100 < lam2 < 130
    assert newman_factor(1, 1000) == pytest.approx(1 - 2 * (1 + math.log(1000)) / 1000)
    assert newman_factor(1, 1000) == pytest.approx(0.9842, abs=1e-4)
    assert newman_sequence(1, 0.5, 2).exponents[1] < lam2


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("eps", [0.05, 0.1, 0.5])
def test_newman_factors(n, eps):
    seq = newman_sequence(1, eps, n)
    target = (1 - eps) ** (1 / (n - 1))
    assert all(f >= target for f in seq.factors)
    assert math.prod(seq.factors) >= 1 - eps
    # minimality: one less than each chosen exponent misses the target
    # (only checkable while consecutive integers are representable)
    for a, b in zip(seq.exponents, seq.exponents[1:]):
        if b < 2.0**53:
            assert b - 1 <= a or newman_factor(a, b - 1) < target


def test_newman_pool():
    pool = ExponentRule.geometric(1, 2, 64)
    seq = newman_sequence(1, 0.1, 3, pool)
    assert set(seq.exponents) <= set(pool.materialize())
    with pytest.raises(PoolExhausted) as info:
        newman_sequence(1, 0.1, 4, ExponentRule.geometric(1, 2, 30))
    assert info.value.reached >= 1
    assert isinstance(info.value, DomainError)


def test_newman_validation():
    with pytest.raises(ArithmeticError):
        NewmanSequence((1.0, 2.0), 0.1, (0.5,))
    with pytest.raises(DomainError):
        newman_sequence(0.5, 0.1, 2)


def test_newman_stats_examples():
    seq = newman_sequence(1, 0.1, 4)
    stats = newman_inequality_stats(seq, 500, seed=0)
    assert stats.violations == 0 and stats.min_ratio >= 0.9
    one = MuntzPoly.monomial(seq.exponents[0])
    assert sup_norm(one).value == 1.0
    pair = MuntzPoly.from_terms(zip(seq.exponents[:2], (1.0, 1.0)))
    assert sup_norm(pair).value >= 2.0 - 1e-15


def test_abel_examples():
    c = abel_bound_check([1, -1, 1])
    assert (c.lhs, c.rhs, c.holds) == (3, 5, True)
    c = abel_bound_check([1, -2, 2])
    assert c.lhs == c.rhs == 5 and c.holds
    c = abel_bound_check([1])
    assert c.lhs == c.rhs == 1


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=12))
def test_abel_fuzz(a):
    assert abel_bound_check(a).holds


@pytest.mark.parametrize("op", ["volterra", "cesaro"])
@pytest.mark.parametrize("gamma", [0.0, 3.0, 1e5])
def test_inner_inf_one_dimensional(op, gamma):
    assert inner_inf(op, [gamma]).value == pytest.approx(1.0, abs=1e-12)


def test_inner_inf_upper_estimate_and_reproducible():
    lam = newman_sequence(1, 0.1, 2).exponents
    res = inner_inf("cesaro", lam, SMALL, seed=5)
    assert inner_inf("cesaro", lam, SMALL, seed=5) == res
    # the witness attains the reported value
    op = get_operator("cesaro")
    assert sup_norm(op(res.witness)).value / l1_norm(res.witness).value == pytest.approx(
        res.value, rel=1e-9
    )
    # and no probed direction beats it by more than the optimizer tolerance
    rng = np.random.default_rng(0)
    for w in rng.normal(size=(200, 2)):
        f = _basis_poly(lam, w)
        assert sup_norm(op(f)).value / l1_norm(f).value >= res.value - 1e-6
    assert 0.9 / 3 <= res.value <= 1 / 3 + 0.05


def test_inner_inf_worker_counts_agree():
    lam = newman_sequence(1, 0.1, 2).exponents
    budgets = [OptimizerBudget(starts=4, evals_per_start=500, workers=w) for w in (1, 2, 4)]
    vals = {inner_inf("volterra", lam, b, seed=1).value for b in budgets}
    assert len(vals) == 1


def test_inner_inf_errors():
    with pytest.raises(DomainError):
        inner_inf("volterra", [])
    with pytest.raises(DomainError):
        inner_inf("volterra", [1.0, 1.0])


def test_bernstein_report():
    rep = bernstein_estimate("volterra", 1, 0.1)
    assert rep.value == pytest.approx(1.0, abs=1e-6)
    rep = bernstein_estimate("cesaro", 2, 0.1, budget=SMALL)
    assert rep.value >= 0.3 - 0.01
    assert rep.f_l1 == pytest.approx(1.0, abs=1e-12)
    assert rep.a_l1 >= rep.f_l1 - 1e-12
    d = rep.to_dict()
    assert d["theory_value"] == pytest.approx(1 / 3) and d["theory_lower"] == pytest.approx(0.3)


@pytest.mark.parametrize("n", [2, 3])
def test_volterra_consistency_cap(n):
    for pool in (None, ExponentRule.geometric(1, 2, 64)):
        rep = bernstein_estimate("volterra", n, 0.1, pool, budget=SMALL)
        assert rep.value <= 1 / (2 * n - 1) + 0.05
