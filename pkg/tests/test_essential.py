import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from muntz import (
    BlockSpec,
    DomainError,
    ExponentRule,
    FiniteRankSpec,
    MuntzPoly,
    UnitBallSampler,
    Weight,
    WitnessFamily,
    block_subsequence,
    composition_demo,
    discontinuity_height,
    essential_lower_bound,
    estimate_N_epsilon,
    hq_approx_gap,
    l1_norm,
    normalize_l1,
    pointwise_limit,
    sampled_operator_gap,
    sup_norm,
)
from muntz.essential import (
    SPREAD_TOL,
    SampledLimit,
    cesaro_minus_compact,
    choose_c,
    choose_rho,
    default_sampler,
    refined_grid,
    sampled_hq_gap,
    volterra_minus_s,
)
from strategies import polys

FAMILY = WitnessFamily.dyadic()
GRID = refined_grid(1.0)
GEOMETRIC = ExponentRule.geometric(1, 2, 60)


def test_refined_grid_layout():
    assert GRID[0] == 0.0 and GRID[-1] == 1.0
    assert 1 - 2.0**-40 in GRID and 0.5 in GRID
    assert np.all(np.diff(GRID) > 0)


def test_pointwise_limit_examples():
    lim = pointwise_limit("volterra", FAMILY, [0.9, 1.0])
    assert abs(lim.values[0]) < 1e-12 and lim.spread[0] < 1e-12
    assert lim.values[1] == 1.0 and lim.spread[1] == 0.0
    fam = WitnessFamily.from_rule(GEOMETRIC)
    assert pointwise_limit("cesaro", fam, [1.0]).values[0] == pytest.approx(1.0, abs=1e-15)


def test_height_examples():
    step = SampledLimit(GRID, (GRID == 1.0).astype(float), np.zeros_like(GRID))
    assert discontinuity_height(step, 1.0).height == 1.0
    ramp = SampledLimit(GRID, GRID.copy(), np.zeros_like(GRID))
    est = discontinuity_height(ramp, 0.5)
    # continuous limit: diameter shrinks with the radius
    assert est.diameters[-1] < 1e-5 and est.diameters == tuple(sorted(est.diameters, reverse=True))
    jump2 = SampledLimit(GRID, np.where(GRID <= 0.5, -1.0, 1.0), np.zeros_like(GRID))
    assert discontinuity_height(jump2, 0.5).height == 2.0
    sparse = SampledLimit(np.array([0.0, 0.5]), np.zeros(2), np.zeros(2))
    with pytest.raises(DomainError):
        discontinuity_height(sparse, 1.0)


def test_lower_bounds():
    v = essential_lower_bound("volterra")
    assert 0.48 <= v <= 0.5
    g = essential_lower_bound("cesaro", WitnessFamily.from_rule(GEOMETRIC))
    assert 0.48 <= g <= 0.5


def test_block_spec_examples():
    assert block_subsequence(FAMILY, BlockSpec.singletons(6)) == FAMILY.members[:6]
    pairs = BlockSpec(((0, 1), (2, 3)), ((0.5, 0.5), (0.5, 0.5)))
    for g in block_subsequence(FAMILY, pairs):
        assert l1_norm(g).value <= 1 + 1e-12
    with pytest.raises(DomainError):
        BlockSpec(((0, 1),), ((0.3, 0.6),))
    with pytest.raises(DomainError):
        BlockSpec(((0, 2), (1, 3)), ((0.5, 0.5), (0.5, 0.5)))
    with pytest.raises(DomainError):
        BlockSpec(((2, 3), (0, 1)), ((0.5, 0.5), (0.5, 0.5)))


@st.composite
def block_specs(draw, size=len(FAMILY)):
    blocks, weights, start = [], [], draw(st.integers(0, 3))
    while True:
        k = draw(st.integers(1, 4))
        if start + k > size:
            break
        w = np.array(draw(st.lists(st.floats(0.05, 1.0), min_size=k, max_size=k)))
        w = w / w.sum()
        w[-1] = 1.0 - w[:-1].sum()
        blocks.append(tuple(range(start, start + k)))
        weights.append(tuple(float(v) for v in w))
        start += k + draw(st.integers(0, 2))
    return BlockSpec(tuple(blocks), tuple(weights))


@settings(max_examples=25)
@given(block_specs(), st.sampled_from(["volterra", "cesaro"]))
def test_block_convergence(spec, op):
    blocked = block_subsequence(FAMILY, spec)
    if len(blocked) < 5:
        return
    base = pointwise_limit(op, FAMILY, GRID)
    lim = pointwise_limit(op, blocked, GRID)
    both = base.converged & lim.converged
    # the tail only fails to settle within ~2**-30 of t0 = 1
    assert both.mean() > 0.95
    assert np.all(np.abs(lim.values - base.values)[both] <= SPREAD_TOL)


@pytest.mark.parametrize("gamma", [1, 5, 50])
def test_exact_witness_gap(gamma):
    g = MuntzPoly.monomial(gamma, gamma + 1)
    assert abs(sup_norm(volterra_minus_s(g)).value - 0.5) <= 1e-10


def test_zero_map_gap():
    sampler = default_sampler(GEOMETRIC.materialize())
    assert sampled_operator_gap(lambda f: MuntzPoly.zero(), sampler, 50).max_gap == 0.0


def test_sampled_gaps_stay_at_half():
    lam = GEOMETRIC.materialize()
    sampler = default_sampler(lam)
    for A in (volterra_minus_s, cesaro_minus_compact):
        gap = sampled_operator_gap(A, sampler, 1000)
        assert 0.5 - 1e-6 <= gap.max_gap <= 0.5 + 1e-9


@given(polys().filter(lambda f: l1_norm(f).value > 1e-6))
def test_v_minus_s_never_exceeds_half(f):
    f = normalize_l1(f)
    assert sup_norm(volterra_minus_s(f)).value <= 0.5 + 1e-9
    assert sup_norm(cesaro_minus_compact(f)).value <= 0.5 + 1e-9


@settings(max_examples=20)
@given(polys(max_terms=4), st.floats(0.0, 1.0))
def test_v_minus_s_identity(f, x):
    left, _ = quad(f, 0, x, epsabs=1e-13, epsrel=1e-13, limit=200)
    right, _ = quad(f, x, 1, epsabs=1e-13, epsrel=1e-13, limit=200)
    scale = max(1.0, sum(map(abs, f.coefficients)))
    assert abs(volterra_minus_s(f)(x) - 0.5 * (left - right)) <= 1e-12 * scale


def test_sampler_is_deterministic_and_unit():
    s = UnitBallSampler((1.0, 2.0, 4.0, 8.0), seed=3)
    assert s(17) == s(17)
    assert l1_norm(s(17)).value == pytest.approx(1.0, abs=1e-12)
    other = UnitBallSampler(s.exponents, seed=4)
    assert [other(i) for i in range(20)] != [s(i) for i in range(20)]


def test_N_epsilon_examples():
    with_const = default_sampler((0.0, 1.0, 2.0))
    assert estimate_N_epsilon(with_const, 0.5, 100) >= 1.0
    s12 = default_sampler((1.0, 2.0))
    est = estimate_N_epsilon(s12, 0.5, 500)
    # brute force over directions on the unit circle
    x = np.linspace(0, 0.5, 2001)
    best = 0.0
    for th in np.linspace(0, math.pi, 2001):
        a, b = math.cos(th), math.sin(th)
        f = MuntzPoly.from_terms([(1.0, a), (2.0, b)])
        best = max(best, np.abs(f(x)).max() / l1_norm(f).value)
    assert 1.0 <= est <= best + 1e-9
    high = default_sampler(GEOMETRIC.materialize())
    assert estimate_N_epsilon(high, 0.999, 200) > estimate_N_epsilon(high, 0.9, 200)


def test_choose_c():
    c = choose_c(1.0, 0.1)
    assert 2 - c**2 <= 1.1 * c
    below = GRID[(GRID > 0) & (GRID < c)]
    assert np.all(2 - below**2 > 1.1 * below)
    assert choose_rho(0.1, 10.0) == pytest.approx(0.99)


def test_hq_gap_examples():
    lam = GEOMETRIC.materialize()
    eps = 0.1
    sampler = default_sampler(lam)
    c = choose_c(lam[0], eps)
    rho = choose_rho(eps, estimate_N_epsilon(sampler, c, 200))
    one, ident = Weight.one(), Weight.identity()
    r = FiniteRankSpec("R", one, lam[0], lam)
    r1 = FiniteRankSpec("R1", ident)
    for i in range(0, 200, 7):
        f = sampler(i)
        assert hq_approx_gap(one, rho, r, f) <= 0.5 * (1 + eps) + eps
        assert hq_approx_gap(ident, rho, r1, f) <= 0.5 * (1 + eps) + eps
    with pytest.raises(DomainError):
        hq_approx_gap(one, rho, r, MuntzPoly.monomial(1.0))
    with pytest.raises(DomainError):
        hq_approx_gap(one, rho, FiniteRankSpec("S"), sampler(0))
    # huge gamma: compare against the residual sampled on a fine grid
    g = MuntzPoly.monomial(2.0**40, 2.0**40 + 1)
    gap = hq_approx_gap(one, rho, r, g)
    s = np.concatenate([np.linspace(0, 1, 20001), 1 - np.logspace(-16, -1, 20001)])
    x = np.unique(np.clip(s, 0, 1))
    resid = 1.0 * x ** (2.0**40) - 0.5 * x - rho ** (2.0**40 + 1) * x ** (2.0**40)
    assert np.abs(resid).max() <= gap + 1e-12
    assert gap - np.abs(resid).max() <= 1e-6


def test_sampled_hq_gap_checks_norm():
    with pytest.raises(DomainError):
        sampled_hq_gap(Weight.one(), 0.9, FiniteRankSpec("R1", Weight.one()),
                       lambda i: MuntzPoly.monomial(1.0), 3)


def test_composition_examples():
    sq = composition_demo(lambda t: t * t, 0.25)
    assert 0.98 <= sq.lower_bound <= 1.0
    assert sq.estimate.t0 == 0.5
    ident = composition_demo(lambda t: t, 0.5)
    assert 0.98 <= ident.lower_bound <= 1.0
    assert composition_demo(lambda t: np.full_like(t, 0.25), 0.25).lower_bound == 0.0
    with pytest.raises(DomainError):
        composition_demo(lambda t: t * t, 2.0)
