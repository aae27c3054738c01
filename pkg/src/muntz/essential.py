"""Essential-norm experiments for Volterra/Cesaro-type operators.

Lower bounds come from discontinuities of pointwise limits: if ``T x_n``
converges pointwise to ``H`` and ``H`` jumps by ``h`` at ``t0``, then
``||T||_e >= ||T||_{e,w} >= h/2``. Upper bounds are never computed; the
functions here only sample ``sup ||A f||`` over unit-L1 polynomials and
report it as a lower estimate of ``||A||``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import DomainError, ExponentRule, MuntzPoly, linear_combine
from .norms import NormResult, l1_norm, normalize_l1, sup_norm
from .operators import (
    FiniteRankSpec,
    Operator,
    Weight,
    cesaro,
    difference,
    finite_rank_apply,
    get_operator,
    t_rho_apply,
    volterra,
    weighted_hq,
)

SPREAD_TOL = 1e-6
N_TAIL = 5
HIT_TOL = 1e-14
DEFAULT_RADII = tuple(2.0**-j for j in range(3, 21))


@dataclass(frozen=True)
class WitnessFamily:
    """Unit-L1 sequence ``g_n = (gamma_n + 1) x**gamma_n``."""

    gammas: tuple[float, ...]
    members: tuple[MuntzPoly, ...]

    @classmethod
    def from_exponents(cls, gammas: Sequence[float]) -> "WitnessFamily":
        gammas = tuple(float(g) for g in gammas)
        if any(b <= a for a, b in zip(gammas, gammas[1:])):
            raise DomainError("witness exponents must be strictly increasing")
        members = tuple(MuntzPoly.monomial(g, g + 1.0) for g in gammas)
        for g, m in zip(gammas, members):
            if abs(l1_norm(m).value - 1.0) > 1e-9:
                raise DomainError(f"witness for gamma={g} is not unit norm")
        return cls(gammas, members)

    @classmethod
    def dyadic(cls, count: int = 60) -> "WitnessFamily":
        """``gamma_n = 2**n`` for ``n = 1..count``."""
        return cls.from_exponents([2.0**n for n in range(1, count + 1)])

    @classmethod
    def from_rule(cls, rule: ExponentRule) -> "WitnessFamily":
        return cls.from_exponents(rule.materialize())

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class BlockSpec:
    """Consecutive disjoint index blocks with convex weights (0-based)."""

    blocks: tuple[tuple[int, ...], ...]
    weights: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if len(self.blocks) != len(self.weights):
            raise DomainError("one weight list per block is required")
        prev_max = -1
        for block, w in zip(self.blocks, self.weights):
            if not block or len(block) != len(w):
                raise DomainError("blocks must be nonempty and match their weights")
            if any(b <= a for a, b in zip(block, block[1:])) or block[0] <= prev_max:
                raise DomainError("blocks must be ordered and disjoint")
            prev_max = block[-1]
            if any(not 0.0 <= c <= 1.0 for c in w):
                raise DomainError("block weights must lie in [0, 1]")
            if abs(sum(w) - 1.0) > 1e-12:
                raise DomainError("block weights must sum to 1")

    @classmethod
    def singletons(cls, count: int) -> "BlockSpec":
        return cls(tuple((i,) for i in range(count)), tuple((1.0,) for _ in range(count)))


def block_subsequence(family, spec: BlockSpec) -> tuple[MuntzPoly, ...]:
    """Convex combinations ``sum_{j in I_m} c_j x_j`` of family members."""
    members = _members(family)
    out = []
    for block, weights in zip(spec.blocks, spec.weights):
        if block[-1] >= len(members) or block[0] < 0:
            raise DomainError("block index outside the family")
        acc = MuntzPoly.zero()
        for j, c in zip(block, weights):
            acc = linear_combine(1.0, acc, c, members[j])
        out.append(acc)
    return tuple(out)


def _members(family) -> Sequence[MuntzPoly]:
    return family.members if isinstance(family, WitnessFamily) else family


@dataclass(frozen=True)
class SampledLimit:
    """A pointwise limit estimated on a grid: tail mean and tail spread."""

    grid: np.ndarray
    values: np.ndarray
    spread: np.ndarray
    tol: float = SPREAD_TOL

    @property
    def converged(self) -> np.ndarray:
        return self.spread <= self.tol

    def to_rows(self) -> list[tuple[float, float, float]]:
        return list(zip(self.grid.tolist(), self.values.tolist(), self.spread.tolist()))


@dataclass(frozen=True)
class DiscontinuityEstimate:
    t0: float
    height: float
    radii: tuple[float, ...]
    diameters: tuple[float, ...]
    limit_samples: tuple[tuple[float, float], ...] = field(repr=False)


def refined_grid(t0: float = 1.0, n_uniform: int = 1024, depth: int = 40) -> np.ndarray:
    """Uniform grid on [0, 1] plus the points ``t0 +- 2**-j``, j = 1..depth."""
    pts = [np.linspace(0.0, 1.0, n_uniform + 1), [t0]]
    offsets = 2.0 ** -np.arange(1, depth + 1)
    pts += [t0 - offsets, t0 + offsets]
    grid = np.concatenate(pts)
    return np.unique(grid[(grid >= 0.0) & (grid <= 1.0)])


def pointwise_limit(
    op, family, grid, n_tail: int = N_TAIL, tol: float = SPREAD_TOL
) -> SampledLimit:
    """Estimate ``lim_n (op x_n)(t)`` from the last ``n_tail`` members."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise DomainError("grid must be nonempty")
    if n_tail < 2:
        raise DomainError("n_tail must be at least 2")
    members = _members(family)
    if len(members) < n_tail:
        raise DomainError("family is shorter than the tail")
    op = get_operator(op)
    tail = np.array([op(m)(grid) for m in members[-n_tail:]])
    return SampledLimit(grid, tail.mean(axis=0), np.ptp(tail, axis=0), tol)


def discontinuity_height(
    limit: SampledLimit, t0: float, radii: Sequence[float] = DEFAULT_RADII
) -> DiscontinuityEstimate:
    """Largest oscillation of the sampled limit over balls ``B(t0, r)``.

    Samples only ever under-report the oscillation on a ball, and a finite
    tail only resolves the limit at distances well above ``1/n``, so the
    maximum over the radius schedule is used. For a continuous limit the
    result shrinks with the schedule.
    """
    radii = tuple(sorted((float(r) for r in radii), reverse=True))
    if not radii or any(r <= 0 for r in radii) or len(set(radii)) != len(radii):
        raise DomainError("radii must be distinct and positive")
    dist = np.abs(limit.grid - t0)
    if not np.any(dist < radii[-1]):
        raise DomainError("no grid point in the smallest ball")
    diameters = tuple(float(np.ptp(limit.values[dist < r])) for r in radii)
    samples = tuple(zip(limit.grid.tolist(), limit.values.tolist()))
    return DiscontinuityEstimate(float(t0), max(diameters), radii, diameters, samples)


def essential_lower_bound(
    op,
    family=None,
    t0: float = 1.0,
    grid=None,
    radii: Sequence[float] = DEFAULT_RADII,
    n_tail: int = N_TAIL,
) -> float:
    """Half the jump of the pointwise limit of ``op(family)`` at ``t0``."""
    family = WitnessFamily.dyadic() if family is None else family
    grid = refined_grid(t0) if grid is None else grid
    limit = pointwise_limit(op, family, grid, n_tail)
    return 0.5 * discontinuity_height(limit, t0, radii).height


# -- sampling the unit ball of M_Lambda^1 ---------------------------------


@dataclass(frozen=True)
class UnitBallSampler:
    """Deterministic source of unit-L1 Muntz polynomials.

    Sample ``i`` is ``extremal[i]`` for the first ``len(extremal)`` indices,
    then a random polynomial on at most ``max_terms`` of ``exponents`` with
    coefficients uniform on [-1, 1], seeded by ``(seed, i)``.
    """

    exponents: tuple[float, ...]
    seed: int = 0
    max_terms: int = 6
    extremal: tuple[MuntzPoly, ...] = ()

    def __call__(self, i: int) -> MuntzPoly:
        if i < len(self.extremal):
            return self.extremal[i]
        rng = np.random.default_rng([self.seed, i])
        k = int(rng.integers(1, min(self.max_terms, len(self.exponents)) + 1))
        idx = np.sort(rng.choice(len(self.exponents), size=k, replace=False))
        coefs = rng.uniform(-1.0, 1.0, size=k)
        f = MuntzPoly.from_terms(zip((self.exponents[j] for j in idx), coefs))
        if f.is_zero():
            f = MuntzPoly.monomial(self.exponents[idx[0]])
        return normalize_l1(f)


def default_sampler(exponents: Sequence[float], seed: int = 0, family=None) -> UnitBallSampler:
    """Sampler over ``exponents`` that always includes the witness family."""
    exponents = tuple(exponents)
    family = WitnessFamily.from_exponents(exponents) if family is None else family
    return UnitBallSampler(exponents, seed, extremal=tuple(_members(family)))


def _map(fn, count: int, workers: int):
    if workers <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(count)))


@dataclass(frozen=True)
class GapResult:
    max_gap: float
    argmax_index: int
    arg: MuntzPoly
    norm: NormResult


def sampled_operator_gap(
    A: Operator, sampler: Callable[[int], MuntzPoly], count: int, workers: int = 1
) -> GapResult:
    """``max_i ||A f_i||_inf`` over ``count`` samples; a lower estimate of ``||A||``."""
    if count < 1:
        raise DomainError("count must be positive")

    def one(i):
        f = sampler(i)
        return f, sup_norm(A(f))

    results = _map(one, count, workers)
    # ties go to the lowest index, whatever the worker count
    best = max(range(count), key=lambda i: (results[i][1].value, -i))
    f, norm = results[best]
    return GapResult(norm.value, best, f, norm)


def volterra_minus_s(f: MuntzPoly) -> MuntzPoly:
    """``(V - S) f`` with ``S f = (1/2) int_0^1 f``."""
    return difference(volterra, lambda g: finite_rank_apply(FiniteRankSpec("S"), g))(f)


def cesaro_minus_compact(f: MuntzPoly) -> MuntzPoly:
    """``(Gamma - K) f`` with the compact ``K = (Gamma - V) + S``.

    ``Gamma - V = (1 - x) Gamma`` is compact from M^1 into C because bounded
    sets of M^1 converge uniformly on compacts of [0, 1) (after passing to
    a subsequence) and the factor ``1 - x`` kills the rest near 1.
    """
    s_part = finite_rank_apply(FiniteRankSpec("S"), f)
    gamma = cesaro(f)
    compact = linear_combine(1.0, linear_combine(1.0, gamma, -1.0, volterra(f)), 1.0, s_part)
    return linear_combine(1.0, gamma, -1.0, compact)


def estimate_N_epsilon(
    sampler: Callable[[int], MuntzPoly], c: float, count: int, workers: int = 1
) -> float:
    """``max_i sup_{[0,c]} |f_i| / ||f_i||_1``, clamped below at 1."""
    if not 0.0 < c < 1.0:
        raise DomainError("c must lie in (0, 1)")

    def one(i):
        f = sampler(i)
        return sup_norm(f, upper=c).value / l1_norm(f).value

    return max(1.0, max(_map(one, count, workers)))


def choose_c(exponent: float, eps: float, grid=None) -> float:
    """Smallest grid point ``c`` in (0, 1) with ``2 - c**(exponent+1) <= (1+eps) c``."""
    grid = refined_grid(1.0) if grid is None else np.asarray(grid)
    cand = np.sort(grid[(grid > 0.0) & (grid < 1.0)])
    ok = 2.0 - cand ** (exponent + 1.0) <= (1.0 + eps) * cand
    if not ok.any():
        raise DomainError("no grid point satisfies the condition on c")
    return float(cand[np.argmax(ok)])


def choose_rho(eps: float, n_hat: float) -> float:
    return 1.0 - eps / n_hat


def hq_approx_gap(q: Weight, rho: float, approximant: FiniteRankSpec, f: MuntzPoly) -> float:
    """``||H_q f - K f - T_rho f||_inf`` for a unit-L1 ``f``, all in closed form."""
    if approximant.variant not in ("R", "R1"):
        raise DomainError("approximant must be R or R1")
    if abs(l1_norm(f).value - 1.0) > 1e-9:
        raise DomainError("f must have unit L1 norm")
    residual = linear_combine(1.0, weighted_hq(q, f), -1.0, finite_rank_apply(approximant, f))
    residual = linear_combine(1.0, residual, -1.0, t_rho_apply(q, rho, f))
    return sup_norm(residual).value


def sampled_hq_gap(
    q: Weight,
    rho: float,
    approximant: FiniteRankSpec,
    sampler: Callable[[int], MuntzPoly],
    count: int,
    workers: int = 1,
) -> GapResult:
    """:func:`hq_approx_gap` maximized over ``count`` samples."""

    def residual(f):
        out = linear_combine(1.0, weighted_hq(q, f), -1.0, finite_rank_apply(approximant, f))
        return linear_combine(1.0, out, -1.0, t_rho_apply(q, rho, f))

    def unit_sampler(i):
        f = sampler(i)
        if abs(l1_norm(f).value - 1.0) > 1e-9:
            raise DomainError("sampler must emit unit-L1 polynomials")
        return f

    return sampled_operator_gap(residual, unit_sampler, count, workers)


# -- composition operator on C[0, 1] ---------------------------------------


@dataclass(frozen=True)
class CompositionResult:
    lower_bound: float
    estimate: DiscontinuityEstimate | None
    limit: SampledLimit


def composition_demo(
    theta,
    alpha: float,
    n_max: int = 10_000,
    grid=None,
    n_tail: int = N_TAIL,
    radii: Sequence[float] = DEFAULT_RADII,
) -> CompositionResult:
    """Lower bound for the essential norm of ``f -> f o theta`` on C[0, 1].

    Witnesses are ``x_n(t) = (n|t - alpha| - 1) / (n|t - alpha| + 1)``.
    ``theta`` is either a callable or its samples on ``grid``.
    """
    grid = np.linspace(0.0, 1.0, 1025) if grid is None else np.asarray(grid, dtype=float)
    values = theta(grid) if callable(theta) else np.asarray(theta, dtype=float)
    hit = np.abs(values - alpha) <= HIT_TOL
    if not hit.any():
        raise DomainError("alpha is not attained by theta on the grid")
    # a boundary point of theta^-1(alpha): a hit with a non-hit neighbour
    edge = hit & ~(np.r_[hit[1:], True] & np.r_[True, hit[:-1]])
    if callable(theta) and edge.any():
        t0 = float(grid[np.argmax(edge)])
        grid = np.unique(np.concatenate([grid, refined_grid(t0, n_uniform=len(grid) - 1)]))
        values = theta(grid)
        hit = np.abs(values - alpha) <= HIT_TOL
    dist = np.abs(values - alpha)
    ns = np.arange(n_max - n_tail + 1, n_max + 1, dtype=float)[:, None]
    tail = (ns * dist - 1.0) / (ns * dist + 1.0)
    limit = SampledLimit(grid, tail.mean(axis=0), np.ptp(tail, axis=0))
    edge = hit & ~(np.r_[hit[1:], True] & np.r_[True, hit[:-1]])
    if not edge.any():
        # constant theta: H is identically -1, no jump
        return CompositionResult(0.0, None, limit)
    t0 = float(grid[np.argmax(edge)])
    est = discontinuity_height(limit, t0, radii)
    return CompositionResult(0.5 * est.height, est, limit)
