"""Bernstein numbers of the Volterra and Cesaro operators on Muntz spaces.

For an n-dimensional subspace ``E`` the inner quantity is
``inf_{f in E, f != 0} ||T f||_inf / ||f||_1``; the Bernstein number is the
supremum of that over all ``E``. Only the inner infimum is computed, on
lacunary (Newman) subspaces where it is known to be at least
``(1 - eps)/(2n - 1)``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import DomainError, ExponentRule, MuntzPoly, scale
from .norms import l1_norm, sup_norm
from .operators import get_operator


class PoolExhausted(DomainError):
    def __init__(self, reached: int):
        super().__init__(f"exponent pool exhausted after {reached} Newman terms")
        self.reached = reached


def newman_factor(lam: float, lam_next: float) -> float:
    return 1.0 - 2.0 * lam**2 * (1.0 + math.log(lam_next)) / lam_next


@dataclass(frozen=True)
class NewmanSequence:
    exponents: tuple[float, ...]
    eps: float
    factors: tuple[float, ...]

    def __post_init__(self):
        if any(not 0.0 < f <= 1.0 for f in self.factors):
            raise ArithmeticError("Newman factors must lie in (0, 1]")
        if math.prod(self.factors) < 1.0 - self.eps:
            raise ArithmeticError("Newman product condition violated")


def _smallest_integer_step(lam: float, target: float) -> float:
    # newman_factor(lam, L) increases with L once L > 1
    lo = math.floor(lam) + 1
    if newman_factor(lam, lo) >= target:
        return float(lo)
    hi = 2 * lo
    while newman_factor(lam, hi) < target:
        lo, hi = hi, 2 * hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if newman_factor(lam, mid) >= target:
            hi = mid
        else:
            lo = mid
    return float(hi)


def newman_sequence(
    seed: float, eps: float, n: int, pool: ExponentRule | Sequence[float] | None = None
) -> NewmanSequence:
    """Minimal lacunary sequence with ``prod(factors) >= 1 - eps``.

    Each step takes the smallest admissible next exponent (an integer, or
    the next member of ``pool``) whose factor is at least
    ``(1 - eps)**(1/(n-1))``. With a pool, the first exponent is the
    smallest pool member ``>= seed``.
    """
    if seed < 1:
        raise DomainError("seed must be >= 1")
    if not 0.0 < eps < 1.0:
        raise DomainError("eps must lie in (0, 1)")
    if n < 1:
        raise DomainError("n must be positive")
    target = (1.0 - eps) ** (1.0 / (n - 1)) if n > 1 else 1.0
    if pool is not None:
        members = pool.materialize() if isinstance(pool, ExponentRule) else tuple(pool)
        members = sorted(m for m in members if m >= seed)
        if not members:
            raise PoolExhausted(0)
        lams = [members[0]]
    else:
        lams = [float(seed)]
    while len(lams) < n:
        cur = lams[-1]
        if pool is None:
            lams.append(_smallest_integer_step(cur, target))
            continue
        nxt = next((m for m in members if m > cur and newman_factor(cur, m) >= target), None)
        if nxt is None:
            raise PoolExhausted(len(lams))
        lams.append(nxt)
    factors = tuple(newman_factor(a, b) for a, b in zip(lams, lams[1:]))
    return NewmanSequence(tuple(float(v) for v in lams), eps, factors)


@dataclass(frozen=True)
class NewmanStats:
    violations: int
    min_ratio: float
    skipped: int
    trials: int


def newman_inequality_stats(seq: NewmanSequence, trials: int, seed: int = 0) -> NewmanStats:
    """Check ``||sum a_k x**lam_k||_inf >= (1-eps) max_m |a_1 + ... + a_m|``
    on random coefficient vectors."""
    if trials < 1:
        raise DomainError("trials must be positive")
    rng = np.random.default_rng(seed)
    violations = skipped = 0
    min_ratio = math.inf
    for _ in range(trials):
        a = rng.uniform(-1.0, 1.0, size=len(seq.exponents))
        partial = np.abs(np.cumsum(a)).max()
        if partial == 0.0:
            skipped += 1
            continue
        f = MuntzPoly.from_terms(zip(seq.exponents, a))
        ratio = sup_norm(f).value / partial
        min_ratio = min(min_ratio, ratio)
        violations += ratio < 1.0 - seq.eps
    return NewmanStats(int(violations), float(min_ratio), skipped, trials)


@dataclass(frozen=True)
class AbelCheck:
    lhs: float
    rhs: float
    holds: bool


def abel_bound_check(a: Sequence[float]) -> AbelCheck:
    """``||a||_1 <= (2n - 1) max_m |s_m|`` with ``s_m`` the partial sums."""
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        raise DomainError("a must be nonempty")
    lhs = float(np.abs(a).sum())
    rhs = float((2 * a.size - 1) * np.abs(np.cumsum(a)).max())
    return AbelCheck(lhs, rhs, lhs <= rhs + 1e-12)


@dataclass(frozen=True)
class OptimizerBudget:
    starts: int = 32
    evals_per_start: int = 10_000
    step0: float = 0.5
    min_step: float = 1e-9
    workers: int = 1


@dataclass(frozen=True)
class InnerInfResult:
    value: float
    witness: MuntzPoly
    coefficients: tuple[float, ...]
    converged: bool
    evaluations: int


def _sphere_point(angles: np.ndarray) -> np.ndarray:
    """Hyperspherical coordinates: n-1 angles to a unit vector in R^n."""
    n = angles.size + 1
    out = np.ones(n)
    for i, t in enumerate(angles):
        out[i] *= math.cos(t)
        out[i + 1 :] *= math.sin(t)
    return out


def _basis_poly(exponents, weights) -> MuntzPoly:
    # unit-L1 basis (lam + 1) x**lam keeps wildly different exponents comparable
    return MuntzPoly.from_terms((e, w * (e + 1.0)) for e, w in zip(exponents, weights))


def inner_inf(
    op, exponents: Sequence[float], budget: OptimizerBudget = OptimizerBudget(), seed: int = 0
) -> InnerInfResult:
    """Multi-start coordinate descent for ``min ||op f||_inf / ||f||_1`` over span.

    The value is an upper estimate of the true infimum: it is the ratio at
    an actual point of the subspace.
    """
    exponents = tuple(float(e) for e in exponents)
    n = len(exponents)
    if n < 1:
        raise DomainError("need at least one exponent")
    if len(set(exponents)) != n:
        raise DomainError("exponents must be distinct")
    op = get_operator(op)

    def ratio(w):
        f = _basis_poly(exponents, w)
        if f.is_zero():
            return math.inf
        return sup_norm(op(f)).value / l1_norm(f).value

    if n == 1:
        return _finish(op, exponents, np.ones(1), ratio(np.ones(1)), True, 1)

    def run(start: int):
        rng = np.random.default_rng([seed, start])
        # f and -f give the same ratio, so the first angle covers [0, pi)
        theta = rng.uniform(0.0, math.pi, size=n - 1)
        best = ratio(_sphere_point(theta))
        evals, step = 1, budget.step0
        while step >= budget.min_step and evals < budget.evals_per_start:
            improved = False
            for i in range(n - 1):
                for sign in (1.0, -1.0):
                    trial = theta.copy()
                    trial[i] += sign * step
                    val = ratio(_sphere_point(trial))
                    evals += 1
                    if val < best:
                        theta, best, improved = trial, val, True
                        break
            if not improved:
                step *= 0.5
        return best, theta, step < budget.min_step, evals

    if budget.workers > 1:
        with ThreadPoolExecutor(max_workers=budget.workers) as pool:
            runs = list(pool.map(run, range(budget.starts)))
    else:
        runs = [run(i) for i in range(budget.starts)]
    # lowest value, then lowest start index
    k = min(range(len(runs)), key=lambda i: (runs[i][0], i))
    best, theta, converged, _ = runs[k]
    total = sum(r[3] for r in runs)
    return _finish(op, exponents, _sphere_point(theta), best, converged, total)


def _finish(op, exponents, w, value, converged, evals) -> InnerInfResult:
    f = _basis_poly(exponents, w)
    f = scale(f, 1.0 / l1_norm(f).value)
    coefs = tuple(f.coefficients[f.exponents.index(e)] / (e + 1.0) for e in exponents)
    return InnerInfResult(float(value), f, coefs, converged, evals)


@dataclass(frozen=True)
class BernsteinReport:
    """Inner-infimum estimate on a Newman subspace against the theory.

    ``coefficients`` are the ``a_k`` of the witness in the basis
    ``(lam_k + 1) x**lam_k``; both ``a_l1 = ||a||_1`` and the function norm
    ``f_l1 = ||f||_1`` (which is 1) are reported.
    """

    operator: str
    n: int
    exponents: tuple[float, ...]
    value: float
    witness: MuntzPoly
    coefficients: tuple[float, ...]
    a_l1: float
    f_l1: float
    theory_lower: float
    theory_value: float
    converged: bool

    def to_dict(self) -> dict:
        return {
            "operator": self.operator,
            "n": self.n,
            "exponents": list(self.exponents),
            "value": self.value,
            "witness": self.witness.to_records(),
            "coefficients": list(self.coefficients),
            "a_l1": self.a_l1,
            "f_l1": self.f_l1,
            "theory_lower": self.theory_lower,
            "theory_value": self.theory_value,
            "converged": self.converged,
        }


def bernstein_estimate(
    op: str,
    n: int,
    eps: float,
    pool: ExponentRule | None = None,
    budget: OptimizerBudget = OptimizerBudget(),
    seed: int = 0,
    first_exponent: float = 1.0,
) -> BernsteinReport:
    seq = newman_sequence(first_exponent, eps, n, pool)
    res = inner_inf(op, seq.exponents, budget, seed)
    return BernsteinReport(
        operator=op if isinstance(op, str) else getattr(op, "__name__", "custom"),
        n=n,
        exponents=seq.exponents,
        value=res.value,
        witness=res.witness,
        coefficients=res.coefficients,
        a_l1=float(np.abs(res.coefficients).sum()),
        f_l1=l1_norm(res.witness).value,
        theory_lower=(1.0 - eps) / (2 * n - 1),
        theory_value=1.0 / (2 * n - 1),
        converged=res.converged,
    )
