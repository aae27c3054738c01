"""Closed-form Volterra/Cesaro-type operators on Muntz polynomials.

Every operator here maps a finite expansion to a finite expansion, so
nothing is sampled or integrated numerically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import (
    EXPONENT_TOL,
    DomainError,
    MuntzPoly,
    antiderivative,
    coefficient,
    evaluate,
    integral,
    linear_combine,
    multiply,
)
from .norms import sup_norm

Operator = Callable[[MuntzPoly], MuntzPoly]


@dataclass(frozen=True)
class Weight:
    """A continuous weight ``q`` on [0, 1] given as a Muntz polynomial."""

    q: MuntzPoly

    @classmethod
    def one(cls) -> "Weight":
        return cls(MuntzPoly.constant(1.0))

    @classmethod
    def identity(cls) -> "Weight":
        return cls(MuntzPoly.monomial(1.0))

    @property
    def at_one(self) -> float:
        return float(sum(self.q.coefficients))

    @property
    def sup(self) -> float:
        return sup_norm(self.q).value


@dataclass(frozen=True)
class FiniteRankSpec:
    """One of the rank-one approximants ``S``, ``R`` or ``R1``.

    ``R`` needs a weight and an exponent taken from ``rule_exponents``;
    ``R1`` needs a weight only.
    """

    variant: str
    weight: Weight | None = None
    exponent: float | None = None
    rule_exponents: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.variant not in ("S", "R", "R1"):
            raise DomainError(f"unknown finite-rank variant {self.variant!r}")
        if self.variant in ("R", "R1") and self.weight is None:
            raise DomainError(f"variant {self.variant} needs a weight")
        if self.variant == "R":
            if self.exponent is None or self.rule_exponents is None:
                raise DomainError("variant R needs an exponent and the rule exponents")
            if not any(abs(self.exponent - e) < EXPONENT_TOL for e in self.rule_exponents):
                raise DomainError(f"exponent {self.exponent} is not in the exponent set")


def volterra(f: MuntzPoly) -> MuntzPoly:
    """``V f (x) = int_0^x f``; shifts every exponent by one."""
    return antiderivative(f)


def cesaro(f: MuntzPoly) -> MuntzPoly:
    """Running average ``(1/x) int_0^x f``, equal to ``f(0)`` at 0."""
    return MuntzPoly.from_terms((e, c / (e + 1.0)) for e, c in f.terms)


def division_q(f: MuntzPoly) -> MuntzPoly:
    """``f(x) / x`` on expansions whose exponents are all at least 1."""
    if f.exponents and f.exponents[0] < 1.0:
        raise DomainError("division by x needs every exponent >= 1")
    return MuntzPoly.from_terms((e - 1.0, c) for e, c in f.terms)


def weighted_hq(q: Weight, f: MuntzPoly) -> MuntzPoly:
    """``H_q f = q * cesaro(f)``; ``q = 1`` gives Cesaro, ``q = x`` Volterra."""
    return multiply(q.q, cesaro(f))


def finite_rank_apply(spec: FiniteRankSpec, f: MuntzPoly) -> MuntzPoly:
    mass = integral(f)
    if spec.variant == "S":
        return MuntzPoly.constant(0.5 * mass)
    if spec.variant == "R1":
        return MuntzPoly.constant(0.5 * spec.weight.at_one * mass)
    return multiply(spec.weight.q, MuntzPoly.monomial(spec.exponent, 0.5 * mass))


def t_rho_apply(q: Weight, rho: float, f: MuntzPoly) -> MuntzPoly:
    """``(q(x)/x) int_0^{rho x} f`` in closed form."""
    if not 0.0 < rho < 1.0:
        raise DomainError("rho must lie in (0, 1)")
    inner = MuntzPoly.from_terms(
        (e, c * rho ** (e + 1.0) / (e + 1.0)) for e, c in f.terms
    )
    return multiply(q.q, inner)


def erdos_functional(f: MuntzPoly, exponent: float) -> float:
    """Coefficient of ``x**exponent`` in the expansion of ``f``."""
    return coefficient(f, exponent)


def nuclear_series(
    q: Weight, rho: float, f: MuntzPoly, exponents: Sequence[float], x
) -> np.ndarray:
    """Evaluate the rank-one series for ``T_rho`` pointwise.

    Each term is ``e_n(f) * rho**(lam_n+1)/(lam_n+1) * x**lam_n * q(x)``.
    Used as an independent cross-check of :func:`t_rho_apply`.
    """
    x = np.asarray(x, dtype=float)
    qx = evaluate(q.q, x)
    total = np.zeros_like(x)
    for lam in exponents:
        c = erdos_functional(f, lam)
        if c:
            total = total + c * rho ** (lam + 1.0) / (lam + 1.0) * np.power(x, lam) * qx
    return total


OPERATORS: dict[str, Operator] = {"volterra": volterra, "cesaro": cesaro}


def get_operator(tag: str | Operator) -> Operator:
    if callable(tag):
        return tag
    try:
        return OPERATORS[tag]
    except KeyError:
        raise DomainError(f"unknown operator {tag!r}") from None


def difference(*ops: Operator, signs: Sequence[float] | None = None) -> Operator:
    """The operator ``sum sign_i * op_i``; defaults to ``op_0 - op_1 - ...``."""
    signs = signs or [1.0] + [-1.0] * (len(ops) - 1)

    def apply(f: MuntzPoly) -> MuntzPoly:
        out = MuntzPoly.zero()
        for sign, op in zip(signs, ops):
            out = linear_combine(1.0, out, sign, op(f))
        return out

    return apply
