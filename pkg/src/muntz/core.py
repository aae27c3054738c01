"""Finite Muntz polynomials on [0, 1] and their closed-form calculus.

A Muntz polynomial is a finite sum ``sum_k a_k x**lam_k`` with real
coefficients and distinct nonnegative real exponents. Everything here is
exact up to floating point: no quadrature, no sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

# exponents closer than this are merged
EXPONENT_TOL = 1e-12


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


@dataclass(frozen=True)
class ExponentRule:
    """Generator for a finite prefix of an exponent sequence.

    ``kind`` is one of ``"explicit"``, ``"geometric"`` or ``"power"``:

    * explicit: ``values`` is the exponent list itself;
    * geometric: ``lam_k = base * ratio**k`` with ``base > 0``, ``ratio > 1``;
    * power: ``lam_k = (k + 1)**power`` with ``power > 1``.

    The generator kinds satisfy ``sum 1/lam_k < inf`` by construction of
    their parameters; explicit lists are finite so the condition is vacuous.
    """

    kind: str
    length: int
    values: tuple[float, ...] = ()
    base: float = 1.0
    ratio: float = 2.0
    power: float = 2.0

    def __post_init__(self):
        if self.kind == "explicit":
            vals = tuple(float(v) for v in self.values)
            object.__setattr__(self, "values", vals)
            if self.length != len(vals):
                object.__setattr__(self, "length", len(vals))
            if any(v < 0 for v in vals):
                raise DomainError("exponents must be nonnegative")
            if any(b <= a for a, b in zip(vals, vals[1:])):
                raise DomainError("exponents must be strictly increasing")
        elif self.kind == "geometric":
            if not self.base > 0:
                raise DomainError("geometric rule needs base > 0")
            if not self.ratio > 1:
                raise DomainError("geometric rule needs ratio > 1 (Muntz condition)")
        elif self.kind == "power":
            if not self.power > 1:
                raise DomainError("power rule needs power > 1 (Muntz condition)")
        else:
            raise DomainError(f"unknown exponent rule kind {self.kind!r}")
        if self.length < 1:
            raise DomainError("rule length must be positive")

    @classmethod
    def explicit(cls, values: Iterable[float]) -> "ExponentRule":
        vals = tuple(values)
        return cls("explicit", len(vals), values=vals)

    @classmethod
    def geometric(cls, base: float, ratio: float, length: int) -> "ExponentRule":
        return cls("geometric", length, base=base, ratio=ratio)

    @classmethod
    def powers(cls, power: float, length: int) -> "ExponentRule":
        return cls("power", length, power=power)

    def materialize(self) -> tuple[float, ...]:
        if self.kind == "explicit":
            return self.values
        k = np.arange(self.length, dtype=float)
        if self.kind == "geometric":
            lam = self.base * self.ratio**k
        else:
            lam = (k + 1.0) ** self.power
        return tuple(float(v) for v in lam)

    def muntz_sum_bound(self) -> float:
        """Closed-form upper bound for ``sum 1/lam`` over the infinite rule."""
        if self.kind == "explicit":
            return sum(1.0 / v for v in self.values if v > 0)
        if self.kind == "geometric":
            return 1.0 / self.base * self.ratio / (self.ratio - 1.0)
        # 1 + int_1^inf t^-p dt
        return 1.0 + 1.0 / (self.power - 1.0)

    def to_dict(self) -> dict:
        if self.kind == "explicit":
            params = {"values": list(self.values)}
        elif self.kind == "geometric":
            params = {"base": self.base, "ratio": self.ratio}
        else:
            params = {"power": self.power}
        return {"kind": self.kind, "parameters": params, "length": self.length}

    @classmethod
    def from_dict(cls, data: dict) -> "ExponentRule":
        kind = data["kind"]
        params = dict(data.get("parameters", {}))
        if kind == "explicit":
            return cls.explicit(params["values"])
        return cls(kind, int(data["length"]), **params)


@dataclass(frozen=True)
class MuntzPoly:
    """Exact finite expansion ``sum a_k x**lam_k``.

    Exponents are strictly increasing and no stored coefficient is zero.
    Use :meth:`from_terms` to build one from arbitrary (possibly repeated)
    exponent/coefficient pairs.
    """

    exponents: tuple[float, ...] = ()
    coefficients: tuple[float, ...] = ()

    def __post_init__(self):
        if len(self.exponents) != len(self.coefficients):
            raise ValueError("exponents and coefficients differ in length")
        if any(e < 0 or not math.isfinite(e) for e in self.exponents):
            raise DomainError("exponents must be finite and nonnegative")
        if any(b <= a for a, b in zip(self.exponents, self.exponents[1:])):
            raise ValueError("exponents must be strictly increasing")
        if any(c == 0.0 for c in self.coefficients):
            raise ValueError("zero coefficients must not be stored")

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[float, float]]) -> "MuntzPoly":
        pairs = sorted((float(e), float(c)) for e, c in terms)
        exps: list[float] = []
        coefs: list[float] = []
        for e, c in pairs:
            if exps and e - exps[-1] < EXPONENT_TOL:
                coefs[-1] += c
            else:
                exps.append(e)
                coefs.append(c)
        kept = [(e, c) for e, c in zip(exps, coefs) if c != 0.0]
        return cls(tuple(e for e, _ in kept), tuple(c for _, c in kept))

    @classmethod
    def monomial(cls, exponent: float, coefficient: float = 1.0) -> "MuntzPoly":
        return cls.from_terms([(exponent, coefficient)])

    @classmethod
    def constant(cls, value: float) -> "MuntzPoly":
        return cls.from_terms([(0.0, value)])

    @classmethod
    def zero(cls) -> "MuntzPoly":
        return cls()

    @property
    def terms(self) -> list[tuple[float, float]]:
        return list(zip(self.exponents, self.coefficients))

    def __len__(self) -> int:
        return len(self.exponents)

    def is_zero(self) -> bool:
        return not self.exponents

    def __call__(self, x):
        return evaluate(self, x)

    def __add__(self, other: "MuntzPoly") -> "MuntzPoly":
        return linear_combine(1.0, self, 1.0, other)

    def __sub__(self, other: "MuntzPoly") -> "MuntzPoly":
        return linear_combine(1.0, self, -1.0, other)

    def __neg__(self) -> "MuntzPoly":
        return scale(self, -1.0)

    def __mul__(self, other):
        if isinstance(other, MuntzPoly):
            return multiply(self, other)
        return scale(self, float(other))

    __rmul__ = __mul__

    def to_records(self) -> list[dict]:
        return [{"exponent": e, "coefficient": c} for e, c in self.terms]

    @classmethod
    def from_records(cls, records: Sequence[dict]) -> "MuntzPoly":
        return cls.from_terms((r["exponent"], r["coefficient"]) for r in records)


def _check_unit_interval(x: np.ndarray) -> None:
    if np.any(~((x >= 0.0) & (x <= 1.0))):
        raise DomainError("evaluation point outside [0, 1]")


def evaluate(f: MuntzPoly, x):
    """Evaluate ``f`` at ``x`` (scalar or array) in [0, 1], with ``0**0 = 1``."""
    xa = np.asarray(x, dtype=float)
    _check_unit_interval(xa)
    if f.is_zero():
        out = np.zeros_like(xa)
    else:
        lam = np.asarray(f.exponents)
        a = np.asarray(f.coefficients)
        # numpy's power already uses 0**0 == 1
        out = np.power(xa[..., None], lam) @ a
    return float(out) if out.ndim == 0 else out


def evaluate_log(f: MuntzPoly, s):
    """Evaluate ``f(exp(-s))`` for ``s >= 0`` without forming ``x``.

    Near ``x = 1`` with very large exponents the float ``x`` loses all
    information, while ``exp(-lam * s)`` stays accurate.
    """
    sa = np.asarray(s, dtype=float)
    if f.is_zero():
        out = np.zeros_like(sa)
    else:
        lam = np.asarray(f.exponents)
        a = np.asarray(f.coefficients)
        with np.errstate(invalid="ignore"):
            arg = -np.multiply.outer(sa, lam)
        arg = np.where(np.isnan(arg), 0.0, arg)  # 0 * inf at s = inf, lam = 0
        out = np.exp(arg) @ a
    return float(out) if out.ndim == 0 else out


def value_at_zero(f: MuntzPoly) -> float:
    """The value of ``f`` at 0: the constant coefficient, if any."""
    if f.exponents and f.exponents[0] == 0.0:
        return f.coefficients[0]
    return 0.0


def antiderivative(f: MuntzPoly) -> MuntzPoly:
    """``x -> int_0^x f``, term by term."""
    return MuntzPoly.from_terms((e + 1.0, c / (e + 1.0)) for e, c in f.terms)


def integral(f: MuntzPoly) -> float:
    """``int_0^1 f``."""
    return float(sum(c / (e + 1.0) for e, c in f.terms))


def scale(f: MuntzPoly, alpha: float) -> MuntzPoly:
    return MuntzPoly.from_terms((e, alpha * c) for e, c in f.terms)


def linear_combine(alpha: float, f: MuntzPoly, beta: float, g: MuntzPoly) -> MuntzPoly:
    """``alpha*f + beta*g`` merged by exponent; exact cancellations are dropped."""
    terms = [(e, alpha * c) for e, c in f.terms]
    terms += [(e, beta * c) for e, c in g.terms]
    return MuntzPoly.from_terms(terms)


def multiply(f: MuntzPoly, g: MuntzPoly) -> MuntzPoly:
    return MuntzPoly.from_terms(
        (ef + eg, cf * cg) for ef, cf in f.terms for eg, cg in g.terms
    )


def derivative_times_x(f: MuntzPoly) -> MuntzPoly:
    """``x * f'(x) = sum a_k lam_k x**lam_k``.

    Same sign as ``f'`` on (0, 1] but bounded at 0 even when some exponent
    lies in (0, 1).
    """
    return MuntzPoly.from_terms((e, c * e) for e, c in f.terms if e != 0.0)


def coefficient(f: MuntzPoly, exponent: float) -> float:
    for e, c in f.terms:
        if abs(e - exponent) < EXPONENT_TOL:
            return c
    return 0.0


def sign_variations(f: MuntzPoly) -> int:
    """Sign changes of the coefficient sequence ordered by exponent.

    Bounds the number of positive zeros counted with multiplicity.
    """
    signs = np.sign(f.coefficients)
    return int(np.count_nonzero(signs[1:] != signs[:-1]))
