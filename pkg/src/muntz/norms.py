"""Certified sup norm and exact L1 norm of Muntz polynomials on [0, 1].

All root finding happens in the variable ``s = -log x`` where a Muntz
polynomial becomes the exponential sum ``g(s) = sum a_k exp(-lam_k s)``.
This keeps huge exponents (``lam ~ 1e18``) resolvable near ``x = 1``.

Completeness of the zero set is certified in two stages:

1. Descartes budget. ``g`` has at most ``V`` real zeros counted with
   multiplicity, ``V`` being the sign variations of the coefficients.
   If sampling finds ``V`` sign changes on the whole positive ``x`` axis,
   every bracket holds exactly one simple zero and nothing was missed.
2. Otherwise every sampling cell is refined until it is either excluded
   (a Lipschitz bound on ``g'`` shows ``g`` cannot reach 0) or shown to
   hold exactly one zero (a Lipschitz bound on ``g''`` shows ``g'`` keeps
   its sign). Cells that survive ``MAX_DEPTH`` splits leave the result
   flagged as uncertified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    DomainError,
    MuntzPoly,
    derivative_times_x,
    evaluate_log,
    scale,
    sign_variations,
    value_at_zero,
)

SAMPLES_PER_TERM = 64
MAX_DEPTH = 60
MAX_BISECTIONS = 400
MAX_CELLS = 20000
DEFAULT_TOL = 1e-12
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class RootList:
    """Sign changes of a function inside an interval of (0, 1).

    ``points`` are bracket midpoints in increasing order, ``widths`` the
    bracket widths in ``x``; ``log_points`` and ``log_widths`` are the same
    brackets in ``s = -log x``.
    """

    points: tuple[float, ...]
    widths: tuple[float, ...]
    log_points: tuple[float, ...]
    log_widths: tuple[float, ...]
    certified: bool = True

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class NormResult:
    value: float
    argmax: float | None
    error_radius: float
    certified: bool = True

    def to_dict(self) -> dict:
        return {"value": self.value, "argmax": self.argmax, "error_radius": self.error_radius}


def _arrays(f: MuntzPoly) -> tuple[np.ndarray, np.ndarray]:
    return np.asarray(f.exponents, dtype=float), np.asarray(f.coefficients, dtype=float)


def _signs(lam, a, s, with_trust=False):
    """Sign of g at each point of ``s``, scaled pointwise against underflow.

    With ``with_trust`` also report whether ``|g|`` clears the roundoff level.
    """
    arg = -np.multiply.outer(s, lam)
    arg -= arg.max(axis=1, keepdims=True)
    terms = np.exp(arg)
    g = terms @ a
    if not with_trust:
        return np.sign(g)
    return np.sign(g), np.abs(g) > 8 * _EPS * len(a) * (terms @ np.abs(a))


def _search_range(lam, a) -> tuple[float, float]:
    """``(s_neg, s_pos)`` outside of which one term dominates, so g has no zero."""
    absa = np.abs(a)
    low_rest = absa[1:].sum()
    s_pos = math.log(low_rest / absa[0]) / (lam[1] - lam[0]) if low_rest > absa[0] else 0.0
    top_rest = absa[:-1].sum()
    s_neg = -math.log(top_rest / absa[-1]) / (lam[-1] - lam[-2]) if top_rest > absa[-1] else 0.0
    return 1.01 * s_neg, 1.01 * s_pos


def _initial_samples(lam, s_neg, s_pos, m) -> np.ndarray:
    pts = [np.array([0.0])]
    lam_max = lam[-1]
    if s_pos > 0:
        s_lo = min(1e-4 / lam_max, s_pos * 1e-6)
        pts.append(np.geomspace(s_lo, s_pos, m))
        x = np.linspace(0.0, 1.0, m + 2)[1:-1]
        s_unif = -np.log(x)
        pts.append(s_unif[s_unif < s_pos])
    if s_neg < 0:
        s_lo = min(1e-4 / lam_max, -s_neg * 1e-6)
        pts.append(-np.geomspace(s_lo, -s_neg, m // 2 + 2))
    return np.unique(np.concatenate(pts))


def _nudge_zeros(lam, a, s, sg):
    # a sample sitting exactly on a zero would hide the sign change
    for i in np.flatnonzero(sg == 0):
        step = max(abs(s[i]), 1e-300) * 1e-9
        for _ in range(8):
            s[i] += step
            sg[i] = _signs(lam, a, s[i : i + 1])[0]
            if sg[i] != 0:
                break
            step *= 10
    return s, sg


def _taylor_clear(v_l, v_r, d_l, d_r, bound2, width, rnd):
    """True where a function with these end values and slopes, and second
    derivative at most ``bound2`` in size, cannot vanish on the cell."""
    sig = np.sign(v_l)
    same = (sig == np.sign(v_r)) & (sig != 0)
    curv = 0.5 * bound2 * width * width
    from_left = np.minimum(sig * v_l, sig * (v_l + d_l * width)) - curv
    from_right = np.minimum(sig * v_r, sig * (v_r - d_r * width)) - curv
    return same & (np.maximum(from_left, from_right) > rnd)


def _cell_tests(lam, a, left, right):
    """Vectorized exclusion and single-zero tests for cells ``[left, right]``.

    Second-order Taylor bounds from both ends; the derivative bounds are
    taken at ``left`` because every term decreases in ``s``.
    """
    arg_l = -np.multiply.outer(left, lam)
    shift = arg_l.max(axis=1, keepdims=True)
    t_l = np.exp(arg_l - shift)
    t_r = np.exp(-np.multiply.outer(right, lam) - shift)
    absa = np.abs(a)
    width = right - left
    coef = [a * lam**k * (-1) ** k for k in range(4)]
    mags = [absa * lam**k for k in range(4)]
    vals_l = [t_l @ c for c in coef]
    vals_r = [t_r @ c for c in coef]
    rnd = [8 * _EPS * len(a) * (t_l @ m + t_r @ m) for m in mags]
    no_zero = _taylor_clear(
        vals_l[0], vals_r[0], vals_l[1], vals_r[1], t_l @ mags[2], width, rnd[0]
    )
    one_zero = _taylor_clear(
        vals_l[1], vals_r[1], vals_l[2], vals_r[2], t_l @ mags[3], width, rnd[1]
    )
    return no_zero, one_zero


def _split(left, right):
    mid = 0.5 * (left + right)
    pos = (left > 0) & (right > 4 * left)
    mid[pos] = np.sqrt(left[pos] * right[pos])
    neg = (right < 0) & (left < 4 * right)
    mid[neg] = -np.sqrt(left[neg] * right[neg])
    return mid


def _refine(lam, a, left, right, s_left, s_right):
    """Certify the zero count cell by cell; returns brackets and a flag."""
    out_l, out_r = [np.empty(0)], [np.empty(0)]
    certified = True
    for _ in range(MAX_DEPTH):
        if left.size == 0:
            break
        no_zero, one_zero = _cell_tests(lam, a, left, right)
        change = s_left != s_right
        done = change & one_zero
        out_l.append(left[done])
        out_r.append(right[done])
        todo = (change & ~one_zero) | (~change & ~no_zero)
        # cells lost in roundoff cannot be resolved by splitting further
        _, trust_l = _signs(lam, a, left, with_trust=True)
        _, trust_r = _signs(lam, a, right, with_trust=True)
        stuck = todo & ~trust_l & ~trust_r
        if stuck.any():
            certified = False
            keep = stuck & change
            out_l.append(left[keep])
            out_r.append(right[keep])
            todo &= ~stuck
        left, right = left[todo], right[todo]
        s_left, s_right = s_left[todo], s_right[todo]
        if left.size > MAX_CELLS:
            break
        mid = _split(left, right)
        s_mid = _signs(lam, a, mid)
        mid, s_mid = _nudge_zeros(lam, a, mid, s_mid)
        left = np.concatenate([left, mid])
        right = np.concatenate([mid, right])
        s_left, s_right = np.concatenate([s_left, s_mid]), np.concatenate([s_mid, s_right])
    if left.size:
        certified = False
        change = s_left != s_right
        out_l.append(left[change])
        out_r.append(right[change])
    return np.concatenate(out_l), np.concatenate(out_r), certified


def _bisect(lam, a, left, right, tol):
    """Shrink sign-change brackets in ``s`` until their ``x`` width is below tol."""
    s_left = _signs(lam, a, left)
    for _ in range(MAX_BISECTIONS):
        width_x = np.exp(-left) * -np.expm1(-(right - left))
        rel = right - left <= tol * np.maximum(np.abs(left), np.abs(right))
        active = ~((width_x <= tol) & rel)
        mid = 0.5 * (left + right)
        active &= (mid != left) & (mid != right)
        if not active.any():
            break
        idx = np.flatnonzero(active)
        s_mid = _signs(lam, a, mid[idx])
        hit = s_mid == 0
        go_right = (s_mid == s_left[idx]) & ~hit
        go_left = (s_mid != s_left[idx]) & ~hit
        left[idx[go_right]] = mid[idx[go_right]]
        right[idx[go_left]] = mid[idx[go_left]]
        left[idx[hit]] = right[idx[hit]] = mid[idx[hit]]
    return left, right


def _zero_brackets(f: MuntzPoly):
    """All sign-change brackets of f on (0, inf) in ``s`` plus a certificate."""
    lam, a = _arrays(f)
    if len(lam) < 2:
        return np.empty(0), np.empty(0), True
    s_neg, s_pos = _search_range(lam, a)
    s = _initial_samples(lam, s_neg, s_pos, SAMPLES_PER_TERM * len(lam))
    sg = _signs(lam, a, s)
    s, sg = _nudge_zeros(lam, a, s, sg)
    order = np.argsort(s)
    s, sg = s[order], sg[order]
    _, trust = _signs(lam, a, s, with_trust=True)
    budget = sign_variations(f)
    change = sg[1:] != sg[:-1]
    noisy = change & ~(trust[1:] & trust[:-1])
    if np.count_nonzero(change) == budget and not noisy.any():
        left, right, certified = s[:-1][change], s[1:][change], True
    else:
        left, right, certified = _refine(lam, a, s[:-1], s[1:], sg[:-1], sg[1:])
    if certified and len(left) > budget:
        raise ArithmeticError(
            f"found {len(left)} sign changes but the Descartes budget is {budget}"
        )
    return left, right, certified


def isolate_zeros(f: MuntzPoly, tol: float = DEFAULT_TOL, lo: float = 0.0, hi: float = 1.0) -> RootList:
    """Bracket every sign change of ``f`` in the open interval ``(lo, hi)``.

    Each bracket has width at most ``tol`` and contains exactly one sign
    change when ``certified`` is set on the result.
    """
    if f.is_zero():
        raise DomainError("the zero polynomial has no isolated zeros")
    if not tol > 0:
        raise DomainError("tol must be positive")
    if not 0.0 <= lo < hi <= 1.0:
        raise DomainError("need 0 <= lo < hi <= 1")
    left, right, certified = _zero_brackets(f)
    s_max = math.inf if lo == 0.0 else -math.log(lo)
    s_min = -math.log(hi)
    keep = (right > s_min) & (left < s_max)
    lam, a = _arrays(f)
    left, right = _bisect(lam, a, left[keep].copy(), right[keep].copy(), tol)
    mid = 0.5 * (left + right)
    inside = (mid > s_min) & (mid < s_max)
    left, right, mid = left[inside], right[inside], mid[inside]
    order = np.argsort(-mid)
    widths = np.exp(-left) * -np.expm1(-(right - left))
    return RootList(
        points=tuple(float(v) for v in np.exp(-mid[order])),
        widths=tuple(float(v) for v in widths[order]),
        log_points=tuple(float(v) for v in mid[order]),
        log_widths=tuple(float(v) for v in (right - left)[order]),
        certified=certified,
    )


def _abs_coef_sum(f: MuntzPoly) -> float:
    return float(np.abs(f.coefficients).sum())


def sup_norm(f: MuntzPoly, upper: float = 1.0, tol: float = DEFAULT_TOL) -> NormResult:
    """``max |f|`` over ``[0, upper]`` from endpoints and critical points.

    Critical points are the sign changes of ``x f'(x)``, which has the same
    zeros as ``f'`` on (0, 1] but stays bounded at 0. The reported argmax
    is the leftmost maximizer.
    """
    if f.is_zero():
        return NormResult(0.0, 0.0, 0.0)
    if not 0.0 < upper <= 1.0:
        raise DomainError("upper end must lie in (0, 1]")
    s_upper = -math.log(upper)
    xs = [0.0, upper]
    vals = [abs(value_at_zero(f)), abs(evaluate_log(f, s_upper))]
    errs = [0.0, 0.0]
    certified = True
    df = derivative_times_x(f)
    if len(df) >= 2:
        crit = isolate_zeros(df, tol=tol, hi=upper)
        certified = crit.certified
        if len(crit):
            s_mid = np.asarray(crit.log_points)
            half = 0.5 * np.asarray(crit.log_widths)
            slope = np.maximum(
                np.abs(evaluate_log(df, s_mid - half)), np.abs(evaluate_log(df, s_mid + half))
            )
            xs.extend(np.exp(-s_mid).tolist())
            vals.extend(np.abs(evaluate_log(f, s_mid)).tolist())
            errs.extend((slope * 2 * half).tolist())
    vals_a = np.asarray(vals)
    best = vals_a.max()
    ties = np.flatnonzero(vals_a >= best * (1 - 1e-14))
    pick = min(ties, key=lambda i: xs[i])
    roundoff = 8 * _EPS * len(f) * _abs_coef_sum(f)
    return NormResult(float(best), float(xs[pick]), float(max(errs) + roundoff), certified)


def l1_norm(f: MuntzPoly, tol: float = DEFAULT_TOL) -> NormResult:
    """``int_0^1 |f|`` as an alternating sum of antiderivative values.

    The antiderivative is exact, so the only error comes from locating the
    sign changes: at most ``2 * sum(widths) * sup|f|``.
    """
    if f.is_zero():
        return NormResult(0.0, None, 0.0)
    roots = isolate_zeros(f, tol=tol)
    lam, a = _arrays(f)
    # breakpoints in s, from x = 0 (s = inf) up to x = 1 (s = 0)
    s_break = np.concatenate([roots.log_points, [0.0]])
    prim = np.exp(-np.multiply.outer(s_break, lam + 1.0)) @ (a / (lam + 1.0))
    prim = np.concatenate([[0.0], prim])
    value = float(np.abs(np.diff(prim)).sum())
    bound = _abs_coef_sum(f)
    err = 2 * sum(roots.widths) * bound + 8 * _EPS * (len(roots) + 1) * len(f) * bound
    return NormResult(value, None, float(err), roots.certified)


def normalize_l1(f: MuntzPoly) -> MuntzPoly:
    """Rescale ``f`` to unit L1 norm."""
    if f.is_zero():
        raise DomainError("cannot normalize the zero polynomial")
    return scale(f, 1.0 / l1_norm(f).value)
