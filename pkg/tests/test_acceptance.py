"""Acceptance criteria, one test each; every test prints a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (lines are printed even
without ``-s``).
"""

import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from muntz import (
    ExponentRule,
    MuntzPoly,
    Weight,
    abel_bound_check,
    nuclear_series,
    sup_norm,
    t_rho_apply,
)
from muntz.essential import volterra_minus_s
from muntz.experiments import config_from_dict, run_experiment

HERE = Path(__file__).parent


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
        assert ok, detail

    return emit


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def _run(**kw):
    return run_experiment(config_from_dict(kw), write=False)


@pytest.mark.parametrize("n, exp", [(1, "volterra-essential"), (2, "cesaro-essential")])
def test_essential_norm(report, n, exp):
    rec, dt = _timed(lambda: _run(experiment=exp, samples=1000))
    p = rec.payload
    ok = (
        0.48 <= p["lower_bound"] <= 0.50
        and 0.5 - 1e-6 <= p["sampled_gap"] <= 0.5 + 1e-9
        and dt < 10
        and rec.verdict == "pass"
    )
    report(n, ok, f"{exp}: lower={p['lower_bound']:.6f} gap={p['sampled_gap']!r} t={dt:.1f}s")


def test_exact_gap_on_witnesses(report):
    gaps = {g: sup_norm(volterra_minus_s(MuntzPoly.monomial(g, g + 1))).value for g in (1, 5, 50)}
    ok = all(abs(v - 0.5) <= 1e-10 for v in gaps.values())
    report(3, ok, "sup|(V-S)g| = " + ", ".join(f"{g}:{v!r}" for g, v in gaps.items()))


def test_hq_bound(report):
    rec, dt = _timed(lambda: _run(experiment="hq-bound", eps=0.1, samples=500))
    p = rec.payload
    eps = 0.1
    ok_r = p["gap_q1_R"] <= (1 + eps) / 2 + 1e-6
    ok_r1 = p["gap_qx_R1"] <= abs(1.0) / 2 * (1 + eps) + eps
    ok = ok_r and ok_r1 and dt < 60 and rec.verdict == "pass"
    report(
        4,
        ok,
        f"q=1,R gap={p['gap_q1_R']:.6f}<=0.55; q=x,R1 gap={p['gap_qx_R1']:.6f}<=0.65;"
        f" c={p['c']:.5f} N={p['N_hat']:.3f} rho={p['rho']:.5f} t={dt:.1f}s",
    )


def test_nuclear_identity(report):
    rng = np.random.default_rng(2024)
    lam = ExponentRule.geometric(1, 2, 60).materialize()
    x = np.linspace(0.0, 1.0, 1000)
    worst = 0.0
    for _ in range(100):
        k = int(rng.integers(1, 9))
        idx = rng.choice(len(lam), size=k, replace=False)
        f = MuntzPoly.from_terms(zip((lam[i] for i in idx), rng.uniform(-1, 1, k)))
        q = Weight.one() if rng.random() < 0.5 else Weight.identity()
        rho = float(rng.uniform(0.05, 0.95))
        diff = np.abs(t_rho_apply(q, rho, f)(x) - nuclear_series(q, rho, f, lam, x))
        worst = max(worst, float(diff.max()))
    report(5, worst <= 1e-12, f"max pointwise difference {worst:.3g}")


def test_bernstein_values(report):
    t0 = time.perf_counter()
    lines, ok = [], True
    for op in ("volterra", "cesaro"):
        for n in (1, 2, 3):
            rec = _run(experiment="bernstein", operator=op, n=n, eps=0.1)
            v = rec.payload["value"]
            lo, hi = (1 - 1e-6, 1 + 1e-6) if n == 1 else (0.9 / (2 * n - 1) - 0.01,
                                                          1 / (2 * n - 1) + 0.05)
            ok &= lo <= v <= hi and rec.verdict == "pass"
            lines.append(f"{op[0].upper()} n={n}: {v:.6f}")
    dt = time.perf_counter() - t0
    ok &= dt < 300
    report(6, ok, "; ".join(lines) + f"; t={dt:.0f}s")


def test_newman_inequality(report):
    rec = _run(experiment="newman", eps=0.1, n=4, trials=500)
    p = rec.payload
    ok = p["violations"] == 0 and rec.verdict == "pass"
    report(7, ok, f"violations={p['violations']} min ratio={p['value']:.6f} on {p['exponents']}")


def test_abel_bound(report):
    rng = np.random.default_rng(7)
    bad = 0
    for _ in range(10_000):
        n = int(rng.integers(1, 12))
        bad += not abel_bound_check(rng.normal(size=n) * 10.0 ** rng.integers(-3, 4)).holds
    eq = abel_bound_check([1, -2, 2])
    ok = bad == 0 and eq.lhs == eq.rhs == 5
    report(8, ok, f"violations={bad}; (1,-2,2): lhs={eq.lhs} rhs={eq.rhs}")


def test_composition(report):
    rec = _run(experiment="composition-demo", theta="square", alpha=0.25)
    lb = rec.payload["lower_bound"]
    report(9, 0.98 <= lb <= 1.0 and rec.verdict == "pass", f"lower bound {lb:.6f}")


def test_property_suites(report):
    files = sorted(str(p) for p in HERE.glob("test_*.py") if p.name != "test_acceptance.py")
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", *files],
        capture_output=True,
        text=True,
        cwd=HERE.parent,
    )
    tail = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    report(10, proc.returncode == 0, f"property suites: {tail}")
