"""Experiment configuration, execution and reporting.

A run is fully described by an :class:`ExperimentConfig`; its hash names
the output directory and identical configs give byte-identical payloads.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import logging
import math
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import bernstein, essential
from .core import ExponentRule
from .operators import FiniteRankSpec, Weight

log = logging.getLogger(__name__)

EXPERIMENTS = (
    "volterra-essential",
    "cesaro-essential",
    "hq-bound",
    "bernstein",
    "newman",
    "composition-demo",
)
THETAS = {
    "square": lambda t: t * t,
    "identity": lambda t: t,
    "constant": lambda t: np.full_like(t, 0.25),
}
OUTPUT_ENV = "MUNTZ_OUTPUT_DIR"
CSV_COLUMNS = ("experiment", "n", "value", "bound", "verdict")

# acceptance thresholds, shared by the verdicts and the test-suite
ESSENTIAL_LOWER = (0.48, 0.50)
ESSENTIAL_GAP = (0.5 - 1e-6, 0.5 + 1e-9)
HQ_SLACK = 1e-6
BERNSTEIN_N1_TOL = 1e-6
BERNSTEIN_BELOW = 0.01
BERNSTEIN_ABOVE = 0.05
COMPOSITION_LOWER = (0.98, 1.0)

_DEFAULT_RULE = {"kind": "geometric", "parameters": {"base": 1.0, "ratio": 2.0}, "length": 60}


class ConfigError(ValueError):
    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    rule: dict | None = None
    eps: float = 0.1
    rho: float | None = None
    c: float | None = None
    samples: int | None = None
    n: int | None = None
    trials: int = 500
    operator: str = "volterra"
    starts: int = 32
    budget: int = 10_000
    theta: str = "square"
    alpha: float = 0.25
    n_max: int = 10_000
    seed: int = 0
    workers: int = 1
    output_dir: str = "runs"

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def semantic_dict(self) -> dict:
        """Fields that can change results; worker count and paths cannot."""
        d = self.to_dict()
        del d["workers"], d["output_dir"]
        return d

    @property
    def config_hash(self) -> str:
        blob = json.dumps(self.semantic_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def exponent_rule(self) -> ExponentRule | None:
        """The configured rule; essential and hq runs fall back to 1, 2, 4, ..."""
        if self.rule is not None:
            return ExponentRule.from_dict(self.rule)
        if self.experiment in ("bernstein", "newman"):
            return None
        return ExponentRule.from_dict(_DEFAULT_RULE)

    @property
    def terms(self) -> int:
        if self.n is not None:
            return self.n
        return 4 if self.experiment == "newman" else 2

    @property
    def sample_count(self) -> int:
        if self.samples is not None:
            return self.samples
        return 500 if self.experiment == "hq-bound" else 1000


_FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
_POSITIVE_INT = ("samples", "n", "trials", "starts", "budget", "n_max", "workers")


def _validate(data: dict) -> list[str]:
    errors = []
    unknown = sorted(set(data) - set(_FIELDS))
    errors += [f"{k}: unknown key" for k in unknown]
    exp = data.get("experiment")
    if exp not in EXPERIMENTS:
        errors.append(f"experiment: must be one of {', '.join(EXPERIMENTS)}")
    for k in _POSITIVE_INT:
        v = data.get(k)
        if v is not None and (not isinstance(v, int) or isinstance(v, bool) or v <= 0):
            errors.append(f"{k}: must be a positive integer")
    for k in ("eps", "rho", "c"):
        v = data.get(k)
        if v is not None and (not isinstance(v, (int, float)) or not 0.0 < v < 1.0):
            errors.append(f"{k}: must lie in (0, 1)")
    alpha = data.get("alpha")
    if alpha is not None and (not isinstance(alpha, (int, float)) or not 0.0 <= alpha <= 1.0):
        errors.append("alpha: must lie in [0, 1]")
    if data.get("operator", "volterra") not in ("volterra", "cesaro"):
        errors.append("operator: must be volterra or cesaro")
    if data.get("theta", "square") not in THETAS:
        errors.append(f"theta: must be one of {', '.join(THETAS)}")
    seed = data.get("seed")
    if seed is not None and (not isinstance(seed, int) or seed < 0):
        errors.append("seed: must be a nonnegative integer")
    if "rule" in data:
        try:
            ExponentRule.from_dict(data["rule"])
        except (KeyError, TypeError, ValueError) as exc:
            errors.append(f"rule: {exc}")
    return errors


def config_from_dict(data: dict) -> ExperimentConfig:
    errors = _validate(data)
    if errors:
        raise ConfigError(errors)
    clean = {k: v for k, v in data.items() if v is not None}
    return ExperimentConfig(**clean)


def parse_config(source: str) -> ExperimentConfig:
    """Parse a JSON key/value document into a validated, defaulted config."""
    try:
        data = json.loads(source)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"malformed document: {exc}"]) from None
    if not isinstance(data, dict):
        raise ConfigError(["document must be a key/value object"])
    return config_from_dict(data)


@dataclass
class RunRecord:
    config_hash: str
    timestamp: str
    payload: dict
    verdict: str
    plot_rows: list = field(default_factory=list, repr=False)

    def payload_json(self) -> str:
        return json.dumps(self.payload, sort_keys=True, allow_nan=False)

    def to_dict(self) -> dict:
        return {
            "config_hash": self.config_hash,
            "timestamp": self.timestamp,
            "verdict": self.verdict,
            "payload": self.payload,
        }

    @property
    def exit_code(self) -> int:
        return {"pass": 0, "fail": 1}.get(self.verdict, 2)


def _within(v: float, lo: float, hi: float) -> bool:
    return lo <= v <= hi


def _essential(cfg: ExperimentConfig, op: str):
    rule = cfg.exponent_rule()
    lam = rule.materialize()
    family = essential.WitnessFamily.from_exponents(lam)
    grid = essential.refined_grid(1.0)
    limit = essential.pointwise_limit(op, family, grid)
    est = essential.discontinuity_height(limit, 1.0)
    lower = 0.5 * est.height
    sampler = essential.default_sampler(lam, cfg.seed, family)
    A = essential.volterra_minus_s if op == "volterra" else essential.cesaro_minus_compact
    gap = essential.sampled_operator_gap(A, sampler, cfg.sample_count, cfg.workers)
    ok = _within(lower, *ESSENTIAL_LOWER) and _within(gap.max_gap, *ESSENTIAL_GAP)
    payload = {
        "value": lower,
        "bound": 0.5,
        "lower_bound": lower,
        "sampled_gap": gap.max_gap,
        "witnesses": {
            "gap_argmax_index": gap.argmax_index,
            "gap_argmax": gap.arg.to_records(),
            "t0": est.t0,
            "height": est.height,
            "tail_exponents": list(family.gammas[-essential.N_TAIL :]),
        },
    }
    rows = [("t", "limit")] + [(t, v) for t, v in zip(limit.grid.tolist(), limit.values.tolist())]
    return payload, ok, rows


def _hq(cfg: ExperimentConfig):
    lam = cfg.exponent_rule().materialize()
    sampler = essential.default_sampler(lam, cfg.seed)
    eps = cfg.eps
    r_exponent = lam[0]
    c = cfg.c if cfg.c is not None else essential.choose_c(r_exponent, eps)
    n_hat = essential.estimate_N_epsilon(sampler, c, cfg.sample_count, cfg.workers)
    rho = cfg.rho if cfg.rho is not None else essential.choose_rho(eps, n_hat)
    one, ident = Weight.one(), Weight.identity()
    spec_r = FiniteRankSpec("R", one, r_exponent, lam)
    spec_r1 = FiniteRankSpec("R1", ident)
    gap_r = essential.sampled_hq_gap(one, rho, spec_r, sampler, cfg.sample_count, cfg.workers)
    gap_r1 = essential.sampled_hq_gap(ident, rho, spec_r1, sampler, cfg.sample_count, cfg.workers)
    bound_r = (1 + eps) / 2 * one.sup
    bound_r1 = abs(ident.at_one) / 2 * (1 + eps) + eps
    ok = gap_r.max_gap <= bound_r + HQ_SLACK and gap_r1.max_gap <= bound_r1 + HQ_SLACK
    payload = {
        "value": gap_r.max_gap,
        "bound": bound_r,
        "gap_q1_R": gap_r.max_gap,
        "gap_qx_R1": gap_r1.max_gap,
        "bound_qx_R1": bound_r1,
        "eps": eps,
        "c": c,
        "N_hat": n_hat,
        "rho": rho,
        "R_exponent": r_exponent,
        "witnesses": {
            "q1_R_argmax": gap_r.arg.to_records(),
            "qx_R1_argmax": gap_r1.arg.to_records(),
        },
    }
    rows = [
        ("case", "gap", "bound"),
        ("q1_R", gap_r.max_gap, bound_r),
        ("qx_R1", gap_r1.max_gap, bound_r1),
    ]
    return payload, ok, rows


def bernstein_window(n: int, eps: float) -> tuple[float, float]:
    if n == 1:
        return 1.0 - BERNSTEIN_N1_TOL, 1.0 + BERNSTEIN_N1_TOL
    return (1 - eps) / (2 * n - 1) - BERNSTEIN_BELOW, 1 / (2 * n - 1) + BERNSTEIN_ABOVE


def _bernstein(cfg: ExperimentConfig):
    budget = bernstein.OptimizerBudget(
        starts=cfg.starts, evals_per_start=cfg.budget, workers=cfg.workers
    )
    rep = bernstein.bernstein_estimate(
        cfg.operator, cfg.terms, cfg.eps, cfg.exponent_rule(), budget, cfg.seed
    )
    ok = _within(rep.value, *bernstein_window(cfg.terms, cfg.eps))
    payload = {"value": rep.value, "bound": rep.theory_value, **rep.to_dict()}
    rows = [
        ("n", "value", "theory_lower", "theory_value", "gap"),
        (rep.n, rep.value, rep.theory_lower, rep.theory_value, rep.theory_value - rep.value),
    ]
    return payload, ok, rows


def _newman(cfg: ExperimentConfig):
    seq = bernstein.newman_sequence(1.0, cfg.eps, cfg.terms, cfg.exponent_rule())
    stats = bernstein.newman_inequality_stats(seq, cfg.trials, cfg.seed)
    payload = {
        "n": cfg.terms,
        "value": stats.min_ratio,
        "bound": 1 - cfg.eps,
        "violations": stats.violations,
        "skipped": stats.skipped,
        "trials": stats.trials,
        "exponents": list(seq.exponents),
        "factors": list(seq.factors),
    }
    rows = [("k", "exponent")] + list(enumerate(seq.exponents, 1))
    return payload, stats.violations == 0, rows


def _composition(cfg: ExperimentConfig):
    res = essential.composition_demo(THETAS[cfg.theta], cfg.alpha, cfg.n_max)
    ok = _within(res.lower_bound, *COMPOSITION_LOWER)
    payload = {
        "value": res.lower_bound,
        "bound": 1.0,
        "lower_bound": res.lower_bound,
        "witnesses": {
            "t0": res.estimate.t0 if res.estimate else None,
            "height": res.estimate.height if res.estimate else 0.0,
        },
    }
    rows = [("t", "limit")] + list(zip(res.limit.grid.tolist(), res.limit.values.tolist()))
    return payload, ok, rows


_RUNNERS = {
    "volterra-essential": lambda cfg: _essential(cfg, "volterra"),
    "cesaro-essential": lambda cfg: _essential(cfg, "cesaro"),
    "hq-bound": _hq,
    "bernstein": _bernstein,
    "newman": _newman,
    "composition-demo": _composition,
}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer, np.bool_)):
        return obj.item()
    return obj


def run_experiment(config: ExperimentConfig, write: bool = True) -> RunRecord:
    """Run the configured experiment and persist its record and plot data."""
    base = {
        "experiment": config.experiment,
        "config_hash": config.config_hash,
        "config": config.semantic_dict(),
        "seed": config.seed,
    }
    try:
        payload, ok, rows = _RUNNERS[config.experiment](config)
        verdict = "pass" if ok else "fail"
    except Exception as exc:  # recorded, not raised: the record carries the error
        log.exception("experiment %s failed", config.experiment)
        payload, verdict, rows = {"error": f"{type(exc).__name__}: {exc}"}, "error", []
    payload = _jsonable({**base, **payload, "verdict": verdict})
    record = RunRecord(
        config.config_hash,
        datetime.now(timezone.utc).isoformat(timespec="seconds"),
        payload,
        verdict,
        rows,
    )
    if write:
        write_record(record, Path(config.output_dir))
    return record


def write_record(record: RunRecord, out_dir: Path) -> Path:
    run_dir = out_dir / record.config_hash[:12]
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / "record.json").write_text(
        json.dumps(record.to_dict(), sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    if record.plot_rows:
        with open(run_dir / "plot.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(record.plot_rows[0])
            writer.writerows(
                [_fmt(v) for v in row] for row in record.plot_rows[1:]
            )
    with open(out_dir / "index.jsonl", "a", encoding="utf-8") as fh:
        fh.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")
    return run_dir


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


def emit_report(records: list, fmt: str = "json") -> str:
    """Render records as a JSON array or as a CSV summary table."""
    dicts = [r.to_dict() if isinstance(r, RunRecord) else r for r in records]
    if fmt == "json":
        return json.dumps(dicts, sort_keys=True, indent=2) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown report format {fmt!r}")
    if not dicts:
        raise ValueError("cannot render an empty record list as csv")

    def row(d):
        p = d["payload"]
        n = p.get("n") if p.get("experiment") in ("bernstein", "newman") else None
        return (p.get("experiment", ""), n, p.get("value"), p.get("bound"), d["verdict"])

    rows = sorted((row(d) for d in dicts), key=lambda r: (r[0], -1 if r[1] is None else r[1]))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    writer.writerows([_fmt(v) for v in r] for r in rows)
    return buf.getvalue()


def load_index(out_dir: Path) -> list[dict]:
    path = Path(out_dir) / "index.jsonl"
    if not path.exists():
        return []
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines() if line]


def default_output_dir() -> str:
    return os.environ.get(OUTPUT_ENV, "runs")
