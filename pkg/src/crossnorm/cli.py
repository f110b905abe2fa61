"""
Seeded verification suites from the command line.

    python -m crossnorm --suite sandwich --dims 2x2,3x3 --p 1,2,inf --trials 20 --seed 1

Every suite draws its random inputs from a generator keyed by
``(seed, suite, trial)`` and writes a JSON (or CSV) report whose content
depends only on the configuration.  The exit status is 0 when no check of
a proved inequality is Violated, 1 otherwise, 2 on a usage error and 3 when
the report cannot be written.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import io
import json
import math
import os
import sys
from collections import Counter
from dataclasses import asdict, dataclass

import numpy as np

from .crossnorms import CrossnormTag
from .estimates import Budget
from .exceptions import CapabilityError
from .spaces import LpSpace, exponent_label, make_rng, parse_exponent
from .tensor_core import OperatorTensor, Tensor
from .verify import (
    DEFAULT_TOL,
    CheckRecord,
    Verdict,
    check_corollary_44,
    check_gamma,
    check_prop_32_dual_bound,
    check_question4,
    check_remark_chain,
    check_sandwich,
    check_theorem_41,
    check_uniform_identity,
)

__all__ = ["SuiteConfig", "parse_args", "run_suite", "build_report", "main", "SUITES"]

SUITES = (
    "sandwich",
    "uniform-identity",
    "theorem41",
    "corollary44",
    "remark-chain",
    "gamma",
    "prop32",
    "question4",
)
MAX_DIM = 6
EXIT_OK, EXIT_VIOLATED, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

# defaults used when a flag is left out
_DEFAULT_DIMS = ((2, 2), (3, 3))
_SANDWICH_P = (1.0, 1.5, 2.0, 3.0, "inf")
_DEFAULT_TRIALS = 10


@dataclass(frozen=True)
class SuiteConfig:
    suite: str = "all"
    dims: tuple = _DEFAULT_DIMS
    p_values: tuple | None = None  # None: each suite's default
    tags: tuple | None = None  # None: each suite's default
    trials: int = _DEFAULT_TRIALS
    seed: int = 0
    restarts: int = 32
    max_iters: int = 200
    tol: float = DEFAULT_TOL
    out_path: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.suite not in SUITES + ("all",):
            raise ValueError(f"unknown suite {self.suite!r}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.restarts < 0 or self.max_iters < 0:
            raise ValueError("restarts and max-iters must be nonnegative")
        if self.format not in ("json", "csv"):
            raise ValueError(f"unknown format {self.format!r}")
        for d in self.dims:
            if len(d) not in (2, 4) or any(k < 1 or k > MAX_DIM for k in d):
                raise ValueError(f"dims must have 2 or 4 entries in 1..{MAX_DIM}, got {d}")

    @property
    def budget(self) -> Budget:
        return Budget(restarts=self.restarts, max_iters=self.max_iters, seed=self.seed)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["dims"] = ["x".join(str(k) for k in t) for t in self.dims]
        d["p_values"] = None if self.p_values is None else [exponent_label(p) for p in self.p_values]
        d["tags"] = None if self.tags is None else list(self.tags)
        d.pop("out_path")
        return d


# -- argument parsing --------------------------------------------------------------


def _parse_dims(text: str) -> tuple:
    out = []
    for item in text.split(","):
        item = item.strip().lower()
        if not item:
            continue
        try:
            out.append(tuple(int(k) for k in item.split("x")))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad dims {item!r}; use e.g. 2x3 or 2x2x3x3")
        if len(out[-1]) not in (2, 4):
            raise argparse.ArgumentTypeError(f"bad dims {item!r}; use 2 or 4 sizes")
    if not out:
        raise argparse.ArgumentTypeError("empty dims list")
    return tuple(out)


def _parse_p(text: str) -> tuple:
    try:
        return tuple(parse_exponent(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _parse_tags(text: str) -> tuple:
    tags = tuple(t.strip() for t in text.split(",") if t.strip())
    for t in tags:
        try:
            CrossnormTag.parse(t, p=2.0)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc))
    return tags


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="crossnorm",
        description="Run seeded, direction-aware verification suites for tensor crossnorms.",
    )
    ap.add_argument("--suite", required=True, choices=SUITES + ("all",))
    ap.add_argument("--dims", type=_parse_dims, default=_DEFAULT_DIMS, help="comma list of NxM or NXxNYxNVxNW (default 2x2,3x3)")
    ap.add_argument("--p", dest="p_values", type=_parse_p, default=None, help="comma list of exponents, 'inf' allowed")
    ap.add_argument("--tags", type=_parse_tags, default=None,
                    help="comma list: injective, projective, hilbertian, entrywise (exponent from --p) or entrywise-<p>")
    ap.add_argument("--trials", type=int, default=_DEFAULT_TRIALS)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--restarts", type=int, default=32)
    ap.add_argument("--max-iters", type=int, default=200)
    ap.add_argument("--tol", type=float, default=DEFAULT_TOL)
    ap.add_argument("--out", dest="out_path", default=None, help="report path (default: standard output)")
    ap.add_argument("--format", choices=("json", "csv"), default="json")
    return ap


def parse_args(argv=None) -> SuiteConfig:
    """Parse flags into a :class:`SuiteConfig`; exits with status 2 on bad usage."""
    ap = _parser()
    ns = ap.parse_args(argv)
    try:
        return SuiteConfig(**vars(ns))
    except ValueError as exc:
        ap.error(str(exc))


# -- suites ----------------------------------------------------------------------


def _spaces(d: tuple, p) -> tuple:
    dims = d if len(d) == 4 else (d[0], d[1], d[0], d[1])
    return tuple(LpSpace(k, p) for k in dims)


def _tags_for(config: SuiteConfig, p, default: tuple) -> list:
    names = config.tags if config.tags is not None else default
    return [CrossnormTag.parse(t, p=p) for t in names]


def _p_values(config: SuiteConfig, default) -> tuple:
    return tuple(parse_exponent(p) for p in (config.p_values if config.p_values is not None else default))


def _random_operator_tensor(rng, spaces) -> OperatorTensor:
    X, Y, V, W = spaces
    J = int(rng.integers(1, 4))
    return OperatorTensor(
        [(rng.standard_normal((V.dim, X.dim)), rng.standard_normal((W.dim, Y.dim))) for _ in range(J)], X, Y, V, W
    )


def _random_pairing(rng, rows: int, cols: int) -> np.ndarray:
    rank = int(rng.integers(1, 3))
    return sum(np.outer(rng.standard_normal(rows), rng.standard_normal(cols)) for _ in range(rank))


def _jobs(config: SuiteConfig, suite: str) -> list:
    """The list of ``(trial, thunk)`` for one suite; thunks return records."""
    budget = config.budget
    tol = config.tol
    suite_key = SUITES.index(suite)
    jobs = []
    if suite == "gamma":
        for t, (d, p) in enumerate((d, p) for d in config.dims for p in _p_values(config, (2.0,))):
            X, Y = LpSpace(d[0], p), LpSpace(d[1], p)
            jobs.append((t, lambda X=X, Y=Y, t=t: [check_gamma(X, Y, budget, tol, t)]))
        return jobs
    default_p = _SANDWICH_P if suite == "sandwich" else (2.0,)
    p_values = _p_values(config, default_p)
    default_tags = ("entrywise",) if suite == "sandwich" else ("hilbertian",)
    for t in range(config.trials):
        rng = make_rng(config.seed, suite_key, t)
        d = config.dims[int(rng.integers(len(config.dims)))]
        p = p_values[int(rng.integers(len(p_values)))]
        spaces = _spaces(d, p)
        X, Y, V, W = spaces
        tags = [tag for tag in _tags_for(config, p, default_tags) if tag.attachable(X, Y) and tag.attachable(V, W)]
        b = budget
        if suite == "sandwich":
            F = Tensor(rng.standard_normal((X.dim, Y.dim)), X, Y)
            thunk = lambda F=F, tags=tags, t=t: [check_sandwich(F, tag, b, tol, t) for tag in tags]
        elif suite == "uniform-identity":
            A, B = rng.standard_normal((V.dim, X.dim)), rng.standard_normal((W.dim, Y.dim))
            thunk = lambda A=A, B=B, tags=tags, s=spaces, t=t: [check_uniform_identity(A, B, tag, *s, b, tol, t) for tag in tags]
        elif suite == "prop32":
            phi, eta = _random_pairing(rng, V.dim, X.dim), _random_pairing(rng, W.dim, Y.dim)
            thunk = lambda phi=phi, eta=eta, tags=tags, s=spaces, t=t: [
                check_prop_32_dual_bound(phi, eta, tag, *s, b, tol, t) for tag in tags
            ]
        else:
            L = _random_operator_tensor(rng, spaces)
            check = {
                "theorem41": check_theorem_41,
                "corollary44": check_corollary_44,
                "remark-chain": check_remark_chain,
                "question4": check_question4,
            }[suite]
            thunk = lambda L=L, tags=tags, check=check, t=t: [check(L, tag, b, tol, t) for tag in tags]
        jobs.append((t, thunk))
    return jobs


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("CROSSNORM_THREADS", "1")))
    except ValueError:
        return 1


def run_suite(config: SuiteConfig) -> list[tuple[str, int, CheckRecord]]:
    """All records of the configured suite(s), ordered by ``(suite, trial)``."""
    suites = SUITES if config.suite == "all" else (config.suite,)
    out = []
    with concurrent.futures.ThreadPoolExecutor(max_workers=_workers()) as pool:
        for suite in suites:
            jobs = _jobs(config, suite)
            # map preserves submission order whatever the completion order
            for (t, _), records in zip(jobs, pool.map(lambda job: job[1](), jobs)):
                out.extend((suite, t, r) for r in records)
    return out


def _summary(records) -> dict:
    by_suite = {}
    for suite, _, r in records:
        s = by_suite.setdefault(suite, {"counts": Counter(), "worst_slack": math.inf, "violated_proved": 0})
        s["counts"][r.verdict.value] += 1
        if r.slacks:
            s["worst_slack"] = min(s["worst_slack"], min(r.slacks))
        if r.paper_proved and r.verdict is Verdict.VIOLATED:
            s["violated_proved"] += 1
    return {
        k: {
            "counts": {v.value: s["counts"].get(v.value, 0) for v in Verdict},
            "worst_slack": None if math.isinf(s["worst_slack"]) else s["worst_slack"],
            "violated_proved": s["violated_proved"],
        }
        for k, s in by_suite.items()
    }


def build_report(config: SuiteConfig, records) -> dict:
    return {
        "config": config.to_dict(),
        "records": [{"suite": s, "trial": t, **r.to_dict()} for s, t, r in records],
        "summary": _summary(records),
    }


def _csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["suite", "trial", "name", "tag", "spaces", "verdict", "paper_proved", "tolerance", "seed", "min_slack", "sides"])
    for r in report["records"]:
        sides = ";".join(f"{s['label']}={s['value']!r}[{s['direction']}]" for s in r["sides"])
        w.writerow([
            r["suite"], r["trial"], r["name"], r["tag"], " ".join(r["spaces"]), r["verdict"], r["paper_proved"],
            r["tolerance"], r["seed"], min(r["slacks"]) if r["slacks"] else "", sides,
        ])
    return buf.getvalue()


def exit_status(records) -> int:
    return EXIT_VIOLATED if any(r.paper_proved and r.verdict is Verdict.VIOLATED for _, _, r in records) else EXIT_OK


def main(argv=None) -> int:
    config = parse_args(argv)
    try:
        records = run_suite(config)
    except CapabilityError as exc:
        print(f"crossnorm: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = build_report(config, records)
    text = json.dumps(report, indent=2) + "\n" if config.format == "json" else _csv(report)
    try:
        if config.out_path is None:
            sys.stdout.write(text)
        else:
            with open(config.out_path, "w", encoding="utf-8") as fh:
                fh.write(text)
    except OSError as exc:
        print(f"crossnorm: cannot write report: {exc}", file=sys.stderr)
        return EXIT_IO
    for suite, s in report["summary"].items():
        counts = ", ".join(f"{k}={v}" for k, v in s["counts"].items() if v)
        print(f"{suite}: {counts}; worst slack {s['worst_slack']}", file=sys.stderr)
    return exit_status(records)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
