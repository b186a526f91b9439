"""Scaling benchmark: how the per-label entry count grows with the number of
terminals. Entry counts, not raw bits, are the headline measure: the verbose
pairwise-label backend inflates bits by design, so bit sizes are reported but
flagged as backend-dependent.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from . import scheme, warmup
from .generate import ExperimentConfig, gen_instance
from .graph import TerminalSet

CSV_COLUMNS = [
    "scheme",
    "f",
    "u_size",
    "rep",
    "n",
    "m",
    "r",
    "b_size",
    "max_star_entries",
    "mean_star_entries",
    "max_serialized_bits",
    "error",
]


@dataclass(frozen=True)
class BenchResult:
    rows: list[dict]
    fitted_exponent: float
    f: int
    scheme_kind: str

    def to_dict(self) -> dict:
        return {
            "rows": self.rows,
            "fitted_exponent": self.fitted_exponent,
            "f": self.f,
            "scheme": self.scheme_kind,
        }


def fit_log_slope(points: list[tuple[float, float]]) -> float:
    """Least-squares slope of log(y) against log(x); y clamped at 1 so the
    constant-size regime fits to slope 0."""
    xs = [math.log(x) for x, _ in points]
    ys = [math.log(max(1.0, y)) for _, y in points]
    n = len(points)
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    denom = sum((x - mean_x) ** 2 for x in xs)
    if denom == 0:
        return 0.0
    return sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys)) / denom


def _one_rep(base_cfg: ExperimentConfig, u_size: int, rep: int, f: int, scheme_kind: str) -> dict:
    n = 2 * u_size
    seed = (base_cfg.seed or 0) * 1_000_003 + u_size * 1_009 + rep
    cfg = replace(
        base_cfg, n=n, terminal_rule="random-k", k=u_size, f=f, seed=seed
    )
    row = {
        "scheme": scheme_kind,
        "f": f,
        "u_size": u_size,
        "rep": rep,
        "error": "",
    }
    try:
        g, u = gen_instance(cfg)
        if u.k != u_size:
            u = TerminalSet(list(u.terminals)[:u_size])
        if scheme_kind == "main":
            stats = scheme.label_stats(scheme.build_labels(g, u, f))
        else:
            stats = warmup.warmup_label_stats(warmup.build_warmup_labels(g, u, f))
        row.update(
            n=g.n,
            m=g.m,
            r=stats.get("r", 0),
            b_size=stats.get("b_size", 0),
            max_star_entries=stats["max_star_entries"],
            mean_star_entries=stats["mean_star_entries"],
            max_serialized_bits=stats["max_serialized_bits"],
        )
    except Exception as exc:  # per-row failures are marked, not fatal
        row.update(
            n=n, m=0, r=0, b_size=0,
            max_star_entries=0, mean_star_entries=0.0, max_serialized_bits=0,
            error=f"{type(exc).__name__}: {exc}",
        )
    return row


def run_scaling_bench(
    base_cfg: ExperimentConfig,
    u_sizes: list[int],
    f: int,
    reps: int,
    scheme_kind: str = "main",
    threads: int = 1,
) -> BenchResult:
    if sorted(u_sizes) != list(u_sizes):
        raise ValueError("u_sizes must be ascending")
    jobs = [(u_size, rep) for u_size in u_sizes for rep in range(reps)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(
                pool.map(lambda jr: _one_rep(base_cfg, jr[0], jr[1], f, scheme_kind), jobs)
            )
    else:
        rows = [_one_rep(base_cfg, u_size, rep, f, scheme_kind) for u_size, rep in jobs]
    rows.sort(key=lambda row: (row["u_size"], row["rep"]))
    points = [
        (row["u_size"], row["max_star_entries"]) for row in rows if not row["error"]
    ]
    exponent = fit_log_slope(points) if len(points) >= 2 else float("nan")
    return BenchResult(rows, exponent, f, scheme_kind)


def bench_to_csv(result: BenchResult) -> str:
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=CSV_COLUMNS)
    writer.writeheader()
    for row in result.rows:
        writer.writerow({col: row.get(col, "") for col in CSV_COLUMNS})
    return out.getvalue()


def bench_schema() -> dict:
    from importlib.resources import files

    return json.loads(files("steinerlabels.data").joinpath("bench_schema.json").read_text())
