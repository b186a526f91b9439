"""Seeded instance generation for experiments and tests."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .graph import Graph, TerminalSet, load_graph

FAMILIES = ("gnp", "grid", "star", "tree", "file")
TERMINAL_RULES = ("all", "random-k", "leaves")

_RETRY_CAP = 50


class GenerationFailed(Exception):
    """No instance with at least two terminals within the retry cap."""


@dataclass(frozen=True)
class ExperimentConfig:
    family: str
    n: int = 0
    p: float | None = None
    dims: tuple[int, int] | None = None
    terminal_rule: str = "all"
    k: int = 0
    f: int = 1
    seed: int | None = None
    repetitions: int = 1
    path: str | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.terminal_rule not in TERMINAL_RULES:
            raise ValueError(f"unknown terminal rule {self.terminal_rule!r}")
        needs_seed = self.family in ("gnp", "tree") or self.terminal_rule == "random-k"
        if needs_seed and self.seed is None:
            raise ValueError("seed is mandatory for random families/rules")
        if self.terminal_rule == "random-k" and not 0 <= self.k <= self.size():
            raise ValueError(f"k={self.k} out of range for n={self.size()}")

    def size(self) -> int:
        if self.family == "grid":
            if self.dims is None:
                raise ValueError("grid family needs dims")
            return self.dims[0] * self.dims[1]
        return self.n


def default_gnp_p(n: int) -> float:
    """Keeps gnp draws connected with high probability; disconnected draws
    are still legal instances."""
    return min(1.0, 2.0 * math.log(n) / n) if n > 1 else 1.0


def _gnp_edges(n: int, p: float, rng: random.Random) -> list[tuple[int, int]]:
    return [(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < p]


def _grid_graph(rows: int, cols: int) -> Graph:
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return Graph(rows * cols, edges)


def _tree_edges(n: int, rng: random.Random) -> list[tuple[int, int]]:
    return [(rng.randrange(i), i) for i in range(1, n)]


def _pick_terminals(g: Graph, cfg: ExperimentConfig, rng: random.Random) -> TerminalSet:
    if cfg.terminal_rule == "all":
        return TerminalSet(range(g.n))
    if cfg.terminal_rule == "random-k":
        return TerminalSet(rng.sample(range(g.n), cfg.k), n=g.n)
    return TerminalSet([v for v in range(g.n) if g.degree(v) == 1], n=g.n)


def gen_instance(cfg: ExperimentConfig) -> tuple[Graph, TerminalSet]:
    """Deterministic given the config seed; random draws are retried until at
    least two terminals exist."""
    if cfg.family == "file":
        if not cfg.path:
            raise ValueError("file family needs a path")
        return load_graph(cfg.path)
    if cfg.family == "grid":
        g = _grid_graph(*cfg.dims)
        rng = random.Random(cfg.seed)
        return g, _pick_terminals(g, cfg, rng)
    if cfg.family == "star":
        n = cfg.n
        if n < 2:
            raise ValueError("star needs n >= 2")
        g = Graph(n, [(0, v) for v in range(1, n)])
        rng = random.Random(cfg.seed)
        return g, _pick_terminals(g, cfg, rng)

    rng = random.Random(cfg.seed)
    for _ in range(_RETRY_CAP):
        if cfg.family == "gnp":
            p = cfg.p if cfg.p is not None else default_gnp_p(cfg.n)
            g = Graph(cfg.n, _gnp_edges(cfg.n, p, rng))
        else:  # tree
            g = Graph(cfg.n, _tree_edges(cfg.n, rng))
        u = _pick_terminals(g, cfg, rng)
        if u.k >= 2:
            return g, u
    raise GenerationFailed(
        f"no draw with >= 2 terminals in {_RETRY_CAP} attempts ({cfg.family}, "
        f"rule {cfg.terminal_rule})"
    )
