"""Ground-truth verification: compare a scheme's answers against brute force
over every fault set (or a seeded uniform sample when enumeration is too big).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Iterable, Iterator

from . import scheme, warmup
from .graph import Graph, TerminalSet, is_steiner_cut

SCHEME_KINDS = ("main", "warmup")


class BudgetExceeded(Exception):
    """Exhaustive enumeration was requested but exceeds the query budget."""


@dataclass(frozen=True)
class VerifyReport:
    instance: dict
    scheme_kind: str
    mode: str
    seed: int | None
    queries_checked: int
    mismatches: tuple[tuple[tuple[int, ...], bool, bool], ...]

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def to_dict(self) -> dict:
        return {
            "instance": self.instance,
            "scheme": self.scheme_kind,
            "mode": self.mode,
            "seed": self.seed,
            "queries_checked": self.queries_checked,
            "mismatches": [
                {"faults": list(fs), "scheme": got, "oracle": want}
                for fs, got, want in self.mismatches
            ],
            "pass": self.passed,
        }


def count_fault_sets(n: int, f: int) -> int:
    return sum(comb(n, j) for j in range(1, f + 1))


def iter_fault_sets(n: int, f: int) -> Iterator[tuple[int, ...]]:
    for size in range(1, f + 1):
        yield from combinations(range(n), size)


def sample_fault_sets(n: int, f: int, count: int, seed: int) -> list[tuple[int, ...]]:
    """Uniform over all fault sets of size 1..f: size drawn with weight C(n,j)."""
    rng = random.Random(seed)
    sizes = list(range(1, f + 1))
    weights = [comb(n, j) for j in sizes]
    out = []
    for _ in range(count):
        size = rng.choices(sizes, weights=weights)[0]
        out.append(tuple(sorted(rng.sample(range(n), size))))
    return out


def _build_and_query(g: Graph, u: TerminalSet, f: int, scheme_kind: str):
    if scheme_kind == "main":
        labels = scheme.build_labels(g, u, f)
        return lambda fs: scheme.query([labels[v] for v in fs]).verdict
    if scheme_kind == "warmup":
        labels = warmup.build_warmup_labels(g, u, f)
        return lambda fs: warmup.query_warmup([labels[v] for v in fs])
    raise ValueError(f"unknown scheme kind {scheme_kind!r}")


def exhaustive_verify(
    g: Graph,
    u: TerminalSet,
    f: int,
    scheme_kind: str = "main",
    exhaustive_budget: int = 500_000,
    sample_size: int = 10_000,
    seed: int = 0,
    mode: str = "auto",
) -> VerifyReport:
    """Build labels once, then compare every (or a sampled set of) fault set's
    verdict against the brute-force oracle. Deterministic for a fixed seed."""
    total = count_fault_sets(g.n, f)
    if mode == "exhaustive" and total > exhaustive_budget:
        raise BudgetExceeded(f"{total} fault sets exceed budget {exhaustive_budget}")
    if mode not in ("auto", "exhaustive", "sample"):
        raise ValueError(f"unknown mode {mode!r}")
    run_exhaustive = mode == "exhaustive" or (mode == "auto" and total <= exhaustive_budget)

    answer = _build_and_query(g, u, f, scheme_kind)
    if run_exhaustive:
        fault_sets: Iterable[tuple[int, ...]] = iter_fault_sets(g.n, f)
        used_mode, used_seed = "exhaustive", None
    else:
        fault_sets = sorted(set(sample_fault_sets(g.n, f, sample_size, seed)))
        used_mode, used_seed = "sample", seed

    mismatches = []
    checked = 0
    for fs in fault_sets:
        checked += 1
        got = answer(fs)
        want = is_steiner_cut(g, u, fs)
        if got != want:
            mismatches.append((fs, got, want))
    return VerifyReport(
        instance={"n": g.n, "m": g.m, "u_size": u.k, "f": f},
        scheme_kind=scheme_kind,
        mode=used_mode,
        seed=used_seed,
        queries_checked=checked,
        mismatches=tuple(mismatches),
    )


def flip_bit(blob: bytes, bit_index: int) -> bytes:
    """Flip one bit of a serialized label (mutation testing helper)."""
    byte_index, offset = divmod(bit_index, 8)
    mutated = bytearray(blob)
    mutated[byte_index] ^= 1 << offset
    return bytes(mutated)
