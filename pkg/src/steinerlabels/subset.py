"""Subset labels: decide from O(f log n) bits whether a fixed vertex set K
separates the surviving terminals, given only the ids of the failed set F.

The label summarises how terminals distribute over the components of g - K.
Writing U_1..U_p for the terminal groups sorted by size ascending, the label
takes exactly one of three forms:

  ALWAYS_YES  some split point q has > f terminals on each side, so at least
              two groups survive any F with |F| <= f;
  BIG_LAST    the largest group has > f terminals (it always survives) and
              the others, at most f terminals in total, are stored explicitly;
  SMALL_ALL   every group has <= f terminals and all are stored; the case
              analysis guarantees at most 3f terminals in total.

K separates the surviving terminals iff at least two of the sets U_i - F are
non-empty.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from .bits import BitReader, Bits, BitWriter, MalformedBits, width_for
from .graph import Graph, TerminalSet, components

ALWAYS_YES = "always_yes"
BIG_LAST = "big_last"
SMALL_ALL = "small_all"

_TAG_CODES = {ALWAYS_YES: 0, BIG_LAST: 1, SMALL_ALL: 2}
_TAG_NAMES = {v: k for k, v in _TAG_CODES.items()}


class InternalBoundViolated(Exception):
    """The <= f / <= 3f totals of the case analysis failed; indicates a bug."""


@dataclass(frozen=True)
class SubsetLabel:
    kind: str
    groups: tuple[tuple[int, ...], ...]
    n: int
    f: int

    def __post_init__(self):
        if self.kind not in _TAG_CODES:
            raise ValueError(f"unknown subset label kind {self.kind!r}")
        total = sum(len(grp) for grp in self.groups)
        if self.kind == ALWAYS_YES and self.groups:
            raise ValueError("always-yes label stores no groups")
        if self.kind == BIG_LAST and total > self.f:
            raise InternalBoundViolated(f"big-last stores {total} > f={self.f} terminals")
        if self.kind == SMALL_ALL and total > 3 * self.f:
            raise InternalBoundViolated(f"small-all stores {total} > 3f={3 * self.f} terminals")
        if any(not grp for grp in self.groups):
            raise ValueError("empty terminal group")


def _sorted_groups(groups: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    # size ascending, ties by smallest member id
    canon = [tuple(sorted(grp)) for grp in groups]
    canon.sort(key=lambda grp: (len(grp), grp))
    return tuple(canon)


def terminal_groups(g: Graph, u: TerminalSet, k_set: Iterable[int]) -> tuple[tuple[int, ...], ...]:
    """Terminal-bearing components of g - K as sorted terminal groups."""
    kk = set(k_set)
    terms = set(u.terminals) - kk
    raw = []
    for comp in components(g, kk):
        grp = [v for v in comp if v in terms]
        if grp:
            raw.append(grp)
    return _sorted_groups(raw)


def build_subset_label(g: Graph, u: TerminalSet, k_set: Iterable[int], f: int) -> SubsetLabel:
    if f < 1:
        raise ValueError("f must be >= 1")
    groups = terminal_groups(g, u, k_set)
    sizes = [len(grp) for grp in groups]
    p = len(groups)
    prefix = list(itertools.accumulate(sizes, initial=0))
    total = prefix[-1]
    for q in range(1, p):
        if prefix[q] > f and total - prefix[q] > f:
            return SubsetLabel(ALWAYS_YES, (), g.n, f)
    if p and sizes[-1] > f:
        return SubsetLabel(BIG_LAST, groups[:-1], g.n, f)
    return SubsetLabel(SMALL_ALL, groups, g.n, f)


def query_subset_label(label: SubsetLabel, fault_ids: Iterable[int]) -> bool:
    """Does K separate the terminals surviving F? Pure function of the label."""
    faults = set(fault_ids)
    if label.kind == ALWAYS_YES:
        return True
    survivors = sum(1 for grp in label.groups if any(t not in faults for t in grp))
    if label.kind == BIG_LAST:
        # the unstored big group always survives since it has > f >= |F| terminals
        return survivors >= 1
    return survivors >= 2


# ---- bit-level serialization ----
# 2 tag bits; then per group a size field (stored sizes are always in [1, f])
# followed by the member ids at ceil(log2 n) bits each. Group list ends when
# the bits run out, so no count field is needed; n and f travel beside the
# bit string.

def _field_widths(n: int, f: int) -> tuple[int, int]:
    return width_for(max(0, n - 1)), width_for(f)


def serialize_subset_label(label: SubsetLabel) -> Bits:
    id_w, size_w = _field_widths(label.n, label.f)
    writer = BitWriter()
    writer.write(_TAG_CODES[label.kind], 2)
    for grp in label.groups:
        writer.write(len(grp), size_w)
        for t in grp:
            writer.write(t, id_w)
    return writer.getvalue()


def deserialize_subset_label(bits: Bits, n: int, f: int) -> SubsetLabel:
    id_w, size_w = _field_widths(n, f)
    reader = BitReader(bits)
    tag = reader.read(2)
    if tag not in _TAG_NAMES:
        raise MalformedBits(f"unknown subset label tag {tag}")
    groups = []
    while reader.remaining:
        size = reader.read(size_w)
        if size == 0:
            raise MalformedBits("zero-size terminal group")
        grp = []
        for _ in range(size):
            t = reader.read(id_w)
            if t >= n:
                raise MalformedBits(f"terminal id {t} out of range")
            grp.append(t)
        groups.append(tuple(grp))
    reader.expect_end()
    if _TAG_NAMES[tag] == ALWAYS_YES and groups:
        raise MalformedBits("always-yes label with groups")
    try:
        label = SubsetLabel(_TAG_NAMES[tag], tuple(groups), n, f)
    except (InternalBoundViolated, ValueError) as exc:
        raise MalformedBits(str(exc)) from None
    if label.groups != _sorted_groups(label.groups):
        raise MalformedBits("groups not in canonical order")
    return label


# ---- the trivial O(f^2 log n) variant ----

@dataclass(frozen=True)
class TrivialSubsetLabel:
    """Stores up to f+1 groups of up to f+1 terminals each.

    If more than f+1 groups exist, any F with |F| <= f leaves at least two of
    them non-empty, so the answer is always yes; `extra_groups` records that.
    """

    groups: tuple[tuple[int, ...], ...]
    extra_groups: bool
    n: int
    f: int


def build_trivial_subset_label(
    g: Graph, u: TerminalSet, k_set: Iterable[int], f: int
) -> TrivialSubsetLabel:
    if f < 1:
        raise ValueError("f must be >= 1")
    groups = terminal_groups(g, u, k_set)
    chosen = groups[: f + 1]
    trimmed = tuple(grp[: f + 1] for grp in chosen)
    return TrivialSubsetLabel(trimmed, len(groups) > f + 1, g.n, f)


def query_trivial_subset_label(label: TrivialSubsetLabel, fault_ids: Iterable[int]) -> bool:
    if label.extra_groups:
        return True
    faults = set(fault_ids)
    survivors = 0
    for grp in label.groups:
        # a truncated group stores f+1 > |F| ids, so survival is reported exactly
        if any(t not in faults for t in grp):
            survivors += 1
    return survivors >= 2
