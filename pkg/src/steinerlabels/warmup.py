"""Recursive warm-up labeling scheme, used as a comparison baseline and an
independent correctness cross-check of the main scheme.

Level-k labels for an instance H: take a minimal Steiner forest T of H, let B
be the vertices of T-degree >= r_k (threshold below); every vertex stores its
pairwise/reach labels, its own single-fault cut bit, a recursively built
level-(k-1) label for H - {y} for each y in B, and, if it is low-degree, the
pairwise/reach labels of its T-neighbours. Queries peel one high-degree fault
per level and finish with pairwise checks among the stored tree neighbours.

Label sizes follow the square-root recurrence and are asymptotically worse
than the main scheme's (exponent 1 - 1/2^(f-1) versus 1 - 1/f).
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from itertools import combinations

from .bits import MalformedBits, read_bytes, read_uvarint, write_bytes, write_uvarint
from .decomp import minimal_steiner_forest
from .graph import Graph, TerminalSet, is_steiner_cut
from .scheme import _ceil_pow_frac
from .stlabels import (
    ReachLabel,
    StLabel,
    build_reach_labels,
    build_st_labels,
    query_reach,
    query_st,
    reach_label_from_payload,
    st_label_from_payload,
)

_MAGIC = b"SWU1"

DEFAULT_BUDGET = 10**6


class RecursionBudgetExceeded(Exception):
    """The recursive build would exceed the configured sub-instance cap."""


class LabelMixError(Exception):
    """Queried warm-up labels come from different builds or levels."""


@dataclass(frozen=True)
class WarmupLabel:
    owner: int
    level: int
    n: int
    m: int
    u_size: int
    bad: tuple[int, ...]
    self_cut_bit: bool
    st_self: StLabel | None = None
    reach_self: ReachLabel | None = None
    neighbor_stars: tuple[tuple[StLabel, ReachLabel], ...] | None = None
    children: dict[int, "WarmupLabel"] | None = None

    def fingerprint(self) -> tuple:
        return (self.level, self.n, self.m, self.u_size, self.bad)


def warmup_threshold(k: int, u_size: int) -> int:
    """r_k = max(3, ceil(u_size^(1 - 1/2^(k-1)))), the closed form of the
    label-length recurrence with a one-bit base case."""
    if k < 2:
        raise ValueError("threshold defined for levels k >= 2")
    if u_size < 1:
        raise ValueError("u_size must be >= 1")
    den = 2 ** (k - 1)
    return max(3, _ceil_pow_frac(u_size, den - 1, den))


def build_warmup_labels(
    g: Graph, u: TerminalSet, f: int, budget: int = DEFAULT_BUDGET
) -> dict[int, WarmupLabel]:
    if f < 1:
        raise ValueError("f must be >= 1")
    counter = {"instances": 0}
    active = frozenset(range(g.n))
    return _build_level(g, active, set(u.terminals), f, budget, counter)


def _build_level(
    h: Graph,
    active: frozenset[int],
    terminals: set[int],
    k: int,
    budget: int,
    counter: dict[str, int],
) -> dict[int, WarmupLabel]:
    counter["instances"] += 1
    if counter["instances"] > budget:
        raise RecursionBudgetExceeded(
            f"more than {budget} recursive sub-instances required"
        )
    live_terms = TerminalSet(sorted(terminals & active))
    bits = {
        x: live_terms.k >= 2 and is_steiner_cut(h, live_terms, (x,))
        for x in sorted(active)
    }
    if k == 1:
        return {
            x: WarmupLabel(x, 1, h.n, h.m, live_terms.k, (), bits[x])
            for x in sorted(active)
        }

    forest = minimal_steiner_forest(h, live_terms)
    r_k = warmup_threshold(k, max(1, live_terms.k))
    bad = tuple(v for v in forest.vertices() if forest.degree(v) >= r_k)

    st = build_st_labels(h, k)
    reach = build_reach_labels(h, live_terms, k)

    child_maps: dict[int, dict[int, WarmupLabel]] = {}
    for y in bad:
        sub_edges = [e for e in h.edges if y not in e]
        child_maps[y] = _build_level(
            Graph(h.n, sub_edges), active - {y}, terminals, k - 1, budget, counter
        )

    bad_set = set(bad)
    labels = {}
    for x in sorted(active):
        children = {y: child_maps[y][x] for y in bad if y != x}
        neighbors = None
        if x not in bad_set:
            neighbors = tuple((st[w], reach[w]) for w in forest.neighbors(x))
        labels[x] = WarmupLabel(
            x,
            k,
            h.n,
            h.m,
            live_terms.k,
            bad,
            bits[x],
            st_self=st[x],
            reach_self=reach[x],
            neighbor_stars=neighbors,
            children=children,
        )
    return labels


def query_warmup(labels_of_f: list[WarmupLabel]) -> bool:
    """Is the fault set carried by these labels a Steiner cut? Answered from
    the labels alone."""
    if not labels_of_f:
        raise ValueError("need at least one label")
    owners = [lab.owner for lab in labels_of_f]
    if len(set(owners)) != len(owners):
        raise ValueError("duplicate fault labels")
    fp = labels_of_f[0].fingerprint()
    if any(lab.fingerprint() != fp for lab in labels_of_f[1:]):
        raise LabelMixError("labels disagree on instance fingerprint")
    level = labels_of_f[0].level
    if len(labels_of_f) > level:
        raise ValueError(f"{len(labels_of_f)} faults exceed level budget {level}")

    if len(labels_of_f) == 1:
        return labels_of_f[0].self_cut_bit

    bad = labels_of_f[0].bad
    fault_set = set(owners)
    high = [y for y in bad if y in fault_set]
    if high:
        y = min(high)
        sub = [lab.children[y] for lab in labels_of_f if lab.owner != y]
        return query_warmup(sub)

    # all-low-deg: pairwise checks among stored tree neighbours
    stored: dict[int, tuple[StLabel, ReachLabel]] = {}
    for lab in labels_of_f:
        for st, reach in lab.neighbor_stars or ():
            if st.vertex_id not in fault_set:
                stored.setdefault(st.vertex_id, (st, reach))
    fault_st = [lab.st_self for lab in labels_of_f]
    fault_reach = [lab.reach_self for lab in labels_of_f]
    reach_ok = [v for v in sorted(stored) if query_reach(stored[v][1], fault_reach)]
    for w, w2 in combinations(reach_ok, 2):
        if not query_st(fault_st, stored[w][0], stored[w2][0]):
            return True
    return False


def warmup_entry_count(label: WarmupLabel) -> int:
    """Stored (pairwise, reach) label pairs, counted recursively; the unit in
    which the warm-up is compared against the main scheme."""
    if label.level == 1:
        return 0
    total = 1 + len(label.neighbor_stars or ())
    for child in (label.children or {}).values():
        total += warmup_entry_count(child)
    return total


def warmup_label_stats(labels: dict[int, WarmupLabel]) -> dict:
    counts = [warmup_entry_count(lab) for lab in labels.values()]
    sizes = [8 * len(serialize_warmup_label(lab)) for lab in labels.values()]
    count = len(labels) or 1
    return {
        "labels": len(labels),
        "max_star_entries": max(counts, default=0),
        "mean_star_entries": sum(counts) / count,
        "max_serialized_bits": max(sizes, default=0),
    }


# ---- serialization (one crc over the outer record; children are nested byte
# fields of the same layout without their own trailer) ----

def _write_record(out: bytearray, label: WarmupLabel) -> None:
    out.extend(_MAGIC)
    for value in (label.owner, label.level, label.n, label.m, label.u_size):
        write_uvarint(out, value)
    out.append(1 if label.self_cut_bit else 0)
    if label.level == 1:
        return
    write_uvarint(out, len(label.bad))
    for v in label.bad:
        write_uvarint(out, v)
    write_bytes(out, label.st_self.payload)
    write_bytes(out, label.reach_self.payload)
    if label.neighbor_stars is None:
        out.append(0)
    else:
        out.append(1)
        write_uvarint(out, len(label.neighbor_stars))
        for st, reach in label.neighbor_stars:
            write_bytes(out, st.payload)
            write_bytes(out, reach.payload)
    children = label.children or {}
    write_uvarint(out, len(children))
    for y in sorted(children):
        write_uvarint(out, y)
        nested = bytearray()
        _write_record(nested, children[y])
        write_bytes(out, bytes(nested))


def serialize_warmup_label(label: WarmupLabel) -> bytes:
    out = bytearray()
    _write_record(out, label)
    out.extend(zlib.crc32(out).to_bytes(4, "little"))
    return bytes(out)


def _read_record(buf: bytes) -> WarmupLabel:
    if buf[:4] != _MAGIC:
        raise MalformedBits("bad warm-up label magic")
    pos = 4
    vals = []
    for _ in range(5):
        v, pos = read_uvarint(buf, pos)
        vals.append(v)
    owner, level, n, m, u_size = vals
    if level < 1 or owner >= n:
        raise MalformedBits("bad warm-up header")
    bit_byte = buf[pos]
    pos += 1
    if bit_byte not in (0, 1):
        raise MalformedBits("cut bit byte not 0/1")
    if level == 1:
        if pos != len(buf):
            raise MalformedBits("trailing bytes in level-1 record")
        return WarmupLabel(owner, 1, n, m, u_size, (), bool(bit_byte))
    bad_count, pos = read_uvarint(buf, pos)
    bad = []
    for _ in range(bad_count):
        v, pos = read_uvarint(buf, pos)
        bad.append(v)
    st_payload, pos = read_bytes(buf, pos)
    reach_payload, pos = read_bytes(buf, pos)
    flag = buf[pos]
    pos += 1
    neighbors = None
    if flag == 1:
        ncount, pos = read_uvarint(buf, pos)
        pairs = []
        for _ in range(ncount):
            sp, pos = read_bytes(buf, pos)
            rp, pos = read_bytes(buf, pos)
            pairs.append((st_label_from_payload(sp), reach_label_from_payload(rp)))
        neighbors = tuple(pairs)
    elif flag != 0:
        raise MalformedBits("bad neighbour flag")
    child_count, pos = read_uvarint(buf, pos)
    children = {}
    for _ in range(child_count):
        y, pos = read_uvarint(buf, pos)
        nested, pos = read_bytes(buf, pos)
        child = _read_record(nested)
        if child.level != level - 1:
            raise MalformedBits("child level mismatch")
        children[y] = child
    if pos != len(buf):
        raise MalformedBits("trailing bytes in warm-up record")
    return WarmupLabel(
        owner,
        level,
        n,
        m,
        u_size,
        tuple(bad),
        bool(bit_byte),
        st_self=st_label_from_payload(st_payload),
        reach_self=reach_label_from_payload(reach_payload),
        neighbor_stars=neighbors,
        children=children,
    )


def deserialize_warmup_label(blob: bytes) -> WarmupLabel:
    if len(blob) < 8:
        raise MalformedBits("warm-up record too short")
    body, crc = blob[:-4], blob[-4:]
    if zlib.crc32(body) != int.from_bytes(crc, "little"):
        raise MalformedBits("crc mismatch")
    return _read_record(body)
