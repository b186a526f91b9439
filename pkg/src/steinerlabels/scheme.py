"""The main labeling scheme: per-vertex labels from which any fault set
F (|F| <= f) can be classified as Steiner-cut or not, using only the labels
of F.

Construction, for f >= 2 and at least two terminals: decompose the graph with
degree threshold r = ceil(|U|^(1-1/f)) + 2 into a Steiner forest T and bad set
B; pick for every vertex x a representative terminal u_x reachable in g - B;
then each label stores the star labels of x, u_x and all of B, the subset
label for the empty set, and either the star labels of x's T-B neighbours
(x outside B) or the subset labels of every K inside B containing x with
|K| <= f (x in B). For f = 1 a label is the single bit "is {x} a Steiner cut";
the same trivial labels are used when fewer than two terminals exist.

The query mirrors the construction: check the subset label of K = F-and-B,
collect the stored star labels S, keep the members W that still reach a
terminal, and report a cut iff two members of W are disconnected.
"""

from __future__ import annotations

import itertools
import zlib
from dataclasses import dataclass
from typing import Iterable

from .bits import (
    MalformedBits,
    read_bits_field,
    read_bytes,
    read_uvarint,
    write_bits_field,
    write_bytes,
    write_uvarint,
)
from .decomp import decompose
from .graph import Graph, TerminalSet, component_ids, is_steiner_cut
from .stlabels import (
    StarLabel,
    build_reach_labels,
    build_st_labels,
    query_reach,
    query_st,
    reach_label_from_payload,
    st_label_from_payload,
)
from .subset import SubsetLabel, build_subset_label, deserialize_subset_label, query_subset_label, serialize_subset_label

KIND_BIT = "bit"
KIND_FULL = "full"

_MAGIC = b"SLB1"


class LabelMixError(Exception):
    """Queried labels disagree on build metadata or kind."""


@dataclass(frozen=True)
class SchemeLabel:
    owner: int
    n: int
    f: int
    r: int
    u_size: int
    kind: str
    bit: bool | None = None
    star_self: StarLabel | None = None
    star_ux: StarLabel | None = None
    star_b: tuple[StarLabel, ...] = ()
    hat_empty: SubsetLabel | None = None
    low_deg_neighbors: tuple[StarLabel, ...] | None = None
    hat_map: dict[tuple[int, ...], SubsetLabel] | None = None

    def __post_init__(self):
        if self.kind == KIND_FULL:
            if (self.low_deg_neighbors is None) == (self.hat_map is None):
                raise ValueError("exactly one of low_deg_neighbors / hat_map must be present")
            if self.hat_map is not None and any(self.owner not in k for k in self.hat_map):
                raise ValueError("hat_map key without the owner")

    @property
    def bad_ids(self) -> tuple[int, ...]:
        return tuple(s.vertex_id for s in self.star_b)

    def metadata(self) -> tuple:
        return (self.n, self.f, self.r, self.u_size, self.kind, self.bad_ids)


@dataclass(frozen=True)
class QueryAnswer:
    verdict: bool
    witness: tuple | None = None

    def __post_init__(self):
        if self.verdict != (self.witness is not None):
            raise ValueError("witness present iff verdict is YES")

    def to_dict(self) -> dict:
        return {
            "verdict": "YES" if self.verdict else "NO",
            "witness": list(self.witness) if self.witness else None,
        }


def _ceil_pow_frac(base: int, num: int, den: int) -> int:
    """ceil(base ** (num/den)) in exact integer arithmetic."""
    if base <= 1:
        return base
    target = base**num
    lo, hi = 1, base
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**den >= target:
            hi = mid
        else:
            lo = mid + 1
    return lo


def degree_threshold(u_size: int, f: int) -> int:
    """r = ceil(|U|^(1-1/f)) + 2; integral and >= 3 whenever |U| >= 1."""
    return _ceil_pow_frac(u_size, f - 1, f) + 2


def _bit_labels(g: Graph, u: TerminalSet, f: int) -> dict[int, SchemeLabel]:
    labels = {}
    for x in range(g.n):
        bit = u.k >= 2 and is_steiner_cut(g, u, (x,))
        labels[x] = SchemeLabel(x, g.n, f, 0, u.k, KIND_BIT, bit=bit)
    return labels


def build_labels(g: Graph, u: TerminalSet, f: int) -> dict[int, SchemeLabel]:
    if f < 1:
        raise ValueError("f must be >= 1")
    if f == 1 or u.k <= 1:
        return _bit_labels(g, u, f)

    r = degree_threshold(u.k, f)
    d = decompose(g, u, r)
    bad = list(d.bad_set)
    bad_set = set(bad)

    gb_ids = component_ids(g, bad_set)
    rep: dict[int, int] = {}
    for t in u.terminals:  # ascending, so each component gets its smallest terminal
        if t not in bad_set:
            rep.setdefault(gb_ids[t], t)

    st = build_st_labels(g, f)
    reach = build_reach_labels(g, u, f)
    star = {v: StarLabel(v, st[v], reach[v]) for v in range(g.n)}
    star_b = tuple(star[b] for b in bad)
    hat_empty = build_subset_label(g, u, (), f)

    hat_cache: dict[tuple[int, ...], SubsetLabel] = {}
    labels = {}
    for x in range(g.n):
        if x in bad_set:
            ux = None
            others = [b for b in bad if b != x]
            hat_map = {}
            for size in range(f):
                for combo in itertools.combinations(others, size):
                    key = tuple(sorted((x, *combo)))
                    if key not in hat_cache:
                        hat_cache[key] = build_subset_label(g, u, key, f)
                    hat_map[key] = hat_cache[key]
            content: dict = {"hat_map": hat_map}
        else:
            ux = rep.get(gb_ids[x])
            neigh = tuple(
                star[y] for y in d.forest.neighbors(x) if y not in bad_set
            )
            content = {"low_deg_neighbors": neigh}
        labels[x] = SchemeLabel(
            x,
            g.n,
            f,
            r,
            u.k,
            KIND_FULL,
            star_self=star[x],
            star_ux=star[ux] if ux is not None else None,
            star_b=star_b,
            hat_empty=hat_empty,
            **content,
        )
    return labels


def query(labels_of_f: list[SchemeLabel], wstar_rule: str = "min") -> QueryAnswer:
    """Classify the fault set carried by `labels_of_f`. Pure function of the
    labels; no graph handle exists in this signature."""
    if not labels_of_f:
        raise ValueError("need at least one label")
    owners = [lab.owner for lab in labels_of_f]
    if len(set(owners)) != len(owners):
        raise ValueError("duplicate fault labels")
    meta = labels_of_f[0].metadata()
    if any(lab.metadata() != meta for lab in labels_of_f[1:]):
        raise LabelMixError("labels disagree on build metadata")
    if len(labels_of_f) > labels_of_f[0].f:
        raise ValueError(f"{len(labels_of_f)} faults exceed f={labels_of_f[0].f}")

    if labels_of_f[0].kind == KIND_BIT:
        for lab in labels_of_f:
            if lab.bit:
                return QueryAnswer(True, ("bit", lab.owner))
        return QueryAnswer(False)

    faults = sorted(owners)
    fault_set = set(faults)
    bad_ids = labels_of_f[0].bad_ids
    k_key = tuple(v for v in bad_ids if v in fault_set)

    if k_key:
        holder = next(lab for lab in labels_of_f if lab.owner in k_key)
        hat = holder.hat_map[k_key]
    else:
        hat = labels_of_f[0].hat_empty
    if query_subset_label(hat, faults):
        return QueryAnswer(True, ("subset", k_key))

    stored: dict[int, StarLabel] = {}
    for lab in labels_of_f:
        entries = [lab.star_self, lab.star_ux, *lab.star_b]
        if lab.low_deg_neighbors is not None:
            entries.extend(lab.low_deg_neighbors)
        for entry in entries:
            if entry is not None and entry.vertex_id not in fault_set:
                stored.setdefault(entry.vertex_id, entry)

    fault_reach = [lab.star_self.reach for lab in labels_of_f]
    fault_st = [lab.star_self.st for lab in labels_of_f]
    reach_ok = [v for v in sorted(stored) if query_reach(stored[v].reach, fault_reach)]
    if reach_ok:
        w_star = min(reach_ok) if wstar_rule == "min" else max(reach_ok)
        for w in reach_ok:
            if w == w_star:
                continue
            if not query_st(fault_st, stored[w_star].st, stored[w].st):
                return QueryAnswer(True, ("disconnected_pair", w_star, w))
    return QueryAnswer(False)


def label_stats(labels: dict[int, SchemeLabel]) -> dict:
    """Entry counts and serialized sizes over one build's labels.

    Star-entry counts are the scheme's headline size measure; serialized bits
    are reported too but depend on the (deliberately verbose) st-label backend.
    """
    star_counts = []
    hat_counts = []
    bit_sizes = []
    r = 0
    b_size = 0
    for lab in labels.values():
        if lab.kind == KIND_BIT:
            star_counts.append(0)
            hat_counts.append(0)
        else:
            extra = len(lab.low_deg_neighbors) if lab.low_deg_neighbors is not None else 0
            star_counts.append(2 + len(lab.star_b) + extra)
            hat_counts.append(1 + (len(lab.hat_map) if lab.hat_map is not None else 0))
            r = lab.r
            b_size = len(lab.star_b)
        bit_sizes.append(8 * len(serialize_label(lab)))
    count = len(labels) or 1
    return {
        "labels": len(labels),
        "max_star_entries": max(star_counts, default=0),
        "mean_star_entries": sum(star_counts) / count,
        "max_hat_entries": max(hat_counts, default=0),
        "mean_hat_entries": sum(hat_counts) / count,
        "max_serialized_bits": max(bit_sizes, default=0),
        "r": r,
        "b_size": b_size,
    }


# ---- serialization ----
# Self-describing record, star labels deduplicated into a table with section
# back-references; crc32 trailer so any single-bit corruption is detectable.

def serialize_label(label: SchemeLabel) -> bytes:
    out = bytearray(_MAGIC)
    out.append(0 if label.kind == KIND_BIT else 1)
    for value in (label.n, label.f, label.r, label.u_size, label.owner):
        write_uvarint(out, value)
    if label.kind == KIND_BIT:
        out.append(1 if label.bit else 0)
    else:
        table: list[StarLabel] = []
        index: dict[int, int] = {}

        def ref(entry: StarLabel) -> int:
            if entry.vertex_id not in index:
                index[entry.vertex_id] = len(table)
                table.append(entry)
            return index[entry.vertex_id]

        self_idx = ref(label.star_self)
        ux_idx = ref(label.star_ux) if label.star_ux is not None else None
        b_idx = [ref(s) for s in label.star_b]
        low_idx = (
            [ref(s) for s in label.low_deg_neighbors]
            if label.low_deg_neighbors is not None
            else None
        )

        write_uvarint(out, len(table))
        for entry in table:
            write_uvarint(out, entry.vertex_id)
            write_bytes(out, entry.st.payload)
            write_bytes(out, entry.reach.payload)
        write_uvarint(out, self_idx)
        if ux_idx is None:
            out.append(0)
        else:
            out.append(1)
            write_uvarint(out, ux_idx)
        write_uvarint(out, len(b_idx))
        for idx in b_idx:
            write_uvarint(out, idx)
        write_bits_field(out, serialize_subset_label(label.hat_empty))
        if low_idx is not None:
            out.append(0)
            write_uvarint(out, len(low_idx))
            for idx in low_idx:
                write_uvarint(out, idx)
        else:
            out.append(1)
            write_uvarint(out, len(label.hat_map))
            for key in sorted(label.hat_map):
                write_uvarint(out, len(key))
                for v in key:
                    write_uvarint(out, v)
                write_bits_field(out, serialize_subset_label(label.hat_map[key]))
    out.extend(zlib.crc32(out).to_bytes(4, "little"))
    return bytes(out)


def deserialize_label(blob: bytes) -> SchemeLabel:
    if len(blob) < 9 or blob[:4] != _MAGIC:
        raise MalformedBits("bad scheme label magic")
    body, crc = blob[:-4], blob[-4:]
    if zlib.crc32(body) != int.from_bytes(crc, "little"):
        raise MalformedBits("crc mismatch")
    pos = 4
    kind_code = blob[pos]
    pos += 1
    if kind_code not in (0, 1):
        raise MalformedBits(f"unknown label kind {kind_code}")
    vals = []
    for _ in range(5):
        v, pos = read_uvarint(body, pos)
        vals.append(v)
    n, f, r, u_size, owner = vals
    if owner >= n:
        raise MalformedBits("owner out of range")
    if kind_code == 0:
        if pos + 1 != len(body):
            raise MalformedBits("bad bit label length")
        bit = body[pos]
        if bit not in (0, 1):
            raise MalformedBits("bit label byte not 0/1")
        return SchemeLabel(owner, n, f, r, u_size, KIND_BIT, bit=bool(bit))

    count, pos = read_uvarint(body, pos)
    table: list[StarLabel] = []
    for _ in range(count):
        vid, pos = read_uvarint(body, pos)
        st_payload, pos = read_bytes(body, pos)
        reach_payload, pos = read_bytes(body, pos)
        st = st_label_from_payload(st_payload)
        reach = reach_label_from_payload(reach_payload)
        if st.vertex_id != vid or reach.vertex_id != vid:
            raise MalformedBits("star table id mismatch")
        table.append(StarLabel(vid, st, reach))

    def deref(idx: int) -> StarLabel:
        if idx >= len(table):
            raise MalformedBits("star index out of range")
        return table[idx]

    self_idx, pos = read_uvarint(body, pos)
    star_self = deref(self_idx)
    if star_self.vertex_id != owner:
        raise MalformedBits("self star does not match owner")
    has_ux = body[pos]
    pos += 1
    star_ux = None
    if has_ux == 1:
        ux_idx, pos = read_uvarint(body, pos)
        star_ux = deref(ux_idx)
    elif has_ux != 0:
        raise MalformedBits("bad u_x flag")
    b_count, pos = read_uvarint(body, pos)
    star_b = []
    for _ in range(b_count):
        idx, pos = read_uvarint(body, pos)
        star_b.append(deref(idx))
    hat_bits, pos = read_bits_field(body, pos)
    hat_empty = deserialize_subset_label(hat_bits, n, f)
    section = body[pos]
    pos += 1
    low = None
    hat_map = None
    if section == 0:
        low_count, pos = read_uvarint(body, pos)
        low = []
        for _ in range(low_count):
            idx, pos = read_uvarint(body, pos)
            low.append(deref(idx))
    elif section == 1:
        map_count, pos = read_uvarint(body, pos)
        hat_map = {}
        for _ in range(map_count):
            ksize, pos = read_uvarint(body, pos)
            if not 1 <= ksize <= f:
                raise MalformedBits("subset key size out of range")
            key = []
            for _ in range(ksize):
                v, pos = read_uvarint(body, pos)
                key.append(v)
            if key != sorted(set(key)) or owner not in key:
                raise MalformedBits("bad subset key")
            bits, pos = read_bits_field(body, pos)
            hat_map[tuple(key)] = deserialize_subset_label(bits, n, f)
    else:
        raise MalformedBits(f"unknown section {section}")
    if pos != len(body):
        raise MalformedBits("trailing bytes in scheme label")
    try:
        return SchemeLabel(
            owner,
            n,
            f,
            r,
            u_size,
            KIND_FULL,
            star_self=star_self,
            star_ux=star_ux,
            star_b=tuple(star_b),
            hat_empty=hat_empty,
            low_deg_neighbors=tuple(low) if low is not None else None,
            hat_map=hat_map,
        )
    except ValueError as exc:
        raise MalformedBits(str(exc)) from None


def fault_labels(labels: dict[int, SchemeLabel], faults: Iterable[int]) -> list[SchemeLabel]:
    """Convenience: pick the labels of a fault set from a build."""
    return [labels[v] for v in sorted(set(faults))]
