"""Self-contained pairwise-connectivity and terminal-reach labels.

The provider contract: `query_st` decides whether s,t are connected after
deleting up to f failed vertices, from the byte payloads of the labels of
F and {s,t} alone; no graph handle exists in the query API. Reach labels
answer "is x connected to some terminal" by the apex trick: add a virtual
vertex z adjacent to every terminal and ask for x-z connectivity.

The shipped "exhaustive" backend embeds a compressed copy of the whole graph
in every payload and runs BFS at query time. Correct and self-contained,
deliberately size-profligate; a compact backend can be registered under a
different tag without touching callers.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .bits import MalformedBits, read_uvarint, write_uvarint
from .graph import Graph, TerminalSet, connected_in


class BackendMismatch(Exception):
    """Labels from different backends (or versions) were mixed in one query."""


EXHAUSTIVE_TAG = b"EXH1"
_VERSION = 1


@dataclass(frozen=True)
class StLabel:
    vertex_id: int
    payload: bytes
    backend: bytes = EXHAUSTIVE_TAG


@dataclass(frozen=True)
class ReachLabel:
    """Internally carries the pair (apex-graph label of v, apex-graph label of z)."""

    vertex_id: int
    payload: bytes
    backend: bytes = EXHAUSTIVE_TAG


@dataclass(frozen=True)
class StarLabel:
    vertex_id: int
    st: StLabel
    reach: ReachLabel

    def __post_init__(self):
        if not (self.vertex_id == self.st.vertex_id == self.reach.vertex_id):
            raise ValueError("inconsistent vertex id across star label parts")


# ---- exhaustive backend wire format ----
# tag (4 bytes), version, vertex id, n, m, delta-encoded sorted edge list;
# all integers LEB128 varints.

def _encode_graph_payload(vid: int, g: Graph) -> bytes:
    out = bytearray(EXHAUSTIVE_TAG)
    write_uvarint(out, _VERSION)
    write_uvarint(out, vid)
    write_uvarint(out, g.n)
    write_uvarint(out, g.m)
    prev_u = prev_v = 0
    for u, v in g.sorted_edges():
        du = u - prev_u
        write_uvarint(out, du)
        if du == 0:
            write_uvarint(out, v - prev_v)
        else:
            write_uvarint(out, v - u - 1)
        prev_u, prev_v = u, v
    return bytes(out)


def _decode_payload(payload: bytes) -> tuple[int, Graph]:
    if payload[:4] != EXHAUSTIVE_TAG:
        raise BackendMismatch(f"unknown backend tag {payload[:4]!r}")
    pos = 4
    version, pos = read_uvarint(payload, pos)
    if version != _VERSION:
        raise BackendMismatch(f"unsupported payload version {version}")
    vid, pos = read_uvarint(payload, pos)
    n, pos = read_uvarint(payload, pos)
    m, pos = read_uvarint(payload, pos)
    edges = []
    u = v = 0
    for _ in range(m):
        du, pos = read_uvarint(payload, pos)
        dv, pos = read_uvarint(payload, pos)
        if du == 0:
            v += dv
        else:
            u += du
            v = u + 1 + dv
        edges.append((u, v))
    if pos != len(payload):
        raise MalformedBits("trailing bytes in payload")
    if vid >= n:
        raise MalformedBits("vertex id out of range in payload")
    try:
        return vid, _graph_from_edges(n, tuple(edges))
    except ValueError as exc:
        raise MalformedBits(str(exc)) from None


@lru_cache(maxsize=512)
def _graph_from_edges(n: int, edges: tuple[tuple[int, int], ...]) -> Graph:
    return Graph(n, edges)


def _check_tags(labels) -> None:
    tags = {lab.backend for lab in labels} | {lab.payload[:4] for lab in labels}
    if len(tags) > 1:
        raise BackendMismatch(f"mixed backend tags {sorted(tags)}")


def build_st_labels(g: Graph, f: int) -> dict[int, StLabel]:
    """Labels answering s-t connectivity under up to f vertex failures."""
    if f < 1:
        raise ValueError("f must be >= 1")
    return {v: StLabel(v, _encode_graph_payload(v, g)) for v in range(g.n)}


def query_st(labels_of_f: list[StLabel], s_label: StLabel, t_label: StLabel) -> bool:
    """True iff s,t are connected once the labelled fault vertices are deleted.

    Pure function of the label bytes: the graph is decoded from s's payload.
    """
    _check_tags([*labels_of_f, s_label, t_label])
    s, g = _decode_payload(s_label.payload)
    t, _ = _decode_payload(t_label.payload)
    faults = set()
    for lab in labels_of_f:
        vid, _ = _decode_payload(lab.payload)
        faults.add(vid)
    return connected_in(g, s, t, faults)


def _apex_graph(g: Graph, u: TerminalSet) -> Graph:
    z = g.n
    edges = list(g.edges) + [(t, z) for t in u.terminals]
    return Graph(g.n + 1, edges)


def build_reach_labels(g: Graph, u: TerminalSet, f: int) -> dict[int, ReachLabel]:
    """Labels answering "does x reach some terminal" under up to f failures."""
    if f < 1:
        raise ValueError("f must be >= 1")
    aug = _apex_graph(g, u)
    inner = build_st_labels(aug, f)
    z_payload = inner[g.n].payload
    labels = {}
    for v in range(g.n):
        own = inner[v].payload
        out = bytearray()
        write_uvarint(out, len(own))
        out.extend(own)
        out.extend(z_payload)
        labels[v] = ReachLabel(v, bytes(out))
    return labels


def _split_reach_payload(payload: bytes) -> tuple[bytes, bytes]:
    length, pos = read_uvarint(payload, 0)
    if pos + length > len(payload):
        raise MalformedBits("truncated reach payload")
    return payload[pos : pos + length], payload[pos + length :]


def query_reach(x_label: ReachLabel, labels_of_f: list[ReachLabel]) -> bool:
    """True iff x is connected to some terminal after deleting the faults."""
    own, z_part = _split_reach_payload(x_label.payload)
    x, aug = _decode_payload(own)
    z, _ = _decode_payload(z_part)
    faults = set()
    for lab in labels_of_f:
        if lab.backend != x_label.backend:
            raise BackendMismatch("mixed backend tags in reach query")
        fo, _ = _split_reach_payload(lab.payload)
        vid, _ = _decode_payload(fo)
        faults.add(vid)
    return connected_in(aug, x, z, faults)


def st_label_from_payload(payload: bytes) -> StLabel:
    """Reconstruct an StLabel from raw payload bytes (used by deserializers)."""
    vid, _ = _decode_payload(payload)
    return StLabel(vid, payload, payload[:4])


def reach_label_from_payload(payload: bytes) -> ReachLabel:
    own, z_part = _split_reach_payload(payload)
    vid, _ = _decode_payload(own)
    _decode_payload(z_part)
    return ReachLabel(vid, payload, own[:4])
