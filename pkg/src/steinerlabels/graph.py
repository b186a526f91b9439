"""Undirected graph core: connectivity primitives and Steiner-cut semantics.

Vertices are dense integers [0, n). Graphs are immutable after construction;
vertex deletions are expressed as masks passed to the traversal helpers, never
as mutation. `is_steiner_cut` is the ground-truth oracle that every labeling
scheme in this package is verified against.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset[tuple[int, int]]
    adjacency: tuple[tuple[int, ...], ...] = field(repr=False)

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        norm = set()
        for a, b in edges:
            if a == b:
                raise ValueError(f"self-loop at vertex {a}")
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge ({a},{b}) out of range [0,{n})")
            norm.add((a, b) if a < b else (b, a))
        adj: list[list[int]] = [[] for _ in range(n)]
        for a, b in sorted(norm):
            adj[a].append(b)
            adj[b].append(a)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", frozenset(norm))
        object.__setattr__(self, "adjacency", tuple(tuple(sorted(x)) for x in adj))

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)


@dataclass(frozen=True)
class TerminalSet:
    terminals: tuple[int, ...]

    def __init__(self, terminals: Iterable[int], n: int | None = None):
        terms = tuple(sorted(set(terminals)))
        if n is not None and terms and not (0 <= terms[0] and terms[-1] < n):
            raise ValueError(f"terminal out of range [0,{n})")
        object.__setattr__(self, "terminals", terms)

    @property
    def k(self) -> int:
        return len(self.terminals)

    def __contains__(self, v: int) -> bool:
        return v in set(self.terminals)

    def __iter__(self):
        return iter(self.terminals)


@dataclass(frozen=True)
class FaultSet:
    faults: frozenset[int]
    f_bound: int

    def __init__(self, faults: Iterable[int], f_bound: int, n: int | None = None):
        fs = frozenset(faults)
        if len(fs) > f_bound:
            raise ValueError(f"{len(fs)} faults exceed bound f={f_bound}")
        if n is not None and any(not 0 <= v < n for v in fs):
            raise ValueError(f"fault vertex out of range [0,{n})")
        object.__setattr__(self, "faults", fs)
        object.__setattr__(self, "f_bound", f_bound)


def components(g: Graph, removed: Iterable[int] = ()) -> list[list[int]]:
    """Connected components of g minus `removed`, each sorted, ordered by minimum."""
    dead = set(removed)
    seen = [False] * g.n
    out: list[list[int]] = []
    for start in range(g.n):
        if seen[start] or start in dead:
            continue
        seen[start] = True
        comp = [start]
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w in g.adjacency[v]:
                if not seen[w] and w not in dead:
                    seen[w] = True
                    comp.append(w)
                    queue.append(w)
        out.append(sorted(comp))
    return out


def component_ids(g: Graph, removed: Iterable[int] = ()) -> list[int]:
    """Per-vertex component index; -1 for removed vertices."""
    ids = [-1] * g.n
    for idx, comp in enumerate(components(g, removed)):
        for v in comp:
            ids[v] = idx
    return ids


def separates(g: Graph, k_set: Iterable[int], w_set: Iterable[int]) -> bool:
    """True iff two vertices of w_set - k_set are disconnected in g - k_set."""
    kk = set(k_set)
    watch = [w for w in set(w_set) if w not in kk]
    if len(watch) <= 1:
        return False
    ids = component_ids(g, kk)
    return len({ids[w] for w in watch}) >= 2


def is_steiner_cut(g: Graph, u: TerminalSet, f_set: Iterable[int]) -> bool:
    """Ground truth: does deleting f_set leave two surviving terminals disconnected?"""
    return separates(g, f_set, u.terminals)


def connected_in(g: Graph, s: int, t: int, removed: Iterable[int] = ()) -> bool:
    dead = set(removed)
    if s in dead or t in dead:
        return False
    if s == t:
        return True
    seen = {s}
    queue = deque([s])
    while queue:
        v = queue.popleft()
        for w in g.adjacency[v]:
            if w == t:
                return True
            if w not in seen and w not in dead:
                seen.add(w)
                queue.append(w)
    return False


def bfs_path(g: Graph, s: int, t: int, removed: Iterable[int] = ()) -> list[int] | None:
    """A shortest s-t path avoiding `removed`, or None. Deterministic."""
    dead = set(removed)
    if s in dead or t in dead:
        return None
    parent: dict[int, int] = {s: -1}
    queue = deque([s])
    while queue:
        v = queue.popleft()
        if v == t:
            path = [v]
            while parent[path[-1]] != -1:
                path.append(parent[path[-1]])
            return path[::-1]
        for w in g.adjacency[v]:
            if w not in parent and w not in dead:
                parent[w] = v
                queue.append(w)
    return None


def subdivide_edges(g: Graph) -> tuple[Graph, dict[tuple[int, int], int]]:
    """Split every edge (a,b) by a fresh middle vertex v_e.

    Failing v_e in the output is equivalent to deleting edge (a,b) in g, so
    mixed vertex+edge fault sets reduce to pure vertex faults. New vertex ids
    are assigned in sorted edge order starting at n.
    """
    edge_to_mid: dict[tuple[int, int], int] = {}
    new_edges: list[tuple[int, int]] = []
    next_id = g.n
    for a, b in g.sorted_edges():
        edge_to_mid[(a, b)] = next_id
        new_edges.append((a, next_id))
        new_edges.append((next_id, b))
        next_id += 1
    return Graph(g.n + g.m, new_edges), edge_to_mid


def delete_mixed(
    g: Graph, vertex_faults: Iterable[int], edge_faults: Iterable[tuple[int, int]]
) -> Graph:
    """Brute-force deletion of vertices and edges together (oracle side of the
    edge-subdivision reduction)."""
    dead = set(vertex_faults)
    dead_edges = {(a, b) if a < b else (b, a) for a, b in edge_faults}
    kept = [
        (a, b)
        for a, b in g.edges
        if a not in dead and b not in dead and (a, b) not in dead_edges
    ]
    return Graph(g.n, kept)


# ---- graph text format ----
# First line `n m k`; next m lines `u v`; final line: k terminal ids.
# Blank lines and `#` comments ignored.

def parse_graph_text(text: str) -> tuple[Graph, TerminalSet]:
    tokens: list[str] = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            tokens.extend(line.split())
    if len(tokens) < 3:
        raise ValueError("graph text needs at least the `n m k` header")
    vals = []
    for tok in tokens:
        try:
            vals.append(int(tok))
        except ValueError:
            raise ValueError(f"non-integer token {tok!r} in graph text") from None
    n, m, k = vals[0], vals[1], vals[2]
    need = 3 + 2 * m + k
    if len(vals) != need:
        raise ValueError(f"expected {need} integers for n={n} m={m} k={k}, got {len(vals)}")
    body = vals[3:]
    edges = [(body[2 * i], body[2 * i + 1]) for i in range(m)]
    terms = body[2 * m :]
    return Graph(n, edges), TerminalSet(terms, n=n)


def format_graph_text(g: Graph, u: TerminalSet) -> str:
    lines = [f"{g.n} {g.m} {u.k}"]
    lines.extend(f"{a} {b}" for a, b in g.sorted_edges())
    if u.k:
        lines.append(" ".join(str(t) for t in u.terminals))
    return "\n".join(lines) + "\n"


def load_graph(path: str) -> tuple[Graph, TerminalSet]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph_text(fh.read())


def save_graph(path: str, g: Graph, u: TerminalSet) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_graph_text(g, u))
