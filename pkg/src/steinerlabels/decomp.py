"""Steiner forest decomposition: produce (T, B) such that

  P1  T is a Steiner forest for the terminals U in g, and T - B is a Steiner
      forest for U - B in g - B;
  P2  every vertex of T - B has degree at most r in T - B;
  P3  |B| < |U|/(r-2) and |B and U| < |U|/(r-1).

B is always the set of vertices whose forest degree exceeds r. Because every
leaf of the forest is kept a terminal throughout, a degree-sum argument bounds
the number of degree->r vertices per tree by (leaves-2)/(r-1), which yields
both P3 inequalities; P2 is immediate. All of the work goes into P1: a local
search swaps non-forest edges in (and edges at overloaded vertices out) and
links trees along witness paths until no terminal pair is connected in g - B
but split in T - B. Properties are machine-checked per instance; the builder
raises rather than return an invalid pair.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .graph import Graph, TerminalSet, component_ids

_DEFAULT_CAP_FACTOR = 50


class DecompositionFailed(Exception):
    """Local search hit its iteration cap or produced an invalid pair."""


class _DSU:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True

    def same(self, a: int, b: int) -> bool:
        return self.find(a) == self.find(b)


@dataclass(frozen=True)
class SteinerForest:
    n: int
    edges: tuple[tuple[int, int], ...]
    _adj: dict[int, tuple[int, ...]] = field(repr=False, compare=False)

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        norm = sorted({(a, b) if a < b else (b, a) for a, b in edges})
        dsu = _DSU(n)
        adj: dict[int, list[int]] = {}
        for a, b in norm:
            if not (0 <= a < n and 0 <= b < n) or a == b:
                raise ValueError(f"bad forest edge ({a},{b})")
            if not dsu.union(a, b):
                raise ValueError(f"forest has a cycle through ({a},{b})")
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", tuple(norm))
        object.__setattr__(self, "_adj", {v: tuple(sorted(ns)) for v, ns in adj.items()})

    def degree(self, v: int) -> int:
        return len(self._adj.get(v, ()))

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj.get(v, ())

    def vertices(self) -> list[int]:
        return sorted(self._adj)

    def leaves(self) -> list[int]:
        return [v for v, ns in sorted(self._adj.items()) if len(ns) == 1]

    def trees(self) -> list[list[int]]:
        """Vertex lists of the maximal trees (only vertices with edges)."""
        seen: set[int] = set()
        out = []
        for start in self.vertices():
            if start in seen:
                continue
            comp = [start]
            seen.add(start)
            queue = deque([start])
            while queue:
                v = queue.popleft()
                for w in self._adj[v]:
                    if w not in seen:
                        seen.add(w)
                        comp.append(w)
                        queue.append(w)
            out.append(sorted(comp))
        return out


@dataclass(frozen=True)
class Decomposition:
    forest: SteinerForest
    bad_set: tuple[int, ...]
    threshold: int


@dataclass(frozen=True)
class DecompositionReport:
    p1_holds: bool
    p2_holds: bool
    p3_holds: bool
    witnesses: dict

    @property
    def all_ok(self) -> bool:
        return self.p1_holds and self.p2_holds and self.p3_holds

    def to_dict(self) -> dict:
        return {
            "p1_holds": self.p1_holds,
            "p2_holds": self.p2_holds,
            "p3_holds": self.p3_holds,
            "witnesses": self.witnesses,
            "pass": self.all_ok,
        }


# ---- minimal Steiner forest ----

def _prune_non_terminal_leaves(adj: list[set[int]], terminals: set[int]) -> None:
    queue = deque(v for v in range(len(adj)) if len(adj[v]) == 1 and v not in terminals)
    while queue:
        v = queue.popleft()
        if len(adj[v]) != 1 or v in terminals:
            continue
        (w,) = adj[v]
        adj[v].discard(w)
        adj[w].discard(v)
        if len(adj[w]) == 1 and w not in terminals:
            queue.append(w)


def _nearest_terminal_path(g: Graph, tree_v: set[int], targets: set[int]) -> list[int]:
    """Shortest path from the current tree to the nearest target terminal;
    ties broken by smallest terminal id, then by BFS parent order."""
    parent: dict[int, int] = {v: -1 for v in tree_v}
    dist = {v: 0 for v in tree_v}
    queue = deque(sorted(tree_v))
    best: tuple[int, int] | None = None
    while queue:
        v = queue.popleft()
        if best is not None and dist[v] >= best[0]:
            break
        for w in g.adjacency[v]:
            if w in parent:
                continue
            parent[w] = v
            dist[w] = dist[v] + 1
            if w in targets:
                cand = (dist[w], w)
                if best is None or cand < best:
                    best = cand
            queue.append(w)
    if best is None:
        raise AssertionError("target terminal unreachable within its component")
    path = [best[1]]
    while parent[path[-1]] != -1:
        path.append(parent[path[-1]])
    return path[::-1]


def minimal_steiner_forest(g: Graph, u: TerminalSet) -> SteinerForest:
    """Edge-minimal Steiner forest: spans each cluster of mutually connected
    terminals, and every leaf is a terminal. Shortest-path heuristic plus
    leaf pruning; smallest-id tie-breaking throughout."""
    adj: list[set[int]] = [set() for _ in range(g.n)]
    if u.k:
        comp = component_ids(g)
        clusters: dict[int, list[int]] = {}
        for t in u.terminals:
            clusters.setdefault(comp[t], []).append(t)
        for _, terms in sorted(clusters.items(), key=lambda kv: kv[1][0]):
            tree_v = {terms[0]}
            remaining = set(terms[1:])
            while remaining:
                path = _nearest_terminal_path(g, tree_v, remaining)
                for a, b in zip(path, path[1:]):
                    adj[a].add(b)
                    adj[b].add(a)
                tree_v.update(path)
                remaining.discard(path[-1])
    _prune_non_terminal_leaves(adj, set(u.terminals))
    return SteinerForest(g.n, _adj_edges(adj))


def _adj_edges(adj: list[set[int]]) -> list[tuple[int, int]]:
    return [(v, w) for v in range(len(adj)) for w in adj[v] if v < w]


# ---- decomposition ----

def _forest_path(adj: list[set[int]], s: int, t: int) -> list[int]:
    parent = {s: -1}
    queue = deque([s])
    while queue:
        v = queue.popleft()
        if v == t:
            path = [v]
            while parent[path[-1]] != -1:
                path.append(parent[path[-1]])
            return path[::-1]
        for w in sorted(adj[v]):
            if w not in parent:
                parent[w] = v
                queue.append(w)
    raise AssertionError("forest path query across different trees")


def _forest_minus_b_components(adj: list[set[int]], bad: set[int]) -> list[int]:
    n = len(adj)
    ids = [-1] * n
    nxt = 0
    for start in range(n):
        if ids[start] != -1 or start in bad:
            continue
        ids[start] = nxt
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if ids[w] == -1 and w not in bad:
                    ids[w] = nxt
                    queue.append(w)
        nxt += 1
    return ids


def _fr_improve(g: Graph, adj: list[set[int]], r: int, terminals: set[int]) -> int:
    """Swap non-forest edges in to relieve vertices of degree > r.

    A swap needs a non-forest edge (x, y) with both forest degrees <= r-2
    whose forest path runs through an overloaded vertex w; it trades one of
    w's path edges for (x, y). Only edges at degree->r vertices are removed,
    so the forest minus its overloaded vertices never loses an edge.
    """
    swaps = 0
    improved = True
    while improved:
        improved = False
        for w in range(g.n):
            if len(adj[w]) <= r:
                continue
            branch: dict[int, int] = {w: w}
            for root in sorted(adj[w]):
                if root in branch:
                    continue
                branch[root] = root
                queue = deque([root])
                while queue:
                    v = queue.popleft()
                    for x in adj[v]:
                        if x not in branch:
                            branch[x] = root
                            queue.append(x)
            swap = None
            for x, y in g.sorted_edges():
                if y in adj[x]:
                    continue
                bx, by = branch.get(x), branch.get(y)
                if bx is None or by is None or bx == by or x == w or y == w:
                    continue
                if len(adj[x]) <= r - 2 and len(adj[y]) <= r - 2:
                    swap = (x, y, bx, by)
                    break
            if swap is None:
                continue
            x, y, bx, by = swap
            drop = min(bx, by)
            adj[w].discard(drop)
            adj[drop].discard(w)
            adj[x].add(y)
            adj[y].add(x)
            _prune_non_terminal_leaves(adj, terminals)
            swaps += 1
            improved = True
    return swaps


def _find_p1b_violation(
    g: Graph, terminals: tuple[int, ...], adj: list[set[int]], bad: set[int]
) -> tuple[int, int] | None:
    """A terminal pair connected in g-B but split in T-B, or None."""
    live = [t for t in terminals if t not in bad]
    if len(live) <= 1:
        return None
    gb = component_ids(g, bad)
    tb = _forest_minus_b_components(adj, bad)
    groups: dict[int, list[int]] = {}
    for t in live:
        groups.setdefault(gb[t], []).append(t)
    for _, terms in sorted(groups.items(), key=lambda kv: kv[1][0]):
        first = terms[0]
        for t in terms[1:]:
            if tb[t] != tb[first]:
                return first, t
    return None


def _repair_along_path(
    g: Graph, adj: list[set[int]], r: int, bad: set[int], path: list[int]
) -> int:
    """Link/swap forest edges along a g-B witness path so its endpoints end up
    connected in T-B. Returns the number of forest mutations made."""
    n = g.n
    tree_dsu = _DSU(n)
    tb_dsu = _DSU(n)
    for v in range(n):
        for w in adj[v]:
            if v < w:
                tree_dsu.union(v, w)
                if v not in bad and w not in bad:
                    tb_dsu.union(v, w)
    made = 0
    for x, y in zip(path, path[1:]):
        if tb_dsu.same(x, y):
            continue
        if not tree_dsu.same(x, y):
            adj[x].add(y)
            adj[y].add(x)
            tree_dsu.union(x, y)
            if len(adj[x]) <= r and len(adj[y]) <= r:
                tb_dsu.union(x, y)
            made += 1
            continue
        tpath = _forest_path(adj, x, y)
        blockers = [v for v in tpath[1:-1] if len(adj[v]) > r]
        if not blockers:
            tb_dsu.union(x, y)
            continue
        b_star = blockers[0]
        prev = tpath[tpath.index(b_star) - 1]
        adj[b_star].discard(prev)
        adj[prev].discard(b_star)
        adj[x].add(y)
        adj[y].add(x)
        if len(adj[x]) <= r and len(adj[y]) <= r:
            tb_dsu.union(x, y)
        made += 1
    return made


def decompose(g: Graph, u: TerminalSet, r: int, mutation_cap: int | None = None) -> Decomposition:
    """Compute (T, B) satisfying the three decomposition properties, or raise
    DecompositionFailed. Deterministic: identical inputs give identical output."""
    if r < 3:
        raise ValueError("degree threshold r must be >= 3")
    terminals = tuple(u.terminals)
    tset = set(terminals)
    start = minimal_steiner_forest(g, u)
    adj: list[set[int]] = [set() for _ in range(g.n)]
    for a, b in start.edges:
        adj[a].add(b)
        adj[b].add(a)
    cap = mutation_cap if mutation_cap is not None else max(200, _DEFAULT_CAP_FACTOR * g.n)
    mutations = _fr_improve(g, adj, r, tset)
    while True:
        if mutations > cap:
            raise DecompositionFailed(f"no valid pair within {cap} forest mutations")
        bad = {v for v in range(g.n) if len(adj[v]) > r}
        viol = _find_p1b_violation(g, terminals, adj, bad)
        if viol is None:
            break
        path = _witness_path(g, bad, viol)
        made = _repair_along_path(g, adj, r, bad, path)
        if made == 0:
            raise DecompositionFailed("witness path produced no forest mutation")
        _prune_non_terminal_leaves(adj, tset)
        mutations += made
        mutations += _fr_improve(g, adj, r, tset)
    bad = frozenset(v for v in range(g.n) if len(adj[v]) > r)
    decomposition = Decomposition(
        SteinerForest(g.n, _adj_edges(adj)), tuple(sorted(bad)), r
    )
    report = verify_decomposition(g, u, r, decomposition)
    if not report.all_ok:
        raise DecompositionFailed(f"self-check failed: {report.to_dict()}")
    return decomposition


def _witness_path(g: Graph, bad: set[int], pair: tuple[int, int]) -> list[int]:
    from .graph import bfs_path

    path = bfs_path(g, pair[0], pair[1], bad)
    if path is None:
        raise AssertionError("violation pair not actually connected in g-B")
    return path


# ---- verification ----

def _grouped_connectivity_witness(
    watch: list[int], group_ids: list[int], fine_ids: list[int]
) -> tuple[int, int] | None:
    """A pair from `watch` in one coarse group but different fine groups."""
    groups: dict[int, list[int]] = {}
    for t in watch:
        groups.setdefault(group_ids[t], []).append(t)
    for _, terms in sorted(groups.items(), key=lambda kv: kv[1][0]):
        first = terms[0]
        for t in terms[1:]:
            if fine_ids[t] != fine_ids[first]:
                return first, t
    return None


def verify_decomposition(
    g: Graph, u: TerminalSet, r: int, d: Decomposition
) -> DecompositionReport:
    """Machine-check the three properties; on failure the report carries a
    violating terminal pair or vertex."""
    forest = d.forest
    bad = set(d.bad_set)
    witnesses: dict = {}

    forest_ids = [-1] * g.n
    for idx, tree in enumerate(forest.trees()):
        for v in tree:
            forest_ids[v] = idx
    for v in range(g.n):
        if forest_ids[v] == -1:
            forest_ids[v] = g.n + v  # isolated vertices: singleton groups

    p1 = True
    pair = _grouped_connectivity_witness(list(u.terminals), component_ids(g), forest_ids)
    if pair is not None:
        p1 = False
        witnesses["steiner_pair"] = pair

    fadj: list[set[int]] = [set() for _ in range(g.n)]
    for a, b in forest.edges:
        fadj[a].add(b)
        fadj[b].add(a)
    tb_ids = _forest_minus_b_components(fadj, bad)
    live = [t for t in u.terminals if t not in bad]
    pair = _grouped_connectivity_witness(live, component_ids(g, bad), tb_ids)
    if pair is not None:
        p1 = False
        witnesses["surviving_pair"] = pair

    p2 = True
    for v in range(g.n):
        if v in bad:
            continue
        deg = sum(1 for w in fadj[v] if w not in bad)
        if deg > r:
            p2 = False
            witnesses["overloaded_vertex"] = v
            break

    k = u.k
    n_bad = len(bad)
    n_bad_terminals = len(bad & set(u.terminals))
    if k == 0:
        p3 = n_bad == 0
    else:
        p3 = n_bad * (r - 2) < k and n_bad_terminals * (r - 1) < k
    if not p3:
        witnesses["bad_counts"] = {"B": n_bad, "B_and_U": n_bad_terminals, "U": k}

    return DecompositionReport(p1, p2, p3, witnesses)


def count_high_degree_bound(forest: SteinerForest, r: int) -> int:
    """Number of forest vertices of degree >= r. When every leaf is a terminal,
    each tree with L leaves has at most (L-2)/(r-2) of them."""
    if r < 3:
        raise ValueError("degree threshold r must be >= 3")
    return sum(1 for v in forest.vertices() if forest.degree(v) >= r)
