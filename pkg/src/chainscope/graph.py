"""Threshold digraphs over a gap matrix: BFS walks, SCCs, condensation.

Everything here is deterministic: successor lists are sorted by index and
every tie is broken towards the smallest index.
"""
from __future__ import annotations

from collections import deque
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components


class ThresholdGraph:
    """The digraph ``{(a, b) : gap[a, b] < eps}``, optionally induced on a vertex set."""

    def __init__(self, gap: np.ndarray, eps: float, within: Optional[Iterable[int]] = None):
        self.n = gap.shape[0]
        adj = gap < eps
        if within is not None:
            keep = np.zeros(self.n, dtype=bool)
            keep[list(within)] = True
            adj = adj & keep[:, None] & keep[None, :]
            self.vertices = tuple(int(v) for v in np.flatnonzero(keep))
        else:
            self.vertices = tuple(range(self.n))
        self.eps = eps
        self.adj = adj
        self.succ = [tuple(int(b) for b in np.flatnonzero(adj[a])) for a in range(self.n)]
        self.pred = [tuple(int(a) for a in np.flatnonzero(adj[:, b])) for b in range(self.n)]
        self._scc = None
        self._reach = None

    # -- walks --------------------------------------------------------------

    def dist_to(self, targets: Iterable[int]) -> np.ndarray:
        """Edge distance from every vertex to the target set (-1 if unreachable)."""
        dist = np.full(self.n, -1, dtype=np.int64)
        q = deque()
        for t in targets:
            if dist[t] < 0:
                dist[t] = 0
                q.append(t)
        while q:
            b = q.popleft()
            for a in self.pred[b]:
                if dist[a] < 0:
                    dist[a] = dist[b] + 1
                    q.append(a)
        return dist

    def shortest_walk(self, x: int, targets: Iterable[int], min_edges: int = 1,
                      dist: Optional[np.ndarray] = None) -> Optional[list[int]]:
        """Lexicographically smallest shortest walk from x into ``targets``.

        With ``min_edges=1`` the walk has at least one edge even if x is a target.
        ``dist`` may pass in a precomputed ``dist_to(targets)``.
        """
        targets = set(targets)
        if dist is None:
            dist = self.dist_to(targets)
        if min_edges == 0 and x in targets:
            return [x]
        best = None
        for s in self.succ[x]:
            if dist[s] >= 0 and (best is None or dist[s] < dist[best]):
                best = s
        if best is None:
            return None
        walk = [x, best]
        v = best
        while dist[v] > 0:
            v = next(w for w in self.succ[v] if dist[w] == dist[v] - 1)
            walk.append(v)
        return walk

    def reachable_from(self, x: int) -> np.ndarray:
        """Vertices reachable from x by walks with at least one edge."""
        seen = np.zeros(self.n, dtype=bool)
        q = deque(self.succ[x])
        for s in self.succ[x]:
            seen[s] = True
        while q:
            a = q.popleft()
            for b in self.succ[a]:
                if not seen[b]:
                    seen[b] = True
                    q.append(b)
        return seen

    # -- strongly connected components --------------------------------------

    def scc(self):
        """Component labels, renumbered so ids increase with the smallest member."""
        if self._scc is None:
            _, raw = connected_components(csr_matrix(self.adj), directed=True, connection="strong")
            order = {}
            labels = np.empty(self.n, dtype=np.int64)
            for v in range(self.n):
                labels[v] = order.setdefault(int(raw[v]), len(order))
            self._scc = labels
        return self._scc

    def components(self) -> list[tuple[int, ...]]:
        labels = self.scc()
        members: list[list[int]] = [[] for _ in range(int(labels.max()) + 1)]
        for v in range(self.n):
            members[labels[v]].append(v)
        return [tuple(m) for m in members]

    def condensation_edges(self) -> set[tuple[int, int]]:
        labels = self.scc()
        a, b = np.nonzero(self.adj)
        ca, cb = labels[a], labels[b]
        keep = ca != cb
        return {(int(u), int(w)) for u, w in zip(ca[keep], cb[keep])}

    def component_reach(self) -> list[int]:
        """Bitset per component of components reachable from it (reflexive)."""
        if self._reach is None:
            comps = self.components()
            edges = self.condensation_edges()
            out: list[list[int]] = [[] for _ in comps]
            indeg = [0] * len(comps)
            for u, w in edges:
                out[u].append(w)
                indeg[w] += 1
            # Kahn order, then fold reachability back from sinks
            order = [c for c in range(len(comps)) if indeg[c] == 0]
            i = 0
            while i < len(order):
                for w in out[order[i]]:
                    indeg[w] -= 1
                    if indeg[w] == 0:
                        order.append(w)
                i += 1
            reach = [1 << c for c in range(len(comps))]
            for c in reversed(order):
                for w in out[c]:
                    reach[c] |= reach[w]
            self._reach = reach
            self._topo = {c: i for i, c in enumerate(order)}
        return self._reach

    def topo_rank(self) -> dict[int, int]:
        self.component_reach()
        return self._topo

    def nontrivial(self, comp_members: Sequence[int]) -> bool:
        if len(comp_members) > 1:
            return True
        v = comp_members[0]
        return bool(self.adj[v, v])
