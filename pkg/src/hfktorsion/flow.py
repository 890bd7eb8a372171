"""Deterministic Dinic max-flow on small integer-capacity networks."""

from __future__ import annotations

from collections import deque


class FlowNetwork:
    """Directed graph with integer capacities; edges are kept in insertion order.

    Capacities can be changed between solves with :meth:`set_capacity`,
    so one topology serves many feasibility queries.
    """

    def __init__(self, num_nodes: int):
        self.n = num_nodes
        self.adj: list[list[int]] = [[] for _ in range(num_nodes)]
        self.to: list[int] = []
        self.cap: list[int] = []
        self.base: list[int] = []

    def add_edge(self, u: int, v: int, cap: int) -> int:
        """Add ``u -> v`` and its residual twin; returns the forward edge id."""
        eid = len(self.to)
        self.to += [v, u]
        self.base += [cap, 0]
        self.cap += [cap, 0]
        self.adj[u].append(eid)
        self.adj[v].append(eid + 1)
        return eid

    def set_capacity(self, eid: int, cap: int) -> None:
        self.base[eid] = cap

    def flow_on(self, eid: int) -> int:
        return self.base[eid] - self.cap[eid]

    def max_flow(self, s: int, t: int) -> int:
        self.cap = list(self.base)
        total = 0
        while True:
            level = self._bfs(s, t)
            if level[t] < 0:
                return total
            it = [0] * self.n
            while True:
                pushed = self._dfs(s, t, float("inf"), level, it)
                if not pushed:
                    break
                total += pushed

    def _bfs(self, s: int, t: int) -> list[int]:
        level = [-1] * self.n
        level[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for e in self.adj[u]:
                if self.cap[e] > 0 and level[self.to[e]] < 0:
                    level[self.to[e]] = level[u] + 1
                    queue.append(self.to[e])
        return level

    def _dfs(self, s: int, t: int, limit, level, it) -> int:
        # iterative DFS along the level graph
        path: list[int] = []
        u = s
        while True:
            if u == t:
                pushed = min(self.cap[e] for e in path)
                pushed = min(pushed, limit)
                for e in path:
                    self.cap[e] -= pushed
                    self.cap[e ^ 1] += pushed
                return pushed
            advanced = False
            while it[u] < len(self.adj[u]):
                e = self.adj[u][it[u]]
                v = self.to[e]
                if self.cap[e] > 0 and level[v] == level[u] + 1:
                    path.append(e)
                    u = v
                    advanced = True
                    break
                it[u] += 1
            if not advanced:
                if u == s:
                    return 0
                level[u] = -1
                e = path.pop()
                u = self.to[e ^ 1]
                it[u] += 1
