"""Integer max-flow (Dinic) and feasibility of flows with arc lower bounds.

Arcs are explored in insertion order, so callers control tie-breaking by the
order in which they add arcs.
"""

from __future__ import annotations

from collections import deque


class FlowNetwork:
    def __init__(self, num_nodes: int):
        self.num_nodes = num_nodes
        self.adj: list[list[int]] = [[] for _ in range(num_nodes)]
        self.to: list[int] = []
        self.cap: list[int] = []

    def add_edge(self, u: int, v: int, cap: int) -> int:
        """Add ``u -> v`` with capacity ``cap``; returns the arc id."""
        arc = len(self.to)
        self.to += [v, u]
        self.cap += [cap, 0]
        self.adj[u].append(arc)
        self.adj[v].append(arc + 1)
        return arc

    def flow_on(self, arc: int) -> int:
        return self.cap[arc ^ 1]

    def _levels(self, s: int, t: int):
        level = [-1] * self.num_nodes
        level[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for arc in self.adj[u]:
                v = self.to[arc]
                if self.cap[arc] > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    queue.append(v)
        return level if level[t] >= 0 else None

    def max_flow(self, s: int, t: int) -> int:
        total = 0
        adj, to, cap = self.adj, self.to, self.cap
        while True:
            level = self._levels(s, t)
            if level is None:
                return total
            it = [0] * self.num_nodes

            def push(u: int, limit: int) -> int:
                if u == t:
                    return limit
                arcs = adj[u]
                while it[u] < len(arcs):
                    arc = arcs[it[u]]
                    v = to[arc]
                    if cap[arc] > 0 and level[v] == level[u] + 1:
                        got = push(v, min(limit, cap[arc]))
                        if got:
                            cap[arc] -= got
                            cap[arc ^ 1] += got
                            return got
                    it[u] += 1
                return 0

            while True:
                got = push(s, 1 << 60)
                if not got:
                    break
                total += got

    def reachable(self, s: int) -> set[int]:
        seen = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for arc in self.adj[u]:
                v = self.to[arc]
                if self.cap[arc] > 0 and v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen


class BoundedFlow:
    """Circulation with lower and upper bounds on every arc.

    Add an explicit return arc ``t -> s`` to model an s-t flow.  After
    :meth:`solve`, either :meth:`flow_on` reads a feasible circulation or
    :attr:`violated_set` holds a vertex set ``W`` whose entering lower bounds
    exceed its leaving capacities (Hoffman's condition fails at ``W``).
    """

    def __init__(self, num_nodes: int):
        self.num_nodes = num_nodes
        self.net = FlowNetwork(num_nodes + 2)
        self.source, self.sink = num_nodes, num_nodes + 1
        self.excess = [0] * num_nodes
        self.arcs: list[tuple[int, int, int, int, int]] = []
        self.violated_set: "set[int] | None" = None

    def add_arc(self, u: int, v: int, low: int, cap: int) -> int:
        if not 0 <= low <= cap:
            raise ValueError(f"arc {u}->{v} has bounds [{low}, {cap}]")
        idx = len(self.arcs)
        self.arcs.append((u, v, low, cap, self.net.add_edge(u, v, cap - low)))
        self.excess[v] += low
        self.excess[u] -= low
        return idx

    def solve(self) -> bool:
        demand = 0
        for v, ex in enumerate(self.excess):
            if ex > 0:
                self.net.add_edge(self.source, v, ex)
                demand += ex
            elif ex < 0:
                self.net.add_edge(v, self.sink, -ex)
        if self.net.max_flow(self.source, self.sink) == demand:
            self.violated_set = None
            return True
        self.violated_set = self.net.reachable(self.source) - {self.source}
        return False

    def flow_on(self, idx: int) -> int:
        _, _, low, _, arc = self.arcs[idx]
        return low + self.net.flow_on(arc)

    def cut_imbalance(self, nodes: set[int]) -> int:
        """Entering lower bounds minus leaving capacities; positive means violated."""
        entering = leaving = 0
        for u, v, low, cap, _ in self.arcs:
            if u not in nodes and v in nodes:
                entering += low
            elif u in nodes and v not in nodes:
                leaving += cap
        return entering - leaving
