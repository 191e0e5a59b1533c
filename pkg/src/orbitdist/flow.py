"""Highest-label push-relabel maximum flow on small integer-capacity graphs."""

from __future__ import annotations


class MaxFlow:
    """Directed graph with integer capacities; exact arithmetic throughout."""

    def __init__(self, n: int):
        self.n = n
        self.adj: list[list[int]] = [[] for _ in range(n)]
        self.to: list[int] = []
        self.cap: list[int] = []

    def add_edge(self, u: int, v: int, capacity: int) -> None:
        self.adj[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(int(capacity))
        self.adj[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(0)

    def max_flow(self, s: int, t: int) -> int:
        n = self.n
        height = [0] * n
        height[s] = n
        excess = [0] * n
        for eid in self.adj[s]:
            amt = self.cap[eid]
            if amt > 0:
                self.cap[eid] = 0
                self.cap[eid ^ 1] += amt
                excess[self.to[eid]] += amt
                excess[s] -= amt
        buckets: list[list[int]] = [[] for _ in range(2 * n + 1)]
        for v in range(n):
            if v not in (s, t) and excess[v] > 0:
                buckets[height[v]].append(v)
        highest = 0
        while highest >= 0:
            while highest >= 0 and not buckets[highest]:
                highest -= 1
            if highest < 0:
                break
            v = buckets[highest].pop()
            if v in (s, t) or excess[v] <= 0 or height[v] != highest:
                continue
            while excess[v] > 0:
                pushed = False
                for eid in self.adj[v]:
                    if self.cap[eid] > 0 and height[v] == height[self.to[eid]] + 1:
                        amt = min(excess[v], self.cap[eid])
                        w = self.to[eid]
                        self.cap[eid] -= amt
                        self.cap[eid ^ 1] += amt
                        excess[v] -= amt
                        excess[w] += amt
                        if w not in (s, t) and excess[w] == amt:
                            buckets[height[w]].append(w)
                            highest = max(highest, height[w])
                        pushed = True
                        if excess[v] == 0:
                            break
                if excess[v] == 0:
                    break
                if not pushed:
                    new_h = min((height[self.to[eid]] + 1
                                 for eid in self.adj[v] if self.cap[eid] > 0),
                                default=2 * n)
                    if new_h >= 2 * n:
                        height[v] = 2 * n
                        break
                    height[v] = new_h
                    buckets[new_h].append(v)
                    highest = max(highest, new_h)
                    break
        return excess[t]
