"""List scheduling of gate DAGs into disjoint time steps."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .circuit import Gate


@dataclass
class Node:
    gate: Gate
    after: list[int] = field(default_factory=list)
    min_step: int = 0


class GateDAG:
    def __init__(self) -> None:
        self.nodes: list[Node] = []

    def add(self, gate: Gate, after: list[int] | tuple[int, ...] = (), min_step: int = 0) -> int:
        self.nodes.append(Node(gate, list(after), min_step))
        return len(self.nodes) - 1

    def _tails(self) -> list[int]:
        succ: list[list[int]] = [[] for _ in self.nodes]
        for i, nd in enumerate(self.nodes):
            for j in nd.after:
                succ[j].append(i)
        tail = [0] * len(self.nodes)
        for i in reversed(range(len(self.nodes))):
            tail[i] = 1 + max((tail[j] for j in succ[i]), default=0)
        return tail

    def schedule(self, restarts: int = 1, seed: int = 0) -> list[list[Gate]]:
        """Greedy critical-path list scheduling; the shallowest of ``restarts`` tries."""
        for i, nd in enumerate(self.nodes):
            if any(j >= i for j in nd.after):
                raise ValueError("dependencies must point to earlier nodes")
        tail = self._tails()
        rnd = random.Random(seed)
        best: list[list[Gate]] | None = None
        for attempt in range(restarts):
            noise = [rnd.random() if attempt else 0.0 for _ in self.nodes]
            placed = [-1] * len(self.nodes)
            steps: list[list[Gate]] = []
            busy: list[set[int]] = []
            order = sorted(range(len(self.nodes)), key=lambda i: (-tail[i] - noise[i], i))
            remaining = set(range(len(self.nodes)))
            t = 0
            while remaining:
                if len(steps) <= t:
                    steps.append([])
                    busy.append(set())
                for i in order:
                    if i not in remaining:
                        continue
                    nd = self.nodes[i]
                    if nd.min_step > t or any(placed[j] < 0 or placed[j] >= t for j in nd.after):
                        continue
                    if busy[t].intersection(nd.gate.qubits):
                        continue
                    placed[i] = t
                    steps[t].append(nd.gate)
                    busy[t].update(nd.gate.qubits)
                    remaining.discard(i)
                t += 1
            if best is None or len(steps) < len(best):
                best = steps
        assert best is not None
        return best


def sequential_dag(gates: list[Gate]) -> GateDAG:
    """DAG keeping program order between gates that share a qubit."""
    dag = GateDAG()
    last: dict[int, int] = {}
    for g in gates:
        deps = sorted({last[q] for q in g.qubits if q in last})
        i = dag.add(g, deps)
        for q in g.qubits:
            last[q] = i
    return dag
