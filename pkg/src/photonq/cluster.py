"""Graph (cluster) states, stabilizer checks and Z-basis qubit removal."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .statevec import (
    MeasurementOutcome,
    OutcomeMode,
    PureState,
    apply_cz,
    apply_pauli,
    expect_pauli_string,
    measure_z,
    plus_state,
)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``0..vertex_count-1``.

    Edges are stored as sorted pairs, so ``(1, 0)`` and ``(0, 1)`` are the
    same edge.
    """

    vertex_count: int
    edges: frozenset = frozenset()

    def __post_init__(self):
        if self.vertex_count < 1:
            raise ValueError("graph needs at least one vertex")
        normalized = set()
        for edge in self.edges:
            u, v = edge
            if u == v:
                raise ValueError(f"self-loop on vertex {u}")
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise ValueError(f"edge {edge} has an endpoint outside the graph")
            normalized.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(normalized))

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        edges = list(edges)
        seen = {(min(u, v), max(u, v)) for u, v in edges}
        if len(seen) != len(edges):
            raise ValueError("duplicate edge")
        return cls(vertex_count, frozenset(edges))

    @classmethod
    def path(cls, m: int) -> "Graph":
        return cls(m, frozenset((j, j + 1) for j in range(m - 1)))

    def neighbors(self, v: int) -> list[int]:
        return sorted(b if a == v else a for a, b in self.edges if v in (a, b))

    def remove_vertex(self, q: int) -> "Graph":
        """Delete ``q`` and its edges; higher vertices shift down by one."""
        if not 0 <= q < self.vertex_count:
            raise IndexError(f"vertex {q} not in graph")
        if self.vertex_count == 1:
            raise ValueError("cannot remove the last vertex")

        def shift(v):
            return v - 1 if v > q else v

        kept = (tuple(map(shift, e)) for e in self.edges if q not in e)
        return Graph(self.vertex_count - 1, frozenset(kept))


def graph_state(g: Graph) -> PureState:
    state = plus_state(g.vertex_count)
    for u, v in sorted(g.edges):
        state = apply_cz(state, u, v)
    return state


def linear_cluster(m: int) -> PureState:
    return graph_state(Graph.path(m))


def stabilizer_check(state: PureState, g: Graph) -> list[tuple[int, float]]:
    """Expectation of every generator ``K_j = X_j prod_{k in N(j)} Z_k``."""
    if state.qubit_count != g.vertex_count:
        raise ValueError(
            f"state has {state.qubit_count} qubits, graph has {g.vertex_count} vertices"
        )
    results = []
    for j in range(g.vertex_count):
        ops = ["I"] * g.vertex_count
        ops[j] = "X"
        for k in g.neighbors(j):
            ops[k] = "Z"
        results.append((j, expect_pauli_string(state, ops)))
    return results


def remove_qubit_z(
    state: PureState, g: Graph, q: int, mode: OutcomeMode
) -> tuple[MeasurementOutcome, Graph]:
    """Measure vertex ``q`` in Z and return the state of the vertex-deleted graph.

    On outcome 1 every former neighbour receives a Pauli Z, which maps the
    posterior exactly onto ``graph_state(g.remove_vertex(q))``.
    """
    if state.qubit_count != g.vertex_count:
        raise ValueError("state and graph sizes differ")
    smaller = g.remove_vertex(q)
    outcome = measure_z(state, q, mode)
    posterior = outcome.posterior
    if outcome.s == 1:
        for k in g.neighbors(q):
            posterior = apply_pauli(posterior, k - 1 if k > q else k, "Z")
    return MeasurementOutcome(outcome.s, outcome.probability, posterior), smaller
