"""Dependency DAG over sub-questions and the four tool-use scenario kinds."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import GraphError


class ScenarioKind(enum.Enum):
    SINGLE_HOP = "single_hop"
    PARALLEL_SINGLE_HOP = "parallel_single_hop"
    MULTI_HOP = "multi_hop"
    PARALLEL_MULTI_HOP = "parallel_multi_hop"

    @property
    def wire(self) -> str:
        return self.value

    @classmethod
    def from_wire(cls, name: str) -> "ScenarioKind":
        for kind in cls:
            if kind.value == name:
                return kind
        raise GraphError("UNKNOWN_SCENARIO", f"no scenario named {name!r}")


@dataclass(frozen=True)
class DependencyGraph:
    """Edge (u, v) means v depends on u."""

    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]

    def dependencies_of(self, node: str) -> tuple[str, ...]:
        return tuple(u for (u, v) in self.edges if v == node)

    def dependents_of(self, node: str) -> tuple[str, ...]:
        return tuple(v for (u, v) in self.edges if u == node)


def check_structure(graph: DependencyGraph) -> list[str]:
    """Structural violations: undeclared endpoints, duplicate edges, cycles."""
    problems: list[str] = []
    declared = set(graph.nodes)
    if len(declared) != len(graph.nodes):
        problems.append("duplicate node ids")
    for u, v in graph.edges:
        if u not in declared or v not in declared:
            problems.append(f"edge ({u}, {v}) references undeclared node")
    if len(set(graph.edges)) != len(graph.edges):
        problems.append("duplicate edges")
    if not _is_acyclic(graph):
        problems.append("cycle detected")
    return problems


def _is_acyclic(graph: DependencyGraph) -> bool:
    indeg = {n: 0 for n in graph.nodes}
    for u, v in graph.edges:
        if u not in indeg or v not in indeg:
            return False
        indeg[v] += 1
    queue = [n for n in graph.nodes if indeg[n] == 0]
    seen = 0
    while queue:
        node = queue.pop()
        seen += 1
        for child in graph.dependents_of(node):
            indeg[child] -= 1
            if indeg[child] == 0:
                queue.append(child)
    return seen == len(graph.nodes)


def classify(graph: DependencyGraph) -> ScenarioKind:
    """Map a dependency DAG onto one of the four scenario kinds.

    Single path covering all nodes (a strict chain, as given, transitive
    edges included) is required for MULTI_HOP; any mixed shape falls into
    PARALLEL_MULTI_HOP.
    """
    if not graph.nodes or check_structure(graph):
        raise GraphError("CLASSIFY_INVALID", "graph must be a non-empty DAG")
    n = len(graph.nodes)
    if n == 1:
        return ScenarioKind.SINGLE_HOP
    if not graph.edges:
        return ScenarioKind.PARALLEL_SINGLE_HOP
    if _is_chain(graph):
        return ScenarioKind.MULTI_HOP
    return ScenarioKind.PARALLEL_MULTI_HOP


def _is_chain(graph: DependencyGraph) -> bool:
    n = len(graph.nodes)
    if len(graph.edges) != n - 1:
        return False
    indeg = {node: 0 for node in graph.nodes}
    outdeg = {node: 0 for node in graph.nodes}
    for u, v in graph.edges:
        outdeg[u] += 1
        indeg[v] += 1
    if any(d > 1 for d in indeg.values()) or any(d > 1 for d in outdeg.values()):
        return False
    roots = [node for node in graph.nodes if indeg[node] == 0]
    if len(roots) != 1:
        return False
    # Walk from the unique root; a chain visits every node.
    length = 1
    node = roots[0]
    while True:
        nxt = graph.dependents_of(node)
        if not nxt:
            break
        node = nxt[0]
        length += 1
    return length == n


def solvable_frontier(graph: DependencyGraph, solved: set[str]) -> set[str]:
    """Unsolved nodes whose dependencies are all solved."""
    if not solved <= set(graph.nodes):
        raise GraphError("UNKNOWN_NODE", "solved set references undeclared nodes")
    frontier = set()
    for node in graph.nodes:
        if node in solved:
            continue
        if all(dep in solved for dep in graph.dependencies_of(node)):
            frontier.add(node)
    return frontier


def frontier_rounds(graph: DependencyGraph) -> list[list[str]]:
    """Topological rounds; each round is sorted by node id for determinism."""
    solved: set[str] = set()
    rounds: list[list[str]] = []
    while len(solved) < len(graph.nodes):
        frontier = solvable_frontier(graph, solved)
        if not frontier:
            raise GraphError("CLASSIFY_INVALID", "graph is not acyclic")
        rounds.append(sorted(frontier))
        solved |= frontier
    return rounds
