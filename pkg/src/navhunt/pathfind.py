"""Shortest paths over the navigation graph.

Dijkstra with a deterministic tie-break: among equal-length paths the
lexicographically smallest node-id sequence wins, so replays and bots
always agree on routes.
"""

from __future__ import annotations

import heapq

# adjacency: node -> list of (neighbor, edge_id, length)
Adjacency = dict[str, list[tuple[str, str, float]]]


def shortest_path(
    adj: Adjacency,
    start: str,
    goal: str,
    blocked_edges: frozenset[str] | set[str] = frozenset(),
) -> tuple[list[str], float] | None:
    """Minimal-length path from start to goal, or None when unreachable.

    Ties on total length are broken by the lexicographic order of the
    full node-id sequence.
    """
    if start == goal:
        return [start], 0.0
    # Heap entries carry the whole path so equal-distance pops order
    # lexicographically. Graphs here are building-scale, so this stays cheap.
    heap: list[tuple[float, tuple[str, ...]]] = [(0.0, (start,))]
    settled: set[str] = set()
    while heap:
        dist, path = heapq.heappop(heap)
        node = path[-1]
        if node in settled:
            continue
        settled.add(node)
        if node == goal:
            return list(path), dist
        for neighbor, edge_id, length in adj.get(node, ()):
            if edge_id in blocked_edges or neighbor in settled:
                continue
            heapq.heappush(heap, (dist + length, path + (neighbor,)))
    return None


def reachable(
    adj: Adjacency,
    start: str,
    goals: set[str],
    blocked_edges: frozenset[str] | set[str] = frozenset(),
) -> bool:
    """True when at least one goal node can be reached from start."""
    if start in goals:
        return True
    # Plain BFS over unblocked edges; lengths do not matter here.
    frontier = [start]
    seen = {start}
    while frontier:
        node = frontier.pop()
        for neighbor, edge_id, _ in adj.get(node, ()):
            if edge_id in blocked_edges or neighbor in seen:
                continue
            if neighbor in goals:
                return True
            seen.add(neighbor)
            frontier.append(neighbor)
    return False


def connected(adj: Adjacency, nodes: list[str]) -> bool:
    """True when every node is reachable from the first one."""
    if len(nodes) <= 1:
        return True
    seen = {nodes[0]}
    frontier = [nodes[0]]
    while frontier:
        node = frontier.pop()
        for neighbor, _, _ in adj.get(node, ()):
            if neighbor not in seen:
                seen.add(neighbor)
                frontier.append(neighbor)
    return len(seen) == len(nodes)
