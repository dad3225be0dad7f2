"""Suspicious-region discovery through k-core peeling.

Dense groups of anomalously interconnected nodes survive peeling at high
k, so each round extracts the k-core, splits it into connected
components, and reports those components as candidate substructures.
Rounds start at the ceiling of the average degree and continue with
k+1, k+2, ... until a k-core comes back empty.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .graph import AttributedGraph, average_degree


@dataclass
class Substructure:
    """A connected component of some k-core.

    ``avg_similarity`` is the mean pairwise embedding similarity of the
    members; it stays None until the scoring stage fills it in.
    """

    members: tuple[int, ...]
    k: int
    avg_similarity: float | None = None

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def pair_count(self) -> int:
        return len(self.members) * (len(self.members) - 1) // 2


@dataclass
class RoundSchedule:
    """Ordered rounds of substructure discovery, one per core order k."""

    k_start: int
    rounds: list[tuple[int, list[Substructure]]] = field(default_factory=list)

    @property
    def round_count(self) -> int:
        return len(self.rounds)


def core_numbers(graph: AttributedGraph) -> np.ndarray:
    """Core number of every node via bin-sort peeling, O(n + m).

    The k-core is exactly the set of nodes with core number >= k.
    """
    n = graph.n
    degree = graph.degrees.copy()
    max_deg = int(degree.max()) if n else 0

    # Bucket the nodes by degree so the minimum-degree node is O(1) away.
    bin_start = np.zeros(max_deg + 2, dtype=np.int64)
    for d in degree:
        bin_start[d + 1] += 1
    bin_start = np.cumsum(bin_start)

    position = np.zeros(n, dtype=np.int64)
    ordered = np.zeros(n, dtype=np.int64)
    fill = bin_start[:-1].copy()
    for v in range(n):
        position[v] = fill[degree[v]]
        ordered[position[v]] = v
        fill[degree[v]] += 1

    bin_ptr = bin_start[:-1].copy()
    core = degree.copy()
    for i in range(n):
        v = ordered[i]
        for u in graph.neighbors[v]:
            if core[u] > core[v]:
                # Move u one bucket down: swap it with the first node of
                # its current bucket, then advance that bucket's pointer.
                du = core[u]
                pu = position[u]
                pw = bin_ptr[du]
                w = ordered[pw]
                if u != w:
                    ordered[pu], ordered[pw] = w, u
                    position[u], position[w] = pw, pu
                bin_ptr[du] += 1
                core[u] -= 1
    return core


def k_core(graph: AttributedGraph, k: int) -> set[int]:
    """Maximal node set where every node has >= k neighbors inside the set."""
    if k < 0:
        raise ValueError("k must be non-negative")
    core = core_numbers(graph)
    return {int(v) for v in np.nonzero(core >= k)[0]}


def connected_substructures(
    graph: AttributedGraph, core_nodes: set[int], k: int = 0
) -> list[Substructure]:
    """Connected components of the subgraph induced by ``core_nodes``.

    Components are ordered by their smallest member id; members are
    sorted within each component.
    """
    remaining = set(core_nodes)
    components: list[Substructure] = []
    for start in sorted(core_nodes):
        if start not in remaining:
            continue
        seen = {start}
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for u in graph.neighbors[v]:
                u = int(u)
                if u in remaining and u not in seen:
                    seen.add(u)
                    queue.append(u)
        remaining -= seen
        components.append(Substructure(members=tuple(sorted(seen)), k=k))
    return components


def propose_regions(graph: AttributedGraph) -> RoundSchedule:
    """Run k-core rounds from ceil(average degree) until an empty core.

    Singleton components are discarded: with no node pair inside there
    is no pairwise similarity to score. The empty round that terminates
    the loop is not part of the schedule, so ``round_count`` may be 0
    when even the first core is empty.
    """
    k_start = math.ceil(average_degree(graph))
    core = core_numbers(graph)
    schedule = RoundSchedule(k_start=k_start)
    k = k_start
    while True:
        members = {int(v) for v in np.nonzero(core >= k)[0]}
        if not members:
            break
        substructures = [s for s in connected_substructures(graph, members, k) if s.size >= 2]
        schedule.rounds.append((k, substructures))
        k += 1
    return schedule


def dump_regions(schedule: RoundSchedule, path: str | Path) -> None:
    """Write the schedule as JSON for inspection."""
    payload = {
        "k_start": schedule.k_start,
        "round_count": schedule.round_count,
        "rounds": [
            {"k": k, "substructures": [list(s.members) for s in subs]}
            for k, subs in schedule.rounds
        ],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
