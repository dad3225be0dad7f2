"""Attributed graph container, file ingestion and adjacency utilities.

Graphs are simple and undirected: dense integer node ids in [0, n), no
self-loops, no duplicate edges, and a dense float64 attribute matrix with
one row per node.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError

KIND_NONE = "none"
KIND_TOPOLOGY = "topology"
KIND_ATTRIBUTE = "attribute"

_KIND_CODES = {KIND_NONE: 0, KIND_TOPOLOGY: 1, KIND_ATTRIBUTE: 2}
_KIND_NAMES = {v: k for k, v in _KIND_CODES.items()}


@dataclass(frozen=True)
class LoadStats:
    """Bookkeeping from edge ingestion."""

    dropped_self_loops: int = 0
    dropped_duplicates: int = 0


class AttributedGraph:
    """Immutable undirected graph with node attributes.

    Safe to share across threads once constructed. ``edges`` holds each
    undirected edge once as a (u, v) pair with u < v, sorted.
    """

    def __init__(
        self,
        node_count: int,
        edges: Iterable[tuple[int, int]],
        attributes: np.ndarray,
        stats: LoadStats | None = None,
    ):
        attributes = np.asarray(attributes, dtype=np.float64)
        if attributes.ndim != 2:
            raise DataError(f"attribute matrix must be 2-D, got shape {attributes.shape}")
        if attributes.shape[0] != node_count:
            raise DataError(
                f"attribute rows ({attributes.shape[0]}) do not match node count ({node_count})"
            )

        dropped_loops = 0
        dropped_dups = 0
        edge_set: set[tuple[int, int]] = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u < 0 or u >= node_count or v < 0 or v >= node_count:
                raise DataError(f"edge ({u}, {v}) references a node id outside [0, {node_count})")
            if u == v:
                dropped_loops += 1
                continue
            key = (u, v) if u < v else (v, u)
            if key in edge_set:
                dropped_dups += 1
                continue
            edge_set.add(key)

        self.node_count = node_count
        self.edges: tuple[tuple[int, int], ...] = tuple(sorted(edge_set))
        self._edge_set = frozenset(edge_set)
        self.attributes = attributes
        self.attributes.setflags(write=False)
        base = stats or LoadStats()
        self.stats = LoadStats(
            dropped_self_loops=base.dropped_self_loops + dropped_loops,
            dropped_duplicates=base.dropped_duplicates + dropped_dups,
        )

        adj: list[list[int]] = [[] for _ in range(node_count)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        self.neighbors: tuple[np.ndarray, ...] = tuple(
            np.array(sorted(ns), dtype=np.int64) for ns in adj
        )
        self.degrees = np.array([len(ns) for ns in adj], dtype=np.int64)

    @property
    def n(self) -> int:
        return self.node_count

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def attr_dim(self) -> int:
        return self.attributes.shape[1]

    def has_edge(self, u: int, v: int) -> bool:
        key = (u, v) if u < v else (v, u)
        return key in self._edge_set

    def with_edges(self, edges: Iterable[tuple[int, int]]) -> "AttributedGraph":
        """New graph with the same attributes and a replaced edge set."""
        return AttributedGraph(self.node_count, edges, self.attributes, stats=self.stats)

    def with_attributes(self, attributes: np.ndarray) -> "AttributedGraph":
        """New graph with the same edges and a replaced attribute matrix."""
        return AttributedGraph(self.node_count, self.edges, attributes, stats=self.stats)

    def __repr__(self) -> str:  # pragma: no cover
        return f"AttributedGraph(n={self.n}, m={self.m}, d={self.attr_dim})"


@dataclass
class GroundTruth:
    """Per-node anomaly labels with the injector kind that produced them."""

    kinds: np.ndarray  # int8 codes, see _KIND_CODES

    @classmethod
    def clean(cls, node_count: int) -> "GroundTruth":
        return cls(kinds=np.zeros(node_count, dtype=np.int8))

    @property
    def labels(self) -> np.ndarray:
        return (self.kinds != 0).astype(np.int8)

    def kind_of(self, node: int) -> str:
        return _KIND_NAMES[int(self.kinds[node])]

    def count(self, kind: str) -> int:
        return int(np.sum(self.kinds == _KIND_CODES[kind]))

    def mark(self, nodes: Iterable[int], kind: str) -> None:
        code = _KIND_CODES[kind]
        for node in nodes:
            self.kinds[node] = code

    def copy(self) -> "GroundTruth":
        return GroundTruth(kinds=self.kinds.copy())

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["node_id", "label", "kind"])
            for i, code in enumerate(self.kinds):
                writer.writerow([i, int(code != 0), _KIND_NAMES[int(code)]])

    @classmethod
    def from_csv(cls, path: str | Path) -> "GroundTruth":
        rows: list[tuple[int, int, str]] = []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != ["node_id", "label", "kind"]:
                raise DataError(f"{path}: expected header node_id,label,kind")
            for lineno, row in enumerate(reader, start=2):
                try:
                    rows.append((int(row[0]), int(row[1]), row[2]))
                except (ValueError, IndexError) as exc:
                    raise DataError(f"{path}, line {lineno}: malformed row {row!r}") from exc
        kinds = np.zeros(len(rows), dtype=np.int8)
        for node, label, kind in rows:
            if kind not in _KIND_CODES:
                raise DataError(f"{path}: unknown kind {kind!r} for node {node}")
            if node < 0 or node >= len(rows):
                raise DataError(f"{path}: node id {node} outside [0, {len(rows)})")
            code = _KIND_CODES[kind]
            if label != int(code != 0):
                raise DataError(f"{path}: node {node} label {label} inconsistent with kind {kind}")
            kinds[node] = code
        return cls(kinds=kinds)


def _read_attributes(path: str | Path) -> np.ndarray:
    rows: list[list[float]] = []
    width: int | None = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            try:
                values = [float(p) for p in parts]
            except ValueError as exc:
                raise DataError(f"{path}, line {lineno}: non-numeric attribute value") from exc
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise DataError(
                    f"{path}, line {lineno}: expected {width} values, got {len(values)}"
                )
            rows.append(values)
    if not rows:
        raise DataError(f"{path}: attribute file is empty")
    return np.array(rows, dtype=np.float64)


def read_id_map(path: str | Path) -> dict[str, int]:
    """Read an external-to-internal id map ("external_id,internal_id" CSV)."""
    mapping: dict[str, int] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if lineno == 1 and row == ["external_id", "internal_id"]:
                continue
            if len(row) != 2:
                raise DataError(f"{path}, line {lineno}: expected two columns")
            ext, internal = row[0], row[1]
            try:
                mapping[ext] = int(internal)
            except ValueError as exc:
                raise DataError(f"{path}, line {lineno}: internal id must be an integer") from exc
    return mapping


def write_id_map(path: str | Path, mapping: dict[str, int]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["external_id", "internal_id"])
        for ext, internal in sorted(mapping.items(), key=lambda kv: kv[1]):
            writer.writerow([ext, internal])


def load_graph(
    edge_path: str | Path,
    attr_path: str | Path,
    id_map_path: str | Path | None = None,
) -> AttributedGraph:
    """Load a graph from an edge list and an attribute CSV.

    The edge list holds one "u v" pair per line ('#' starts a comment);
    the attribute CSV has no header and row i belongs to node i. When an
    id map is given, edge endpoints are external ids translated through
    it; otherwise they must already be dense integers. Self-loops are
    dropped and counted in ``stats``; duplicate edges are merged.
    """
    attributes = _read_attributes(attr_path)
    n = attributes.shape[0]
    id_map = read_id_map(id_map_path) if id_map_path is not None else None

    edges: list[tuple[int, int]] = []
    with open(edge_path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise DataError(f"{edge_path}, line {lineno}: expected two node ids")
            if id_map is not None:
                try:
                    u, v = id_map[parts[0]], id_map[parts[1]]
                except KeyError as exc:
                    raise DataError(
                        f"{edge_path}, line {lineno}: id {exc.args[0]!r} missing from id map"
                    ) from exc
            else:
                try:
                    u, v = int(parts[0]), int(parts[1])
                except ValueError as exc:
                    raise DataError(f"{edge_path}, line {lineno}: node ids must be integers") from exc
            if u < 0 or u >= n or v < 0 or v >= n:
                raise DataError(
                    f"{edge_path}, line {lineno}: node id outside [0, {n}) "
                    f"(attribute file defines {n} nodes)"
                )
            edges.append((u, v))
    return AttributedGraph(n, edges, attributes)


def save_graph(graph: AttributedGraph, edge_path: str | Path, attr_path: str | Path) -> None:
    """Write a graph back to the edge-list and attribute-CSV formats."""
    with open(edge_path, "w") as fh:
        for u, v in graph.edges:
            fh.write(f"{u} {v}\n")
    with open(attr_path, "w") as fh:
        for row in graph.attributes:
            fh.write(",".join(repr(float(x)) for x in row))
            fh.write("\n")


def average_degree(graph: AttributedGraph) -> float:
    """Mean node degree, 2m/n."""
    return 2.0 * graph.m / graph.n


def normalized_adjacency(graph: AttributedGraph, node_subset: Sequence[int]) -> np.ndarray:
    """Symmetrically normalized adjacency of an induced subgraph.

    Self-loops are added before normalization, so the result is
    D^{-1/2} (A_sub + I) D^{-1/2} with D the row sums of A_sub + I. This
    keeps singleton subsets well defined (a 1x1 identity).
    """
    if len(node_subset) == 0:
        raise ValueError("node_subset must be non-empty")
    t = len(node_subset)
    adj = np.eye(t, dtype=np.float64)
    for a in range(t):
        for b in range(a + 1, t):
            if graph.has_edge(node_subset[a], node_subset[b]):
                adj[a, b] = 1.0
                adj[b, a] = 1.0
    degree = adj.sum(axis=1)
    return adj / np.sqrt(degree[:, None] * degree[None, :])
