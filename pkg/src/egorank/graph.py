"""Graph storage and observer-centred h-hop views.

Nodes are arbitrary string tokens at the file boundary and dense integers
internally. Ids are assigned by sorting the tokens (numerically when every
token is an integer), so integer-named inputs ``0..n-1`` keep their names as
ids and the assignment never depends on line order.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import ConfigError, DataError, ParseError


@dataclass(frozen=True)
class LoadReport:
    lines: int = 0
    edges: int = 0
    duplicates: int = 0
    self_loops: int = 0


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph in CSR form.

    ``indices[indptr[i]:indptr[i + 1]]`` holds the sorted neighbours of node i.
    """

    names: tuple[str, ...]
    indptr: np.ndarray
    indices: np.ndarray
    report: LoadReport | None = None
    _index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self._index is None:
            object.__setattr__(self, "_index", {n: i for i, n in enumerate(self.names)})
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)

    @classmethod
    def from_edges(cls, names: Sequence[str], edges, report: LoadReport | None = None) -> "Graph":
        """Build from ``(u, v)`` integer pairs; drops loops and duplicates."""
        n = len(names)
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        edges = edges[edges[:, 0] != edges[:, 1]]
        both = np.concatenate([edges, edges[:, ::-1]])
        if len(both):
            both = np.unique(both, axis=0)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, both[:, 0] + 1, 1)
        np.cumsum(indptr, out=indptr)
        # np.unique sorts rows lexicographically, so neighbour lists come out sorted.
        return cls(tuple(str(x) for x in names), indptr, both[:, 1].copy(), report)

    @property
    def node_count(self) -> int:
        return len(self.names)

    @property
    def edge_count(self) -> int:
        return len(self.indices) // 2

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def index_of(self, name) -> int:
        try:
            return self._index[str(name)]
        except KeyError:
            raise DataError(f"unknown node {name!r}") from None

    def edges(self) -> np.ndarray:
        """Each undirected edge once, as ``(u, v)`` with ``u < v``."""
        rows = np.repeat(np.arange(self.node_count), self.degrees)
        keep = rows < self.indices
        return np.stack([rows[keep], self.indices[keep]], axis=1)


def _sort_tokens(tokens) -> list[str]:
    tokens = list(tokens)
    try:
        return sorted(tokens, key=int)
    except ValueError:
        return sorted(tokens)


def _iter_lines(source) -> Iterable[str]:
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            yield from fh
    else:
        yield from source


def load_graph(source) -> Graph:
    """Read a whitespace-separated edge list (a path or an iterable of lines).

    Blank lines and ``#`` comments are skipped. Duplicate edges (in either
    orientation) and self-loops are dropped and counted in ``graph.report``.
    """
    pairs: list[tuple[str, str]] = []
    seen: set[tuple[str, str]] = set()
    duplicates = loops = lines = 0
    for lineno, raw in enumerate(_iter_lines(source), start=1):
        lines += 1
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected 2 node tokens, got {len(parts)}: {raw.strip()!r}", lineno)
        u, v = parts
        if u == v:
            loops += 1
            seen.add((u, u))
            continue
        key = (u, v) if u < v else (v, u)
        if key in seen:
            duplicates += 1
            continue
        seen.add(key)
        pairs.append(key)
    if not seen:
        raise DataError("edge list is empty")
    names = _sort_tokens({t for pair in seen for t in pair})
    index = {n: i for i, n in enumerate(names)}
    edges = [(index[u], index[v]) for u, v in pairs]
    report = LoadReport(lines=lines, edges=len(pairs), duplicates=duplicates, self_loops=loops)
    return Graph.from_edges(names, edges, report)


@dataclass(frozen=True, eq=False)
class EgoView:
    """The part of a graph an observer can see within ``hops`` hops.

    Local ids are dense, ordered by level and then by global id, so the
    observer is always local id 0 and each level ring is a contiguous slice.
    Only edges with at least one endpoint below the outermost level are kept.
    """

    graph: Graph
    observer: int
    hops: int
    global_ids: np.ndarray
    levels: np.ndarray
    ring_offsets: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray

    @property
    def node_count(self) -> int:
        return len(self.global_ids)

    @property
    def edge_count(self) -> int:
        return len(self.indices) // 2

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def observer_local(self) -> int:
        return 0

    @property
    def names(self) -> list[str]:
        return [self.graph.names[g] for g in self.global_ids]

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def ring(self, r: int) -> np.ndarray:
        """Local ids at exactly level ``r``."""
        if not 0 <= r <= self.hops:
            raise ConfigError(f"level {r} outside 0..{self.hops}")
        return np.arange(self.ring_offsets[r], self.ring_offsets[r + 1])

    def within(self, r: int) -> np.ndarray:
        """Local ids at level <= ``r``."""
        if not 0 <= r <= self.hops:
            raise ConfigError(f"level {r} outside 0..{self.hops}")
        return np.arange(self.ring_offsets[r + 1])

    @cached_property
    def _local_index(self) -> dict[int, int]:
        return {int(gid): i for i, gid in enumerate(self.global_ids)}

    def local_id(self, node) -> int:
        """Local id for a node name or global integer id."""
        g = int(node) if isinstance(node, (int, np.integer)) else self.graph.index_of(node)
        try:
            return self._local_index[g]
        except KeyError:
            observer = self.graph.names[self.observer]
            raise DataError(f"node {node!r} is not in the view of observer {observer!r}") from None

    def edges(self) -> np.ndarray:
        rows = np.repeat(np.arange(self.node_count), self.degrees)
        keep = rows < self.indices
        return np.stack([rows[keep], self.indices[keep]], axis=1)

    def adjacency(self) -> sp.csr_matrix:
        data = np.ones(len(self.indices))
        n = self.node_count
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(n, n))


def extract_ego(g: Graph, observer, h: int) -> EgoView:
    """Breadth-first h-hop view of ``observer`` with outer-ring edges hidden."""
    if h < 1:
        raise ConfigError(f"hops must be >= 1, got {h}")
    o = observer if isinstance(observer, (int, np.integer)) else g.index_of(observer)
    if not 0 <= o < g.node_count:
        raise DataError(f"unknown observer {observer!r}")
    if g.degrees[o] == 0:
        raise DataError(f"observer {g.names[o]!r} has no neighbours")

    unseen = h + 1
    level = np.full(g.node_count, unseen, dtype=np.int64)
    level[o] = 0
    frontier = np.array([o])
    for depth in range(1, h + 1):
        if not len(frontier):
            break
        nbrs = np.concatenate([g.indices[g.indptr[u]:g.indptr[u + 1]] for u in frontier])
        nbrs = np.unique(nbrs[level[nbrs] == unseen])
        level[nbrs] = depth
        frontier = nbrs

    members = np.flatnonzero(level <= h)
    order = np.lexsort((members, level[members]))
    global_ids = members[order]
    node_levels = level[global_ids]
    local = np.full(g.node_count, -1, dtype=np.int64)
    local[global_ids] = np.arange(len(global_ids))

    deg = g.degrees[global_ids]
    src = np.repeat(global_ids, deg)
    dst = np.concatenate([g.indices[g.indptr[u]:g.indptr[u + 1]] for u in global_ids])
    ls, ld = level[src], level[dst]
    visible = ((ls <= h - 1) & (ld <= h)) | ((ld <= h - 1) & (ls <= h))
    rows, cols = local[src[visible]], local[dst[visible]]
    order = np.lexsort((cols, rows))
    rows, cols = rows[order], cols[order]
    n = len(global_ids)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, rows + 1, 1)
    np.cumsum(indptr, out=indptr)
    ring_offsets = np.searchsorted(node_levels, np.arange(h + 2), side="left")
    for arr in (global_ids, node_levels, indptr, cols, ring_offsets):
        arr.setflags(write=False)
    return EgoView(g, int(o), h, global_ids, node_levels, ring_offsets, indptr, cols)


def degrees(view: EgoView) -> np.ndarray:
    """Visible degree per local node; outer-ring degrees are underestimates."""
    return view.degrees


def write_edge_list(obj: Graph | EgoView, path, use_names: bool = False) -> None:
    """Write edges one per line. Views are written with local ids by default."""
    edges = obj.edges()
    if isinstance(obj, EgoView):
        names = obj.names if use_names else [str(i) for i in range(obj.node_count)]
    else:
        names = obj.names
    with open(path, "w", encoding="utf-8") as fh:
        for u, v in edges:
            fh.write(f"{names[u]} {names[v]}\n")
