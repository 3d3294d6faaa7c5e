"""Ground-truth labels and synthetic planted-partition graphs."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ConfigError, DataError, ParseError
from .graph import EgoView, Graph, _iter_lines


@dataclass(frozen=True)
class LabelMap:
    """One institution per node name."""

    institutions: dict[str, str]

    def __len__(self) -> int:
        return len(self.institutions)

    def institution(self, node) -> str:
        try:
            return self.institutions[str(node)]
        except KeyError:
            raise DataError(f"node {node!r} has no label") from None

    def missing(self, nodes) -> list[str]:
        return [str(n) for n in nodes if str(n) not in self.institutions]

    def is_peer(self, observer, node) -> bool:
        """True when ``node`` shares the observer's institution."""
        return self.institution(node) == self.institution(observer)

    def binary(self, view: EgoView) -> np.ndarray:
        """0/1 label per local id of ``view`` (-1 where unlabelled)."""
        own = self.institution(view.graph.names[view.observer])
        get = self.institutions.get
        out = np.array([-1 if get(n) is None else int(get(n) == own) for n in view.names], dtype=np.int8)
        return out

    def positives(self, view: EgoView) -> np.ndarray:
        """Local ids sharing the observer's institution, observer excluded."""
        lab = self.binary(view)
        lab[view.observer_local] = 0
        return np.flatnonzero(lab == 1)

    def positive_ratio(self, nodes, observer) -> float:
        nodes = list(nodes)
        if not nodes:
            raise DataError("positive ratio of an empty node set")
        return sum(self.is_peer(observer, n) for n in nodes) / len(nodes)


def load_labels(source) -> LabelMap:
    """Read ``node<TAB>institution`` lines (a path or an iterable of lines)."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(_iter_lines(source), start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
            raise ParseError(f"expected 'node<TAB>institution', got {line!r}", lineno)
        node, inst = parts[0].strip(), parts[1].strip()
        if node in out and out[node] != inst:
            raise ParseError(f"node {node!r} labelled twice ({out[node]!r}, {inst!r})", lineno)
        out[node] = inst
    return LabelMap(out)


def write_labels(labels: LabelMap, path, graph: Graph | None = None) -> None:
    nodes = graph.names if graph is not None else sorted(labels.institutions)
    with open(path, "w", encoding="utf-8") as fh:
        for n in nodes:
            fh.write(f"{n}\t{labels.institution(n)}\n")


@dataclass(frozen=True)
class SbmSpec:
    """Planted partition: ``sizes[c]`` nodes in community c.

    Generation retries (continuing the same random stream) until ``observer``
    has at least one neighbour, up to ``max_attempts`` draws.
    """

    sizes: tuple[int, ...] = (150, 150, 150, 150)
    p_in: float = 0.15
    p_out: float = 0.01
    rng_seed: int = 0
    observer: int = 0
    max_attempts: int = 20

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        if not self.sizes or any(s < 1 for s in self.sizes):
            raise ConfigError(f"community sizes must be positive, got {self.sizes}")
        if not 0.0 <= self.p_out < self.p_in <= 1.0:
            raise ConfigError(f"need 0 <= p_out < p_in <= 1, got p_in={self.p_in}, p_out={self.p_out}")
        if not 0 <= self.observer < sum(self.sizes):
            raise ConfigError(f"observer {self.observer} outside 0..{sum(self.sizes) - 1}")
        if self.max_attempts < 1:
            raise ConfigError("max_attempts must be >= 1")

    @classmethod
    def from_json(cls, path) -> "SbmSpec":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        unknown = set(raw) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown SBM config keys: {sorted(unknown)}")
        return cls(**raw)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["sizes"] = list(self.sizes)
        return d


def _sample_sbm(spec: SbmSpec, rng: np.random.Generator) -> np.ndarray:
    community = np.repeat(np.arange(len(spec.sizes)), spec.sizes)
    n = len(community)
    rows, cols = np.triu_indices(n, k=1)
    p = np.where(community[rows] == community[cols], spec.p_in, spec.p_out)
    hit = rng.random(len(rows)) < p
    return np.stack([rows[hit], cols[hit]], axis=1)


def gen_sbm(spec: SbmSpec) -> tuple[Graph, LabelMap]:
    """Sample every unordered pair independently at ``p_in`` / ``p_out``.

    Nodes are named ``0..n-1`` in community order; community c is labelled ``c<c>``.
    """
    rng = np.random.default_rng(spec.rng_seed)
    n = sum(spec.sizes)
    for _ in range(spec.max_attempts):
        edges = _sample_sbm(spec, rng)
        if np.any(edges == spec.observer):
            break
    else:
        raise DataError(f"observer {spec.observer} stayed isolated after {spec.max_attempts} draws; "
                        "raise p_in/p_out or community sizes")
    graph = Graph.from_edges([str(i) for i in range(n)], edges)
    community = np.repeat(np.arange(len(spec.sizes)), spec.sizes)
    labels = LabelMap({str(i): f"c{c}" for i, c in enumerate(community)})
    return graph, labels


def export_id_map(graph: Graph, path) -> None:
    """Write ``name<TAB>id`` for every node, in id order."""
    with open(path, "w", encoding="utf-8") as fh:
        for i, name in enumerate(graph.names):
            fh.write(f"{name}\t{i}\n")


def load_id_map(path) -> dict[str, int]:
    out: dict[str, int] = {}
    for lineno, raw in enumerate(_iter_lines(path), start=1):
        parts = raw.rstrip("\r\n").split("\t")
        if len(parts) != 2:
            raise ParseError("expected 'name<TAB>id'", lineno)
        out[parts[0]] = int(parts[1])
    return out
