"""Finite graphs, lower-adjacency streams for countable graphs, pattern checks.

A countable graph is described vertex by vertex: vertex ``k`` lists its
neighbours ``j < k``. Only backward degrees need to be finite, so graphs
that are not locally finite (the infinite star) are fine.
"""
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import FormatError, StreamExhausted

FAMILIES = ("path", "star", "complete", "empty", "random")


@dataclass(frozen=True)
class FiniteGraph:
    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("graph needs at least one vertex")
        norm = set()
        for e in self.edges:
            i, j = sorted(int(v) for v in e)
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            if not (0 <= i and j < self.n):
                raise ValueError(f"edge ({i}, {j}) out of range for n={self.n}")
            norm.add((i, j))
        object.__setattr__(self, "edges", frozenset(norm))

    def back_neighbors(self, k):
        """Neighbours of ``k`` with smaller labels, ascending."""
        return sorted(i for i, j in self.edges if j == k)

    def is_connected(self):
        seen = {0}
        stack = [0]
        adj = {v: [] for v in range(self.n)}
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n

    def to_json(self):
        return {"n": self.n, "edges": [list(e) for e in sorted(self.edges)]}

    @classmethod
    def from_json(cls, obj):
        try:
            return cls(int(obj["n"]), frozenset(tuple(e) for e in obj["edges"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad graph JSON: {exc}") from exc

    @classmethod
    def from_matrix(cls, a):
        a = np.asarray(a)
        n = a.shape[0]
        return cls(n, frozenset((i, j) for i in range(n) for j in range(i + 1, n) if a[i, j] != 0.0))


def read_graph_json(path):
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    return FiniteGraph.from_json(obj)


class LowerAdjacencyStream:
    """Deterministic, replayable source of back-neighbour lists.

    Built-in families: ``path``, ``star`` (centre 0), ``complete``,
    ``empty`` and ``random`` (each pair ``j < k`` joined with probability
    ``p``, drawn from a generator seeded by ``(seed, k)`` so any vertex can
    be replayed on its own). File-backed streams hold finitely many records.
    """

    def __init__(self, family=None, *, p=0.5, seed=0, records=None):
        if (family is None) == (records is None):
            raise ValueError("give exactly one of family or records")
        if family is not None and family not in FAMILIES:
            raise ValueError(f"unknown graph family {family!r}; choose from {FAMILIES}")
        self.family = family
        self.p = float(p)
        self.seed = int(seed)
        self.records = None if records is None else [tuple(r) for r in records]
        if self.records is not None:
            for k, r in enumerate(self.records):
                if any(not (0 <= j < k) for j in r):
                    raise FormatError(f"LADJ record {k} lists a neighbour not below {k}")
        self._cursor = 0

    def neighbors(self, k):
        if self.records is not None:
            if k >= len(self.records):
                raise StreamExhausted(f"graph stream has only {len(self.records)} vertices, need vertex {k}")
            return sorted(set(self.records[k]))
        if self.family == "path":
            return [k - 1] if k > 0 else []
        if self.family == "star":
            return [0] if k > 0 else []
        if self.family == "complete":
            return list(range(k))
        if self.family == "empty":
            return []
        rng = np.random.default_rng([self.seed, k])
        return [j for j, u in enumerate(rng.random(k)) if u < self.p]

    def __iter__(self):
        return self

    def __next__(self):
        if self.records is not None and self._cursor >= len(self.records):
            raise StopIteration
        nb = self.neighbors(self._cursor)
        self._cursor += 1
        return nb

    def reset(self):
        self._cursor = 0

    def header(self):
        if self.family is None:
            return "ladj v1"
        if self.family == "random":
            return f"ladj v1 family=random seed={self.seed} p={self.p!r}"
        return f"ladj v1 family={self.family}"

    def describe(self):
        if self.family is None:
            return {"family": None, "records": [list(r) for r in self.records]}
        d = {"family": self.family}
        if self.family == "random":
            d.update(seed=self.seed, p=self.p)
        return d

    @classmethod
    def from_description(cls, d):
        if d.get("family") is None:
            return cls(records=d["records"])
        return cls(d["family"], p=d.get("p", 0.5), seed=d.get("seed", 0))

    def dumps(self, n):
        lines = [self.header()]
        lines += [" ".join(map(str, self.neighbors(k))) for k in range(n)]
        return "\n".join(lines) + "\n"


def parse_ladj(text):
    """Parse an LADJ file.

    A header naming a family yields that family's stream; otherwise the
    following lines are the records, one per vertex.
    """
    lines = text.splitlines()
    if not lines or not lines[0].startswith("ladj v1"):
        raise FormatError("LADJ file must start with 'ladj v1'")
    opts = {}
    for tok in lines[0].split()[2:]:
        key, sep, val = tok.partition("=")
        if not sep:
            raise FormatError(f"bad header token {tok!r}")
        opts[key] = val
    if "family" in opts:
        try:
            return LowerAdjacencyStream(opts["family"], p=float(opts.get("p", 0.5)), seed=int(opts.get("seed", 0)))
        except ValueError as exc:
            raise FormatError(str(exc)) from exc
    records = []
    for k, ln in enumerate(lines[1:]):
        try:
            records.append([int(t) for t in ln.split()])
        except ValueError as exc:
            raise FormatError(f"record {k}: {exc}") from exc
    return LowerAdjacencyStream(records=records)


def read_ladj(path):
    return parse_ladj(Path(path).read_text())


def induced_prefix(stream, n):
    """The graph induced on vertices ``0..n-1``."""
    if n < 1:
        raise ValueError("n must be positive")
    edges = set()
    for k in range(n):
        edges.update((j, k) for j in stream.neighbors(k))
    return FiniteGraph(n, frozenset(edges))


@dataclass(frozen=True)
class PatternReport:
    ok: bool
    violations: tuple

    def __bool__(self):
        return self.ok


def validate_pattern(a, g, edge_floor=0.0):
    """Check that ``g`` is the graph of ``a``.

    Edge entries need ``|a_ij| >= edge_floor`` (and nonzero); every other
    off-diagonal entry must be exactly ``0.0``.
    """
    a = np.asarray(a)
    if a.shape != (g.n, g.n):
        raise ValueError(f"order mismatch: matrix {a.shape}, graph n={g.n}")
    violations = []
    for i in range(g.n):
        for j in range(i + 1, g.n):
            v = a[i, j]
            if (i, j) in g.edges:
                if v == 0.0 or abs(v) < edge_floor:
                    violations.append(f"edge ({i}, {j}) has entry {v!r} below floor {edge_floor!r}")
            elif v != 0.0:
                violations.append(f"non-edge ({i}, {j}) has nonzero entry {v!r}")
    return PatternReport(not violations, tuple(violations))
