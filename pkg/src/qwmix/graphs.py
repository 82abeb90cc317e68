"""Benchmark graphs and their Cartesian powers.

Vertices are indexed 0..N-1. Lattice and power graphs use mixed-radix
little-endian indexing: coordinate 0 is the least significant digit, so
vertex (x0, x1, ..., x_{d-1}) of an n-ary lattice has index
sum(x_j * n**j). This makes tensor-product identities exact Kronecker
index identities downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import state_cap


class StateCapError(ValueError):
    """Requested construction exceeds the configured dense-state cap."""


def _check_cap(n_states: int) -> None:
    cap = state_cap()
    if n_states > cap:
        raise StateCapError(f"{n_states} states exceeds the configured cap of {cap}")


def _normalize_edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph: no self-loops, no duplicate edges."""

    n: int
    edges: frozenset[tuple[int, int]]
    kind_tag: str = "custom"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"vertex_count must be positive, got {self.n}")
        for (u, v) in self.edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u},{v}) out of range for {self.n} vertices")
            if u > v:
                raise ValueError(f"edge ({u},{v}) not normalized")

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for (u, v) in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def neighbors(self, v: int) -> list[int]:
        out = []
        for (a, b) in self.edges:
            if a == v:
                out.append(b)
            elif b == v:
                out.append(a)
        return sorted(out)

    def adjacency_matrix(self) -> np.ndarray:
        A = np.zeros((self.n, self.n))
        for (u, v) in self.edges:
            A[u, v] = 1.0
            A[v, u] = 1.0
        return A

    def is_connected(self) -> bool:
        if self.n == 1:
            return True
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for (u, v) in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        seen = np.zeros(self.n, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if not seen[y]:
                    seen[y] = True
                    stack.append(y)
        return bool(seen.all())


def cycle(n: int) -> Graph:
    """Cycle Z_n; n = 2 degenerates to a single edge."""
    if n < 2:
        raise ValueError(f"cycle needs n >= 2, got n={n}")
    _check_cap(n)
    edges = {_normalize_edge(x, (x + 1) % n) for x in range(n)}
    return Graph(n, frozenset(edges), f"cycle({n})")


def path(n: int) -> Graph:
    if n < 2:
        raise ValueError(f"path needs n >= 2, got n={n}")
    _check_cap(n)
    edges = {(x, x + 1) for x in range(n - 1)}
    return Graph(n, frozenset(edges), f"path({n})")


def complete(n: int) -> Graph:
    if n < 2:
        raise ValueError(f"complete needs N >= 2, got N={n}")
    _check_cap(n)
    edges = {(u, v) for u in range(n) for v in range(u + 1, n)}
    return Graph(n, frozenset(edges), f"complete({n})")


def hypercube(d: int) -> Graph:
    """Z_2^d with bit j of the vertex index as coordinate j."""
    if d < 1:
        raise ValueError(f"hypercube needs d >= 1, got d={d}")
    n = 1 << d
    _check_cap(n)
    edges = set()
    for x in range(n):
        for j in range(d):
            edges.add(_normalize_edge(x, x ^ (1 << j)))
    return Graph(n, frozenset(edges), f"hypercube({d})")


def lattice(n: int, d: int) -> Graph:
    """Periodic lattice Z_n^d, little-endian mixed-radix indexing."""
    if n < 2:
        raise ValueError(f"lattice needs n >= 2, got n={n}")
    if d < 1:
        raise ValueError(f"lattice needs d >= 1, got d={d}")
    size = n**d
    _check_cap(size)
    edges = set()
    for v in range(size):
        for j in range(d):
            digit = (v // n**j) % n
            up = v + (((digit + 1) % n) - digit) * n**j
            edges.add(_normalize_edge(v, up))
            if n > 2:
                down = v + (((digit - 1) % n) - digit) * n**j
                edges.add(_normalize_edge(v, down))
    return Graph(size, frozenset(edges), f"lattice({n},{d})")


_BUILDERS = {
    "cycle": (cycle, 1),
    "path": (path, 1),
    "complete": (complete, 1),
    "hypercube": (hypercube, 1),
    "lattice": (lattice, 2),
}


def build_graph(kind: str, params: list[int]) -> Graph:
    """Construct a named graph; see _BUILDERS for the parameter counts."""
    if kind not in _BUILDERS:
        raise ValueError(f"unknown graph kind {kind!r}; expected one of {sorted(_BUILDERS)}")
    fn, arity = _BUILDERS[kind]
    if len(params) != arity:
        raise ValueError(f"{kind} takes {arity} parameter(s), got {list(params)}")
    return fn(*params)


def cartesian_power(G: Graph, d: int) -> Graph:
    """d-th Cartesian power: tuples adjacent iff they differ in exactly
    one coordinate by an edge of G. Coordinate 0 is least significant."""
    if d < 1:
        raise ValueError(f"cartesian_power needs d >= 1, got d={d}")
    size = G.n**d
    _check_cap(size)
    base_adj: list[list[int]] = [[] for _ in range(G.n)]
    for (u, v) in G.edges:
        base_adj[u].append(v)
        base_adj[v].append(u)
    edges = set()
    for v in range(size):
        for j in range(d):
            digit = (v // G.n**j) % G.n
            for w in base_adj[digit]:
                edges.add(_normalize_edge(v, v + (w - digit) * G.n**j))
    out = Graph(size, frozenset(edges), f"power({G.kind_tag},{d})")
    # sanity: |V|^d vertices and summed coordinate degrees
    assert out.n == G.n**d
    deg_base = G.degrees()
    deg_out = out.degrees()
    for v in (0, size - 1):
        digits = [(v // G.n**j) % G.n for j in range(d)]
        assert deg_out[v] == sum(deg_base[x] for x in digits)
    return out


def parse_edge_list(text: str) -> Graph:
    """Parse the "N on the first line, then one 'u v' per line" format."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty edge list")
    try:
        n = int(lines[0])
    except ValueError as exc:
        raise ValueError(f"first line must be the vertex count, got {lines[0]!r}") from exc
    edges: set[tuple[int, int]] = set()
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"bad edge line {ln!r}")
        u, v = int(parts[0]), int(parts[1])
        if u == v:
            raise ValueError(f"self-loop {u} {v} rejected")
        e = _normalize_edge(u, v)
        if e in edges:
            raise ValueError(f"duplicate edge {u} {v} rejected")
        edges.add(e)
    return Graph(n, frozenset(edges), "custom")


def format_edge_list(G: Graph) -> str:
    lines = [str(G.n)]
    for (u, v) in sorted(G.edges):
        lines.append(f"{u} {v}")
    return "\n".join(lines) + "\n"
