"""Finite graphs inside the S-unit graph: representations, search, and the
subgraph that is not an induced subgraph.

A representation assigns distinct rationals to the vertices so that every
edge joins values differing by an S-unit; it is induced when non-edges never
do.  Representations come in classes under ``q -> s*(q + t)`` with s an
S-unit, so one edge can always be pinned to the values 0 and 1.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import NamedTuple, Optional

from .equations import (
    TAG_NONE,
    SearchConfig,
    check_budget,
    count_representations,
    solve_three_term,
    units_by_height,
)
from .errors import BoundTooSmallError, BudgetError, InvalidInputError
from .srat import PrimeSet, format_rational, is_s_unit


def _edge(u, v) -> frozenset:
    return frozenset((u, v))


@dataclass(frozen=True)
class SGraph:
    vertices: tuple
    edges: frozenset
    prime_set: PrimeSet
    adjacency: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        vertices = tuple(self.vertices)
        if len(set(vertices)) != len(vertices):
            raise InvalidInputError("duplicate vertex labels")
        known = set(vertices)
        edges = frozenset(frozenset(e) for e in self.edges)
        adjacency = {v: set() for v in vertices}
        for e in edges:
            if len(e) != 2:
                raise InvalidInputError(f"self-loop or malformed edge {sorted(e, key=str)}")
            u, v = tuple(e)
            if u not in known or v not in known:
                raise InvalidInputError(f"edge {u}-{v} has an undeclared endpoint")
            adjacency[u].add(v)
            adjacency[v].add(u)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "adjacency", adjacency)

    def has_edge(self, u, v) -> bool:
        return v in self.adjacency[u]

    def edge_list(self) -> list:
        """Edges as pairs ordered by vertex position, sorted."""
        pos = {v: i for i, v in enumerate(self.vertices)}
        pairs = [tuple(sorted(e, key=pos.__getitem__)) for e in self.edges]
        return sorted(pairs, key=lambda e: (pos[e[0]], pos[e[1]]))

    def without_edge(self, u, v) -> "SGraph":
        if not self.has_edge(u, v):
            raise InvalidInputError(f"{u}-{v} is not an edge")
        return SGraph(self.vertices, self.edges - {_edge(u, v)}, self.prime_set)

    def with_edge(self, u, v) -> "SGraph":
        return SGraph(self.vertices, self.edges | {_edge(u, v)}, self.prime_set)

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        seen = {self.vertices[0]}
        queue = deque(seen)
        while queue:
            for w in self.adjacency[queue.popleft()]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == len(self.vertices)

    def to_json(self, values: Optional[dict] = None) -> dict:
        out = {
            "primes": self.prime_set.to_json(),
            "vertices": list(self.vertices),
            "edges": [list(e) for e in self.edge_list()],
        }
        if values is not None:
            out["values"] = {str(v): format_rational(values[v]) for v in self.vertices}
        return out


@dataclass(frozen=True)
class Representation:
    graph: SGraph
    values: dict

    def __post_init__(self):
        object.__setattr__(self, "values", {v: Fraction(q) for v, q in self.values.items()})

    def to_json(self) -> dict:
        return self.graph.to_json(self.values)


class Check(NamedTuple):
    ok: bool
    violations: list

    def __bool__(self):
        return self.ok


def graph_from_values(values, S: PrimeSet, labels=None) -> Representation:
    """The induced subgraph of the S-unit graph on the given rationals."""
    values = [Fraction(q) for q in values]
    if len(set(values)) != len(values):
        raise InvalidInputError("values must be pairwise distinct")
    if labels is None:
        labels = list(range(len(values)))
    labels = list(labels)
    if len(labels) != len(values):
        raise InvalidInputError("one label per value is required")
    edges = [
        (labels[i], labels[j])
        for i in range(len(values))
        for j in range(i + 1, len(values))
        if is_s_unit(values[i] - values[j], S)
    ]
    graph = SGraph(tuple(labels), frozenset(_edge(*e) for e in edges), S)
    return Representation(graph, dict(zip(labels, values)))


def _value_map(G: SGraph, values: dict) -> dict:
    missing = [v for v in G.vertices if v not in values]
    if missing:
        raise InvalidInputError(f"no value for vertices {missing}")
    return {v: Fraction(values[v]) for v in G.vertices}


def _pair_violations(G: SGraph, values: dict, induced: bool) -> list:
    vals = _value_map(G, values)
    S = G.prime_set
    out = []
    vs = G.vertices
    for i, u in enumerate(vs):
        for w in vs[i + 1:]:
            diff = vals[u] - vals[w]
            if diff == 0:
                out.append(("equal_values", u, w))
                continue
            unit = is_s_unit(diff, S)
            if G.has_edge(u, w) and not unit:
                out.append(("edge_not_unit", u, w))
            elif induced and unit and not G.has_edge(u, w):
                out.append(("nonedge_unit", u, w))
    return out


def is_representation(G: SGraph, values: dict) -> Check:
    """Distinct values, and every edge joins values differing by an S-unit."""
    bad = _pair_violations(G, values, induced=False)
    return Check(not bad, bad)


def is_induced_representation(G: SGraph, values: dict) -> Check:
    """A representation in which non-edges never join values differing by an S-unit."""
    bad = _pair_violations(G, values, induced=True)
    return Check(not bad, bad)


def canonicalize(rep: Representation, anchor_edge) -> Representation:
    """Translate and scale by an S-unit so the anchor endpoints get values 0 and 1."""
    u, v = anchor_edge
    if not rep.graph.has_edge(u, v):
        raise InvalidInputError(f"anchor {u}-{v} is not an edge")
    origin = rep.values[u]
    scale = rep.values[v] - origin
    if not is_s_unit(scale, rep.graph.prime_set):
        raise InvalidInputError(f"anchor difference {scale} is not an S-unit")
    return Representation(rep.graph, {w: (q - origin) / scale for w, q in rep.values.items()})


def transform(rep: Representation, shift, scale) -> Representation:
    """Apply q -> scale * (q + shift) to every value."""
    shift, scale = Fraction(shift), Fraction(scale)
    return Representation(rep.graph, {w: scale * (q + shift) for w, q in rep.values.items()})


def cycle_to_graph(cycle) -> Representation:
    """The cycle a_1 -> a_2 -> ... -> a_n -> a_1 as a labelled graph with its values."""
    vertices = tuple(cycle.vertices)
    n = len(vertices)
    labels = tuple(range(n))
    edges = frozenset(_edge(i, (i + 1) % n) for i in range(n))
    return Representation(SGraph(labels, edges, cycle.prime_set), dict(zip(labels, vertices)))


# -- bounded search for induced representations ----------------------------------


class SearchResult(NamedTuple):
    values: Optional[dict]
    nodes_expanded: int

    @property
    def found(self) -> bool:
        return self.values is not None


def default_anchor(G: SGraph) -> tuple:
    edges = G.edge_list()
    if not edges:
        raise InvalidInputError("graph has no edge to anchor on")
    return edges[0]


def search_order(G: SGraph, anchor_edge) -> list:
    """Breadth-first order from the anchor's first endpoint, second endpoint next,
    as (vertex, parent) pairs."""
    u, v = anchor_edge
    pos = {w: i for i, w in enumerate(G.vertices)}
    order = [(u, None)]
    seen = {u}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        nbrs = sorted(G.adjacency[x], key=pos.__getitem__)
        if x == u:
            nbrs.remove(v)
            nbrs.insert(0, v)
        for w in nbrs:
            if w not in seen:
                seen.add(w)
                order.append((w, x))
                queue.append(w)
    return order


def search_induced_representation(G: SGraph, cfg: SearchConfig = SearchConfig(),
                                  anchor_edge=None) -> SearchResult:
    """Backtracking search for an induced representation with the anchor at (0, 1).

    Every vertex after the anchor takes the value of its breadth-first parent
    plus an S-unit from the exponent box.  Each assignment is checked against
    all earlier ones: S-unit difference exactly on edges, and distinct values.
    An empty result only certifies that nothing exists inside the box.
    """
    if not G.is_connected():
        raise InvalidInputError("search needs a connected graph")
    if len(G.vertices) == 1:
        return SearchResult({G.vertices[0]: Fraction(0)}, 1)
    if anchor_edge is None:
        anchor_edge = default_anchor(G)
    u, v = anchor_edge
    if not G.has_edge(u, v):
        raise InvalidInputError(f"anchor {u}-{v} is not an edge")

    order = search_order(G, anchor_edge)
    steps = units_by_height(G.prime_set, cfg)
    primes = G.prime_set.primes
    index = {w: i for i, (w, _) in enumerate(order)}
    # for each position: earlier neighbours first, then earlier non-neighbours
    checks = []
    for i, (w, _) in enumerate(order):
        earlier = [order[j][0] for j in range(i)]
        nbrs = [j for j in range(i) if G.has_edge(w, earlier[j])]
        others = [j for j in range(i) if not G.has_edge(w, earlier[j])]
        checks.append((nbrs, others))
    parents = [None if p is None else index[p] for _, p in order]

    def unit(d: Fraction) -> bool:
        # all values lie in Z_S, so only the numerator can carry a foreign prime
        n = d.numerator
        if n == 0:
            return False
        n = abs(n)
        for p in primes:
            while n % p == 0:
                n //= p
        return n == 1

    vals = [Fraction(0), Fraction(1)] + [None] * (len(order) - 2)
    nodes = 0
    budget = cfg.max_candidates

    def consistent(i, c) -> bool:
        nbrs, others = checks[i]
        for j in nbrs:
            if not unit(c - vals[j]):
                return False
        for j in others:
            d = c - vals[j]
            if d == 0 or unit(d):
                return False
        return True

    if not consistent(1, vals[1]):
        return SearchResult(None, 1)

    def rec(i) -> bool:
        nonlocal nodes
        if i == len(order):
            return True
        base = vals[parents[i]]
        for s in steps:
            nodes += 1
            if nodes > budget:
                raise BudgetError(f"induced-representation search exceeded {budget} nodes", size=nodes)
            c = base + s
            if consistent(i, c):
                vals[i] = c
                if rec(i + 1):
                    return True
        vals[i] = None
        return False

    if rec(2):
        return SearchResult({w: vals[i] for i, (w, _) in enumerate(order)}, nodes)
    return SearchResult(None, nodes)


def naive_induced_search(G: SGraph, cfg: SearchConfig, anchor_edge=None) -> Optional[dict]:
    """Try every assignment parent + unit over the whole box; the oracle for small graphs."""
    if anchor_edge is None:
        anchor_edge = default_anchor(G)
    order = search_order(G, anchor_edge)
    steps = units_by_height(G.prime_set, cfg)
    check_budget(len(steps) ** max(0, len(order) - 2), cfg, "naive induced search")
    for choice in product(steps, repeat=len(order) - 2):
        vals = {order[0][0]: Fraction(0), order[1][0]: Fraction(1)}
        for (w, parent), s in zip(order[2:], choice):
            vals[w] = vals[parent] + s
        if is_induced_representation(G, vals):
            return vals
    return None


# -- the subgraph that is not induced ----------------------------------------------

CUBE_LABELS = {
    (0, 0, 0): "0",
    (1, 0, 0): "1",
    (0, 1, 0): "a",
    (0, 0, 1): "b",
    (1, 1, 0): "1+a",
    (1, 0, 1): "1+b",
    (0, 1, 1): "a+b",
    (1, 1, 1): "1+a+b",
}
_TRIVIAL = {(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)}


@dataclass(frozen=True)
class Counterexample:
    case: int
    graph: SGraph          # G, an induced subgraph
    graph_minus: SGraph    # G with one edge removed
    witness: Representation
    omitted_edge: tuple
    bound: int
    anchor: tuple
    details: dict


def case1_admissible(a, b, S: PrimeSet) -> bool:
    """a, b give eight distinct cube values and only trivial c0 + c1 a + c2 b are S-units."""
    cube = {c0 + c1 * a + c2 * b for c0, c1, c2 in product((0, 1), repeat=3)}
    if len(cube) != 8:
        return False
    for c in product((-1, 0, 1), repeat=3):
        if c not in _TRIVIAL and is_s_unit(c[0] + c[1] * a + c[2] * b, S):
            return False
    return True


def case2_admissible(a, R0, S: PrimeSet) -> bool:
    """a + v - w is an S-unit for v, w in R0 only when v = w, and a + R0 misses R0."""
    members = set(R0)
    if any(a + v in members for v in R0):
        return False
    for v in R0:
        for w in R0:
            if v != w and is_s_unit(a + v - w, S):
                return False
    return True


def witness_bound(cfg: SearchConfig) -> int:
    """Exponent box for the auxiliary units a (and b): wider than the solution box,
    since the smallest admissible shift can lie just outside it."""
    return 2 * cfg.bound + 2


def _build_case1(S: PrimeSet, cfg: SearchConfig) -> Counterexample:
    cands = units_by_height(S, cfg.with_bound(witness_bound(cfg)))
    check_budget(len(cands) ** 2, cfg, "case 1 pair scan")
    for a in cands:
        for b in cands:
            if a != b and case1_admissible(a, b, S):
                break
        else:
            continue
        break
    else:
        raise BoundTooSmallError(f"no admissible S-units a, b with exponents <= {witness_bound(cfg)}")
    values = {label: c0 + c1 * a + c2 * b for (c0, c1, c2), label in CUBE_LABELS.items()}
    edges = [
        (CUBE_LABELS[x], CUBE_LABELS[y])
        for x in CUBE_LABELS
        for y in CUBE_LABELS
        if x < y and sum(abs(i - j) for i, j in zip(x, y)) == 1
    ]
    G = SGraph(tuple(CUBE_LABELS.values()), frozenset(_edge(*e) for e in edges), S)
    omitted = ("1+a", "1+a+b")
    G_minus = G.without_edge(*omitted)
    return Counterexample(
        1, G, G_minus, Representation(G_minus, values), omitted, cfg.bound, ("0", "1"),
        {"a": a, "b": b},
    )


def _build_case2(S: PrimeSet, cfg: SearchConfig, nondegenerate) -> Counterexample:
    R0 = {Fraction(0), Fraction(1)}
    for sol in nondegenerate:
        R0.update((sol.x, sol.y, sol.z, 1 + sol.x))
    R0 = sorted(R0)
    wider = cfg.with_bound(witness_bound(cfg))
    check_budget(len(R0) ** 2 * 2 * (2 * wider.bound + 1) ** len(S), cfg, "case 2 shift scan")
    for a in units_by_height(S, wider):
        if a not in R0 and case2_admissible(a, R0, S):
            break
    else:
        raise BoundTooSmallError(f"no admissible shift a with exponents <= {wider.bound}")
    Ra = [a + v for v in R0]
    rep = graph_from_values(R0 + Ra, S, labels=[format_rational(q) for q in R0 + Ra])
    z1 = nondegenerate[0].z
    omitted = (format_rational(z1), format_rational(a + z1))
    G = rep.graph
    G_minus = G.without_edge(*omitted)
    counts = {format_rational(s.x): count_representations(s.x, S, cfg) for s in nondegenerate}
    return Counterexample(
        2, G, G_minus, Representation(G_minus, rep.values), omitted, cfg.bound,
        (format_rational(0), format_rational(1)),
        {"a": a, "R0": R0, "solutions": len(nondegenerate), "representation_counts": counts},
    )


def build_counterexample(S: PrimeSet, cfg: SearchConfig = SearchConfig()) -> Counterexample:
    """A finite subgraph of the S-unit graph that is not an induced subgraph.

    Case 1 (no nondegenerate solution of 1 + x = y + z in the box) uses a cube
    on {0, 1, a, b, 1+a, 1+b, a+b, 1+a+b}; case 2 uses the set R0 built from
    the solutions and a shifted copy a + R0.  One edge is then removed.
    """
    sols = solve_three_term(S, cfg)
    nondegenerate = [s for s in sols if s.tag == TAG_NONE]
    if nondegenerate:
        return _build_case2(S, cfg, nondegenerate)
    return _build_case1(S, cfg)
