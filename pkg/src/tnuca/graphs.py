"""Combined transition multigraph of a rule pair and its cycle structure.

Every vertex (configuration) carries one outgoing edge per rule; an edge is
identified by ``(source, label)`` and parallel edges are kept distinct.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .reach import resolve_maps
from .rules import as_rule, build_global_map
from .sequences import Choice, F, G

TRUE, FALSE, UNKNOWN = "TRUE", "FALSE", "UNKNOWN"

Edge = tuple[int, int, Choice]


@dataclass(frozen=True, eq=False)
class CombinedDiagram:
    n: int
    k: int
    succ: dict[Choice, np.ndarray] = field(repr=False)
    bijective: dict[Choice, bool] = field(default_factory=dict)

    @property
    def labels(self) -> tuple[Choice, ...]:
        return tuple(l for l in (F, G) if l in self.succ)

    @property
    def num_vertices(self) -> int:
        return self.k**self.n

    def edges(self, vertices=None) -> list[Edge]:
        """Edges ordered by source, F before G."""
        vs = range(self.num_vertices) if vertices is None else sorted(vertices)
        return [(v, int(self.succ[l][v]), l) for v in vs for l in self.labels]

    def in_degree(self, label: Choice | None = None) -> np.ndarray:
        labels = self.labels if label is None else (label,)
        return sum(np.bincount(self.succ[l], minlength=self.num_vertices) for l in labels)

    def out_degree(self, label: Choice | None = None) -> np.ndarray:
        labels = self.labels if label is None else (label,)
        return np.full(self.num_vertices, len(labels), dtype=np.int64)


def build_combined_diagram(f, g, n: int, k: int = 2, budget: int | None = None) -> CombinedDiagram:
    map_f, map_g = resolve_maps(f, g, n, k, budget)
    return CombinedDiagram(
        n, map_f.states, {F: map_f.image, G: map_g.image},
        {F: map_f.bijective, G: map_g.bijective},
    )


def build_single_diagram(rule, n: int, label: Choice = F, k: int = 2, budget: int | None = None) -> CombinedDiagram:
    """Transition diagram of one rule, stored under ``label``."""
    gmap = build_global_map(as_rule(rule, k), n, budget)
    return CombinedDiagram(n, gmap.states, {label: gmap.image}, {label: gmap.bijective})


class UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # smaller root wins so roots are component minima
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def connected_components(diagram: CombinedDiagram) -> list[list[int]]:
    """Weak components, each sorted, ordered by their smallest encoding."""
    uf = UnionFind(diagram.num_vertices)
    for l in diagram.labels:
        for v, w in enumerate(diagram.succ[l].tolist()):
            uf.union(v, w)
    groups: dict[int, list[int]] = {}
    for v in range(diagram.num_vertices):
        groups.setdefault(uf.find(v), []).append(v)
    return [groups[r] for r in sorted(groups)]


# ---------------------------------------------------------------- hamiltonian


def _hamiltonian_cycle(diagram: CombinedDiagram, comp: list[int], max_expansions: int):
    """Backtracking search; returns (verdict, vertex cycle or None)."""
    members = set(comp)
    succ = {
        v: sorted({int(diagram.succ[l][v]) for l in diagram.labels} & members)
        for v in comp
    }
    if len(comp) == 1:
        v = comp[0]
        return (TRUE, [v]) if v in succ[v] else (FALSE, None)
    preds: dict[int, set[int]] = {v: set() for v in comp}
    for v, ws in succ.items():
        for w in ws:
            if w != v:
                preds[w].add(v)
    if any(not preds[v] for v in comp) or any(not (set(succ[v]) - {v}) for v in comp):
        return FALSE, None

    start = comp[0]
    path = [start]
    visited = {start}
    budget = [max_expansions]

    def extend(v: int) -> bool | None:
        if len(path) == len(comp):
            return start in succ[v]
        for w in succ[v]:
            if w in visited:
                continue
            budget[0] -= 1
            if budget[0] < 0:
                return None
            path.append(w)
            visited.add(w)
            res = extend(w)
            if res is None or res:
                return res
            path.pop()
            visited.discard(w)
        return False

    res = extend(start)
    if res is None:
        return UNKNOWN, None
    return (TRUE, list(path)) if res else (FALSE, None)


def validate_hamiltonian(diagram: CombinedDiagram, cycle: list[int], comp: list[int]) -> bool:
    if sorted(cycle) != sorted(comp) or len(set(cycle)) != len(cycle):
        return False
    for a, b in zip(cycle, cycle[1:] + cycle[:1]):
        if not any(int(diagram.succ[l][a]) == b for l in diagram.labels):
            return False
    return True


@dataclass(frozen=True)
class HamiltonianVerdict:
    component: int
    verdict: str
    cycle: list[int] | None


@dataclass(frozen=True)
class HamiltonianReport:
    sufficient_condition: bool
    exact: str
    components: tuple[HamiltonianVerdict, ...]


def component_hamiltonian(
    diagram: CombinedDiagram, comp: list[int], budget: int = 64, max_expansions: int = 200_000
) -> HamiltonianVerdict:
    if len(comp) > budget:
        return HamiltonianVerdict(comp[0], UNKNOWN, None)
    verdict, cycle = _hamiltonian_cycle(diagram, comp, max_expansions)
    return HamiltonianVerdict(comp[0], verdict, cycle)


def _overall(verdicts) -> str:
    if any(v == FALSE for v in verdicts):
        return FALSE
    if any(v == UNKNOWN for v in verdicts):
        return UNKNOWN
    return TRUE


def fully_hamiltonian(
    diagram: CombinedDiagram, budget: int = 64, max_expansions: int = 200_000
) -> HamiltonianReport:
    """Two tracks: the one-bijective-rule sufficient condition, and an exact
    per-component search capped at ``budget`` vertices."""
    comps = [component_hamiltonian(diagram, c, budget, max_expansions) for c in connected_components(diagram)]
    return HamiltonianReport(
        any(diagram.bijective.values()), _overall([c.verdict for c in comps]), tuple(comps)
    )


# -------------------------------------------------------------------- euler


def hierholzer(out_edges: dict, target: dict, start) -> list:
    """Euler trail from ``start`` over edge ids.

    ``out_edges[node]`` lists edge ids in preference order; ``target[eid]`` is
    the head node.  The returned trail may miss edges if none exists.
    """
    ptr = {v: 0 for v in out_edges}
    stack = [(start, None)]
    trail = []
    while stack:
        v, e = stack[-1]
        outs = out_edges.get(v, ())
        i = ptr.get(v, 0)
        if i < len(outs):
            ptr[v] = i + 1
            eid = outs[i]
            stack.append((target[eid], eid))
        else:
            stack.pop()
            if e is not None:
                trail.append(e)
    trail.reverse()
    return trail


def component_eulerian(diagram: CombinedDiagram, comp: list[int]) -> bool:
    indeg = diagram.in_degree()
    outdeg = diagram.out_degree()
    # weak connectivity plus balance implies strong connectivity
    return all(indeg[v] == outdeg[v] for v in comp)


def euler_circuit(diagram: CombinedDiagram, comp: list[int]) -> list[Edge] | None:
    if not component_eulerian(diagram, comp):
        return None
    edges = diagram.edges(comp)
    out_edges: dict[int, list[int]] = {}
    target = {}
    for i, (v, w, l) in enumerate(edges):
        out_edges.setdefault(v, []).append(i)
        target[i] = w
    for v in out_edges:
        out_edges[v].sort(key=lambda i: (edges[i][1], edges[i][2].value))
    trail = hierholzer(out_edges, target, comp[0])
    if len(trail) != len(edges):
        return None
    return [edges[i] for i in trail]


def alternating_euler_circuit(diagram: CombinedDiagram, comp: list[int], first: Choice = F) -> list[Edge] | None:
    """Closed walk through every edge of ``comp`` once, labels alternating.

    Runs Hierholzer on the derived graph whose nodes are (vertex, label
    required next); edge ``v -L-> w`` becomes ``(v, L) -> (w, other(L))``.
    """
    if set(diagram.labels) != {F, G}:
        return None
    edges = diagram.edges(comp)
    out_edges: dict[tuple[int, Choice], list[int]] = {}
    target = {}
    balance: dict[tuple[int, Choice], int] = {}
    for i, (v, w, l) in enumerate(edges):
        src, dst = (v, l), (w, l.other())
        out_edges.setdefault(src, []).append(i)
        target[i] = dst
        balance[src] = balance.get(src, 0) + 1
        balance[dst] = balance.get(dst, 0) - 1
    if any(balance.values()):
        return None
    for node in out_edges:
        out_edges[node].sort(key=lambda i: edges[i][1])
    start = (comp[0], first)
    if start not in out_edges:
        return None
    trail = hierholzer(out_edges, target, start)
    if len(trail) != len(edges):
        return None
    return [edges[i] for i in trail]


def validate_circuit(
    diagram: CombinedDiagram, circuit: list[Edge], comp: list[int] | None = None, alternating: bool = False
) -> bool:
    """Replay a closed walk edge by edge; with ``comp`` it must use each of
    the component's edges exactly once."""
    if not circuit:
        return False
    used = set()
    for i, (v, w, l) in enumerate(circuit):
        if l not in diagram.succ or int(diagram.succ[l][v]) != w:
            return False
        if (v, l) in used:
            return False
        used.add((v, l))
        nxt = circuit[(i + 1) % len(circuit)]
        if nxt[0] != w:
            return False
        if alternating and nxt[2] == l:
            return False
    if comp is not None and used != {(v, l) for v, _, l in diagram.edges(comp)}:
        return False
    return True


@dataclass(frozen=True)
class EulerReport:
    fully_eulerian: bool
    components: tuple[tuple[int, bool], ...]


def fully_eulerian(diagram: CombinedDiagram) -> EulerReport:
    comps = [(c[0], component_eulerian(diagram, c)) for c in connected_components(diagram)]
    return EulerReport(all(ok for _, ok in comps), tuple(comps))


@dataclass(frozen=True)
class ComponentAnalysis:
    component_id: int
    vertices: tuple[int, ...]
    vertex_count: int
    edge_count: int
    degrees: dict[int, dict[str, int]]
    hamiltonian: HamiltonianVerdict
    eulerian: bool
    alternating_euler: list[Edge] | None


def analyze_components(
    diagram: CombinedDiagram, hamiltonian_budget: int = 64, euler_first: Choice = F,
    max_expansions: int = 200_000,
) -> list[ComponentAnalysis]:
    indeg = {l: diagram.in_degree(l) for l in diagram.labels}
    out = []
    for comp in connected_components(diagram):
        degrees = {}
        for v in comp:
            d = {}
            for l in diagram.labels:
                d[f"in{l.value}"] = int(indeg[l][v])
                d[f"out{l.value}"] = 1
            degrees[v] = d
        out.append(
            ComponentAnalysis(
                comp[0], tuple(comp), len(comp), len(comp) * len(diagram.labels), degrees,
                component_hamiltonian(diagram, comp, hamiltonian_budget, max_expansions),
                component_eulerian(diagram, comp),
                alternating_euler_circuit(diagram, comp, euler_first),
            )
        )
    return out
