"""Trajectories, partial transition diagrams and recurrence.

A periodic schedule of period ``l`` turns the pair into a deterministic
system on (configuration, phase) pairs; that functional graph is the phase
graph.  Phase ``p`` means the next step is ``t = p + 1 (mod l)``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .reach import HORIZON, resolve_maps, chain_from_maps
from .rules import DEFAULT_BUDGET, as_rule, check_budget, decode, encode, step_cells
from .sequences import Choice, F, parse_sequence

TRANSIENT = "TRANSIENT"
RECURRENT = "RECURRENT"
NOT_VISITED = "NOT_VISITED"

INITIAL = "INITIAL"
INTERMEDIATE = "INTERMEDIATE"


@dataclass(frozen=True)
class Trajectory:
    initial: int
    steps: tuple[tuple[int, Choice, int], ...]  # (t, rule applied, resulting encoding)

    @property
    def codes(self) -> list[int]:
        return [self.initial] + [c for _, _, c in self.steps]


def evolve_cells(f, g, seq, cells, T: int, k: int = 2) -> np.ndarray:
    """Space-time array of shape ``(T + 1, n)``; row ``t`` is the state after step ``t``."""
    rf, rg = as_rule(f, k), as_rule(g, k)
    seq = parse_sequence(seq)
    row = np.asarray(cells, dtype=np.int64)
    out = np.empty((T + 1, len(row)), dtype=np.int64)
    out[0] = row
    for t in range(1, T + 1):
        row = step_cells(rf if seq.rule_at(t) is F else rg, row)
        out[t] = row
    return out


def evolve(f, g, seq, c0: int, T: int, n: int, k: int = 2, budget: int | None = None) -> Trajectory:
    if T < 0:
        raise ValueError(f"number of steps must be >= 0, got {T}")
    seq = parse_sequence(seq)
    limit = DEFAULT_BUDGET if budget is None else budget
    steps = []
    if k**n <= limit:
        map_f, map_g = resolve_maps(f, g, n, k, budget)
        if not 0 <= c0 < map_f.num_configs:
            raise ValueError(f"encoding {c0} out of range for n={n}, k={k}")
        c = c0
        for t in range(1, T + 1):
            choice = seq.rule_at(t)
            c = int((map_f if choice is F else map_g).image[c])
            steps.append((t, choice, c))
    else:
        rows = evolve_cells(f, g, seq, decode(c0, n, k), T, k)
        for t in range(1, T + 1):
            steps.append((t, seq.rule_at(t), encode(rows[t].tolist(), k)))
    return Trajectory(c0, tuple(steps))


@dataclass(frozen=True, eq=False)
class PhaseGraph:
    period: int
    choices: tuple[Choice, ...]
    num_configs: int
    succ: np.ndarray = field(repr=False)  # node id = phase * num_configs + encoding

    def node(self, code: int, phase: int) -> int:
        return phase * self.num_configs + code

    def split(self, node: int) -> tuple[int, int]:
        phase, code = divmod(int(node), self.num_configs)
        return code, phase

    def __len__(self) -> int:
        return len(self.succ)

    def on_cycle(self) -> np.ndarray:
        """Boolean mask of nodes lying on a cycle (peel off in-degree-0 nodes)."""
        indeg = np.bincount(self.succ, minlength=len(self.succ))
        alive = np.ones(len(self.succ), dtype=bool)
        queue = deque(np.flatnonzero(indeg == 0).tolist())
        while queue:
            v = queue.popleft()
            alive[v] = False
            w = int(self.succ[v])
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
        return alive

    def cycles(self) -> list[list[int]]:
        """Every cycle as a node list starting at its smallest node id."""
        mask = self.on_cycle()
        done = np.zeros(len(self.succ), dtype=bool)
        out = []
        for v in np.flatnonzero(mask).tolist():
            if done[v]:
                continue
            cyc = [v]
            done[v] = True
            w = int(self.succ[v])
            while w != v:
                cyc.append(w)
                done[w] = True
                w = int(self.succ[w])
            out.append(cyc)
        return out


def build_phase_graph(f, g, seq, n: int, k: int = 2, budget: int | None = None) -> PhaseGraph:
    seq = parse_sequence(seq)
    if not seq.is_periodic:
        raise ValueError(f"phase graph needs a periodic schedule, {seq.identifier} is not")
    map_f, map_g = resolve_maps(f, g, n, k, budget)
    choices = seq.phase_choices()
    l, N = len(choices), map_f.num_configs
    check_budget(l * N, budget)
    succ = np.empty(l * N, dtype=np.int64)
    for p, choice in enumerate(choices):
        image = (map_f if choice is F else map_g).image
        succ[p * N : (p + 1) * N] = ((p + 1) % l) * N + image
    succ.setflags(write=False)
    return PhaseGraph(l, choices, N, succ)


@dataclass(frozen=True)
class RecurrenceRecord:
    initial: int
    config: int
    status: str
    preperiod: tuple[int, ...]  # gaps between visits before the repeating regime
    block: tuple[int, ...]  # repeating gaps, one traversal of the phase-graph cycle
    cycle_length: int | None
    first_visit: int | None = None

    @property
    def Lambda(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return self.preperiod, self.block


def _gaps(times: list[int]) -> tuple[int, ...]:
    return tuple(b - a for a, b in zip(times, times[1:]))


def _periodic_records(pg: PhaseGraph, c0: int, targets: Iterable[int] | None) -> list[RecurrenceRecord]:
    seen: dict[int, int] = {}
    codes: list[int] = []
    v, t = pg.node(c0, 0), 0
    while v not in seen:
        seen[v] = t
        codes.append(pg.split(v)[0])
        v = int(pg.succ[v])
        t += 1
    mu = seen[v]
    L = t - mu
    visits: dict[int, list[int]] = {}
    for time, code in enumerate(codes):
        visits.setdefault(code, []).append(time)
    if targets is None:
        targets = sorted(visits)
    out = []
    for x in targets:
        times = visits.get(x)
        if not times:
            out.append(RecurrenceRecord(c0, x, NOT_VISITED, (), (), None))
            continue
        cyc = [s for s in times if s >= mu]
        if not cyc:
            out.append(RecurrenceRecord(c0, x, TRANSIENT, _gaps(times), (), None, times[0]))
            continue
        pre = [s for s in times if s < mu] + [cyc[0]]
        block = _gaps(cyc) + (cyc[0] + L - cyc[-1],)
        out.append(RecurrenceRecord(c0, x, RECURRENT, _gaps(pre), block, L, times[0]))
    return out


def _observed_records(traj: Trajectory, targets: Iterable[int] | None, horizon: int) -> list[RecurrenceRecord]:
    visits: dict[int, list[int]] = {}
    for time, code in enumerate(traj.codes):
        visits.setdefault(code, []).append(time)
    if targets is None:
        targets = sorted(visits)
    out = []
    for x in targets:
        times = visits.get(x)
        if not times:
            out.append(RecurrenceRecord(traj.initial, x, NOT_VISITED, (), (), None))
            continue
        # observational: revisited, and still being revisited in the second half
        recurrent = len(times) >= 2 and 2 * times[-1] >= horizon
        status = RECURRENT if recurrent else TRANSIENT
        out.append(RecurrenceRecord(traj.initial, x, status, _gaps(times), (), None, times[0]))
    return out


def recurrence_analysis(
    f, g, seq, n: int, c0: int, x: int | None = None, horizon: int | None = None,
    k: int = 2, budget: int | None = None,
) -> list[RecurrenceRecord]:
    """Recurrence records for ``x`` (or every visited configuration) from ``c0``.

    Periodic schedules give exact answers from the phase graph.  Otherwise a
    ``horizon`` is required; statuses are then observed over that window and
    no cycle length is reported.
    """
    seq = parse_sequence(seq)
    targets = None if x is None else [x]
    if seq.is_periodic:
        pg = build_phase_graph(f, g, seq, n, k, budget)
        if not 0 <= c0 < pg.num_configs:
            raise ValueError(f"encoding {c0} out of range for n={n}, k={k}")
        return _periodic_records(pg, c0, targets)
    if horizon is None:
        raise ValueError(f"schedule {seq.identifier} is not periodic; a horizon is required")
    traj = evolve(f, g, seq, c0, horizon, n, k, budget)
    return _observed_records(traj, targets, horizon)


@dataclass(frozen=True)
class PartialDiagram:
    roles: dict[int, str]
    arcs: tuple[tuple[int, int, Choice, int], ...]  # (source, target, label, phase)
    closed: bool


def partial_transition_diagram(
    f, g, seq, n: int, Cin: Iterable[int], horizon: int | None = None,
    k: int = 2, budget: int | None = None,
) -> PartialDiagram:
    """Nodes reached from ``Cin`` along the restriction chain, with one arc per
    (source, phase) pair that the chain realises."""
    map_f, map_g = resolve_maps(f, g, n, k, budget)
    seq = parse_sequence(seq)
    chain = chain_from_maps(map_f, map_g, seq, Cin, horizon)
    period = seq.period()
    roles = {c: INITIAL for c in chain.initial}
    arcs = {}
    for s in chain.steps:
        phase = (s.t - 1) % period if isinstance(period, int) else s.t - 1
        image = (map_f if s.rule is F else map_g).image
        for c in s.domain:
            arcs[(c, phase)] = (c, int(image[c]), s.rule, phase)
            roles.setdefault(int(image[c]), INTERMEDIATE)
    return PartialDiagram(dict(sorted(roles.items())), tuple(arcs[key] for key in sorted(arcs)), chain.closure != HORIZON)
