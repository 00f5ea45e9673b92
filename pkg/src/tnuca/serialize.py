"""JSON reports, DOT transition diagrams and PPM space-time images."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dynamics import PartialDiagram, RecurrenceRecord, evolve_cells
from .graphs import CombinedDiagram, ComponentAnalysis, EulerReport, HamiltonianReport
from .reach import ClassificationReport, InjectivityResult, RestrictedReversibility, Violation
from .sequences import F, parse_sequence

SCHEMA_VERSION = 1

EDGE_COLORS = {"F": "black", "G": "blue"}
ROLE_FILL = {"INITIAL": "white", "INTERMEDIATE": "gray"}


def dumps(doc: dict) -> str:
    return json.dumps({"schemaVersion": SCHEMA_VERSION, **doc}, indent=2) + "\n"


def _codes(s) -> list[int] | None:
    return None if s is None else sorted(int(x) for x in s)


def _violation(v: Violation | None):
    if v is None:
        return None
    return {"kind": v.kind, "rule": v.rule.value, "x1": v.x1, "x2": v.x2, "y": v.y, "t1": v.t1, "t2": v.t2}


def report_to_dict(r: ClassificationReport) -> dict:
    v, w = r.verdicts, r.witnesses

    def rule(s):
        return {
            "code": s.code,
            "injective": s.injective,
            "surjective": s.surjective,
            "bijective": s.bijective,
            "nonReachable": _codes(s.non_reachable),
            "nonReachableCount": len(s.non_reachable),
        }

    p = r.prop_not_reversible
    return {
        "inputs": {"f": r.f.code, "g": r.g.code, "n": r.n, "k": r.k, "sequence": r.sequence},
        "perRule": {"f": rule(r.f), "g": rule(r.g)},
        "verdicts": {
            "injective": v.injective,
            "surjective": v.surjective,
            "bijective": v.bijective,
            "reversible": v.reversible,
            "restrictedSurjective": v.restricted_surjective,
            "restrictedInjective": v.restricted_injective,
            "restrictedInjectiveFullSet": v.restricted_injective_full_set,
            "restrictedReversible": v.restricted_reversible,
            "weaklyReversible": v.weakly_reversible,
            "irreversible": v.irreversible,
            "horizonLimited": v.horizon_limited,
        },
        "witnesses": {
            "nonReachable": _codes(w.never_reached),
            "collision": None if w.collision is None else list(w.collision),
            "collisions": [list(c) for c in w.collisions],
            "Cin": _codes(w.cin),
            "CinCandidate": _codes(w.cin_candidate),
            "CinHeuristic": True,
        },
        "theorem1": _codes(r.theorem1),
        "notReversibleTest": {"applicable": p.applicable, "certified": p.certified, "case": p.case},
    }


def injectivity_to_dict(r: InjectivityResult) -> dict:
    return {"holds": r.holds, "witness": _violation(r.witness), "horizonLimited": r.horizon_limited}


def reversibility_to_dict(r: RestrictedReversibility) -> dict:
    return {
        "restrictedReversible": r.holds,
        "restrictedInjective": injectivity_to_dict(r.injectivity),
        "covered": len(r.covered),
        "missing": _codes(r.missing),
    }


def record_to_dict(rec: RecurrenceRecord) -> dict:
    return {
        "initial": rec.initial,
        "config": rec.config,
        "status": rec.status,
        "firstVisit": rec.first_visit,
        "preperiod": list(rec.preperiod),
        "block": list(rec.block),
        "K": rec.cycle_length,
    }


def _edges(circuit):
    return None if circuit is None else [[v, w, l.value] for v, w, l in circuit]


def graph_to_dict(
    components: list[ComponentAnalysis], euler: EulerReport, ham: HamiltonianReport
) -> dict:
    comps = []
    for c in components:
        comps.append({
            "componentId": c.component_id,
            "vertexCount": c.vertex_count,
            "edgeCount": c.edge_count,
            "vertices": list(c.vertices),
            "degrees": {str(v): d for v, d in c.degrees.items()},
            "eulerian": c.eulerian,
            "hamiltonian": {"exact": c.hamiltonian.verdict, "cycle": c.hamiltonian.cycle},
            "alternatingEulerLength": None if c.alternating_euler is None else len(c.alternating_euler),
            "alternatingEuler": _edges(c.alternating_euler),
        })
    return {
        "fullyEulerian": euler.fully_eulerian,
        "fullyHamiltonian": {"sufficientCondition": ham.sufficient_condition, "exact": ham.exact},
        "componentCount": len(comps),
        "components": comps,
    }


# ---------------------------------------------------------------------- DOT


def diagram_to_dot(diagram: CombinedDiagram, name: str = "tnuca") -> str:
    lines = [f'digraph "{name}" {{', "  node [shape=circle];"]
    lines += [f"  {v};" for v in range(diagram.num_vertices)]
    for v, w, l in diagram.edges():
        lines.append(f'  {v} -> {w} [label="{l.value}", color="{EDGE_COLORS[l.value]}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def partial_to_dot(pd: PartialDiagram, name: str = "tnuca_partial") -> str:
    lines = [f'digraph "{name}" {{', "  node [shape=circle, style=filled];"]
    for v, role in pd.roles.items():
        lines.append(f'  {v} [fillcolor="{ROLE_FILL[role]}", role="{role}"];')
    for v, w, l, phase in pd.arcs:
        lines.append(
            f'  {v} -> {w} [label="{l.value}", color="{EDGE_COLORS[l.value]}", phase="{phase}"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


_ATTR = re.compile(r'(\w+)\s*=\s*(?:"([^"]*)"|([\w.]+))')
_EDGE = re.compile(r"^(\w+)\s*->\s*(\w+)\s*(?:\[(.*)\])?$")
_NODE = re.compile(r"^(\w+)\s*(?:\[(.*)\])?$")


def _attrs(text: str | None) -> dict[str, str]:
    if not text:
        return {}
    return {m.group(1): m.group(2) if m.group(2) is not None else m.group(3) for m in _ATTR.finditer(text)}


def read_dot(text: str) -> tuple[dict[str, dict], list[tuple[str, str, dict]]]:
    """Parse the DOT subset written by this module back into nodes and edges."""
    body = text.strip()
    m = re.match(r'^digraph\s+(?:"[^"]*"|\w+)?\s*\{(.*)\}$', body, re.S)
    if not m:
        raise ValueError("not a digraph")
    nodes: dict[str, dict] = {}
    edges = []
    for stmt in m.group(1).split(";"):
        stmt = stmt.strip()
        if not stmt or stmt.startswith(("node ", "node[", "edge ", "graph ")):
            continue
        em = _EDGE.match(stmt)
        if em:
            edges.append((em.group(1), em.group(2), _attrs(em.group(3))))
            nodes.setdefault(em.group(1), {})
            nodes.setdefault(em.group(2), {})
            continue
        nm = _NODE.match(stmt)
        if not nm:
            raise ValueError(f"unparsable statement {stmt!r}")
        nodes.setdefault(nm.group(1), {}).update(_attrs(nm.group(2)))
    return nodes, edges


# ---------------------------------------------------------------------- PPM


@dataclass(frozen=True)
class RenderSpec:
    f_color: tuple[int, int, int] = (0, 0, 255)
    g_color: tuple[int, int, int] = (255, 0, 0)
    zero_color: tuple[int, int, int] = (255, 255, 255)
    scale: int = 1

    def __post_init__(self):
        if len({self.f_color, self.g_color, self.zero_color}) != 3:
            raise ValueError("palette colours must be distinct")
        if self.scale < 1:
            raise ValueError(f"scale must be >= 1, got {self.scale}")


def spacetime_image(f, g, seq, cells, T: int, render: RenderSpec = RenderSpec(), k: int = 2) -> np.ndarray:
    """RGB array of shape ``((T+1)*scale, n*scale, 3)``.

    Columns run from the most significant cell on the left, matching how
    encodings are written.  Row ``t >= 1`` tints non-zero cells by the rule
    applied at step ``t``; row 0 uses the f colour.
    """
    seq = parse_sequence(seq)
    rows = evolve_cells(f, g, seq, cells, T, k)[:, ::-1]
    img = np.empty(rows.shape + (3,), dtype=np.uint8)
    img[:] = render.zero_color
    for t in range(T + 1):
        color = render.f_color if t == 0 or seq.rule_at(t) is F else render.g_color
        img[t][rows[t] != 0] = color
    s = render.scale
    return np.repeat(np.repeat(img, s, axis=0), s, axis=1)


def write_ppm(path: str | Path, img: np.ndarray) -> None:
    h, w, _ = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(img, dtype=np.uint8).tobytes())


def read_ppm(path: str | Path) -> np.ndarray:
    data = Path(path).read_bytes()
    m = re.match(rb"P6\s+(\d+)\s+(\d+)\s+(\d+)\s", data)
    if not m:
        raise ValueError("not a binary PPM")
    w, h, maxval = (int(x) for x in m.groups())
    if maxval != 255:
        raise ValueError(f"unsupported max value {maxval}")
    pixels = np.frombuffer(data[m.end() : m.end() + w * h * 3], dtype=np.uint8)
    return pixels.reshape(h, w, 3)
