"""Reachability and the reversibility taxonomy of a rule pair under a schedule.

The central object is the restriction chain: starting from a set of
configurations ``C_1``, apply the scheduled rule to the whole set at every
step, ``C_{t+1} = G_t(C_t)``.  Surjectivity and injectivity questions are
answered on that chain.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .rules import GlobalMap, LocalRule, as_rule, build_global_map
from .sequences import Choice, F, G, RuleSequence, parse_sequence

REPEATED_STATE = "REPEATED_STATE"
HORIZON = "HORIZON"


def resolve_maps(f, g, n: int, k: int = 2, budget: int | None = None) -> tuple[GlobalMap, GlobalMap]:
    """Global maps for a rule pair; integer codes are read as (k, 3) rules."""
    rf, rg = as_rule(f, k), as_rule(g, k)
    if rf.states != rg.states:
        raise ValueError(f"rules have different state counts ({rf.states} vs {rg.states})")
    return build_global_map(rf, n, budget), build_global_map(rg, n, budget)


def _check_pair(map_f: GlobalMap, map_g: GlobalMap) -> None:
    if map_f.size != map_g.size or map_f.states != map_g.states:
        raise ValueError(
            f"maps disagree on lattice/alphabet: n={map_f.size},k={map_f.states} "
            f"vs n={map_g.size},k={map_g.states}"
        )


def collisions(image: np.ndarray, domain: np.ndarray) -> list[tuple[int, int, int]]:
    """All ``(x1, x2, y)`` with ``x1 < x2`` in ``domain`` and a shared image ``y``.

    ``x1`` is always the smallest preimage of ``y`` in the domain, so a ``y``
    with ``p`` preimages contributes ``p - 1`` triples.  Sorted by ``(x1, x2)``.
    """
    domain = np.sort(np.asarray(domain, dtype=np.int64))
    if len(domain) < 2:
        return []
    ys = image[domain]
    order = np.argsort(ys, kind="stable")
    ys, xs = ys[order], domain[order]
    first = np.ones(len(ys), dtype=bool)
    first[1:] = ys[1:] != ys[:-1]
    lead = np.maximum.accumulate(np.where(first, np.arange(len(ys)), 0))
    dup = ~first
    triples = sorted(zip(xs[lead][dup].tolist(), xs[dup].tolist(), ys[dup].tolist()))
    return triples


@dataclass(frozen=True)
class ChainStep:
    t: int
    rule: Choice
    domain: frozenset[int]
    image: frozenset[int]
    collisions: tuple[tuple[int, int, int], ...] = ()

    @property
    def injective(self) -> bool:
        return not self.collisions


@dataclass(frozen=True)
class RestrictionChain:
    steps: tuple[ChainStep, ...]
    closure: str
    # t of the first step whose (domain, phase) state recurs; None for HORIZON
    repeat_from: int | None = None

    @property
    def reached(self) -> frozenset[int]:
        out: set[int] = set()
        for s in self.steps:
            out |= s.image
        return frozenset(out)

    @property
    def initial(self) -> frozenset[int]:
        return self.steps[0].domain


def _as_domain(C: Iterable[int] | None, total: int) -> np.ndarray:
    if C is None:
        return np.arange(total, dtype=np.int64)
    dom = np.unique(np.fromiter((int(c) for c in C), dtype=np.int64))
    if len(dom) == 0:
        raise ValueError("initial configuration set must be non-empty")
    if dom[0] < 0 or dom[-1] >= total:
        raise ValueError(f"initial configurations must lie in 0..{total - 1}")
    return dom


def default_horizon(total: int) -> int:
    return 4 * total


def chain_from_maps(
    map_f: GlobalMap,
    map_g: GlobalMap,
    seq: RuleSequence,
    C1: Iterable[int] | None = None,
    horizon: int | None = None,
) -> RestrictionChain:
    _check_pair(map_f, map_g)
    total = map_f.num_configs
    dom = _as_domain(C1, total)
    period = seq.period()
    periodic = isinstance(period, int)
    if horizon is None:
        # periodic chains always close on a repeated (set, phase) state
        horizon = float("inf") if periodic else default_horizon(total)
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    if seq.horizon is not None:
        horizon = min(horizon, seq.horizon)

    steps: list[ChainStep] = []
    seen: dict[tuple[bytes, int], int] = {}
    t = 1
    while True:
        if periodic:
            key = (dom.tobytes(), (t - 1) % period)
            if key in seen:
                return RestrictionChain(tuple(steps), REPEATED_STATE, seen[key])
            seen[key] = t
        if t > horizon:
            return RestrictionChain(tuple(steps), HORIZON, None)
        choice = seq.rule_at(t)
        gmap = map_f if choice is F else map_g
        img = np.unique(gmap.image[dom])
        steps.append(
            ChainStep(
                t,
                choice,
                frozenset(dom.tolist()),
                frozenset(img.tolist()),
                tuple(collisions(gmap.image, dom)),
            )
        )
        dom = img
        t += 1


def run_restriction_chain(
    f,
    g,
    seq,
    n: int,
    C1: Iterable[int] | None = None,
    horizon: int | None = None,
    k: int = 2,
    budget: int | None = None,
) -> RestrictionChain:
    """Run ``C_{t+1} = G_t(C_t)`` until a (set, phase) state repeats or the horizon.

    ``C1=None`` starts from the full configuration set.
    """
    map_f, map_g = resolve_maps(f, g, n, k, budget)
    return chain_from_maps(map_f, map_g, parse_sequence(seq), C1, horizon)


def theorem1_core(map_f: GlobalMap, map_g: GlobalMap) -> frozenset[int]:
    """Configurations unreachable by both rules, hence by every schedule."""
    _check_pair(map_f, map_g)
    return map_f.non_reachable & map_g.non_reachable


@dataclass(frozen=True)
class ReversibleBasis:
    reversible: bool
    f_bijective: bool
    g_bijective: bool


def classify_reversible(map_f: GlobalMap, map_g: GlobalMap) -> ReversibleBasis:
    _check_pair(map_f, map_g)
    return ReversibleBasis(
        map_f.bijective and map_g.bijective, map_f.bijective, map_g.bijective
    )


@dataclass(frozen=True)
class SurjectivityResult:
    holds: bool
    never_reached: frozenset[int]
    horizon_limited: bool
    chain: RestrictionChain = field(repr=False)


def _restricted_surjective(map_f, map_g, seq, horizon=None) -> SurjectivityResult:
    chain = chain_from_maps(map_f, map_g, seq, None, horizon)
    missing = frozenset(range(map_f.num_configs)) - chain.reached
    return SurjectivityResult(not missing, missing, chain.closure == HORIZON, chain)


def is_restricted_surjective(
    f, g, seq, n: int, horizon: int | None = None, k: int = 2, budget: int | None = None
) -> SurjectivityResult:
    """Every configuration is an image somewhere on the chain started from all of them.

    For aperiodic schedules the verdict only covers steps up to ``horizon``;
    ``horizon_limited`` is then set.
    """
    map_f, map_g = resolve_maps(f, g, n, k, budget)
    return _restricted_surjective(map_f, map_g, parse_sequence(seq), horizon)


@dataclass(frozen=True)
class Violation:
    kind: str  # "step": inside one restriction; "cross": same rule on different steps
    rule: Choice
    x1: int
    x2: int
    y: int
    t1: int
    t2: int


@dataclass(frozen=True)
class InjectivityResult:
    holds: bool
    witness: Violation | None
    horizon_limited: bool
    chain: RestrictionChain = field(repr=False)


def _first_step_with(chain: RestrictionChain, rule: Choice, x: int) -> int:
    return next(s.t for s in chain.steps if s.rule is rule and x in s.domain)


def _restricted_injective(map_f, map_g, seq, Cin, horizon=None) -> InjectivityResult:
    chain = chain_from_maps(map_f, map_g, seq, Cin, horizon)
    limited = chain.closure == HORIZON
    for s in chain.steps:
        if s.collisions:
            x1, x2, y = s.collisions[0]
            return InjectivityResult(False, Violation("step", s.rule, x1, x2, y, s.t, s.t), limited, chain)
    # same rule, same image => same preimage, across every step using that rule
    for rule, gmap in ((F, map_f), (G, map_g)):
        used: set[int] = set()
        for s in chain.steps:
            if s.rule is rule:
                used |= s.domain
        clash = collisions(gmap.image, np.fromiter(used, dtype=np.int64, count=len(used)))
        if clash:
            x1, x2, y = clash[0]
            v = Violation(
                "cross", rule, x1, x2, y,
                _first_step_with(chain, rule, x1), _first_step_with(chain, rule, x2),
            )
            return InjectivityResult(False, v, limited, chain)
    return InjectivityResult(True, None, limited, chain)


def verify_restricted_injective(
    f, g, seq, n: int, Cin: Iterable[int], horizon: int | None = None,
    k: int = 2, budget: int | None = None,
) -> InjectivityResult:
    map_f, map_g = resolve_maps(f, g, n, k, budget)
    return _restricted_injective(map_f, map_g, parse_sequence(seq), Cin, horizon)


@dataclass(frozen=True)
class RestrictedReversibility:
    holds: bool
    injectivity: InjectivityResult
    covered: frozenset[int]
    missing: frozenset[int]


def _restricted_reversible(map_f, map_g, seq, Cin, horizon=None) -> RestrictedReversibility:
    inj = _restricted_injective(map_f, map_g, seq, Cin, horizon)
    covered = inj.chain.initial | inj.chain.reached
    missing = frozenset(range(map_f.num_configs)) - covered
    return RestrictedReversibility(inj.holds and not missing, inj, covered, missing)


def verify_restricted_reversible(
    f, g, seq, n: int, Cin: Iterable[int], horizon: int | None = None,
    k: int = 2, budget: int | None = None,
) -> RestrictedReversibility:
    """Restricted injectivity from ``Cin`` plus full coverage by ``Cin`` and its images."""
    map_f, map_g = resolve_maps(f, g, n, k, budget)
    return _restricted_reversible(map_f, map_g, parse_sequence(seq), Cin, horizon)


@dataclass(frozen=True)
class InitialSetSearch:
    found: bool
    cin: frozenset[int]  # the verifying set when found, else the largest injective set
    verification: RestrictedReversibility | None  # None when no single configuration qualifies


def _find_initial_set(map_f, map_g, seq, horizon=None) -> InitialSetSearch:
    cin: list[int] = []
    for c in range(map_f.num_configs):
        if _restricted_injective(map_f, map_g, seq, cin + [c], horizon).holds:
            cin.append(c)
    if not cin:
        return InitialSetSearch(False, frozenset(), None)
    result = _restricted_reversible(map_f, map_g, seq, cin, horizon)
    return InitialSetSearch(result.holds, frozenset(cin), result)


def find_restricted_initial_set(
    f, g, seq, n: int, horizon: int | None = None, k: int = 2, budget: int | None = None
) -> InitialSetSearch:
    """Greedy ascending search for an initial set making the pair restricted reversible.

    A candidate is kept iff restricted injectivity survives adding it.  The
    result is maximal with respect to that visit order only.
    """
    map_f, map_g = resolve_maps(f, g, n, k, budget)
    return _find_initial_set(map_f, map_g, parse_sequence(seq), horizon)


@dataclass(frozen=True)
class NonReversibilityCertificate:
    applicable: bool
    certified: bool
    case: int | None  # 1: S_g within S_f; 2: something outside both
    reason: str = ""
    s_f: frozenset[int] = frozenset()
    s_g: frozenset[int] = frozenset()


def check_prop_not_reversible(
    f, g, n: int, seq=None, k: int = 2, budget: int | None = None
) -> NonReversibilityCertificate:
    """Sufficient test that a pair of irreversible rules, f first, is neither
    restricted nor weakly reversible."""
    map_f, map_g = resolve_maps(f, g, n, k, budget)
    if map_f.bijective or map_g.bijective:
        return NonReversibilityCertificate(False, False, None, "a rule is bijective")
    if seq is not None and parse_sequence(seq).rule_at(1) is not F:
        return NonReversibilityCertificate(False, False, None, "schedule does not start with f")
    s_f = map_f.image_set
    s_g = frozenset(np.unique(map_g.image[np.fromiter(s_f, dtype=np.int64)]).tolist())
    if s_g <= s_f:
        return NonReversibilityCertificate(True, True, 1, "", s_f, s_g)
    if frozenset(range(map_f.num_configs)) - s_f - s_g:
        return NonReversibilityCertificate(True, True, 2, "", s_f, s_g)
    return NonReversibilityCertificate(True, False, None, "", s_f, s_g)


@dataclass(frozen=True)
class RuleSummary:
    code: int
    injective: bool
    surjective: bool
    bijective: bool
    non_reachable: frozenset[int]

    @classmethod
    def of(cls, gmap: GlobalMap) -> "RuleSummary":
        return cls(gmap.rule.code, gmap.injective, gmap.surjective, gmap.bijective, gmap.non_reachable)


@dataclass(frozen=True)
class Verdicts:
    injective: bool
    surjective: bool
    bijective: bool
    reversible: bool
    restricted_surjective: bool
    restricted_injective: bool
    restricted_injective_full_set: bool
    restricted_reversible: bool
    weakly_reversible: bool
    irreversible: bool
    horizon_limited: bool


@dataclass(frozen=True)
class Witnesses:
    never_reached: frozenset[int]
    collision: tuple[int, int, int] | None
    collisions: tuple[tuple[int, int, int], ...]
    cin: frozenset[int] | None
    cin_candidate: frozenset[int]


@dataclass(frozen=True)
class ClassificationReport:
    f: RuleSummary
    g: RuleSummary
    n: int
    k: int
    sequence: str
    verdicts: Verdicts
    witnesses: Witnesses
    theorem1: frozenset[int]
    prop_not_reversible: NonReversibilityCertificate


def classify(
    f, g, seq, n: int, k: int = 2, horizon: int | None = None, budget: int | None = None
) -> ClassificationReport:
    map_f, map_g = resolve_maps(f, g, n, k, budget)
    seq = parse_sequence(seq)
    basis = classify_reversible(map_f, map_g)
    surj = _restricted_surjective(map_f, map_g, seq, horizon)
    full_inj = _restricted_injective(map_f, map_g, seq, None, horizon)
    search = _find_initial_set(map_f, map_g, seq, horizon)
    inj = search.verification.injectivity if search.verification else full_inj

    all_collisions = sorted({c for s in surj.chain.steps for c in s.collisions})
    verdicts = Verdicts(
        injective=map_f.injective and map_g.injective,
        surjective=map_f.surjective and map_g.surjective,
        bijective=basis.reversible,
        reversible=basis.reversible,
        restricted_surjective=surj.holds,
        restricted_injective=bool(search.cin) and inj.holds,
        restricted_injective_full_set=full_inj.holds,
        # restricted reversibility presupposes restricted surjectivity
        restricted_reversible=surj.holds and search.found,
        weakly_reversible=surj.holds,
        irreversible=not basis.reversible,
        horizon_limited=surj.horizon_limited or full_inj.horizon_limited or inj.horizon_limited,
    )
    witnesses = Witnesses(
        never_reached=surj.never_reached,
        collision=all_collisions[0] if all_collisions else None,
        collisions=tuple(all_collisions),
        cin=search.cin if search.found else None,
        cin_candidate=search.cin,
    )
    if seq.rule_at(1) is F:
        prop = check_prop_not_reversible(map_f.rule, map_g.rule, n, budget=budget)
    else:
        prop = NonReversibilityCertificate(False, False, None, "schedule does not start with f")
    return ClassificationReport(
        RuleSummary.of(map_f), RuleSummary.of(map_g), n, map_f.states, seq.identifier,
        verdicts, witnesses, theorem1_core(map_f, map_g), prop,
    )
