"""Temporal rule schedules.

Time is 1-based.  ``F`` means the first rule of the pair is applied at that
step, ``G`` the second.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class Choice(str, Enum):
    F = "F"
    G = "G"

    def other(self) -> "Choice":
        return Choice.G if self is Choice.F else Choice.F


F, G = Choice.F, Choice.G

APERIODIC = "aperiodic"
UNKNOWN = "unknown"


class SequenceExhausted(IndexError):
    def __init__(self, t: int, horizon: int):
        self.t = t
        self.horizon = horizon
        super().__init__(f"rule sequence defined only up to t={horizon}, asked for t={t}")


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(t: int) -> bool:
    """Deterministic Miller-Rabin, exact for every t < 3.3e24."""
    if t < 2:
        return False
    for p in _MR_BASES:
        if t % p == 0:
            return t == p
    d, s = t - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, t)
        if x in (1, t - 1):
            continue
        for _ in range(s - 1):
            x = x * x % t
            if x == t - 1:
                break
        else:
            return False
    return True


def _primitive_root(pattern: str) -> str:
    n = len(pattern)
    for d in range(1, n + 1):
        if n % d == 0 and pattern[:d] * (n // d) == pattern:
            return pattern[:d]
    return pattern


_PREDICATES = {
    "ODD": (lambda t: t % 2 == 1, 2),
    "NOT_DIV_3": (lambda t: t % 3 != 0, 3),
    "NOT_PRIME": (lambda t: not is_prime(t), None),
}

_OEIS = {
    "A005408": "ODD",
    "A001651": "NOT_DIV_3",
    "A018252": "NOT_PRIME",
}


@dataclass(frozen=True)
class RuleSequence:
    """A schedule of F/G applications.

    Exactly one of ``pattern`` (periodic bit string), ``predicate`` (a
    built-in condition on t) or ``prefix`` (explicit bits, optionally
    continued by ``pattern``) describes the schedule.
    """

    identifier: str
    pattern: str | None = None
    predicate: str | None = None
    prefix: str | None = None

    def __post_init__(self):
        for bits in (self.pattern, self.prefix):
            if bits is not None and (not bits or set(bits) - {"0", "1"}):
                raise ValueError(f"rule sequence bits must be a non-empty 0/1 string, got {bits!r}")
        if self.predicate is not None and self.predicate not in _PREDICATES:
            raise ValueError(f"unknown predicate {self.predicate!r}")
        if self.pattern is None and self.predicate is None and self.prefix is None:
            raise ValueError("rule sequence needs a pattern, predicate or prefix")

    @classmethod
    def periodic(cls, pattern: str, identifier: str | None = None) -> "RuleSequence":
        return cls(identifier or f"({pattern})^+", pattern=pattern)

    @classmethod
    def explicit(cls, prefix: str, tail: str | None = None) -> "RuleSequence":
        ident = f"bits:{prefix}" + (f"({tail})^+" if tail else "")
        return cls(ident, pattern=tail, prefix=prefix)

    @classmethod
    def from_predicate(cls, name: str, identifier: str | None = None) -> "RuleSequence":
        return cls(identifier or name, predicate=name)

    @property
    def horizon(self) -> int | None:
        """Last defined time step, or None when the schedule is unbounded."""
        if self.prefix is not None and self.pattern is None:
            return len(self.prefix)
        return None

    def rule_at(self, t: int) -> Choice:
        if t < 1:
            raise ValueError(f"time steps start at 1, got {t}")
        if self.predicate is not None:
            return F if _PREDICATES[self.predicate][0](t) else G
        if self.prefix is not None:
            if t <= len(self.prefix):
                return F if self.prefix[t - 1] == "1" else G
            if self.pattern is None:
                raise SequenceExhausted(t, len(self.prefix))
            t -= len(self.prefix)
        return F if self.pattern[(t - 1) % len(self.pattern)] == "1" else G

    def period(self) -> int | str:
        """Minimal period, ``APERIODIC`` or ``UNKNOWN``.

        An explicit prefix with a periodic tail is only eventually periodic,
        so it reports ``UNKNOWN`` as well.
        """
        if self.predicate is not None:
            p = _PREDICATES[self.predicate][1]
            return APERIODIC if p is None else p
        if self.prefix is not None:
            return UNKNOWN
        return len(_primitive_root(self.pattern))

    @property
    def is_periodic(self) -> bool:
        return isinstance(self.period(), int)

    def phase_choices(self) -> tuple[Choice, ...]:
        """Rule applied at phases 0..l-1 (phase p is time step p + 1)."""
        l = self.period()
        if not isinstance(l, int):
            raise ValueError(f"sequence {self.identifier} is not periodic")
        return tuple(self.rule_at(t) for t in range(1, l + 1))

    def prefix_bits(self, T: int) -> str:
        if T < 1:
            raise ValueError(f"horizon must be >= 1, got {T}")
        return "".join("1" if self.rule_at(t) is F else "0" for t in range(1, T + 1))

    def __str__(self) -> str:
        return self.identifier


def rule_at(seq: RuleSequence, t: int) -> Choice:
    return seq.rule_at(t)


def period_of(seq: RuleSequence) -> int | str:
    return seq.period()


def sequence_prefix(seq: RuleSequence, T: int) -> str:
    return seq.prefix_bits(T)


def parse_sequence(spec: str | RuleSequence) -> RuleSequence:
    """Parse ``A005408``, ``A001651``, ``A018252``, ``pat:110``, ``(10)^+``,
    ``bits:0110`` or ``bits:0110+10`` (prefix followed by a periodic tail)."""
    if isinstance(spec, RuleSequence):
        return spec
    s = spec.strip()
    if s.upper() in _OEIS:
        return RuleSequence.from_predicate(_OEIS[s.upper()], s.upper())
    if s.upper() in _PREDICATES:
        return RuleSequence.from_predicate(s.upper())
    if s.startswith("pat:"):
        return RuleSequence.periodic(s[4:])
    if s.startswith("(") and s.endswith(")^+"):
        return RuleSequence.periodic(s[1:-3])
    if s.startswith("bits:"):
        prefix, _, tail = s[5:].partition("+")
        return RuleSequence.explicit(prefix, tail or None)
    raise ValueError(f"unknown rule sequence specifier {spec!r}")
