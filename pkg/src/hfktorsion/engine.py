"""Forward-chaining propagation of torsion, Gordian and unknotting bounds.

Facts are immutable tuples ``(kind, args)``.  Every stored fact carries
its provenance: ``seed``, ``asserted`` or the id of the rule that derived
it together with the ids of its premises.  Rules are pure functions of
their premise facts, which is what makes traces replayable
(:func:`audit_trace`).

Intervals only narrow and fresh knots are created once per twist fact,
so :meth:`FactStore.derive` reaches a fixpoint.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Callable, Iterable

__all__ = [
    "Fact",
    "FactRecord",
    "FactStore",
    "ContradictionError",
    "FactError",
    "RULES",
    "QueryResult",
    "audit_trace",
    "render_trace",
]

UNKNOT = "unknot"
PROPERTIES = ("doubly-slice", "amphicheiral", "smoothly-slice")

# kind -> argument layout; "k" is a knot id, "n" a nonnegative integer,
# "n?" an integer or None (unbounded), "p" a property name
SIGNATURES = {
    "TorsionInterval": ("k", "n", "n?"),
    "GordianGE": ("k", "k", "n"),
    "GordianLE": ("k", "k", "n"),
    "NullHomologousTwist": ("k", "k", "k"),
    "CrossingChange": ("k", "k"),
    "SEquivalent": ("k", "k"),
    "AlexanderOne": ("k",),
    "UnknottingGE": ("k", "n"),
    "UnknottingLE": ("k", "n"),
    "ConnectedSumWithInverse": ("k", "k"),
    "Property": ("k", "p"),
}
SYMMETRIC = {"GordianGE", "GordianLE", "SEquivalent", "CrossingChange"}


class FactError(ValueError):
    """Malformed fact."""


class ContradictionError(ValueError):
    def __init__(self, message: str, traces: tuple[str, ...] = ()):
        super().__init__(message + ("\n" + "\n".join(traces) if traces else ""))
        self.traces = traces


@dataclass(frozen=True)
class Fact:
    kind: str
    args: tuple

    def __post_init__(self):
        sig = SIGNATURES.get(self.kind)
        if sig is None:
            raise FactError(f"unknown fact kind {self.kind!r}")
        args = tuple(self.args)
        if self.kind == "NullHomologousTwist" and len(args) == 2:
            args = args + (f"{args[1]}'",)
        if len(args) != len(sig):
            raise FactError(f"{self.kind} takes {len(sig)} arguments, got {len(args)}")
        for a, s in zip(args, sig):
            if s == "k" and not (isinstance(a, str) and a):
                raise FactError(f"{self.kind}: knot ids must be nonempty strings, got {a!r}")
            if s == "n" and not (isinstance(a, int) and a >= 0):
                raise FactError(f"{self.kind}: expected a nonnegative integer, got {a!r}")
            if s == "n?" and not (a is None or (isinstance(a, int) and a >= 0)):
                raise FactError(f"{self.kind}: expected a nonnegative integer or null, got {a!r}")
            if s == "p" and a not in PROPERTIES:
                raise FactError(f"unknown property {a!r}")
        if self.kind in SYMMETRIC:
            args = tuple(sorted(args[:2])) + args[2:]
        object.__setattr__(self, "args", args)

    @classmethod
    def of(cls, kind: str, *args) -> Fact:
        return cls(kind, tuple(args))

    def knots(self) -> list[str]:
        return [a for a, s in zip(self.args, SIGNATURES[self.kind]) if s == "k"]

    def __str__(self) -> str:
        if self.kind == "TorsionInterval":
            k, lo, hi = self.args
            return f"TorsionInterval({k}, [{lo}, {'inf' if hi is None else hi}])"
        return f"{self.kind}({', '.join(map(str, self.args))})"

    def to_json(self) -> dict:
        return {"kind": self.kind, "args": list(self.args)}


@dataclass(frozen=True)
class FactRecord:
    id: int
    fact: Fact
    provenance: str  # "seed" | "asserted" | rule id
    premises: tuple[int, ...] = ()
    note: str = ""

    @property
    def derived(self) -> bool:
        return self.provenance not in ("seed", "asserted")

    def to_json(self) -> dict:
        out = {"id": self.id, **self.fact.to_json(), "provenance": self.provenance, "premises": list(self.premises)}
        if self.note:
            out["note"] = self.note
        return out


# ---------------------------------------------------------------- rules


def _meet(lo1, hi1, lo2, hi2):
    hi = hi2 if hi1 is None else hi1 if hi2 is None else min(hi1, hi2)
    return max(lo1, lo2), hi


def _r0(p: tuple[Fact, ...]) -> list[Fact]:
    a, b = p
    if a.kind == b.kind == "TorsionInterval" and a.args[0] == b.args[0]:
        lo, hi = _meet(a.args[1], a.args[2], b.args[1], b.args[2])
        if hi is not None and lo > hi:
            return []
        return [Fact.of("TorsionInterval", a.args[0], lo, hi)]
    return []


def _r1(p: tuple[Fact, ...]) -> list[Fact]:
    a, b = p
    if a.kind != "TorsionInterval" or b.kind != "TorsionInterval" or a.args[0] == b.args[0]:
        return []
    (k, lo1, hi1), (j, lo2, hi2) = a.args, b.args
    gap = max(0, lo1 - hi2 if hi2 is not None else 0, lo2 - hi1 if hi1 is not None else 0)
    return [Fact.of("GordianGE", k, j, gap)] if gap > 0 else []


def _r2(p: tuple[Fact, ...]) -> list[Fact]:
    dist, ti = p
    if dist.kind != "GordianLE" or ti.kind != "TorsionInterval":
        return []
    k, lo, hi = ti.args
    x, y, d = dist.args
    if k not in (x, y) or x == y:
        return []
    other = y if k == x else x
    return [Fact.of("TorsionInterval", other, max(0, lo - d), None if hi is None else hi + d)]


def _r3(p: tuple[Fact, ...]) -> list[Fact]:
    (f,) = p
    if f.kind == "NullHomologousTwist":
        k, j, w = f.args
        return [Fact.of("CrossingChange", k, w), Fact.of("SEquivalent", j, w)]
    if f.kind == "CrossingChange":
        return [Fact.of("GordianLE", *f.args, 1)]
    return []


def _r4(p: tuple[Fact, ...]) -> list[Fact]:
    seq, alex = p
    if seq.kind != "SEquivalent" or alex.kind != "AlexanderOne":
        return []
    (j,) = alex.args
    a, b = seq.args
    if j not in (a, b):
        return []
    return [Fact.of("AlexanderOne", b if j == a else a)]


def _r5(p: tuple[Fact, ...]) -> list[Fact]:
    csum, ti = p
    if csum.kind != "ConnectedSumWithInverse" or ti.kind != "TorsionInterval":
        return []
    sum_id, summand = csum.args
    if ti.args[0] != summand:
        return []
    return [Fact.of("TorsionInterval", sum_id, ti.args[1], ti.args[2])]


def _r6(p: tuple[Fact, ...]) -> list[Fact]:
    if len(p) == 1 and p[0].kind == "ConnectedSumWithInverse":
        sum_id = p[0].args[0]
        return [Fact.of("Property", sum_id, prop) for prop in PROPERTIES]
    if len(p) == 2 and p[0].kind == "ConnectedSumWithInverse" and p[1].kind == "AlexanderOne":
        if p[1].args[0] == p[0].args[1]:
            return [Fact.of("AlexanderOne", p[0].args[0])]
    return []


def _r7(p: tuple[Fact, ...]) -> list[Fact]:
    (f,) = p
    if f.kind == "TorsionInterval":
        return [Fact.of("UnknottingGE", f.args[0], f.args[1])]
    if f.kind == "UnknottingLE":
        return [Fact.of("TorsionInterval", f.args[0], 0, f.args[1])]
    return []


@dataclass(frozen=True)
class Rule:
    id: str
    name: str
    statement: str
    apply: Callable[[tuple[Fact, ...]], list[Fact]]


RULES: dict[str, Rule] = {
    r.id: r
    for r in [
        Rule("R0", "interval-meet", "two torsion intervals for one knot hold simultaneously", _r0),
        Rule("R1", "gordian-gap", "d(K, J) >= |t(K) - t(J)|, evaluated on intervals", _r1),
        Rule("R2", "torsion-transfer", "d(K, J) <= d forces t(J) into [t(K) - d, t(K) + d]", _r2),
        Rule(
            "R3",
            "twist-to-crossing-change",
            "a null-homologous twist K -> J gives J' S-equivalent to J and one crossing change from K; "
            "a crossing change means d <= 1",
            _r3,
        ),
        Rule("R4", "s-equivalence", "S-equivalent knots share their Alexander polynomial", _r4),
        Rule("R5", "sum-with-inverse-torsion", "t(J # -J) = max(t(J), t(-J)) = t(J)", _r5),
        Rule(
            "R6",
            "sum-with-inverse-properties",
            "J # -J is doubly slice (hence slice) and amphicheiral, with Alexander polynomial that of J squared",
            _r6,
        ),
        Rule("R7", "unknot-comparison", "with J the unknot (t = 0): u(K) >= t(K), and u(K) <= u bounds t(K) <= u", _r7),
    ]
}


# ---------------------------------------------------------------- store


@dataclass
class QueryResult:
    knot: str
    kind: str
    value: object
    record: FactRecord | None
    trace: str

    @property
    def bounded(self) -> bool:
        return self.record is not None


class FactStore:
    def __init__(self):
        self.records: list[FactRecord] = []
        self._index: dict[Fact, int] = {}
        self.knots: list[str] = []
        self.rule_log: list[dict] = []
        for f in (
            Fact.of("TorsionInterval", UNKNOT, 0, 0),
            Fact.of("UnknottingGE", UNKNOT, 0),
            Fact.of("UnknottingLE", UNKNOT, 0),
            Fact.of("AlexanderOne", UNKNOT),
        ):
            self._store(f, "seed", (), "")

    # -- bookkeeping

    def _store(self, fact: Fact, provenance: str, premises: tuple[int, ...], note: str) -> FactRecord:
        rec = FactRecord(len(self.records), fact, provenance, premises, note)
        self.records.append(rec)
        self._index[fact] = rec.id
        for k in fact.knots():
            if k not in self.knots:
                self.knots.append(k)
        return rec

    def of_kind(self, kind: str) -> list[FactRecord]:
        return [r for r in self.records if r.fact.kind == kind]

    def get(self, rid: int) -> FactRecord:
        return self.records[rid]

    def best_interval(self, knot: str) -> FactRecord | None:
        """The torsion-interval record contained in every other one for ``knot``."""
        recs = [r for r in self.of_kind("TorsionInterval") if r.fact.args[0] == knot]
        for r in recs:
            _, lo, hi = r.fact.args
            if all(_contains(o.fact.args[1:], (lo, hi)) for o in recs):
                return r
        return None

    def _best_scalar(self, kind: str, key: tuple, largest: bool) -> FactRecord | None:
        recs = [r for r in self.of_kind(kind) if r.fact.args[:-1] == key]
        if not recs:
            return None
        pick = max if largest else min
        value = pick(r.fact.args[-1] for r in recs)
        return min((r for r in recs if r.fact.args[-1] == value), key=lambda r: r.id)

    def _subsumed(self, fact: Fact) -> bool:
        if fact in self._index:
            return True
        kind, args = fact.kind, fact.args
        if kind == "TorsionInterval":
            return any(
                _contains((lo, hi), (olo, ohi))
                for r in self.of_kind(kind)
                if r.fact.args[0] == args[0]
                for _, olo, ohi in [r.fact.args]
                for lo, hi in [args[1:]]
            )
        if kind in ("GordianGE", "UnknottingGE"):
            if args[-1] == 0:
                return True
            best = self._best_scalar(kind, args[:-1], largest=True)
            return best is not None and best.fact.args[-1] >= args[-1]
        if kind in ("GordianLE", "UnknottingLE"):
            best = self._best_scalar(kind, args[:-1], largest=False)
            return best is not None and best.fact.args[-1] <= args[-1]
        return False

    def _check_consistency(self, rec: FactRecord) -> None:
        kind, args = rec.fact.kind, rec.fact.args
        pairs = {"GordianGE": "GordianLE", "GordianLE": "GordianGE", "UnknottingGE": "UnknottingLE", "UnknottingLE": "UnknottingGE"}
        if kind in pairs:
            other = self._best_scalar(pairs[kind], args[:-1], largest=kind.endswith("LE"))
            if other is None:
                return
            ge, le = (rec, other) if kind.endswith("GE") else (other, rec)
            if ge.fact.args[-1] > le.fact.args[-1]:
                raise ContradictionError(
                    f"{ge.fact} contradicts {le.fact}", (render_trace(self, ge.id), render_trace(self, le.id))
                )
        if kind == "TorsionInterval":
            for r in self.of_kind(kind):
                if r.fact.args[0] != args[0] or r.id == rec.id:
                    continue
                lo, hi = _meet(*args[1:], *r.fact.args[1:])
                if hi is not None and lo > hi:
                    raise ContradictionError(
                        f"{rec.fact} and {r.fact} have empty intersection",
                        (render_trace(self, rec.id), render_trace(self, r.id)),
                    )

    # -- public API

    def assert_fact(self, fact: Fact, note: str = "") -> FactRecord | None:
        """Store ``fact`` as asserted; returns ``None`` if it adds nothing new."""
        if fact.kind == "TorsionInterval" and fact.args[2] is not None and fact.args[1] > fact.args[2]:
            raise ContradictionError(f"{fact} is an empty interval")
        if fact in self._index:
            return None
        rec = self._store(fact, "asserted", (), note)
        try:
            self._check_consistency(rec)
        except ContradictionError:
            self.records.pop()
            del self._index[fact]
            raise
        return rec

    def _premise_sets(self, rule_id: str) -> Iterable[tuple[FactRecord, ...]]:
        best = {k: self.best_interval(k) for k in self.knots}
        if rule_id == "R0":
            for k in self.knots:
                recs = [r for r in self.of_kind("TorsionInterval") if r.fact.args[0] == k]
                if best[k] is None:
                    yield from itertools.combinations(recs, 2)
        elif rule_id == "R1":
            have = [best[k] for k in self.knots if best[k] is not None]
            yield from itertools.combinations(have, 2)
        elif rule_id == "R2":
            for r in self.of_kind("GordianLE"):
                best_d = self._best_scalar("GordianLE", r.fact.args[:-1], largest=False)
                if best_d is not r:
                    continue
                for k in r.fact.args[:2]:
                    if best[k] is not None:
                        yield (r, best[k])
        elif rule_id == "R3":
            for r in self.of_kind("NullHomologousTwist") + self.of_kind("CrossingChange"):
                yield (r,)
        elif rule_id == "R4":
            for s in self.of_kind("SEquivalent"):
                for a in self.of_kind("AlexanderOne"):
                    if a.fact.args[0] in s.fact.args:
                        yield (s, a)
        elif rule_id == "R5":
            for c in self.of_kind("ConnectedSumWithInverse"):
                b = best.get(c.fact.args[1])
                if b is not None:
                    yield (c, b)
        elif rule_id == "R6":
            for c in self.of_kind("ConnectedSumWithInverse"):
                yield (c,)
                for a in self.of_kind("AlexanderOne"):
                    if a.fact.args[0] == c.fact.args[1]:
                        yield (c, a)
        elif rule_id == "R7":
            for k in self.knots:
                if best[k] is not None:
                    yield (best[k],)
            for r in self.of_kind("UnknottingLE"):
                if self._best_scalar("UnknottingLE", r.fact.args[:-1], largest=False) is r:
                    yield (r,)

    def derive(self) -> list[FactRecord]:
        """Apply all rules until nothing new appears; returns the new records."""
        start = len(self.records)
        changed = True
        while changed:
            changed = False
            for rule in RULES.values():
                for premises in list(self._premise_sets(rule.id)):
                    for fact in rule.apply(tuple(p.fact for p in premises)):
                        if self._subsumed(fact):
                            continue
                        rec = self._store(fact, rule.id, tuple(p.id for p in premises), "")
                        self.rule_log.append({"rule": rule.id, "premises": list(rec.premises), "conclusion": rec.id})
                        self._check_consistency(rec)
                        changed = True
        return self.records[start:]

    def query(self, knot: str, kind: str, other: str | None = None) -> QueryResult:
        if knot not in self.knots:
            raise KeyError(f"unknown knot {knot!r}")
        rec = None
        value: object = None
        if kind == "TorsionInterval":
            rec = self.best_interval(knot)
            if rec is not None:
                value = (rec.fact.args[1], rec.fact.args[2])
        elif kind in ("UnknottingGE", "UnknottingLE"):
            rec = self._best_scalar(kind, (knot,), largest=kind == "UnknottingGE")
            value = None if rec is None else rec.fact.args[1]
        elif kind in ("GordianGE", "GordianLE"):
            if other is None:
                raise ValueError("Gordian queries need a second knot")
            rec = self._best_scalar(kind, tuple(sorted((knot, other))), largest=kind == "GordianGE")
            value = None if rec is None else rec.fact.args[2]
        elif kind == "AlexanderOne":
            rid = self._index.get(Fact.of("AlexanderOne", knot))
            rec = None if rid is None else self.records[rid]
            value = rec is not None
        elif kind in PROPERTIES:
            rid = self._index.get(Fact.of("Property", knot, kind))
            rec = None if rid is None else self.records[rid]
            value = rec is not None
        else:
            raise ValueError(f"unknown query kind {kind!r}")
        trace = render_trace(self, rec.id) if rec is not None else f"{kind}({knot}): unbounded (no fact known)"
        return QueryResult(knot, kind, value, rec, trace)

    # -- serialisation

    def to_json(self) -> dict:
        return {
            "knots": list(self.knots),
            "facts": [r.to_json() for r in self.records],
            "rule_log": list(self.rule_log),
            "rules": {r.id: {"name": r.name, "statement": r.statement} for r in RULES.values()},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


def _contains(outer: tuple, inner: tuple) -> bool:
    """Interval ``inner`` lies within ``outer`` (``None`` = unbounded above)."""
    olo, ohi = outer
    ilo, ihi = inner
    if ilo < olo:
        return False
    if ohi is None:
        return True
    return ihi is not None and ihi <= ohi


def ancestors(store: FactStore, rid: int) -> list[int]:
    seen: list[int] = []
    stack = [rid]
    while stack:
        r = stack.pop()
        if r in seen:
            continue
        seen.append(r)
        stack.extend(store.get(r).premises)
    return sorted(seen)


def render_trace(store: FactStore, rid: int, indent: str = "  ") -> str:
    lines: list[str] = []

    def walk(r: int, depth: int, path: tuple[int, ...]):
        rec = store.get(r)
        if rec.derived:
            rule = RULES[rec.provenance]
            tag = f"[{rule.id} {rule.name}: {rule.statement}]"
        else:
            tag = f"[{rec.provenance}{': ' + rec.note if rec.note else ''}]"
        lines.append(f"{indent * depth}#{rec.id} {rec.fact}  {tag}")
        if r in path:
            raise AssertionError("cyclic trace")
        for p in rec.premises:
            walk(p, depth + 1, path + (r,))

    walk(rid, 0, ())
    return "\n".join(lines)


def rule_applications(store: FactStore, rid: int) -> int:
    return sum(1 for r in ancestors(store, rid) if store.get(r).derived)


def audit_trace(store: FactStore, rid: int | None = None) -> list[str]:
    """Replay every derived edge below ``rid`` (default: all); returns failures."""
    ids = ancestors(store, rid) if rid is not None else [r.id for r in store.records]
    problems = []
    for r in ids:
        rec = store.get(r)
        if not rec.derived:
            continue
        if not rec.premises:
            problems.append(f"#{r} is derived without premises")
            continue
        if any(p >= r for p in rec.premises):
            problems.append(f"#{r} depends on a later fact")
        premises = tuple(store.get(p).fact for p in rec.premises)
        if rec.fact not in RULES[rec.provenance].apply(premises):
            problems.append(f"#{r} {rec.fact} does not follow from its premises by {rec.provenance}")
    return problems
