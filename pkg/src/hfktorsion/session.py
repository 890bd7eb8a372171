"""JSON session files: knots with attached tables, asserted facts and queries."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .data import bundled_table
from .engine import ContradictionError, Fact, FactStore, audit_trace, rule_applications
from .tables import read_hfk, verify_table
from .torsion import torsion_interval

SESSION_FORMAT = "hfktorsion-session/1"


class SessionError(ValueError):
    """Malformed session file."""


@dataclass
class Session:
    knots: list[dict] = field(default_factory=list)
    facts: list[dict] = field(default_factory=list)
    queries: list[dict] = field(default_factory=list)
    external_claims: list[dict] = field(default_factory=list)
    description: str = ""
    base_dir: Path | None = None

    @classmethod
    def from_json(cls, obj: dict, base_dir: Path | None = None) -> Session:
        if not isinstance(obj, dict) or obj.get("format") != SESSION_FORMAT:
            raise SessionError(f"expected a session object with format {SESSION_FORMAT!r}")
        for key in ("knots", "facts", "queries", "external_claims"):
            if not isinstance(obj.get(key, []), list):
                raise SessionError(f"{key} must be a list")
        return cls(
            knots=obj.get("knots", []),
            facts=obj.get("facts", []),
            queries=obj.get("queries", []),
            external_claims=obj.get("external_claims", []),
            description=obj.get("description", ""),
            base_dir=base_dir,
        )

    @classmethod
    def load(cls, path: str | Path) -> Session:
        path = Path(path)
        try:
            obj = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise SessionError(f"{path}: invalid JSON ({exc})") from None
        return cls.from_json(obj, base_dir=path.parent)

    def _table(self, source: str, name: str):
        if source.startswith("bundled:"):
            tab = bundled_table(source.split(":", 1)[1])
        else:
            path = Path(source)
            if not path.is_absolute() and self.base_dir is not None:
                path = self.base_dir / path
            tab = read_hfk(path.read_text(), name=name)
        report = verify_table(tab)
        if not report.ok:
            raise ContradictionError(f"table for {name} failed verification: {report.failures()}")
        return report.table

    def build_store(self) -> FactStore:
        store = FactStore()
        for k in self.knots:
            kid = k.get("id")
            if not isinstance(kid, str) or not kid:
                raise SessionError(f"knot entry without id: {k}")
            if "table" in k:
                tab = self._table(k["table"], kid)
                iv = torsion_interval(tab, k.get("external_upper"))
                p = iv.provenance
                note = f"from HFK-hat table {tab.name}: diagonal check {p['lemma']}, minmax {p['minmax']}, maxmax {p['maxmax']}"
                if p["external_upper"] is not None:
                    note += f", external upper {p['external_upper']}"
                store.assert_fact(Fact.of("TorsionInterval", kid, iv.lower, iv.upper), note)
            elif kid not in store.knots:
                store.knots.append(kid)
        for f in self.facts:
            try:
                fact = Fact(f["kind"], tuple(f["args"]))
            except (KeyError, TypeError) as exc:
                raise SessionError(f"malformed fact {f}: {exc}") from None
            store.assert_fact(fact, f.get("note", ""))
        return store


def run_session(session: Session) -> tuple[FactStore, dict]:
    """Derive to fixpoint and collect the report (raises ContradictionError)."""
    store = session.build_store()
    new = store.derive()
    answers = []
    for q in session.queries:
        try:
            res = store.query(q["knot"], q["kind"], q.get("other"))
        except KeyError as exc:
            raise SessionError(f"query names unknown knot: {exc}") from None
        except ValueError as exc:
            raise SessionError(str(exc)) from None
        value = list(res.value) if isinstance(res.value, tuple) else res.value
        answers.append(
            {
                "knot": res.knot,
                "kind": res.kind,
                "value": value,
                "bounded": res.bounded,
                "fact": None if res.record is None else res.record.id,
                "rule_applications": 0 if res.record is None else rule_applications(store, res.record.id),
                "trace": res.trace,
            }
        )
    report = {
        "description": session.description,
        "derived": len(new),
        "audit": audit_trace(store),
        "answers": answers,
        "external_claims": session.external_claims,
        "store": store.to_json(),
    }
    return store, report


def render_report(report: dict) -> str:
    lines = []
    if report["description"]:
        lines.append(report["description"])
    lines.append(f"derived facts: {report['derived']}")
    lines.append("trace audit: " + ("pass" if not report["audit"] else "FAIL " + "; ".join(report["audit"])))
    for a in report["answers"]:
        lines.append("")
        lines.append(f"query {a['kind']}({a['knot']}) = {_fmt(a)}")
        lines.append(a["trace"])
    for claim in report["external_claims"]:
        lines.append("")
        lines.append(f"external claim {claim.get('statement')}: {claim.get('status', 'not machine-derived')}")
    return "\n".join(lines) + "\n"


def _fmt(a: dict) -> str:
    if not a["bounded"]:
        return "unbounded"
    v = a["value"]
    if a["kind"] == "TorsionInterval":
        return f"[{v[0]}, {'inf' if v[1] is None else v[1]}]"
    if a["kind"] == "UnknottingGE":
        return f">= {v}"
    if a["kind"] == "UnknottingLE":
        return f"<= {v}"
    return str(v).lower()


__all__ = ["Session", "SessionError", "SESSION_FORMAT", "run_session", "render_report"]
