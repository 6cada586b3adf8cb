"""Reports shared by the command line: a human text form and a structured JSON form."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

SCHEMA_VERSION = 1


@dataclass
class Report:
    kind: str
    verdict: object
    regions: Optional[dict] = None
    witness: object = None
    timings: Optional[dict] = None
    details: dict = field(default_factory=dict)
    diagnostics: list = field(default_factory=list)
    exit_code: int = 0

    def as_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "verdict": self.verdict,
            "regions": self.regions,
            "witness": self.witness,
            "timings": self.timings,
        }
        if self.details:
            out["details"] = self.details
        if self.diagnostics:
            out["diagnostics"] = list(self.diagnostics)
        out["schema"] = SCHEMA_VERSION
        return out


def _plain(v):
    """JSON-ready copy: tuples become lists, sets become sorted lists."""
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, (set, frozenset)):
        return sorted((_plain(x) for x in v), key=lambda x: json.dumps(x))
    return v


def emit_report(r: Report, fmt: str = "human") -> str:
    if fmt == "structured":
        return json.dumps(_plain(r.as_dict()), ensure_ascii=False)
    if fmt != "human":
        raise ValueError("unknown format %s" % fmt)
    verdict = r.verdict
    if isinstance(verdict, bool):
        verdict = "true" if verdict else "false"
    lines = ["%s: %s" % (r.kind, verdict)]
    if r.regions:
        for k, v in r.regions.items():
            lines.append("  %s: %s" % (k, _human(v)))
    if r.witness is not None:
        lines.append("  witness: %s" % _human(r.witness))
    for k, v in r.details.items():
        if isinstance(v, list) and v and isinstance(v[0], str):
            lines.append("  %s:" % k)
            lines += ["    " + x for x in v]
        else:
            lines.append("  %s: %s" % (k, _human(v)))
    for d in r.diagnostics:
        lines.append("  ! " + d)
    if r.timings:
        lines.append("  timings: " + ", ".join("%s=%.4fs" % kv for kv in r.timings.items()))
    return "\n".join(lines)


def _human(v) -> str:
    if isinstance(v, str):
        return v
    return json.dumps(_plain(v), ensure_ascii=False)
