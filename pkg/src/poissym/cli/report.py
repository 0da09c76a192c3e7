"""Report documents: plain text for people, JSON for machines.

JSON schema (``schema`` = ``poissym-report/1``)::

    {
      "schema": "poissym-report/1",
      "command": str,
      "source": str | null,
      "ring": {"variables": [str], "weights": [int]},
      "ideal": [poly],
      "ambient": {"variables": [str], "weights": [int]} | null,
      "results": {name: str | [str] | [[str]] | {...}},
      "certificates": [
        {"kind": str, "status": "pass" | "fail", "notes": [str],
         "evidence": [{"inputs": [str], "expression": str | null,
                       "residual": poly, "exact": bool}]}
      ],
      "status": "pass" | "fail" | "info",
      "timings": {stage: seconds}          (absent with --no-timings)
    }

Every ``poly`` is a canonical polynomial string.  Residuals marked ``exact``
live in the ambient ring and must be identically zero; all others must reduce
to zero modulo ``ideal``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from ..gbengine import Ideal
from ..polyring import Poly, VarRing

SCHEMA = "poissym-report/1"


def _ring_doc(ring: VarRing) -> dict:
    return {"variables": list(ring.variables), "weights": list(ring.weights)}


def to_plain(value):
    """Convert results (Poly, ModVec, nested lists) to strings and lists."""
    if isinstance(value, Poly):
        return str(value)
    if hasattr(value, "entries"):
        return [str(e) for e in value.entries]
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, (str, int, bool)) or value is None:
        return value
    return str(value)


def certificate_doc(cert) -> dict:
    return {
        "kind": cert.kind,
        "status": cert.status,
        "notes": [str(n) for n in cert.notes],
        "evidence": [
            {
                "inputs": [str(x) for x in ev.inputs],
                "expression": ev.expression,
                "residual": str(ev.residual),
                "exact": bool(ev.exact),
            }
            for ev in cert.evidence
        ],
    }


@dataclass
class Report:
    command: str
    ring: VarRing
    ideal: Ideal
    source: Optional[str] = None
    ambient: Optional[VarRing] = None
    results: dict = field(default_factory=dict)
    certificates: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    halted: Optional[str] = None  # reason the certificate chain stopped early

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.certificates) and self.halted is None

    @property
    def status(self) -> str:
        if not self.certificates and self.halted is None:
            return "info"
        return "pass" if self.passed else "fail"

    def document(self, timings: bool = True) -> dict:
        doc = {
            "schema": SCHEMA,
            "command": self.command,
            "source": self.source,
            "ring": _ring_doc(self.ring),
            "ideal": [str(g) for g in self.ideal.generators],
            "ambient": _ring_doc(self.ambient) if self.ambient is not None else None,
            "results": to_plain(self.results),
            "certificates": [certificate_doc(c) for c in self.certificates],
            "status": self.status,
        }
        if self.halted is not None:
            doc["halted"] = self.halted
        if timings:
            doc["timings"] = {k: round(v, 6) for k, v in self.timings.items()}
        return doc

    def render(self, fmt: str = "text", timings: bool = True) -> str:
        if fmt == "machine":
            return json.dumps(self.document(timings), indent=2) + "\n"
        return render_text(self, timings)


def _text_value(name: str, value, out: list, indent: str = "  "):
    if isinstance(value, dict):
        out.append(f"{indent}{name}:")
        for k, v in value.items():
            if isinstance(v, list) and not any(isinstance(x, list) for x in v):
                out.append(f"{indent}  {k}: [" + ", ".join(str(x) for x in v) + "]")
            else:
                _text_value(k, v, out, indent + "  ")
    elif isinstance(value, list) and value and isinstance(value[0], list):
        out.append(f"{indent}{name}:")
        for row in value:
            out.append(f"{indent}  [" + ", ".join(str(x) for x in row) + "]")
    elif isinstance(value, list):
        out.append(f"{indent}{name}:")
        if not value:
            out.append(f"{indent}  (none)")
        for x in value:
            out.append(f"{indent}  {x}")
    else:
        out.append(f"{indent}{name}: {value}")


def _vanishes(ev, report: Report) -> bool:
    if ev.exact or ev.residual.ring != report.ring:
        return ev.residual.is_zero()
    return report.ideal.contains(ev.residual)


def render_text(report: Report, timings: bool = True) -> str:
    out = [f"poissym {report.command}" + (f" ({report.source})" if report.source else "")]
    if report.ambient is not None:
        out.append(f"ambient ring: {report.ambient}")
    out.append(f"ring: {report.ring}")
    gens = ", ".join(str(g) for g in report.ideal.generators) or "0"
    out.append(f"ideal: ({gens})")
    out.append("results:")
    for name, value in to_plain(report.results).items():
        _text_value(name, value, out)
    if report.certificates:
        out.append("certificates:")
        for c in report.certificates:
            out.append(f"  {c.kind}: {c.status.upper()} ({len(c.evidence)} residuals)")
            for n in c.notes:
                out.append(f"    note: {n}")
            if not c.passed:
                shown = 0
                for ev in c.evidence:
                    if _vanishes(ev, report):
                        continue
                    out.append(f"    offending {', '.join(str(x) for x in ev.inputs)}: {ev.residual}")
                    shown += 1
                    if shown == 5:
                        break
    if report.halted:
        out.append(f"halted: {report.halted}")
    out.append(f"status: {report.status.upper()}")
    if timings and report.timings:
        out.append("timings: " + ", ".join(f"{k}={v:.3f}s" for k, v in report.timings.items()))
    return "\n".join(out) + "\n"
