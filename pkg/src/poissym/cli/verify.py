"""Independent replay of report evidence.

Only the parser and :func:`normal_form` are used: each residual is re-read,
checked against its recorded expression, and reduced with a freshly computed
Gröbner basis of the report's ideal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..gbengine import Ideal, normal_form
from ..polyring import PolySyntaxError, VarRing, parse_poly

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class MalformedReportError(ValueError):
    pass


@dataclass
class VerifyResult:
    code: int
    checked: int = 0
    messages: list = field(default_factory=list)


def _ring(doc, where) -> VarRing:
    try:
        return VarRing(tuple(doc["variables"]), tuple(doc["weights"]))
    except (KeyError, TypeError, ValueError) as e:
        raise MalformedReportError(f"{where}: bad ring description ({e})") from None


def _parse(text, ring, where):
    if not isinstance(text, str):
        raise MalformedReportError(f"{where}: expected a polynomial string")
    try:
        return parse_poly(text, ring)
    except PolySyntaxError as e:
        raise MalformedReportError(f"{where}: {e}") from None


def verify_document(doc) -> VerifyResult:
    if not isinstance(doc, dict) or doc.get("schema") != "poissym-report/1":
        raise MalformedReportError("not a poissym machine report (schema poissym-report/1)")
    ring = _ring(doc.get("ring"), "ring")
    ambient = _ring(doc["ambient"], "ambient") if doc.get("ambient") else ring
    ideal = Ideal(ring, tuple(_parse(g, ring, f"ideal[{k}]") for k, g in enumerate(doc.get("ideal", []))))
    certs = doc.get("certificates")
    if not isinstance(certs, list):
        raise MalformedReportError("missing certificate list")
    result = VerifyResult(EXIT_OK)
    if not certs:
        result.messages.append("warning: report contains no certificates")
        return result
    for c, cert in enumerate(certs):
        try:
            kind = cert["kind"]
            status = cert["status"]
            evidence = cert["evidence"]
        except (KeyError, TypeError):
            raise MalformedReportError(f"certificates[{c}]: missing kind/status/evidence") from None
        bad = 0
        for e, ev in enumerate(evidence):
            where = f"{kind}[{e}]"
            if not isinstance(ev, dict) or "residual" not in ev:
                raise MalformedReportError(f"{where}: missing residual")
            exact = bool(ev.get("exact", False))
            r_ring = ambient if exact else ring
            residual = _parse(ev["residual"], r_ring, f"{where}.residual")
            expr = ev.get("expression")
            if expr is not None:
                expanded = _parse(expr, r_ring, f"{where}.expression")
                if expanded != residual:
                    result.messages.append(f"{where}: expression does not expand to the residual")
                    bad += 1
                    continue
            vanishes = residual.is_zero() if exact else normal_form(residual, ideal).is_zero()
            result.checked += 1
            if not vanishes:
                result.messages.append(f"{where}: residual {residual} does not vanish")
                bad += 1
        if bad:
            result.code = EXIT_FAIL
            result.messages.append(f"{kind}: {bad} residual(s) failed replay")
        elif status != "pass":
            result.code = EXIT_FAIL
            result.messages.append(f"{kind}: recorded status is {status!r}")
        else:
            result.messages.append(f"{kind}: {len(evidence)} residual(s) replayed")
    return result


def verify_file(path: str) -> VerifyResult:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as e:
        raise MalformedReportError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise MalformedReportError(f"{path}: not a machine report ({e.msg} at line {e.lineno})") from None
    return verify_document(doc)
