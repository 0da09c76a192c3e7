"""Command line entry point: ``poissym {gb,derivations,symplectic,quotient,verify}``."""

from __future__ import annotations

import argparse
import os
import sys
import time
from contextlib import contextmanager

from ..finitequotients import (
    DiagonalCyclicGroup,
    GroupOrderError,
    HilbertData,
    MatrixGroup,
    NotInSubalgebraError,
    cotangent_lift,
    invariant_derivations,
    pushed_symplectic,
    verify_base_change,
)
from ..gbengine import Ideal, buchberger, ideal_membership
from ..naivederham import (
    Certificate,
    Evidence,
    GramForm,
    InexpressibleBracketError,
    PreconditionError,
    _certify,
    check_descends,
    closedness_check,
    compatibility_check,
    delta_ham_check,
    generator_names,
    gram_determinant,
    nondegeneracy_check,
    omega_ham,
)
from ..poissoncore import PoissonStructure, apply_field, bracket
from ..polyring import Poly, VarRing, canonical_string
from ..tangentfields import DegenerateIdealError, NotPoissonIdealError, der_presentation, tangent_derivations
from .problem import ProblemFileError, load_problem, parse_rows
from .report import Report
from .verify import MalformedReportError, verify_file

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


class InputError(Exception):
    pass


@contextmanager
def _timed(report: Report, stage: str):
    t0 = time.perf_counter()
    yield
    report.timings[stage] = time.perf_counter() - t0


def thread_count() -> int:
    raw = os.environ.get("POISSYM_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"POISSYM_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise InputError(f"POISSYM_THREADS must be a positive integer, got {raw!r}")
    return n


def _load(args):
    pf = load_problem(args.file)
    if args.order:
        pf.order = args.order
    if args.degree_bound is not None:
        pf.degree_bound = args.degree_bound
    return pf


def power_form(det: Poly, I: Ideal) -> str:
    """Write det as c*f^k when I = (f) is principal; otherwise the plain string."""
    gens = I.nonzero_generators
    if det.is_zero() or len(gens) != 1:
        return str(det)
    f = gens[0]
    k = 0
    rest = det
    while not rest.is_constant():
        ok, coeffs = ideal_membership(rest, Ideal(f.ring, (f,)))
        if not ok:
            return str(det)
        rest = coeffs[0]
        k += 1
    c = rest.constant_value()
    if k == 0:
        return str(det)
    power = "f" if k == 1 else f"f^{k}"
    return power if c == 1 else f"{c}*{power}"


def _poisson_certificate(I: Ideal, pi: PoissonStructure) -> Certificate:
    ring = pi.ring
    evidence = []
    for i in range(ring.nvars):
        for f in I.nonzero_generators:
            evidence.append(Evidence((f"{{{ring.variables[i]}, {f}}}",), bracket(ring.gen(i), f, pi)))
    return _certify("poisson_ideal", evidence, I)


def _tangency_certificate(I: Ideal, fields) -> Certificate:
    evidence = []
    for k, X in enumerate(fields):
        for f in I.nonzero_generators:
            evidence.append(Evidence((f"field {k + 1}", str(f)), apply_field(X, f)))
    return _certify("tangency", evidence, I)


def _presentation_results(pres) -> dict:
    names = generator_names(pres)
    return {
        "generators": {f"{n} [{lab.kind}]": X for n, lab, X in zip(names, pres.labels, pres.generators)},
        "extras": [n for n, lab in zip(names, pres.labels) if lab.kind != "hamiltonian"],
        "relations (columns)": [list(r.entries) for r in pres.relations.generators],
    }


def _run_chain(report: Report, steps):
    """Run certificate steps in order, stopping at the first failure."""
    for name, step in steps:
        with _timed(report, name):
            try:
                cert = step()
            except InexpressibleBracketError as e:
                cert = Certificate(name, False, [], [f"bracket of generators {e.args[0]} is not expressible"])
            except PreconditionError as e:
                cert = Certificate(name, False, [], [str(e)])
        report.certificates.append(cert)
        if not cert.passed:
            report.halted = f"{name} failed"
            return


def cmd_gb(args) -> Report:
    pf = _load(args)
    order = pf.monomial_order()
    report = Report("gb", pf.ring, pf.ideal, source=pf.source)
    with _timed(report, "groebner"):
        gb = buchberger(list(pf.ideal.generators), order)
    report.results["order"] = str(order)
    report.results["groebner basis"] = [canonical_string(g, order) for g in gb]
    if order.kind == "elim":
        m = order.block
        kept = [g for g in gb if not any(any(mono[:m]) for mono in g.terms)]
        report.results["eliminated " + ", ".join(pf.ring.variables[:m])] = \
            [canonical_string(g, order) for g in kept]
    return report


def cmd_derivations(args) -> Report:
    pf = _load(args)
    if pf.ideal.is_zero():
        raise InputError("derivations need a nonzero ideal")
    report = Report("derivations", pf.ring, pf.ideal, source=pf.source)
    with _timed(report, "tangent"):
        computed = tangent_derivations(pf.ideal)
    with _timed(report, "presentation"):
        pres = der_presentation(pf.ideal, pf.poisson)
    report.results["tangent derivations"] = computed
    report.results.update(_presentation_results(pres))
    report.certificates.append(_tangency_certificate(pf.ideal, pres.generators))
    return report


def cmd_symplectic(args) -> Report:
    pf = _load(args)
    if pf.poisson is None:
        raise InputError("symplectic needs a [poisson] section")
    I, pi = pf.ideal, pf.poisson
    report = Report("symplectic", pf.ring, I, source=pf.source)
    with _timed(report, "poisson_ideal"):
        cert = _poisson_certificate(I, pi)
    report.certificates.append(cert)
    if not cert.passed:
        report.halted = "poisson_ideal failed"
        return report
    with _timed(report, "presentation"):
        pres = der_presentation(I, pi)
    report.results.update(_presentation_results(pres))
    if pf.gram is not None:
        if len(pf.gram) != pres.size:
            raise InputError(f"[gram] is {len(pf.gram)}x{len(pf.gram)} but the presentation has "
                             f"{pres.size} generators")
        omega = GramForm(pres, tuple(tuple(pres.reduce(x) for x in row) for row in pf.gram),
                         ("gram supplied by the problem file",))
    else:
        omega = omega_ham(pres)
    report.results["gram"] = omega.matrix()
    raw, reduced = gram_determinant(omega)
    report.results["determinant"] = power_form(raw, I)
    report.results["determinant mod ideal"] = reduced
    steps = [
        ("descent", lambda: check_descends(omega)),
        ("closedness", lambda: closedness_check(omega)),
        ("delta_ham", lambda: delta_ham_check(pres)),
        ("nondegeneracy", lambda: nondegeneracy_check(omega)),
    ]
    if pf.gram is not None:
        steps.append(("compatibility", lambda: compatibility_check(omega)))
    _run_chain(report, steps)
    return report


def _build_group(pf):
    g = pf.group
    if g["diagonal"] is not None:
        m, w = g["diagonal"]
        return DiagonalCyclicGroup(pf.ring, m, w)
    gens = list(g["matrices"])
    if g["cotangent"]:
        gens = list(cotangent_lift(pf.ring, g["cotangent"]).generators) + gens
    return MatrixGroup(pf.ring, gens)


def cmd_quotient(args) -> Report:
    pf = _load(args)
    if pf.group is None:
        raise InputError("quotient needs a [group] section")
    pi = pf.poisson or PoissonStructure.canonical(pf.ring)
    t0 = time.perf_counter()
    G = _build_group(pf)
    names = pf.group["names"]
    if pf.group["invariants"] is not None:
        inv = pf.group["invariants"]
        ring = None
        if names:
            if len(names) != len(inv):
                raise InputError("need one name per invariant")
            ring = VarRing(tuple(names), tuple(max(1, u.degree()) for u in inv))
        H = HilbertData(G, inv, ring)
    else:
        H = HilbertData.compute(G, pf.degree_bound, names)
    I = H.relation_ideal
    report = Report("quotient", H.ring, I, source=pf.source, ambient=pf.ring)
    report.timings["invariants"] = time.perf_counter() - t0
    with _timed(report, "fields"):
        fields = invariant_derivations(G, H, pf.degree_bound)
    with _timed(report, "pushed form"):
        omega = pushed_symplectic(G, H, pi, fields)
    pres = omega.presentation
    report.results["group order"] = G.order
    report.results["invariants"] = {str(x): u for x, u in zip(H.ring.gens(), H.invariants)}
    report.results["relations"] = list(I.generators)
    report.results["invariant fields"] = fields
    report.results["pushed fields"] = list(pres.generators)
    report.results["induced poisson"] = [list(r) for r in pres.poisson.pi]
    report.results["gram"] = omega.matrix()
    with _timed(report, "target"):
        target = der_presentation(I, pres.poisson)
    report.results["quotient generators"] = {f"{n} [{lab.kind}]": X for n, lab, X in
                                             zip(generator_names(target), target.labels, target.generators)}
    B = None
    if pf.base_change is not None:
        rows = parse_rows(pf.base_change, pf.source)
        if len(rows) != len(fields) or any(len(r) != target.size for r in rows):
            raise InputError(f"[base_change] must be {len(fields)}x{target.size}")
        B = [[H.ring.const(x) for x in r] for r in rows]

    def base_change_step():
        cert = verify_base_change(H, fields, target, base_change=B)
        Bm = cert.base_change if hasattr(cert, "base_change") else None
        if Bm is not None:
            report.results["base change"] = Bm
            g = target.size
            k = len(fields)
            moved = [[pres.reduce(sum((Bm[a][i] * omega.gram[a][b] * Bm[b][j]
                                       for a in range(k) for b in range(k)), H.ring.zero()))
                      for j in range(g)] for i in range(g)]
            report.results["gram in quotient generators"] = moved
        return cert

    _run_chain(report, [
        ("descent", lambda: check_descends(omega)),
        ("closedness", lambda: closedness_check(omega)),
        ("delta_ham", lambda: delta_ham_check(pres)),
        ("nondegeneracy", lambda: nondegeneracy_check(omega)),
        ("compatibility", lambda: compatibility_check(omega)),
        ("base_change", base_change_step),
    ])
    return report


def cmd_verify(args) -> int:
    try:
        res = verify_file(args.report_file)
    except MalformedReportError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    for m in res.messages:
        print(m, file=sys.stderr if m.startswith("warning") else sys.stdout)
    print(f"verify: {'OK' if res.code == EXIT_OK else 'FAILED'} ({res.checked} residuals reduced)")
    return res.code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="poissym", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def problem_command(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", help="problem file")
        p.add_argument("--order", choices=("grevlex", "lex"), help="monomial order (overrides the file)")
        p.add_argument("--degree-bound", type=int, help="degree bound for invariants and fields")
        p.add_argument("--no-timings", action="store_true", help="omit timings for byte-identical output")
        p.add_argument("--report", metavar="PATH", help="write the report to PATH")
        p.add_argument("--format", choices=("text", "machine"), default="text")
        p.set_defaults(func=func)

    problem_command("gb", cmd_gb, "reduced Groebner basis of the ideal")
    problem_command("derivations", cmd_derivations, "generators and relations of the tangent derivations")
    problem_command("symplectic", cmd_symplectic, "Gram form and its certificates")
    problem_command("quotient", cmd_quotient, "finite group quotient and pushed symplectic form")
    v = sub.add_parser("verify", help="replay the evidence of a machine report")
    v.add_argument("report_file")
    v.set_defaults(func=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        thread_count()
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    if args.command == "verify":
        return cmd_verify(args)
    if args.degree_bound is not None and args.degree_bound < 1:
        print("error: --degree-bound must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        report = args.func(args)
    except ProblemFileError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, DegenerateIdealError, NotPoissonIdealError, NotInSubalgebraError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except GroupOrderError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAP
    text = report.render(args.format, timings=not args.no_timings)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"{report.command}: {report.status} (report written to {args.report})")
    else:
        sys.stdout.write(text)
    return EXIT_FAIL if report.status == "fail" else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
