"""Command-line front end: ``octakit <command> DIAGRAM [options]``.

Exit codes: 0 success, 1 mathematical failure (inadmissible, pinched, failed
verification, no critical point, ...), 2 input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import io as fio
from .coloring import ColoringError, MonodromyError, ShadowColoring
from .diagram import DiagramError, build_combinatorics, parse_diagram, wirtinger_presentation
from .gauge import GaugeSearchError, find_admissible_gauge, find_nonunit_shapes
from .geometry.potential import (
    CriticalPointError,
    NonAnalyticPoint,
    coloring_from_critical,
    multistart,
    non_analytic_terms,
    potential_gradient,
    potential_problem,
    potential_value,
    segment_equations,
    volume,
)
from .geometry.shapes import (
    all_shapes_from_coloring,
    all_shapes_from_rep,
    arc_faithful_report,
    pinched_report,
)
from .mat2 import DEFAULT, DegenerateError, NotSL2Error
from .octahedral import (
    AdmissibilityReport,
    GroupoidRelationError,
    admissibility_report,
    associated_coloring,
    verify_match,
    verify_octahedral,
)
from .report import RunReport, emit_report


class InputError(Exception):
    pass


class MathFailure(Exception):
    pass


class _Run:
    """State shared by the steps of one command."""

    def __init__(self, args, report: RunReport):
        self.args = args
        self.report = report
        self.ctx = DEFAULT.scaled(args.tol / 1e-9) if args.tol else DEFAULT
        self._t0 = time.perf_counter()

    def read(self, path: str, name: str) -> str:
        try:
            if path == "-":
                text = sys.stdin.read()
            else:
                text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"{path}: {exc.strerror or exc}") from None
        self.report.add_input(name if path == "-" else f"{name}:{os.path.basename(path)}", text)
        return text

    def tick(self, stage: str) -> None:
        if self.args.timings:
            now = time.perf_counter()
            self.report.timings[stage] = round(now - self._t0, 6)
            self._t0 = now

    def diagram(self):
        path = self.args.diagram
        text = self.read(path, "diagram")
        try:
            d = parse_diagram(text)
            c = build_combinatorics(d)
        except DiagramError as exc:
            raise InputError(f"{path}: {exc}") from None
        self.tick("diagram")
        return d, c

    def json_file(self, path: str, name: str):
        try:
            return fio.load_json(self.read(path, name), path)
        except fio.FormatError as exc:
            raise InputError(str(exc)) from None

    def shadow(self, d, c) -> ShadowColoring:
        if not self.args.rep:
            raise InputError("this command needs --rep FILE")
        doc = self.json_file(self.args.rep, "rep")
        try:
            sc = fio.shadow_from_representation(doc, d, c, self.ctx)
        except fio.FormatError as exc:
            raise InputError(f"{self.args.rep}: {exc}") from None
        except MonodromyError as exc:
            raise MathFailure(str(exc)) from None
        except (ColoringError, NotSL2Error) as exc:
            raise InputError(f"{self.args.rep}: {exc}") from None
        self.tick("coloring")
        if getattr(self.args, "gauge_fix", False):
            fix = find_admissible_gauge(sc, self.args.seed, self.args.max_tries, self.ctx)
            self.report.data["gauge_moves"] = [m.to_dict() for m in fix.moves]
            self.report.data["gauge_tries"] = fix.tries
            sc = fix.coloring
            self.tick("gauge")
        return sc

    def octahedral(self, sc: ShadowColoring):
        out = associated_coloring(sc, self.ctx)
        adm = not isinstance(out, AdmissibilityReport)
        self.report.verdicts["admissible"] = adm
        if not adm:
            self.report.data["violations"] = [str(v) for v in out.violations]
            raise MathFailure("shadow coloring is not admissible (try --gauge-fix)")
        self.tick("octahedral")
        return out


def _quad(q) -> dict:
    return {name: fio.enc(getattr(q, name)) for name in ("zN", "zW", "zS", "zE")}


def _write_json(path: str, doc) -> None:
    Path(path).write_text(fio.dumps(doc), encoding="utf-8")


# Commands. Each fills in the report and raises MathFailure on a negative result.


def cmd_validate(run: _Run) -> None:
    d, c = run.diagram()
    r = run.report
    r.data.update(
        crossings=len(d.crossings),
        segments=len(d.segments),
        regions=len(c.regions),
        arcs=len(c.arcs),
        components=len(c.components),
        base_region=c.base_region,
        tangle=d.is_tangle,
    )
    r.verdicts["valid"] = True


def cmd_wirtinger(run: _Run) -> None:
    d, c = run.diagram()
    pres = wirtinger_presentation(d, c)
    run.report.data["generators"] = [f"w{k}" for k in pres.generators]
    run.report.data["arcs"] = [list(a) for a in c.arcs]
    run.report.data["relations"] = [str(rel) for rel in pres.relations]


def _color_data(sc: ShadowColoring) -> dict:
    return {
        "segments": [
            {"segment": s, "g": fio.enc_matrix(sc.g[s]), "line": [fio.enc(z) for z in sc.lines[s].v], "m": fio.enc(sc.lines[s].m)}
            for s in sc.diagram.segments
        ],
        "shadows": [{"region": j, "u": [fio.enc(z) for z in sc.u[j]]} for j in sc.comb.regions],
    }


def cmd_color(run: _Run) -> None:
    d, c = run.diagram()
    sc = run.shadow(d, c)
    r = run.report
    r.data.update(_color_data(sc))
    r.residuals["wirtinger"] = max(sc.decorated.coloring.crossing_residuals(), default=0.0)
    r.residuals["shadow_monodromy"] = sc.monodromy()
    adm = admissibility_report(sc, run.ctx)
    r.verdicts["admissible"] = adm.admissible
    r.data["violations"] = [str(v) for v in adm.violations]
    af = arc_faithful_report(sc.decorated.coloring).tolerance_flags(run.ctx.match)
    r.verdicts["arc_faithful_at_rep"] = not any(af)


def cmd_octahedral(run: _Run) -> None:
    d, c = run.diagram()
    chi = run.octahedral(run.shadow(d, c))
    res = verify_octahedral(d, c, chi, run.ctx)
    run.report.residuals["octahedral"] = res.max_residual
    run.report.data["coloring"] = fio.coloring_to_list(chi)
    if run.args.out:
        _write_json(run.args.out, fio.coloring_to_list(chi))
    if not res.passed:
        raise MathFailure(f"crossing relations fail at crossing {res.worst}")


def cmd_verify(run: _Run) -> None:
    d, c = run.diagram()
    sc = run.shadow(d, c)
    chi = run.octahedral(sc)
    r = run.report
    oct_res = verify_octahedral(d, c, chi, run.ctx)
    r.residuals["octahedral"] = oct_res.max_residual
    try:
        match = verify_match(sc, chi, run.ctx)
    except GroupoidRelationError as exc:
        raise MathFailure(str(exc)) from None
    r.residuals["holonomy_match"] = match.max_residual
    r.data["holonomy_match_per_arc"] = match.per_arc
    r.verdicts["holonomy_matches"] = match.passed
    r.verdicts["octahedral_relations"] = oct_res.passed
    run.tick("verify")
    if not (match.passed and oct_res.passed):
        raise MathFailure(f"holonomy does not match the representation (worst arc {match.worst_arc})")


def _coloring_arg(run: _Run, d, c):
    doc = run.json_file(run.args.coloring, "coloring")
    try:
        return fio.coloring_from_list(doc, d, c)
    except fio.FormatError as exc:
        raise InputError(f"{run.args.coloring}: {exc}") from None


def cmd_shapes(run: _Run) -> None:
    d, c = run.diagram()
    r = run.report
    if run.args.coloring:
        chi = _coloring_arg(run, d, c)
        quads = all_shapes_from_coloring(chi)
    else:
        sc = run.shadow(d, c)
        chi = run.octahedral(sc)
        quads = all_shapes_from_coloring(chi)
        try:
            rep_quads = all_shapes_from_rep(sc)
        except DegenerateError as exc:
            raise MathFailure(str(exc)) from None
        gap = max((abs(a - b) / max(1.0, abs(b)) for q1, q2 in zip(quads, rep_quads) for a, b in zip(q1, q2)), default=0.0)
        r.residuals["shape_formula"] = gap
        r.verdicts["shape_formula_agrees"] = gap <= run.ctx.match
    r.data["shapes"] = [_quad(q) for q in quads]


def cmd_pinched(run: _Run) -> None:
    d, c = run.diagram()
    sc = run.shadow(d, c)
    rep = pinched_report(sc.decorated, run.ctx)
    r = run.report
    r.data["pinched_crossings"] = rep.pinched
    r.data["line_angles"] = rep.angles
    r.verdicts["d_smooth_candidate"] = rep.smooth_candidate
    af = arc_faithful_report(sc.decorated.coloring).tolerance_flags(run.ctx.match)
    r.verdicts["arc_faithful_at_rep"] = not any(af)
    if not rep.smooth_candidate:
        raise MathFailure(f"pinched crossing(s): {rep.pinched}")


def cmd_gauge_fix(run: _Run) -> None:
    d, c = run.diagram()
    run.args.gauge_fix = False
    sc = run.shadow(d, c)
    r = run.report
    fix = find_admissible_gauge(sc, run.args.seed, run.args.max_tries, run.ctx)
    r.data["admissible_moves"] = [m.to_dict() for m in fix.moves]
    r.data["admissible_tries"] = fix.tries
    out = fix.coloring
    r.verdicts["admissible"] = True
    if run.args.nonunit:
        nu = find_nonunit_shapes(out, run.args.seed, run.args.max_tries, run.ctx)
        out = nu.coloring
        r.data["nonunit_move"] = nu.move.to_dict()
        r.data["nonunit_tries"] = nu.tries
        r.verdicts["shapes_off_unit_circle"] = True
    run.tick("gauge")
    if run.args.out:
        doc = fio.representation_to_dict(out.decorated.coloring)
        doc["decorations"] = [
            {"component": k, "line": [fio.enc(z) for z in out.lines[comp[0]].v]}
            for k, comp in enumerate(c.components)
        ]
        base = c.base_region
        doc["shadow"] = {"region": base, "vector": [fio.enc(z) for z in out.u[base]]}
        _write_json(run.args.out, doc)


def _problem(run: _Run, d, c, mu_text):
    try:
        mu = fio.parse_mu(mu_text)
        if len(mu) == 1:
            mu = mu * len(c.components)
        return potential_problem(d, c, mu)
    except (fio.FormatError, ValueError) as exc:
        raise InputError(str(exc)) from None


def cmd_potential(run: _Run) -> None:
    d, c = run.diagram()
    p = _problem(run, d, c, run.args.mu)
    doc = run.json_file(run.args.beta, "beta")
    try:
        beta = fio.parse_vector(doc, len(p.segments), run.args.beta)
    except fio.FormatError as exc:
        raise InputError(str(exc)) from None
    r = run.report
    r.data["segments"] = list(p.segments)
    bad = non_analytic_terms(p, beta, run.ctx.integer_gap)
    r.data["non_analytic_terms"] = bad
    r.verdicts["analytic"] = not bad
    if bad:
        raise MathFailure("some dilogarithm argument is an integer; the potential is not analytic there")
    r.data["value"] = fio.enc(potential_value(p, beta, run.ctx))
    r.data["gradient"] = [fio.enc(z) for z in potential_gradient(p, beta, run.ctx)]
    eqs = segment_equations(p, beta)
    r.residuals["segment_equations"] = float(np.abs(eqs - 1).max()) if eqs.size else 0.0


def cmd_solve(run: _Run) -> None:
    d, c = run.diagram()
    r = run.report
    extra = []
    if run.args.starts:
        doc = run.json_file(run.args.starts, "starts")
        if not isinstance(doc, list):
            raise InputError(f"{run.args.starts}: expected a list of start vectors")
    lifts = [run.args.mu] if run.args.mu else ["0", "0.5"]
    result, p = None, None
    for mu_text in lifts:
        p = _problem(run, d, c, mu_text)
        if run.args.starts:
            try:
                extra = [fio.parse_vector(v, len(p.segments), run.args.starts) for v in doc]
            except fio.FormatError as exc:
                raise InputError(str(exc)) from None
        result = multistart(p, run.args.seed, run.args.max_starts, extra, run.ctx)
        if result.best is not None:
            break
    run.tick("solve")
    r.data.update(
        mu=[fio.enc(z) for z in p.mu],
        starts=result.starts,
        converged=result.converged,
        accepted=result.accepted,
        segments=list(p.segments),
    )
    r.verdicts["geometric_point_found"] = result.best is not None
    if result.best is None:
        raise MathFailure("no accepted critical point with positive volume")
    cp = result.best
    r.data["start_index"] = result.best_index
    r.data["beta"] = [fio.enc(z) for z in cp.beta]
    r.residuals["critical"] = cp.residual
    try:
        chi = coloring_from_critical(p, cp, run.args.seed, run.args.max_tries, run.ctx)
    except CriticalPointError as exc:
        raise MathFailure(str(exc)) from None
    run.tick("a-recovery")
    r.residuals["octahedral"] = verify_octahedral(d, c, chi, run.ctx).max_residual
    r.data["volume"] = volume(chi, run.ctx)
    r.data["coloring"] = fio.coloring_to_list(chi)
    if run.args.command == "solve" and run.args.out:
        _write_json(run.args.out, fio.coloring_to_list(chi))


def cmd_volume(run: _Run) -> None:
    d, c = run.diagram()
    if run.args.coloring:
        chi = _coloring_arg(run, d, c)
    else:
        chi = run.octahedral(run.shadow(d, c))
    res = verify_octahedral(d, c, chi, run.ctx)
    run.report.residuals["octahedral"] = res.max_residual
    if not res.passed:
        raise MathFailure(f"not an octahedral coloring (crossing {res.worst})")
    try:
        run.report.data["volume"] = volume(chi, run.ctx)
    except DegenerateError as exc:
        raise MathFailure(str(exc)) from None


def cmd_report(run: _Run) -> None:
    """Full pipeline with tables and figures written to --out DIR."""
    from .plotting import plot_residuals, plot_shapes, write_csv

    if not run.args.out:
        raise InputError("report needs --out DIR")
    outdir = Path(run.args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    d, c = run.diagram()
    r = run.report
    r.data.update(crossings=len(d.crossings), segments=len(d.segments), regions=len(c.regions), arcs=len(c.arcs))
    failure = None
    if run.args.rep:
        run.args.gauge_fix = True
        sc = run.shadow(d, c)
        chi = run.octahedral(sc)
        match = verify_match(sc, chi, run.ctx)
        r.residuals["holonomy_match"] = match.max_residual
        r.verdicts["holonomy_matches"] = match.passed
        pinch = pinched_report(sc.decorated, run.ctx)
        r.verdicts["d_smooth_candidate"] = pinch.smooth_candidate
        r.data["pinched_crossings"] = pinch.pinched
        af = arc_faithful_report(sc.decorated.coloring).tolerance_flags(run.ctx.match)
        r.verdicts["arc_faithful_at_rep"] = not any(af)
        if not match.passed:
            failure = "holonomy does not match the representation"
    else:
        try:
            cmd_solve(run)
        except MathFailure as exc:
            failure = str(exc)
        chi = None
        if "coloring" in r.data:
            chi = fio.coloring_from_list(r.data["coloring"], d, c)
    if chi is not None:
        oct_res = verify_octahedral(d, c, chi, run.ctx)
        r.residuals["octahedral"] = oct_res.max_residual
        quads = all_shapes_from_coloring(chi)
        r.data["shapes"] = [_quad(q) for q in quads]
        if all(abs(z - 1) > run.ctx.projective for q in quads for z in q):
            r.data["volume"] = volume(chi, run.ctx)
        write_csv(
            outdir / "crossings.csv",
            ["crossing", "sign", "zN_re", "zN_im", "zW_re", "zW_im", "zS_re", "zS_im", "zE_re", "zE_im", "residual"],
            [
                [k, x.sign, *(v for z in q for v in (z.real, z.imag)), oct_res.per_crossing[k]]
                for k, (x, q) in enumerate(zip(d.crossings, quads))
            ],
        )
        write_csv(
            outdir / "segments.csv",
            ["segment", "a_re", "a_im", "b_re", "b_im", "m_re", "m_im"],
            [[s, *(v for z in chi[s] for v in (z.real, z.imag))] for s in sorted(chi.colors)],
        )
        plot_shapes(quads, outdir / "shapes.png")
        plot_residuals({"crossing relations": oct_res.per_crossing}, run.ctx.relation, outdir / "residuals.png")
        r.data["files"] = sorted(p.name for p in outdir.iterdir() if p.suffix in (".csv", ".png"))
    run.tick("report")
    for fmt, name in (("json", "report.json"), ("text", "report.txt")):
        (outdir / name).write_text(emit_report(r, fmt), encoding="utf-8")
    if failure:
        raise MathFailure(failure)


COMMANDS = {
    "validate": (cmd_validate, "check a diagram file and print its combinatorics"),
    "wirtinger": (cmd_wirtinger, "print the Wirtinger presentation"),
    "color": (cmd_color, "representation -> decorated shadow coloring"),
    "octahedral": (cmd_octahedral, "associated octahedral coloring of a representation"),
    "verify": (cmd_verify, "compare the octahedral holonomy with the representation"),
    "shapes": (cmd_shapes, "shape parameters per crossing"),
    "pinched": (cmd_pinched, "pinched crossings of a decorated representation"),
    "gauge-fix": (cmd_gauge_fix, "find gauge moves making a coloring admissible"),
    "potential": (cmd_potential, "value and gradient of the potential function"),
    "solve": (cmd_solve, "multi-start Newton for a geometric critical point"),
    "volume": (cmd_volume, "hyperbolic volume of an octahedral coloring"),
    "report": (cmd_report, "full pipeline with CSV tables and figures"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("diagram", help="diagram file (JSON), or - for stdin")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=None, help="base tolerance (default 1e-9); scales all gates")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--max-tries", type=int, default=64)
    common.add_argument("--timings", action="store_true", help="include stage timings in the report")
    common.add_argument("-o", "--output", help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="octakit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=help_text)
        if name in ("color", "octahedral", "verify", "shapes", "pinched", "gauge-fix", "volume", "report"):
            sp.add_argument("--rep", help="representation file")
        if name in ("octahedral", "verify", "shapes", "volume"):
            sp.add_argument("--gauge-fix", action="store_true", help="gauge-fix to admissibility first")
        if name in ("shapes", "volume"):
            sp.add_argument("--coloring", help="octahedral coloring file")
        if name in ("octahedral", "gauge-fix", "solve", "report"):
            sp.add_argument("--out", help="output file (directory for report)")
        if name == "gauge-fix":
            sp.add_argument("--nonunit", action="store_true", help="also move shapes off the unit circle")
        if name in ("potential", "solve"):
            sp.add_argument("--mu", help="comma-separated log-meridians, one per component")
        if name == "potential":
            sp.add_argument("--beta", required=True, help="JSON list of log-b values in segment order")
        if name in ("solve", "report"):
            sp.add_argument("--starts", help="JSON list of extra start vectors")
            sp.add_argument("--max-starts", type=int, default=2000)
    return parser


def run_command(argv) -> tuple[int, RunReport]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), RunReport(command="")
    if args.command == "report":
        args.mu = None
        args.gauge_fix = True
    report = RunReport(command=args.command)
    run = _Run(args, report)
    try:
        COMMANDS[args.command][0](run)
        code = 0
    except InputError as exc:
        report.messages.append(f"input error: {exc}")
        code = 2
    except (MathFailure, GaugeSearchError, GroupoidRelationError, NonAnalyticPoint) as exc:
        report.messages.append(f"failure: {exc}")
        code = 1
    except DegenerateError as exc:
        report.messages.append(f"failure: {exc}")
        code = 1
    report.exit_code = code
    return code, report


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    code, report = run_command(argv)
    if not report.command:
        return code
    args = build_parser().parse_args(argv)
    text = emit_report(report, args.format)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
