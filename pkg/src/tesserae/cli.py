"""Command-line interface.

Every subcommand takes a rule either as a definition file or ``--builtin NAME``.
Results go to stdout as ``key: value`` lines (or to ``--out FILE``).  Exit
status: 0 success, 1 domain error (invalid rule, failed check), 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import analysis, catalog, dsl, patchio, spectral
from .combrule import CombinatorialRule, DPVRule, PackingError, check_packing
from .geometry import GeometryError, LinearMap, TileCapExceeded
from .georule import GeometricRule, RuleNotValidatedError, validate, volume_consistency
from .svg import render_svg
from .symbolic import GridRule, SymbolicRule1D, UnknownLetterError


class DomainError(Exception):
    """A well-formed request that fails on the rule or data (exit status 1)."""


class UsageError(Exception):
    """Bad arguments (exit status 2)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _kind(rule) -> str:
    if isinstance(rule, SymbolicRule1D):
        return "symbolic"
    if isinstance(rule, GridRule):
        return "grid"
    if isinstance(rule, GeometricRule):
        return "geometric"
    if isinstance(rule, DPVRule):
        return "dpv"
    if isinstance(rule, CombinatorialRule):
        return "recurrence"
    return type(rule).__name__


def load_rule(args):
    if args.builtin and args.file:
        raise UsageError("give either a rule file or --builtin, not both")
    if args.builtin:
        try:
            return catalog.get(args.builtin)
        except KeyError as err:
            raise UsageError(err.args[0]) from None
    if not args.file:
        raise UsageError("a rule file or --builtin NAME is required")
    try:
        text = Path(args.file).read_text(errors="replace")
    except OSError as err:
        raise UsageError(f"cannot read {args.file}: {err.strerror}") from None
    doc = dsl.parse_rule(text)
    if doc.diagnostics and any(d.severity == "error" for d in doc.diagnostics):
        raise DomainError("\n".join(f"{args.file}:{d}" for d in doc.diagnostics))
    if getattr(args, "rule", None):
        if args.rule not in doc.rules:
            raise UsageError(f"no rule named {args.rule} in {args.file}")
        return doc.rules[args.rule]
    return doc.rule


def _seed(rule, args) -> str:
    ids = analysis.rule_ids(rule)
    if args.tile is None:
        return ids[0]
    if args.tile not in ids:
        raise UsageError(f"unknown prototile {args.tile}; known: {', '.join(ids)}")
    return args.tile


def _spatial(rule, what: str):
    if isinstance(rule, SymbolicRule1D):
        raise DomainError(f"{what} needs a two-dimensional rule; {rule.name} is symbolic")
    return rule


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def _vec(v) -> str:
    return " ".join(_fmt(x) for x in v)


# subcommands ----------------------------------------------------------------


def cmd_parse(args, out):
    rule = load_rule(args)
    out.append(("rule", getattr(rule, "name", "")))
    out.append(("kind", _kind(rule)))
    out.append(("prototiles", " ".join(analysis.rule_ids(rule) if not isinstance(rule, SymbolicRule1D) else rule.alphabet)))
    if args.print:
        out.append(("source", "\n" + dsl.format_rule(rule)))


def cmd_matrix(args, out):
    rule = load_rule(args)
    out.append(("matrix", rule.substitution_matrix().format()))


def cmd_analyze(args, out):
    rule = load_rule(args)
    M = rule.substitution_matrix()
    out.append(("rule", getattr(rule, "name", "")))
    out.append(("matrix", M.format()))
    prim = spectral.is_primitive(M)
    if prim.primitive:
        out.append(("repetitivity", f"repetitive (primitive, exponent {prim.exponent})"))
    else:
        i, j = prim.blocking_entry
        kind = "persistent zero" if prim.persistent else "zero"
        out.append(("repetitivity", f"not repetitive (not primitive; {kind} at entry ({i + 1},{j + 1}))"))
    p = spectral.char_poly(M)
    out.append(("char_poly", str(p)))
    ev = spectral.eigenvalues(M)
    out.append(("eigenvalues", " ".join(_fmt(e.real) if abs(e.imag) < 1e-12 else f"{e.real:.10g}{e.imag:+.10g}i" for e in ev)))
    try:
        pd = spectral.perron(M)
    except spectral.ReducibleMatrixError as err:
        out.append(("perron", f"undefined ({err})"))
        return
    out.append(("perron", _fmt(pd.eigenvalue)))
    out.append(("left_eigenvector", _vec(pd.left_eigenvector)))
    out.append(("right_eigenvector", _vec(pd.right_eigenvector)))
    rep = spectral.classify_pisot(M)
    out.append(("minimal_factor", str(rep.minimal_factor)))
    out.append(("pisot", rep.classification.value))
    out.append(("conjugate_moduli", _vec(rep.conjugate_moduli) or "none"))
    if rep.diagnostic:
        out.append(("note", rep.diagnostic))


def cmd_check(args, out):
    rule = load_rule(args)
    ok = True
    if isinstance(rule, GeometricRule):
        rep = validate(rule, args.levels)
        out.append(("validation", rep.verdict))
        out.append(("max_area_defect", f"{rep.max_area_defect:.3g}"))
        bad = rep.first_failure
        if bad is not None:
            out.append(
                (
                    "first_failure",
                    f"prototile {bad.prototile} level {bad.level}: area defect {bad.area_defect:.3g}, "
                    f"overlap {bad.max_overlap:.3g} (tiles {bad.overlap_witness}), "
                    f"coverage misses {bad.coverage_misses} (point {bad.miss_witness})",
                )
            )
        ok = rep.passed
        vol = volume_consistency(rule)
        if vol.passed is None:
            out.append(("volume", vol.note))
        else:
            out.append(("volume", "consistent" if vol.passed else "inconsistent"))
            out.append(("volume_expansion", _fmt(vol.volume_expansion)))
            out.append(("perron", _fmt(vol.perron_value)))
            ok = ok and vol.passed
    elif isinstance(rule, CombinatorialRule):
        rep = check_packing(rule, args.levels)
        out.append(("packing", rep.verdict))
        out.append(("levels_checked", str(rep.levels_checked)))
        out.append(("max_overlap", f"{rep.max_overlap:.3g}"))
        if rep.witness:
            out.append(("witness", rep.witness))
        ok = rep.passed
    else:
        prim = spectral.is_primitive(rule.substitution_matrix())
        out.append(("primitive", "yes" if prim.primitive else "no"))
    if not ok:
        raise _CheckFailed()


class _CheckFailed(Exception):
    pass


def _patch(rule, args):
    rule = _spatial(rule, "this command")
    return analysis.generate(rule, _seed(rule, args), args.level)


def cmd_iterate(args, out):
    rule = load_rule(args)
    if isinstance(rule, SymbolicRule1D):
        letter = args.tile or rule.alphabet.letters[0]
        if letter not in rule.alphabet:
            raise UsageError(f"unknown letter {letter}")
        block = rule.level_block(letter, args.level)
        out.append(("length", str(len(block))))
        if args.out:
            args.payload = " ".join(block) + "\n"
        else:
            out.append(("block", " ".join(block)))
        return
    patch = _patch(rule, args)
    out.append(("tiles", str(len(patch))))
    out.append(("counts", " ".join(f"{k}={v}" for k, v in patch.counts().items())))
    out.append(("area", _fmt(patch.area)))
    text = patchio.dumps(patch)
    if args.out:
        args.payload = text
    else:
        out.append(("patch", "\n" + text.rstrip("\n")))


def cmd_render(args, out):
    rule = load_rule(args)
    patch = _patch(rule, args)
    args.payload = render_svg(patch, analysis.rule_ids(rule))
    out.append(("tiles", str(len(patch))))
    if not args.out:
        out.append(("svg", "\n" + args.payload.rstrip("\n")))
        args.payload = None


def cmd_flc(args, out):
    rule = _spatial(load_rule(args), "flc")
    seed = _seed(rule, args)
    levels = range(args.min_level, args.level + 1)
    rep = analysis.adjacency_census(rule, seed, levels, args.mode)
    out.append(("mode", rep.mode))
    for n, c in rep.counts:
        out.append((f"level {n}", str(c)))
    out.append(("summary", rep.summary()))


def cmd_faults(args, out):
    rule = load_rule(args)
    patch = _patch(rule, args)
    rep = analysis.fault_candidates(patch, args.min_length)
    out.append(("segments", str(len(rep.segments))))
    out.append(("directions", "; ".join(f"({_fmt(a)}, {_fmt(b)})" for a, b in sorted(rep.directions())) or "none"))
    out.append(
        ("mismatched_directions", "; ".join(f"({_fmt(a)}, {_fmt(b)})" for a, b in sorted(rep.directions(True))) or "none")
    )
    out.append(("mismatch", "yes" if rep.any_mismatch else "no"))


def cmd_dual(args, out):
    rule = load_rule(args)
    patch = _patch(rule, args)
    g = analysis.dual_graph(patch, args.mode or analysis.equivalence_mode(rule))
    out.append(("vertices", str(len(g.labels))))
    out.append(("edges", str(len(g.edges))))
    out.append(("edge_classes", str(g.class_count())))
    if args.out:
        lines = [f"v {i} {lab}" for i, lab in enumerate(g.labels)] + [f"e {i} {j}" for i, j, _ in g.edges]
        args.payload = "\n".join(lines) + "\n"


def _expansion(rule, args) -> LinearMap:
    if args.expansion:
        try:
            vals = [float(x) for x in args.expansion.split(",")]
            return LinearMap(*vals)
        except (ValueError, TypeError, GeometryError):
            raise UsageError("--expansion takes four comma-separated numbers a,b,c,d") from None
    if isinstance(rule, GeometricRule):
        return rule.expansion
    if isinstance(rule, GridRule):
        return LinearMap.scale(rule.expansion)
    if isinstance(rule, DPVRule) and rule.rescaled:
        return LinearMap(rule.lam_x, 0.0, 0.0, rule.lam_y)
    raise DomainError("no expansion map known for this rule; pass --expansion a,b,c,d")


def cmd_rescale(args, out):
    rule = load_rule(args)
    if isinstance(rule, SymbolicRule1D):
        try:
            tab = analysis.length_table(rule, args.level)
        except spectral.ReducibleMatrixError as err:
            raise DomainError(str(err)) from None
        out.append(("perron", _fmt(tab.perron_value)))
        out.append(("limit", _vec(tab.limit)))
        for n, v, e in tab.rows:
            out.append((f"level {n}", f"{_vec(v)} error {e:.3e}"))
        return
    seed = _seed(rule, args)
    try:
        lim = analysis.rescale_limit(rule, seed, args.level, _expansion(rule, args))
    except (ValueError, spectral.ReducibleMatrixError) as err:
        raise DomainError(str(err)) from None
    for n, d in lim.table:
        out.append((f"d_H({n},{n + 1})", f"{d:.3e}"))
    out.append(("converging", "yes" if lim.converged else "no"))


def cmd_admitted(args, out):
    rule = _spatial(load_rule(args), "admitted")
    try:
        cand = patchio.load(args.candidate)
    except OSError as err:
        raise UsageError(f"cannot read {args.candidate}: {err.strerror}") from None
    try:
        res = analysis.is_admitted(rule, cand, args.level, args.mode)
    except ValueError as err:
        raise DomainError(str(err)) from None
    out.append(("admitted", "yes" if res.found else "no"))
    out.append(("result", str(res)))


COMMANDS = {
    "parse": (cmd_parse, "parse a rule and report its kind"),
    "check": (cmd_check, "validate a geometric rule or check a combinatorial packing"),
    "matrix": (cmd_matrix, "print the substitution matrix"),
    "analyze": (cmd_analyze, "spectral report: primitivity, Perron data, Pisot class"),
    "iterate": (cmd_iterate, "generate the level-n patch (or word)"),
    "render": (cmd_render, "render the level-n patch as SVG"),
    "flc": (cmd_flc, "adjacency census across levels"),
    "faults": (cmd_faults, "fault-line candidates in the level-n patch"),
    "dual": (cmd_dual, "dual graph of the level-n patch"),
    "rescale": (cmd_rescale, "rescaled supports or block lengths and their convergence"),
    "admitted": (cmd_admitted, "search for a candidate patch inside level-n patches"),
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tesserae", description="Substitution tilings: build, check and analyse.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        s = sub.add_parser(name, help=help_text, description=help_text)
        s.add_argument("file", nargs="?", help="rule definition file")
        s.add_argument("--builtin", metavar="NAME", help="use a built-in rule (" + ", ".join(catalog.names()) + ")")
        s.add_argument("--rule", metavar="NAME", help="pick a rule by name from a multi-rule file")
        s.add_argument("--out", metavar="FILE", help="write the result to FILE")
        if name in ("iterate", "render", "faults", "dual", "flc", "rescale", "admitted"):
            default = {"flc": 4, "rescale": 6, "admitted": 4}.get(name, 2)
            s.add_argument("--tile", metavar="ID", help="seed prototile or letter")
            s.add_argument("--level", type=int, default=default, help=f"substitution level (default {default})")
        if name == "check":
            s.add_argument("--levels", type=int, default=3, help="levels to check (default 3)")
        if name in ("flc", "dual", "admitted"):
            s.add_argument("--mode", choices=analysis.MODES, help="adjacency equivalence (default from the rule)")
        if name == "flc":
            s.add_argument("--min-level", type=int, default=0)
        if name == "faults":
            s.add_argument("--min-length", type=float, default=3.0, help="minimum length in units of the largest tile diameter")
        if name == "rescale":
            s.add_argument("--expansion", metavar="A,B,C,D", help="expansion map (default from the rule)")
        if name == "admitted":
            s.add_argument("--candidate", required=True, metavar="PATCH", help="candidate patch file")
        if name == "parse":
            s.add_argument("--print", action="store_true", help="echo the normalised rule source")
    return p


def _emit(out: list[tuple[str, str]]) -> str:
    return "".join(f"{k}: {v}\n" for k, v in out)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required: " + ", ".join(COMMANDS))
        if getattr(args, "level", 0) is not None and getattr(args, "level", 0) < 0:
            raise UsageError("--level must be >= 0")
    except UsageError as err:
        parser.print_usage(sys.stderr)
        print(f"tesserae: error: {err}", file=sys.stderr)
        return 2
    except SystemExit as err:  # --help
        return int(err.code or 0)
    func = COMMANDS[args.command][0]
    out: list[tuple[str, str]] = []
    args.payload = None
    status = 0
    t0 = time.perf_counter()
    try:
        func(args, out)
    except UsageError as err:
        print(f"tesserae {args.command}: error: {err}", file=sys.stderr)
        return 2
    except _CheckFailed:
        status = 1
    except (
        DomainError,
        GeometryError,
        RuleNotValidatedError,
        PackingError,
        TileCapExceeded,
        UnknownLetterError,
        patchio.PatchFormatError,
        spectral.ReducibleMatrixError,
        ValueError,
        TypeError,
    ) as err:
        print(_emit(out), end="")
        print(f"tesserae {args.command}: error: {err}", file=sys.stderr)
        return 1
    text = _emit(out)
    if args.out:
        try:
            Path(args.out).write_text(args.payload if args.payload is not None else text)
        except OSError as err:
            print(f"tesserae: cannot write {args.out}: {err.strerror}", file=sys.stderr)
            return 1
        if args.payload is not None:
            text += f"written: {args.out}\n"
        else:
            text = ""
    text += f"elapsed: {time.perf_counter() - t0:.3f}s\n" if getattr(args, "timing", False) else ""
    sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
