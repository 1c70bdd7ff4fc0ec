"""Command-line entry point: ``vassprops check <problem> --model FILE [...]``.

Exit status 0 means a definite verdict, 2 an Unknown verdict and 1 a usage
or input error.  Components are numbered from 1 on the command line.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import analyses as an
from .bounds import bound_summary
from .coverability import build_km, to_dot
from .errors import ResourceCap, VassError
from .io import build_report, parse_gup, parse_init, parse_model, render_json, render_text
from .properties import NONNEG, GupProperty
from .reductions import PromptnessInstance, RbProduct, promptness_reduction

PROBLEMS = ("bounded", "place", "simul", "terminates", "rb", "weak-rb", "regular", "prompt", "gup")

QUESTIONS = {
    "bounded": "is the reachability set bounded?",
    "place": "is component i bounded?",
    "simul": "are the components of X simultaneously unbounded?",
    "terminates": "is every run finite?",
    "rb": "is component i reversal-bounded?",
    "weak-rb": "is component i weakly reversal-bounded?",
    "regular": "is the system regular (no strict up-then-down witness)?",
    "prompt": "is the system strongly prompt?",
    "gup": "does some run satisfy the property?",
}


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vassprops", description="Decide unboundedness-style properties of VASS.")
    sub = ap.add_subparsers(dest="command", required=True)
    chk = sub.add_parser("check", help="decide one property")
    chk.add_argument("problem", choices=PROBLEMS)
    chk.add_argument("--model", required=True, help="model file")
    chk.add_argument("--init", help='initial configuration "q v1 ... vn" (overrides the file)')
    chk.add_argument("--i", type=int, help="component (1-based) for place, rb and weak-rb")
    chk.add_argument("--x", help="comma-separated components (1-based) for simul")
    chk.add_argument("--property", help="property file for gup")
    chk.add_argument("--method", choices=an.METHODS, default="km")
    chk.add_argument("--depth-cap", type=int, default=an.DEFAULT_DEPTH_CAP)
    chk.add_argument("--state-cap", type=int, default=an.DEFAULT_STATE_CAP)
    chk.add_argument("--km-cap", type=int, default=an.DEFAULT_KM_CAP)
    chk.add_argument("--format", choices=("text", "json"), default="text")
    chk.add_argument("--emit-km", metavar="FILE.dot", help="write the Karp-Miller tree used by the analysis")
    chk.add_argument("--show-bounds", action="store_true", help="report the length bounds")
    chk.add_argument("--c1", type=int, default=an.DEFAULT_C1)
    chk.add_argument("--c", type=int, default=an.DEFAULT_C)
    return ap


def _component(i: int | None, dim: int, flag: str = "--i") -> int:
    if i is None:
        raise UsageError(f"{flag} is required for this problem")
    if not 1 <= i <= dim:
        raise UsageError(f"{flag} must lie in 1..{dim}")
    return i - 1


def _components(text: str | None, dim: int) -> frozenset[int]:
    if not text:
        raise UsageError("--x is required for simul")
    try:
        xs = [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise UsageError(f"--x expects comma-separated integers, got {text!r}") from None
    if not xs:
        raise UsageError("--x must name at least one component")
    return frozenset(_component(x, dim, "--x") for x in xs)


def _km_target(problem: str, mf, init):
    """The system and initial configuration whose Karp-Miller tree the analysis inspects."""
    v = mf.vass
    if problem in ("rb", "weak-rb"):
        prod = RbProduct(v)
        state, vec = prod.initial(init)
        return prod, state, vec
    if problem == "prompt":
        image, c, _ = promptness_reduction(PromptnessInstance(v, mf.internal or frozenset()), init)
        return image, c.state, c.values
    return v, init.state, init.values


def run_check(args) -> tuple[dict, int]:
    mf = parse_model(Path(args.model).read_text(encoding="utf-8"))
    v = mf.vass
    init = parse_init(args.init, v) if args.init else mf.init
    if init is None:
        raise UsageError("no initial configuration: add an init line or pass --init")
    opts = an.Options(args.method, args.depth_cap, args.state_cap, args.km_cap, args.c1, args.c)
    inputs: dict = {
        "model": args.model,
        "init": {"state": str(init.state), "values": list(init.values)},
        "question": QUESTIONS[args.problem],
        "options": {
            "method": opts.method,
            "depth_cap": opts.depth_cap,
            "state_cap": opts.state_cap,
            "km_cap": opts.km_cap,
            "c1": opts.c1,
            "c": opts.c,
        },
    }
    p = args.problem
    prop: GupProperty | None = None
    t0 = time.perf_counter()
    if p == "bounded":
        verdict = an.bounded(v, init, opts)
    elif p == "place":
        i = _component(args.i, v.dim)
        inputs["i"] = i + 1
        verdict = an.place_bounded(v, init, i, opts)
    elif p == "simul":
        X = _components(args.x, v.dim)
        inputs["x"] = sorted(j + 1 for j in X)
        verdict = an.simultaneously_unbounded(v, init, X, opts)
    elif p == "terminates":
        verdict = an.terminates(v, init, opts)
    elif p == "rb":
        i = _component(args.i, v.dim)
        inputs["i"] = i + 1
        verdict = an.reversal_bounded(v, init, i, opts)
    elif p == "weak-rb":
        i = _component(args.i, v.dim)
        inputs["i"] = i + 1
        verdict = an.weakly_reversal_bounded(v, init, i, opts)
    elif p == "regular":
        verdict = an.nonregular(v, init, opts).negated()
    elif p == "prompt":
        inputs["internal"] = sorted(mf.internal or ())
        verdict = an.strongly_prompt(PromptnessInstance(v, mf.internal or frozenset()), init, opts)
        if verdict.witness is not None:
            verdict.details["witness_model"] = "promptness image"
    else:
        if not args.property:
            raise UsageError("--property is required for gup")
        prop = parse_gup(Path(args.property).read_text(encoding="utf-8"))
        if prop.dim != v.dim:
            raise UsageError(f"property has arity {prop.dim}, model has dimension {v.dim}")
        inputs["property"] = str(prop)
        verdict = an.gup_holds(v, init, prop, opts)
    elapsed = time.perf_counter() - t0

    if args.show_bounds or not verdict.definite:
        if prop is None:
            prop = GupProperty(((NONNEG,) * v.dim,))
        verdict.details.setdefault("bounds", bound_summary(an.completeness_params(v, prop, opts)))
    if not verdict.definite:
        verdict.details["caps"] = inputs["options"]
    if args.emit_km:
        model, state, vec = _km_target(p, mf, init)
        try:
            tree = build_km(model, state, vec, opts.km_cap)
        except ResourceCap as e:
            raise UsageError(f"cannot emit the Karp-Miller tree: {e}") from None
        Path(args.emit_km).write_text(to_dot(tree), encoding="utf-8")
    report = build_report(p, inputs, verdict, elapsed)
    return report, 0 if verdict.definite else 2


def main(argv: list[str] | None = None) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 1
    try:
        report, code = run_check(args)
    except (UsageError, VassError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    out = render_json(report) if args.format == "json" else render_text(report)
    sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
