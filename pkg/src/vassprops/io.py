"""Text formats for models and properties, and report rendering.

Model files are line oriented::

    # the classic two-state example
    dim 2
    state A B
    init A 0 0
    trans A A 1 0
    trans A B 0 0
    trans B B -1 1
    internal 2

Lines may come in any order; transitions are indexed (from 0) in the order
they appear, and ``internal`` refers to those indices.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Any

from .analyses import Verdict
from .coverability import OMEGA, KmNode
from .errors import ModelError, ParseError
from .model import Configuration, Run, Transition, Vass
from .properties import GupProperty, Interval

OMEGA_JSON = "omega"
REPORT_KEYS = (
    "problem",
    "inputs",
    "answer",
    "method",
    "completeness_note",
    "witness",
    "details",
    "wall_time",
)


@dataclass(frozen=True)
class ModelFile:
    vass: Vass
    init: Configuration | None = None
    internal: frozenset[int] | None = None


def _ints(tokens: list[str], lineno: int) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in tokens)
    except ValueError:
        raise ParseError(f"expected integers, got {' '.join(tokens)!r}", lineno) from None


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def parse_model(text: str) -> ModelFile:
    dim = None
    states: list[str] = []
    trans: list[tuple[int, list[str]]] = []
    init = None
    internal = None
    for lineno, toks in _lines(text):
        kw, args = toks[0], toks[1:]
        if kw == "dim":
            if dim is not None:
                raise ParseError("dim given twice", lineno)
            if len(args) != 1:
                raise ParseError("dim takes one argument", lineno)
            (dim,) = _ints(args, lineno)
            if dim < 1:
                raise ParseError("dim must be positive", lineno)
        elif kw == "state":
            if not args:
                raise ParseError("state needs at least one name", lineno)
            for q in args:
                if q in states:
                    raise ParseError(f"state {q!r} declared twice", lineno)
                states.append(q)
        elif kw == "trans":
            trans.append((lineno, args))
        elif kw == "init":
            if init is not None:
                raise ParseError("init given twice", lineno)
            if not args:
                raise ParseError("init needs a state", lineno)
            init = (lineno, args)
        elif kw == "internal":
            internal = (internal or set()) | set(_ints(args, lineno))
            internal_line = lineno
        else:
            raise ParseError(f"unknown keyword {kw!r}", lineno)
    if dim is None:
        raise ParseError("missing dim line")
    if not states:
        raise ParseError("missing state line")

    transitions = []
    for lineno, args in trans:
        if len(args) != dim + 2:
            raise ParseError(f"trans needs a source, a target and {dim} integers", lineno)
        src, dst = args[0], args[1]
        for q in (src, dst):
            if q not in states:
                raise ParseError(f"undeclared state {q!r}", lineno)
        transitions.append(Transition(src, dst, _ints(args[2:], lineno)))
    try:
        vass = Vass(tuple(states), dim, tuple(transitions))
    except ModelError as e:
        raise ParseError(str(e)) from None

    config = None
    if init is not None:
        lineno, args = init
        config = parse_init(" ".join(args), vass, lineno)
    part = None
    if internal is not None:
        bad = sorted(k for k in internal if not 0 <= k < len(transitions))
        if bad:
            raise ParseError(f"internal transition indices out of range: {bad}", internal_line)
        part = frozenset(internal)
    return ModelFile(vass, config, part)


def parse_init(text: str, vass: Vass, lineno: int | None = None) -> Configuration:
    toks = text.split()
    if len(toks) != vass.dim + 1:
        raise ParseError(f"init needs a state and {vass.dim} values", lineno)
    q = toks[0]
    if q not in vass.states:
        raise ParseError(f"undeclared state {q!r}", lineno)
    vals = _ints(toks[1:], lineno)
    if any(x < 0 for x in vals):
        raise ParseError("initial counter values must be nonnegative", lineno)
    return Configuration(q, vals)


def format_model(m: ModelFile) -> str:
    v = m.vass
    lines = [f"dim {v.dim}", "state " + " ".join(map(str, v.states))]
    if m.init is not None:
        lines.append(f"init {m.init.state} " + " ".join(map(str, m.init.values)))
    for t in v.transitions:
        lines.append(f"trans {t.source} {t.target} " + " ".join(map(str, t.update)))
    if m.internal:
        lines.append("internal " + " ".join(map(str, sorted(m.internal))))
    return "\n".join(lines) + "\n"


_INTERVAL = re.compile(r"^([\[(])(-inf|-?\d+),(inf|-?\d+)([\])])$")


def parse_interval(tok: str, lineno: int | None = None) -> Interval:
    m = _INTERVAL.match(tok)
    if not m:
        raise ParseError(f"malformed interval {tok!r}", lineno)
    lb, lo, hi, rb = m.groups()
    if (lo == "-inf") != (lb == "(") or (hi == "inf") != (rb == ")"):
        raise ParseError(f"interval {tok!r}: use '(' with -inf, ')' with inf and brackets otherwise", lineno)
    lower = None if lo == "-inf" else int(lo)
    upper = None if hi == "inf" else int(hi)
    try:
        return Interval(lower, upper)
    except ValueError:
        raise ParseError(f"interval {tok!r} has lower bound above upper bound", lineno) from None


def parse_gup(text: str) -> GupProperty:
    n = None
    rows = []
    for lineno, toks in _lines(text):
        kw, args = toks[0], toks[1:]
        if kw == "gup":
            if n is not None or len(args) != 1:
                raise ParseError("expected a single 'gup <n>' header", lineno)
            (n,) = _ints(args, lineno)
            if n < 1:
                raise ParseError("arity must be positive", lineno)
        elif kw == "row":
            if n is None:
                raise ParseError("row before the 'gup <n>' header", lineno)
            if len(args) != n:
                raise ParseError(f"row has {len(args)} intervals, expected {n}", lineno)
            rows.append(tuple(parse_interval(t, lineno) for t in args))
        else:
            raise ParseError(f"unknown keyword {kw!r}", lineno)
    if n is None:
        raise ParseError("missing 'gup <n>' header")
    if not rows:
        raise ParseError("a property needs at least one row")
    return GupProperty(tuple(rows))


def format_gup(p: GupProperty) -> str:
    return "\n".join([f"gup {p.dim}"] + ["row " + " ".join(map(str, r)) for r in p.rows]) + "\n"


# -- reports ---------------------------------------------------------------------


def state_name(q) -> str:
    if isinstance(q, tuple):
        return "(" + ",".join(state_name(x) for x in q) + ")"
    return str(q)


def _ext(x):
    return OMEGA_JSON if x is OMEGA else x


def witness_json(w) -> dict | None:
    """Runs become explicit configuration sequences; Karp-Miller branches keep OMEGA as "omega".

    Transition labels are 0-based (declaration order); components in the
    acceleration history are 1-based.
    """
    if w is None:
        return None
    if isinstance(w, Run):
        return {
            "kind": "run",
            "init": {"state": state_name(w.init.state), "values": list(w.init.values)},
            "path": list(w.path),
            "configurations": [{"state": state_name(c.state), "values": list(c.values)} for c in w.configs],
        }
    if isinstance(w, list) and all(isinstance(n, KmNode) for n in w):
        return {
            "kind": "km_branch",
            "labels": [n.label for n in w[1:]],
            "configurations": [
                {"state": state_name(n.state), "values": [_ext(x) for x in n.vector]} for n in w
            ],
            "acceleration_history": [sorted(j + 1 for j in b) for b in w[-1].accel_history],
        }
    raise TypeError(f"cannot render witness of type {type(w).__name__}")


def _plain(x: Any):
    """Make details JSON-safe (sets become sorted lists, unknown objects strings)."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(_plain(v) for v in x)
    if x is OMEGA:
        return OMEGA_JSON
    if isinstance(x, float) and x != x:
        return None
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    return str(x)


def build_report(problem: str, inputs: dict, verdict: Verdict, wall_time: float) -> dict:
    return {
        "problem": problem,
        "inputs": _plain(inputs),
        "answer": str(verdict.answer),
        "method": verdict.method,
        "completeness_note": verdict.completeness_note,
        "witness": witness_json(verdict.witness),
        "details": _plain(verdict.details),
        "wall_time": round(wall_time, 6),
    }


def render_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=False) + "\n"


def render_text(report: dict) -> str:
    """One ``key: value`` line per report field; nested values are compact JSON."""
    lines = []
    for key in REPORT_KEYS:
        val = report[key]
        if isinstance(val, str):
            lines.append(f"{key}: {val}")
        else:
            lines.append(f"{key}: {json.dumps(val, separators=(',', ':'))}")
    return "\n".join(lines) + "\n"


def parse_text_report(text: str) -> dict:
    out: dict = {}
    for line in text.splitlines():
        key, _, val = line.partition(": ")
        if key in ("problem", "answer", "method", "completeness_note"):
            out[key] = val
        else:
            out[key] = json.loads(val)
    return out


def canonical(report: dict) -> str:
    """Deterministic serialization without the wall time, for comparisons."""
    r = {k: v for k, v in report.items() if k != "wall_time"}
    return json.dumps(r, sort_keys=True, separators=(",", ":"))
