"""Boundedness, termination, reversal-boundedness, regularity and promptness of VASS."""

from .analyses import (
    Answer,
    Options,
    Verdict,
    bounded,
    gup_holds,
    nonregular,
    place_bounded,
    reversal_bounded,
    simultaneously_unbounded,
    strongly_prompt,
    terminates,
    weakly_reversal_bounded,
)
from .bounds import BoundParams, rackoff_closed_bound, rackoff_g
from .coverability import OMEGA, build_km, to_dot
from .model import Configuration, PseudoConfiguration, PseudoRun, Run, Transition, Vass, norms, replay
from .properties import GupProperty, Interval
from .reductions import PromptnessInstance

__all__ = [
    "Answer",
    "BoundParams",
    "Configuration",
    "GupProperty",
    "Interval",
    "OMEGA",
    "Options",
    "PromptnessInstance",
    "PseudoConfiguration",
    "PseudoRun",
    "Run",
    "Transition",
    "Vass",
    "Verdict",
    "bounded",
    "build_km",
    "gup_holds",
    "nonregular",
    "norms",
    "place_bounded",
    "rackoff_closed_bound",
    "rackoff_g",
    "replay",
    "reversal_bounded",
    "simultaneously_unbounded",
    "strongly_prompt",
    "terminates",
    "to_dot",
    "weakly_reversal_bounded",
]
