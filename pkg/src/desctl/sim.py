"""Step-by-step execution of the modular closed loop.

The simulator steps the plant and each supervisor as separate component
automata; it never builds the composed product.  Random runs use Python's
``random.Random`` (Mersenne Twister) seeded with the policy seed and pick
uniformly over the enabled set in plant-alphabet declaration order, so a
given seed reproduces the same trace on every platform.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

from .automata import Automaton, BadQueryError
from .control import SupervisorSet, _require_subalphabet

COMPLETION_EVENTS = {"1": "A.done1", "2": "A.done2"}


class NotEnabledError(ValueError):
    """An event was fired while the plant or a supervisor disables it."""

    def __init__(self, event: str, blocker: str):
        self.event = event
        self.blocker = blocker
        super().__init__(f"event {event!r} is not enabled (blocked by {blocker})")


class ScriptError(ValueError):
    """A scripted event is not in the plant alphabet."""


@dataclass(frozen=True)
class Configuration:
    plant_state: str
    sup_states: tuple[str, ...]


@dataclass(frozen=True)
class Scripted:
    events: tuple[str, ...]


@dataclass(frozen=True)
class Random:
    seed: int


@dataclass(frozen=True)
class Interactive:
    """Line-oriented REPL policy; also understands undo / state / quit."""

    read: Callable[[str], str] = input
    write: Callable[[str], None] = print


Policy = Union[Scripted, Random, Interactive]


@dataclass(frozen=True)
class RunReport:
    trace: tuple[tuple[str, Configuration], ...]
    steps_taken: int
    deadlocked: bool
    blocked_event: Optional[str]
    completions: dict[str, int]
    final_marked: bool


def _sup_list(sups: SupervisorSet | Sequence[Automaton]) -> list[Automaton]:
    return list(sups)


def initial_configuration(plant: Automaton,
                          sups: SupervisorSet | Sequence[Automaton]) -> Configuration:
    sup_list = _sup_list(sups)
    for s in sup_list:
        _require_subalphabet(plant, s)
    if plant.initial is None or any(s.initial is None for s in sup_list):
        raise BadQueryError("cannot simulate an empty automaton")
    return Configuration(plant.initial, tuple(s.initial for s in sup_list))


def _check_configuration(plant: Automaton, sup_list: list[Automaton],
                         cfg: Configuration) -> None:
    if not plant.has_state(cfg.plant_state) or len(cfg.sup_states) != len(sup_list):
        raise BadQueryError(f"invalid configuration {cfg}")
    for s, q in zip(sup_list, cfg.sup_states):
        if not s.has_state(q):
            raise BadQueryError(f"invalid configuration {cfg}")


def enabled(plant: Automaton, sups: SupervisorSet | Sequence[Automaton],
            cfg: Configuration) -> tuple[str, ...]:
    """Events enabled by the plant and every declaring supervisor."""
    sup_list = _sup_list(sups)
    _check_configuration(plant, sup_list, cfg)
    out = []
    for e in plant.alphabet.events:
        if (cfg.plant_state, e) not in plant.transitions:
            continue
        if all((q, e) in s.transitions
               for s, q in zip(sup_list, cfg.sup_states) if e in s.alphabet):
            out.append(e)
    return tuple(out)


def fire(plant: Automaton, sups: SupervisorSet | Sequence[Automaton],
         cfg: Configuration, e: str) -> Configuration:
    """Advance the plant and every declaring supervisor on ``e``."""
    sup_list = _sup_list(sups)
    _check_configuration(plant, sup_list, cfg)
    if e not in plant.alphabet:
        raise BadQueryError(f"unknown event {e!r}")
    plant_next = plant.transitions.get((cfg.plant_state, e))
    if plant_next is None:
        raise NotEnabledError(e, "plant")
    sup_next = []
    for s, q in zip(sup_list, cfg.sup_states):
        if e in s.alphabet:
            t = s.transitions.get((q, e))
            if t is None:
                raise NotEnabledError(e, s.name)
            sup_next.append(t)
        else:
            sup_next.append(q)
    return Configuration(plant_next, tuple(sup_next))


def is_marked(plant: Automaton, sups: SupervisorSet | Sequence[Automaton],
              cfg: Configuration) -> bool:
    sup_list = _sup_list(sups)
    return plant.is_marked(cfg.plant_state) and all(
        s.is_marked(q) for s, q in zip(sup_list, cfg.sup_states))


def _count_completions(trace) -> dict[str, int]:
    return {cat: sum(1 for e, _cfg in trace if e == ev)
            for cat, ev in sorted(COMPLETION_EVENTS.items())}


def run(plant: Automaton, sups: SupervisorSet | Sequence[Automaton],
        policy: Policy, max_steps: int) -> RunReport:
    """Execute the closed loop under a policy for at most ``max_steps`` steps."""
    if max_steps < 0:
        raise ValueError("max_steps must be >= 0")
    sup_list = _sup_list(sups)
    cfg = initial_configuration(plant, sup_list)
    trace: list[tuple[str, Configuration]] = []
    blocked_event: Optional[str] = None

    if isinstance(policy, Scripted):
        for e in policy.events:
            if e not in plant.alphabet:
                raise ScriptError(f"scripted event {e!r} is not in the plant alphabet")
        requested = min(len(policy.events), max_steps)
        for e in policy.events[:requested]:
            if e not in enabled(plant, sup_list, cfg):
                blocked_event = e
                break
            cfg = fire(plant, sup_list, cfg, e)
            trace.append((e, cfg))
    elif isinstance(policy, Random):
        rng = random.Random(policy.seed)
        requested = max_steps
        for _ in range(max_steps):
            choices = enabled(plant, sup_list, cfg)
            if not choices:
                break
            e = choices[rng.randrange(len(choices))]
            cfg = fire(plant, sup_list, cfg, e)
            trace.append((e, cfg))
    elif isinstance(policy, Interactive):
        requested = max_steps
        history = [cfg]
        while len(trace) < max_steps:
            choices = enabled(plant, sup_list, cfg)
            if not choices:
                policy.write("deadlock: no enabled events")
                break
            for i, e in enumerate(choices, start=1):
                policy.write(f"  {i}. {e}")
            try:
                line = policy.read("> ").strip()
            except EOFError:
                break
            if line == "quit":
                break
            if line == "state":
                policy.write(f"plant: {cfg.plant_state}")
                for s, q in zip(sup_list, cfg.sup_states):
                    policy.write(f"{s.name}: {q}")
                continue
            if line == "undo":
                if trace:
                    trace.pop()
                    history.pop()
                    cfg = history[-1]
                else:
                    policy.write("nothing to undo")
                continue
            try:
                idx = int(line)
                e = choices[idx - 1]
            except (ValueError, IndexError):
                policy.write(f"choose 1..{len(choices)}, undo, state or quit")
                continue
            cfg = fire(plant, sup_list, cfg, e)
            trace.append((e, cfg))
            history.append(cfg)
    else:
        raise TypeError(f"unknown policy {policy!r}")

    steps = len(trace)
    final_enabled = enabled(plant, sup_list, cfg)
    deadlocked = not final_enabled and steps < requested
    return RunReport(
        trace=tuple(trace),
        steps_taken=steps,
        deadlocked=deadlocked,
        blocked_event=blocked_event,
        completions=_count_completions(trace),
        final_marked=is_marked(plant, sup_list, cfg),
    )


def replay(plant: Automaton, sups: SupervisorSet | Sequence[Automaton],
           report: RunReport) -> bool:
    """Re-fire the trace and confirm every recorded step and count."""
    sup_list = _sup_list(sups)
    try:
        cfg = initial_configuration(plant, sup_list)
    except BadQueryError:
        return False
    for e, recorded in report.trace:
        if e not in enabled(plant, sup_list, cfg):
            return False
        cfg = fire(plant, sup_list, cfg, e)
        if cfg != recorded:
            return False
    return (report.steps_taken == len(report.trace)
            and report.completions == _count_completions(report.trace)
            and report.final_marked == is_marked(plant, sup_list, cfg))


# -- report serialization -------------------------------------------------

def report_to_dict(report: RunReport) -> dict:
    return {
        "trace": [
            {"event": e,
             "configuration": {"plant_state": c.plant_state,
                               "sup_states": list(c.sup_states)}}
            for e, c in report.trace
        ],
        "steps_taken": report.steps_taken,
        "deadlocked": report.deadlocked,
        "blocked_event": report.blocked_event,
        "completions": report.completions,
        "final_marked": report.final_marked,
    }


def report_to_json(report: RunReport) -> str:
    return json.dumps(report_to_dict(report), indent=2) + "\n"


def report_from_dict(doc: dict) -> RunReport:
    return RunReport(
        trace=tuple(
            (row["event"],
             Configuration(row["configuration"]["plant_state"],
                           tuple(row["configuration"]["sup_states"])))
            for row in doc["trace"]
        ),
        steps_taken=doc["steps_taken"],
        deadlocked=doc["deadlocked"],
        blocked_event=doc["blocked_event"],
        completions=dict(doc["completions"]),
        final_marked=doc["final_marked"],
    )
