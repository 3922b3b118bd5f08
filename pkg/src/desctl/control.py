"""Controllability checking, modular closed loops, and supervisor synthesis.

Supervisors act on sub-alphabets: an event a supervisor does not declare is
permanently enabled by that supervisor.  Several supervisors act
conjunctively; an event fires only if the plant and every declaring
supervisor enable it.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .automata import Automaton, empty_automaton
from .compose import parallel


class AlphabetError(ValueError):
    pass


@dataclass(frozen=True)
class SupervisorSet:
    """Ordered collection of supervisors acting conjunctively."""

    supervisors: tuple[Automaton, ...]

    def __post_init__(self):
        object.__setattr__(self, "supervisors", tuple(self.supervisors))

    def __iter__(self):
        return iter(self.supervisors)

    def __len__(self):
        return len(self.supervisors)


@dataclass(frozen=True)
class ControllabilityReport:
    controllable: bool
    counterexample: Optional[tuple[tuple[str, ...], str]]  # (string s, event e)
    states_checked: int


@dataclass(frozen=True)
class ConflictReport:
    nonconflicting: bool
    counterexample: Optional[tuple[str, ...]]  # shortest string to a blocking state
    states_checked: int


def _require_subalphabet(plant: Automaton, sup: Automaton) -> None:
    missing = [e for e in sup.alphabet.events if e not in plant.alphabet]
    if missing:
        raise AlphabetError(
            f"supervisor {sup.name!r} declares events outside the plant "
            f"alphabet: {', '.join(missing)}"
        )


def _reflag_from_plant(plant: Automaton, sup: Automaton) -> Automaton:
    """Controllability flags are owned by the plant alphabet."""
    alph = sup.alphabet.reflagged(
        e for e in sup.alphabet.events if not plant.alphabet.is_controllable(e)
    )
    return replace(sup, alphabet=alph)


def closed_loop(plant: Automaton, sups: SupervisorSet | Sequence[Automaton],
                delimiter: str = "|") -> Automaton:
    """Modular closed loop: plant composed with every supervisor.

    Events outside every supervisor alphabet are constrained by the plant
    alone.  When the plant is itself a composition whose state names contain
    the delimiter, the delimiter is repeated until it is collision-free.
    """
    sup_list = list(sups)
    for s in sup_list:
        _require_subalphabet(plant, s)
    if not sup_list:
        return plant
    components = [plant] + [_reflag_from_plant(plant, s) for s in sup_list]
    while any(delimiter in q for a in components for q in a.states):
        delimiter += delimiter
    return parallel(components, delimiter=delimiter)


def check_controllability(plant: Automaton, sup: Automaton) -> ControllabilityReport:
    """Does the supervisor never disable an uncontrollable plant event?

    Explores the reachable part of plant || sup.  A violation is a composite
    state where some uncontrollable event (flags per the plant alphabet) is
    plant-active, declared by the supervisor, and not supervisor-active.
    The counterexample is shortest-first, ties broken by event declaration
    order in the plant alphabet.
    """
    _require_subalphabet(plant, sup)
    if plant.initial is None or sup.initial is None:
        return ControllabilityReport(True, None, 0)
    start = (plant.initial, sup.initial)
    paths: dict[tuple[str, str], tuple[str, ...]] = {start: ()}
    todo = deque([start])
    checked = 0
    while todo:
        qp, qs = todo.popleft()
        s = paths[(qp, qs)]
        checked += 1
        for e in plant.alphabet.events:
            tp = plant.transitions.get((qp, e))
            if tp is None:
                continue
            if e not in sup.alphabet:
                tgt = (tp, qs)
            else:
                ts = sup.transitions.get((qs, e))
                if ts is None:
                    if not plant.alphabet.is_controllable(e):
                        return ControllabilityReport(False, (s, e), checked)
                    continue
                tgt = (tp, ts)
            if tgt not in paths:
                paths[tgt] = s + (e,)
                todo.append(tgt)
    return ControllabilityReport(True, None, checked)


def check_nonconflicting(plant: Automaton,
                         sups: SupervisorSet | Sequence[Automaton]) -> ConflictReport:
    """Is the modular closed loop nonblocking?

    On conflict, reports a shortest string reaching a state from which no
    marked state is reachable.
    """
    loop = closed_loop(plant, sups)
    if loop.initial is None:
        return ConflictReport(False, (), 0)
    coreach = loop._backward_reachable(loop.marked)
    paths: dict[str, tuple[str, ...]] = {loop.initial: ()}
    todo = deque([loop.initial])
    checked = 0
    while todo:
        q = todo.popleft()
        checked += 1
        if q not in coreach:
            return ConflictReport(False, paths[q], checked)
        for e in loop.alphabet.events:
            t = loop.transitions.get((q, e))
            if t is not None and t not in paths:
                paths[t] = paths[q] + (e,)
                todo.append(t)
    return ConflictReport(True, None, checked)


def supcon(plant: Automaton, spec: Automaton, delimiter: str = "|") -> Automaton:
    """Supremal controllable sublanguage of plant || spec, as a trim automaton.

    Iteratively deletes states where an uncontrollable plant-active event has
    no surviving product transition, then re-trims, until a fixpoint.
    Returns the canonical empty automaton when nothing survives.
    """
    _require_subalphabet(plant, spec)
    name = f"{plant.name}{delimiter}{spec.name}"
    if plant.initial is None or spec.initial is None:
        return empty_automaton(name, plant.alphabet)

    # Reachable product of (plant state, spec state) pairs.
    start = (plant.initial, spec.initial)
    states = [start]
    seen = {start}
    trans: dict[tuple[tuple[str, str], str], tuple[str, str]] = {}
    todo = deque([start])
    while todo:
        qp, qs = todo.popleft()
        for e in plant.alphabet.events:
            tp = plant.transitions.get((qp, e))
            if tp is None:
                continue
            if e in spec.alphabet:
                ts = spec.transitions.get((qs, e))
                if ts is None:
                    continue
            else:
                ts = qs
            tgt = (tp, ts)
            trans[((qp, qs), e)] = tgt
            if tgt not in seen:
                seen.add(tgt)
                states.append(tgt)
                todo.append(tgt)

    marked = {q for q in states if plant.is_marked(q[0]) and spec.is_marked(q[1])}
    uncontrollable = plant.alphabet.uncontrollable
    good = set(states)
    while True:
        # Controllability: every plant-active uncontrollable event must keep
        # a surviving product transition.
        bad = set()
        for q in good:
            for e in uncontrollable:
                if (q[0], e) in plant.transitions:
                    t = trans.get((q, e))
                    if t is None or t not in good:
                        bad.add(q)
                        break
        good -= bad
        # Trim within the surviving set.
        if start not in good:
            return empty_automaton(name, plant.alphabet)
        reach = {start}
        todo = deque([start])
        while todo:
            q = todo.popleft()
            for e in plant.alphabet.events:
                t = trans.get((q, e))
                if t is not None and t in good and t not in reach:
                    reach.add(t)
                    todo.append(t)
        preds: dict[tuple[str, str], set[tuple[str, str]]] = {}
        for (q, _e), t in trans.items():
            if q in reach and t in reach:
                preds.setdefault(t, set()).add(q)
        coreach = set(t for t in marked if t in reach)
        todo = deque(coreach)
        while todo:
            q = todo.popleft()
            for p in preds.get(q, ()):
                if p not in coreach:
                    coreach.add(p)
                    todo.append(p)
        new_good = reach & coreach
        if not new_good:
            return empty_automaton(name, plant.alphabet)
        if new_good == good and not bad:
            break
        good = new_good

    names = {q: f"{q[0]}{delimiter}{q[1]}" for q in states if q in good}
    return Automaton(
        name=name,
        alphabet=plant.alphabet,
        states=tuple(names[q] for q in states if q in good),
        transitions={
            (names[q], e): names[t]
            for (q, e), t in trans.items() if q in good and t in good
        },
        initial=names[start],
        marked=tuple(names[q] for q in states if q in good and q in marked),
    )
