"""Synchronous (parallel) composition and natural projection."""

from __future__ import annotations

from collections import deque
from typing import Sequence

from .automata import Alphabet, Automaton, empty_automaton


class ComposeError(ValueError):
    pass


def merged_alphabet(automata: Sequence[Automaton]) -> Alphabet:
    """Union of alphabets in input order; flags must agree on shared events."""
    flags: dict[str, bool] = {}
    order: list[str] = []
    for a in automata:
        for eid, ctrl in a.alphabet.entries:
            if eid in flags:
                if flags[eid] != ctrl:
                    raise ComposeError(
                        f"event {eid!r} is controllable in one component and "
                        "uncontrollable in another"
                    )
            else:
                flags[eid] = ctrl
                order.append(eid)
    return Alphabet(tuple((e, flags[e]) for e in order))


def parallel(automata: Sequence[Automaton], delimiter: str = "|") -> Automaton:
    """Parallel composition: shared events synchronize, private ones interleave.

    Only the reachable part of the product is built, by breadth-first
    exploration from the tuple of initial states.  Composite states are the
    component state names joined by ``delimiter`` in input order.
    """
    automata = list(automata)
    if not automata:
        raise ComposeError("parallel composition needs at least one automaton")
    alphabet = merged_alphabet(automata)
    name = delimiter.join(a.name for a in automata)
    if any(a.initial is None for a in automata):
        return empty_automaton(name, alphabet)
    for a in automata:
        for q in a.states:
            if delimiter in q:
                raise ComposeError(
                    f"state name {q!r} of {a.name!r} contains the delimiter {delimiter!r}"
                )
    declaring = {e: [i for i, a in enumerate(automata) if e in a.alphabet]
                 for e in alphabet.events}
    init = tuple(a.initial for a in automata)
    joined: dict[tuple[str, ...], str] = {init: delimiter.join(init)}
    order = [init]
    todo = deque([init])
    trans: dict[tuple[str, str], str] = {}
    while todo:
        cur = todo.popleft()
        for e in alphabet.events:
            nxt = list(cur)
            ok = True
            for i in declaring[e]:
                t = automata[i].transitions.get((cur[i], e))
                if t is None:
                    ok = False
                    break
                nxt[i] = t
            if not ok:
                continue
            tgt = tuple(nxt)
            if tgt not in joined:
                joined[tgt] = delimiter.join(tgt)
                order.append(tgt)
                todo.append(tgt)
            trans[(joined[cur], e)] = joined[tgt]
    return Automaton(
        name=name,
        alphabet=alphabet,
        states=tuple(joined[t] for t in order),
        transitions=trans,
        initial=joined[init],
        marked=tuple(joined[t] for t in order
                     if all(a.is_marked(q) for a, q in zip(automata, t))),
    )


def project(trace: Sequence[str], alphabet: Alphabet) -> tuple[str, ...]:
    """Natural projection: keep only the events the alphabet declares."""
    return tuple(e for e in trace if e in alphabet)
