"""Deterministic finite automata with marked states.

An automaton is the usual 6-tuple: states, alphabet, a partial transition
map, the active-event sets (derived from the transition map, never stored),
an initial state and a set of marked states.  All values are immutable
after construction; operations return new automata.

The canonical empty automaton has no states and ``initial is None``.
"""

from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

EVENT_ID_RE = re.compile(r"[A-Za-z][A-Za-z0-9._]*\Z")


class BadQueryError(ValueError):
    """A query referenced a state or event the automaton does not know."""


class ModelFormatError(ValueError):
    """A model file or in-memory description is malformed.

    ``where`` points at the offending element (e.g. ``transitions[3]``).
    """

    def __init__(self, message: str, where: str | None = None):
        self.where = where
        super().__init__(message if where is None else f"{where}: {message}")


def check_event_id(eid: str) -> str:
    if not isinstance(eid, str) or not EVENT_ID_RE.match(eid):
        raise ModelFormatError(
            f"bad event id {eid!r}: must start with a letter and use only "
            "letters, digits, '.' and '_'"
        )
    return eid


@dataclass(frozen=True)
class Alphabet:
    """Ordered event set with a controllable/uncontrollable partition."""

    entries: tuple[tuple[str, bool], ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple((e, bool(c)) for e, c in self.entries))
        seen = set()
        for eid, _ in self.entries:
            check_event_id(eid)
            if eid in seen:
                raise ModelFormatError(f"duplicate event id {eid!r}")
            seen.add(eid)
        object.__setattr__(self, "_flags", dict(self.entries))

    @property
    def events(self) -> tuple[str, ...]:
        return tuple(e for e, _ in self.entries)

    def __contains__(self, eid: str) -> bool:
        return eid in self._flags

    def __len__(self) -> int:
        return len(self.entries)

    def is_controllable(self, eid: str) -> bool:
        try:
            return self._flags[eid]
        except KeyError:
            raise BadQueryError(f"unknown event {eid!r}") from None

    @property
    def controllable(self) -> tuple[str, ...]:
        return tuple(e for e, c in self.entries if c)

    @property
    def uncontrollable(self) -> tuple[str, ...]:
        return tuple(e for e, c in self.entries if not c)

    def reflagged(self, uncontrollable: Iterable[str]) -> "Alphabet":
        """Same events, controllability recomputed from an uncontrollable set."""
        uc = set(uncontrollable)
        return Alphabet(tuple((e, e not in uc) for e, _ in self.entries))


@dataclass(frozen=True)
class MembershipVerdict:
    in_generated: bool
    in_marked: bool
    failure_index: Optional[int] = None


@dataclass(frozen=True)
class Automaton:
    """Deterministic finite automaton with a partial transition map.

    The constructor does not enforce the structural invariants beyond what
    the representation forces (determinism is structural: ``transitions``
    is a map).  Use :meth:`validate` to obtain diagnostics, and the JSON
    loader for strict rejection of malformed inputs.
    """

    name: str
    alphabet: Alphabet
    states: tuple[str, ...]
    transitions: dict[tuple[str, str], str]
    initial: Optional[str]
    marked: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "marked", tuple(self.marked))
        object.__setattr__(self, "transitions", dict(self.transitions))
        object.__setattr__(self, "_state_set", set(self.states))
        object.__setattr__(self, "_marked_set", set(self.marked))

    # -- basic queries ----------------------------------------------------

    @property
    def is_empty(self) -> bool:
        return not self.states

    def has_state(self, q: str) -> bool:
        return q in self._state_set

    def is_marked(self, q: str) -> bool:
        return q in self._marked_set

    def validate(self) -> list[str]:
        """Diagnostics for every violated invariant; empty list iff valid."""
        diags: list[str] = []
        seen: set[str] = set()
        for q in self.states:
            if q in seen:
                diags.append(f"duplicate state name {q!r}")
            seen.add(q)
        if self.initial is None:
            if self.states:
                diags.append("no initial state in a nonempty automaton")
        elif self.initial not in self._state_set:
            diags.append(f"initial state {self.initial!r} not in states")
        for q in self.marked:
            if q not in self._state_set:
                diags.append(f"marked state {q!r} not in states")
        for (q, e), t in self.transitions.items():
            if q not in self._state_set:
                diags.append(f"transition ({q!r}, {e!r}): unknown source state")
            if t not in self._state_set:
                diags.append(f"transition ({q!r}, {e!r}) -> {t!r}: unknown target state")
            if e not in self.alphabet:
                diags.append(f"transition ({q!r}, {e!r}): event not in alphabet")
        return diags

    def active(self, q: str) -> tuple[str, ...]:
        """Active-event set at ``q``, in alphabet order."""
        if q not in self._state_set:
            raise BadQueryError(f"unknown state {q!r}")
        return tuple(e for e in self.alphabet.events if (q, e) in self.transitions)

    def step(self, q: str, e: str) -> Optional[str]:
        """Target of the transition on ``e`` from ``q``, or None if undefined."""
        if q not in self._state_set:
            raise BadQueryError(f"unknown state {q!r}")
        if e not in self.alphabet:
            raise BadQueryError(f"unknown event {e!r}")
        return self.transitions.get((q, e))

    def membership(self, word: Sequence[str]) -> MembershipVerdict:
        """Is the word in the generated / marked language?"""
        for e in word:
            if e not in self.alphabet:
                raise BadQueryError(f"unknown event {e!r}")
        if self.initial is None:
            # The empty automaton generates nothing, not even the empty word.
            return MembershipVerdict(False, False, failure_index=0)
        q = self.initial
        for i, e in enumerate(word):
            nxt = self.transitions.get((q, e))
            if nxt is None:
                return MembershipVerdict(False, False, failure_index=i)
            q = nxt
        return MembershipVerdict(True, q in self._marked_set)

    # -- reachability -----------------------------------------------------

    def _forward_reachable(self) -> set[str]:
        if self.initial is None or self.initial not in self._state_set:
            return set()
        seen = {self.initial}
        todo = deque([self.initial])
        while todo:
            q = todo.popleft()
            for e in self.alphabet.events:
                t = self.transitions.get((q, e))
                if t is not None and t not in seen:
                    seen.add(t)
                    todo.append(t)
        return seen

    def _backward_reachable(self, targets: Iterable[str]) -> set[str]:
        preds: dict[str, set[str]] = {}
        for (q, _e), t in self.transitions.items():
            preds.setdefault(t, set()).add(q)
        seen = set(t for t in targets if t in self._state_set)
        todo = deque(seen)
        while todo:
            q = todo.popleft()
            for p in preds.get(q, ()):
                if p not in seen:
                    seen.add(p)
                    todo.append(p)
        return seen

    def _restrict(self, keep: set[str]) -> "Automaton":
        if self.initial is not None and self.initial not in keep:
            return empty_automaton(self.name, self.alphabet)
        return Automaton(
            name=self.name,
            alphabet=self.alphabet,
            states=tuple(q for q in self.states if q in keep),
            transitions={
                (q, e): t for (q, e), t in self.transitions.items()
                if q in keep and t in keep
            },
            initial=self.initial,
            marked=tuple(q for q in self.marked if q in keep),
        )

    def accessible(self) -> "Automaton":
        """Keep only states reachable from the initial state."""
        return self._restrict(self._forward_reachable())

    def coaccessible(self) -> "Automaton":
        """Keep only states from which some marked state is reachable."""
        return self._restrict(self._backward_reachable(self.marked))

    def trim(self) -> "Automaton":
        """Accessible and coaccessible part; empty automaton if nothing survives."""
        return self.accessible().coaccessible()

    def is_nonblocking(self) -> bool:
        """Every accessible state can reach a marked state."""
        if self.initial is None:
            return False
        reach = self._forward_reachable()
        coreach = self._backward_reachable(self.marked)
        return bool(reach) and reach <= coreach

    def renamed(self, name: str) -> "Automaton":
        return replace(self, name=name)


def empty_automaton(name: str, alphabet: Alphabet) -> Automaton:
    return Automaton(name=name, alphabet=alphabet, states=(),
                     transitions={}, initial=None, marked=())


def is_sublanguage(a: Automaton, b: Automaton) -> tuple[bool, Optional[tuple[str, ...]]]:
    """Is L(a) a subset of L(b)?  On failure, a shortest witness in L(a)\\L(b).

    Events of ``a`` absent from ``b``'s alphabet count as undefined in ``b``.
    """
    if a.initial is None:
        return True, None
    if b.initial is None:
        return False, ()
    start = (a.initial, b.initial)
    paths: dict[tuple[str, str], tuple[str, ...]] = {start: ()}
    todo = deque([start])
    while todo:
        qa, qb = todo.popleft()
        s = paths[(qa, qb)]
        for e in a.alphabet.events:
            ta = a.transitions.get((qa, e))
            if ta is None:
                continue
            tb = b.transitions.get((qb, e)) if e in b.alphabet else None
            if tb is None:
                return False, s + (e,)
            if (ta, tb) not in paths:
                paths[(ta, tb)] = s + (e,)
                todo.append((ta, tb))
    return True, None


# -- JSON model files -----------------------------------------------------

def automaton_to_dict(a: Automaton) -> dict:
    return {
        "name": a.name,
        "events": [{"id": e, "controllable": c} for e, c in a.alphabet.entries],
        "states": list(a.states),
        "initial": a.initial,
        "marked": list(a.marked),
        "transitions": [
            {"from": q, "on": e, "to": t}
            for (q, e), t in sorted(a.transitions.items(),
                                    key=lambda kv: (a.states.index(kv[0][0]),
                                                    a.alphabet.events.index(kv[0][1])))
        ],
    }


def automaton_from_dict(doc: dict, where: str = "model") -> Automaton:
    if not isinstance(doc, dict):
        raise ModelFormatError("expected a JSON object", where)
    for key in ("name", "events", "states", "initial", "marked", "transitions"):
        if key not in doc:
            raise ModelFormatError(f"missing field {key!r}", where)
    try:
        alphabet = Alphabet(tuple((ev["id"], ev["controllable"]) for ev in doc["events"]))
    except (TypeError, KeyError):
        raise ModelFormatError("each event needs 'id' and 'controllable'", f"{where}.events")
    states = tuple(doc["states"])
    state_set = set(states)
    if len(state_set) != len(states):
        raise ModelFormatError("duplicate state names", f"{where}.states")
    initial = doc["initial"]
    if states and initial not in state_set:
        raise ModelFormatError(f"initial state {initial!r} not in states", f"{where}.initial")
    marked = []
    for i, q in enumerate(doc["marked"]):
        if q not in state_set:
            raise ModelFormatError(f"unknown state {q!r}", f"{where}.marked[{i}]")
        marked.append(q)
    transitions: dict[tuple[str, str], str] = {}
    for i, row in enumerate(doc["transitions"]):
        loc = f"{where}.transitions[{i}]"
        try:
            src, on, dst = row["from"], row["on"], row["to"]
        except (TypeError, KeyError):
            raise ModelFormatError("each transition needs 'from', 'on', 'to'", loc)
        if src not in state_set:
            raise ModelFormatError(f"unknown state {src!r}", loc)
        if dst not in state_set:
            raise ModelFormatError(f"unknown state {dst!r}", loc)
        if on not in alphabet:
            raise ModelFormatError(f"unknown event {on!r}", loc)
        if (src, on) in transitions:
            raise ModelFormatError(f"duplicate transition on {on!r} from {src!r}", loc)
        transitions[(src, on)] = dst
    return Automaton(name=doc["name"], alphabet=alphabet, states=states,
                     transitions=transitions, initial=initial if states else None,
                     marked=tuple(marked))


def load_automaton(path) -> Automaton:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"invalid JSON: {exc}", str(path)) from None
    return automaton_from_dict(doc, where=str(path))


def save_automaton(a: Automaton, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(automaton_to_dict(a), fh, indent=2)
        fh.write("\n")
