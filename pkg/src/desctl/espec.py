"""Regular-language specification expressions and their compilation to DFAs.

Grammar (star binds tighter than concatenation, which binds tighter than
union; whitespace is insignificant, ``#`` starts a line comment)::

    expr   := term ('+' term)*
    term   := factor+
    factor := atom '*'?
    atom   := IDENT | '(' expr ')' | 'pc' '(' expr ')'

``pc(x)`` denotes the prefix closure of ``x``.  Compilation goes through a
small epsilon-NFA, subset construction, trimming and minimization; the
output automaton is trim, minimal, keeps a partial transition map, and its
marked language is the expression's denotation.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Optional

from .automata import Alphabet, Automaton, empty_automaton

RESERVED = {"pc"}


class SpecSyntaxError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}")


class UnknownEventError(ValueError):
    def __init__(self, event: str):
        self.event = event
        super().__init__(f"unknown event id {event!r}")


# -- AST ------------------------------------------------------------------

class Expr:
    pass


@dataclass(frozen=True)
class Epsilon(Expr):
    pass


@dataclass(frozen=True)
class Sym(Expr):
    event: str


@dataclass(frozen=True)
class Concat(Expr):
    parts: tuple[Expr, ...]

    def __post_init__(self):
        if len(self.parts) < 2:
            raise ValueError("Concat needs at least two children")


@dataclass(frozen=True)
class Union(Expr):
    parts: tuple[Expr, ...]

    def __post_init__(self):
        if len(self.parts) < 2:
            raise ValueError("Union needs at least two children")


@dataclass(frozen=True)
class Star(Expr):
    child: Expr


@dataclass(frozen=True)
class PrefClose(Expr):
    child: Expr


def leaves(ast: Expr) -> list[str]:
    """Event occurrences of the expression, left to right."""
    if isinstance(ast, Sym):
        return [ast.event]
    if isinstance(ast, (Concat, Union)):
        return [e for p in ast.parts for e in leaves(p)]
    if isinstance(ast, (Star, PrefClose)):
        return leaves(ast.child)
    return []


def _canon_key(ast: Expr):
    if isinstance(ast, Epsilon):
        return ("eps",)
    if isinstance(ast, Sym):
        return ("sym", ast.event)
    if isinstance(ast, Concat):
        return ("cat",) + tuple(_canon_key(p) for p in ast.parts)
    if isinstance(ast, Union):
        return ("alt",) + tuple(_canon_key(p) for p in ast.parts)
    if isinstance(ast, Star):
        return ("star", _canon_key(ast.child))
    return ("pc", _canon_key(ast.child))


def normalize(ast: Expr) -> Expr:
    """Flatten nested unions and sort their children canonically."""
    if isinstance(ast, Concat):
        return Concat(tuple(normalize(p) for p in ast.parts))
    if isinstance(ast, Union):
        flat: list[Expr] = []
        for p in ast.parts:
            p = normalize(p)
            if isinstance(p, Union):
                flat.extend(p.parts)
            else:
                flat.append(p)
        flat.sort(key=_canon_key)
        return Union(tuple(flat))
    if isinstance(ast, Star):
        return Star(normalize(ast.child))
    if isinstance(ast, PrefClose):
        return PrefClose(normalize(ast.child))
    return ast


# -- parser ---------------------------------------------------------------

@dataclass(frozen=True)
class _Token:
    kind: str  # IDENT | + | * | ( | ) | EOF
    value: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
        elif ch in " \t\r":
            i += 1
            col += 1
        elif ch == "#":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "+*()":
            tokens.append(_Token(ch, ch, line, col))
            i += 1
            col += 1
        elif ch.isalpha():
            j = i
            while j < n and (text[j].isalnum() or text[j] in "._"):
                j += 1
            tokens.append(_Token("IDENT", text[i:j], line, col))
            col += j - i
            i = j
        else:
            raise SpecSyntaxError(f"unexpected character {ch!r}", line, col)
    tokens.append(_Token("EOF", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self, kind: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            what = "end of input" if tok.kind == "EOF" else repr(tok.value)
            raise SpecSyntaxError(f"expected {kind}, found {what}", tok.line, tok.col)
        self.pos += 1
        return tok

    def expr(self) -> Expr:
        terms = [self.term()]
        while self.peek().kind == "+":
            self.take("+")
            terms.append(self.term())
        return terms[0] if len(terms) == 1 else Union(tuple(terms))

    def term(self) -> Expr:
        factors = [self.factor()]
        while self.peek().kind in ("IDENT", "("):
            factors.append(self.factor())
        return factors[0] if len(factors) == 1 else Concat(tuple(factors))

    def factor(self) -> Expr:
        atom = self.atom()
        while self.peek().kind == "*":
            self.take("*")
            atom = Star(atom)
        return atom

    def atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "(":
            self.take("(")
            inner = self.expr()
            self.take(")")
            return inner
        if tok.kind == "IDENT":
            self.take("IDENT")
            if tok.value == "pc":
                self.take("(")
                inner = self.expr()
                self.take(")")
                return PrefClose(inner)
            return Sym(tok.value)
        what = "end of input" if tok.kind == "EOF" else repr(tok.value)
        raise SpecSyntaxError(f"expected an event id or '(', found {what}",
                              tok.line, tok.col)


def parse(text: str) -> Expr:
    """Parse one spec expression; raises SpecSyntaxError with line/column."""
    parser = _Parser(_tokenize(text))
    ast = parser.expr()
    parser.take("EOF")
    return ast


# -- NFA machinery --------------------------------------------------------

class _Nfa:
    """Epsilon-NFA fragment with a single start and a single accept state."""

    def __init__(self):
        self.n = 0
        self.eps: dict[int, set[int]] = defaultdict(set)
        self.trans: dict[tuple[int, str], set[int]] = defaultdict(set)

    def state(self) -> int:
        self.n += 1
        return self.n - 1

    def add_eps(self, a: int, b: int) -> None:
        self.eps[a].add(b)

    def add(self, a: int, e: str, b: int) -> None:
        self.trans[(a, e)].add(b)

    def closure(self, states: frozenset[int]) -> frozenset[int]:
        seen = set(states)
        todo = deque(states)
        while todo:
            q = todo.popleft()
            for t in self.eps.get(q, ()):
                if t not in seen:
                    seen.add(t)
                    todo.append(t)
        return frozenset(seen)


def _build_fragment(nfa: _Nfa, ast: Expr, alphabet: Alphabet) -> tuple[int, int]:
    if isinstance(ast, Epsilon):
        s, a = nfa.state(), nfa.state()
        nfa.add_eps(s, a)
        return s, a
    if isinstance(ast, Sym):
        if ast.event not in alphabet:
            raise UnknownEventError(ast.event)
        s, a = nfa.state(), nfa.state()
        nfa.add(s, ast.event, a)
        return s, a
    if isinstance(ast, Concat):
        first_s, prev_a = _build_fragment(nfa, ast.parts[0], alphabet)
        for part in ast.parts[1:]:
            s, a = _build_fragment(nfa, part, alphabet)
            nfa.add_eps(prev_a, s)
            prev_a = a
        return first_s, prev_a
    if isinstance(ast, Union):
        s, a = nfa.state(), nfa.state()
        for part in ast.parts:
            ps, pa = _build_fragment(nfa, part, alphabet)
            nfa.add_eps(s, ps)
            nfa.add_eps(pa, a)
        return s, a
    if isinstance(ast, Star):
        s, a = nfa.state(), nfa.state()
        cs, ca = _build_fragment(nfa, ast.child, alphabet)
        nfa.add_eps(s, cs)
        nfa.add_eps(s, a)
        nfa.add_eps(ca, cs)
        nfa.add_eps(ca, a)
        return s, a
    if isinstance(ast, PrefClose):
        # Determinize and trim the child first: the prefix closure is then
        # exactly "every surviving state accepts".
        child = _subset_construct(ast.child, alphabet).trim()
        s, a = nfa.state(), nfa.state()
        if child.initial is None:
            return s, a  # closure of the empty language is empty
        ids = {q: nfa.state() for q in child.states}
        nfa.add_eps(s, ids[child.initial])
        for (q, e), t in child.transitions.items():
            nfa.add(ids[q], e, ids[t])
        for q in child.states:
            nfa.add_eps(ids[q], a)
        return s, a
    raise TypeError(f"unknown AST node {ast!r}")


def _subset_construct(ast: Expr, alphabet: Alphabet) -> Automaton:
    nfa = _Nfa()
    start, accept = _build_fragment(nfa, ast, alphabet)
    init = nfa.closure(frozenset({start}))
    names: dict[frozenset[int], str] = {init: "d0"}
    order = [init]
    todo = deque([init])
    trans: dict[tuple[str, str], str] = {}
    while todo:
        subset = todo.popleft()
        for e in alphabet.events:
            targets: set[int] = set()
            for q in subset:
                targets |= nfa.trans.get((q, e), set())
            if not targets:
                continue
            tgt = nfa.closure(frozenset(targets))
            if tgt not in names:
                names[tgt] = f"d{len(names)}"
                order.append(tgt)
                todo.append(tgt)
            trans[(names[subset], e)] = names[tgt]
    return Automaton(
        name="spec",
        alphabet=alphabet,
        states=tuple(names[s] for s in order),
        transitions=trans,
        initial=names[init],
        marked=tuple(names[s] for s in order if accept in s),
    )


def minimize(a: Automaton) -> Automaton:
    """Minimal DFA with the same generated and marked languages.

    Partition refinement over the partial transition map; "undefined" is its
    own signature entry, so the generated language is preserved exactly and
    no sink state is ever introduced.  Merged states are named by joining
    their members with '+'.
    """
    a = a.accessible()
    if a.is_empty:
        return a
    block: dict[str, int] = {q: (0 if a.is_marked(q) else 1) for q in a.states}
    while True:
        sigs: dict[tuple, int] = {}
        new_block: dict[str, int] = {}
        for q in a.states:
            sig = (block[q],) + tuple(
                block.get(a.transitions.get((q, e)), -1) for e in a.alphabet.events
            )
            if sig not in sigs:
                sigs[sig] = len(sigs)
            new_block[q] = sigs[sig]
        if len(sigs) == len(set(block.values())):
            block = new_block
            break
        block = new_block
    members: dict[int, list[str]] = defaultdict(list)
    for q in a.states:  # state order fixes member and block order
        members[block[q]].append(q)
    name_of = {b: (qs[0] if len(qs) == 1 else "+".join(qs)) for b, qs in members.items()}
    seen: set[int] = set()
    ordered_blocks = []
    for q in a.states:
        if block[q] not in seen:
            seen.add(block[q])
            ordered_blocks.append(block[q])
    trans: dict[tuple[str, str], str] = {}
    for b in ordered_blocks:
        rep = members[b][0]
        for e in a.alphabet.events:
            t = a.transitions.get((rep, e))
            if t is not None:
                trans[(name_of[b], e)] = name_of[block[t]]
    return Automaton(
        name=a.name,
        alphabet=a.alphabet,
        states=tuple(name_of[b] for b in ordered_blocks),
        transitions=trans,
        initial=name_of[block[a.initial]],
        marked=tuple(name_of[b] for b in ordered_blocks
                     if a.is_marked(members[b][0])),
    )


def compile(ast: Expr, alphabet: Alphabet, name: str = "spec") -> Automaton:
    """Compile an expression into a trim, minimal DFA over ``alphabet``.

    The marked language of the result is the expression's denotation; the
    generated language is its prefix closure.
    """
    dfa = _subset_construct(normalize(ast), alphabet).trim()
    if dfa.is_empty:
        return empty_automaton(name, alphabet)
    dfa = minimize(dfa)
    relabel = {q: f"s{i + 1}" for i, q in enumerate(dfa.states)}
    return Automaton(
        name=name,
        alphabet=alphabet,
        states=tuple(relabel[q] for q in dfa.states),
        transitions={(relabel[q], e): relabel[t] for (q, e), t in dfa.transitions.items()},
        initial=relabel[dfa.initial],
        marked=tuple(relabel[q] for q in dfa.marked),
    )


def compile_text(text: str, alphabet: Alphabet, name: str = "spec") -> Automaton:
    return compile(parse(text), alphabet, name=name)


def equivalent(a: Automaton, b: Automaton) -> tuple[bool, Optional[tuple[str, ...]]]:
    """Do a and b have equal generated AND marked languages?

    On inequality, returns a shortest distinguishing string (in one of the
    four languages but not its counterpart).
    """
    if a.initial is None and b.initial is None:
        return True, None
    if a.initial is None or b.initial is None:
        return False, ()
    events = list(a.alphabet.events)
    events += [e for e in b.alphabet.events if e not in a.alphabet]
    start = (a.initial, b.initial)
    paths: dict[tuple[str, str], tuple[str, ...]] = {start: ()}
    todo = deque([start])
    while todo:
        qa, qb = todo.popleft()
        s = paths[(qa, qb)]
        if a.is_marked(qa) != b.is_marked(qb):
            return False, s
        for e in events:
            ta = a.transitions.get((qa, e)) if e in a.alphabet else None
            tb = b.transitions.get((qb, e)) if e in b.alphabet else None
            if (ta is None) != (tb is None):
                return False, s + (e,)
            if ta is not None and (ta, tb) not in paths:
                paths[(ta, tb)] = s + (e,)
                todo.append((ta, tb))
    return True, None
