"""Simplification of f-terms and the grammaticality decision.

A term is simplified inside *bags*: the root and the body of every
attribute embedding, each viewed as a multiset of elements.  A step rewrites
elements of one bag and leaves everything else alone; nothing is rewritten
under an implication or an optional.  The six rules:

``ApplyLimp``    ``α -o β`` together with a sibling ``α`` becomes ``β``
``ApplyPathEq``  ``f1..fm = g1..gn`` and a sibling ``f1(..fm(α)..)`` become
                 ``g1(..gn(α)..)``; the path equation is used up
``Distribute``   ``f(α1, .., αn)`` becomes ``f α1, .., f αn``
``Factor``       siblings ``f α1, f α2`` become ``f(α1, α2)``
``OptDelete``    ``(α)?`` disappears
``OptKeep``      ``(α)?`` becomes ``α``

A sentence is grammatical when its term reduces to exactly the goal atom
``t``.  :func:`reduce_search` explores states breadth first, so a witness it
returns is a shortest derivation.
"""

from __future__ import annotations

import json
import logging
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional

from .fterm import (
    Atom, Embed, FTerm, Limp, Opt, PathEq, canonicalize, elements, make_bag,
    serialize_fterm,
)

log = logging.getLogger(__name__)

RULES = ("ApplyLimp", "ApplyPathEq", "Distribute", "Factor", "OptDelete", "OptKeep")


class Verdict(str, Enum):
    GRAMMATICAL = "Grammatical"
    UNGRAMMATICAL = "Ungrammatical"
    UNDECIDED = "Undecided"


class UndecidedError(RuntimeError):
    """The search hit a configured limit before reaching a verdict."""

    def __init__(self, states_explored: int):
        self.states_explored = states_explored
        super().__init__(f"undecided after exploring {states_explored} states")


@dataclass(frozen=True)
class ReductionStep:
    """One rewrite.  ``locus`` lists, from the root bag down, the index of the
    embedding whose body is the bag that was rewritten; ``()`` is the root."""

    rule: str
    locus: tuple
    before: FTerm
    after: FTerm

    def to_json(self) -> dict:
        return {"rule": self.rule, "locus": list(self.locus),
                "term": serialize_fterm(self.after)}


@dataclass(frozen=True)
class SearchConfig:
    max_states: int = 100_000
    max_depth: int = 200
    goal: str = "t"

    def __post_init__(self):
        if self.max_states < 1 or self.max_depth < 1:
            raise ValueError("search limits must be positive")


@dataclass(frozen=True)
class ReductionResult:
    start: FTerm
    verdict: Verdict
    witness: Optional[tuple]
    states_explored: int
    limit_hit: bool

    @property
    def grammatical(self) -> bool:
        return self.verdict is Verdict.GRAMMATICAL

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "start": serialize_fterm(self.start),
            "statesExplored": self.states_explored,
            "limitHit": self.limit_hit,
            "witness": None if self.witness is None else [s.to_json() for s in self.witness],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), ensure_ascii=False)


# -- one-step rewriting -------------------------------------------------------

def _bag_rewrites(elems: tuple) -> Iterator[tuple[str, list]]:
    """Rewrites of a single bag, as (rule, new element list)."""
    n = len(elems)
    for i, x in enumerate(elems):
        rest = elems[:i] + elems[i + 1:]
        if isinstance(x, Limp):
            for j, y in enumerate(elems):
                if j != i and y == x.antecedent:
                    yield "ApplyLimp", _without(elems, i, j) + [x.consequent]
        elif isinstance(x, PathEq):
            for j, y in enumerate(elems):
                if j == i:
                    continue
                moved = _unwrap(y, x.src)
                if moved is not None:
                    yield "ApplyPathEq", _without(elems, i, j) + [_wrap(moved, x.dst)]
        elif isinstance(x, Opt):
            yield "OptDelete", list(rest)
            yield "OptKeep", list(rest) + [x.body]
        elif isinstance(x, Embed):
            parts = elements(x.body)
            if len(parts) >= 2:
                yield "Distribute", list(rest) + [Embed(x.attr, p) for p in parts]
            for j in range(i + 1, n):
                y = elems[j]
                if isinstance(y, Embed) and y.attr == x.attr:
                    yield "Factor", _without(elems, i, j) + [Embed(x.attr, make_bag([x.body, y.body]))]


def _without(elems: tuple, i: int, j: int) -> list:
    return [e for k, e in enumerate(elems) if k != i and k != j]


def _unwrap(term: FTerm, path: tuple) -> Optional[FTerm]:
    for attr in path:
        if not isinstance(term, Embed) or term.attr != attr:
            return None
        term = term.body
    return term


def _wrap(term: FTerm, path: tuple) -> FTerm:
    for attr in reversed(path):
        term = Embed(attr, term)
    return term


def _rewrites(term: FTerm, locus: tuple) -> Iterator[tuple[str, tuple, FTerm]]:
    elems = elements(term)
    for rule, new in _bag_rewrites(elems):
        yield rule, locus, make_bag(canonicalize(e) for e in new)
    for i, x in enumerate(elems):
        if isinstance(x, Embed):
            for rule, loc, body in _rewrites(x.body, locus + (i,)):
                new = list(elems)
                new[i] = canonicalize(Embed(x.attr, body))
                yield rule, loc, make_bag(new)


def enumerate_steps(term: FTerm) -> list[ReductionStep]:
    """Every single-step rewrite of canonical ``term``, duplicates removed,
    in a deterministic order."""
    seen = set()
    steps = []
    for rule, locus, after in _rewrites(term, ()):
        key = (rule, locus, after)
        if key not in seen:
            seen.add(key)
            steps.append(ReductionStep(rule, locus, term, after))
    return steps


# -- search -------------------------------------------------------------------

def reduce_search(term: FTerm, cfg: SearchConfig = SearchConfig()) -> ReductionResult:
    start = canonicalize(term)
    goal = Atom(cfg.goal)
    if start == goal:
        return ReductionResult(start, Verdict.GRAMMATICAL, (), 1, False)

    parent: dict = {start: None}
    queue = deque([(start, 0)])
    limit_hit = False
    while queue:
        state, depth = queue.popleft()
        if depth >= cfg.max_depth:
            limit_hit = True
            continue
        for step in enumerate_steps(state):
            nxt = step.after
            if nxt in parent:
                continue
            if len(parent) >= cfg.max_states:
                log.debug("state limit %d reached", cfg.max_states)
                return ReductionResult(start, Verdict.UNDECIDED, None, len(parent), True)
            parent[nxt] = step
            if nxt == goal:
                return ReductionResult(start, Verdict.GRAMMATICAL,
                                       _witness(parent, nxt), len(parent), limit_hit)
            queue.append((nxt, depth + 1))
    verdict = Verdict.UNDECIDED if limit_hit else Verdict.UNGRAMMATICAL
    return ReductionResult(start, verdict, None, len(parent), limit_hit)


def _witness(parent: dict, state: FTerm) -> tuple:
    steps = []
    step = parent[state]
    while step is not None:
        steps.append(step)
        step = parent[step.before]
    return tuple(reversed(steps))


def is_grammatical(term: FTerm, cfg: SearchConfig = SearchConfig()) -> bool:
    result = reduce_search(term, cfg)
    if result.verdict is Verdict.UNDECIDED:
        raise UndecidedError(result.states_explored)
    return result.grammatical


def witness_terms(result: ReductionResult) -> list[str]:
    """Serialized states of a grammatical derivation, start state first."""
    if not result.grammatical:
        raise ValueError(f"no witness: verdict is {result.verdict.value}")
    return [serialize_fterm(result.start)] + [serialize_fterm(s.after) for s in result.witness]


def _show_locus(locus: tuple) -> str:
    return "root" if not locus else ".".join(map(str, locus))


def trace_witness(result: ReductionResult) -> str:
    """Numbered listing of a grammatical derivation.

    Each step shows its rule and locus, followed by the resulting term on an
    indented line, so the listing ends with the goal ``t``.
    """
    terms = witness_terms(result)
    lines = ["    " + terms[0]]
    for n, (step, text) in enumerate(zip(result.witness, terms[1:]), 1):
        lines.append(f"{n}.  {step.rule} at {_show_locus(step.locus)}")
        lines.append("    " + text)
    return "\n".join(lines)
