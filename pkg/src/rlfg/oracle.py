"""Brute-force reference implementations and random instance generators.

Nothing here shares code with :mod:`rlfg.reduction` or the solver in
:mod:`rlfg.classical`; the only common ground is the term and structure
data types.  Speed is not a goal.
"""

from __future__ import annotations

import itertools
import random
from collections import Counter, deque
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Iterable, Iterator, Optional

from .classical import And, Const, Equation, FDescription, FStructure
from .fterm import (
    Atom, Embed, FTerm, Limp, Multiset, Opt, PathEq, canonicalize,
    serialize_fterm,
)

HARD_STATE_CAP = 1_000_000

GRAMMATICAL = "Grammatical"
UNGRAMMATICAL = "Ungrammatical"


class StateSpaceExceeded(RuntimeError):
    pass


# -- random f-terms -----------------------------------------------------------

@dataclass(frozen=True)
class GenConfig:
    max_depth: int = 3
    max_multiset_size: int = 3
    atom_alphabet: tuple = ("t", "e", "NOM", "ACC")
    attr_alphabet: tuple = ("SUBJ", "OBJ", "XCOMP")
    seed: int = 0

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")
        if not self.atom_alphabet or not self.attr_alphabet:
            raise ValueError("alphabets must be nonempty")
        if self.max_multiset_size < 2:
            raise ValueError("max_multiset_size must be at least 2")


_CONSTRUCTORS = ("atom", "bag", "embed", "limp", "opt", "patheq")
_WEIGHTS = (3, 3, 3, 4, 1, 1)


def gen_random_fterm(cfg: GenConfig) -> FTerm:
    """A canonical random term; the same config always gives the same term."""
    rng = random.Random(cfg.seed)
    return canonicalize(_gen(rng, cfg, cfg.max_depth))


def _gen(rng: random.Random, cfg: GenConfig, depth: int) -> FTerm:
    if depth <= 1:
        return Atom(rng.choice(cfg.atom_alphabet))
    kind = rng.choices(_CONSTRUCTORS, _WEIGHTS)[0]
    if kind == "atom":
        return Atom(rng.choice(cfg.atom_alphabet))
    if kind == "bag":
        n = rng.randint(2, cfg.max_multiset_size)
        return Multiset(tuple(_gen(rng, cfg, depth - 1) for _ in range(n)))
    if kind == "embed":
        return Embed(rng.choice(cfg.attr_alphabet), _gen(rng, cfg, depth - 1))
    if kind == "limp":
        ante = _gen(rng, cfg, depth - 1)
        if rng.random() < 0.5:
            # a consequent reusing the goal keeps grammatical terms reachable
            return Limp(ante, Atom(cfg.atom_alphabet[0]))
        return Limp(ante, _gen(rng, cfg, depth - 1))
    if kind == "opt":
        return Opt(_gen(rng, cfg, depth - 1))
    src = tuple(rng.choice(cfg.attr_alphabet) for _ in range(rng.randint(1, 2)))
    dst = tuple(rng.choice(cfg.attr_alphabet) for _ in range(rng.randint(1, 2)))
    return PathEq(src, dst)


def gen_planted_fterm(cfg: GenConfig, steps: Optional[int] = None) -> FTerm:
    """A random term built backwards from the goal by inverse rewrites, so
    that it is grammatical by construction (before the final noise step)."""
    rng = random.Random(cfg.seed)
    goal = cfg.atom_alphabet[0]
    items: list = [Atom(goal)]
    if steps is None:
        steps = rng.randint(3, 10)
    for _ in range(steps):
        k = rng.randrange(len(items))
        x = items[k]
        move = rng.choice(("limp", "limp", "embed", "embed", "opt", "patheq", "factor"))
        if move == "limp":
            # x  <-  a, a -o x
            a = _gen(rng, cfg, 2)
            items[k:k + 1] = [a, Limp(a, x)]
        elif move == "embed" and isinstance(x, Limp):
            f = rng.choice(cfg.attr_alphabet)
            # a -o b, a  <-  f a -o b, f a  (only safe when a is present)
            partners = [j for j, y in enumerate(items) if j != k and y == x.antecedent]
            if partners:
                j = partners[0]
                items[k] = Limp(Embed(f, x.antecedent), x.consequent)
                items[j] = Embed(f, items[j])
        elif move == "opt":
            items.append(Opt(_gen(rng, cfg, 2)))
        elif move == "patheq" and isinstance(x, Embed):
            f = rng.choice(cfg.attr_alphabet)
            items[k] = Embed(f, x.body)
            items.append(PathEq((f,), (x.attr,)))
        elif move == "factor":
            embeds = [j for j, y in enumerate(items) if isinstance(y, Embed)]
            pairs = [(i, j) for i in embeds for j in embeds
                     if i < j and items[i].attr == items[j].attr]
            if pairs:
                i, j = rng.choice(pairs)
                merged = Embed(items[i].attr, Multiset((items[i].body, items[j].body)))
                items = [y for n, y in enumerate(items) if n not in (i, j)] + [merged]
    if rng.random() < 0.4:
        items.append(_gen(rng, cfg, 2))
    return canonicalize(Multiset(tuple(items)))


def random_corpus(n: int, max_len: int = 60, base_seed: int = 0) -> list[FTerm]:
    """``n`` seeded terms of serialized length at most ``max_len``.

    Odd seeds give planted terms; even seeds give a bag of two to four plain
    random terms drawn from consecutive sub-seeds.
    """
    terms = []
    seed = base_seed
    while len(terms) < n:
        cfg = GenConfig(max_depth=4, max_multiset_size=3, atom_alphabet=("t", "e", "NOM"),
                        attr_alphabet=("SUBJ", "OBJ"), seed=seed)
        if seed % 2:
            term = gen_planted_fterm(cfg)
        else:
            k = 2 + seed % 3
            parts = [gen_random_fterm(replace(cfg, seed=seed * 7 + i)) for i in range(k)]
            term = canonicalize(Multiset(tuple(parts)))
        seed += 1
        if len(serialize_fterm(term)) <= max_len:
            terms.append(term)
    return terms


# -- exhaustive reduction -----------------------------------------------------

def _bags(term: FTerm, plug: Callable) -> Iterator[tuple[list, Callable]]:
    """Every bag position in ``term`` with a function rebuilding the whole
    term from a replacement list of that bag's elements."""
    members = list(term.elements) if isinstance(term, Multiset) else [term]
    yield members, plug
    for idx, member in enumerate(members):
        if isinstance(member, Embed):
            def inner(new_items, idx=idx, attr=member.attr, members=members, plug=plug):
                rebuilt = members[:idx] + [Embed(attr, Multiset(tuple(new_items)))] + members[idx + 1:]
                return plug(rebuilt)
            yield from _bags(member.body, inner)


def _strip(term: FTerm, attrs: tuple) -> Optional[FTerm]:
    if not attrs:
        return term
    if isinstance(term, Embed) and term.attr == attrs[0]:
        return _strip(term.body, attrs[1:])
    return None


def _dress(term: FTerm, attrs: tuple) -> FTerm:
    return Embed(attrs[0], _dress(term, attrs[1:])) if attrs else term


def _successors(term: FTerm) -> set:
    root = lambda items: canonicalize(Multiset(tuple(items)))
    out = set()
    for members, plug in _bags(term, root):
        bag = Counter(members)
        for x in list(bag):
            rest = bag - Counter([x])
            if isinstance(x, Opt):
                out.add(plug(list(rest.elements())))
                out.add(plug(list(rest.elements()) + [x.body]))
            if isinstance(x, Embed) and isinstance(x.body, Multiset) and len(x.body.elements) > 1:
                out.add(plug(list(rest.elements()) + [Embed(x.attr, b) for b in x.body.elements]))
            for y in list(rest):
                left = rest - Counter([y])
                if isinstance(x, Limp) and y == x.antecedent:
                    out.add(plug(list(left.elements()) + [x.consequent]))
                if isinstance(x, PathEq):
                    body = _strip(y, x.src)
                    if body is not None:
                        out.add(plug(list(left.elements()) + [_dress(body, x.dst)]))
                if isinstance(x, Embed) and isinstance(y, Embed) and x.attr == y.attr:
                    out.add(plug(list(left.elements()) + [Embed(x.attr, Multiset((x.body, y.body)))]))
    return out


def oracle_reduce(term: FTerm, goal: str = "t", cap: int = HARD_STATE_CAP) -> str:
    """Explore the entire reachable state space of ``term``, then report
    whether the goal atom was among the states."""
    start = canonicalize(term)
    seen = {start}
    frontier = deque([start])
    while frontier:
        for nxt in _successors(frontier.popleft()):
            if nxt not in seen:
                seen.add(nxt)
                if len(seen) > cap:
                    raise StateSpaceExceeded(f"more than {cap} states")
                frontier.append(nxt)
    return GRAMMATICAL if Atom(goal) in seen else UNGRAMMATICAL


# -- f-structures -------------------------------------------------------------

def enumerate_structures(eqs: list, bound: int, consts: Iterable[str] = ()) -> list[FStructure]:
    """All structures with at most ``bound`` non-constant nodes that satisfy
    the defining equations in ``eqs``, smallest first.

    Only edges and bindings that some equation inspects are built, so each
    structure satisfying ``eqs`` restricts to one in the list; any other
    satisfying structure is a superset of a listed one.  Constants are the
    ones named in ``eqs`` plus ``consts``, one node each.
    """
    eqs = [e for e in eqs if not e.constraining]
    names = sorted({e.rhs.name for e in eqs if isinstance(e.rhs, Const)} | set(consts))
    atoms = [("c", n) for n in names]
    found: dict = {}

    def options(n):
        return [("n", i) for i in range(n)] + atoms + ([("n", n)] if n < bound else [])

    def grow(n, node):
        return n + 1 if node == ("n", n) else n

    def walk(path, st):
        n, bind, edges = st
        if path.var in bind:
            yield from steps(bind[path.var], path.attrs, st)
            return
        for node in options(n):
            yield from steps(node, path.attrs, (grow(n, node), {**bind, path.var: node}, edges))

    def steps(node, attrs, st):
        if not attrs:
            yield node, st
            return
        if node[0] == "c":
            return
        n, bind, edges = st
        key = (node, attrs[0])
        if key in edges:
            yield from steps(edges[key], attrs[1:], st)
            return
        for target in options(n):
            yield from steps(target, attrs[1:], (grow(n, target), bind, {**edges, key: target}))

    def search(i, st):
        if i == len(eqs):
            fs = _freeze(st, names, bound)
            found.setdefault(fs.canonical(), (st[0], len(st[2]), fs))
            return
        eq = eqs[i]
        for left, st1 in walk(eq.lhs, st):
            if isinstance(eq.rhs, Const):
                if left == ("c", eq.rhs.name):
                    search(i + 1, st1)
            else:
                for right, st2 in walk(eq.rhs, st1):
                    if right == left:
                        search(i + 1, st2)

    search(0, (0, {}, {}))
    ranked = sorted(found.items(), key=lambda kv: (kv[1][0], kv[1][1], kv[0]))
    return [fs for _, (_, _, fs) in ranked]


def _freeze(st, names: list, bound: int) -> FStructure:
    _, bind, edges = st
    ids = {("c", n): bound + k for k, n in enumerate(names)}
    num = lambda node: ids.get(node, node[1])
    out: dict = {}
    for (src, attr), dst in edges.items():
        out.setdefault(num(src), {})[attr] = num(dst)
    return FStructure(out, {bound + k: n for k, n in enumerate(names)},
                      {v: num(node) for v, node in bind.items()})


def subsumes(small: FStructure, big: FStructure) -> bool:
    """Whether ``small`` maps homomorphically into ``big``: bindings,
    edges and constants preserved.  Nodes of ``small`` not reachable from
    a variable are ignored."""
    image: dict = {}
    todo = []
    for var, node in small.bindings.items():
        if var not in big.bindings:
            return False
        todo.append((node, big.bindings[var]))
    while todo:
        a, b = todo.pop()
        if a in image:
            if image[a] != b:
                return False
            continue
        image[a] = b
        if a in small.consts and big.consts.get(b) != small.consts[a]:
            return False
        for key, target in small.edges.get(a, {}).items():
            mapped = big.edges.get(b, {}).get(key)
            if mapped is None:
                return False
            todo.append((target, mapped))
    return True


class StructureSpace:
    """Every structure over a fixed small vocabulary: ``bound`` complex
    nodes, one node per constant, each (node, attribute) edge absent or
    pointing anywhere, each variable bound to a complex node.

    Truth of a description over the whole space is a bitmask (bit ``k``
    for structure ``k``), so two descriptions are equivalent on the space
    iff their masks are equal.
    """

    def __init__(self, variables: tuple, attrs: tuple, consts: tuple, bound: int):
        self.consts = consts
        nodes = list(range(bound)) + [("c", c) for c in consts]
        slots = [(n, a) for n in range(bound) for a in attrs]
        targets = [None] + nodes
        self.structures = []
        for binding in itertools.product(range(bound), repeat=len(variables)):
            for choice in itertools.product(targets, repeat=len(slots)):
                edges = {slot: t for slot, t in zip(slots, choice) if t is not None}
                self.structures.append((dict(zip(variables, binding)), edges))
        self._masks: dict = {}

    def __len__(self) -> int:
        return len(self.structures)

    def _value(self, structure, term):
        if isinstance(term, Const):
            return ("c", term.name)
        bind, edges = structure
        node = bind.get(term.var)
        for attr in term.attrs:
            if node is None or isinstance(node, tuple):
                return None
            node = edges.get((node, attr))
        return node

    def mask(self, d: FDescription) -> int:
        if isinstance(d, Equation):
            key = (str(d.lhs), str(d.rhs))
            if key not in self._masks:
                bits = 0
                for k, st in enumerate(self.structures):
                    left = self._value(st, d.lhs)
                    if left is not None and left == self._value(st, d.rhs):
                        bits |= 1 << k
                self._masks[key] = bits
            return self._masks[key]
        if isinstance(d, And):
            bits = (1 << len(self.structures)) - 1
            for item in d.items:
                bits &= self.mask(item)
            return bits
        bits = 0
        for item in d.items:
            bits |= self.mask(item)
        return bits


# -- fixtures -----------------------------------------------------------------

def write_fixture(path: Path, rows: Iterable[tuple[str, str]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for text, verdict in rows:
            fh.write(f"{text}\t{verdict}\n")


def read_fixture(path: Path) -> list[tuple[str, str]]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line:
                text, verdict = line.split("\t")
                rows.append((text, verdict))
    return rows
