"""Classical LFG: f-descriptions and their f-structure solutions.

An f-description is a boolean combination of equations.  Solving follows
the usual procedure: expand to DNF; for each conjunct build the minimal
model of its defining equations by unification, then check the
constraining equations against that model.  Solutions of all conjuncts are
pooled.

:func:`solve_relaxed` drops the functionality requirement between equations
from different annotation sites, to show what constraining equations still
rule out when attributes may carry several values.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional, Sequence, Union

__all__ = [
    "Path", "Const", "Equation", "And", "Or", "FDescription", "FStructure",
    "FDescriptionSyntaxError", "parse_fdescription", "dnf", "solve_conjunct",
    "verify_constraints", "solve", "solve_relaxed", "RelaxedCandidate",
    "instantiate", "satisfies",
]


# -- descriptions -------------------------------------------------------------

@dataclass(frozen=True)
class Path:
    var: str
    attrs: tuple = ()

    def __str__(self) -> str:
        if not self.attrs:
            return self.var
        return "(" + " ".join((self.var,) + self.attrs) + ")"


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Equation:
    lhs: Path
    rhs: Union[Path, Const]
    constraining: bool = False
    site: Optional[str] = field(default=None, compare=False)

    def __str__(self) -> str:
        op = "=c " if self.constraining else "="
        return f"{self.lhs}{op}{self.rhs}"

    @property
    def kind(self) -> str:
        return "constraining" if self.constraining else "defining"


@dataclass(frozen=True)
class And:
    items: tuple

    def __str__(self) -> str:
        return " & ".join(_wrap(i) for i in self.items) if self.items else "true"


@dataclass(frozen=True)
class Or:
    items: tuple

    def __str__(self) -> str:
        return " | ".join(_wrap(i) for i in self.items) if self.items else "false"


FDescription = Union[Equation, And, Or]


def _wrap(item) -> str:
    text = str(item)
    return f"({text})" if isinstance(item, (And, Or)) and len(item.items) > 1 else text


class FDescriptionSyntaxError(ValueError):
    def __init__(self, message: str, pos: int):
        self.message = message
        self.pos = pos
        super().__init__(f"{message} at position {pos}")


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<eqc>=c(?![\w-]))
  | (?P<meta>[\^↑↓])
  | (?P<ident>[^\W\d][\w-]*|\d[\w-]*)
  | (?P<punct>[()=&;|])
""", re.VERBOSE)

_RAW_VAR = re.compile(r"[fgh]\d*$")


class _Parser:
    def __init__(self, text: str, template: bool):
        self.text = text
        self.template = template
        self.tokens = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None:
                raise FDescriptionSyntaxError(f"unexpected character {text[pos]!r}", pos)
            if m.lastgroup != "ws":
                kind = m.lastgroup
                value = m.group()
                if kind == "punct":
                    kind = value
                elif kind == "meta" or (kind == "ident" and self.is_var(value)):
                    kind = "var"
                    value = {"↑": "^", "↓": "v"}.get(value, value)
                self.tokens.append((kind, value, pos))
            pos = m.end()
        self.tokens.append(("end", "", len(text)))
        self.i = 0
        self.count = 0

    def is_var(self, name: str) -> bool:
        if self.template:
            return name == "v"
        return bool(_RAW_VAR.match(name))

    def peek(self, k=0):
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def take(self, kind):
        tok = self.peek()
        if tok[0] != kind:
            raise FDescriptionSyntaxError(f"expected {kind!r}, found {tok[1] or 'end of input'!r}", tok[2])
        self.i += 1
        return tok

    def parse(self) -> FDescription:
        if self.peek()[0] == "end":
            return And(())
        d = self.disj()
        tok = self.peek()
        if tok[0] != "end":
            raise FDescriptionSyntaxError(f"unexpected {tok[1]!r}", tok[2])
        return d

    def disj(self):
        items = [self.conj()]
        while self.peek()[0] == "|":
            self.i += 1
            items.append(self.conj())
        return items[0] if len(items) == 1 else Or(tuple(items))

    def conj(self):
        items = [self.atom()]
        while self.peek()[0] in ("&", ";"):
            self.i += 1
            if self.peek()[0] in ("end", ")"):
                break  # trailing separator
            items.append(self.atom())
        return items[0] if len(items) == 1 else And(tuple(items))

    def atom(self):
        if self.peek()[0] == "(" and not self.at_path():
            self.i += 1
            d = self.disj()
            self.take(")")
            return d
        return self.equation()

    def at_path(self) -> bool:
        return self.peek(1)[0] == "var" and self.peek(2)[0] in ("ident", ")")

    def equation(self):
        lhs = self.term()
        if not isinstance(lhs, Path):
            raise FDescriptionSyntaxError("left-hand side must be a path", self.peek(-1)[2])
        kind, _, pos = self.peek()
        if kind not in ("=", "eqc"):
            raise FDescriptionSyntaxError("expected '=' or '=c'", pos)
        self.i += 1
        rhs = self.term()
        self.count += 1
        return Equation(lhs, rhs, kind == "eqc", site=f"eq{self.count}")

    def term(self):
        kind, value, pos = self.peek()
        if kind == "(":
            self.i += 1
            _, var, _ = self.take("var")
            attrs = []
            while self.peek()[0] == "ident":
                attrs.append(self.take("ident")[1])
            self.take(")")
            return Path(var, tuple(attrs))
        if kind == "var":
            self.i += 1
            return Path(value)
        if kind == "ident":
            self.i += 1
            return Const(value)
        raise FDescriptionSyntaxError(f"unexpected {value or 'end of input'!r}", pos)


def parse_fdescription(text: str, *, template: bool = False) -> FDescription:
    """Parse ``(f1 SUBJ NUM)=SG & ((f1 A)=x | (f1 A)=c y)``.

    Raw descriptions name variables ``f``, ``g`` or ``h`` with optional
    digits (``f1``, ``g2``); with ``template`` the variables are ``^`` (or
    ``↑``) and ``v`` (or ``↓``).  ``;`` is a synonym for ``&``, and ``=c``
    is always the constraining operator.  Each equation gets its own site
    label.
    """
    return _Parser(text, template).parse()


def equations(d: FDescription) -> Iterator[Equation]:
    if isinstance(d, Equation):
        yield d
    else:
        for item in d.items:
            yield from equations(item)


def instantiate(d: FDescription, binding: dict, site: Optional[str] = None) -> FDescription:
    """Rename variables per ``binding``; optionally stamp every equation with ``site``."""
    if isinstance(d, Equation):
        lhs = Path(binding.get(d.lhs.var, d.lhs.var), d.lhs.attrs)
        rhs = d.rhs
        if isinstance(rhs, Path):
            rhs = Path(binding.get(rhs.var, rhs.var), rhs.attrs)
        return Equation(lhs, rhs, d.constraining, site if site is not None else d.site)
    return type(d)(tuple(instantiate(i, binding, site) for i in d.items))


def dnf(d: FDescription) -> list[list[Equation]]:
    """Disjunctive normal form as a list of conjuncts.

    >>> a, b, c = (parse_fdescription(f"(f1 A)={x}") for x in "xyz")
    >>> [[str(e) for e in conj] for conj in dnf(And((a, Or((b, c)))))]
    [['(f1 A)=x', '(f1 A)=y'], ['(f1 A)=x', '(f1 A)=z']]
    """
    if isinstance(d, Equation):
        return [[d]]
    if isinstance(d, Or):
        return [conj for item in d.items for conj in dnf(item)]
    result = [[]]
    for item in d.items:
        result = [left + right for left in result for right in dnf(item)]
    return result


# -- f-structures -------------------------------------------------------------

@dataclass
class FStructure:
    """Finite attribute-value graph.

    ``edges`` maps a node to its outgoing edges; an edge key is an attribute
    name, or ``(attribute, entry)`` when an attribute carries several
    entries.  ``consts`` labels the nodes that are atomic values and
    ``bindings`` maps f-variables to nodes.
    """

    edges: dict = field(default_factory=dict)
    consts: dict = field(default_factory=dict)
    bindings: dict = field(default_factory=dict)

    def nodes(self) -> set:
        found = set(self.consts) | set(self.bindings.values()) | set(self.edges)
        for out in self.edges.values():
            found.update(out.values())
        return found

    def step(self, node, key):
        return self.edges.get(node, {}).get(key)

    def resolve(self, path: Path, key_of: Callable = None) -> Optional[int]:
        """Node denoted by ``path``, or None when some edge is missing."""
        node = self.bindings.get(path.var)
        for attr in path.attrs:
            if node is None:
                return None
            node = self.step(node, key_of(attr) if key_of else attr)
        return node

    def canonical(self) -> str:
        """A string that two structures share iff they are isomorphic with
        the same variable bindings (entry tags are ignored)."""
        numbering: dict = {}
        order = []

        def visit(node):
            if node in numbering:
                return
            numbering[node] = len(numbering)
            order.append(node)
            for key in sorted(self.edges.get(node, {}), key=_key_sort):
                visit(self.edges[node][key])

        for var in sorted(self.bindings):
            visit(self.bindings[var])
        parts = []
        for node in order:
            out = self.edges.get(node, {})
            entries = sorted((_attr(k), numbering[v]) for k, v in out.items())
            parts.append(f"{numbering[node]}:{self.consts.get(node, '')}:{entries}")
        binds = [(v, numbering[n]) for v, n in sorted(self.bindings.items())]
        return f"{binds}|{';'.join(parts)}"

    def __eq__(self, other) -> bool:
        return isinstance(other, FStructure) and self.canonical() == other.canonical()

    def __hash__(self):
        return hash(self.canonical())

    def to_dict(self, var: Optional[str] = None, markers: Optional[dict] = None):
        """Nested attribute-value view from ``var`` (default: the lowest
        numbered variable).  Constants become strings, attributes with
        several entries become lists, and a node met again on the current
        path is shown as ``{"$cycle": n}``."""
        if var is None:
            var = min(self.bindings, key=_var_sort)
        markers = markers or {}

        def build(node, stack):
            if node in self.consts:
                return self.consts[node]
            if node in markers and not self.edges.get(node):
                return markers[node]
            if node in stack:
                return {"$cycle": stack.index(node)}
            grouped: dict = {}
            for key, target in sorted(self.edges.get(node, {}).items(), key=lambda kv: _key_sort(kv[0])):
                grouped.setdefault(_attr(key), []).append(build(target, stack + [node]))
            return {a: vals[0] if len(vals) == 1 else vals for a, vals in sorted(grouped.items())}

        return build(self.bindings[var], [])

    def __str__(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True)


def _attr(key) -> str:
    return key if isinstance(key, str) else key[0]


def _key_sort(key):
    return (key, -1) if isinstance(key, str) else key


def _var_sort(name: str):
    digits = re.sub(r"\D", "", name)
    return (int(digits) if digits else 0, name)


class _Inconsistent(Exception):
    pass


class _Unifier:
    """Union-find over f-structure nodes with per-node edge maps."""

    def __init__(self):
        self.parent: list[int] = []
        self.edges: list[dict] = []
        self.const: list[Optional[str]] = []
        self.vars: dict[str, int] = {}
        self.const_nodes: dict[str, int] = {}

    def fresh(self, const: Optional[str] = None) -> int:
        self.parent.append(len(self.parent))
        self.edges.append({})
        self.const.append(const)
        return len(self.parent) - 1

    def find(self, n: int) -> int:
        root = n
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[n] != root:
            self.parent[n], n = root, self.parent[n]
        return root

    def var(self, name: str) -> int:
        if name not in self.vars:
            self.vars[name] = self.fresh()
        return self.find(self.vars[name])

    def constant(self, name: str) -> int:
        if name not in self.const_nodes:
            self.const_nodes[name] = self.fresh(name)
        return self.find(self.const_nodes[name])

    def walk(self, path: Path, key_of: Callable) -> int:
        node = self.var(path.var)
        for attr in path.attrs:
            if self.const[node] is not None:
                raise _Inconsistent(f"constant {self.const[node]} has no attribute {attr}")
            key = key_of(attr)
            out = self.edges[node]
            if key not in out:
                out[key] = self.fresh()
            node = self.find(out[key])
        return node

    def union(self, a: int, b: int) -> None:
        pending = [(a, b)]
        while pending:
            x, y = pending.pop()
            x, y = self.find(x), self.find(y)
            if x == y:
                continue
            cx, cy = self.const[x], self.const[y]
            if cx is not None and cy is not None:
                raise _Inconsistent(f"{cx} and {cy} are distinct constants")
            if len(self.edges[x]) < len(self.edges[y]):
                x, y = y, x
            self.parent[y] = x
            self.const[x] = cx if cx is not None else cy
            for key, target in self.edges[y].items():
                if key in self.edges[x]:
                    pending.append((self.edges[x][key], target))
                else:
                    self.edges[x][key] = target
            self.edges[y] = {}
            if self.const[x] is not None and self.edges[x]:
                raise _Inconsistent(f"constant {self.const[x]} cannot carry attributes")

    def structure(self) -> FStructure:
        fs = FStructure()
        roots = {name: self.find(n) for name, n in self.vars.items()}
        seen = set()
        todo = list(roots.values())
        while todo:
            n = todo.pop()
            if n in seen:
                continue
            seen.add(n)
            if self.const[n] is not None:
                fs.consts[n] = self.const[n]
            out = {k: self.find(t) for k, t in self.edges[n].items()}
            if out:
                fs.edges[n] = out
                todo.extend(out.values())
        fs.bindings = roots
        return _renumber(fs)


def _renumber(fs: FStructure) -> FStructure:
    """Relabel nodes 0, 1, ... in a deterministic traversal order."""
    mapping: dict = {}

    def visit(n):
        if n in mapping:
            return
        mapping[n] = len(mapping)
        for key in sorted(fs.edges.get(n, {}), key=_key_sort):
            visit(fs.edges[n][key])

    for var in sorted(fs.bindings, key=_var_sort):
        visit(fs.bindings[var])
    return FStructure(
        edges={mapping[n]: {k: mapping[t] for k, t in out.items()} for n, out in fs.edges.items()},
        consts={mapping[n]: c for n, c in fs.consts.items()},
        bindings={v: mapping[n] for v, n in fs.bindings.items()},
    )


def _plain_key(attr: str, eq: Equation):
    return attr


def _build(eqs: Sequence[Equation], key_fn: Callable = _plain_key) -> Optional[FStructure]:
    u = _Unifier()
    try:
        for eq in eqs:
            key_of = lambda a, eq=eq: key_fn(a, eq)
            u.var(eq.lhs.var)
            if isinstance(eq.rhs, Path):
                u.var(eq.rhs.var)
            if eq.constraining:
                continue
            left = u.walk(eq.lhs, key_of)
            if isinstance(eq.rhs, Const):
                right = u.constant(eq.rhs.name)
            else:
                right = u.walk(eq.rhs, key_of)
            u.union(left, right)
    except _Inconsistent:
        return None
    return u.structure()


def solve_conjunct(eqs: Sequence[Equation]) -> Optional[FStructure]:
    """Minimal model of the defining equations in ``eqs`` (constraining
    equations are ignored), or None if they are inconsistent."""
    return _build(eqs)


def _holds(model: FStructure, eq: Equation, key_fn: Callable = _plain_key) -> bool:
    key_of = lambda a: key_fn(a, eq)
    left = model.resolve(eq.lhs, key_of)
    if left is None:
        return False
    if isinstance(eq.rhs, Const):
        return model.consts.get(left) == eq.rhs.name
    return left == model.resolve(eq.rhs, key_of)


def verify_constraints(model: FStructure, eqs: Iterable[Equation]) -> bool:
    """True iff every constraining equation in ``eqs`` holds in ``model``
    without extending it: its path is defined and carries the value."""
    return all(_holds(model, eq) for eq in eqs if eq.constraining)


def solve(d: FDescription) -> list[FStructure]:
    solutions: list[FStructure] = []
    for conj in dnf(d):
        model = solve_conjunct(conj)
        if model is not None and verify_constraints(model, conj) and model not in solutions:
            solutions.append(model)
    return solutions


def satisfies(fs: FStructure, d: FDescription) -> bool:
    """Classical truth of ``d`` in ``fs``; both equation kinds are read as
    plain equality, so a path must be defined for its equation to hold."""
    if isinstance(d, Equation):
        return _holds(fs, d)
    if isinstance(d, And):
        return all(satisfies(fs, i) for i in d.items)
    return any(satisfies(fs, i) for i in d.items)


# -- relaxed functionality ----------------------------------------------------

@dataclass
class RelaxedCandidate:
    structure: FStructure
    ok: bool
    failed: list
    display: dict

    def to_json(self) -> dict:
        return {"status": "ok" if self.ok else "failed",
                "failedConstraints": self.failed, "structure": self.display}


def set_partitions(items: Sequence) -> Iterator[list[list]]:
    """All partitions of ``items``, coarsest (one block) first."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        # join an existing block before opening a new one
        for k in range(len(part)):
            yield part[:k] + [[first] + part[k]] + part[k + 1:]
        yield [[first]] + part


def _site(eq: Equation, index: int) -> str:
    return eq.site if eq.site is not None else f"#{index}"


def solve_relaxed(d: FDescription, max_candidates: int = 10_000) -> list[RelaxedCandidate]:
    """Candidate structures when an attribute used at several annotation
    sites may get a separate entry per group of sites.

    For every conjunct and every way of grouping, per attribute, the sites
    that mention it, the defining equations are solved with one edge per
    (attribute, group).  Constraining equations are then checked along
    their own group's entries.  A candidate records whether they all hold;
    its display shows unmet constraints as ``"=c VALUE"`` entries.
    """
    out: list[RelaxedCandidate] = []
    seen = set()
    for conj in dnf(d):
        sites = {id(eq): _site(eq, n) for n, eq in enumerate(conj)}
        users: dict = {}
        for eq in conj:
            for attr in eq.lhs.attrs + (eq.rhs.attrs if isinstance(eq.rhs, Path) else ()):
                users.setdefault(attr, [])
                if sites[id(eq)] not in users[attr]:
                    users[attr].append(sites[id(eq)])
        attrs = sorted(users)
        choices = [list(set_partitions(users[a])) for a in attrs]
        for count, combo in enumerate(itertools.product(*choices)):
            if count >= max_candidates:
                raise RuntimeError(f"more than {max_candidates} relaxed candidates")
            block = {}
            for attr, partition in zip(attrs, combo):
                for k, group in enumerate(partition):
                    for site in group:
                        block[attr, site] = k

            def key_fn(attr, eq, block=block):
                return (attr, block[attr, sites[id(eq)]])

            model = _build(conj, key_fn)
            if model is None:
                continue
            failed = [str(eq) for eq in conj if eq.constraining and not _holds(model, eq, key_fn)]
            display = _display(model, [eq for eq in conj if eq.constraining], key_fn)
            marker = json.dumps([display, not failed], sort_keys=True, ensure_ascii=False)
            if marker in seen:
                continue
            seen.add(marker)
            out.append(RelaxedCandidate(model, not failed, failed, display))
    return out


def _display(model: FStructure, constraints: list, key_fn: Callable) -> dict:
    """``model`` as a dict, with the entries that unmet constraints expect
    spelled out so a reader can see where they look for their value."""
    edges = {n: dict(out) for n, out in model.edges.items()}
    shown = FStructure(edges, dict(model.consts), dict(model.bindings))
    markers = {}
    fresh = itertools.count(max(model.nodes(), default=-1) + 1)
    for eq in constraints:
        if _holds(model, eq, key_fn):
            continue
        node = shown.bindings.get(eq.lhs.var)
        for attr in eq.lhs.attrs:
            if node in shown.consts:
                break
            key = key_fn(attr, eq)
            out = shown.edges.setdefault(node, {})
            if key not in out:
                out[key] = next(fresh)
            node = out[key]
        else:
            if node not in shown.consts and not shown.edges.get(node):
                markers[node] = f"=c {eq.rhs}"
    return shown.to_dict(markers=markers)
