"""Grammar files, chart parsing and per-sentence instantiation.

A grammar file is line oriented; ``#`` starts a comment::

    mode rlfg                       # or: mode lfg
    start S
    type e t contentful
    type NOM vacuous
    attr SUBJ
    cat S NP VP
    S -> NP:{SUBJ(NOM, v)} VP:{v}
    lex she NP {NOM -o e}
    lex snores VP {SUBJ e -o t}

``v`` in an annotation is the child metavariable (``↓``); optional
right-hand elements are bracketed, ``[ NP:{OBJ v} ]``.  In ``lfg`` mode
annotations and lexical payloads are equation sets such as
``{(^ SUBJ)=v}`` and ``{(^ PRED)=Sandy; (^ NUM)=SG}``, attributes are
declared with ``attr`` and atomic values with ``const``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional, Sequence, Union

from . import classical
from .classical import (
    And, Equation, FDescription, FDescriptionSyntaxError, Path,
    parse_fdescription,
)
from .fterm import (
    Declarations, FTerm, FTermSyntaxError, TypeDecl, UndeclaredIdentifier,
    make_bag, parse_fterm, substitute,
)

RLFG = "rlfg"
LFG = "lfg"

Annotation = Union[FTerm, FDescription]


class GrammarError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


class UnknownWord(KeyError):
    def __init__(self, word: str):
        self.word = word
        super().__init__(word)

    def __str__(self) -> str:
        return f"unknown word {self.word!r}"


@dataclass(frozen=True)
class RhsElement:
    category: str
    optional: bool
    annotation: Annotation
    text: str = field(default="", compare=False)


@dataclass(frozen=True)
class Rule:
    lhs: str
    rhs: tuple
    index: int = 0

    def __str__(self) -> str:
        parts = []
        for el in self.rhs:
            item = f"{el.category}:{{{el.text}}}"
            parts.append(f"[{item}]" if el.optional else item)
        return f"{self.lhs} -> " + " ".join(parts)

    def variants(self) -> list[tuple]:
        """Right-hand sides with each optional element present or absent,
        all-present first; empty variants are dropped."""
        flags = [(True, False) if el.optional else (True,) for el in self.rhs]
        out = []
        for choice in itertools.product(*flags):
            kept = tuple(el for el, keep in zip(self.rhs, choice) if keep)
            if kept:
                out.append(kept)
        return out


@dataclass(frozen=True)
class LexEntry:
    word: str
    category: str
    payload: Annotation
    index: int = 0


@dataclass
class Grammar:
    mode: str
    start: str
    decls: Declarations
    categories: frozenset
    rules: tuple
    lexicon: dict
    constants: frozenset = frozenset()

    def __post_init__(self):
        self._variants = {}
        for rule in self.rules:
            for rhs in rule.variants():
                self._variants.setdefault(rule.lhs, []).append((rule, rhs))

    def __hash__(self):
        return id(self)

    @property
    def lexeme_count(self) -> int:
        return sum(len(v) for v in self.lexicon.values())

    def entries(self) -> list[LexEntry]:
        return sorted((e for es in self.lexicon.values() for e in es), key=lambda e: e.index)

    def variants(self, category: str) -> list:
        return self._variants.get(category, [])


# -- loading ------------------------------------------------------------------

_RHS_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<open>\[)
  | (?P<close>\])
  | (?P<elem>(?P<cat>[^\W\d][\w'-]*)(?:\s*:\s*\{(?P<ann>[^{}]*)\})?)
""", re.VERBOSE)

_LEX = re.compile(r"lex\s+(?P<word>\S+)\s+(?P<cat>\S+)\s*\{(?P<payload>[^{}]*)\}\s*$")


def _strip_comment(line: str) -> str:
    depth = 0
    for k, ch in enumerate(line):
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
        elif ch == "#" and depth == 0:
            return line[:k]
    return line


class _Loader:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.mode: Optional[str] = None
        self.start: Optional[tuple] = None
        self.goal = "t"
        self.types: dict = {}
        self.attrs: dict = {}
        self.cats: dict = {}
        self.consts: dict = {}
        self.names: dict = {}

    def declare(self, table: dict, name: str, value, lineno: int, col: int) -> None:
        if name in self.names:
            raise GrammarError(f"duplicate declaration of {name!r}", lineno, col)
        self.names[name] = lineno
        table[name] = value

    def load(self) -> Grammar:
        body = []
        for lineno, raw in enumerate(self.lines, 1):
            line = _strip_comment(raw)
            if not line.strip():
                continue
            col = len(line) - len(line.lstrip()) + 1
            words = line.split()
            head = words[0]
            if head == "mode":
                if len(words) != 2 or words[1] not in (RLFG, LFG):
                    raise GrammarError("expected 'mode rlfg' or 'mode lfg'", lineno, col)
                if self.mode is not None:
                    raise GrammarError("mode declared twice", lineno, col)
                self.mode = words[1]
            elif head == "start":
                if len(words) != 2:
                    raise GrammarError("expected 'start CATEGORY'", lineno, col)
                self.start = (words[1], lineno, col)
            elif head == "goal":
                if len(words) != 2:
                    raise GrammarError("expected 'goal TYPE'", lineno, col)
                self.goal = words[1]
            elif head == "type":
                if len(words) < 3 or words[-1] not in ("contentful", "vacuous"):
                    raise GrammarError("expected 'type NAME... contentful|vacuous'", lineno, col)
                for name in words[1:-1]:
                    self.declare(self.types, name, TypeDecl(name, words[-1] == "contentful"),
                                 lineno, line.index(name) + 1)
            elif head in ("attr", "cat", "const"):
                if len(words) < 2:
                    raise GrammarError(f"expected '{head} NAME...'", lineno, col)
                table = {"attr": self.attrs, "cat": self.cats, "const": self.consts}[head]
                for name in words[1:]:
                    self.declare(table, name, lineno, lineno, line.index(name) + 1)
            else:
                body.append((lineno, line))
        if self.mode is None:
            raise GrammarError("missing 'mode' declaration")
        if self.mode == RLFG and self.goal not in self.types:
            raise GrammarError(f"goal type {self.goal!r} is not declared")
        self.decls = Declarations(dict(self.types), frozenset(self.attrs), self.goal)

        rules, lexicon = [], {}
        for lineno, line in body:
            stripped = line.strip()
            if stripped.startswith("lex ") or stripped == "lex":
                entry = self.lex_entry(line, lineno, sum(map(len, lexicon.values())))
                lexicon.setdefault(entry.word, []).append(entry)
            elif "->" in line:
                rules.append(self.rule(line, lineno, len(rules)))
            else:
                raise GrammarError(f"unrecognized line {stripped!r}", lineno, len(line) - len(line.lstrip()) + 1)

        if self.start is None:
            raise GrammarError("missing 'start' declaration")
        start, lineno, col = self.start
        self.check_cat(start, lineno, col)
        lexical = {e.category for es in lexicon.values() for e in es}
        if start not in {r.lhs for r in rules} | lexical:
            raise GrammarError(f"start category {start!r} has no rules or lexical entries", lineno, col)
        grammar = Grammar(self.mode, start, self.decls, frozenset(self.cats), tuple(rules),
                          lexicon, frozenset(self.consts))
        _check_unary_cycles(grammar)
        return grammar

    def check_cat(self, name: str, lineno: int, col: int) -> None:
        if name not in self.cats:
            raise GrammarError(f"undeclared category {name!r}", lineno, col)

    def rule(self, line: str, lineno: int, index: int) -> Rule:
        left, _, right = line.partition("->")
        lhs = left.strip()
        lhs_col = len(left) - len(left.lstrip()) + 1
        if not re.fullmatch(r"[^\W\d][\w'-]*", lhs):
            raise GrammarError("rule needs a single category on the left", lineno, lhs_col)
        self.check_cat(lhs, lineno, lhs_col)
        offset = len(left) + 2
        pos = 0
        rhs = []
        optional = False
        pending = 0
        while pos < len(right):
            m = _RHS_TOKEN.match(right, pos)
            col = offset + pos + 1
            if m is None:
                raise GrammarError(f"unexpected {right[pos]!r} in rule body", lineno, col)
            kind = m.lastgroup if m.lastgroup in ("ws", "open", "close") else "elem"
            if kind == "open":
                if optional:
                    raise GrammarError("nested '['", lineno, col)
                optional, pending = True, 0
            elif kind == "close":
                if not optional or pending != 1:
                    raise GrammarError("'[ ]' must enclose exactly one element", lineno, col)
                optional = False
            elif kind == "elem":
                cat = m.group("cat")
                self.check_cat(cat, lineno, col)
                ann_text = m.group("ann")
                if ann_text is None:
                    ann_text = "v" if self.mode == RLFG else ""
                ann_col = col + (m.group().index("{") + 1 if "{" in m.group() else 0)
                ann = self.annotation(ann_text, lineno, ann_col, template=True)
                rhs.append(RhsElement(cat, optional, ann, ann_text.strip()))
                pending += 1
                if optional and pending > 1:
                    raise GrammarError("'[ ]' must enclose exactly one element", lineno, col)
            pos = m.end()
        if optional:
            raise GrammarError("unclosed '['", lineno, offset + len(right))
        if not rhs:
            raise GrammarError("empty rule body", lineno, offset + 1)
        return Rule(lhs, tuple(rhs), index)

    def lex_entry(self, line: str, lineno: int, index: int) -> LexEntry:
        m = _LEX.match(line.strip())
        col = len(line) - len(line.lstrip()) + 1
        if m is None:
            raise GrammarError("expected 'lex WORD CATEGORY {payload}'", lineno, col)
        cat_col = col + m.start("cat")
        self.check_cat(m.group("cat"), lineno, cat_col)
        payload = self.annotation(m.group("payload"), lineno, col + m.start("payload"), template=False)
        return LexEntry(m.group("word"), m.group("cat"), payload, index)

    def annotation(self, text: str, lineno: int, col: int, template: bool) -> Annotation:
        try:
            if self.mode == RLFG:
                if not text.strip():
                    raise GrammarError("empty f-term", lineno, col)
                return parse_fterm(text, self.decls, allow_meta=template)
            desc = parse_fdescription(text, template=True)
        except (FTermSyntaxError, FDescriptionSyntaxError) as exc:
            raise GrammarError(exc.message, lineno, col + exc.pos) from None
        except UndeclaredIdentifier as exc:
            raise GrammarError(str(exc).split(" at position")[0], lineno,
                               col + (exc.pos or 0)) from None
        for eq in classical.equations(desc):
            for path in (eq.lhs, eq.rhs):
                if isinstance(path, Path):
                    if not template and path.var == "v":
                        raise GrammarError("'v' is not available in lexical entries", lineno, col)
                    for attr in path.attrs:
                        if attr not in self.attrs:
                            raise GrammarError(f"undeclared attribute {attr!r}", lineno, col)
                elif path.name not in self.consts:
                    raise GrammarError(f"undeclared constant {path.name!r}", lineno, col)
        return desc


def _check_unary_cycles(g: Grammar) -> None:
    edges: dict = {}
    for lhs, variants in g._variants.items():
        for _, rhs in variants:
            if len(rhs) == 1:
                edges.setdefault(lhs, set()).add(rhs[0].category)

    def reach(a, target, seen):
        for b in edges.get(a, ()):
            if b == target:
                return True
            if b not in seen:
                seen.add(b)
                if reach(b, target, seen):
                    return True
        return False

    for cat in edges:
        if reach(cat, cat, set()):
            raise GrammarError(f"unary rule cycle through {cat!r}")


def load_grammar(text: str) -> Grammar:
    """Parse and validate a grammar file's contents."""
    return _Loader(text).load()


def with_lexical_equation(g: Grammar, text: str) -> Grammar:
    """A copy of classical grammar ``g`` where every lexical entry also
    carries the equation(s) ``text``; new attributes and constants are
    declared on the fly."""
    if g.mode != LFG:
        raise ValueError("only classical grammars carry equations")
    extra = parse_fdescription(text, template=True)
    attrs, consts = set(g.decls.attrs), set(g.constants)
    for eq in classical.equations(extra):
        for side in (eq.lhs, eq.rhs):
            if isinstance(side, Path):
                attrs.update(side.attrs)
            else:
                consts.add(side.name)
    lexicon = {w: [replace(e, payload=And((e.payload, extra))) for e in es]
               for w, es in g.lexicon.items()}
    decls = replace(g.decls, attrs=frozenset(attrs))
    return Grammar(g.mode, g.start, decls, g.categories, g.rules, lexicon, frozenset(consts))


# -- c-structures -------------------------------------------------------------

@dataclass(frozen=True)
class CStructure:
    """A parse tree node.  Lexical nodes have a ``word`` and an ``entry``;
    phrasal nodes have ``children``, the licensing ``rule`` and the realised
    right-hand ``elements`` in the same order as the children."""

    category: str
    children: tuple = ()
    word: Optional[str] = None
    rule: Optional[Rule] = None
    entry: Optional[LexEntry] = None
    elements: tuple = ()

    def leaves(self) -> list[str]:
        if self.word is not None:
            return [self.word]
        return [w for c in self.children for w in c.leaves()]

    def __str__(self) -> str:
        if self.word is not None:
            return f"({self.category} {self.word})"
        return f"({self.category} " + " ".join(map(str, self.children)) + ")"


def parse_sentence(g: Grammar, tokens: Sequence[str]) -> list[CStructure]:
    """All trees rooted in the start category whose yield is ``tokens``."""
    tokens = tuple(tokens)
    if not tokens:
        raise ValueError("cannot parse an empty sentence")
    for tok in tokens:
        if tok not in g.lexicon:
            raise UnknownWord(tok)

    @lru_cache(maxsize=None)
    def trees(cat: str, i: int, j: int) -> tuple:
        found = []
        if j == i + 1:
            for entry in g.lexicon[tokens[i]]:
                if entry.category == cat:
                    found.append(CStructure(cat, word=tokens[i], entry=entry))
        for rule, rhs in g.variants(cat):
            for kids in sequences(rhs, i, j):
                found.append(CStructure(cat, kids, rule=rule, elements=rhs))
        return tuple(found)

    def sequences(rhs: tuple, i: int, j: int):
        if len(rhs) == 1:
            for t in trees(rhs[0].category, i, j):
                yield (t,)
            return
        # every element covers at least one token
        for mid in range(i + 1, j - len(rhs) + 2):
            heads = trees(rhs[0].category, i, mid)
            if not heads:
                continue
            for rest in sequences(rhs[1:], mid, j):
                for h in heads:
                    yield (h,) + rest

    return list(trees(g.start, 0, len(tokens)))


def instantiate_rlfg(tree: CStructure) -> FTerm:
    """The f-term of ``tree``: a lexical node contributes its entry; a phrasal
    node the bag of its annotations with each ``↓`` replaced by the
    corresponding child's f-term."""
    if tree.word is not None:
        return tree.entry.payload
    parts = [substitute(el.annotation, instantiate_rlfg(child))
             for el, child in zip(tree.elements, tree.children)]
    return make_bag(parts)


def instantiate_lfg(tree: CStructure) -> FDescription:
    """The f-description of ``tree``.  Nodes get variables ``f1``, ``f2``,
    ... in preorder; in each annotation ``^`` is the mother's variable and
    ``v`` the annotated node's own."""
    counter = itertools.count(1)
    parts: list = []

    def walk(node: CStructure, var: str) -> None:
        if node.word is not None:
            site = f"lex {node.word}@{var}"
            parts.append(classical.instantiate(node.entry.payload, {"^": var}, site))
            return
        for el, child in zip(node.elements, node.children):
            child_var = f"f{next(counter)}"
            site = f"rule {node.rule.index}.{node.rule.rhs.index(el)}@{child_var}"
            parts.append(classical.instantiate(el.annotation, {"^": var, "v": child_var}, site))
            walk(child, child_var)

    walk(tree, f"f{next(counter)}")
    return _flatten(And(tuple(parts)))


def _flatten(d: FDescription) -> FDescription:
    if isinstance(d, Equation):
        return d
    items = []
    for item in (_flatten(i) for i in d.items):
        if type(item) is type(d):
            items.extend(item.items)
        else:
            items.append(item)
    return type(d)(tuple(items))
