"""F-terms: resource structures built from typed atoms.

An f-term is one of

* ``Atom``      a resource of a declared type (``e``, ``t``, ``NOM`` ...)
* ``Multiset``  a bag of f-terms; order is irrelevant, multiplicity is not
* ``Embed``     an f-term placed under an attribute (``SUBJ e``)
* ``Limp``      linear implication (``NOM -o e``)
* ``Opt``       an optional f-term (``(NOM)?``)
* ``PathEq``    a restructuring license (``SUBJ = XCOMP SUBJ``)

``Meta`` is the child metavariable of rule annotations (spelled ``v`` or
``↓``); it only appears in templates and is removed by :func:`substitute`.

Terms are immutable and hashable.  :func:`canonicalize` flattens nested
multisets, collapses singletons and sorts elements, so two terms are equal
as resource configurations iff their canonical serializations coincide.

>>> serialize_fterm(parse_fterm("SUBJ e -o t, SUBJ(NOM -o e, NOM)"))
'SUBJ(NOM, NOM -o e), SUBJ e -o t'
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Union

__all__ = [
    "Atom", "Multiset", "Embed", "Limp", "Opt", "PathEq", "Meta", "FTerm",
    "TypeDecl", "Declarations", "FTermSyntaxError", "UndeclaredIdentifier",
    "EMPTY", "parse_fterm", "canonicalize", "equal", "serialize_fterm",
    "elements", "substitute", "contains_meta", "size",
]


class FTermSyntaxError(ValueError):
    """Malformed f-term text.  ``pos`` is a 0-based character offset."""

    def __init__(self, message: str, pos: int, text: str = ""):
        self.message = message
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos}")


class UndeclaredIdentifier(ValueError):
    def __init__(self, name: str, kind: str, pos: int | None = None):
        self.name = name
        self.kind = kind
        self.pos = pos
        where = "" if pos is None else f" at position {pos}"
        super().__init__(f"undeclared {kind} {name!r}{where}")


# Sort rank of each constructor inside a canonical multiset.  Within a rank
# elements are ordered by their serialization.
_RANK_ATOM, _RANK_EMBED, _RANK_OPT, _RANK_PATHEQ, _RANK_LIMP, _RANK_BAG = range(6)


class _Term:
    """Shared behaviour.  Subclasses set ``_text`` in ``__post_init__``."""

    _text: str
    _rank: int

    def __str__(self) -> str:
        return self._text

    # The serialization is unambiguous, so it doubles as the identity.
    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self._text == other._text

    def __ne__(self, other) -> bool:
        return not self.__eq__(other)

    def __hash__(self) -> int:
        return hash(self._text)

    @property
    def sort_key(self) -> tuple[int, str]:
        return (self._rank, self._text)


def _init_text(obj, text: str) -> None:
    object.__setattr__(obj, "_text", text)


@dataclass(frozen=True, eq=False)
class Atom(_Term):
    name: str
    _text: str = field(init=False, repr=False, compare=False)
    _rank = _RANK_ATOM

    def __post_init__(self):
        _init_text(self, self.name)


@dataclass(frozen=True, eq=False)
class Meta(_Term):
    """The ``↓`` placeholder of an annotation template."""

    _text: str = field(init=False, repr=False, compare=False)
    _rank = _RANK_ATOM

    def __post_init__(self):
        _init_text(self, "v")


@dataclass(frozen=True, eq=False)
class Multiset(_Term):
    elements: tuple = ()
    _text: str = field(init=False, repr=False, compare=False)
    _rank = _RANK_BAG

    def __post_init__(self):
        if not isinstance(self.elements, tuple):
            object.__setattr__(self, "elements", tuple(self.elements))
        if not self.elements:
            text = "()"
        elif len(self.elements) == 1:
            text = "(" + self.elements[0]._text + ")"
        else:
            text = ", ".join(_show(e, _LEVEL_BAG) for e in self.elements)
        _init_text(self, text)


@dataclass(frozen=True, eq=False)
class Embed(_Term):
    attr: str
    body: "FTerm"
    _text: str = field(init=False, repr=False, compare=False)
    _rank = _RANK_EMBED

    def __post_init__(self):
        body = self.body
        if _level(body) >= _LEVEL_EMBED:
            text = f"{self.attr} {body._text}"
        else:
            text = f"{self.attr}({body._text})"
        _init_text(self, text)


@dataclass(frozen=True, eq=False)
class Limp(_Term):
    antecedent: "FTerm"
    consequent: "FTerm"
    _text: str = field(init=False, repr=False, compare=False)
    _rank = _RANK_LIMP

    def __post_init__(self):
        text = (_show(self.antecedent, _LEVEL_EMBED) + " -o "
                + _show(self.consequent, _LEVEL_LIMP))
        _init_text(self, text)


@dataclass(frozen=True, eq=False)
class Opt(_Term):
    body: "FTerm"
    _text: str = field(init=False, repr=False, compare=False)
    _rank = _RANK_OPT

    def __post_init__(self):
        body = self.body
        inner = body._text if not isinstance(body, Multiset) or len(body.elements) != 1 \
            else body.elements[0]._text
        _init_text(self, f"({inner})?")


@dataclass(frozen=True, eq=False)
class PathEq(_Term):
    src: tuple
    dst: tuple
    _text: str = field(init=False, repr=False, compare=False)
    _rank = _RANK_PATHEQ

    def __post_init__(self):
        object.__setattr__(self, "src", tuple(self.src))
        object.__setattr__(self, "dst", tuple(self.dst))
        if not self.src or not self.dst:
            raise ValueError("path equation sides must be nonempty")
        _init_text(self, " ".join(self.src) + " = " + " ".join(self.dst))


FTerm = Union[Atom, Multiset, Embed, Limp, Opt, PathEq, Meta]

EMPTY = Multiset(())

# Precedence levels, loosest first.
_LEVEL_BAG, _LEVEL_LIMP, _LEVEL_EMBED, _LEVEL_ATOM = range(4)


def _level(term) -> int:
    if isinstance(term, Embed):
        return _LEVEL_EMBED
    if isinstance(term, Limp):
        return _LEVEL_LIMP
    if isinstance(term, PathEq) or (isinstance(term, Multiset) and len(term.elements) > 1):
        return _LEVEL_BAG
    return _LEVEL_ATOM


def _show(term, level: int) -> str:
    """Serialize ``term`` for a position that expects ``level`` or tighter."""
    if level == _LEVEL_BAG:
        # bag elements: anything but a nested bag stands bare
        if isinstance(term, Multiset) and len(term.elements) > 1:
            return "(" + term._text + ")"
        return term._text
    if _level(term) >= level:
        return term._text
    return "(" + term._text + ")"


# -- declarations ------------------------------------------------------------

@dataclass(frozen=True)
class TypeDecl:
    name: str
    contentful: bool


@dataclass(frozen=True)
class Declarations:
    """Declared resource types and attributes; ``goal`` names the sentence type."""

    types: dict = field(default_factory=dict)
    attrs: frozenset = frozenset()
    goal: str = "t"

    @classmethod
    def make(cls, contentful: Iterable[str] = ("e", "t"),
             vacuous: Iterable[str] = (), attrs: Iterable[str] = (),
             goal: str = "t") -> "Declarations":
        types = {n: TypeDecl(n, True) for n in contentful}
        for n in vacuous:
            if n in types:
                raise ValueError(f"duplicate type {n!r}")
            types[n] = TypeDecl(n, False)
        decls = cls(types, frozenset(attrs), goal)
        decls.validate()
        return decls

    def validate(self) -> None:
        clash = self.attrs & set(self.types)
        if clash:
            raise ValueError(f"names declared both as type and attribute: {sorted(clash)}")
        if self.goal not in self.types:
            raise ValueError(f"goal type {self.goal!r} is not declared")


# -- parsing ------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<limp>-o(?![\w])|⊸)
  | (?P<meta>↓)
  | (?P<ident>[^\W\d][\w]*)
  | (?P<punct>[(),?=])
""", re.VERBOSE)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise FTermSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            value = m.group()
            if kind == "punct":
                kind = value
            tokens.append((kind, value, pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, decls: Optional[Declarations], allow_meta: bool):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.decls = decls
        self.allow_meta = allow_meta

    def peek(self, k: int = 0) -> tuple[str, str, int]:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def take(self, kind: str) -> tuple[str, str, int]:
        tok = self.peek()
        if tok[0] != kind:
            found = tok[1] or "end of input"
            raise FTermSyntaxError(f"expected {kind!r}, found {found!r}", tok[2], self.text)
        self.i += 1
        return tok

    def parse(self):
        if self.peek()[0] == "end":
            raise FTermSyntaxError("empty f-term", 0, self.text)
        term = self.bag()
        tok = self.peek()
        if tok[0] != "end":
            raise FTermSyntaxError(f"unexpected {tok[1]!r}", tok[2], self.text)
        return term

    def bag(self):
        items = [self.element()]
        while self.peek()[0] == ",":
            self.i += 1
            items.append(self.element())
        return items[0] if len(items) == 1 else Multiset(tuple(items))

    def element(self):
        k = 0
        while self.peek(k)[0] == "ident":
            k += 1
        if k and self.peek(k)[0] == "=":
            return self.path_equation()
        return self.limp()

    def path_equation(self):
        src = self.path()
        self.take("=")
        dst = self.path()
        if not dst:
            tok = self.peek()
            raise FTermSyntaxError("path equation needs a right-hand path", tok[2], self.text)
        return PathEq(tuple(src), tuple(dst))

    def path(self) -> list[str]:
        attrs = []
        while self.peek()[0] == "ident":
            _, name, pos = self.take("ident")
            self.check_attr(name, pos)
            attrs.append(name)
        return attrs

    def limp(self):
        ante = self.embedded()
        if self.peek()[0] == "limp":
            self.i += 1
            return Limp(ante, self.limp())
        return ante

    def embedded(self):
        kind, value, pos = self.peek()
        if kind == "ident" and self.peek(1)[0] in ("ident", "(", "meta"):
            self.i += 1
            if self.allow_meta and value == "v":
                raise FTermSyntaxError("metavariable cannot be used as an attribute", pos, self.text)
            self.check_attr(value, pos)
            return Embed(value, self.embedded())
        return self.primary()

    def primary(self):
        kind, value, pos = self.peek()
        if kind == "meta" or (kind == "ident" and value == "v" and self.allow_meta):
            if not self.allow_meta:
                raise FTermSyntaxError("metavariable outside an annotation template", pos, self.text)
            self.i += 1
            return Meta()
        if kind == "ident":
            self.i += 1
            if self.decls is not None and value not in self.decls.types:
                raise UndeclaredIdentifier(value, "type", pos)
            return Atom(value)
        if kind == "(":
            self.i += 1
            if self.peek()[0] == ")":
                self.i += 1
                inner = EMPTY
            else:
                inner = self.bag()
                self.take(")")
            if self.peek()[0] == "?":
                self.i += 1
                return Opt(inner)
            if isinstance(inner, PathEq):
                # a bracketed path equation is still a bag element
                return Multiset((inner,))
            return inner
        found = value or "end of input"
        raise FTermSyntaxError(f"unexpected {found!r}", pos, self.text)

    def check_attr(self, name: str, pos: int) -> None:
        if self.decls is not None and name not in self.decls.attrs:
            raise UndeclaredIdentifier(name, "attribute", pos)


def parse_fterm(text: str, decls: Optional[Declarations] = None, *,
                allow_meta: bool = False) -> FTerm:
    """Parse and canonicalize ``text``.

    Precedence, loosest to tightest: ``,`` then ``-o`` (right associative)
    then attribute embedding then atoms and brackets.  With ``decls`` every
    atom must be a declared type and every attribute a declared attribute.
    ``allow_meta`` accepts the template metavariable ``v`` / ``↓``.

    >>> parse_fterm("SUBJ e -o t")
    Limp(antecedent=Embed(attr='SUBJ', body=Atom(name='e')), consequent=Atom(name='t'))
    """
    return canonicalize(_Parser(text, decls, allow_meta).parse())


# -- canonical forms ----------------------------------------------------------

def canonicalize(term: FTerm) -> FTerm:
    if isinstance(term, (Atom, Meta, PathEq)):
        return term
    if isinstance(term, Embed):
        body = canonicalize(term.body)
        if body == EMPTY:
            return EMPTY
        return term if body is term.body else Embed(term.attr, body)
    if isinstance(term, Limp):
        a, c = canonicalize(term.antecedent), canonicalize(term.consequent)
        if a is term.antecedent and c is term.consequent:
            return term
        return Limp(a, c)
    if isinstance(term, Opt):
        body = canonicalize(term.body)
        return term if body is term.body else Opt(body)
    if isinstance(term, Multiset):
        return make_bag(canonicalize(e) for e in term.elements)
    raise TypeError(f"not an f-term: {term!r}")


def make_bag(items: Iterable[FTerm]) -> FTerm:
    """Canonical bag of already-canonical ``items``."""
    flat = []
    for item in items:
        if isinstance(item, Multiset):
            flat.extend(item.elements)
        else:
            flat.append(item)
    if len(flat) == 1:
        return flat[0]
    flat.sort(key=lambda x: x.sort_key)
    return Multiset(tuple(flat))


def elements(term: FTerm) -> tuple:
    """The bag view of a term: a multiset's elements, else the term alone."""
    if isinstance(term, Multiset):
        return term.elements
    return (term,)


def equal(a: FTerm, b: FTerm) -> bool:
    """True iff ``a`` and ``b`` describe the same resource configuration.

    >>> equal(parse_fterm("A, B"), parse_fterm("B, A"))
    True
    >>> equal(parse_fterm("A"), parse_fterm("A, A"))
    False
    """
    return serialize_fterm(canonicalize(a)) == serialize_fterm(canonicalize(b))


def serialize_fterm(term: FTerm) -> str:
    if isinstance(term, Multiset) and len(term.elements) == 1:
        return term.elements[0]._text
    return term._text


# -- templates ----------------------------------------------------------------

def substitute(template: FTerm, value: FTerm) -> FTerm:
    """Replace every ``↓`` in ``template`` by ``value`` and canonicalize."""
    return canonicalize(_subst(template, value))


def _subst(term, value):
    if isinstance(term, Meta):
        return value
    if isinstance(term, Multiset):
        return Multiset(tuple(_subst(e, value) for e in term.elements))
    if isinstance(term, Embed):
        return Embed(term.attr, _subst(term.body, value))
    if isinstance(term, Limp):
        return Limp(_subst(term.antecedent, value), _subst(term.consequent, value))
    if isinstance(term, Opt):
        return Opt(_subst(term.body, value))
    return term


def contains_meta(term: FTerm) -> bool:
    return any(isinstance(t, Meta) for t in subterms(term))


def subterms(term: FTerm) -> Iterator[FTerm]:
    yield term
    if isinstance(term, Multiset):
        for e in term.elements:
            yield from subterms(e)
    elif isinstance(term, (Embed, Opt)):
        yield from subterms(term.body)
    elif isinstance(term, Limp):
        yield from subterms(term.antecedent)
        yield from subterms(term.consequent)


def size(term: FTerm) -> int:
    """Number of constructors in ``term``."""
    return sum(1 for _ in subterms(term))
