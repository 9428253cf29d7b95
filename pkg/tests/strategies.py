"""Hypothesis strategies shared by the test modules."""

from hypothesis import strategies as st

from rlfg.classical import And, Const, Equation, Or, Path
from rlfg.fterm import Atom, Embed, Limp, Multiset, Opt, PathEq

ATOMS = ("t", "e", "NOM", "ACC")
ATTRS = ("SUBJ", "OBJ", "XCOMP")

atoms = st.sampled_from(ATOMS).map(Atom)
attr_paths = st.lists(st.sampled_from(ATTRS), min_size=1, max_size=2).map(tuple)


def _extend(children):
    return st.one_of(
        st.lists(children, min_size=0, max_size=3).map(lambda xs: Multiset(tuple(xs))),
        st.builds(Embed, st.sampled_from(ATTRS), children),
        st.builds(Limp, children, children),
        st.builds(Opt, children),
    )


# raw (non-canonical) terms, possibly with nested and singleton bags
raw_fterms = st.recursive(
    st.one_of(atoms, st.builds(PathEq, attr_paths, attr_paths)), _extend, max_leaves=8)

# bags of small terms, the shape sentence f-terms take
bags = st.lists(raw_fterms, min_size=1, max_size=4).map(lambda xs: Multiset(tuple(xs)))

VARS = ("f", "g")
FATTRS = ("A", "B")
CONSTS = ("x", "y")


def paths(variables=VARS, attrs=FATTRS, max_len=2):
    return st.builds(Path, st.sampled_from(variables),
                     st.lists(st.sampled_from(attrs), max_size=max_len).map(tuple))


def equations(variables=VARS, attrs=FATTRS, consts=CONSTS, constraining=False):
    rhs = st.one_of(st.sampled_from(consts).map(Const), paths(variables, attrs))
    return st.builds(Equation, paths(variables, attrs), rhs,
                     st.booleans() if constraining else st.just(False))


@st.composite
def descriptions(draw, max_equations=6):
    """Random and/or trees over at most ``max_equations`` equations."""
    n = draw(st.integers(1, max_equations))
    leaves = [draw(equations()) for _ in range(n)]

    def build(items):
        if len(items) == 1:
            return items[0]
        cut = draw(st.integers(1, len(items) - 1))
        op = draw(st.sampled_from((And, Or)))
        return op((build(items[:cut]), build(items[cut:])))

    return build(leaves)
