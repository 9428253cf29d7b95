import doctest

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

import rlfg.classical as classical
from rlfg.classical import (
    And, Const, Equation, FDescriptionSyntaxError, FStructure, Or, Path, dnf,
    equations, parse_fdescription, satisfies, set_partitions, solve,
    solve_conjunct, solve_relaxed, verify_constraints,
)
from rlfg.oracle import StructureSpace, enumerate_structures, subsumes
from strategies import descriptions
from strategies import equations as equation_strategy

SANDY = "(f1 SUBJ)=f2 & (f2 PRED)=Sandy & (f2 NUM)=SG & f1=f3 & (f3 PRED)=snore & (f3 SUBJ NUM)=SG"
SANDY_C = SANDY.replace("NUM)=SG", "NUM)=c SG").replace("(f2 NUM)=c SG", "(f2 NUM)=SG")
PROFESSORS = ("(f1 SUBJ)=f2 & (f2 PRED)=professor & (f2 NUM)=PL & f1=f3 & (f3 PRED)=snore"
              " & (f3 SUBJ NUM)=SG")
FIG_CF1 = {"PRED": "snore", "SUBJ": {"NUM": "SG", "PRED": "Sandy"}}


def conj(text):
    return list(equations(parse_fdescription(text)))


def test_doctests():
    assert doctest.testmod(classical).failed == 0


def test_parse_shapes():
    d = parse_fdescription("(f1 A)=x & ((f1 B)=c y | g=(f1 A))")
    assert isinstance(d, And) and isinstance(d.items[1], Or)
    eq = d.items[1].items[0]
    assert eq == Equation(Path("f1", ("B",)), Const("y"), True)
    assert str(d) == "(f1 A)=x & ((f1 B)=c y | g=(f1 A))"


def test_parse_templates():
    d = parse_fdescription("(^ SUBJ)=v; (↑ NUM)=SG;", template=True)
    assert [str(e) for e in equations(d)] == ["(^ SUBJ)=v", "(^ NUM)=SG"]


def test_hyphenated_names():
    eq = conj("(f HISTORICAL-ORIGIN)=ROMANCE")[0]
    assert eq.lhs.attrs == ("HISTORICAL-ORIGIN",)


@pytest.mark.parametrize("text", ["(f1 A", "(f1 A)=", "x=(f1 A)", "(f1 A) x", "(f1 A)=x &&", "(f1 A)=x)"])
def test_parse_errors(text):
    with pytest.raises(FDescriptionSyntaxError):
        parse_fdescription(text)


def test_empty_description_is_true():
    assert parse_fdescription("") == And(())
    assert dnf(And(())) == [[]]


def test_dnf_distributes():
    a, b, c = conj("(f A)=p & (f B)=q & (f C)=r")
    assert dnf(And((a, Or((b, c))))) == [[a, b], [a, c]]
    assert dnf(And((a, b))) == [[a, b]]


def test_dnf_product():
    d = parse_fdescription("((f A)=a | (f A)=b) & ((f B)=a | (f B)=b)")
    assert len(dnf(d)) == 4
    space = StructureSpace(("f",), ("A", "B"), ("a", "b"), 1)
    flat = Or(tuple(And(tuple(c)) for c in dnf(d)))
    assert space.mask(d) == space.mask(flat) != 0


def test_sandy_snores():
    [fs] = solve(parse_fdescription(SANDY))
    assert fs.to_dict() == FIG_CF1


def test_professors_snores_clashes():
    assert solve_conjunct(conj(PROFESSORS)) is None
    assert solve(parse_fdescription(PROFESSORS)) == []


def test_case_clash():
    assert solve_conjunct(conj("(f CASE)=ACC & (f CASE)=DAT")) is None


def test_constant_has_no_attributes():
    assert solve_conjunct(conj("(f A)=x & (f A B)=y")) is None


def test_cycles_are_allowed():
    [fs] = solve(parse_fdescription("(f1 A)=f1 & (f1 B)=x"))
    assert fs.to_dict() == {"A": {"$cycle": 0}, "B": "x"}


def test_constraints_checked_against_the_model():
    model = solve_conjunct(conj(SANDY_C))
    assert verify_constraints(model, conj("(f1 SUBJ NUM)=c SG"))
    assert not verify_constraints(model, conj("(f1 SUBJ NUM)=c PL"))
    assert not verify_constraints(model, conj("(f1 CASE)=c ACC"))
    assert verify_constraints(model, [])


def test_constraints_do_not_build():
    assert solve(parse_fdescription("(f CASE)=c ACC")) == []
    assert len(solve(parse_fdescription("(f CASE)=ACC & (f CASE)=c ACC"))) == 1


def test_constraining_variant_gives_the_same_structure():
    assert solve(parse_fdescription(SANDY_C)) == solve(parse_fdescription(SANDY))


def test_solve_pools_conjuncts():
    sols = solve(parse_fdescription("(f A)=x | (f A)=y | (f A)=x"))
    assert [s.to_dict() for s in sols] == [{"A": "x"}, {"A": "y"}]


def test_relaxed_constraining_sandy():
    candidates = solve_relaxed(parse_fdescription(SANDY_C))
    split = [c for c in candidates if isinstance(c.display.get("SUBJ"), list)]
    assert split and all(not c.ok for c in split)
    assert {"NUM": "SG", "PRED": "Sandy"} in split[0].display["SUBJ"]
    assert {"NUM": "=c SG"} in split[0].display["SUBJ"]
    assert split[0].failed == ["(f3 SUBJ NUM)=c SG"]
    assert any(c.ok and c.display == FIG_CF1 for c in candidates)


def test_relaxed_without_repeats_matches_solve():
    d = parse_fdescription("(f A)=x & (f B C)=y & (g D)=f")
    [only] = solve_relaxed(d)
    assert only.ok and [only.structure] == solve(d)


def test_relaxed_professors_snores():
    candidates = solve_relaxed(parse_fdescription(PROFESSORS))
    assert any(c.ok for c in candidates)
    for c in candidates:
        if c.ok:
            subj = c.display["SUBJ"]
            assert isinstance(subj, list) or isinstance(subj["NUM"], list)


def test_relaxed_case():
    [c] = solve_relaxed(parse_fdescription("(f CASE)=ACC & (f CASE)=DAT"))
    assert c.ok and c.display == {"CASE": ["ACC", "DAT"]}


def test_set_partitions():
    parts = list(set_partitions("abc"))
    assert len(parts) == 5
    assert parts[0] == [["a", "b", "c"]]


def test_structure_json_lists_and_identity():
    a = FStructure({0: {"A": 1}}, {1: "x"}, {"f": 0})
    b = FStructure({5: {"A": 7}}, {7: "x"}, {"f": 5})
    assert a == b and hash(a) == hash(b)
    assert str(a) == '{"A": "x"}'


SPACE = StructureSpace(("f", "g"), ("A", "B"), ("x", "y"), 2)


@given(descriptions())
def test_dnf_preserves_meaning(d):
    flat = Or(tuple(And(tuple(c)) for c in dnf(d)))
    assert SPACE.mask(d) == SPACE.mask(flat)


@given(descriptions())
def test_solutions_satisfy(d):
    for fs in solve(d):
        assert satisfies(fs, Or(tuple(And(tuple(c)) for c in dnf(d))))


small_conjuncts = st.lists(
    equation_strategy(variables=("f", "g"), attrs=("A", "B", "C"), consts=("x", "y", "z")),
    min_size=1, max_size=8)


@given(small_conjuncts)
def test_minimal_model(eqs):
    model = solve_conjunct(eqs)
    assume(model is not None)
    found = enumerate_structures(eqs, 4)
    assert all(subsumes(model, other) for other in found)
    if len(model.nodes() - set(model.consts)) <= 4:
        assert model in found
    for eq in eqs:
        assert satisfies(model, eq)


@given(small_conjuncts)
def test_inconsistent_means_no_structures(eqs):
    if solve_conjunct(eqs) is None:
        assert enumerate_structures(eqs, 4) == []
