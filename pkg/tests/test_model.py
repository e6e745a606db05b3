import math

import pytest
from hypothesis import given, strategies as st

from xcsp21.errors import EmptyDomain, NegativeCost, InvertedInterval, UnknownName
from xcsp21.model import (
    INFINITY, NIL, DomainDef, InstanceType, ParamDict, Relation, Semantics, VarRef,
    format_cost, is_identifier, oplus, parse_cost, parse_count_claim, resolve,
)


def test_resolve_examples(queens):
    d0 = resolve(queens, "D0")
    assert isinstance(d0, DomainDef) and d0.values == (1, 2, 3, 4)
    r0 = resolve(queens, "R0")
    assert r0.semantics == Semantics.CONFLICTS and r0.nb_tuples == 10
    with pytest.raises(UnknownName):
        resolve(queens, "Zzz")


def test_names_are_globally_unique_after_load(queens, wcsp, magic):
    for inst in (queens, wcsp, magic):
        names = [e.name for group in (inst.domains, inst.variables, inst.relations,
                                      inst.predicates, inst.functions, inst.constraints) for e in group]
        assert len(names) == len(set(names))


def test_identifiers():
    assert is_identifier("V0") and is_identifier("_x1")
    assert not is_identifier("0V") and not is_identifier("a-b") and not is_identifier("")


def test_domain_pieces_and_membership():
    d = DomainDef("D", ((1, 3), 7, (10, 14)))
    assert d.nb_values == 9 and len(d) == 9
    assert 7 in d and 12 in d and 5 not in d and 15 not in d
    # overlapping and adjacent pieces collapse
    assert DomainDef("E", ((1, 3), 2, 4, (6, 6))).intervals == ((1, 4), (6, 6))
    with pytest.raises(EmptyDomain):
        DomainDef("F", ())
    with pytest.raises(InvertedInterval):
        DomainDef("G", ((5, 3),))


def test_relation_soft_fields_go_together():
    Relation("R", 1, Semantics.SOFT, ((0,),), (1,), 0)
    with pytest.raises(ValueError):
        Relation("R", 1, Semantics.SUPPORTS, ((0,),), (1,), 0)
    with pytest.raises(ValueError):
        Relation("R", 1, Semantics.SOFT, ((0,),), None, 0)


def test_soft_table_keeps_first_cost():
    r = Relation("R", 1, Semantics.SOFT, ((0,), (0,)), (2, 9), 0)
    assert r.table == {(0,): 2}


def test_costs():
    assert parse_cost("7") == 7 and parse_cost("infinity") == INFINITY
    assert format_cost(INFINITY) == "infinity" and format_cost(3) == "3"
    with pytest.raises(NegativeCost):
        parse_cost("-1")


def test_count_claims():
    assert parse_count_claim("at least 1") == ("at least", 1)
    assert parse_count_claim("12") == ("exact", 12)
    assert parse_count_claim("?") == ("unknown", None)
    with pytest.raises(ValueError):
        parse_count_claim("lots")


def test_instance_type_default(queens):
    assert queens.type == InstanceType.CSP
    assert not queens.type.quantified and InstanceType.QCSP_PLUS.quantified
    assert queens.k == INFINITY and queens.base_cost == 0
    assert queens.search_space() == 256


def test_dict_equality_ignores_order_origin_and_nil():
    a = ParamDict((("x", 2), ("y", 5)))
    b = ParamDict((("y", 5), ("x", 2)))
    c = ParamDict((("x", 2), ("y", 5), ("z", NIL)), positional=True)
    assert a == b == c and hash(a) == hash(b) == hash(c)
    assert a != ParamDict((("x", 2), ("y", 6)))
    assert a["x"] == 2 and "y" in a and a.get("z") is None


@given(st.permutations([("a", 1), ("b", VarRef("V")), ("c", -3), ("d", 0)]))
def test_dict_permutation_invariance(entries):
    assert ParamDict(tuple(entries)) == ParamDict((("a", 1), ("b", VarRef("V")), ("c", -3), ("d", 0)))


@given(st.integers(0, 10), st.integers(0, 10))
def test_oplus_stays_in_range(a, b):
    k = 10
    assert 0 <= oplus(min(a, k), min(b, k), k) <= k
    assert oplus(a, b, INFINITY) == a + b
    assert oplus(INFINITY, a, INFINITY) == math.inf
