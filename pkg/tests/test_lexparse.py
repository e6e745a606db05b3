import pytest
from hypothesis import given, strategies as st

from conftest import body
from xcsp21.errors import (
    ArityMismatch, DuplicateKey, DuplicateParameter, FragmentError, InvertedInterval, LexError,
    MissingFirstCost, MixedDictStyle, UnbalancedBrace, UnbalancedBracket,
)
from xcsp21.lexparse import (
    lex_body, parse_domain_values, parse_effective_parameters, parse_formal_parameters,
    parse_param_values, parse_tuples, parse_weighted_tuples, serialize_tuples,
)
from xcsp21.model import INFINITY, NIL, Atom, ParamDict, ParamList, VarRef


def kinds(tokens):
    return [t.kind for t in tokens]


def test_lex_weighted_sum_list():
    toks = lex_body("[ { 1 V0 } ]")
    assert kinds(toks) == ["LBracket", "LBrace", "Integer", "Identifier", "RBrace", "RBracket"]
    assert toks[2].value == 1 and toks[3].value == "V0"


def test_lex_atom_element():
    toks = lex_body(body("12<gt/>"))
    assert kinds(toks) == ["Integer", "Atom"] and toks[1].value == "gt"


def test_lex_dangling_interval():
    with pytest.raises(LexError):
        lex_body("1..")


def test_lex_offsets_are_absolute():
    toks = lex_body("  12  V3")
    assert [t.offset for t in toks] == [2, 6]


@pytest.mark.parametrize("text, values", [
    ("1 5 10", [1, 5, 10]),
    ("1..3 7 10..14", [1, 2, 3, 7, 10, 11, 12, 13, 14]),
    ("4..4", [4]),
    ("-2..1", [-2, -1, 0, 1]),
])
def test_domain_values(text, values):
    assert parse_domain_values(text)[1] == values


def test_domain_raw_pieces_kept():
    assert parse_domain_values("1..3 7")[0] == [(1, 3), 7]


def test_inverted_interval():
    with pytest.raises(InvertedInterval):
        parse_domain_values("5..3")


def test_tagged_interval_matches_abridged():
    assert parse_domain_values(body('<interval min="10" max="13"/>'))[1] == parse_domain_values("10..13")[1]


def test_tuples():
    assert len(parse_tuples("0 1|0 3|1 2|1 3|2 0|2 1|3 1", 2)) == 7
    assert parse_tuples("0 0 1|0 2 1|1 0 1|1 2 0|2 1 1|2 2 2", 3)[5] == (2, 2, 2)
    assert parse_tuples("5 3", 2) == [(5, 3)]
    assert parse_tuples("", 2) == []


def test_tuple_arity_mismatch():
    with pytest.raises(ArityMismatch) as err:
        parse_tuples("0 1 2|3", 3)
    assert err.value.offset == 6


def test_tagged_tuples():
    assert parse_tuples(body("<tuple> <i>2</i> <i>5</i> <i>8</i> </tuple>"), 3) == [(2, 5, 8)]


def test_weighted_tuples_implicit_and_explicit_agree():
    implicit = parse_weighted_tuples("1:0 1|0 3|10:1 2|1 3|2 0|2 1|1:3 1", 2)
    explicit = parse_weighted_tuples("1:0 1|1:0 3|10:1 2|10:1 3|10:2 0|10:2 1|1:3 1", 2)
    assert [c for c, _ in implicit] == [1, 1, 10, 10, 10, 10, 1]
    assert implicit == explicit


def test_weighted_tuples_need_a_first_cost():
    with pytest.raises(MissingFirstCost):
        parse_weighted_tuples("0 1|1 2", 2)


def test_weighted_tuples_wcsp_relation():
    pairs = parse_weighted_tuples("5:0 0|0 1|1 0|1 1|1 2|2 1|2 2|2 3|3 2|3 3", 2)
    assert len(pairs) == 10 and {c for c, _ in pairs} == {5}


def test_weighted_infinity_and_tagged_weight():
    assert parse_weighted_tuples(body("<infinity/>:0|1"), 1) == [(INFINITY, (0,)), (INFINITY, (1,))]
    tagged = body('<weight value="10"><tuple><i>1</i><i>2</i></tuple><tuple><i>1</i><i>3</i></tuple></weight>')
    assert parse_weighted_tuples(tagged, 2) == [(10, (1, 2)), (10, (1, 3))]


def test_formal_parameters():
    assert parse_formal_parameters("int X int Y int Z") == [("int", "X"), ("int", "Y"), ("int", "Z")]
    assert parse_formal_parameters("") == []
    with pytest.raises(DuplicateParameter):
        parse_formal_parameters("int X int X")


def test_effective_parameters():
    assert parse_effective_parameters("V0 V1 1") == [VarRef("V0"), VarRef("V1"), 1]
    assert parse_effective_parameters("V1 2 V2 V3") == [VarRef("V1"), 2, VarRef("V2"), VarRef("V3")]
    with pytest.raises(LexError):
        parse_effective_parameters("[1]")


def test_param_values_weighted_sum():
    values = parse_param_values(body("[ { 1 V0 } { 2 V1 } { -3 V2 } ] <gt/> 12"))
    assert len(values) == 3
    terms, op, bound = values
    assert isinstance(terms, ParamList) and len(terms) == 3
    assert all(isinstance(d, ParamDict) and d.positional for d in terms)
    assert op == Atom("gt") and bound == 12


def test_param_values_dicts():
    (keyed,) = parse_param_values("{/origin X2 /duration 10 /height 1}")
    assert not keyed.positional and keyed["duration"] == 10 and keyed["origin"] == VarRef("X2")
    (pos,) = parse_param_values(body("{X2 10 <nil/> 1}"))
    assert pos.positional and list(pos.values()) == [VarRef("X2"), 10, NIL, 1]
    assert parse_param_values("{/x 2 /y 5}") == parse_param_values("{/y 5 /x 2}")


@pytest.mark.parametrize("text, error", [
    ("{/x 2 3}", MixedDictStyle),
    ("{/x 2 /x 3}", DuplicateKey),
    ("{1 2", UnbalancedBrace),
    ("[1 2", UnbalancedBracket),
])
def test_param_value_errors(text, error):
    with pytest.raises(error):
        parse_param_values(text)


# -- properties --------------------------------------------------------------------

tuple_lists = st.integers(1, 4).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.tuples(*[st.integers(-50, 50)] * n), max_size=12)))


@given(tuple_lists)
def test_tuple_round_trip(case):
    arity, tuples = case
    assert parse_tuples(serialize_tuples(tuples), arity) == tuples


@given(st.lists(st.tuples(st.integers(0, 3), st.tuples(st.integers(0, 9), st.integers(0, 9))), min_size=1, max_size=15))
def test_weighted_compression_is_equivalent(pairs):
    explicit = "|".join(f"{c}:{a} {b}" for c, (a, b) in pairs)
    parts, last = [], None
    for c, (a, b) in pairs:
        parts.append(f"{a} {b}" if c == last else f"{c}:{a} {b}")
        last = c
    compressed = "|".join(parts)
    assert parse_weighted_tuples(compressed, 2) == parse_weighted_tuples(explicit, 2) == pairs


@given(st.text(alphabet="0123456789 .|:[]{}/-abV<>", max_size=30), st.integers(1, 3))
def test_error_offsets_lie_within_input(text, arity):
    for parse in (lambda s: parse_tuples(s, arity), parse_domain_values, parse_param_values,
                  lambda s: parse_weighted_tuples(s, arity)):
        try:
            parse(text)
        except FragmentError as exc:
            assert exc.offset is not None and 0 <= exc.offset <= len(text)
