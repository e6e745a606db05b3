import itertools
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import body
from randgen import random_csp, random_wcsp
from xcsp21 import fixtures
from xcsp21.document import load
from xcsp21.errors import (
    BudgetExceeded, DomainViolation, InconsistentTask, NotApplicable, PartialAssignment,
    UnboundVariable, UnknownName, UnsupportedGlobal,
)
from xcsp21.lexparse import parse_param_values
from xcsp21.model import INFINITY, oplus
from xcsp21.semantics import (
    check_constraint, check_solution, cost_constraint, eval_global, eval_qcsp, solve_bruteforce,
)


def params(xml):
    return parse_param_values(body(xml))


def assign(**values):
    return values


def test_check_constraint_extension(queens):
    c0 = queens.resolve("C0")
    assert check_constraint(queens, c0, assign(V0=1, V1=3))
    assert not check_constraint(queens, c0, assign(V0=1, V1=1))
    with pytest.raises(UnboundVariable):
        check_constraint(queens, c0, assign(V0=1))


def test_check_constraint_intension(queens_int):
    c0 = queens_int.resolve("C0")
    assert [str(p) for p in c0.parameters] == ["V0", "V1", "1"]
    assert check_constraint(queens_int, c0, assign(V0=2, V1=4))


def test_all_different():
    p = params("[ V0 V1 V2 V3 ]")
    assert eval_global("allDifferent", p, assign(V0=1, V1=2, V2=3, V3=4))
    assert not eval_global("alldifferent", p, assign(V0=1, V1=2, V2=2, V3=4))
    assert not eval_global("allDifferent", params("[ V0 3 ]"), assign(V0=3))


def test_weighted_sum():
    p = params("[ { 1 V0 } { 2 V1 } { -3 V2 } ] <gt/> 12")
    assert eval_global("weightedSum", p, assign(V0=7, V1=6, V2=1))
    assert not eval_global("weightedSum", p, assign(V0=7, V1=6, V2=3))


def test_element_is_one_based():
    p = params("I [ 4 7 9 ] V")
    assert eval_global("element", p, assign(I=2, V=7))
    assert not eval_global("element", p, assign(I=1, V=7))
    assert not eval_global("element", p, assign(I=0, V=4))
    assert not eval_global("element", p, assign(I=4, V=9))


def test_cumulative():
    p = params("[ {/origin A /duration 2 /height 2} {/origin B /duration 2 /height 2} ] L")
    assert not eval_global("cumulative", p, assign(A=0, B=1, L=3))
    assert eval_global("cumulative", p, assign(A=0, B=1, L=4))
    # half-open tasks: one ending at 2 and one starting at 2 never overlap
    assert eval_global("cumulative", p, assign(A=0, B=2, L=2))


def test_cumulative_derives_the_missing_attribute():
    p = params("[ {/origin A /end 3 /height 1} {1 2 <nil/> 1} ] 1")
    assert not eval_global("cumulative", p, assign(A=0))
    assert eval_global("cumulative", p, assign(A=3))
    bad = params("[ {/origin 0 /duration 2 /end 5 /height 1} ] 1")
    with pytest.raises(InconsistentTask):
        eval_global("cumulative", bad, {})


def test_unsupported_global():
    with pytest.raises(UnsupportedGlobal):
        eval_global("nvalue", params("[ V0 ] 1"), assign(V0=1))


def test_magic_square_row(magic):
    assert check_constraint(magic, magic.resolve("C0"), assign(X0=5, X1=9, X2=1))
    assert not check_constraint(magic, magic.resolve("C0"), assign(X0=5, X1=9, X2=2))


def test_wcsp_costs(wcsp):
    c0, c1 = wcsp.resolve("C0"), wcsp.resolve("C1")
    assert cost_constraint(wcsp, c0, assign(V0=0, V1=0)) == 5
    assert cost_constraint(wcsp, c0, assign(V0=0, V1=2)) == 0
    assert cost_constraint(wcsp, c1, assign(V0=1, V2=1)) == 0
    assert cost_constraint(wcsp, c1, assign(V0=1, V2=2)) == 5


def test_hard_constraint_costs(queens):
    c0 = queens.resolve("C0")
    assert cost_constraint(queens, c0, assign(V0=1, V1=3)) == 0
    assert cost_constraint(queens, c0, assign(V0=1, V1=1)) == INFINITY


def test_soft_constraint_is_not_a_boolean(wcsp):
    with pytest.raises(NotApplicable):
        check_constraint(wcsp, wcsp.resolve("C0"), assign(V0=0, V1=0))


def test_check_solution(queens):
    assert check_solution(queens, assign(V0=2, V1=4, V2=1, V3=3)).satisfied
    report = check_solution(queens, assign(V0=1, V1=1, V2=1, V3=1))
    assert not report.satisfied and "C0" in report.violated
    with pytest.raises(DomainViolation):
        check_solution(queens, assign(V0=9, V1=4, V2=1, V3=3))
    with pytest.raises(PartialAssignment):
        check_solution(queens, assign(V0=2))
    with pytest.raises(UnknownName):
        check_solution(queens, assign(V0=2, V1=4, V2=1, V3=3, Q=1))


def test_check_solution_wcsp(wcsp):
    report = check_solution(wcsp, assign(V0=0, V1=0, V2=0, V3=0))
    assert report.total_cost == 5 and not report.consistent and report.violated == ("C0",)


def test_saturation():
    assert oplus(3, 4, 5) == 5
    assert oplus(3, 1, 5) == 4


def test_solve_modes(queens):
    assert solve_bruteforce(queens, "count") == 2
    first = solve_bruteforce(queens, "first")
    assert first == [dict(V0=2, V1=4, V2=1, V3=3)]
    assert solve_bruteforce(queens, "all")[1] == dict(V0=3, V1=1, V2=4, V3=2)
    with pytest.raises(ValueError):
        solve_bruteforce(queens, "best")


def test_unsatisfiable_toy():
    doc = """<instance><presentation format="XCSP 2.1"/>
      <domains nbDomains="1"><domain name="D" nbValues="2">0 1</domain></domains>
      <variables nbVariables="1"><variable name="V" domain="D"/></variables>
      <relations nbRelations="1"><relation name="R" arity="1" nbTuples="2" semantics="conflicts">0|1</relation></relations>
      <constraints nbConstraints="1"><constraint name="C" arity="1" scope="V" reference="R"/></constraints>
    </instance>"""
    instance = load(doc)
    assert solve_bruteforce(instance, "first") == []
    assert solve_bruteforce(instance, "count") == 0
    assert solve_bruteforce(instance, "min-cost") == (None, None)


def test_budget(magic):
    with pytest.raises(BudgetExceeded) as err:
        solve_bruteforce(magic, "all", limit=50)
    assert err.value.nodes <= 50


def test_wcsp_minimum_by_sweep(wcsp):
    names = [v.name for v in wcsp.variables]
    totals = []
    for values in itertools.product(range(3), repeat=4):
        a = dict(zip(names, values))
        totals.append(check_solution(wcsp, a).total_cost)
    best, where = solve_bruteforce(wcsp, "min-cost")
    assert best == min(totals) and check_solution(wcsp, where).total_cost == best


# -- quantified instances --------------------------------------------------------------

def test_qcsp_true():
    assert eval_qcsp(load(fixtures.read("qcsp-example"))) is True


def _qcsp_plus_oracle():
    d = range(1, 5)
    return any(
        w + x < 8 and w - x > 2 and all(
            any(w - y > z and w + x == y + z for z in d)
            for y in d if w != y and x != y)
        for w in d for x in d)


def test_qcsp_plus_matches_hand_oracle():
    assert eval_qcsp(load(fixtures.read("qcsp-plus-example"))) == _qcsp_plus_oracle()


def test_qcsp_without_constraints_is_true():
    doc = """<instance><presentation format="XCSP 2.1" type="QCSP"/>
      <domains nbDomains="1"><domain name="D" nbValues="2">0 1</domain></domains>
      <variables nbVariables="1"><variable name="V" domain="D"/></variables>
      <constraints nbConstraints="0"/>
      <quantification nbBlocks="1"><block quantifier="exists" scope="V"/></quantification>
    </instance>"""
    assert eval_qcsp(load(doc)) is True


def test_qcsp_is_not_a_csp():
    with pytest.raises(NotApplicable):
        check_solution(load(fixtures.read("qcsp-example")), assign(W=1, X=1, Y=1, Z=1))


# -- Test instance: extension vs intension -------------------------------------------------

def test_test_instance_extension_matches_patched_intension():
    ext = load(fixtures.read("test-extension"))
    doc = fixtures.read("test-intension").decode().replace("abs(sub(X3,X4))", "abs(sub(X2,X3))")
    patched = load(doc)
    assert solve_bruteforce(ext, "all") == solve_bruteforce(patched, "all")


# -- properties ----------------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(0, 10 ** 6))
def test_check_solution_agrees_with_each_constraint(seed, pick):
    generated = random_csp(seed, max_space=2000)
    instance = load(generated.xml)
    rng = random.Random(pick)
    a = {n: rng.choice(d) for n, d in zip(generated.names, generated.domains)}
    report = check_solution(instance, a)
    assert report.satisfied == all(check_constraint(instance, c, a) for c in instance.constraints)
    assert report.satisfied == all(ok(a) for ok in generated.checks)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_count_matches_filter_oracle(seed):
    generated = random_csp(seed, max_space=3000)
    assert solve_bruteforce(load(generated.xml), "count") == generated.count()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(0, 10 ** 6))
def test_min_cost_is_a_lower_bound(seed, pick):
    generated = random_wcsp(seed, max_space=1000)
    instance = load(generated.xml)
    best, where = solve_bruteforce(instance, "min-cost")
    rng = random.Random(pick)
    samples = [{n: rng.choice(d) for n, d in zip(generated.names, generated.domains)} for _ in range(20)]
    for a in samples:
        cost = generated.total_cost(a)
        if best is None:
            assert cost >= generated.k
        else:
            assert best <= cost
    if best is not None:
        assert generated.total_cost(where) == best < generated.k


def _ws(coefs, op, rhs):
    terms = " ".join(f"{{ {c} V{i} }}" for i, c in enumerate(coefs))
    return params(f"[ {terms} ] <{op}/> {rhs}")


FLIP = {"lt": "gt", "le": "ge", "gt": "lt", "ge": "le", "eq": "eq", "ne": "ne"}


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=4), st.sampled_from(sorted(FLIP)),
       st.integers(-10, 10), st.integers(1, 4), st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_weighted_sum_identities(coefs, op, rhs, factor, values):
    a = {f"V{i}": v for i, v in enumerate(values)}
    base = eval_global("weightedSum", _ws(coefs, op, rhs), a)
    scaled = eval_global("weightedSum", _ws([c * factor for c in coefs], op, rhs * factor), a)
    negated = eval_global("weightedSum", _ws([-c for c in coefs], FLIP[op], -rhs), a)
    direct = {"lt": int.__lt__, "le": int.__le__, "gt": int.__gt__, "ge": int.__ge__,
              "eq": int.__eq__, "ne": int.__ne__}[op](sum(c * v for c, v in zip(coefs, values)), rhs)
    assert base == scaled == negated == direct


def test_infinity_absorbs():
    for k in (3, math.inf):
        assert oplus(INFINITY, 2, k) == k
