"""Costs in a weighted instance: bounded addition, per-constraint costs, the optimum."""

import itertools

from xcsp21 import fixtures, load, check_solution, solve_bruteforce
from xcsp21.model import oplus
from xcsp21.semantics import cost_constraint

inst = load(fixtures.read("wcsp-example"))
k = inst.k
print("maximal cost", k)

print(oplus(3, 4, k), oplus(1, 2, k))  # saturates at k

a = {"V0": 0, "V1": 0, "V2": 0, "V3": 0}
for c in inst.constraints:
    print(c.name, c.reference, cost_constraint(inst, c, a))
print(check_solution(inst, a))

best, where = solve_bruteforce(inst, "min-cost")
print("optimum", best, where)

# spread of total costs over the whole 3^4 space
totals = [check_solution(inst, dict(zip("V0 V1 V2 V3".split(), v))).total_cost
          for v in itertools.product(range(3), repeat=4)]
print({c: totals.count(c) for c in sorted(set(totals))})
