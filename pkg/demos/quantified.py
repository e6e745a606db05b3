"""Quantified instances: a game between exists and forall blocks."""

from xcsp21 import fixtures, load, eval_qcsp

q = load(fixtures.read("qcsp-example"))
for b in q.quantification:
    print(b.quantifier, b.scope)
print("QCSP:", eval_qcsp(q))

# restricted quantification: each block carries its own gate
qp = load(fixtures.read("qcsp-plus-example"))
for b in qp.quantification:
    print(b.quantifier, b.scope, [c.name for c in b.restrictions])
print("QCSP+:", eval_qcsp(qp))

# W=4, X=1 is the only pair through the first gate; Y=2 then needs Z=3, which W-Y>Z forbids
d = range(1, 5)
print([(w, x) for w in d for x in d if w + x < 8 and w - x > 2])
