"""4-queens written in extension and in intension: same solutions, two encodings."""

from xcsp21 import fixtures, load, solve_bruteforce, write_instance, Notation
from xcsp21.expr import evaluate, to_functional

ext = load(fixtures.read("queens-extension"))
intn = load(fixtures.read("queens-intension"))

print(len(ext.variables), "variables,", len(ext.constraints), "constraints")
for r in ext.relations:
    print(r.name, r.semantics.value, r.nb_tuples, "tuples")

# the predicate carries the distance Z as its third argument
(p0,) = intn.predicates
print(p0.name, p0.params, to_functional(p0.body))

# conflicts of R0 are exactly the falsifying pairs at distance 1
x, y, z = p0.params
pairs = sorted((a, b) for a in range(1, 5) for b in range(1, 5)
               if not evaluate(p0.body, {x: a, y: b, z: 1}))
print(pairs == sorted(ext.resolve("R0").tuples))

print(solve_bruteforce(ext, "all"))
print(solve_bruteforce(intn, "all"))

# tagged notation spells every tuple out as elements
tagged = write_instance(ext, Notation.TAGGED).decode()
print(tagged[tagged.index("<relation "):][:220])
