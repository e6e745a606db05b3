"""Strict competition checks on the shipped reference instances."""

from xcsp21 import fixtures, load, validate_competition, validate_structure

for name in fixtures.NAMES:
    inst = load(fixtures.read(name))
    structure = validate_structure(inst)
    strict = validate_competition(inst)
    print(f"{name:20} structure={'ok' if structure.passed else 'FAIL'} "
          f"competition={'ok' if strict.passed else 'FAIL'} {sorted(strict.codes())}")

print(validate_competition(load(fixtures.read("wcsp-example"))).to_text())
