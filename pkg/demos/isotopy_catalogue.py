"""
Latin squares up to isotopy
===========================

Enumerate reduced Latin squares, pick a canonical form per isotopy class and
write the catalogue used to seed the plane search.
"""
import random

from planes.designs import LatinSquare
from planes.isotopy import canonical_form, enumerate_reduced, intercalate_count, isotopy_classes

for m in range(2, 7):
    cat = isotopy_classes(m)
    print(f"order {m}: {len(cat)} isotopy classes")

cat = isotopy_classes(5)
for label in cat.labels:
    sq = cat[label]
    print(f"class {label} (intercalates {intercalate_count(sq)})")
    for row in sq.grid:
        print(" ", *row)

# a random isotope lands on the same representative
rng = random.Random(0)
sq = next(iter(enumerate_reduced(5)))
rows, cols, syms = (rng.sample(range(5), 5) for _ in range(3))
iso = LatinSquare.from_rows([[syms[sq.grid[r][c]] for c in cols] for r in rows])
print("canonical forms agree:", canonical_form(iso) == canonical_form(sq))

# the text form is what `planes isotopy --order 5` prints
print(cat.text())
