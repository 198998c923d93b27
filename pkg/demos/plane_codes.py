"""
Affine planes, MOLS and plane codes
===================================

Build the prime plane of order 5, move it between its three encodings and
check the pair property that drives the witness LP.
"""
from collections import Counter
from itertools import combinations

from planes.designs import (affine_to_code, affine_to_mols, code_to_affine, prime_plane, validate_affine,
                            validate_code, validate_mols)

plane = prime_plane(5)
print("affine plane valid:", bool(validate_affine(plane)), "lines:", len(plane.lines()))

# the 4 non-trivial parallel classes give a complete set of MOLS
mols = affine_to_mols(plane)
print("MOLS:", len(mols.squares), "valid:", bool(validate_mols(mols)))
for row in mols.squares[0].grid:
    print(" ", *row)

# one vector per point, one coordinate per non-trivial parallel class
code = affine_to_code(plane)
print("code size:", len(code), "valid:", bool(validate_code(code, complete=True)))

# every coordinate pair sees each ordered value pair exactly once
for i, j in combinations(range(5), 2):
    counts = Counter((b[i], b[j]) for b in code.vectors)
    assert len(counts) == 25 and set(counts.values()) == {1}
print("pair property holds on all", len(list(combinations(range(5), 2))), "coordinate pairs")

back = code_to_affine(code)
print("round trip valid:", bool(validate_affine(back)))
