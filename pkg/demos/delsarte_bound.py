"""
The Delsarte bound for plane codes
==================================

The function f(v) = n^2 c (c - 1), with c the number of zero coordinates of v,
is nonpositive off the forbidden set and has a nonnegative Fourier transform.
It caps a plane code of order n at n^2 vectors.
"""
from itertools import product

from planes.delsarte import FunctionTable, delsarte_table, lp_bound, verify_delsarte_witness

for n in range(2, 8):
    rep = verify_delsarte_witness(n)
    print(f"n={n} bound={rep.bound} f(0)={rep.value_at_identity} constant={rep.constant_term} "
          f"brute_force={'yes' if rep.brute_force_checked else 'no'}")

# the report lines are what `planes bound --order 4` prints
print("\n".join(verify_delsarte_witness(4).lines()))

# the same bound through the generic LP-bound routine
print(lp_bound(delsarte_table(6)))

# a general table: the constant function with everything forbidden gives bound 1
ones = FunctionTable(3, {v: 1 for v in product(range(3), repeat=3)})
print(lp_bound(ones, forbidden=lambda v: True))
