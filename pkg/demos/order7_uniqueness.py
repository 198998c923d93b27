"""
The plane of order 7 is unique
==============================

Searches all 22 seeds of order 7. Most are refuted by a single LP, two more
after one round of branching, and the last one completes, always to the
Desarguesian plane. Takes around ten minutes on one core; set PLANES_JOBS to
use more processes.
"""
from planes.canon import fingerprint_affine
from planes.designs import prime_plane
from planes.isotopy import isotopy_classes
from planes.search import default_jobs, prove_order

proof = prove_order(7, isotopy_classes(6), jobs=default_jobs())
print("verdict:", proof.verdict)
for c in proof.classes:
    counts = c.counts()
    print(f"class {c.label:2d}: root {c.root.kind:7s} |D| = {c.root.d_size:3d} "
          f"nodes {counts['nodes']} completions {counts['completion']} depth {counts['max_depth']}")

target = fingerprint_affine(prime_plane(7))
for fp, occ in proof.completions().items():
    print(f"fingerprint {fp[:16]}: {len(occ)} completions, prime plane: {fp == target}")
