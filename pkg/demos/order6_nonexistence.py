"""
No projective plane of order 6
==============================

Search both seeds of order 6, write a proof bundle, check it with the
LP-free verifier and watch a corrupted copy fail.
"""
import tempfile
from pathlib import Path

from planes.certify import MUTATIONS, mutate_bundle, verify_bundle
from planes.isotopy import isotopy_classes
from planes.search import prove_order, write_bundle

proof = prove_order(6, isotopy_classes(5))
print("verdict:", proof.verdict, "certificates:", proof.certificates())
for c in proof.classes:
    print(f"class {c.label}: root {c.root.kind}, |D| = {c.root.d_size}, children {len(c.root.children)}")

# a certificate is a table of rational pair weights per coordinate pair
cert = next(node.certificate for c in proof.classes for node in c.root.walk() if node.kind == "witness")
(i, j), table = next(iter(sorted(cert.witness.tables.items())))
print(f"|B0| = {len(cert.b0)}, {len(cert.witness.tables)} pair tables; table ({i},{j}):")
for row in table:
    print(" ", *(str(x).rjust(6) for x in row))

with tempfile.TemporaryDirectory() as tmp:
    bundle = write_bundle(proof, Path(tmp) / "run6")
    report = verify_bundle(bundle)
    print("\n".join(report.lines()))
    for name in MUTATIONS:
        bad = verify_bundle(mutate_bundle(bundle, Path(tmp) / name, name))
        print(f"{name}: {'rejected' if not bad else 'ACCEPTED'} {bad.failure}")
