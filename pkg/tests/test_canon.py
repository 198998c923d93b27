import random

import pytest

from planes.canon import canonical_incidence, completion_invariant, fingerprint_affine
from planes.designs import (AffinePlane, PlaneCode, ProjectivePlane, affine_to_code, code_to_affine,
                            prime_plane)


def relabel(plane, rng):
    p = ProjectivePlane(plane)
    perm = list(range(p.num_points))
    rng.shuffle(perm)
    lines = [[perm[x] for x in line] for line in p.lines()]
    rng.shuffle(lines)
    return p.num_points, lines


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_invariant_under_relabelling(p):
    rng = random.Random(p)
    plane = prime_plane(p)
    base = canonical_incidence(*relabel(plane, random.Random(0)))
    for _ in range(3):
        assert canonical_incidence(*relabel(plane, rng)) == base


def test_class_order_does_not_matter():
    plane = prime_plane(7)
    shuffled = AffinePlane(7, tuple(reversed(plane.classes)))
    assert fingerprint_affine(shuffled) == fingerprint_affine(plane)
    code = affine_to_code(plane)
    code2 = affine_to_code(AffinePlane(7, plane.classes[2:] + plane.classes[:2]))
    assert completion_invariant(code) == completion_invariant(code2) == fingerprint_affine(plane)


def test_distinguishes():
    assert fingerprint_affine(prime_plane(5)) != fingerprint_affine(prime_plane(7))
    # same degrees, different graphs: two triangles versus a hexagon
    a = canonical_incidence(6, [[0, 1], [1, 2], [2, 0], [3, 4], [4, 5], [5, 3]])
    b = canonical_incidence(6, [[0, 1], [1, 2], [2, 3], [3, 4], [4, 5], [5, 0]])
    assert a != b
    # points versus lines are not interchangeable
    assert canonical_incidence(3, [[0, 1, 2]]) != canonical_incidence(1, [[0], [0], [0]])


def test_random_graphs_relabel():
    rng = random.Random(11)
    for _ in range(20):
        npts, nlines = rng.randint(3, 9), rng.randint(2, 9)
        lines = [rng.sample(range(npts), rng.randint(1, npts)) for _ in range(nlines)]
        perm = list(range(npts))
        rng.shuffle(perm)
        moved = [[perm[x] for x in line] for line in lines]
        rng.shuffle(moved)
        assert canonical_incidence(npts, lines) == canonical_incidence(npts, moved)


def test_invalid_code_rejected():
    code = affine_to_code(prime_plane(3))
    with pytest.raises(ValueError):
        completion_invariant(PlaneCode(3, code.vectors[:-1]))
    assert code_to_affine(code)
