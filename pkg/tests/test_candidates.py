import random
from itertools import permutations, product

import pytest

from planes.candidates import enumerate_candidates
from planes.isotopy import isotopy_classes
from planes.search import seed_b0
from planes.znn import count_coincidences, is_permutation


def brute(b0, pool):
    members = set(b0)
    return sorted(v for v in pool if v not in members and all(count_coincidences(v, w) <= 1 for w in b0))


def extend_randomly(b0, n, rng, steps):
    b0 = list(b0)
    for _ in range(steps):
        d = enumerate_candidates(b0, n)
        if not d:
            break
        b0.append(rng.choice(d))
    return b0


@pytest.mark.parametrize("n", [3, 4, 5])
def test_full_space_oracle(n):
    rng = random.Random(n)
    pool = list(product(range(n), repeat=n))
    cat = isotopy_classes(n - 1)
    for _ in range(6):
        b0 = extend_randomly(seed_b0(n, cat[rng.choice(cat.labels)]).vectors, n, rng, rng.randint(0, 3))
        assert enumerate_candidates(b0, n) == brute(b0, pool)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_without_constants(n):
    rng = random.Random(10 + n)
    pool = list(product(range(n), repeat=n))
    for _ in range(6):
        b0 = [tuple(rng.randrange(n) for _ in range(n))]
        b0 = extend_randomly(b0, n, rng, rng.randint(0, 4))
        assert enumerate_candidates(b0, n) == brute(b0, pool)


@pytest.mark.parametrize("n", [6, 7])
def test_permutation_oracle(n):
    rng = random.Random(n)
    pool = list(permutations(range(n)))
    cat = isotopy_classes(n - 1)
    for _ in range(3):
        b0 = extend_randomly(seed_b0(n, cat[rng.choice(cat.labels)]).vectors, n, rng, rng.randint(0, 2))
        d = enumerate_candidates(b0, n)
        assert d == brute(b0, pool)
        assert all(is_permutation(v) for v in d)


def test_extension_shrinks():
    n = 6
    b0 = seed_b0(n, isotopy_classes(5)[2]).vectors
    d = enumerate_candidates(b0, n)
    for v in d[:10]:
        sub = enumerate_candidates(b0 + (v,), n)
        assert set(sub) < set(d) - {v}


def test_order_needed_for_empty():
    with pytest.raises(ValueError):
        enumerate_candidates([])
    assert len(enumerate_candidates([], 2)) == 4
