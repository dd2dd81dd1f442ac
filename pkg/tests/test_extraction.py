import itertools
import random

import pytest

from cantorfill.errors import DensityPreconditionError, NotIncreasingError, PreconditionError
from cantorfill.extraction import (
    canonical_increasing,
    extract_increasing_trace,
    extract_type,
    find_increasing_subset,
    find_typed_member,
    is_increasing_config,
    random_increasing,
)
from cantorfill.families import AllSets, BoundedSize, FremlinFamily
from cantorfill.nodes import PointConfig, TypeSignature, enumerate_types, type_of

from conftest import cube


def common(a, b):
    i = 0
    while i < min(len(a), len(b)) and a[i] == b[i]:
        i += 1
    return a[:i]


def increasing_oracle(points):
    """Definition check: recursive halves split at their meet, BFS label lengths grow."""
    pts = sorted(points)
    n = len(pts).bit_length() - 1
    if 2**n != len(pts):
        return False
    labels = {}

    def walk(block, s):
        if len(s) == n:
            return len(block) == 1
        if len(block) < 2:
            return False
        w = common(block[0], block[-1])
        left = [p for p in block if p[len(w)] == "0"]
        right = [p for p in block if p[len(w)] == "1"]
        if len(left) != len(right):
            return False
        labels[s] = w
        return walk(left, s + "0") and walk(right, s + "1")

    if not walk(pts, ""):
        return False
    lengths = [len(labels[s]) for s in sorted(labels, key=lambda s: (len(s), s))]
    return all(a < b for a, b in zip(lengths, lengths[1:]))


ADMISSIBLE = [(n, k) for n in range(2, 7) for k in range(1, 4) if 2**n >= n**k]


def chain_properties(trace):
    chain = trace.chain
    for m in range(1, len(chain)):
        for w in chain[m]:
            sides = {b for a in chain[m - 1] for b in "01" if a.startswith(w + b)}
            assert sides == {"0", "1"}  # (P1)
    for piece in chain:
        ordered = sorted(piece)
        assert all(len(a) < len(b) for a, b in zip(ordered, ordered[1:]))  # (P2)
    for m1, m2 in itertools.combinations(range(len(chain)), 2):
        assert min(map(len, chain[m1])) > max(map(len, chain[m2]))  # (P3)


def test_canonical_increasing_examples():
    assert list(canonical_increasing(2, 4)) == ["0000", "0100", "1000", "1010"]
    assert not is_increasing_config(cube(2))
    with pytest.raises(PreconditionError):
        is_increasing_config(["00", "01", "10"])


def test_increasing_check_matches_oracle_exhaustive():
    for depth in (3, 4):
        for size in (2, 4):
            for cfg in itertools.combinations(cube(depth), size):
                assert bool(is_increasing_config(cfg)) == increasing_oracle(cfg)


def test_generators_produce_increasing_sets():
    rng = random.Random(0)
    for n in range(0, 5):
        assert increasing_oracle(canonical_increasing(n, 2**n + 1))
        for _ in range(30):
            assert increasing_oracle(random_increasing(n, rng))


@pytest.mark.parametrize("n,k", ADMISSIBLE)
def test_extract_increasing_random(n, k):
    rng = random.Random(1000 * n + k)
    for _ in range(40):
        F = random_increasing(n, rng)
        G = PointConfig(rng.sample(list(F), rng.randint(n**k, 2**n)))
        trace = extract_increasing_trace(F, G, k)
        H = trace.result
        assert len(H) == 2**k and set(H) <= set(G)
        assert increasing_oracle(H)
        chain_properties(trace)


def test_extract_increasing_errors():
    F = canonical_increasing(3, 8)
    with pytest.raises(PreconditionError):
        extract_increasing_trace(F, F[:2], 1)
    with pytest.raises(NotIncreasingError):
        extract_increasing_trace(cube(2), cube(2), 1)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_extract_type_every_type(k):
    rng = random.Random(k)
    sources = [canonical_increasing(k, 2**k)] + [random_increasing(k, rng) for _ in range(10)]
    for tau in enumerate_types(k + 1):
        for H in sources:
            I = extract_type(H, tau)
            assert set(I) <= set(H) and len(I) == k + 1
            assert type_of(I) == tau


def test_extract_type_arity_mismatch():
    with pytest.raises(PreconditionError):
        extract_type(canonical_increasing(2, 4), TypeSignature([0]))


def test_find_increasing_subset():
    rng = random.Random(4)
    pts = rng.sample(cube(7), 60)
    H = find_increasing_subset(pts, 3)
    assert set(H) <= set(pts) and increasing_oracle(H)


def test_typed_member_pipeline():
    for tau in enumerate_types(3):
        I = find_typed_member(AllSets(), 16, 3, tau, 4)
        assert AllSets().member(tuple(I)) and type_of(I) == tau
    fam = FremlinFamily("sqrt", K=2, depth=8)
    I = find_typed_member(fam, 8, 3, TypeSignature([0, 1]), 2)
    assert fam.member(tuple(I)) and type_of(I).values == (0, 1)


def test_typed_member_density_failure():
    with pytest.raises(DensityPreconditionError) as info:
        find_typed_member(BoundedSize(2), 16, 3, TypeSignature([0, 0]), 4)
    assert len(info.value.details["member"]) == 2
