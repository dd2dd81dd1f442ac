import math
import random
import warnings

import pytest

from cantorfill.errors import PreconditionError, SearchFailed
from cantorfill.families import (
    AllSets,
    BoundedSize,
    CoordinateFamily,
    ExplicitFamily,
    FremlinFamily,
    SchreierFamily,
    StronglyMonotoneFamily,
    fremlin_density_bound,
    hereditary_closure,
    is_strongly_increasing,
    threshold_sequence,
)

from conftest import all_subsets, brute_max_member, cube


def thresholds_oracle(f, K, horizon):
    """Smallest n_k > n_{k-1} with f(i)·2^k <= i for every i in [n_k, horizon]."""
    out = [1]
    for k in range(1, K + 1):
        n = out[-1] + 1
        while any(f(i) * 2**k > i for i in range(n, horizon + 1)):
            n += 1
        out.append(n)
    return tuple(out)


def fremlin_oracle(family, pts):
    pts = sorted(pts)
    if len(pts) <= 1:
        return True
    return any(len({p[:k] for p in pts}) == 1 and len(pts) <= family.caps[k] for k in range(family.K + 1))


def sqrt_ceil(n):
    return math.isqrt(n - 1) + 1


def test_sqrt_thresholds_and_caps():
    seq = threshold_sequence("sqrt", 4, horizon=4096)
    assert seq.values == thresholds_oracle(sqrt_ceil, 4, 4096) == (1, 6, 20, 72, 272)
    assert FremlinFamily("sqrt", K=2).caps == (6, 10, 18)


def test_threshold_errors():
    with pytest.raises(PreconditionError):
        threshold_sequence(lambda n: n + 1, 2, horizon=64)
    with pytest.raises(SearchFailed):
        threshold_sequence(lambda n: n, 1, horizon=64)
    with pytest.raises(PreconditionError):
        threshold_sequence(lambda n: 1 if n % 2 else 2, 1, horizon=64, monotone_ratio=True)


@pytest.mark.parametrize("family", [
    AllSets(), BoundedSize(2), CoordinateFamily(1), FremlinFamily("sqrt", K=2, depth=5),
    StronglyMonotoneFamily(5),
])
def test_heredity_on_random_configs(family):
    rng = random.Random(11)
    pts = cube(5)
    for _ in range(150):
        cfg = tuple(sorted(rng.sample(pts, rng.randint(1, 7))))
        if family.member(cfg):
            assert all(family.member(s) for s in all_subsets(cfg))


def test_fremlin_membership_oracle():
    family = FremlinFamily("sqrt", K=2, depth=6)
    rng = random.Random(5)
    pts = cube(6)
    for _ in range(2000):
        cfg = tuple(sorted(rng.sample(pts, rng.randint(0, 20))))
        assert family.member(cfg) == fremlin_oracle(family, cfg)


@pytest.mark.parametrize("family", [
    SchreierFamily(), CoordinateFamily(0), FremlinFamily("sqrt", K=2, depth=5), StronglyMonotoneFamily(5),
    BoundedSize(3), AllSets(),
])
def test_max_member_fast_paths(family):
    rng = random.Random(3)
    ground = list(range(12)) if family.ground == "nat" else cube(5)
    for _ in range(120):
        cfg = tuple(sorted(rng.sample(ground, rng.randint(0, 9))))
        want = brute_max_member(family, cfg)
        fast = family.max_member_size(cfg)
        assert fast is None or fast == want
        lm = family.largest_member(cfg)
        if lm is not None:
            assert len(lm) == want and family.member(tuple(lm)) and set(lm) <= set(cfg)


def test_schreier_member_table_matches_member():
    fam = SchreierFamily()
    pts = [0, 1, 3, 4, 7, 8]
    table = fam.member_table(pts)
    for mask in range(1 << len(pts)):
        sub = tuple(p for i, p in enumerate(pts) if mask >> i & 1)
        assert bool(table[mask]) == fam.member(sub)


def test_explicit_closure():
    with warnings.catch_warnings():
        fam = ExplicitFamily([["01", "10"], ["00"]], depth=2)
    assert len(fam) == 5  # {}, {00}, {01}, {10}, {01,10}
    assert fam.added == 2
    assert fam == hereditary_closure(fam)
    assert ExplicitFamily([]).member(())
    assert not ExplicitFamily([]).member(("0",))


def test_strongly_monotone_definition():
    assert is_strongly_increasing(["000", "100", "110"])
    assert not is_strongly_increasing(["000", "001", "100"])
    fam = StronglyMonotoneFamily(3)
    assert fam.member(("000", "001", "100")) and fam.member(("000", "100", "110"))
    assert not fam.member(("000", "001", "100", "101"))


def test_fremlin_density_bound_dominates_f():
    fam = FremlinFamily("sqrt", K=2)
    for n in range(1, 72):
        assert fremlin_density_bound(fam, n) >= sqrt_ceil(n)
    with pytest.raises(PreconditionError):
        fremlin_density_bound(fam, 72)
