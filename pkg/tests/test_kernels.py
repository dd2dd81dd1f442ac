import itertools

import numpy as np
import pytest

from cantorfill import kernels
from cantorfill.kernels import load_backend

BACKENDS = ["python"] + (["compiled"] if kernels.BACKEND == "compiled" else [])


def lex_tuple(mask, nbits):
    return tuple(i for i in range(nbits) if mask >> i & 1)


def random_table(rng, nbits):
    return rng.integers(0, 6, size=1 << nbits, dtype=np.uint8)


@pytest.mark.parametrize("name", BACKENDS)
def test_subset_max_transform_against_oracle(name):
    impl = load_backend(name)
    rng = np.random.default_rng(0)
    for nbits in range(0, 8):
        h = random_table(rng, nbits)
        want = [max(h[t] for t in range(1 << nbits) if t & s == t) for s in range(1 << nbits)]
        got = h.copy()
        impl.subset_max_transform(got, nbits)
        assert list(got) == want


@pytest.mark.parametrize("name", BACKENDS)
def test_min_at_popcount_against_oracle(name):
    impl = load_backend(name)
    rng = np.random.default_rng(1)
    for nbits in range(1, 9):
        best = random_table(rng, nbits)
        for n in range(nbits + 1):
            masks = [m for m in range(1 << nbits) if bin(m).count("1") == n]
            want = min(masks, key=lambda m: (best[m], lex_tuple(m, nbits)))
            assert impl.min_at_popcount(best, nbits, n) == (best[want], want)


@pytest.mark.parametrize("name", BACKENDS)
def test_first_filling_combination_against_oracle(name):
    impl = load_backend(name)
    rng = np.random.default_rng(2)
    for nbits in range(1, 9):
        best = random_table(rng, nbits)
        impl.subset_max_transform(best, nbits)
        for m in range(nbits + 1):
            need = np.array([-(-j // 2) for j in range(m + 1)], dtype=np.uint8)
            want = -1
            for combo in itertools.combinations(range(nbits), m):
                b = sum(1 << i for i in combo)
                subs = [s for s in range(1 << nbits) if s & b == s]
                if all(best[s] >= need[bin(s).count("1")] for s in subs):
                    want = b
                    break
            assert impl.first_filling_combination(best, nbits, m, need) == want


def test_backends_agree_on_larger_tables():
    if len(BACKENDS) < 2:
        pytest.skip("compiled backend not built")
    py, cc = load_backend("python"), load_backend("compiled")
    rng = np.random.default_rng(3)
    for nbits in (10, 12):
        base = random_table(rng, nbits)
        a, b = base.copy(), base.copy()
        py.subset_max_transform(a, nbits)
        cc.subset_max_transform(b, nbits)
        assert np.array_equal(a, b)
        for n in (0, 3, nbits // 2, nbits):
            assert py.min_at_popcount(a, nbits, n) == cc.min_at_popcount(b, nbits, n)


def test_selected_backend_exports():
    assert kernels.BACKEND in ("compiled", "python")
    for name in ("subset_max_transform", "min_at_popcount", "first_filling_combination"):
        assert callable(getattr(kernels, name))


def test_forced_pure_python_backend_end_to_end():
    import os
    import subprocess
    import sys

    code = ("from cantorfill import kernels; from cantorfill.density import density; "
            "from cantorfill.families import SchreierFamily; "
            "print(kernels.BACKEND, density(SchreierFamily(), range(17), 8).value)")
    env = dict(os.environ, CANTORFILL_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["python", "4"]
