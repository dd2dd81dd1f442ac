"""Compare the compiled and pure-Python subset-table kernels.

    python benchmarks/bench_kernels.py [--bits 12 16 20] [--repeat 3]
"""

import argparse
import time

import numpy as np

from cantorfill.kernels import load_backend


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def bench(impl, nbits, repeat, seed=0):
    rng = np.random.default_rng(seed)
    base = rng.integers(0, 8, size=1 << nbits, dtype=np.uint8)
    table = base.copy()
    impl.subset_max_transform(table, nbits)
    m = min(8, nbits)
    need = np.array([-(-j // 2) for j in range(m + 1)], dtype=np.uint8)
    return {
        "transform": best_of(lambda: impl.subset_max_transform(base.copy(), nbits), repeat),
        "min_at_popcount": best_of(lambda: impl.min_at_popcount(table, nbits, nbits // 2), repeat),
        "filling": best_of(lambda: impl.first_filling_combination(table, nbits, m, need), repeat),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--bits", type=int, nargs="+", default=[12, 16, 20])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    backends = {"python": load_backend("python")}
    try:
        backends["compiled"] = load_backend("compiled")
    except ImportError:
        print("compiled backend not built; timing the Python kernels only")
    print(f"{'bits':>4} {'kernel':<16} " + " ".join(f"{name:>12}" for name in backends) + "   speedup")
    for nbits in args.bits:
        results = {name: bench(impl, nbits, args.repeat) for name, impl in backends.items()}
        for kernel in results["python"]:
            cells = " ".join(f"{results[name][kernel] * 1e3:>10.2f}ms" for name in backends)
            speed = ""
            if "compiled" in results:
                speed = f"{results['python'][kernel] / max(results['compiled'][kernel], 1e-9):8.1f}x"
            print(f"{nbits:>4} {kernel:<16} {cells} {speed}")


if __name__ == "__main__":
    main()
