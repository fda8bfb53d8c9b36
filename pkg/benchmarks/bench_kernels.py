"""Compare the compiled and numpy refinement kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

from fo2lab import fixtures, kernels
from fo2lab.companion import build_companion
from fo2lab.corpus import random_corpus
from fo2lab.equivalence import equiv2
from fo2lab.refine import _index, refine_pairs, refine_triples


def workloads():
    corpus = random_corpus(seed=0, count=200, max_size=6, density=0.3)
    c3, c7 = fixtures.c3(), fixtures.c7()
    adn = fixtures.adn45()
    return {
        "refine_pairs x200 corpus": lambda: [refine_pairs(m) for m in corpus],
        "equiv2 x500 small pairs": lambda: [equiv2(c3, c7) for _ in range(500)],
        "companion x200 corpus": lambda: [build_companion(m, verify=False) for m in corpus],
        "refine_pairs ADN45": lambda: refine_pairs(adn),
        "refine_triples ADN45": lambda: refine_triples(adn),
    }


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    try:
        kernels.use_backend("cython")
        backends = ("cython", "python")
    except ImportError:
        backends = ("python",)
    jobs = workloads()
    results = {}
    for name in backends:
        kernels.use_backend(name)
        _index.cache_clear()
        for label, fn in jobs.items():
            fn()  # warm index caches
            results[(label, name)] = best_of(fn, args.repeat)
    width = max(map(len, jobs))
    print(f"{'workload':<{width}}  " + "  ".join(f"{b:>10}" for b in backends) + "   speedup")
    for label in jobs:
        row = [results[(label, b)] for b in backends]
        speed = f"{row[1] / row[0]:8.2f}x" if len(row) == 2 else ""
        print(f"{label:<{width}}  " + "  ".join(f"{t * 1000:8.1f}ms" for t in row) + "  " + speed)


if __name__ == "__main__":
    main()
