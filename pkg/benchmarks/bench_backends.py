"""Compare the numba and numpy batch backends.

    python benchmarks/bench_backends.py [--count 200000] [--repeat 3]

Times Karatsuba integer products at several widths and the full
floating-point pipeline in single and double precision. Each backend is
warmed up once (numba compiles on first call), then the best of
``--repeat`` runs is reported as nanoseconds per element. Results of the two
backends are also compared element by element.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from kufpmul import DOUBLE, SINGLE, kernels


def best_of(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def operands(rng: np.random.Generator, width: int, count: int) -> np.ndarray:
    if width == 64:
        return rng.integers(0, 2**64 - 1, size=count, dtype=np.uint64, endpoint=True)
    return rng.integers(0, 1 << width, size=count, dtype=np.uint64)


def cases(rng, count):
    for width in (16, 24, 32, 53, 64):
        a, b = operands(rng, width, count), operands(rng, width, count)
        yield f"karatsuba {width}b t=8", lambda be, a=a, b=b, w=width: kernels.karatsuba_batch(a, b, w, 8, be)
    for fmt in (SINGLE, DOUBLE):
        a, b = operands(rng, fmt.width, count), operands(rng, fmt.width, count)
        yield f"fp multiply {fmt.name}", lambda be, a=a, b=b, f=fmt: kernels.fp_multiply_batch(a, b, f, 8, be)


def main(argv=None) -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--count", type=int, default=200_000)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    backends = kernels.available_backends()
    rng = np.random.default_rng(args.seed)
    print("case," + ",".join(f"{be}_ns_per_elem" for be in backends) + ",speedup,identical")
    for name, run in cases(rng, args.count):
        outs, times = {}, {}
        for be in backends:
            run(be)
            outs[be] = run(be)
            times[be] = best_of(lambda: run(be), args.repeat) / args.count * 1e9
        same = all(all(np.array_equal(x, y) for x, y in zip(outs[be], outs[backends[0]])) for be in backends)
        speedup = times["numpy"] / times["numba"] if "numba" in times else 1.0
        cols = ",".join(f"{times[be]:.1f}" for be in backends)
        print(f"{name},{cols},{speedup:.2f},{same}")


if __name__ == "__main__":
    main()
