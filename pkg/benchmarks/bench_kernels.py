"""Jacobi kernel timings: numba vs pure numpy.

    python benchmarks/bench_kernels.py              # E8 with an order-5 automorphism
    python benchmarks/bench_kernels.py --case d4-coxeter --count 200000

Both backends run on the same triples and must return identical status
vectors.  The first numba call includes JIT compilation (or cache load), so
it is timed separately as a warm-up.
"""
import argparse
import time

import numpy as np

from extlie._accel import HAVE_NUMBA
from extlie.cli import build_datum, load_case, parse_spec
from extlie.lie_algebra import IntTable, cartan_triples, construct, sampled_triples


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--case", default="e8-d5")
    p.add_argument("--count", type=int, default=10 ** 6)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)

    job = parse_spec(load_case(args.case), "verify")
    alg = construct(build_datum(job), validate=False)
    table = IntTable(alg)
    if not table.ok:
        raise SystemExit(f"kernel table unavailable: {table.reason}")
    triples = np.concatenate([sampled_triples(alg.dim, args.count, args.seed),
                              cartan_triples(alg.dim, alg.ell)])
    print(f"case {args.case}: dim {alg.dim}, field order {alg.field_order}, "
          f"{len(triples):,} triples")

    t_np, st_np = best_of(lambda: table.run(triples, "numpy"), args.repeat)
    print(f"numpy  {t_np:8.3f}s  {len(triples) / t_np / 1e6:6.2f} M triples/s")
    if not HAVE_NUMBA:
        print("numba not installed; skipping")
        return
    t0 = time.perf_counter()
    table.run(triples[:10], "numba")
    print(f"numba warm-up {time.perf_counter() - t0:.3f}s")
    t_nb, st_nb = best_of(lambda: table.run(triples, "numba"), args.repeat)
    print(f"numba  {t_nb:8.3f}s  {len(triples) / t_nb / 1e6:6.2f} M triples/s")
    print(f"speedup {t_np / t_nb:.1f}x, statuses identical: {np.array_equal(st_np, st_nb)}")
    print(f"failures: {int(st_nb.sum())}")


if __name__ == "__main__":
    main()
