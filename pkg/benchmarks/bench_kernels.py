"""Compare the compiled and numpy kernels for partial trace and local channels.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``.
"""

import argparse
import timeit

import numpy as np

from holoq import qlin
from holoq.qlin import _pykernels

try:
    from holoq.qlin import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def cases(rng):
    for n in (4, 6, 8, 10):
        rho = np.ascontiguousarray(qlin.random_mixed(n, rng))
        keep = list(range(n // 2))
        ks = np.ascontiguousarray(
            np.stack([qlin.random_unitary(4, rng) / np.sqrt(2), qlin.random_unitary(4, rng) / np.sqrt(2)])
        )
        yield n, rho, keep, ks


def best_of(fn, repeat):
    number = max(1, int(0.05 / max(timeit.timeit(fn, number=1), 1e-7)))
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    backends = {"numpy": _pykernels}
    if _ckernels is not None:
        backends["cython"] = _ckernels
    else:
        print("compiled kernels unavailable; timing numpy only")
    header = f"{'kernel':<14}{'n':>3}" + "".join(f"{b:>14}" for b in backends) + ("   speedup" if len(backends) == 2 else "")
    print(header)
    for n, rho, keep, ks in cases(rng):
        start = n // 2 - 1
        rows = {
            "partial_trace": {b: (lambda m=m: m.partial_trace(rho, n, keep)) for b, m in backends.items()},
            "apply_local": {b: (lambda m=m: m.apply_local(rho, n, start, ks)) for b, m in backends.items()},
        }
        for kernel, fns in rows.items():
            outs = [fn() for fn in fns.values()]
            assert all(np.allclose(o, outs[0], atol=1e-12) for o in outs)
            times = {b: best_of(fn, args.repeat) for b, fn in fns.items()}
            line = f"{kernel:<14}{n:>3}" + "".join(f"{times[b] * 1e6:>11.1f} us" for b in backends)
            if len(times) == 2:
                line += f"{times['numpy'] / times['cython']:>9.2f}x"
            print(line)


if __name__ == "__main__":
    main()
