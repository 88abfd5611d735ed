"""Time the pure-Python and compiled kernel backends on representative inputs.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import math
import timeit

import numpy as np

from transco import kernels


def cases(rng):
    J2, n_blocks = 8, 400
    k = np.arange(J2)
    Es = np.arange(J2, J2 + n_blocks)
    off = np.sqrt(Es[:, None] - k[None, :]) * np.sqrt((J2 - k) * (k + 1.0))[None, :]
    diag = np.zeros((n_blocks, J2 + 1))

    psi = rng.normal(size=30) + 1j * rng.normal(size=30)
    psi /= np.linalg.norm(psi)
    r = rng.uniform(0, 8, size=20_000)
    phi = rng.uniform(0, 2 * math.pi, size=r.size)
    return {
        "tridiag_eigh_batch (400 blocks, dim 9)": lambda m: m.tridiag_eigh_batch(diag, off),
        "wigner_points (30 levels, 20k points)": lambda m: m.wigner_points(psi, 4 * r * r, phi),
        "laguerre_kernel (k=3, 2000 terms)": lambda m: m.laguerre_kernel(3, 2000, 900.0),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    backends = {"python": kernels.backend_module("python")}
    try:
        backends["cython"] = kernels.backend_module("cython")
    except ImportError:
        print("compiled backend not built; timing the Python backend only")
    rng = np.random.default_rng(0)
    print(f"{'kernel':44s} " + " ".join(f"{b:>10s}" for b in backends) + "   speedup")
    for name, fn in cases(rng).items():
        times = {b: min(timeit.repeat(lambda: fn(m), number=1, repeat=args.repeat)) for b, m in backends.items()}
        cols = " ".join(f"{times[b]:10.4f}" for b in backends)
        speed = f"{times['python'] / times['cython']:8.1f}x" if "cython" in times else ""
        print(f"{name:44s} {cols} {speed}")


if __name__ == "__main__":
    main()
