"""Time the numba and numpy variants of each hot kernel side by side.

    python3 benchmarks/bench_kernels.py [--repeat 20]

Inputs mirror real workloads: the accumulation kernel gets the adjoint and
right powers of a p_4 evaluation for d = 3, the linkage kernel gets a
spectrum-sized point cloud. Both variants are checked for agreement first.
"""
import argparse
import timeit

import numpy as np

from herop import _kernels
from herop.hereditary import _PowerCache, m_isometry_polynomial


def accumulation_inputs(d, n, m, seed):
    rng = np.random.default_rng(seed)
    ops = [rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)) for _ in range(d)]
    ops = np.array([o / np.linalg.norm(o, 2) for o in ops])
    f = m_isometry_polynomial(d, m)
    alphas = sorted({a for a, _ in f.terms})
    betas = sorted({b for _, b in f.terms})
    powers = _PowerCache(ops)
    xh = np.array([powers(a).conj().T for a in alphas])
    yp = np.array([powers(b) for b in betas])
    coef = np.zeros((len(alphas), len(betas)), dtype=np.complex128)
    ai = {a: i for i, a in enumerate(alphas)}
    bi = {b: i for i, b in enumerate(betas)}
    for (a, b), c in f.terms.items():
        coef[ai[a], bi[b]] = c
    a = rng.standard_normal((n, n)) + 0j
    return xh, a @ a.T, yp, coef


def linkage_inputs(p, seed):
    rng = np.random.default_rng(seed)
    centers = rng.standard_normal((p // 4, 2))
    pts = np.repeat(centers, 4, axis=0) + 1e-10 * rng.standard_normal((p // 4 * 4, 2))
    return pts, 1e-8


def bench(name, numba_fn, numpy_fn, args, repeat):
    ref = numpy_fn(*args)
    got = numba_fn(*args)  # also triggers compilation
    ok = np.allclose(ref, got, rtol=1e-10, atol=1e-10 * max(1.0, float(np.max(np.abs(ref)))))
    t_numba = min(timeit.repeat(lambda: numba_fn(*args), number=1, repeat=repeat))
    t_numpy = min(timeit.repeat(lambda: numpy_fn(*args), number=1, repeat=repeat))
    print(f"{name:<32} numba {t_numba * 1e3:9.3f} ms   numpy {t_numpy * 1e3:9.3f} ms   "
          f"speedup {t_numpy / t_numba:6.2f}x   agree {ok}")
    return ok


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args(argv)
    if not _kernels.HAVE_NUMBA:
        print("numba is not installed; only the numpy kernels are available")
        return 1
    ok = True
    for d, n, m in [(2, 8, 3), (3, 12, 4), (3, 30, 4)]:
        ok &= bench(f"hereditary d={d} n={n} m={m}", _kernels.hereditary_accumulate_jit,
                    _kernels.hereditary_accumulate_numpy, accumulation_inputs(d, n, m, 0), args.repeat)
    for p in (40, 200, 800):
        ok &= bench(f"linkage p={p}", _kernels.linkage_labels_jit,
                    _kernels.linkage_labels_numpy, linkage_inputs(p, 1), args.repeat)
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
