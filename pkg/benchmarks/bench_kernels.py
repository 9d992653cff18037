"""Compiled vs pure-Python kernel timings.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each kernel runs on identical inputs under both backends; the table shows
the best-of-``repeat`` wall time and the speed-up.  Outputs are compared so
a fast but wrong extension shows up here too.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from fkdet import kernels
from fkdet.groups import Heisenberg, IntegerLattice, ModularLattice, labeled_ball
from fkdet.numerics import _initial_guesses


def _root_set(out):
    return np.sort_complex(np.round(out[0], 10))


def _cases():
    rng = np.random.default_rng(0)

    q = rng.normal(size=9) + 1j * rng.normal(size=9)
    c = np.array([np.vdot(q[: len(q) - k], q[k:]) for k in range(len(q))])
    moments = np.concatenate([c, np.zeros(2048 - len(c))])
    yield "levinson n=2048", "levinson_logdet", (moments,), None

    coeffs = rng.normal(size=41) + 1j * rng.normal(size=41)
    # the backends sweep in different orders, so only the root sets must agree
    yield "aberth deg=40", "aberth", (coeffs, _initial_guesses(coeffs), 1e-13, 500), _root_set

    H = Heisenberg()
    b1 = labeled_ball(H, 7).succ
    b2 = labeled_ball(Heisenberg(9), 7).succ
    yield "relation walk H3 vs H3(Z/9), L=8", "relation_discrepancy", (b1, b2, 8), None

    z1 = labeled_ball(IntegerLattice(1), 11).succ
    z2 = labeled_ball(ModularLattice((13,)), 11).succ
    yield "relation walk Z vs Z/13, L=12", "relation_discrepancy", (z1, z2, 12), None

    exps = rng.integers(-6, 7, size=(12, 2)).astype(np.int64)
    vals = rng.normal(size=12) + 1j * rng.normal(size=12)
    thetas = rng.random(size=(200_000, 2))
    yield "eval 12 terms at 2e5 points", "eval_points", (exps, vals, thetas), None


def _best(fn, args, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    a, b = np.asarray(a), np.asarray(b)
    if a.dtype.kind in "fc":
        return a.shape == b.shape and bool(np.allclose(a, b, rtol=1e-8, atol=1e-10))
    return bool(np.array_equal(a, b))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    try:
        compiled = kernels.backend("compiled")
    except ImportError:
        print("compiled extension not built; run `pip install -e . --no-build-isolation` first")
        return 1
    python = kernels.backend("python")
    print(f"{'kernel':40s} {'python [s]':>12s} {'compiled [s]':>13s} {'speed-up':>9s}  match")
    for label, name, inputs, key in _cases():
        tp, op = _best(getattr(python, name), inputs, args.repeat)
        tc, oc = _best(getattr(compiled, name), inputs, args.repeat)
        if key is not None:
            op, oc = key(op), key(oc)
        print(f"{label:40s} {tp:12.4f} {tc:13.4f} {tp / tc:8.1f}x  {'yes' if _same(op, oc) else 'NO'}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
