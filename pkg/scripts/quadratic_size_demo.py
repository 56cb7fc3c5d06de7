"""Size and accuracy of the low-rank quadratic linearization against a companion pencil.

For P(z) = P2 z^2 + P1 z + P0 with rank P2 = r2 the deflated pencil is
(r2 + m) x (r2 + n), while the first companion form is 2m x 2n.
"""
import argparse
import time

import numpy as np

from strongmin.analyze import check_strong_minimality
from strongmin.linearize import build_Lr, quad_lowrank
from strongmin.polyrat import PolyMatrix


def gauss(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def run(m, ranks, seed):
    rng = np.random.default_rng(seed)
    print(f"{'r2':>4} {'size':>9} {'companion':>10} {'rel err':>9} {'minimal':>8} {'ms':>7}")
    for r2 in ranks:
        P = PolyMatrix([gauss(rng, (m, m)), gauss(rng, (m, m)), gauss(rng, (m, r2)) @ gauss(rng, (r2, m))])
        t0 = time.perf_counter()
        L = quad_lowrank(P)
        ms = 1e3 * (time.perf_counter() - t0)
        z = 0.7 + 0.4j
        err = np.linalg.norm(L.transfer(z) - P(z)) / np.linalg.norm(P(z))
        ok = check_strong_minimality(L, seed=seed).strongly_minimal
        comp = build_Lr(P).shape
        print(f"{r2:>4} {L.shape[0]:>4}x{L.shape[1]:<4} {comp[0]:>4}x{comp[1]:<5} {err:9.1e} {str(ok):>8} {ms:7.2f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=int, default=40)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    run(args.m, [1, 2, 5, 10, args.m // 2, args.m], args.seed)
