"""Transfer-function error and certificate margins over random sources of growing degree."""
import argparse

import numpy as np

from strongmin.analyze import check_strong_minimality
from strongmin.linearize import deflate_Ls, deflate_Ls_structured, structure_defect
from strongmin.polyrat import PolyMatrix, random_structured


def gauss(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def sample_error(L, P, rng, count=20):
    zs = rng.uniform(0.5, 2, count) * np.exp(2j * np.pi * rng.uniform(0, 1, count))
    return max(np.linalg.norm(L.transfer(z) - P(z)) / np.linalg.norm(P(z)) for z in zs)


def main(trials, seed):
    rng = np.random.default_rng(seed)
    print(f"{'d':>2} {'tag':>20} {'max err':>9} {'min margin':>11} {'max defect':>11}")
    for d in range(2, 7):
        for tag in ("none", "hermitian", "para_hermitian"):
            errs, margins, defects = [], [], []
            for t in range(trials):
                if tag == "none":
                    P = PolyMatrix([gauss(rng, (3, 3)) for _ in range(d)] + [gauss(rng, (3, 1)) @ gauss(rng, (1, 3))])
                    L, _ = deflate_Ls(P)
                else:
                    P = random_structured(3, d, tag, int(rng.integers(1 << 31)), rank=1)
                    L, _ = deflate_Ls_structured(P, tag)
                    defects.append(structure_defect(L, tag))
                errs.append(sample_error(L, P, rng))
                margins.append(check_strong_minimality(L, seed=t).min_margin)
            dmax = f"{max(defects):11.1e}" if defects else f"{'-':>11}"
            print(f"{d:>2} {tag:>20} {max(errs):9.1e} {min(margins):11.2e} {dmax}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    main(args.trials, args.seed)
