"""Linearize every bundled example and print its structural summary."""
import numpy as np

from strongmin import fixtures
from strongmin.analyze import (
    check_strong_minimality,
    cluster_eigenvalues,
    degree_audit,
    indices_at_infinity,
    pencil_finite_eigenvalues,
    transfer_residual,
)
from strongmin.errors import SingularPencilError
from strongmin.linearize import linearize_rational


def main():
    for name in fixtures.NAMES:
        pf = fixtures.load(name)
        R = pf.rational()
        L, rep = linearize_rational(R, pf.structure)
        cert = check_strong_minimality(L)
        print(f"== {name} ({pf.structure})")
        print(f"   pencil {L.shape[0]}x{L.shape[1]}, state dim {L.p}, strongly minimal {cert.strongly_minimal}")
        print(f"   transfer residual {transfer_residual(L, R):.1e}")
        print(f"   indices at infinity {list(indices_at_infinity(L).indices)}")
        print(f"   McMillan degree {degree_audit(L, R)['mcmillan_rank_L1']}")
        try:
            clusters = cluster_eigenvalues(pencil_finite_eigenvalues(*L.pencil()))
            pretty = ", ".join(f"{np.round(c, 8)} (x{k})" for c, k in clusters) or "none"
            print(f"   finite eigenvalues {pretty}")
        except SingularPencilError:
            print("   finite eigenvalues: singular pencil")


if __name__ == "__main__":
    main()
