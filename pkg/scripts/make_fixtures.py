"""Regenerate the bundled JSON problem files in src/strongmin/fixtures."""
from pathlib import Path

import numpy as np

from strongmin.serialize import ProblemFile, write_json

OUT = Path(__file__).resolve().parents[1] / "src" / "strongmin" / "fixtures"
I2 = np.eye(2)
one, zero = np.ones((1, 1)), np.zeros((1, 1))

PROBLEMS = {
    # P(z) = z^2 diag(0, 1) + z I + I
    "example_2_1": ProblemFile("polynomial", 2, 2, "none", [I2, I2, np.diag([0.0, 1.0])]),
    # P(z) = z^2 diag(1, 0) - diag(0, 1), para-symmetric (and symmetric)
    "para_symmetric": ProblemFile("polynomial", 2, 2, "para_hermitian",
                                  [-np.diag([0.0, 1.0]), np.zeros((2, 2)), np.diag([1.0, 0.0])]),
    "scalar_lambda2": ProblemFile("polynomial", 1, 1, "none", [zero, zero, one]),
    # 1/z: R_{-1} = 1, all later blocks 0
    "inv_lambda": ProblemFile("rational", 1, 1, "none", [zero], laurent_tail=[one, zero, zero, zero]),
    # 1/(z - 1) = sum_j z^{-j}
    "inv_lambda_minus_1": ProblemFile("rational", 1, 1, "none", [zero], laurent_tail=[one] * 4),
    "lambda2_plus_inv_lambda": ProblemFile("rational", 1, 1, "none", [zero, zero, one],
                                           laurent_tail=[one, zero, zero, zero]),
    "lambda2_plus_inv_lambda2": ProblemFile("rational", 1, 1, "none", [zero, zero, one],
                                            laurent_tail=[zero, one, zero, zero, zero, zero]),
    "identity": ProblemFile("polynomial", 2, 2, "none", [I2]),
}

if __name__ == "__main__":
    for name, prob in PROBLEMS.items():
        write_json(OUT / f"{name}.json", prob.to_dict())
        print(OUT / f"{name}.json")
