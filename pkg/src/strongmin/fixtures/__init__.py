"""Bundled problem files for the worked examples."""
from importlib import resources

from ..serialize import ProblemFile, load_json

NAMES = (
    "example_2_1",
    "para_symmetric",
    "scalar_lambda2",
    "inv_lambda",
    "inv_lambda_minus_1",
    "lambda2_plus_inv_lambda",
    "lambda2_plus_inv_lambda2",
    "identity",
)


def path(name):
    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}")
    return resources.files(__name__).joinpath(f"{name}.json")


def load(name):
    """The fixture as a ProblemFile."""
    with resources.as_file(path(name)) as p:
        return ProblemFile.from_dict(load_json(p))
