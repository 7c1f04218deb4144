import random

import pytest

from clearq.model import ModelParams


def random_params(rng: random.Random, *, cp=None, cg=None, collab_cheaper=None) -> ModelParams:
    """Moderately sized random instance; rates and costs avoid exact ties."""
    cp = cp or rng.randint(1, 4)
    cg = cg or rng.randint(1, 4)
    mu0 = rng.choice([0.5, 1.0, 2.0, 4.0, 8.0]) * rng.uniform(0.8, 1.25)
    mu1 = rng.uniform(1.0, 6.0)
    mu2 = rng.uniform(1.0, 10.0)
    h0 = rng.uniform(0.05, 2.0)
    h1 = rng.uniform(0.5, 2.0)
    h2 = rng.uniform(0.05, 2.0)
    params = ModelParams(cp, cg, mu0, mu1, mu2, h0, h1, h2)
    if collab_cheaper is not None and params.prefers_collab != collab_cheaper:
        # swap the station costs to land on the requested side
        h2 = h1 * mu2 / mu1 * (0.5 if collab_cheaper else 1.5)
        params = ModelParams(cp, cg, mu0, mu1, mu2, h0, h1, h2)
    return params


@pytest.fixture
def rng():
    return random.Random(20240611)


MONOTONE = ModelParams(4, 2, 1.0, 10.0, 12.0, 0.5, 1.0, 0.6667)
NONMONOTONE = ModelParams(4, 2, 8.0, 10.0, 18.0, 5.0, 1.0, 0.75)
COUNTEREXAMPLE = ModelParams(2, 1, 5.0, 3.1, 3.0, 0.1, 22.0, 10.0)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
