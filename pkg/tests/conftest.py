import numpy as np
import pytest

from teamrep.corpus import CollaborationNetwork, Team
from teamrep.kernel import KernelProblem


def net(edges, skills=None, vertices=()):
    return CollaborationNetwork.from_edges(edges, skills=skills, vertices=vertices)


def random_problem(rng, t, n_skills=3, mu=None):
    """Random admissible kernel problem with non-negative symmetric inputs."""

    def adj():
        A = rng.random((t, t)) * (rng.random((t, t)) < 0.7)
        A = np.triu(A, 1)
        return A + A.T

    A_old, A_new = adj(), adj()
    rho = max(abs(np.linalg.eigvalsh(A_old))) * max(abs(np.linalg.eigvalsh(A_new)))
    if mu is None:
        mu = 0.9 * 0.95 / rho * rng.random() if rho > 0 else rng.random()
    fam = {
        m: (rng.random(t), rng.random(t)) for m in ("pairwise", "higher-order")
    }
    start = rng.random(t * t)
    stop = rng.random(t * t)
    return KernelProblem(
        team_old=tuple(f"o{i}" for i in range(t)),
        team_new=tuple(f"n{i}" for i in range(t)),
        adj_old=A_old,
        adj_new=A_new,
        skills_old=(rng.random((n_skills, t)) < 0.5).astype(float),
        skills_new=(rng.random((n_skills, t)) < 0.5).astype(float),
        familiarity=fam,
        mu=mu,
        start=start / start.sum(),
        stop=stop / stop.sum(),
    )


@pytest.fixture
def triangle():
    return net([("a", "b"), ("b", "c"), ("a", "c")])


@pytest.fixture
def team_abcd():
    return Team("t1", ("a", "b", "c", "d"))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod and mod.RESULTS:
        terminalreporter.section("acceptance")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
