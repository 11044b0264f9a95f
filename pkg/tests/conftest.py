import os
import random
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from wldist.graph import Graph, sample_er
from wldist.measure import GroundSpace, ScaledMeasure

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DATA = Path(__file__).parent / "data"


def random_graph(rng, n_lo=1, n_hi=8):
    n = rng.randint(n_lo, n_hi)
    return sample_er(n, rng.random(), rng.randrange(2**32))


def random_metric(rng, m, max_denom=10, exact=True):
    """Shortest-path metric of a random complete graph; rational or float."""
    w = [[0] * m for _ in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            w[i][j] = w[j][i] = rng.randint(1, 10)
    for k in range(m):
        for i in range(m):
            for j in range(m):
                if w[i][k] + w[k][j] < w[i][j]:
                    w[i][j] = w[i][k] + w[k][j]
    d = rng.randint(1, max_denom)
    if exact:
        return GroundSpace([[Fraction(x, d) for x in row] for row in w])
    return GroundSpace([[x / d for x in row] for row in w])


def random_measure(rng, m, max_denom=10, full=False):
    denom = rng.randint(1, max_denom)
    budget = denom if full else rng.randint(0, denom)
    num = [0] * m
    for _ in range(budget):
        num[rng.randrange(m)] += 1
    return ScaledMeasure(tuple(num), denom)


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture
def mutag_dir():
    return DATA / "MUTAG"


def write_edges(path, n, edges):
    lines = [f"n {n}"] + [f"{u} {v}" for u, v in edges]
    Path(path).write_text("\n".join(lines) + "\n")
    return str(path)


def as_graph(n, edges):
    return Graph.from_edges(n, edges)


def write_tudataset(directory, name, graphs, labels):
    """Write graphs in the TUDataset text layout; returns the directory."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    A, indicator, offset = [], [], 0
    for g, G in enumerate(graphs, 1):
        indicator += [g] * G.n
        for u, v in G.edges():
            A += [f"{u + offset + 1}, {v + offset + 1}", f"{v + offset + 1}, {u + offset + 1}"]
        offset += G.n
    (directory / f"{name}_A.txt").write_text("\n".join(A) + "\n")
    (directory / f"{name}_graph_indicator.txt").write_text("\n".join(map(str, indicator)) + "\n")
    (directory / f"{name}_graph_labels.txt").write_text("\n".join(map(str, labels)) + "\n")
    return str(directory)


# ---------------------------------------------------------------- acceptance lines

ACCEPTANCE_LINES = {}


@pytest.fixture
def acceptance():
    """``record(criterion, ok, detail)`` stores one verdict line, printed in the summary."""
    def record(criterion, ok, detail):
        verdict = ok if isinstance(ok, str) else ("PASS" if ok else "FAIL")
        line = f"criterion {criterion:<4} {verdict:<8} {detail}"
        ACCEPTANCE_LINES[criterion] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        key = lambda c: (int("".join(ch for ch in c if ch.isdigit())), c)
        for c in sorted(ACCEPTANCE_LINES, key=key):
            terminalreporter.write_line(ACCEPTANCE_LINES[c])
