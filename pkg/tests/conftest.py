import json

import numpy as np
import pytest

from teachsel import ProblemInstance


@pytest.fixture
def three_feature_instance() -> ProblemInstance:
    """Three diagnostic tests; the human overrates the most informative one."""
    return ProblemInstance(
        a=[0.3, 0.2, 0.1], c=0.0, h0=[0.8, 0.2, 0.15], c_bar=0.0, k=3, delta=0.9
    )


@pytest.fixture
def two_feature_instance() -> ProblemInstance:
    """One informative-but-misread feature vs. one familiar weak feature."""
    return ProblemInstance(
        a=[1.0, 0.4], c=0.0, h0=[-0.5, 0.75], c_bar=0.0, k=1, delta=0.5
    )


def random_instance(
    rng: np.random.Generator,
    n: int | None = None,
    k: int | None = None,
    delta: float | None = None,
    max_n: int = 6,
) -> ProblemInstance:
    """Random instance with coefficients bounded away from zero."""
    if n is None:
        n = int(rng.integers(1, max_n + 1))
    a = rng.uniform(0.1, 1.5, n) * rng.choice([-1.0, 1.0], n)
    h0 = rng.normal(0.0, 0.8, n)
    if k is None:
        k = int(rng.integers(0, n + 1))
    if delta is None:
        delta = float(rng.uniform(0.05, 0.95))
    return ProblemInstance(
        a=a, c=float(rng.normal()), h0=h0, c_bar=float(rng.normal()), k=k, delta=delta
    )


def write_scenario(path, *, features, c=0.0, c_bar=0.0, k=1, delta=0.5, dynamic=None, **extra):
    doc = {
        "features": features,
        "c": c,
        "c_bar": c_bar,
        "k": k,
        "delta": delta,
        "dynamic": dynamic or {"type": "exponential", "params": {"w": 0.0}},
    }
    doc.update(extra)
    path.write_text(json.dumps(doc, indent=2))
    return path


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
