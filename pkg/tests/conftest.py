import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from obbmatch import MatchingConfig, OrientedBox

settings.register_profile(
    "default",
    max_examples=75,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

_ACCEPTANCE_RESULTS: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::", 1)[-1]
    _ACCEPTANCE_RESULTS.append((name, report.outcome.upper()))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _ACCEPTANCE_RESULTS:
        mark = "PASS" if outcome == "PASSED" else outcome
        terminalreporter.write_line(f"{mark}  {name}")


def random_box(rng, center_span=(10.0, 90.0), size_span=(4.0, 30.0),
               angle_span=(-1.5707, 1.5707)) -> OrientedBox:
    return OrientedBox(
        float(rng.uniform(*center_span)),
        float(rng.uniform(*center_span)),
        float(rng.uniform(*size_span)),
        float(rng.uniform(*size_span)),
        float(rng.uniform(*angle_span)),
    )


def overlapping_pairs(n, seed):
    """Box pairs with centers within +-20 of each other; IoU spans [0, 1)."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        x = rng.uniform(20.0, 80.0)
        y = rng.uniform(20.0, 80.0)
        a = OrientedBox(float(x), float(y), float(rng.uniform(4.0, 30.0)),
                        float(rng.uniform(4.0, 30.0)),
                        float(rng.uniform(-1.5707, 1.5707)))
        b = OrientedBox(float(x + rng.uniform(-20.0, 20.0)),
                        float(y + rng.uniform(-20.0, 20.0)),
                        float(rng.uniform(4.0, 30.0)),
                        float(rng.uniform(4.0, 30.0)),
                        float(rng.uniform(-1.5707, 1.5707)))
        out.append((a, b))
    return out


def assignment_scene(seed):
    """Random anchors/predictions/gts plus cycled hyperparameters.

    Sizes stay within 20 anchors and 5 ground truths so brute-force
    cross-checking is instant.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 21))
    m = int(rng.integers(1, min(5, n) + 1))
    anchors = [random_box(rng, center_span=(5.0, 55.0), size_span=(4.0, 30.0))
               for _ in range(n)]
    preds = []
    for a in anchors:
        preds.append(OrientedBox(
            a.x + float(rng.normal(0.0, 3.0)),
            a.y + float(rng.normal(0.0, 3.0)),
            a.w * float(np.exp(rng.normal(0.0, 0.2))),
            a.h * float(np.exp(rng.normal(0.0, 0.2))),
            a.angle + float(rng.normal(0.0, 0.3)),
        ))
    gts = [random_box(rng, center_span=(5.0, 55.0), size_span=(6.0, 30.0))
           for _ in range(m)]
    t = float(rng.choice([0.0, 0.05, 0.1, 0.2, 0.3, 0.7, 1.0]))
    config = MatchingConfig(
        alpha0=float(rng.choice([0.2, 0.3, 0.5, 0.9])),
        gamma=float(rng.choice([1.0, 2.0, 3.0, 5.0])),
        pos_threshold=float(rng.choice([0.4, 0.6, 0.7])),
        uncertainty_in_warmup=bool(rng.integers(2)),
    )
    return anchors, preds, gts, config, t


@pytest.fixture
def rng():
    return np.random.default_rng(20260822)
