"""Deterministic logistic-regression fixtures with frozen MLE oracle values.

Expected coefficients and residual deviances were computed before the build
with an independent brute-force oracle (BFGS minimization of the binomial
negative log-likelihood, polished to score < 1e-9) — see FROZEN below.
"""

from __future__ import annotations

import numpy as np


def make_fixture(kind: str, seed: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.RandomState(seed)
    if kind == "two":
        x1 = np.round(rng.normal(0, 1.5, n), 3)
        x2 = (rng.rand(n) < 0.4).astype(float)
        X = np.column_stack([np.ones(n), x1, x2])
        eta = -0.5 + 0.8 * x1 + 1.1 * x2
    elif kind == "three":
        x1 = np.round(rng.normal(1, 1, n), 3)
        x2 = np.round(0.5 * x1 + rng.normal(0, 1, n), 3)
        x3 = (rng.rand(n) < 0.5).astype(float)
        X = np.column_stack([np.ones(n), x1, x2, x3])
        eta = 0.2 - 0.6 * x1 + 0.4 * x2 + 0.9 * x3
    elif kind == "one":
        x1 = np.round(rng.uniform(-2, 2, n), 3)
        X = np.column_stack([np.ones(n), x1])
        eta = 0.3 + 1.4 * x1
    elif kind == "dummies":
        g = rng.randint(0, 3, n)
        d1 = (g == 1).astype(float)
        d2 = (g == 2).astype(float)
        x1 = np.round(rng.normal(0, 2, n), 3)
        X = np.column_stack([np.ones(n), x1, d1, d2])
        eta = -0.2 + 0.5 * x1 + 0.7 * d1 - 0.9 * d2
    elif kind == "imbalanced":
        x1 = np.round(rng.normal(0, 1, n), 3)
        x2 = np.round(rng.uniform(0, 3, n), 3)
        X = np.column_stack([np.ones(n), x1, x2])
        eta = -2.0 + 0.9 * x1 + 0.3 * x2
    else:
        raise ValueError(kind)
    y = (rng.rand(n) < 1 / (1 + np.exp(-eta))).astype(float)
    return X, y


FIXTURES = [
    ("two", 101, 50),
    ("three", 202, 80),
    ("one", 303, 40),
    ("dummies", 404, 120),
    ("imbalanced", 505, 60),
]

# kind -> (coefficients, residual deviance), frozen from the brute-force oracle
FROZEN = {
    "two": ((0.140042479609, 1.140971700222, -1.070809740350), 51.564229086804),
    "three": ((0.226982009913, -0.554398105216, 0.406618946036, 0.513805448476), 104.590766172650),
    "one": ((0.192188664369, 0.939242422433), 47.258172643545),
    "dummies": ((-0.266414975927, 0.502928617792, 0.960351895232, -1.470638905251), 121.583883109271),
    "imbalanced": ((-1.408812259303, 1.221683387436, 0.048527984392), 57.642708932105),
}
