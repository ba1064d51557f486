"""Statistical layer: logistic regression with deviance analysis and odds
ratios, Spearman rank correlation, and Welch's t-test.

The regression is fit by iteratively reweighted least squares (Newton steps
on the binomial log-likelihood); p-values use the Wald normal approximation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import betainc, erfc, gammaincc

from .errors import ClassMissing, DegenerateInput, Separation, Singular

MAX_ITERATIONS = 50
SCORE_TOL = 1e-8
DEVIANCE_RTOL = 1e-10
SEPARATION_BOUND = 30.0

SECONDS_PER_YEAR = 31557600  # Julian year


@dataclass
class DesignMatrix:
    """Numeric predictors plus an intercept column and a 0/1 response.

    term_groups names contiguous column groups for sequential ANOVA;
    dropped records constant columns removed at build time.
    """

    columns: list[str]
    X: np.ndarray
    y: np.ndarray
    term_groups: list[tuple[str, list[int]]]
    dropped: list[str] = field(default_factory=list)


@dataclass
class RegressionResult:
    terms: list[str]
    coefficients: np.ndarray
    std_errors: np.ndarray
    z_values: np.ndarray
    p_values: np.ndarray
    odds_ratios: np.ndarray
    null_deviance: float
    residual_deviance: float
    converged: bool
    iterations: int

    def as_dict(self) -> dict:
        return {
            "terms": list(self.terms),
            "coefficients": [float(v) for v in self.coefficients],
            "std_errors": [float(v) for v in self.std_errors],
            "z_values": [float(v) for v in self.z_values],
            "p_values": [float(v) for v in self.p_values],
            "odds_ratios": [float(v) for v in self.odds_ratios],
            "null_deviance": float(self.null_deviance),
            "residual_deviance": float(self.residual_deviance),
            "converged": self.converged,
            "iterations": self.iterations,
        }


def _sigmoid(eta: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(eta, -35, 35)))


def _deviance(y: np.ndarray, mu: np.ndarray) -> float:
    eps = 1e-12
    mu = np.clip(mu, eps, 1 - eps)
    return float(-2.0 * np.sum(y * np.log(mu) + (1 - y) * np.log(1 - mu)))


def null_deviance(y: np.ndarray) -> float:
    """Deviance of the intercept-only model (its MLE is the class rate)."""
    return _deviance(y, np.full(len(y), float(np.mean(y))))


def fit_logistic(X: np.ndarray, y: np.ndarray, terms: list[str] | None = None) -> RegressionResult:
    """Maximum-likelihood logistic fit via IRLS.

    Converges when the score vanishes or the deviance stops moving; hitting
    the iteration cap with runaway coefficients raises Separation carrying
    the partial result.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    terms = terms or [f"x{i}" for i in range(p)]
    ones = float(np.sum(y))
    if ones == 0 or ones == n:
        raise ClassMissing("response has a single class")
    if np.linalg.matrix_rank(X) < p:
        raise Singular("design matrix is rank deficient")

    beta = np.zeros(p)
    deviance_prev = math.inf
    converged = False
    iterations = 0

    def newton_step(beta):
        mu = _sigmoid(X @ beta)
        score = X.T @ (y - mu)
        weights = mu * (1 - mu)
        info = (X * weights[:, None]).T @ X
        try:
            return beta + np.linalg.solve(info, score)
        except np.linalg.LinAlgError as exc:
            raise Singular(f"information matrix singular at iteration {iterations}") from exc

    for iterations in range(1, MAX_ITERATIONS + 1):
        beta = newton_step(beta)
        mu = _sigmoid(X @ beta)
        deviance = _deviance(y, mu)
        score = X.T @ (y - mu)
        if np.max(np.abs(score)) < SCORE_TOL or abs(deviance_prev - deviance) < DEVIANCE_RTOL * (
            abs(deviance) + DEVIANCE_RTOL
        ):
            converged = True
            if np.max(np.abs(beta)) <= SEPARATION_BOUND:
                # one polishing step: quadratic convergence makes the
                # closed-form cases exact to ~1e-10 and beyond
                beta = newton_step(beta)
            break
        deviance_prev = deviance

    mu = _sigmoid(X @ beta)
    weights = mu * (1 - mu)
    info = (X * weights[:, None]).T @ X
    try:
        covariance = np.linalg.inv(info)
    except np.linalg.LinAlgError as exc:
        raise Singular("observed information not invertible") from exc
    std_errors = np.sqrt(np.diag(covariance))
    z_values = beta / std_errors
    p_values = erfc(np.abs(z_values) / math.sqrt(2.0))
    runaway = float(np.max(np.abs(beta))) > SEPARATION_BOUND
    with np.errstate(over="ignore"):  # runaway fits overflow to inf odds
        odds_ratios = np.exp(beta)
    result = RegressionResult(
        terms=terms,
        coefficients=beta,
        std_errors=std_errors,
        z_values=z_values,
        p_values=p_values,
        odds_ratios=np.exp(beta),
        null_deviance=null_deviance(y),
        residual_deviance=_deviance(y, mu),
        converged=converged and not runaway,
        iterations=iterations,
    )
    if runaway:
        # runaway coefficients mean the MLE ran off to infinity: perfect
        # separation, whether or not a stopping rule technically fired
        raise Separation(
            f"|coefficient| > {SEPARATION_BOUND}; data likely separable", result=result
        )
    return result


def fit_design(design: DesignMatrix) -> RegressionResult:
    return fit_logistic(design.X, design.y, design.columns)


@dataclass(frozen=True)
class AnovaRow:
    term: str
    df: int
    deviance_drop: float
    resid_df: int
    resid_deviance: float
    p_value: float


def anova_sequential(design: DesignMatrix) -> list[AnovaRow]:
    """Type-I deviance table: add term groups in order, chi-square p per drop."""
    n = len(design.y)
    base_cols = [0]  # intercept
    rows: list[AnovaRow] = [
        AnovaRow("NULL", 0, 0.0, n - 1, null_deviance(design.y), math.nan)
    ]
    deviance_prev = rows[0].resid_deviance
    for term, cols in design.term_groups:
        base_cols = base_cols + list(cols)
        sub = design.X[:, base_cols]
        result = fit_logistic(sub, design.y, [design.columns[i] for i in base_cols])
        drop = deviance_prev - result.residual_deviance
        df = len(cols)
        rows.append(
            AnovaRow(
                term=term,
                df=df,
                deviance_drop=drop,
                resid_df=n - len(base_cols),
                resid_deviance=result.residual_deviance,
                p_value=float(gammaincc(df / 2.0, max(drop, 0.0) / 2.0)),
            )
        )
        deviance_prev = result.residual_deviance
    return rows


# --- rank statistics ---


def average_ranks(values) -> np.ndarray:
    """Ranks 1..n with ties replaced by the mean rank of the tied block."""
    v = np.asarray(values, dtype=float)
    order = np.argsort(v, kind="mergesort")
    ranks = np.empty(len(v), dtype=float)
    i = 0
    while i < len(v):
        j = i
        while j + 1 < len(v) and v[order[j + 1]] == v[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(x, y) -> float:
    """Spearman's rho: Pearson correlation of average-ranked values."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y) or len(x) < 2:
        raise ValueError("need two samples of equal length >= 2")
    rx = average_ranks(x)
    ry = average_ranks(y)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    sx = float(np.sqrt(np.sum(dx * dx)))
    sy = float(np.sqrt(np.sum(dy * dy)))
    if sx == 0.0 or sy == 0.0:
        raise DegenerateInput("zero variance in ranks")
    return float(np.sum(dx * dy) / (sx * sy))


def welch_t(a, b) -> tuple[float, float, float]:
    """Welch's unequal-variance t-test: (t, Welch-Satterthwaite df, two-sided p)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na, nb = len(a), len(b)
    if na < 2 or nb < 2:
        raise ValueError("each sample needs at least 2 observations")
    va = float(np.var(a, ddof=1))
    vb = float(np.var(b, ddof=1))
    if va == 0.0 and vb == 0.0:
        raise DegenerateInput("both samples have zero variance")
    sa, sb = va / na, vb / nb
    t = (float(np.mean(a)) - float(np.mean(b))) / math.sqrt(sa + sb)
    df = (sa + sb) ** 2 / (sa * sa / (na - 1) + sb * sb / (nb - 1))
    # two-sided p via the regularized incomplete beta function
    p = float(betainc(df / 2.0, 0.5, df / (df + t * t)))
    return t, df, p


# --- model builders ---


def one_hot_terms(values: list[str], reference: str) -> tuple[list[str], np.ndarray]:
    """Indicator columns for every non-reference level present in the data."""
    levels = sorted({v for v in values if v != reference})
    matrix = np.zeros((len(values), len(levels)))
    index = {level: k for k, level in enumerate(levels)}
    for row, value in enumerate(values):
        if value in index:
            matrix[row, index[value]] = 1.0
    return levels, matrix


def build_design(
    numeric: list[tuple[str, np.ndarray]],
    categorical: list[tuple[str, list[str], str]],
    y: np.ndarray,
) -> DesignMatrix:
    """Assemble intercept + numeric columns + one-hot groups, dropping constants."""
    n = len(y)
    columns = ["(Intercept)"]
    parts = [np.ones((n, 1))]
    groups: list[tuple[str, list[int]]] = []
    dropped: list[str] = []
    for name, values in numeric:
        values = np.asarray(values, dtype=float)
        if np.all(values == values[0]):
            dropped.append(name)
            continue
        groups.append((name, [len(columns)]))
        columns.append(name)
        parts.append(values.reshape(-1, 1))
    for name, values, reference in categorical:
        present = sorted(set(values))
        if reference not in present and present:
            # keep the fit well-posed when the nominal baseline is absent
            reference = present[0]
        levels, matrix = one_hot_terms(values, reference)
        keep = [k for k in range(len(levels)) if not np.all(matrix[:, k] == matrix[0, k])]
        if not keep:
            dropped.append(name)
            continue
        groups.append((name, list(range(len(columns), len(columns) + len(keep)))))
        columns.extend(levels[k] for k in keep)
        parts.append(matrix[:, keep])
    return DesignMatrix(
        columns=columns,
        X=np.hstack(parts),
        y=np.asarray(y, dtype=float),
        term_groups=groups,
        dropped=dropped,
    )


def age_years(epoch: int, horizon: int) -> float:
    """Elapsed years from an event to the analysis horizon (older = larger)."""
    return (horizon - epoch) / SECONDS_PER_YEAR


def build_blob_design(rows, horizon: int) -> DesignMatrix:
    """Blob-level model: Binary + CreationTime (age) + language contrasts."""
    y = np.array([1.0 if r.reused_within_window else 0.0 for r in rows])
    return build_design(
        numeric=[
            ("Binary", np.array([1.0 if r.is_binary else 0.0 for r in rows])),
            ("CreationTime", np.array([age_years(r.creation_time, horizon) for r in rows])),
        ],
        categorical=[("Language", [r.language for r in rows], "Other")],
        y=y,
    )


def build_project_design(rows, horizon: int) -> DesignMatrix:
    """Project-level model; counts enter log1p, times as age in years.

    Commits are deliberately absent: they duplicate activity and blob volume
    (rank correlation screening), mirroring the reported model.
    """
    y = np.array([1.0 if r.has_reused_origin else 0.0 for r in rows])
    return build_design(
        numeric=[
            ("Blobs", np.array([math.log1p(r.n_blobs) for r in rows])),
            ("Binary", np.array([r.binary_ratio for r in rows])),
            ("Authors", np.array([math.log1p(r.n_authors) for r in rows])),
            ("Forks", np.array([math.log1p(r.n_forks) for r in rows])),
            ("Stars", np.array([math.log1p(r.n_stars) for r in rows])),
            ("Time", np.array([age_years(r.earliest_commit_time, horizon) for r in rows])),
            ("Activity", np.array([math.log1p(r.activity_months) for r in rows])),
        ],
        categorical=[("Language", [r.dominant_language for r in rows], "Other")],
        y=y,
    )


PROJECT_PREDICTORS = ("Blobs", "Binary", "Commits", "Authors", "Forks", "Stars", "Time", "Activity")


def spearman_matrix(rows, horizon: int) -> dict[str, dict[str, float | None]]:
    """Pairwise Spearman correlations over the project predictors (Table-style)."""
    series = {
        "Blobs": [r.n_blobs for r in rows],
        "Binary": [r.binary_ratio for r in rows],
        "Commits": [r.n_commits for r in rows],
        "Authors": [r.n_authors for r in rows],
        "Forks": [r.n_forks for r in rows],
        "Stars": [r.n_stars for r in rows],
        "Time": [age_years(r.earliest_commit_time, horizon) for r in rows],
        "Activity": [r.activity_months for r in rows],
    }
    out: dict[str, dict[str, float | None]] = {}
    for a in PROJECT_PREDICTORS:
        out[a] = {}
        for b in PROJECT_PREDICTORS:
            try:
                out[a][b] = spearman(series[a], series[b]) if len(rows) >= 2 else None
            except DegenerateInput:
                out[a][b] = None
    return out
