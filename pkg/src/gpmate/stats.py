"""Nonparametric tests for paired experiment data.

Everything here operates on matrices whose rows are runs (blocks) and
whose columns are the compared approaches (treatments): real-valued
matrices for Friedman/Wilcoxon/Bartlett, boolean matrices for Cochran's
Q/McNemar. Runs are paired because every row shares one run seed.

All p-values come from our own chi-square survival function (regularized
incomplete gamma) or, for Wilcoxon, from exact sign-pattern enumeration
below a size threshold and a tie/continuity-corrected normal
approximation above it. No external statistics library is used, so every
routine can be validated against independent references in the tests.
"""

import math

import numpy as np

__all__ = [
    "friedman_test",
    "wilcoxon_signed_rank",
    "cochran_q",
    "mcnemar",
    "bartlett_test",
    "chi_square_sf",
    "bonferroni",
    "report",
]

ALPHA = 0.05


def _paired_matrix(samples, dtype=np.float64):
    m = np.asarray(samples, dtype=dtype)
    if m.ndim != 2 or m.shape[0] < 2 or m.shape[1] < 2:
        raise ValueError("need a (runs x treatments) matrix with both dims >= 2")
    if dtype is np.float64 and not np.isfinite(m).all():
        raise ValueError("samples must be finite with no missing entries")
    return m


def _rank_with_ties(values):
    """Ranks 1..n with tied values sharing their average rank."""
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def friedman_test(samples):
    """Tie-corrected Friedman chi-square over row-wise ranks.

    Returns (statistic, p_value); a matrix whose rows are all internally
    tied carries no ranking information and yields (0, 1).
    """
    m = _paired_matrix(samples)
    n, k = m.shape
    ranks = np.vstack([_rank_with_ties(row) for row in m])
    column_rank_sums = ranks.sum(axis=0)
    uncorrected = (12.0 / (n * k * (k + 1))) * np.sum(
        column_rank_sums**2
    ) - 3.0 * n * (k + 1)
    ties = 0.0
    for row in m:
        _, counts = np.unique(row, return_counts=True)
        ties += float(np.sum(counts**3 - counts))
    correction = 1.0 - ties / (n * k * (k * k - 1))
    if correction <= 0.0:
        return 0.0, 1.0
    statistic = max(0.0, float(uncorrected) / correction)
    return statistic, chi_square_sf(statistic, k - 1)


def _exact_min_rank_sum_p(ranks, observed):
    """P(min(W+, W-) <= observed) over all 2^n equally likely sign
    assignments of the given ranks. Ranks are half-integers, so the
    comparisons below are exact in binary floating point."""
    n = len(ranks)
    total = float(np.sum(ranks))
    patterns = np.arange(1 << n, dtype=np.uint64)
    bits = (patterns[:, None] >> np.arange(n, dtype=np.uint64)) & 1
    w_plus = bits.astype(np.float64) @ np.asarray(ranks, dtype=np.float64)
    w_min = np.minimum(w_plus, total - w_plus)
    return float(np.count_nonzero(w_min <= observed + 1e-9)) / (1 << n)


def wilcoxon_signed_rank(a, b, exact_threshold=12):
    """Two-sided Wilcoxon signed-rank test on paired vectors.

    Zero differences are dropped; |differences| get average ranks; the
    statistic is W = min(W+, W-). With at most `exact_threshold` non-zero
    differences the p-value enumerates all sign patterns (the two-sided
    convention is P(min rank sum <= W)); beyond that a normal
    approximation with tie and continuity corrections is used. All
    differences zero gives p = 1 by convention.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1 or len(a) < 2:
        raise ValueError("need two equal-length 1-d vectors with length >= 2")
    diff = a - b
    diff = diff[diff != 0.0]
    n = len(diff)
    if n == 0:
        return 0.0, 1.0
    ranks = _rank_with_ties(np.abs(diff))
    w_plus = float(ranks[diff > 0].sum())
    w_minus = float(ranks[diff < 0].sum())
    statistic = min(w_plus, w_minus)
    if n <= exact_threshold:
        return statistic, _exact_min_rank_sum_p(ranks, statistic)
    mean = n * (n + 1) / 4.0
    _, counts = np.unique(ranks, return_counts=True)
    tie_term = float(np.sum(counts**3 - counts)) / 48.0
    variance = n * (n + 1) * (2 * n + 1) / 24.0 - tie_term
    if variance <= 0.0:
        return statistic, 1.0
    z = (statistic - mean + 0.5) / math.sqrt(variance)
    return statistic, min(1.0, 2.0 * _normal_cdf(z))


def cochran_q(outcomes):
    """Cochran's Q over a boolean (runs x treatments) matrix.

    Q = k(k-1) * sum_j (C_j - N/k)^2 / (k * sum_i R_i - sum_i R_i^2),
    referred to chi-square with k-1 df. Rows where every treatment agrees
    cancel out of both sums; if all rows are constant, Q is defined as 0
    with p = 1.
    """
    m = _paired_matrix(outcomes, dtype=np.bool_).astype(np.int64)
    n, k = m.shape
    col_totals = m.sum(axis=0)
    row_totals = m.sum(axis=1)
    grand = float(m.sum())
    denominator = float(k * row_totals.sum() - np.sum(row_totals**2))
    if denominator == 0.0:
        return 0.0, 1.0
    numerator = float(k * (k - 1) * np.sum((col_totals - grand / k) ** 2))
    statistic = numerator / denominator
    return statistic, chi_square_sf(statistic, k - 1)


def mcnemar(a, b):
    """Continuity-corrected McNemar test on two paired boolean vectors.

    With discordant counts b10 = (true, false) and b01 = (false, true),
    the statistic is (|b10 - b01| - 1)^2 / (b10 + b01) on chi-square with
    1 df; no discordant pairs gives p = 1.
    """
    a = np.asarray(a, dtype=np.bool_)
    b = np.asarray(b, dtype=np.bool_)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("need two equal-length 1-d boolean vectors")
    b10 = int(np.count_nonzero(a & ~b))
    b01 = int(np.count_nonzero(~a & b))
    if b10 + b01 == 0:
        return 0.0, 1.0
    statistic = (abs(b10 - b01) - 1) ** 2 / (b10 + b01)
    return statistic, chi_square_sf(statistic, 1)


def bartlett_test(samples):
    """Bartlett's equal-variance test across the matrix columns.

    Undefined (ValueError) when any column has zero variance.
    """
    m = _paired_matrix(samples)
    n, k = m.shape
    variances = m.var(axis=0, ddof=1)
    if np.any(variances <= 0.0):
        raise ValueError("bartlett test undefined for zero-variance columns")
    total = n * k
    pooled = float(np.sum((n - 1) * variances)) / (total - k)
    numerator = (total - k) * math.log(pooled) - float(
        np.sum((n - 1) * np.log(variances))
    )
    correction = 1.0 + (k / (n - 1) - 1.0 / (total - k)) / (3.0 * (k - 1))
    statistic = max(0.0, numerator / correction)
    return statistic, chi_square_sf(statistic, k - 1)


def _normal_cdf(z):
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def chi_square_sf(x, df):
    """Chi-square survival function via the regularized incomplete gamma.

    Uses the classic series expansion for small x and the Lentz continued
    fraction otherwise; both iterate to machine precision, comfortably
    inside 1e-10 relative error.
    """
    x = float(x)
    df = int(df)
    if df < 1:
        raise ValueError("df must be >= 1")
    if x < 0:
        raise ValueError("x must be >= 0")
    if x == 0.0:
        return 1.0
    a = df / 2.0
    z = x / 2.0
    if z < a + 1.0:
        return 1.0 - _lower_gamma_series(a, z)
    return _upper_gamma_cf(a, z)


def _lower_gamma_series(a, z):
    # P(a, z) = z^a e^-z / Gamma(a) * sum_n z^n / (a (a+1) ... (a+n))
    term = 1.0 / a
    total = term
    denom = a
    for _ in range(1000):
        denom += 1.0
        term *= z / denom
        total += term
        if abs(term) < abs(total) * 1e-16:
            break
    return total * math.exp(-z + a * math.log(z) - math.lgamma(a))


def _upper_gamma_cf(a, z):
    # Q(a, z) via modified Lentz continued fraction
    tiny = 1e-300
    b = z + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 1000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h * math.exp(-z + a * math.log(z) - math.lgamma(a))


def bonferroni(p, m):
    """Family-wise corrected p-value: min(1, m * p)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return min(1.0, m * p)


def report(name, statistic, p_value, alpha=ALPHA, comparisons=1):
    """Uniform JSON-ready record for one test outcome."""
    corrected = float(bonferroni(float(p_value), comparisons))
    return {
        "test": name,
        "statistic": float(statistic),
        "p_value": float(p_value),
        "alpha": alpha,
        "comparisons": comparisons,
        "p_corrected": corrected,
        "significant": bool(corrected < alpha),
    }
