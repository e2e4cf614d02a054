#!/usr/bin/env python3
"""Generate seeded oracle fixtures with statsmodels.

Each fixture is a pair of series (x, y) of length 200 written to
`fixture_<k>.csv`, plus `fixture_<k>.json` holding reference statistics:

* ADF (intercept+trend and intercept-only, 3 lagged differences)
* KPSS (level and trend, Bartlett bandwidth floor(4 (n/100)^(2/9)))
* VAR(p) coefficients for p in {2, 12}, ordered [const, L1.x, L1.y, L2.x, ...]
* Granger F statistics in both directions (restricted refit)
* nowcast joint F: y on y lags 3..12 and x lags 0..12 plus intercept
* elasticity: y on const + x with Newey-West (Bartlett) HAC, no small-sample factor

Usage: python3 scripts/gen_oracle_fixtures.py crates/nowcast/tests/fixtures/oracle
"""
import json
import math
import sys
from pathlib import Path

import numpy as np
import statsmodels.api as sm
from statsmodels.tsa.api import VAR
from statsmodels.tsa.stattools import adfuller, kpss

N = 200
BURN = 100


def white_noise(rng):
    return rng.standard_normal(N), rng.standard_normal(N)


def random_walks(rng):
    return np.cumsum(rng.standard_normal(N)), np.cumsum(rng.standard_normal(N))


def ar1_pair(rng):
    out = []
    for _ in range(2):
        e = rng.standard_normal(N + BURN)
        z = np.zeros(N + BURN)
        for t in range(1, N + BURN):
            z[t] = 0.5 * z[t - 1] + e[t]
        out.append(z[BURN:])
    return out[0], out[1]


def var1(rng):
    a = np.array([[0.4, 0.0], [0.3, 0.5]])  # rows: x, y equations
    e = rng.standard_normal((N + BURN, 2))
    z = np.zeros((N + BURN, 2))
    for t in range(1, N + BURN):
        z[t] = a @ z[t - 1] + e[t]
    z = z[BURN:]
    return z[:, 0], z[:, 1]


def nowcast_coupled(rng):
    x = 0.1 * rng.standard_normal(N + BURN)
    e = 0.05 * rng.standard_normal(N + BURN)
    y = np.zeros(N + BURN)
    for t in range(12, N + BURN):
        y[t] = 0.3 * y[t - 12] - 0.2 * y[t - 3] + 0.5 * x[t] + 0.3 * x[t - 1] + e[t]
    return x[BURN:], y[BURN:]


def seasonal_trend(rng):
    t = np.arange(N)
    season = np.sin(2 * np.pi * t / 12.0)
    e1 = rng.standard_normal(N)
    e2 = rng.standard_normal(N)
    x = 50 + 0.05 * t + 3 * season + e1
    y = np.zeros(N)
    y[0] = 8.0
    for k in range(1, N):
        y[k] = 8.0 + 0.6 * (y[k - 1] - 8.0) + 0.2 * (x[k - 1] - 50 - 0.05 * (k - 1)) + 0.5 * e2[k]
    return x, y


GENERATORS = [
    (101, "white_noise", white_noise),
    (202, "random_walks", random_walks),
    (303, "ar1_pair", ar1_pair),
    (404, "var1_x_causes_y", var1),
    (505, "nowcast_coupled", nowcast_coupled),
    (606, "seasonal_trend", seasonal_trend),
]


def default_bandwidth(n):
    return int(math.floor(4.0 * (n / 100.0) ** (2.0 / 9.0)))


def adf(z, regression):
    res = adfuller(z, maxlag=3, regression=regression, autolag=None)
    return float(res[0])


def kpss_stat(z, regression):
    stat, _, _, _ = kpss(z, regression=regression, nlags=default_bandwidth(len(z)))
    return float(stat)


def lagmat(z, lag, start, end):
    return z[start - lag:end - lag]


def nowcast_f(x, y):
    maxlag = 12
    rows = slice(maxlag, len(y))
    dep = y[rows]
    own = [y[maxlag - i:len(y) - i] for i in range(3, 13)]
    ext = [x[maxlag - j:len(x) - j] for j in range(0, 13)]
    xu = sm.add_constant(np.column_stack(own + ext))
    xr = sm.add_constant(np.column_stack(own))
    fu = sm.OLS(dep, xu).fit()
    fr = sm.OLS(dep, xr).fit()
    f, p, q = fu.compare_f_test(fr)
    return {
        "f": float(f),
        "p": float(p),
        "q": int(q),
        "adj_r2_with": float(fu.rsquared_adj),
        "adj_r2_without": float(fr.rsquared_adj),
        "n": int(fu.nobs),
    }


def granger_refit(x, y, p, cause_is_x):
    """Single-equation restricted refit, cross-check for the VAR Wald F."""
    n = len(x)
    rows = slice(p, n)
    effect = y if cause_is_x else x
    cause = x if cause_is_x else y
    dep = effect[rows]
    own = [effect[p - i:n - i] for i in range(1, p + 1)]
    oth = [cause[p - i:n - i] for i in range(1, p + 1)]
    fu = sm.OLS(dep, sm.add_constant(np.column_stack(own + oth))).fit()
    fr = sm.OLS(dep, sm.add_constant(np.column_stack(own))).fit()
    return float(fu.compare_f_test(fr)[0])


def var_block(x, y, p):
    data = np.column_stack([x, y])
    res = VAR(data).fit(p, trend="c")
    names = res.names
    params = res.params  # (1 + 2p) x 2
    g_xy = res.test_causality(names[1], [names[0]], kind="f")
    g_yx = res.test_causality(names[0], [names[1]], kind="f")
    f_xy = float(g_xy.test_statistic)
    f_yx = float(g_yx.test_statistic)
    assert abs(f_xy - granger_refit(x, y, p, True)) < 1e-8 * max(1.0, f_xy)
    assert abs(f_yx - granger_refit(x, y, p, False)) < 1e-8 * max(1.0, f_yx)
    return {
        "p": p,
        "coef_x_equation": [float(v) for v in params[:, 0]],
        "coef_y_equation": [float(v) for v in params[:, 1]],
        "granger_x_to_y_f": f_xy,
        "granger_x_to_y_p": float(g_xy.pvalue),
        "granger_y_to_x_f": f_yx,
        "granger_y_to_x_p": float(g_yx.pvalue),
    }


def elasticity(x, y):
    # differences so the regression is on stationary-looking data
    dx = np.diff(x)
    dy = np.diff(y)
    L = default_bandwidth(len(dy))
    X = sm.add_constant(dx)
    fit = sm.OLS(dy, X).fit(cov_type="HAC", cov_kwds={"maxlags": L, "use_correction": False})
    white = sm.OLS(dy, X).fit(cov_type="HC0")
    return {
        "bandwidth": L,
        "coef": [float(v) for v in fit.params],
        "hac_se": [float(v) for v in fit.bse],
        "white_se": [float(v) for v in white.bse],
    }


def main(out):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    for k, (seed, name, gen) in enumerate(GENERATORS, start=1):
        rng = np.random.default_rng(seed)
        x, y = gen(rng)
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        with open(out / f"fixture_{k}.csv", "w") as fh:
            fh.write("x,y\n")
            for a, b in zip(x, y):
                fh.write(f"{float(a)!r},{float(b)!r}\n")
        # Re-read exactly what was written so both sides consume the same doubles.
        arr = np.loadtxt(out / f"fixture_{k}.csv", delimiter=",", skiprows=1)
        x, y = arr[:, 0], arr[:, 1]
        expected = {
            "name": name,
            "seed": seed,
            "n": len(x),
            "kpss_bandwidth": default_bandwidth(len(x)),
            "adf_ct": {"x": adf(x, "ct"), "y": adf(y, "ct")},
            "adf_c": {"x": adf(x, "c"), "y": adf(y, "c")},
            "kpss_c": {"x": kpss_stat(x, "c"), "y": kpss_stat(y, "c")},
            "kpss_ct": {"x": kpss_stat(x, "ct"), "y": kpss_stat(y, "ct")},
            "var": [var_block(x, y, 2), var_block(x, y, 12)],
            "nowcast": nowcast_f(x, y),
            "elasticity": elasticity(x, y),
        }
        with open(out / f"fixture_{k}.json", "w") as fh:
            json.dump(expected, fh, indent=2)
            fh.write("\n")
        print(f"fixture_{k}: {name}")


if __name__ == "__main__":
    import warnings

    warnings.simplefilter("ignore")
    main(sys.argv[1] if len(sys.argv) > 1 else "crates/nowcast/tests/fixtures/oracle")
