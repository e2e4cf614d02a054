"""Write the bundled synthetic country fixtures.

Four pseudo-countries with 120 months (2004-01..2013-12) of unemployment
rates and weekly search-intensity exports. Monthly dynamics on the
differenced scale:

    g_t  = 0.3 g_{t-1} + kappa du_{t-1} + season_g + eta_t     (d log GI)
    du_t = 0.2 du_{t-1} + b0 g_t + b1 g_{t-1} + season_u + e_t  (d UR)

XD has b0 = b1 = kappa = 0 and independent shocks. Weekly values put the
monthly log level on the week's midpoint plus noise, rescaled so the
maximum is 100 and rounded to integers; rates are rounded to one decimal.
"""

import datetime as dt
import pathlib

import numpy as np

OUT = pathlib.Path(__file__).resolve().parent.parent / "crates/nowcast/tests/fixtures/synthetic"

COUNTRIES = {
    "XA": dict(seed=11, b0=1.0, b1=4.0, kappa=0.03, ur0=7.5),
    "XB": dict(seed=22, b0=0.8, b1=3.5, kappa=0.0, ur0=9.8),
    "XC": dict(seed=33, b0=1.2, b1=4.5, kappa=0.04, ur0=13.0),
    "XD": dict(seed=44, b0=0.0, b1=0.0, kappa=0.0, ur0=11.2),
}

START = (2003, 12)
N_MONTHS = 122  # 2003-12 .. 2014-01 so weekly coverage spans the sample
SEASON_U = 0.25 * np.array([1.2, 0.6, -0.2, -0.6, -0.7, -0.4, 0.1, 0.0, -0.3, -0.2, 0.1, 0.4])
SEASON_G = 0.05 * np.array([1.0, 0.4, 0.0, -0.2, -0.3, -0.4, -0.2, 0.3, 0.3, 0.1, -0.2, -0.8])


def month_of(i):
    y, m = START[0] + (START[1] - 1 + i) // 12, (START[1] - 1 + i) % 12 + 1
    return y, m


def simulate(p):
    rng = np.random.default_rng(p["seed"])
    burn = 60
    n = N_MONTHS + burn
    g = np.zeros(n)
    du = np.zeros(n)
    eta = rng.normal(0.0, 0.06, n)
    e = rng.normal(0.0, 0.1, n)
    for t in range(1, n):
        m = month_of(t - burn)[1] - 1
        g[t] = 0.3 * g[t - 1] + p["kappa"] * du[t - 1] + SEASON_G[m] + eta[t]
        du[t] = 0.2 * du[t - 1] + p["b0"] * g[t] + p["b1"] * g[t - 1] + SEASON_U[m] + e[t]
    g, du = g[burn:], du[burn:]
    log_gi = 4.0 + np.cumsum(g) - np.cumsum(g).mean()
    ur = p["ur0"] + np.cumsum(du) - du[0]
    return log_gi, ur, rng


def write(code, p):
    log_gi, ur, rng = simulate(p)
    with open(OUT / f"{code.lower()}_unemployment.csv", "w") as f:
        f.write("month,rate\n")
        for i in range(1, N_MONTHS - 1):
            y, m = month_of(i)
            f.write(f"{y:04d}-{m:02d},{ur[i]:.1f}\n")

    week = dt.date(2003, 12, 28)
    end = dt.date(2014, 1, 1)
    rows = []
    while week < end:
        mid = week + dt.timedelta(days=3)
        i = (mid.year - START[0]) * 12 + mid.month - START[1]
        rows.append((week, log_gi[i] + rng.normal(0.0, 0.03)))
        week += dt.timedelta(days=7)
    top = max(v for _, v in rows)
    with open(OUT / f"{code.lower()}_trends.csv", "w") as f:
        f.write("week,interest\n")
        for d, v in rows:
            f.write(f"{d.isoformat()},{int(round(100.0 * np.exp(v - top)))}\n")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for code, p in COUNTRIES.items():
        write(code, p)


if __name__ == "__main__":
    main()
