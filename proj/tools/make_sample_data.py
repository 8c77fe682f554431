"""Writes the synthetic sample data set under docs/sample/."""

import csv
import datetime as dt
import pathlib

import numpy as np

OUT = pathlib.Path(__file__).resolve().parent.parent / "docs" / "sample"
N_DAYS = 1250

# (id, hazard_p, spread, recovery, alpha_q, alpha_h)
OBLIGORS = [
    ("BANK_A", 0.050, "", 0.40, 0.10, 0.45),
    ("BANK_B", 0.030, "", 0.35, 0.20, 0.40),
    ("BROKER_C", "", 0.030, 0.40, 0.05, 0.50),
    ("INSURER_D", 0.020, "", 0.45, 0.25, 0.35),
    ("LENDER_E", "", 0.024, 0.40, 0.15, 0.55),
]


def business_days(start, n):
    d = start
    out = []
    while len(out) < n:
        if d.weekday() < 5:
            out.append(d)
        d += dt.timedelta(days=1)
    return out


def write_returns(path, dates, values):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["date", "return"])
        for d, v in zip(dates, values):
            w.writerow([d.isoformat(), f"{v:.10f}"])


def main():
    rng = np.random.default_rng(2003)
    OUT.mkdir(parents=True, exist_ok=True)
    dates = business_days(dt.date(2003, 1, 2), N_DAYS)
    hectic = rng.random(N_DAYS) < 0.4132
    z = np.where(hectic, rng.normal(-0.08, 1.07, N_DAYS), rng.normal(0.10, 0.43, N_DAYS))
    write_returns(OUT / "market.csv", dates, z / 100.0)

    zs = (z - z.mean()) / z.std()
    rows = []
    for oid, p, s, r, aq, ah in OBLIGORS:
        a = np.where(hectic, ah, aq)
        u = a * zs + np.sqrt(1 - a * a) * rng.standard_normal(N_DAYS)
        write_returns(OUT / f"{oid.lower()}.csv", dates, 1.8 * u / 100.0)
        rows.append([oid, p, s, r, "", "", f"{oid.lower()}.csv"])

    with open(OUT / "portfolio.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["obligor_id", "hazard_p", "spread", "recovery", "recovery_floor",
                    "exposure", "returns_file"])
        w.writerows(rows)

    with open(OUT / "spreads.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["obligor_id", "hazard_p", "spread", "recovery", "recovery_floor",
                    "exposure", "returns_file", "spread_kind"])
        w.writerow(["CDS_1", "", 0.02, 0.6, "", "", "", "cds"])
        w.writerow(["CDS_2", "", 0.03, 0.4, "", "", "", "cds"])
        w.writerow(["BOND_3", "", 0.012, 0.4, 0.1, 5.0e7, "", "credit"])


if __name__ == "__main__":
    main()
