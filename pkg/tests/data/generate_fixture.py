"""Regenerate the synthetic discharge fixture.

Twelve winter seasons of daily values: one independent Brown-Resnick block
per season, pushed through a monotone map to a discharge-like scale.  The
monotone map changes neither clusters nor ordinal patterns, so analyses on
this fixture behave like analyses on the raw max-stable path.

Run from the repository root:  python3 tests/data/generate_fixture.py
"""

import calendar
import csv
import datetime as dt
from pathlib import Path

import numpy as np
from numpy.random import SeedSequence, default_rng

from exclust.simulate import ModelSpec, _simulate_br

SEED = 777
FIRST_SEASON = 1990
N_SEASONS = 12
OUT = Path(__file__).parent / "synthetic_discharge.csv"


def season_dates(year: int):
    """Dec 1 of `year` through Mar 31 of `year + 1` (121 or 122 days)."""
    start = dt.date(year, 12, 1)
    end = dt.date(year + 1, 3, 31)
    days = (end - start).days + 1
    assert days == 122 if calendar.isleap(year + 1) else days == 121
    return [start + dt.timedelta(days=i) for i in range(days)]


def main():
    model = ModelSpec.brown_resnick(0.1, 1.75)
    rows = []
    for s in range(N_SEASONS):
        year = FIRST_SEASON + s
        dates = season_dates(year)
        rng = default_rng(SeedSequence(SEED, spawn_key=(s,)))
        x = _simulate_br(model.variogram, np.arange(len(dates)), rng)
        discharge = 800.0 + 600.0 * np.log1p(x)
        rows += [
            (d.isoformat(), format(float(v), ".17g")) for d, v in zip(dates, discharge)
        ]
    with open(OUT, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "discharge"])
        writer.writerows(rows)
    print(f"wrote {OUT} ({len(rows)} rows)")


if __name__ == "__main__":
    main()
