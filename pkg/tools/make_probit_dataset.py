"""Generate the bundled monthly bloom dataset.

Synthetic subtropical weather for Jan 2000 through May 2006 (77 months)
with a bloom indicator drawn from a probit on warm minimum temperatures,
the previous month's rainfall and solar exposure. Regenerating with the
same seed reproduces the file byte for byte.

Usage: python3 tools/make_probit_dataset.py
"""

from __future__ import annotations

import csv
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from bloomlab.probit import DEFAULT_COVARIATES, build_design, load_dataset_csv

OUT = Path(__file__).resolve().parents[1] / "src" / "bloomlab" / "data" / "demo_bloom_monthly.csv"
SEED = 20000131
N_MONTHS = 77


def month_sequence(n: int):
    year, month = 2000, 1
    for _ in range(n):
        yield year, month
        year, month = (year + 1, 1) if month == 12 else (year, month + 1)


def zscore(x: np.ndarray) -> np.ndarray:
    return (x - x.mean()) / x.std()


def main() -> int:
    rng = np.random.default_rng(SEED)
    months = list(month_sequence(N_MONTHS))
    # southern-hemisphere seasonality: hottest and wettest around January
    phase = np.array([np.cos(2.0 * np.pi * (m - 1) / 12.0) for _, m in months])

    min_temp = 16.0 + 5.0 * phase + rng.normal(0.0, 1.0, N_MONTHS)
    max_temp = min_temp + 8.5 + 1.5 * phase + rng.normal(0.0, 1.0, N_MONTHS)
    solar = 21.0 + 6.0 * phase + rng.normal(0.0, 1.5, N_MONTHS)
    rainfall = rng.gamma(2.0, (110.0 + 70.0 * phase) / 2.0, N_MONTHS)
    clear_sky = np.clip(0.62 - 0.0012 * rainfall + rng.normal(0.0, 0.06, N_MONTHS), 0.15, 0.92)

    rain_lag = np.concatenate([rainfall[:1], rainfall[:-1]])
    latent = (
        -0.70
        + 0.90 * zscore(min_temp)
        + 0.80 * zscore(rain_lag)
        + 0.45 * zscore(solar)
        + rng.normal(0.0, 1.0, N_MONTHS)
    )
    bloom = (latent > 0.0).astype(int)

    OUT.parent.mkdir(parents=True, exist_ok=True)
    with OUT.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["year", "month", "bloom", "min_temp", "max_temp", "solar_exposure", "clear_sky", "rainfall_mm"])
        for i, (year, month) in enumerate(months):
            writer.writerow(
                [
                    year,
                    month,
                    bloom[i],
                    f"{min_temp[i]:.1f}",
                    f"{max_temp[i]:.1f}",
                    f"{solar[i]:.1f}",
                    f"{clear_sky[i]:.3f}",
                    f"{rainfall[i]:.1f}",
                ]
            )

    data = load_dataset_csv(OUT)
    design = build_design(data, DEFAULT_COVARIATES)
    print(f"wrote {OUT} ({len(data)} rows, bloom rate {bloom.mean():.3f})")
    print(f"design: {design.X.shape[0]} rows x {design.X.shape[1]} candidates")
    if len(data) != N_MONTHS or design.X.shape != (N_MONTHS - 1, 17):
        raise SystemExit("dataset shape check failed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
