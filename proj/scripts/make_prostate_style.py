"""Write data/prostate_style.csv: a synthetic stand-in shaped like the
Stamey et al. prostate data (97 rows, 8 predictors, response lpsa).

Values are drawn, not measured. The sample correlation matrix of the nine
columns equals the published full-data correlation matrix, and each
column has the published mean and sd. Every column is continuous, so svi,
gleason and pgg45 are smooth surrogates of the original coded values.
"""

import csv
import pathlib

import numpy as np

NAMES = ["lcavol", "lweight", "age", "lbph", "svi", "lcp", "gleason", "pgg45", "lpsa"]

CORR = np.array([
    [1.000, 0.281, 0.225, 0.027, 0.539, 0.675, 0.432, 0.434, 0.734],
    [0.281, 1.000, 0.348, 0.442, 0.155, 0.165, 0.057, 0.107, 0.433],
    [0.225, 0.348, 1.000, 0.350, 0.118, 0.128, 0.269, 0.276, 0.170],
    [0.027, 0.442, 0.350, 1.000, -0.086, -0.007, 0.078, 0.078, 0.180],
    [0.539, 0.155, 0.118, -0.086, 1.000, 0.673, 0.320, 0.458, 0.566],
    [0.675, 0.165, 0.128, -0.007, 0.673, 1.000, 0.515, 0.632, 0.549],
    [0.432, 0.057, 0.269, 0.078, 0.320, 0.515, 1.000, 0.752, 0.369],
    [0.434, 0.107, 0.276, 0.078, 0.458, 0.632, 0.752, 1.000, 0.422],
    [0.734, 0.433, 0.170, 0.180, 0.566, 0.549, 0.369, 0.422, 1.000],
])

MEAN = np.array([1.350, 3.629, 63.87, 0.100, 0.216, -0.179, 6.753, 24.38, 2.478])
SD = np.array([1.179, 0.428, 7.445, 1.451, 0.414, 1.398, 0.722, 28.20, 1.154])


def main(seed=19970301, n=97):
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n, len(NAMES)))
    z -= z.mean(0)
    # Whiten to identity sample covariance, then impose the target.
    white = z @ np.linalg.inv(np.linalg.cholesky(np.cov(z, rowvar=False))).T
    x = white @ np.linalg.cholesky(CORR).T
    x = MEAN + x * SD

    out = pathlib.Path(__file__).resolve().parent.parent / "data" / "prostate_style.csv"
    with out.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(NAMES)
        for row in x:
            w.writerow([f"{v:.9g}" for v in row])


if __name__ == "__main__":
    main()
