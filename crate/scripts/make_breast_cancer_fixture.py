"""Writes the 8-feature breast-cancer fixture used by the acceptance suite.

Takes the eight "mean" measurements of the Wisconsin diagnostic breast
cancer set shipped with scikit-learn, min-max scales each column to
[0, pi], and writes f0..f7,label rows (0 = malignant, 1 = benign).
"""

import csv
import math
import sys
from pathlib import Path

from sklearn.datasets import load_breast_cancer


def main(out: Path) -> None:
    data = load_breast_cancer()
    x = data.data[:, :8]
    lo, hi = x.min(axis=0), x.max(axis=0)
    scaled = (x - lo) / (hi - lo) * math.pi
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as f:
        w = csv.writer(f)
        w.writerow([f"f{i}" for i in range(8)] + ["label"])
        for row, label in zip(scaled, data.target):
            w.writerow([repr(float(v)) for v in row] + [int(label)])


if __name__ == "__main__":
    default = Path(__file__).resolve().parent.parent / "crates/cli/tests/data/breast_cancer_8.csv"
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else default)
