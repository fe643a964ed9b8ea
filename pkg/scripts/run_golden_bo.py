"""Run the bundled golden-ratio conservation demo and summarize the drift.

Equivalent to `qpbo simulate configs/golden_bo.ini` followed by a quick
look at the observables table.
"""

import sys
from pathlib import Path

import numpy as np

from qpbo.cli import main as qpbo_main

ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    config = ROOT / "configs" / "golden_bo.ini"
    status = qpbo_main(["simulate", str(config)])
    if status != 0:
        return status
    table = (ROOT / "out" / "golden_bo" / "observables.csv").read_text().splitlines()
    header = table[0].split(",")
    rows = np.array([[float(v) for v in line.split(",")] for line in table[1:]])
    for name in ("I1", "I2", "I3", "H_trunc"):
        col = rows[:, header.index(name)]
        drift = np.max(np.abs(col - col[0]))
        rel = drift / max(abs(col[0]), 1e-300)
        print(f"{name:8s} initial {col[0]:+.6e}   max drift {drift:.3e} (rel {rel:.3e})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
