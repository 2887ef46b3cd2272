#!/usr/bin/env python3
"""Measured gap vs theoretical envelope, side by side, on the kappa = 100
quadratic: plain well-conditioned descent against both accelerated variants.

Usage:
    python scripts/rate_table.py [T] [--csv path]
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

import numpy as np  # noqa: E402

from gdcert.accel import run_agm2, run_sc_agm  # noqa: E402
from gdcert.certify import rate_comparison  # noqa: E402
from gdcert.problems import get_problem  # noqa: E402
from gdcert.smooth import run_well_conditioned  # noqa: E402


def main() -> int:
    args = [a for a in sys.argv[1:] if not a.startswith("--")]
    T = int(args[0]) if args else 120
    p3 = get_problem("p3")
    x0 = np.array([1.0, 1.0])

    traces = [
        run_well_conditioned(p3, x0, T),
        run_agm2(p3, x0, T),
        run_sc_agm(p3, x0, T),
    ]
    table = rate_comparison(traces, ["well-conditioned", "agm-smooth", "agm-sc"])

    if "--csv" in sys.argv:
        path = sys.argv[sys.argv.index("--csv") + 1]
        with open(path, "w") as fh:
            fh.write(",".join(table["columns"]) + "\n")
            for row in table["rows"]:
                fh.write(",".join("" if v is None else repr(float(v))
                                  for v in row) + "\n")
        print(f"wrote {path}")
        return 0

    print(" | ".join(f"{c:>24s}" for c in table["columns"]))
    stride = max(1, T // 12)
    for row in table["rows"][1::stride]:
        cells = [f"{row[0]:>24d}"]
        cells += ["" .rjust(24) if v is None else f"{v:24.3e}" for v in row[1:]]
        print(" | ".join(cells))
    return 0


if __name__ == "__main__":
    sys.exit(main())
