#!/usr/bin/env python3
"""Run the full certification sweep and write traces + reports.

Covers every certifiable method/theorem pairing on the built-in problems at
moderate horizons. Exit code mirrors the CLI convention: 0 when every
certificate passes.

Usage:
    python scripts/certify_suite.py [output_dir]
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from gdcert.harness import RunConfig, run_experiment  # noqa: E402

SWEEP = [
    dict(problem="p1", method="gd", steps=10_000, theorems=["gd-regret"]),
    dict(problem="experts-alt", method="gd", steps=10_000, set="ball",
         theorems=["gd-regret"]),
    dict(problem="p1", method="sc-gd", steps=10_000,
         theorems=["sc-regret", "sc-average"]),
    dict(problem="p2", method="smooth-gd", steps=1_000,
         theorems=["smooth-value-log", "smooth-value-scaled",
                   "smooth-value-distance"]),
    dict(problem="lse3", method="smooth-gd", steps=1_000,
         theorems=["smooth-value-log", "smooth-value-scaled",
                   "smooth-value-distance"]),
    dict(problem="p2", method="smooth-gd", steps=1_000, set="ball",
         theorems=["smooth-projected"]),
    dict(problem="p2", method="smooth-gd", steps=1_000, set="simplex",
         x0=[0.5, 0.5], theorems=["smooth-projected"]),
    dict(problem="p2", method="frank-wolfe", steps=1_000, set="simplex",
         x0=[0.5, 0.5], theorems=["frank-wolfe"]),
    dict(problem="p2", method="frank-wolfe", steps=1_000, set="box",
         schedule="fw-1t", theorems=["frank-wolfe-log"]),
    dict(problem="p2", method="wellcond-gd", steps=200,
         theorems=["well-conditioned", "well-conditioned-distance"]),
    dict(problem="p3", method="wellcond-gd", steps=200,
         theorems=["well-conditioned", "well-conditioned-distance"]),
    dict(problem="experts-alt", method="mirror-negentropy", steps=1_000,
         set="simplex", theorems=["mirror-regret"]),
    dict(problem="experts-alt", method="mirror-euclidean", steps=1_000,
         set="ball", theorems=["mirror-regret"]),
    dict(problem="p2", method="agm2", steps=500, theorems=["agm-smooth"]),
    dict(problem="p3", method="agm2", steps=500, theorems=["agm-smooth"]),
    dict(problem="lse3", method="agm2", steps=500, theorems=["agm-smooth"]),
    dict(problem="p2", method="agm2", steps=500, set="simplex",
         x0=[0.5, 0.5], theorems=["agm-smooth"]),
    dict(problem="lse3", method="agm2", steps=500, set="simplex",
         theorems=["agm-smooth"]),
    dict(problem="lse3", method="agm2-negentropy", steps=200, set="simplex",
         x0=[0.6, 0.3, 0.1], theorems=["agm-mirror"]),
    dict(problem="p3", method="sc-agm", steps=200, theorems=["agm-sc"]),
    # the pedagogical diagnostic: expected to find a violating step on the
    # badly conditioned instance
    dict(problem="p3", method="smooth-gd", steps=1_000,
         theorems=["failed-potential"]),
]


def main() -> int:
    out_dir = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "suite-out")
    out_dir.mkdir(parents=True, exist_ok=True)
    worst = 0
    for i, raw in enumerate(SWEEP):
        raw = dict(raw)
        set_id = raw.pop("set", "unconstrained")
        theorems = raw.pop("theorems")
        stem = f"{i:02d}-{raw['problem']}-{raw['method']}"
        config = RunConfig(feasible_set=set_id, certify=True, theorems=theorems,
                           out=str(out_dir / f"{stem}.json"), **raw)
        result = run_experiment(config)
        for rep in result.reports:
            mark = "pass" if rep.passed else "FAIL"
            flags = f" {rep.flags}" if rep.flags else ""
            print(f"{stem:28s} {rep.theorem:26s} {mark}{flags}")
        worst = max(worst, result.exit_code)
    print(f"\nwrote traces and reports to {out_dir}/")
    return worst


if __name__ == "__main__":
    sys.exit(main())
