"""Regenerate the packaged golden CSVs with the simulator CLI.

Development-time helper: figs itself never imports fdsumrate, but the
reference data is produced by it so the CSV format stays authentic.
Run from the figs directory with both packages installed:

    python tools/make_golden.py
"""

import io
from pathlib import Path

from fdsumrate.cli import ExperimentSpec, run

GOLDEN = Path(__file__).resolve().parent.parent / "src" / "figs" / "golden"

DB5 = [10.0 ** (p / 10.0) for p in range(0, 45, 5)]

SPECS = {
    "delta_sweep.csv": ExperimentSpec(
        base={"n_d": 2, "n_u": 2},
        sweep="delta", values=(0.1, 0.3, 0.5, 0.7, 0.9),
        schemes=("MrcMrt", "hd_ac", "hd_rc"), trials=2000, seed=7),
    "sigma_aa2_sweep.csv": ExperimentSpec(
        base={"n_d": 2, "n_u": 2},
        sweep="sigma_aa2", values=(1e-3, 1e-2, 1e-1, 1.0, 10.0),
        schemes=("MrcMrt", "MrcZf", "ZfMrt", "Optimal", "hd_ac"),
        trials=2000, seed=7),
    "pa_sweep.csv": ExperimentSpec(
        base={"n_d": 2, "n_u": 2},
        sweep="P_a", values=tuple(DB5),
        schemes=("MrcMrt", "hd_rc"), trials=2000, seed=7),
    "d_sweep.csv": ExperimentSpec(
        base={"n_d": 2, "n_u": 2},
        sweep="d", values=(5.0, 25.0, 50.0, 100.0, 150.0),
        schemes=("MrcMrt", "MrcZf", "hd_ac"), trials=2000, seed=7),
    "antennas_sweep.csv": ExperimentSpec(
        sweep="n_antennas", values=(1.0, 2.0, 3.0, 4.0),
        schemes=("MrcMrt", "Optimal", "hd_ac"), trials=1000, seed=7),
}


def main() -> None:
    GOLDEN.mkdir(parents=True, exist_ok=True)
    for name, spec in SPECS.items():
        out = GOLDEN / name
        rows = run(ExperimentSpec(**{**spec.__dict__, "out": str(out)}),
                   stream=io.StringIO())
        print(f"{out.name}: {len(rows)} rows")


if __name__ == "__main__":
    main()
