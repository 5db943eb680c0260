"""Rewrite the oracle-generated JSON files shipped in moyalqm/data."""
import json
from pathlib import Path

from moyalqm.perturbation import EPSILON_PRESETS, ERRATA_STATES, HamiltonianSpec, errata_table, golden_record

DATA = Path(__file__).resolve().parents[1] / "src" / "moyalqm" / "data"


def dump(name, obj):
    (DATA / name).write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n")


def main():
    dump("table_errata.json", errata_table())
    golden = [
        golden_record(HamiltonianSpec(lam=lam, epsilon=eps), n)
        for lam in (0.0, 1.0)
        for eps in EPSILON_PRESETS
        for n in ERRATA_STATES
    ]
    dump("golden_perturbation.json", golden)


if __name__ == "__main__":
    main()
