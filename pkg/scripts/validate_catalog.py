#!/usr/bin/env python3
"""
Script to validate crystal catalog files
Checks schema, Sellmeier invariants and published reference indices (on load)
plus grid and pump-band coverage
"""

import sys
from pathlib import Path
from typing import List, Optional

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from spdcopt.config import get_catalog_dir  # noqa: E402
from spdcopt.errors import ConfigurationError  # noqa: E402
from spdcopt.models.crystal import CrystalSpec  # noqa: E402
from spdcopt.utils.catalog import load_crystal_file  # noqa: E402


def check_crystal(crystal: CrystalSpec) -> List[str]:
    """Return a list of problems (empty when the entry is usable)"""
    problems = []

    lo_nm, hi_nm = crystal.grid.lambda_nm
    if not 0 < lo_nm < hi_nm or crystal.grid.points < 2:
        problems.append(f"invalid grid {crystal.grid.lambda_nm} x {crystal.grid.points}")
        return problems

    def axes(role: str) -> set:
        if crystal.is_angle_dependent(role):
            return {"o", "e"}
        return {crystal.roles.get(role)}

    for axes_used, lo, hi, what in (
        (axes("signal") | axes("idler"), lo_nm, hi_nm, "signal/idler grid"),
        (axes("pump"), lo_nm / 2, hi_nm / 2, "pump band"),
    ):
        for axis in sorted(axes_used):
            r_lo, r_hi = crystal.models[axis].valid_range_um
            if lo * 1e-3 < r_lo or hi * 1e-3 > r_hi:
                problems.append(
                    f"{what} [{lo:.1f}, {hi:.1f}] nm outside range of model '{axis}' [{r_lo}, {r_hi}] um"
                )

    return problems


def main(argv: Optional[List[str]] = None) -> int:
    """Validate every *.json file in the given (or configured) catalog directory"""
    argv = sys.argv[1:] if argv is None else argv
    directory = Path(argv[0]) if argv else get_catalog_dir()
    files = sorted(directory.glob("*.json"))
    if not files:
        print(f"✗ No catalog files in {directory}")
        return 1

    failures = 0
    for path in files:
        try:
            crystal = load_crystal_file(path)
        except ConfigurationError as e:
            print(f"✗ {path.name}: {e}")
            failures += 1
            continue

        problems = check_crystal(crystal)
        if problems:
            failures += 1
            for problem in problems:
                print(f"✗ {path.name}: {problem}")
        else:
            print(f"✓ {path.name} ({crystal.name}, {len(crystal.models)} models)")

    print(f"\n{len(files) - failures}/{len(files)} catalog files valid")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
