"""Deterministic report and CSV emission.

Reports are JSON with sorted keys; every big-float value is rendered
through one decimal formatter at a fixed digit count, so identical
scenario + package version + backend reproduce byte-identical files.
Wall-clock timings are therefore never written into the report file;
the CLI prints them to stdout instead.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .backends import big_backend_name, format_complex, format_real
from .scenarios import Scenario

SCHEMA_VERSION = 1
TOOL_VERSION = "0.1.0"
DIGITS = 40


def report_body(command: str, scenario: Scenario, payload: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": "weyldisc",
        "tool_version": TOOL_VERSION,
        "backend": "native" if scenario.precision.mode == "native-float" else big_backend_name(),
        "command": command,
        "scenario": scenario.to_dict(),
        **payload,
    }


def _jsonable(value):
    if isinstance(value, float) and (value != value or value in (float("inf"), float("-inf"))):
        return repr(value)
    return value


def dump_report(report: dict, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(report, sort_keys=True, indent=2, default=_jsonable)
    path.write_text(text + "\n")
    return path


DISC_CSV_HEADER = ["N", "center_re", "center_im", "radius", "S_psi", "T_chi"]


def write_disc_csv(path: str | Path, kernel, discs, psi_sums, chi_sums) -> Path:
    """One row per disc sample; N strictly increasing by construction."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    psi_by_n = dict(psi_sums)
    chi_by_n = dict(chi_sums or ())
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(DISC_CSV_HEADER)
        for disc in discs:
            writer.writerow([
                disc.n,
                format_real(kernel, kernel.re(disc.center), DIGITS),
                format_real(kernel, kernel.im(disc.center), DIGITS),
                format_real(kernel, disc.radius, DIGITS),
                format_real(kernel, psi_by_n[disc.n], DIGITS),
                format_real(kernel, chi_by_n[disc.n], DIGITS) if disc.n in chi_by_n else "",
            ])
    return path


def complex_entry(kernel, z) -> dict:
    return format_complex(kernel, z, DIGITS)


def real_entry(kernel, x) -> str:
    return format_real(kernel, x, DIGITS)
