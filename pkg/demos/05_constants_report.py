"""Fitted constants and the chain linking parabolic to elliptic bounds.

Reads records written by ``torushom sweep`` (default ``results/``) and
prints the constants report.  Run for example

    torushom sweep --config demos/sweep.ini
    python demos/05_constants_report.py results/records.csv
"""
import sys

from torushom.harness.analysis import constants_report
from torushom.harness.sweep import read_records

path = sys.argv[1] if len(sys.argv) > 1 else "results/records.csv"
report = constants_report(read_records(path))
print(report.to_text())
print("all checks pass" if report.passed else "some checks FAIL")
