#!/usr/bin/env python3
"""Run the acceptance suite and show only its PASS/FAIL lines."""
import subprocess
import sys
from pathlib import Path

root = Path(__file__).resolve().parent.parent
proc = subprocess.run([sys.executable, "-m", "pytest", str(root / "tests" / "test_acceptance.py"), "-q", "-s"],
                      capture_output=True, text=True)
lines = [l for l in proc.stdout.splitlines() if l.startswith(("[PASS]", "[FAIL]"))]
print("\n".join(lines) if lines else proc.stdout)
print(proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr)
sys.exit(proc.returncode)
