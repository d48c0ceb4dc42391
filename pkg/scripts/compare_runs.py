# scripts/compare_runs.py
"""
Run Directory Comparison Script

Purpose:
- Confirm two runs of the same configuration produced byte-identical CSV tables
- Report missing, extra and differing tables with the first differing line

Usage:
    python scripts/compare_runs.py runs/a runs/b
    python scripts/compare_runs.py runs/a runs/b --include-json
"""

import argparse
import sys
from pathlib import Path
from typing import Dict, List, Optional


def first_difference(a: bytes, b: bytes) -> Optional[int]:
    """1-based line number of the first differing line, None if identical"""
    if a == b:
        return None
    lines_a, lines_b = a.split(b"\n"), b.split(b"\n")
    for i, (la, lb) in enumerate(zip(lines_a, lines_b), start=1):
        if la != lb:
            return i
    return min(len(lines_a), len(lines_b)) + 1


def compare_runs(dir_a: Path, dir_b: Path, patterns: List[str]) -> Dict[str, List[str]]:
    """Byte comparison of every file matching the patterns"""
    report = {"identical": [], "different": [], "missing": [], "extra": []}
    names_a = sorted({p.name for pattern in patterns for p in dir_a.glob(pattern)})
    names_b = sorted({p.name for pattern in patterns for p in dir_b.glob(pattern)})
    for name in names_a:
        if name not in names_b:
            report["missing"].append(name)
            continue
        line = first_difference((dir_a / name).read_bytes(), (dir_b / name).read_bytes())
        if line is None:
            report["identical"].append(name)
        else:
            report["different"].append(f"{name} (line {line})")
    report["extra"] = [name for name in names_b if name not in names_a]
    return report


def main(argv: Optional[List[str]] = None) -> int:
    """Main function with command line interface"""
    parser = argparse.ArgumentParser(description="Byte-compare the CSV tables of two run directories")
    parser.add_argument("run_a", help="First run directory")
    parser.add_argument("run_b", help="Second run directory")
    parser.add_argument("--include-json", action="store_true", help="Also compare <suite>.json files")
    args = parser.parse_args(argv)

    dir_a, dir_b = Path(args.run_a), Path(args.run_b)
    for d in (dir_a, dir_b):
        if not d.is_dir():
            print(f"❌ Not a directory: {d}")
            return 2

    patterns = ["*.csv"] + (["*.json"] if args.include_json else [])
    report = compare_runs(dir_a, dir_b, patterns)

    print("🔍 Run Comparison")
    print("=" * 40)
    print(f"✅ Identical: {len(report['identical'])}")
    for key, marker in (("different", "❌"), ("missing", "⚠️"), ("extra", "⚠️")):
        for name in report[key]:
            print(f"{marker} {key}: {name}")

    ok = not (report["different"] or report["missing"] or report["extra"])
    print("=" * 40)
    print("🎉 Runs are byte-identical" if ok else "❌ Runs differ")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
