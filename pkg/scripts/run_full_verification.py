#!/usr/bin/env python3
"""Run every verification pipeline at acceptance scale and write the JSON
reports to a directory.

Usage: python scripts/run_full_verification.py [--fast] [--out-dir reports]
Exit status 0 only if every pipeline passes.
"""

import argparse
import pathlib
import sys

from congruence_forge import engine


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--fast", action="store_true", help="trimmed bounds for a quick pass")
    ap.add_argument("--out-dir", default="reports", help="directory for the JSON reports")
    args = ap.parse_args()

    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    reports = engine.full_verification(fast=args.fast)
    width = max(len(k) for k in reports)
    failures = 0
    for name, rep in reports.items():
        (out / f"{name}.json").write_text(rep.to_json() + "\n", encoding="utf-8")
        print(f"{name:<{width}}  {rep.status:<4}  instances={rep.instances:<8} "
              f"elapsed={rep.elapsed_ms}ms")
        if not rep.ok:
            failures += 1
            for ce in rep.counterexamples[:3]:
                print(f"  counterexample: {ce}")
    print(f"\n{len(reports) - failures}/{len(reports)} pipelines passed; "
          f"reports in {out}/")
    return 0 if failures == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
