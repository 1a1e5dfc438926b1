"""Run the acceptance checks, print a pass/fail table, optionally save the JSON report.

usage: python3 scripts/run_acceptance.py [--only C1,C6] [--out report.json]
"""

import argparse
import sys

from irrper import __version__
from irrper.checks import ALL_CHECKS, CheckConfig
from irrper.report import Report


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--only", help="comma-separated check ids")
    ap.add_argument("--out")
    ap.add_argument("--seed", type=int, default=CheckConfig.seed)
    args = ap.parse_args(argv)
    cfg = CheckConfig(seed=args.seed)
    wanted = set(args.only.split(",")) if args.only else None
    rep = Report(__version__, {"mode": "verify", "seed": cfg.seed})
    for i, fn in enumerate(ALL_CHECKS, 1):
        if wanted and f"C{i}" not in wanted:
            continue
        chk = fn(cfg)
        rep.checks.append(chk)
        print(f"{chk.line():<70} {chk.seconds:8.2f} s", flush=True)
    print(f"{sum(c.passed for c in rep.checks)}/{len(rep.checks)} passed")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(rep.to_json())
    return 0 if rep.passed else 3


if __name__ == "__main__":
    sys.exit(main())
