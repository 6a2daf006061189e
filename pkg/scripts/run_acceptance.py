"""Print one PASS/FAIL line per acceptance criterion.

    python3 scripts/run_acceptance.py [--scale 0.1] [--only 1,2,3] [--details]
"""
import argparse
import json

from cannon.acceptance import run_all


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--scale", type=float, default=1.0)
    ap.add_argument("--only")
    ap.add_argument("--details", action="store_true")
    args = ap.parse_args()
    only = {int(x) for x in args.only.split(",")} if args.only else None
    res = run_all(args.seed, args.scale, only, out=None)
    for r in res:
        print(f"{r.line()}  ({r.seconds:.1f}s)")
        if args.details:
            print("    " + json.dumps(r.detail, sort_keys=True, default=str))
    raise SystemExit(0 if all(r.passed for r in res) else 1)


if __name__ == "__main__":
    main()
