"""Place-value arithmetic with the decimal system for Z.

    python3 scripts/decimal_demo.py 572 --count 1000000
"""
import argparse
import time

from cannon.expanding import balanced_value, z_decimal_system, z_spec
from cannon.rewrite import format_word, reduce


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("n", type=int, nargs="*", default=[572, 12, -35])
    ap.add_argument("--count", type=int, default=0, help="also reduce 1^c (-1)^(c-1)")
    args = ap.parse_args()
    Z = z_decimal_system()
    print(f"{len(Z.rules)} rules, window {Z.window}")
    for n in args.n:
        w = ("1",) * n if n >= 0 else ("-1",) * -n
        t = time.perf_counter()
        r = reduce(Z, w)
        print(f"{n:>8}  {format_word(r)}  value={balanced_value(z_spec(10), r)}  "
              f"{time.perf_counter() - t:.4f}s")
    if args.count:
        c = args.count
        t = time.perf_counter()
        r = reduce(Z, ("1",) * c + ("-1",) * (c - 1))
        print(f"count {c} up, {c - 1} down: {format_word(r)}  {time.perf_counter() - t:.2f}s")


if __name__ == "__main__":
    main()
