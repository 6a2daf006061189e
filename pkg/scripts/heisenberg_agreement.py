"""Differential run of the generated U3(Z) system against the matrix oracle.

    python3 scripts/heisenberg_agreement.py --words 10000 --seed 0
"""
import argparse
import random
import time
from collections import Counter

from cannon.expanding import balanced_value, heisenberg_system, parse_normal_form
from cannon.groups import HeisenbergOracle
from cannon.rewrite import reduce


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--words", type=int, default=10000)
    ap.add_argument("--max-len", type=int, default=30)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--K", type=int, default=10)
    args = ap.parse_args()
    t = time.perf_counter()
    S = heisenberg_system(K=args.K)
    spec = S.families[0].spec
    print(f"built in {time.perf_counter() - t:.1f}s; ball of radius {2 * args.K}: "
          f"{len(S.families[0].table)} elements")
    H = HeisenbergOracle()
    rng = random.Random(args.seed)
    heights, bad = Counter(), 0
    t = time.perf_counter()
    for _ in range(args.words):
        w = tuple(rng.choice(H.gens) for _ in range(rng.randint(0, args.max_len)))
        r = reduce(S, w)
        heights[parse_normal_form(r).height] += 1
        bad += balanced_value(spec, r) != H.evaluate(w) or (r == ()) != H.is_identity(w)
    print(f"{args.words} words, {bad} disagreements, {time.perf_counter() - t:.1f}s")
    print("heights:", dict(sorted(heights.items())))
    # long words leave the ball and show the place-value structure
    for n in (30, 200, 1000):
        w = ("x",) * n + ("y",) * n
        r = reduce(S, w)
        nf = parse_normal_form(r)
        ok = balanced_value(spec, r) == H.evaluate(w)
        print(f"x^{n} y^{n}: height {nf.height}, length {len(r)}, value ok={ok}")


if __name__ == "__main__":
    main()
