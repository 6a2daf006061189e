"""Commutator breaker search on F2 x Z candidates.

    python3 scripts/breaker_search.py --n1 6 --n2 12

Runs the shipped naive candidate (sound, so the verdict is a rejected
commutator) and a deliberately unsound pair-eraser (a breaker is found by
splicing).
"""
import argparse
import time

from cannon.groups import f2xz_oracle
from cannon.history import f2xz_test_sets, find_breaker, naive_f2xz_candidate
from cannon.rewrite import INCREMENTAL, RewritingSystem, Rule, rule


def pair_eraser():
    free = ["a", "A", "b", "B"]
    rules = [Rule((x, y), ()) for x in free for y in free] + [rule("z.Z"), rule("Z.z")]
    alpha = tuple(free + ["z", "Z"])
    return RewritingSystem(INCREMENTAL, alpha, alpha, tuple(rules), name="pair-eraser")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n1", type=int, default=6)
    ap.add_argument("--n2", type=int, default=12)
    ap.add_argument("--budget", type=int, default=10 ** 5)
    args = ap.parse_args()
    O = f2xz_oracle()
    for S, (n1, n2) in ((naive_f2xz_candidate(4), (args.n1, args.n2)), (pair_eraser(), (4, 12))):
        T1, T2 = f2xz_test_sets(n1, n2)
        t = time.perf_counter()
        rep = find_breaker(S, O, T1, T2, budget=args.budget)
        w = ".".join(rep.witness) if rep.witness else "-"
        print(f"{S.name:>14}: {rep.verdict:20} pairs={rep.pairs} buckets={rep.buckets} "
              f"collisions={rep.collisions} verified={rep.splices_verified} "
              f"{time.perf_counter() - t:.1f}s")
        print(f"{'':>16}witness {w}  checks {rep.checks}")


if __name__ == "__main__":
    main()
