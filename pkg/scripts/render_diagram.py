"""Draw the history diagram of a reduction as SVG and report its widths.

    python3 scripts/render_diagram.py --word 1.1.1.1.1.1.1.1.1.1.1.1 -o diagram.svg
"""
import argparse

from cannon.expanding import z_decimal_system
from cannon.history import build_diagram, check_width_lemmas, render_ascii, render_svg
from cannon.rewrite import parse_word, reduce_traced


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--word", default=".".join(["1"] * 23))
    ap.add_argument("--boundaries", default="")
    ap.add_argument("-o", "--output", default="diagram.svg")
    args = ap.parse_args()
    S = z_decimal_system()
    bnd = [int(x) for x in args.boundaries.split(",") if x]
    d = build_diagram(reduce_traced(S, parse_word(args.word)), bnd, W=S.window)
    rep = check_width_lemmas(d)
    print(render_ascii(d))
    print(f"rows={len(d.rows)} max generation={rep.max_generation} violations={len(rep.violations)}")
    with open(args.output, "w", encoding="utf-8") as f:
        f.write(render_svg(d))
    print(f"wrote {args.output}")


if __name__ == "__main__":
    main()
