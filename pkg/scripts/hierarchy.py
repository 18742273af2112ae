"""Count sp / step / interleaving verdict patterns on generated bounded term pairs."""
import argparse
import random
from collections import Counter

from fnmnet.compare import term_pair
from fnmnet.equiv import EquivConfig, interleaving_bisim, sp_bisim, step_bisim
from fnmnet.errors import ResourceError
from fnmnet.gen import CATEGORIES, TermGen
from fnmnet.laws import rewrite
from fnmnet.petri import is_bounded


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pairs", type=int, default=300)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--size", type=int, default=3)
    args = ap.parse_args()

    cfg = EquivConfig(reach_cap=3_000, linking_cap=50_000)
    g, rng = TermGen(args.seed), random.Random(args.seed)
    patterns, limited, violations = Counter(), 0, []
    for i in range(args.pairs):
        cat = CATEGORIES[i % len(CATEGORIES)]
        p = g.term(cat, args.size)
        q = rewrite(p, rng, g.env) if i % 2 else g.term(cat, args.size)
        tp = term_pair(p, q, g.env)
        if not (is_bounded(tp.net, tp.m1) and is_bounded(tp.net, tp.m2)):
            continue
        try:
            v = tuple(f(tp.net, tp.m1, tp.m2, config=cfg).equivalent for f in (sp_bisim, step_bisim, interleaving_bisim))
        except ResourceError:
            limited += 1
            continue
        patterns[v] += 1
        if (v[0] and not v[1]) or (v[1] and not v[2]):
            violations.append((p, q))
    print("sp     step   int    pairs")
    for v, n in sorted(patterns.items(), reverse=True):
        print(" ".join(f"{str(b):<6}" for b in v), n)
    print(f"resource-limited {limited}, hierarchy violations {len(violations)}")


if __name__ == "__main__":
    main()
