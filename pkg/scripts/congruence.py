"""Run the congruence harness and print per-context counts."""
import argparse
import json
import time

from fnmnet.laws import CongruenceConfig, check_congruence


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()

    t0 = time.perf_counter()
    rep = check_congruence(CongruenceConfig(seed=args.seed, count=args.count))
    if args.json:
        print(json.dumps(rep.to_dict(), indent=2, default=str))
        return
    print(f"pairs {rep.pairs} (distinct {rep.distinct}), not sp-bisimilar {rep.not_applicable}, "
          f"resource-limited {rep.resource_limited}")
    for name, st in list(rep.contexts.items()) + [("recursion", rep.recursion)]:
        print(f"  {name:<13} checked {st.checked:>4}  preserved {st.preserved:>4}  violations {len(st.violations)}"
              f"  limited {st.resource_limited}  n/a {st.not_applicable}")
    print(f"open example closes to sp-bisimilar constants: {rep.example}")
    print(f"{time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
