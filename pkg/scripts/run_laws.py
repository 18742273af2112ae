"""Verify every axiom schema on seeded random instances and write a table and a JSON report."""
import argparse
import json
import time
from pathlib import Path

from fnmnet.equiv import EquivConfig
from fnmnet.laws import SCHEMATA, LawConfig, report_table, run_schema


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--schema", action="append", choices=SCHEMATA)
    ap.add_argument("--out", type=Path, default=Path("results/laws.json"))
    args = ap.parse_args()

    cfg = LawConfig(seed=args.seed, count=args.count, equiv=EquivConfig(reach_cap=5_000, linking_cap=100_000))
    reports, timing = {}, {}
    for s in args.schema or SCHEMATA:
        t0 = time.perf_counter()
        reports[s] = run_schema(s, cfg)
        timing[s] = round(time.perf_counter() - t0, 2)
        r = reports[s]
        print(f"{s:<5} sound {r.sound}/{r.instances}  cex {len(r.counterexamples)}  limited {r.resource_limited}  {timing[s]}s", flush=True)
    print()
    print(report_table(reports))
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(json.dumps({"seed": args.seed, "count": args.count, "seconds": timing,
                                    "reports": {k: v.to_dict() for k, v in reports.items()}}, indent=2))
    print(f"\nwrote {args.out}")


if __name__ == "__main__":
    main()
