"""Producer/consumer nets: sp verdicts for a few marking pairs, with and without the link hint."""
import time

from fnmnet.corpus import PC1_NET, PC2_NET, PC_LINKS, bounded_pc
from fnmnet.equiv import EquivConfig, SpRelation, check_sp_relation, interleaving_bisim, sp_bisim, step_bisim
from fnmnet.errors import ResourceError
from fnmnet.multiset import Multiset
from fnmnet.petri import disjoint_union, format_marking

PAIRS = [
    ({"P1": 1, "C1": 1}, {"P2": 1, "C2": 1}),
    ({"P1": 2, "C1": 3, "D1": 1}, {"P2": 2, "C2": 3, "D2''": 1}),
    ({"D1": 1, "C1'": 1}, {"D2'": 1, "C2'": 1}),
    ({"D1": 2, "C1": 1}, {"D2'": 1, "D2''": 1, "C2": 1}),
    ({"P1": 1, "C1": 1}, {"P2": 1, "C2'": 1}),
]


def main():
    cfg = EquivConfig(reach_cap=2_000, linking_cap=50_000)
    u, r1, r2 = disjoint_union(PC1_NET, PC2_NET)
    links = [(r1[a], r2[b]) for a, b in PC_LINKS]
    print("unbounded nets, link hint L+ first, then the fallback")
    for a, b in PAIRS:
        m1 = Multiset({r1[k]: v for k, v in a.items()})
        m2 = Multiset({r2[k]: v for k, v in b.items()})
        t0 = time.perf_counter()
        try:
            v = sp_bisim(u, m1, m2, links=links, config=cfg).equivalent
        except ResourceError as exc:
            v = f"resource limit ({exc})"
        print(f"  {format_marking(m1):<28} {format_marking(m2):<34} sp={v}  {time.perf_counter() - t0:.2f}s")
    for k in (2, 4, 8):
        t0 = time.perf_counter()
        ok, _ = check_sp_relation(u, SpRelation.closure(links, k))
        print(f"  L+ up to size {k}: {'transfer holds' if ok else 'transfer fails'}  {time.perf_counter() - t0:.2f}s")

    print("\nbounded truncations, full fixpoint without hints")
    for budget in range(1, 5):
        n1, n2, _ = bounded_pc(budget)
        v, s1, s2 = disjoint_union(n1, n2)
        m1, m2 = n1.initial.map(s1.__getitem__), n2.initial.map(s2.__getitem__)
        t0 = time.perf_counter()
        sp = sp_bisim(v, m1, m2, config=cfg)
        stp = step_bisim(v, m1, m2, cfg).equivalent
        itl = interleaving_bisim(v, m1, m2, cfg).equivalent
        print(f"  budget {budget}: sp={sp.equivalent} step={stp} int={itl} witness={len(sp.witness or [])}"
              f"  {time.perf_counter() - t0:.2f}s")


if __name__ == "__main__":
    main()
