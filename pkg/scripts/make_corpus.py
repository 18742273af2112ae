"""Write the fixture nets and terms to corpus/ as JSON and .fnm files."""
import json
from pathlib import Path

from fnmnet.corpus import ALL_NETS, ALL_TERMS, PC1_NET, PC2_NET, PC_LINKS
from fnmnet.petri import disjoint_union, net_to_json

EXTRA_TERMS = {
    "interleave": "a.0 | b.0\n",
    "interleave_seq": "a.b.0 + b.a.0\n",
    "nil_sum": "0 + 0\n",
    "nil": "0\n",
}


def main(out: Path = Path(__file__).resolve().parent.parent / "corpus") -> None:
    out.mkdir(exist_ok=True)
    for name, net in ALL_NETS.items():
        (out / f"{name}.json").write_text(net_to_json(net) + "\n")
    for name, src in {**ALL_TERMS, **EXTRA_TERMS}.items():
        (out / f"{name}.fnm").write_text(src)
    union, r1, r2 = disjoint_union(PC1_NET, PC2_NET)
    (out / "pc_union.json").write_text(net_to_json(union) + "\n")
    links = [[r1[a], r2[b]] for a, b in PC_LINKS]
    (out / "pc_links.json").write_text(json.dumps(links) + "\n")
    print(f"wrote {len(list(out.iterdir()))} files to {out}")


if __name__ == "__main__":
    main()
