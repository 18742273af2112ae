"""Small nets and terms used as fixtures, examples and experiment inputs."""
from __future__ import annotations

from .petri import Net, make_net

# one-place semi-counter: every inc adds a token, dec consumes three
SEMICOUNTER_NET = make_net(
    ["s1", "s2"],
    [({"s1": 1}, "inc", {"s1": 1, "s2": 1}), ({"s2": 3}, "dec", {})],
    {"s1": 1},
)

SEMICOUNTER_FNM = """\
# (1/3)-semi-counter: three tokens of the side process are needed for one dec
A := inc.(A | (<c>.<c>.dec.0 + ~c.0));
main = (nu c) A;
"""

CHOICE_FNM = "a.0 + ~a.0\n"

# a net whose dynamic and static subnets differ
SUBNET_NET = make_net(
    ["s1", "s2", "s3", "s4", "s5"],
    [
        ({"s1": 1}, "b", {"s4": 1}),
        ({"s4": 1}, "a", {"s1": 1}),
        ({"s1": 2, "s2": 1}, "c", {"s5": 1}),
        ({"s3": 1}, "d", {}),
    ],
    {"s1": 1, "s2": 2},
)

# statically reduced but not dynamically reduced
STATIC_ONLY_NET = make_net(
    ["s1", "s2", "s3"],
    [({"s1": 1}, "a", {"s2": 1}), ({"s1": 2}, "b", {"s3": 1})],
    {"s1": 1},
)

# producer/consumer, single kind of item
PC1_NET = make_net(
    ["P1", "C1", "D1", "C1'"],
    [
        ({"P1": 1}, "prod", {"P1": 1, "D1": 1}),
        ({"D1": 1, "C1": 1}, "del", {"C1'": 1}),
        ({"C1'": 1}, "cons", {"C1": 1}),
    ],
    {"P1": 1, "C1": 1},
)

# producer/consumer, two indistinguishable kinds of item
PC2_NET = make_net(
    ["P2", "C2", "D2'", "D2''", "C2'"],
    [
        ({"P2": 1}, "prod", {"P2": 1, "D2'": 1}),
        ({"P2": 1}, "prod", {"P2": 1, "D2''": 1}),
        ({"D2'": 1, "C2": 1}, "del", {"C2'": 1}),
        ({"D2''": 1, "C2": 1}, "del", {"C2'": 1}),
        ({"C2'": 1}, "cons", {"C2": 1}),
    ],
    {"P2": 1, "C2": 1},
)

PC_LINKS = [("P1", "P2"), ("C1", "C2"), ("C1'", "C2'"), ("D1", "D2'"), ("D1", "D2''")]

PC1_FNM = """\
P1 := prod.(P1 | D1);
D1 := ~a.0;
C1 := <a>.del.C1';
C1' := cons.C1;
main = (nu a) (P1 | C1);
"""

PC2_FNM = """\
P2 := prod.(P2 | D2') + prod.(P2 | D2'');
D2' := ~b.0;
D2'' := ~b.0;
C2 := <b>.del.C2';
C2' := cons.C2;
main = (nu b) (P2 | C2);
"""


def bounded_pc(budget: int) -> tuple:
    """Both producer/consumer nets with a budget place limiting production; returns ``(net1, net2, links)``."""
    n1 = make_net(
        ["P1", "C1", "D1", "C1'", "B1"],
        [
            ({"P1": 1, "B1": 1}, "prod", {"P1": 1, "D1": 1}),
            ({"D1": 1, "C1": 1}, "del", {"C1'": 1}),
            ({"C1'": 1}, "cons", {"C1": 1}),
        ],
        {"P1": 1, "C1": 1, "B1": budget},
    )
    n2 = make_net(
        ["P2", "C2", "D2'", "D2''", "C2'", "B2"],
        [
            ({"P2": 1, "B2": 1}, "prod", {"P2": 1, "D2'": 1}),
            ({"P2": 1, "B2": 1}, "prod", {"P2": 1, "D2''": 1}),
            ({"D2'": 1, "C2": 1}, "del", {"C2'": 1}),
            ({"D2''": 1, "C2": 1}, "del", {"C2'": 1}),
            ({"C2'": 1}, "cons", {"C2": 1}),
        ],
        {"P2": 1, "C2": 1, "B2": budget},
    )
    return n1, n2, PC_LINKS + [("B1", "B2")]


ALL_NETS: dict = {
    "semicounter": SEMICOUNTER_NET,
    "subnets": SUBNET_NET,
    "static_only": STATIC_ONLY_NET,
    "pc1": PC1_NET,
    "pc2": PC2_NET,
}

ALL_TERMS: dict = {
    "semicounter": SEMICOUNTER_FNM,
    "choice": CHOICE_FNM,
    "pc1": PC1_FNM,
    "pc2": PC2_FNM,
}


def net(name: str) -> Net:
    return ALL_NETS[name]
