"""Enumerate ideal pairs for the small fixtures at a few bounds and report counts and timing."""

import argparse
import json
import time
from pathlib import Path

from kgraphlab import enumerate_ideal_pairs, load_kgraph
from kgraphlab.satiation import enumerate_fe

FIX = Path(__file__).resolve().parent.parent / "fixtures"

RUNS = [("fix_c.kg", (1,), "empty"), ("fix_c.kg", (2,), "empty"), ("fix_b.kg", (2,), "empty"),
        ("fix_b.kg", (2,), "all-fe"), ("fix_a.kg", (1, 1), "empty"), ("fix_chain.kg", (2,), "empty")]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-size", type=int, default=2)
    args = ap.parse_args()
    rows = []
    for name, D, rel in RUNS:
        g = load_kgraph(str(FIX / name))
        coll = set()
        if rel == "all-fe":
            for v in g.vertices:
                coll |= enumerate_fe(g, v, D, args.max_size)
        t0 = time.perf_counter()
        pairs = enumerate_ideal_pairs(g, coll, D, args.max_size)
        rows.append({"fixture": name, "bound": list(D), "relations": rel,
                     "pairs": len(pairs), "H": sorted({tuple(sorted(p.H)) for p in pairs}),
                     "seconds": round(time.perf_counter() - t0, 3)})
    print(json.dumps(rows, indent=2))


if __name__ == "__main__":
    main()
