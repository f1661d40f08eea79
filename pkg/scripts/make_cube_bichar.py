"""Regenerate fixtures/cube_bichar.json: a degree bicharacter cocycle on the cube graph.

c(l, m) = exp(2 pi i theta d(l)_2 d(m)_1), tabulated for d(l) + d(m) <= bound.
"""

import argparse
import cmath
import json
import math
from pathlib import Path

from kgraphlab import load_kgraph
from kgraphlab.kgraph import dadd, dleq

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--theta", type=float, default=0.3)
    ap.add_argument("--bound", default="2,2,1")
    ap.add_argument("--out", default=str(ROOT / "fixtures" / "cube_bichar.json"))
    args = ap.parse_args()
    g = load_kgraph(str(ROOT / "fixtures" / "fix_cube.kg"))
    B = tuple(int(x) for x in args.bound.split(","))
    pairs = []
    for lam in g.paths_up_to(B):
        for mu in g.paths_up_to(B, lam.source):
            if not dleq(dadd(lam.degree, mu.degree), B):
                continue
            t = args.theta * lam.degree[1] * mu.degree[0]
            if t % 1 == 0:
                continue
            z = cmath.exp(2j * math.pi * t)
            pairs.append({"mu": lam.label, "nu": mu.label, "re": z.real, "im": z.imag})
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump({"bound": list(B), "pairs": pairs}, fh, indent=1)
    print(f"wrote {len(pairs)} entries to {args.out}")


if __name__ == "__main__":
    main()
