"""Phase-corrected inclusion ladders: FIX-A with rotation cocycles, the cube graph with
random coboundaries. Reports commuting-square residuals and whether the phases are trivial."""

import argparse
import cmath
import json
import math
import random
from pathlib import Path

from kgraphlab import (build_family, load_kgraph, omega_ladder, rotation_cocycle, table_cocycle,
                       trivial_cocycle)
from kgraphlab.kgraph import dadd, dleq

FIX = Path(__file__).resolve().parent.parent / "fixtures"


def coboundary(g, B, seed):
    rng = random.Random(seed)
    b = {p: cmath.exp(2j * math.pi * rng.random()) for p in g.paths_up_to(B) if not p.is_vertex()}
    entries = {}
    for lam in g.paths_up_to(B):
        for mu in g.paths_up_to(B, lam.source):
            if lam.is_vertex() or mu.is_vertex() or not dleq(dadd(lam.degree, mu.degree), B):
                continue
            entries[(lam, mu)] = b[lam] * b[mu] / b[g.compose(lam, mu)]
    return table_cocycle(g, entries, B)


def summary(rep):
    return {"pass": rep.passed, "omega_identically_one": rep.info["omega_identically_one"],
            "residuals": {r.relation: r.max_residual for r in rep.results}}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=3)
    args = ap.parse_args()
    out = []
    A = load_kgraph(str(FIX / "fix_a.kg"))
    chain = [A.parse_paths(x) for x in ("v", "v,e", "v,e,f")]
    for theta in (0.25, 0.3):
        c = rotation_cocycle(A, theta)
        out.append({"graph": "fix_a", "theta": theta,
                    "b=trivial": summary(omega_ladder(A, trivial_cocycle(A), c, chain, (4, 4), (2, 2))),
                    "b=c": summary(omega_ladder(A, c, c, chain, (4, 4), (2, 2)))})
    cube = load_kgraph(str(FIX / "fix_cube.kg"))
    cchain = [cube.parse_paths(x) for x in ("v,a1,a2", "v,a1,a2,b1,b2,c1")]
    for seed in range(args.seeds):
        c = coboundary(cube, (2, 2, 1), seed)
        out.append({"graph": "fix_cube", "seed": seed,
                    "b=trivial": summary(omega_ladder(cube, trivial_cocycle(cube), c, cchain,
                                                      (2, 2, 1), (0, 0, 0)))})
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
