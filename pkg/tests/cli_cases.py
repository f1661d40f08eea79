"""One representative invocation per CLI command, with the expected exit status."""

import subprocess
import sys

from conftest import FIXTURES

A, B, C = (str(FIXTURES / f) for f in ("fix_a.kg", "fix_b.kg", "fix_c.kg"))
CORRUPT = str(FIXTURES / "corrupt.kg")
REL_B, REL_C = str(FIXTURES / "relations_b.json"), str(FIXTURES / "relations_c.json")

CASES = {
    "validate": (["validate", "--graph", A], 0),
    "paths": (["paths", "--graph", A, "--bound", "1,1"], 0),
    "mce": (["mce", "--graph", A, "--mu", "e", "--nu", "f"], 0),
    "ext": (["ext", "--graph", A, "--mu", "f", "--set", "e"], 0),
    "pi": (["pi", "--graph", A, "--set", "e,f"], 0),
    "vee": (["vee", "--graph", A, "--set", "v,e,f"], 0),
    "fe": (["fe", "--graph", B, "--vertex", "v", "--bound", "2"], 0),
    "satiate": (["satiate", "--graph", B, "--relations", REL_B, "--bound", "2"], 0),
    "cocycle-check": (["cocycle-check", "--graph", A, "--cocycle", "theta=0.3", "--bound", "3,3"], 0),
    "verify-tck": (["verify-tck", "--graph", A, "--cocycle", "theta=0.3", "--bound", "4,4",
                    "--margin", "2,2"], 0),
    "core": (["core", "--graph", A, "--cocycle", "theta=0.3", "--bound", "3,3", "--margin", "1,1",
              "--set", "e,f"], 0),
    "ladder": (["ladder", "--graph", A, "--b", "trivial", "--c", "theta=0.3",
                "--chain", "v;v,e;v,e,f", "--bound", "3,3", "--margin", "1,1"], 0),
    "ideals": (["ideals", "--graph", C, "--bound", "1", "--max-size", "2"], 0),
    "witness": (["witness", "--graph", B, "--vertex", "v", "--avoid", "a", "--bound", "2"], 0),
    "quotient": (["quotient", "--graph", C, "--hereditary", "v"], 0),
}


def run_cli(argv, env=None):
    return subprocess.run([sys.executable, "-m", "kgraphlab", *argv], capture_output=True,
                          text=True, env=env)
