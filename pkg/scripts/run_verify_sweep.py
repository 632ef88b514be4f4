"""Full default verification sweep, plus the counterexample run, written to results/."""

import argparse
from pathlib import Path

from dirhyper.cli import main

ap = argparse.ArgumentParser()
ap.add_argument("--out-dir", default="results")
ap.add_argument("--seed", default="0")
args = ap.parse_args()
out = Path(args.out_dir)
out.mkdir(exist_ok=True)

codes = {
    "verify.json": main(["verify", "--seed", args.seed, "--out", str(out / "verify.json")]),
    "verify.csv": main(["verify", "--seed", args.seed, "--format", "csv", "--out", str(out / "verify.csv")]),
    "counterexample.json": main(["verify", "--max-dim", "1", "--include-counterexample", "--seed", args.seed,
                                 "--out", str(out / "counterexample.json")]),
}
for name, code in codes.items():
    print(f"{name}: exit {code}")
