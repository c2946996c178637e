"""Regenerate the bundled example signal: a random band-limited signal on S^2."""

import argparse
import json
from pathlib import Path

import numpy as np

from cliffwave.sphere import SphereTransform, build_basis

OUT = Path(__file__).resolve().parents[1] / "src" / "cliffwave" / "data" / "example_signal.json"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=2)
    ap.add_argument("--max-degree", type=int, default=8)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--out", type=Path, default=OUT)
    args = ap.parse_args()

    tr = SphereTransform(build_basis(args.m, args.max_degree))
    rng = np.random.default_rng(args.seed)
    c = tr.random_coefficients(rng)
    # decay with degree so the signal looks smooth
    c.values *= np.exp(-0.3 * tr.basis.degrees())[:, None]
    sig = tr.synthesize(c)
    args.out.write_text(json.dumps(sig.to_json()) + "\n")
    print(f"wrote {args.out} ({len(sig.nodes)} nodes)")


if __name__ == "__main__":
    main()
