#!/usr/bin/env python3
"""Write a reproducible instance corpus: Horn family plus random kinds.

Each instance is emitted as JSON with a metadata side-file recording the
kind, the seed, and any embedded certificate.
"""

import argparse
import json
from pathlib import Path

import numpy as np

from qprelax.core import save_instance
from qprelax.generators import (
    KINDS,
    HornFamilyParams,
    horn_family,
    horn_instance,
    random_instance,
)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seeds", type=int, default=3, help="seeds per configuration")
    parser.add_argument("--family-dims", type=int, nargs="*", default=[6, 7, 8])
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    inst, dtilde = horn_instance()
    save_instance(inst, out / "horn5.json")
    (out / "horn5.meta.json").write_text(json.dumps({
        "kind": "HORN",
        "certificate": dtilde.tolist(),
        "certificate_objective": -5,
    }, indent=2) + "\n")
    written.append("horn5.json")

    for n in args.family_dims:
        for seed in range(args.seeds):
            fam = horn_family(HornFamilyParams(n=n, seed=seed))
            save_instance(fam, out / f"{fam.name}.json")
            embedded = np.zeros((n, n))
            embedded[:5, :5] = dtilde
            (out / f"{fam.name}.meta.json").write_text(json.dumps({
                "kind": "HORN_FAMILY", "n": n, "seed": seed,
                "embedded_certificate": embedded.tolist(),
            }, indent=2) + "\n")
            written.append(f"{fam.name}.json")

    for kind in KINDS:
        for seed in range(args.seeds):
            inst, meta = random_instance(kind, 4, 2, seed, with_metadata=True)
            save_instance(inst, out / f"{inst.name}.json")
            (out / f"{inst.name}.meta.json").write_text(json.dumps(meta, indent=2) + "\n")
            written.append(f"{inst.name}.json")

    print(f"wrote {len(written)} instances to {out}")


if __name__ == "__main__":
    main()
