#!/usr/bin/env python3
"""Round-trip a random symmetry through serialization and reconstruction.

Draws a unitary or antiunitary symmetry, tabulates how it acts on the probe
pure states, writes that table to a JSON map file, reconstructs the operator
from the file alone, and checks the reconstruction against the original on
freshly sampled mixed states.
"""

from __future__ import annotations

import argparse
import tempfile
from pathlib import Path

from qcompat import (
    apply_symmetry,
    random_symmetry,
    symmetry_overlap,
    symmetry_probe_map,
    verify_theorem,
    wigner_reconstruct,
)
from qcompat.io import load_map, save_map


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--dim", type=int, default=4, help="Hilbert space dimension")
    p.add_argument("--antiunitary", action="store_true", help="draw an antiunitary symmetry")
    p.add_argument("--seed", type=int, default=0, help="seed for the drawn symmetry")
    p.add_argument("--n-mixed", type=int, default=8, help="mixed states used for verification")
    p.add_argument("--out", type=Path, default=None, help="keep the map file at this path")
    args = p.parse_args()

    sym = random_symmetry(args.dim, antiunitary=args.antiunitary, seed=args.seed)
    pmap = symmetry_probe_map(sym)

    if args.out is None:
        tmp = tempfile.NamedTemporaryFile(suffix=".json", delete=False)
        path = Path(tmp.name)
    else:
        path = args.out
    save_map(path, pmap)
    print(f"map with {len(pmap.pairs)} probe pairs written to {path}")

    rec = wigner_reconstruct(load_map(path))
    kind = "antiunitary" if rec.antiunitary else "unitary"
    print(f"reconstructed a {kind} operator, overlap with original {symmetry_overlap(sym, rec):.15f}")

    result = verify_theorem(
        lambda rho: apply_symmetry(sym, rho),
        args.dim,
        n_mixed=args.n_mixed,
        seed=args.seed,
    )
    print(f"verification on {result.n_states} mixed states: verdict={result.verdict} "
          f"max_error={result.max_error:.3e}")
    if args.out is None:
        path.unlink()


if __name__ == "__main__":
    main()
