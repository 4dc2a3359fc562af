"""Random Fourier-Laplace local models: Jordan comparison of VU and UV and residue exponents."""

import argparse
import random
from collections import Counter
from dataclasses import dataclass

from fconn.weylfl import compare_local_model, random_local_model


@dataclass
class Config:
    count: int = 50
    seed: int = 0
    max_size: int = 4


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    for key, val in vars(Config()).items():
        ap.add_argument(f"--{key.replace('_', '-')}", dest=key, type=int, default=val)
    cfg = Config(**vars(ap.parse_args()))
    rng = random.Random(cfg.seed)
    defects, mismatches, rational, exp_ok = Counter(), 0, 0, 0
    for _ in range(cfg.count):
        out = compare_local_model(random_local_model(rng, cfg.max_size))
        defects[out["zero_defect"]] += 1
        mismatches += not out["nonzero_match"]
        if out["exponents"] is not None:
            rational += 1
            exp_ok += all(out["exponents"].values())
    print(f"models: {cfg.count} (seed {cfg.seed}, sizes <= {cfg.max_size})")
    print(f"nonzero Jordan data mismatches: {mismatches}")
    print(f"zero-eigenvalue block defect histogram: {dict(sorted(defects.items()))}")
    print(f"rational spectrum: {rational}; residue exponents agree: {exp_ok}")


if __name__ == "__main__":
    main()
