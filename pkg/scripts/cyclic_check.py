"""Chain-level identity suite for every test dga, with per-identity counts."""

import argparse
import time
from dataclasses import dataclass

from fconn.cychom import TEST_DGAS, Bounds, check_ncft_diagrams


@dataclass
class Config:
    L: int = 4
    Kq: int = 3
    Ku: int = 3
    Kt: int = 3


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    for key, val in vars(Config()).items():
        ap.add_argument(f"--{key}", type=int, default=val)
    ap.add_argument("--dga", choices=sorted(TEST_DGAS), action="append")
    args = ap.parse_args()
    bounds = Bounds(args.L, args.Kq, args.Ku, args.Kt)
    all_ok = True
    for name in args.dga or sorted(TEST_DGAS):
        start = time.perf_counter()
        rep = check_ncft_diagrams(TEST_DGAS[name](), bounds)
        print(f"{name}: {'all identities hold' if rep.passed else 'FAILURES'} ({time.perf_counter() - start:.2f}s)")
        for r in rep.results:
            print(f"  {'ok  ' if r.passed else 'FAIL'} {r.name}: checked {r.checked}, skipped {r.skipped}")
        all_ok &= rep.passed
    raise SystemExit(0 if all_ok else 1)


if __name__ == "__main__":
    main()
