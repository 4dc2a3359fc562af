"""Random formal gauges I + q M(q) leave the exponential-type invariants unchanged."""

import argparse
import random
import time
from dataclasses import dataclass

from fconn.exactalg import Matrix, TruncSeries
from fconn.formalconn import GaugeSeries, apply_gauge, change_chart, grading_gauge, split_exponential_type
from fconn.quantumex import build_example


@dataclass
class Config:
    count: int = 100
    seed: int = 0
    order: int = 8


def random_gauge(rng, n, var, order):
    rows = [[TruncSeries(([1] if i == j else [0]) + [rng.randint(-2, 2) for _ in range(order - 1)], 0, order, var)
             for j in range(n)] for i in range(n)]
    return GaugeSeries(Matrix(rows))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    for key, val in vars(Config()).items():
        ap.add_argument(f"--{key}", type=int, default=val)
    cfg = Config(**vars(ap.parse_args()))
    rng = random.Random(cfg.seed)
    p1 = build_example("p1")
    inputs = {"p1": change_chart(grading_gauge(p1.connection, p1.grading), "Q"),
              "cubic_surface_block": build_example("cubic_surface_block").connection}
    for name, conn in inputs.items():
        start = time.perf_counter()
        base = split_exponential_type(conn, cfg.order)[0].invariants()
        same = sum(split_exponential_type(apply_gauge(conn, random_gauge(rng, conn.rank, conn.var, cfg.order),
                                                      cfg.order), cfg.order - 2)[0].invariants() == base
                   for _ in range(cfg.count))
        print(f"{name}: {same}/{cfg.count} gauges preserve the invariants ({time.perf_counter() - start:.2f}s)")


if __name__ == "__main__":
    main()
