#!/usr/bin/env python3
"""Compare the two elimination routes with the minors oracle over many specs.

Exhaustive over all specs with k <= --max-k and entries in 1..--max-e, then
--random extra specs with k up to --random-k. Prints counts and timings.
"""

from __future__ import annotations

import argparse
import itertools
import time
from dataclasses import dataclass

import numpy as np

from legendre_sha.invariant_factors import invariants_by_max_pivot, invariants_by_min_pivot, minors_oracle_batch


@dataclass(frozen=True)
class SweepConfig:
    max_k: int = 5
    max_e: int = 5
    random: int = 10_000
    random_k: int = 8
    random_e: int = 8
    seed: int = 0
    chunk: int = 1 << 16


def check_block(rows: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """Specs in ``rows`` where any route disagrees."""
    oracle = minors_oracle_batch(np.array(rows, dtype=np.int64)).tolist()
    out = []
    for row, orc in zip(rows, oracle):
        a = invariants_by_min_pivot(row).d
        if a != invariants_by_max_pivot(row).d or list(a) != orc:
            out.append(row)
    return out


def run(cfg: SweepConfig) -> list[tuple[int, ...]]:
    bad = []
    for k in range(1, cfg.max_k + 1):
        t0, n = time.perf_counter(), 0
        it = itertools.product(range(1, cfg.max_e + 1), repeat=2 * k - 1)
        while chunk := list(itertools.islice(it, cfg.chunk)):
            bad += check_block(chunk)
            n += len(chunk)
        print(f"k={k}  specs={n}  {time.perf_counter() - t0:.2f} s")
    rng = np.random.default_rng(cfg.seed)
    ks = rng.integers(1, cfg.random_k + 1, size=cfg.random)
    t0 = time.perf_counter()
    for k in range(1, cfg.random_k + 1):
        n = int((ks == k).sum())
        rows = [tuple(r) for r in rng.integers(1, cfg.random_e + 1, size=(n, 2 * k - 1)).tolist()]
        bad += check_block(rows)
    print(f"random specs={cfg.random}  {time.perf_counter() - t0:.2f} s")
    return bad


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    for name, default in vars(SweepConfig()).items():
        ap.add_argument(f"--{name.replace('_', '-')}", type=int, default=default)
    cfg = SweepConfig(**vars(ap.parse_args()))
    bad = run(cfg)
    print(f"mismatches: {len(bad)}")
    for row in bad[:10]:
        print("  ", row)


if __name__ == "__main__":
    main()
