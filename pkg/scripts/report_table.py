#!/usr/bin/env python3
"""Tabulate aggregate structure data for d = p^f + 1 over a grid of (p, f).

One line per pair: orbit count, |E/V| and |Sha| exponents, group exponents
and the names of any failed checks. ``--csv DIR`` also writes the per-orbit
CSV for each pair.
"""

from __future__ import annotations

import argparse
import csv
from dataclasses import dataclass
from pathlib import Path

from legendre_sha.orbits import OrbitContext
from legendre_sha.structures import CSV_COLUMNS, full_report


@dataclass(frozen=True)
class TableConfig:
    primes: tuple[int, ...] = (3, 5, 7)
    max_f: int = 5
    parallel: int = 1
    csv_dir: Path | None = None


def run(cfg: TableConfig) -> bool:
    print("p   f   orbits  |E/V|  |Sha|  exp(E/V)  exp(Sha)  failed")
    ok = True
    for p in cfg.primes:
        for f in range(1, cfg.max_f + 1):
            rep = full_report(OrbitContext(p**f + 1, p), f, cfg.parallel)
            failed = [c.name for c in rep.checks if c.ok is False]
            ok = ok and not failed
            print(
                f"{p:<3} {f:<3} {len(rep.records):<7} {rep.index_order_exponent:<6} {rep.sha_order_exponent:<6} "
                f"{rep.index_exponent:<9} {rep.sha_exponent:<9} {','.join(failed) or '-'}"
            )
            if cfg.csv_dir is not None:
                cfg.csv_dir.mkdir(parents=True, exist_ok=True)
                with open(cfg.csv_dir / f"report_p{p}_f{f}.csv", "w", newline="") as fh:
                    writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
                    writer.writeheader()
                    writer.writerows(rep.csv_rows())
    return ok


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--primes", type=lambda s: tuple(int(x) for x in s.split(",")), default=(3, 5, 7))
    ap.add_argument("--max-f", type=int, default=5)
    ap.add_argument("--parallel", type=int, default=1)
    ap.add_argument("--csv", type=Path, dest="csv_dir")
    ok = run(TableConfig(**vars(ap.parse_args())))
    raise SystemExit(0 if ok else 3)


if __name__ == "__main__":
    main()
