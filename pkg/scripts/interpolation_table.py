#!/usr/bin/env python3
"""Print F_f(T) for a range of f and compare F_f(p) with direct enumeration."""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

from legendre_sha.counting import interpolation_poly, sha_order_exponent
from legendre_sha.orbits import OrbitContext

LIMIT = 10**7  # skip enumeration above this modulus


@dataclass(frozen=True)
class InterpolationConfig:
    max_f: int = 6
    primes: tuple[int, ...] = (3, 5, 7, 11)


def run(cfg: InterpolationConfig) -> bool:
    ok = True
    for f in range(1, cfg.max_f + 1):
        t0 = time.perf_counter()
        poly = interpolation_poly(f)
        print(f"F_{f}(T) = {poly}    [{time.perf_counter() - t0:.2f} s]")
        for p in cfg.primes:
            if p**f + 1 > LIMIT:
                print(f"    p={p}: F = {poly(p)} (not enumerated)")
                continue
            value, enumerated = poly(p), sha_order_exponent(OrbitContext(p**f + 1, p), f)
            ok = ok and value == enumerated
            print(f"    p={p}: F = {value}, enumerated {enumerated}, {'ok' if value == enumerated else 'MISMATCH'}")
    return ok


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-f", type=int, default=6)
    ap.add_argument("--primes", type=lambda s: tuple(int(x) for x in s.split(",")), default=(3, 5, 7, 11))
    ok = run(InterpolationConfig(**vars(ap.parse_args())))
    raise SystemExit(0 if ok else 3)


if __name__ == "__main__":
    main()
