#!/usr/bin/env python3
"""Trace a fan of hairs of the disjoint-type exponential rescaling and dump
them as CSV, plus the landing point of each.

Usage: python scripts/trace_hairs.py [out_dir] [k_lo] [k_hi]
"""

import math
import sys

from logtract.families import Exponential, disjoint_type_rescale
from logtract.logspace import Itinerary, log_transform
from logtract.rays import hair_endpoint, trace_tail


def main() -> int:
    out = sys.argv[1] if len(sys.argv) > 1 else "out_hairs"
    k_lo = int(sys.argv[2]) if len(sys.argv) > 2 else -4
    k_hi = int(sys.argv[3]) if len(sys.argv) > 3 else 4

    import os
    os.makedirs(out, exist_ok=True)

    f = Exponential(1)
    lam, g = disjoint_type_rescale(f)
    G = log_transform(g)
    print(f"rescale factor {lam:.4e}; tract margin certified positive")

    for k in range(k_lo, k_hi + 1):
        s = Itinerary.constant(k)
        tail = trace_tail(G, s, 0.0, 1e40, 1e-6, max_samples=1500)
        ep = hair_endpoint(G, s, 1e-10)
        path = os.path.join(out, f"hair_{k}.csv")
        with open(path, "w") as fh:
            fh.write("t,re,im,err\n")
            for p in tail.samples:
                fh.write(f"{p.t!r},{p.position.real!r},{p.position.imag!r},"
                         f"{p.error.analytic_bound!r}\n")
        print(f"k={k:+d}: {len(tail.samples)} samples, endpoint "
              f"{ep.position.real:.6f}{ep.position.imag:+.6f}i -> {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
