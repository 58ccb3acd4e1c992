#!/usr/bin/env python3
"""Measure the depth-threshold decay of the avoidance projection on the
exact brush model and on a traced hair, side by side.

Usage: python scripts/projection_decay.py [seed]
"""

import math
import random
import sys
from fractions import Fraction

from logtract.brush import avoiding_thresholds, random_brush
from logtract.families import Exponential, disjoint_type_rescale
from logtract.logspace import Itinerary, log_transform
from logtract.projection import ProjectionConfig, project_limit
from logtract.rays import trace_tail


def main() -> int:
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else 1
    rng = random.Random(seed)

    B = random_brush(rng, 12)
    hid = rng.choice(B.hairs).hid
    zs = avoiding_thresholds(B, hid, 20)
    print(f"brush instance: {len(B.hairs)} hairs, expansion {B.expansion}, Q {B.Q}")
    print("n, threshold, gap, gap * expansion^n (should stay <= Q)")
    for n in range(1, 21):
        gap = zs[n] - zs[n - 1]
        print(f"{n:2d}  {float(zs[n]):.9f}  {float(gap):.3e}  "
              f"{float(gap * B.expansion ** n):.6f}")

    _, g = disjoint_type_rescale(Exponential(1))
    G = log_transform(g)
    s = Itinerary((0, 16), (0,))
    tail = trace_tail(G, s, 0.0, 1e80, 0.02, depth=2, max_samples=1200)
    cfg = ProjectionConfig(R=math.exp(30.0), n_max=20, t_tol=1e-8)
    res = project_limit(g, tail, tail.ts()[0], cfg)
    print(f"\ntraced hair {s.to_json()}: converged={res.converged} "
          f"n_used={res.n_used}")
    for n, t in res.zn_trace:
        print(f"{n:2d}  t={t:.6e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
