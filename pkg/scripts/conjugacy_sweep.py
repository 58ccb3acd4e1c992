#!/usr/bin/env python3
"""Sweep the near-infinity conjugacy over a range of depths and print the
measured displacement and residual profile.

Usage: python scripts/conjugacy_sweep.py
"""

from logtract.conjugacy import conjugate_log, deep_hair_point, make_conjugacy
from logtract.families import Exponential
from logtract.logspace import forward_on_tract


def main() -> int:
    C, g = make_conjugacy(Exponential(1))
    print(f"factor {C.lam:.4e}, working half-plane Re >= {C.Q:.2f}, "
          f"displacement bound {C.displacement_bound:.4f}")
    print("Re(w), displacement, budget, relative functional residual")
    for re in (30.5, 31.0, 32.0, 35.0, 40.0, 60.0, 120.0, 300.0, 600.0):
        w = deep_hair_point(C.G, 0, re)
        x, budget = conjugate_log(C, w)
        gw = forward_on_tract(C.G, w)
        x2, _ = conjugate_log(C, gw)
        fx = forward_on_tract(C.F, x)
        res = abs(x2 - fx) / (1 + abs(fx))
        print(f"{re:7.1f}  {abs(x - w):9.5f}  {budget.analytic_bound:.2e}  {res:.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
