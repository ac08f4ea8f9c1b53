"""Bending flow of the (2,1) diagonal: conserved quantities and angle rate."""

import argparse

import numpy as np

from holotet.phase_space import ShapeState, bending_flow, diagonal_coords, flow_trace
from holotet.sampling import random_closure


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=20)
    ap.add_argument("--steps", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    worst: dict[str, float] = {}
    worst_rate = 0.0
    h = 1e-3
    for _ in range(args.count):
        st = ShapeState(random_closure(rng).holonomies)
        tr = flow_trace(st, 2 * np.pi, args.steps, args.steps // 10)
        for key, v in tr.max_drift().items():
            worst[key] = max(worst.get(key, 0.0), v)
        for t in np.linspace(0, 2 * np.pi, 7):
            mid = bending_flow(st, t)
            up = diagonal_coords(bending_flow(mid, h)).phi21_signed
            dn = diagonal_coords(bending_flow(mid, -h)).phi21_signed
            worst_rate = max(worst_rate, abs(np.angle(np.exp(1j * (up - dn))) / (2 * h) - 1))
    print(f"{args.count} closures, {args.steps} steps over one period")
    for key, v in worst.items():
        print(f"  max drift {key:<16} {v:.2e}")
    print(f"  max |dphi21/dt - 1|      {worst_rate:.2e}")


if __name__ == "__main__":
    main()
