"""Edge-length error of the curved reconstruction against a flat tetrahedron.

The holonomies are built from the flat area vectors scaled by 1/r^2; the
error should fall off as r^-2.
"""

import argparse

import numpy as np

from holotet.flat_limit import flat_area_vectors, flat_limit_study
from holotet.phase_space import loglog_slope
from holotet.sampling import regular_flat_tetrahedron


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--radii", default="5,10,20,40,80,160")
    ap.add_argument("--random", type=int, default=3, help="extra random flat tetrahedra")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    radii = [float(x) for x in args.radii.split(",")]
    rng = np.random.default_rng(args.seed)
    shapes = {"regular": regular_flat_tetrahedron()}
    while len(shapes) < args.random + 1:
        P = rng.standard_normal((4, 3))
        A = np.linalg.norm(flat_area_vectors(P), axis=1)
        if abs(np.linalg.det(P[1:] - P[0])) > 0.2 and A.min() > 0.1:
            shapes[f"random{len(shapes)}"] = P
    for name, P in shapes.items():
        study = flat_limit_study(P, radii)
        print(f"{name}: slope {study.slope:.4f}")
        for p in study.points:
            print(f"  r={p.radius:<8g} error={p.error:.3e}  {p.curvature_class}")
        errs = [p.error for p in study.points]
        print(f"  all-radii slope {loglog_slope(radii, errs):.4f}")


if __name__ == "__main__":
    main()
