"""Monte Carlo leaf volumes against the closed forms, per volume form."""

import argparse

import numpy as np

from holotet.phase_space import VolumeForm, leaf_volume_mc, within_stderr


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=10**6)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    print(f"{'a':>8}{'r':>6}  {'form':<12}{'estimate':>14}{'analytic':>14}"
          f"{'rel dev':>10}{'stderr':>10}  ok")
    for a in (0.5, 1.0, 2.0, np.pi, 4.0, 5.0, 6.0):
        for r in (1.0, 2.0):
            for form in VolumeForm:
                est = leaf_volume_mc(a, r, form, args.count, args.seed, args.workers)
                rel = abs(est.estimate - est.analytic) / max(1.0, abs(est.analytic))
                print(f"{a:>8.4f}{r:>6g}  {form.value:<12}{est.estimate:>14.8f}"
                      f"{est.analytic:>14.8f}{rel:>10.1e}{est.stderr:>10.1e}  "
                      f"{within_stderr(est)}")


if __name__ == "__main__":
    main()
