"""Run the default gain sweep and print the decay table next to reference values."""

import argparse
import time
from pathlib import Path

from tubular_feedback.config import load_config
from tubular_feedback.sweep import run_sweep

REFERENCE = {  # alpha: (-lambda_num, -lambda0, -lambda_T)
    -10.0: (0.0228, 0.0226, 0.0186),
    -1.0: (0.0204, 0.0202, 0.0162),
    0.0: (0.0174, 0.0174, 0.0134),
    0.5: (0.0129, 0.0129, 0.0088),
    0.75: (0.0082, 0.0081, 0.0041),
    0.9: (0.0038, 0.0037, None),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()

    spec = load_config(None, {"outputs": args.out, "workers": args.workers})
    t0 = time.perf_counter()
    rows = run_sweep(spec)
    print(f"sweep finished in {time.perf_counter() - t0:.1f} s, outputs in {args.out}")
    print(f"{'alpha':>7} {'-l_num':>9} {'ref':>7} {'-l0':>9} {'ref':>7} {'L':>9} {'cert':>5}")
    for r in rows:
        if r.report is None:
            print(f"{r.alpha:>7g} failed: {r.error}")
            continue
        rep = r.report
        ref = REFERENCE.get(r.alpha, (float("nan"),) * 3)
        print(f"{r.alpha:>7g} {-rep.lambda_num:9.5f} {ref[0]:7.4f} {-rep.lambda0:9.5f} "
              f"{ref[1]:7.4f} {rep.lipschitz_L:9.6f} {str(rep.certificate_holds):>5}")


if __name__ == "__main__":
    main()
