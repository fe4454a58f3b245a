#!/usr/bin/env python3
"""Print the empirical vs predicted decay orders of the kernel-increment
integrals for a range of exponents (fast, fully deterministic)."""

import argparse

from sfide import check_lemma_order, finite_range_reference_order


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N-values", dest="N_values", default="16,32,64,128,256,512,1024",
                    type=lambda s: [int(v) for v in s.split(",") if v])
    args = ap.parse_args()

    print(f"{'kind':<4} {'c':>6} {'fitted':>8} {'predicted':>9} {'finite-N ref':>12}")
    for c in (-0.5, -0.4, -0.25, -0.1, 0.25, 0.5, 0.75):
        res = check_lemma_order("L1", c, args.N_values)
        print(f"L1   {c:+6.2f} {res.fitted_order:8.4f} {res.predicted_order:9.4f} "
              f"{finite_range_reference_order(res):12.4f}")
    for c in (-0.25, 0.25, 0.5, 0.75):
        res = check_lemma_order("L2", c, args.N_values)
        flag = "  (log factor)" if res.log_corrected else ""
        print(f"L2   {c:+6.2f} {res.fitted_order:8.4f} {res.predicted_order:9.4f} "
              f"{finite_range_reference_order(res):12.4f}{flag}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
