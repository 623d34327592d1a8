"""Tightness of the eigenvalue sandwich over (n, d, k, t), written as CSV.

    python3 scripts/bounds_sweep.py --mode gp -n 8 10 12 -k 1 2 3 > gp_bounds.csv
"""

import argparse
import csv
import sys

from threshprod.errors import InfeasibleDegree
from threshprod.graphs import random_bipartite_regular, random_regular
from threshprod.spectral import BIPARTITE, NONBIPARTITE, GpEigenBasis, lambda_bgp, lambda_bounds, lambda_gp


def rows(mode, ns, ks, seeds):
    for n in ns:
        top = (n - 1) // 2 if mode == "gp" else n // 4
        for d in range(1 if mode == "gp" else 2, top + 1):
            for seed in seeds:
                try:
                    if mode == "gp":
                        g = random_regular(n, d, seed=seed)
                    else:
                        g = random_bipartite_regular(n, d, seed=seed, connected=True)
                except InfeasibleDegree:
                    continue
                basis = GpEigenBasis.from_graph(g, NONBIPARTITE if mode == "gp" else BIPARTITE)
                for k in ks:
                    for t in range(1, k + 1):
                        b = lambda_bounds(basis, k, t, mode)
                        lam = lambda_gp(basis, k, t) if mode == "gp" else lambda_bgp(basis, k, t)
                        lo, hi, val = float(b.lower), float(b.upper), float(lam)
                        yield {
                            "n": n, "d": d, "k": k, "t": t, "seed": seed,
                            "lambda_G": f"{float(basis.lambda_g()):.10g}",
                            "alpha": str(b.alpha),
                            "lower": f"{lo:.10g}", "Lambda": f"{val:.10g}", "upper": f"{hi:.10g}",
                            "upper_over_Lambda": f"{hi / val:.6g}" if val else "",
                            "inside": int(b.contains(lam)),
                        }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--mode", choices=("gp", "bgp"), default="gp")
    ap.add_argument("-n", type=int, nargs="+", default=[8, 10, 12])
    ap.add_argument("-k", type=int, nargs="+", default=[1, 2, 3, 4])
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    args = ap.parse_args()
    out = None
    for row in rows(args.mode, args.n, args.k, args.seeds):
        if out is None:
            out = csv.DictWriter(sys.stdout, list(row), lineterminator="\n")
            out.writeheader()
        out.writerow(row)


if __name__ == "__main__":
    main()
