"""How the Frobenius cross-check depends on |a| and on the working precision.

For general-Heun solutions with a on a ray from 0.2 to 4, compares the
oracle coefficients with the two-term formula three ways: forward recurrence
in double precision, backward (minimal) recurrence in double precision, and
the extended-precision route used by the verification blocks.
"""
import argparse

import numpy as np

from heunterm import verify
from heunterm.general import GeneralHeunParams, gh_terminate


def double_deviation(sol, method):
    got = verify.EQUATIONS["general"].frobenius(sol.params, verify.ORACLE_TERMS, method).coefficients
    ref = verify.formula_coefficients(sol)
    return max(abs(g - r) / abs(r) for g, r in zip(got, ref))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-N", type=int, default=2)
    ap.add_argument("--phase", type=float, default=0.4, help="argument of a in radians")
    args = ap.parse_args()
    print(f"{'|a|':>6} {'forward':>10} {'minimal':>10} {'extended':>10}  method")
    for r in np.geomspace(0.2, 4.0, 12):
        a = r * np.exp(1j * args.phase)
        p = GeneralHeunParams(a=a, alpha=0.7 + 0.2j, beta=-1.4 + 0.3j, gamma=1.3 - 0.4j, epsilon=-args.N)
        sol = gh_terminate(p, args.N)[0]
        cols = []
        for method in ("forward", "minimal"):
            try:
                cols.append(f"{double_deviation(sol, method):10.1e}")
            except ArithmeticError:
                cols.append(f"{'n/a':>10}")
        ext = verify.oracle_deviation(sol)
        print(f"{r:6.2f} {cols[0]} {cols[1]} {ext:10.1e}  {verify.oracle_method(sol.params)}")


if __name__ == "__main__":
    main()
