"""Print the explicit low-order solutions (N = 0, 1, 2) for one parameter set of each equation."""
import argparse

from heunterm import verify
from heunterm.confluent import ConfluentHeunParams, ch_terminate
from heunterm.general import GeneralHeunParams, gh_terminate


def fmt(z: complex) -> str:
    return f"{z.real:+.10f}{z.imag:+.10f}j"


def show(title, sols):
    print(f"\n{title}")
    for sol in sols:
        block = verify.verification_block(sol)
        print(f"  q = {fmt(sol.chosen_q)}  {sol.solution.label()}  e = [{', '.join(fmt(e) for e in sol.e)}]")
        print(
            f"    closure {block['closure']:.1e}  ode {block['ode_residual_max']:.1e}  "
            f"oracle {block['oracle_max_deviation']:.1e}  {'pass' if block['passed'] else 'FAIL'}"
        )


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--a", type=complex, default=2.5 + 0.5j)
    ap.add_argument("--alpha", type=complex, default=0.7 + 0.2j)
    ap.add_argument("--beta", type=complex, default=-1.4 + 0.3j)
    ap.add_argument("--gamma", type=complex, default=1.3 - 0.4j)
    ap.add_argument("--epsilon", type=complex, default=1.1 - 0.6j, help="confluent epsilon")
    args = ap.parse_args()
    for N in range(3):
        p = GeneralHeunParams(a=args.a, alpha=args.alpha, beta=args.beta, gamma=args.gamma, epsilon=-N)
        show(f"general Heun, N = {N}", gh_terminate(p, N))
    for N in range(3):
        p = ConfluentHeunParams(alpha=args.alpha, gamma=args.gamma, delta=-N, epsilon=args.epsilon)
        show(f"confluent Heun, N = {N}", ch_terminate(p, N))


if __name__ == "__main__":
    main()
