"""Track the admissible accessory values while one parameter moves along a line.

Writes CSV rows (t, index, q_re, q_im) to stdout; plotting is left to the reader.
"""
import argparse
import csv
import sys

import numpy as np

from heunterm.confluent import ConfluentHeunParams, ch_terminate
from heunterm.general import GeneralHeunParams, gh_terminate


def spectrum(equation, N, value, name):
    if equation == "general":
        base = dict(a=2.0, alpha=0.8, beta=1.3, gamma=1.6)
        base[name] = value
        return [s.chosen_q for s in gh_terminate(GeneralHeunParams(**base, epsilon=-N), N)]
    base = dict(alpha=0.8, gamma=1.6, epsilon=1.0)
    base[name] = value
    return [s.chosen_q for s in ch_terminate(ConfluentHeunParams(**base, delta=-N), N)]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--equation", choices=("general", "confluent"), default="confluent")
    ap.add_argument("-N", type=int, default=3)
    ap.add_argument("--parameter", default="epsilon", help="name of the parameter to sweep")
    ap.add_argument("--start", type=float, default=0.2)
    ap.add_argument("--stop", type=float, default=4.0)
    ap.add_argument("--steps", type=int, default=40)
    args = ap.parse_args()

    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["t", "index", "q_re", "q_im"])
    for t in np.linspace(args.start, args.stop, args.steps):
        for k, q in enumerate(spectrum(args.equation, args.N, float(t), args.parameter)):
            writer.writerow([f"{t:.6g}", k, repr(q.real), repr(q.imag)])


if __name__ == "__main__":
    main()
