"""Failure rate of random query sets as averaging samplers, by draw count.

Family: every width-2, length-4 permutation program with every start and
accept-set choice.  Prints one CSV line per size.
"""

import argparse
import sys
from fractions import Fraction

from pbpsamp.checks import size_law
from pbpsamp.samplers import chernoff_tail, description_length, three_k_over_eps


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--epsilon", type=Fraction, default=Fraction(1, 4))
    p.add_argument("--sizes", default="2,4,8,16,32,64,128")
    args = p.parse_args(argv)
    sizes = tuple(int(s) for s in args.sizes.split(","))
    res = size_law(sizes=sizes, seeds=args.seeds, epsilon=args.epsilon)
    k = description_length(4, 2, 2)
    print(f"# description length k={k}; 3k/eps={three_k_over_eps(k, args.epsilon)}")
    print("size,failure_rate,failure_display,chernoff_tail_per_program")
    for s in sizes:
        r = res["rates"][s]
        print(f"{s},{r.numerator}/{r.denominator},{float(r):.6f},{chernoff_tail(s, args.epsilon):.6f}")
    rates = [res["rates"][s] for s in sizes]
    monotone = all(a >= b for a, b in zip(rates, rates[1:]))
    print(f"# non-increasing: {monotone}; passing sizes: {sorted(res['passing'])}")
    return 0 if monotone and res["passing"] else 1


if __name__ == "__main__":
    sys.exit(main())
