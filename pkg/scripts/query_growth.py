"""Distinct oracle queries of the full pipeline for n = 2..10 at fixed eps,
against the polynomial envelope (n a / eps)^k recorded in the schedule.

Each n uses one random consistently labelled graph, a greedy hitter over the
target's heavy single-accept restrictions, and a random inner query set
searched until it verifies on the induced hit program.
"""

import argparse
import random
import sys
from fractions import Fraction

from pbpsamp.graphs import graph_to_bp, random_consistent_graph
from pbpsamp.hitprog import build_hit_program, restriction_masks
from pbpsamp.oracle import OracleSession
from pbpsamp.reduction import build_schedule, run_reduction
from pbpsamp.samplers import averaging_sampler, hitter_from_masks, random_query_set, verify_sampler


def measure(n, eps, vertices, inner_size, seed):
    rng = random.Random(seed * 1000 + n)
    G = random_consistent_graph(vertices, 2, rng.randrange(2**32))
    u = rng.randrange(vertices)
    v = u
    for _ in range(n):
        v = G.perm[rng.randrange(2)][v]
    B = graph_to_bp(G, u, v, n)
    sched = build_schedule(n, 1, eps)
    H = hitter_from_masks([m for _, m in restriction_masks(B, sched.delta_hit)], n, 2).hitter
    sched = sched.with_hitter(len(H))
    hp = build_hit_program(B, H)
    Q = None
    for k in range(50):
        Q = random_query_set(n, 2, inner_size, rng.randrange(2**32))
        if verify_sampler(Q, [hp.explicit_bp], sched.eps_inner):
            break
    res = run_reduction(OracleSession(B), H, averaging_sampler(Q, sched.eps_inner, sched.w_inner))
    return sched, res


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--epsilon", type=Fraction, default=Fraction(1, 4))
    p.add_argument("--vertices", type=int, default=64)
    p.add_argument("--inner-size", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-n", type=int, default=10)
    args = p.parse_args(argv)
    print("n,hitter_size,inner_queries,b_queries,accounting_bound,envelope,within")
    ok = True
    for n in range(2, args.max_n + 1):
        sched, res = measure(n, args.epsilon, args.vertices, args.inner_size, args.seed)
        env = sched.envelope()
        within = res.b_queries <= env and res.b_queries <= res.accounting_bound
        ok &= within
        print(f"{n},{res.hitter_size},{res.inner_queries},{res.b_queries},{res.accounting_bound},{env},{within}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
