"""Bisimilarity is finer than trace equality.

Two relational machines emit the same set of output words on every input,
but one commits to its branch on the first step and the other one step
later.  The partition refinement tells them apart; the traces do not.
"""

import random

from effmealy.generators import branching_pair, random_machine, split_states
from effmealy.kernel import atom
from effmealy.mealy import bisimilar, minimize
from effmealy.streams import stream_equal_upto, trace_process


def main():
    early, late = branching_pair()
    print("early commits on step 0, late on step 1")
    for h in (2, 4, 8):
        same = stream_equal_upto(trace_process(early, h), trace_process(late, h), h)
        print(f"  traces equal up to {h}: {same}")
    res = bisimilar(early, late)
    print(f"  bisimilar: {res.verdict} ({len(res.partition)} blocks)")

    # cloning states never changes behaviour, and minimizing undoes it
    rng = random.Random(1)
    x, y = atom("X", "0", "1"), atom("Y", "0", "1")
    m = random_machine(rng, "stoch", 3, x, y)
    big = split_states(rng, m, extra=3)
    q, _ = minimize(big)
    print(f"\nstoch machine with {m.state.size} states, cloned to {big.state.size}")
    print(f"  bisimilar to the original: {bisimilar(big, m).verdict}")
    print(f"  minimized: {q.state.size} states")


if __name__ == "__main__":
    main()
