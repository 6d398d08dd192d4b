"""A stream cipher against a perfectly secure channel, computed exactly.

With an ideal key the two are trace equal.  With a small affine generator
the eavesdropper's advantage grows step by step but stays under the
``(n + 1) * prng_eps`` bound.
"""

import sys

from effmealy.casestudies import (CipherConfig, build_cipher, cipher_vs_secure,
                                  verify_otp_identities)
from effmealy.streams import stream_equal_upto, trace_process


def main(horizon=4):
    r = verify_otp_identities(CipherConfig.affine(1, 4))
    print("identities:", ", ".join(f"{k}={v}" for k, v in r.checks.items()))

    m = build_cipher(CipherConfig.ideal(1, horizon))
    eq = stream_equal_upto(trace_process(m["cipher"], horizon),
                           trace_process(m["secure"], horizon), horizon)
    print(f"ideal key, trace equal to the secure channel up to {horizon}: {eq}")

    for cfg in (CipherConfig.affine(1, 16), CipherConfig.repeating(1, 16)):
        c = cipher_vs_secure(cfg, horizon)
        tvs = " ".join(str(v) for v in c.tv_per_step)
        print(f"{cfg.name:14} tv per step: {tvs}  prng_eps={c.prng_eps}"
              f"  bound violated at: {c.bound_violations() or 'none'}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 4)
