#!/usr/bin/env python3
"""Long-running oracle experiments: planted splitting types and
decompose/build roundtrips, tallied per seed.

Usage: python3 scripts/fuzz_oracles.py [--seeds 5] [--count 100] [--rank 4]
"""

import argparse
import time
from random import Random

from eqbundles.bundle import splitting_type
from eqbundles.classify import build_structure, decompose, verify_certificate
from eqbundles.equivariant import conjugate_structure
from eqbundles.group import cyclic, klein
from eqbundles.randgen import (random_certificate, random_model_automorphism,
                               splitting_oracle_run)


def roundtrip_run(seed, count, max_rank):
    rng = Random(seed)
    good = 0
    for i in range(count):
        G = klein() if i % 2 == 0 else cyclic(rng.randint(1, 4))
        cert = random_certificate(rng, G, max_rank, -3, 3)
        S0 = build_structure(cert)
        U = random_model_automorphism(rng, S0.conductor,
                                      splitting_type(S0.bundle).degrees)
        S = conjugate_structure(S0, U)
        out = decompose(S)
        if out.block_data() == cert.block_data() and verify_certificate(out, S):
            good += 1
    return good


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--rank", type=int, default=4)
    args = ap.parse_args()

    t0 = time.time()
    for seed in range(args.seeds):
        matches, _ = splitting_oracle_run(seed, args.count, args.rank, -5, 5)
        print(f"seed {seed}: splitting oracle {matches}/{args.count}")
    for seed in range(args.seeds):
        good = roundtrip_run(seed, args.count, args.rank)
        print(f"seed {seed}: decompose/build roundtrip {good}/{args.count}")
    print(f"total {time.time() - t0:.1f}s")


if __name__ == "__main__":
    main()
