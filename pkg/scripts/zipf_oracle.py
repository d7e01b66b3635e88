#!/usr/bin/env python3
"""Brute-force oracle for the power-law ED baseline.

Materializes the full normalized distribution and sums entropy term by term
with math.fsum, independently of the accumulated-sums route in
edprof.metrics.zipf_ed. The alpha=1, V=150,000 value printed here is frozen
into the test suite.
"""

import argparse
import math

import numpy as np


def zipf_ed_bruteforce(alpha: float, vocab_size: int) -> float:
    ranks = np.arange(1, vocab_size + 1, dtype=np.float64)
    weights = ranks ** (-alpha)
    z = math.fsum(weights)
    p = weights / z
    entropy = -math.fsum(pi * math.log(pi) for pi in p if pi > 0)
    return 1.0 - entropy / math.log(vocab_size)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--alpha", type=float, default=1.0)
    parser.add_argument("--vocab-size", type=int, default=150_000)
    args = parser.parse_args()
    value = zipf_ed_bruteforce(args.alpha, args.vocab_size)
    print(f"alpha={args.alpha} V={args.vocab_size} ED={value:.12f}")


if __name__ == "__main__":
    main()
