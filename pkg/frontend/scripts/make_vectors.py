#!/usr/bin/env python3
"""Regenerates tests/fixtures/vectors.json: byte-level ground truth for
the browser client's group arithmetic, hashing, deterministic RNG and
device signatures, produced by the reference Python implementation.

The file is deterministic; re-running this script must not change it.

Usage: python3 frontend/scripts/make_vectors.py
"""

import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "..", "src"))

from zkpetition import bn254, devicesig  # noqa: E402
from zkpetition.credentials import lagrange_coefficients  # noqa: E402
from zkpetition.groups import (  # noqa: E402
    ORDER,
    G1Point,
    G2Point,
    SeededRng,
    hash_to_g1,
    pairing,
    random_scalar,
    scalar_to_bytes,
    setup,
)

OUT = os.path.join(os.path.dirname(__file__), "..", "tests", "fixtures",
                   "vectors.json")


def fp2_sqrt(a):
    """Square root in Fp2 (i^2 = -1), or None; only the fixture
    generator needs this — the protocol never takes Fp2 roots."""
    a0, a1 = a
    if a1 == 0:
        r = bn254.fp_sqrt(a0)
        if r is not None:
            return (r, 0)
        # sqrt(a0) = sqrt(-a0) * i when -a0 is a residue
        r = bn254.fp_sqrt(-a0 % bn254.P)
        return None if r is None else (0, r)
    norm = bn254.fp_sqrt((a0 * a0 + a1 * a1) % bn254.P)
    if norm is None:
        return None
    for lam in (norm, (-norm) % bn254.P):
        half = (a0 + lam) * bn254.fp_inv(2) % bn254.P
        x0 = bn254.fp_sqrt(half)
        if x0 is None:
            continue
        x1 = a1 * bn254.fp_inv(2 * x0 % bn254.P) % bn254.P
        cand = (x0, x1)
        if bn254.fp2_sqr(cand) == (a0 % bn254.P, a1 % bn254.P):
            return cand
    return None


def twist_point_outside_subgroup():
    """An on-twist point that fails the order-R subgroup check, found by
    try-and-increment; serialized by hand since from_bytes refuses it."""
    for k in range(1, 10_000):
        x = bn254.fp2(k, 1)
        rhs = bn254.fp2_add(bn254.fp2_mul(bn254.fp2_sqr(x), x), bn254.TWIST_B)
        y = fp2_sqrt(rhs)
        if y is None:
            continue
        pt = (x, y)
        assert bn254.g2_is_on_twist(pt)
        if not bn254.g2_in_subgroup(pt):
            return (b"\x04"
                    + int(x[0]).to_bytes(32, "big")
                    + int(x[1]).to_bytes(32, "big")
                    + int(y[0]).to_bytes(32, "big")
                    + int(y[1]).to_bytes(32, "big"))
    raise RuntimeError("no point found")


def main():
    params = setup("v1")
    g1 = G1Point.generator()
    g2 = G2Point.generator()

    rng = SeededRng("unit-seed")
    stream = rng.read(100)
    scalars = [str(random_scalar(SeededRng("unit-seed"))) for _ in range(1)]
    scalar_rng = SeededRng("unit-seed")
    scalars = [str(random_scalar(scalar_rng)) for _ in range(5)]

    ecdsa_rng = SeededRng("ecdsa-seed")
    priv, pub = devicesig.keygen(ecdsa_rng)
    message = b"device-message-vector"
    sig = devicesig.sign(priv, message)
    assert devicesig.verify(pub, message, sig)

    vectors = {
        "order": str(ORDER),
        "fieldPrime": str(int(bn254.P)),
        "paramsDigestV1": params.digest().hex(),
        "h1V1": params.h1.to_bytes().hex(),
        "g1Generator": g1.to_bytes().hex(),
        "g1Identity": G1Point.identity().to_bytes().hex(),
        "g1Times7": (7 * g1).to_bytes().hex(),
        "g1TimesOrderMinus1": ((ORDER - 1) * g1).to_bytes().hex(),
        "g2Generator": g2.to_bytes().hex(),
        "g2Times11": (11 * g2).to_bytes().hex(),
        "g2OutsideSubgroup": twist_point_outside_subgroup().hex(),
        "pairingG1G2": pairing(g1, g2).to_bytes().hex(),
        "pairing5G1_7G2": pairing(5 * g1, 7 * g2).to_bytes().hex(),
        "pairing35G1_G2": pairing(35 * g1, g2).to_bytes().hex(),
        "hashToG1TestInput": hash_to_g1(b"test-input-1").to_bytes().hex(),
        "hashToG1Petition": hash_to_g1(b"fixture-petition").to_bytes().hex(),
        "scalarOrderMinus1": scalar_to_bytes(ORDER - 1).hex(),
        "seededRng": {
            "seed": "unit-seed",
            "first100": stream.hex(),
            "scalars": scalars,
        },
        "ecdsa": {
            "seed": "ecdsa-seed",
            "priv": str(priv),
            "pub": pub.hex(),
            "message": message.decode(),
            "signature": sig.hex(),
        },
        "lagrange": {
            "indices12": [str(c) for c in lagrange_coefficients([1, 2])],
            "indices135": [str(c) for c in lagrange_coefficients([1, 3, 5])],
        },
    }

    os.makedirs(os.path.dirname(OUT), exist_ok=True)
    with open(OUT, "w", encoding="utf-8") as fh:
        json.dump(vectors, fh, indent=1)
        fh.write("\n")
    print(f"wrote {os.path.normpath(OUT)}")


if __name__ == "__main__":
    main()
