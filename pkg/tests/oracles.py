"""Independent oracles used by the test suite.

These are written against the problem statement alone, not against the
package under test, so that tests comparing implementation output to
oracle output are meaningful.  Keep this module free of zkpetition
imports.
"""

from fractions import Fraction

# Scalar field order of the 254-bit BN curve used by the package
# (same constant as Ethereum's alt_bn128 precompiles).
GROUP_ORDER = 21888242871839275222246405745257275088548364400416034343698204186575808495617


def plaintext_tally(votes):
    """Brute-force count of a 0/1 vote vector: (yes, no)."""
    yes = sum(1 for v in votes if v == 1)
    no = sum(1 for v in votes if v == 0)
    assert yes + no == len(votes), "votes must be 0/1"
    return yes, no


def lagrange_at_zero(indices, modulus=GROUP_ORDER):
    """Interpolation weights at x=0, computed over the rationals first.

    Working in Fraction and reducing at the end is deliberately a
    different evaluation strategy from any sane modular implementation.
    """
    coeffs = []
    for i in indices:
        term = Fraction(1)
        for j in indices:
            if j != i:
                term *= Fraction(0 - j, i - j)
        # term = num/den; reduce num * den^-1 mod the group order
        coeffs.append(term.numerator * pow(term.denominator, -1, modulus) % modulus)
    return coeffs


# Hand-evaluated expectations for small index sets:
#   {1,2}:   l1 = (0-2)/(1-2) = 2,  l2 = (0-1)/(2-1) = -1
#   {1,2,3}: l1 = 6/2 = 3, l2 = 3/-1 = -3, l3 = 2/2 = 1
LAGRANGE_12 = [2, GROUP_ORDER - 1]
LAGRANGE_123 = [3, GROUP_ORDER - 3, 1]


def reference_elgamal_decrypt(a, b, d, point_add, point_neg, point_mul):
    """ElGamal decryption b - d*a expressed through caller-supplied group ops."""
    return point_add(b, point_neg(point_mul(a, d)))
