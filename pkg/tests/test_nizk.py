"""The four Fiat-Shamir proofs: completeness, serialization, and
rejection of every mutated statement or transcript."""

from dataclasses import replace

import pytest

from zkpetition import nizk
from zkpetition.groups import (
    ORDER,
    G1Point,
    G2Point,
    SeededRng,
    hash_to_g1,
    random_scalar,
    setup,
)


@pytest.fixture(scope="module")
def P():
    return setup("v1")


def _rng(label=b"nizk"):
    return SeededRng(label)


# -- issuance proof ---------------------------------------------------------------


def _issuance_statement(P, rng):
    d, m, o, k = (random_scalar(rng) for _ in range(4))
    gamma = d * P.g1
    c_m = m * P.g1 + o * P.h1
    h = hash_to_g1(b"request point")
    cipher = (k * P.g1, k * gamma + m * h)
    pk_client = b"\x04" + bytes(64)
    proof = nizk.prove_issuance(P, d, m, o, k, gamma, c_m, cipher, h,
                                pk_client, rng)
    return d, gamma, c_m, cipher, h, pk_client, proof


def test_issuance_proof_verifies(P):
    _, gamma, c_m, cipher, h, pk, proof = _issuance_statement(P, _rng())
    assert nizk.verify_issuance(P, gamma, c_m, cipher, h, pk, proof)


def test_issuance_proof_roundtrip(P):
    _, gamma, c_m, cipher, h, pk, proof = _issuance_statement(P, _rng())
    again = nizk.IssuanceProof.from_bytes(proof.to_bytes())
    assert again == proof
    assert nizk.verify_issuance(P, gamma, c_m, cipher, h, pk, again)


def test_issuance_proof_rejects_statement_swaps(P):
    rng = _rng()
    _, gamma, c_m, cipher, h, pk, proof = _issuance_statement(P, rng)
    other = random_scalar(rng) * P.g1
    assert not nizk.verify_issuance(P, other, c_m, cipher, h, pk, proof)
    assert not nizk.verify_issuance(P, gamma, other, cipher, h, pk, proof)
    assert not nizk.verify_issuance(P, gamma, c_m, (other, cipher[1]), h, pk, proof)
    assert not nizk.verify_issuance(P, gamma, c_m, (cipher[0], other), h, pk, proof)
    assert not nizk.verify_issuance(P, gamma, c_m, cipher, other, pk, proof)
    assert not nizk.verify_issuance(P, gamma, c_m, cipher, h, b"\x05" + bytes(64), proof)


def test_issuance_proof_rejects_field_mutations(P):
    _, gamma, c_m, cipher, h, pk, proof = _issuance_statement(P, _rng())
    for field in ("challenge", "r_d", "r_m", "r_o", "r_k"):
        bad = replace(proof, **{field: (getattr(proof, field) + 1) % ORDER})
        assert not nizk.verify_issuance(P, gamma, c_m, cipher, h, pk, bad)


# -- show proof -------------------------------------------------------------------


class _VK:
    def __init__(self, P, rng):
        self.g2 = P.g2
        self.alpha = random_scalar(rng) * P.g2
        self.beta = random_scalar(rng) * P.g2


def _show_statement(P, rng, petition="petition-x"):
    vk = _VK(P, rng)
    m, r, rp = (random_scalar(rng) for _ in range(3))
    h_prime = rp * hash_to_g1(b"some h")
    s_prime = rp * hash_to_g1(b"some s")
    kappa = vk.alpha + m * vk.beta + r * P.g2
    nu = r * h_prime
    basis = hash_to_g1(petition.encode())
    zeta = m * basis
    proof = nizk.prove_show(P, vk, m, r, kappa, nu, zeta, h_prime, s_prime,
                            petition, basis, rng)
    return vk, kappa, nu, zeta, h_prime, s_prime, petition, basis, proof


def test_show_proof_verifies(P):
    vk, kappa, nu, zeta, hp, sp, pid, basis, proof = _show_statement(P, _rng())
    assert nizk.verify_show(P, vk, kappa, nu, zeta, hp, sp, pid, basis, proof)


def test_show_proof_roundtrip(P):
    vk, kappa, nu, zeta, hp, sp, pid, basis, proof = _show_statement(P, _rng())
    assert nizk.ShowProof.from_bytes(proof.to_bytes()) == proof


def test_show_proof_bound_to_petition(P):
    vk, kappa, nu, zeta, hp, sp, pid, basis, proof = _show_statement(P, _rng())
    assert not nizk.verify_show(P, vk, kappa, nu, zeta, hp, sp,
                                "other-petition", basis, proof)


def test_show_proof_rejects_mutations(P):
    rng = _rng()
    vk, kappa, nu, zeta, hp, sp, pid, basis, proof = _show_statement(P, rng)
    g2r = random_scalar(rng) * P.g2
    g1r = random_scalar(rng) * P.g1
    assert not nizk.verify_show(P, vk, kappa + g2r, nu, zeta, hp, sp, pid, basis, proof)
    assert not nizk.verify_show(P, vk, kappa, nu + g1r, zeta, hp, sp, pid, basis, proof)
    assert not nizk.verify_show(P, vk, kappa, nu, zeta + g1r, hp, sp, pid, basis, proof)
    assert not nizk.verify_show(P, vk, kappa, nu, zeta, hp + g1r, sp, pid, basis, proof)
    assert not nizk.verify_show(P, vk, kappa, nu, zeta, hp, sp + g1r, pid, basis, proof)
    for field in ("challenge", "r_m", "r_r"):
        bad = replace(proof, **{field: (getattr(proof, field) + 1) % ORDER})
        assert not nizk.verify_show(P, vk, kappa, nu, zeta, hp, sp, pid, basis, bad)


# -- ballot proof -----------------------------------------------------------------


def _ballot(P, rng, v):
    gamma_agg = random_scalar(rng) * P.g1
    h = hash_to_g1(b"ballot base")
    k = random_scalar(rng)
    cipher = (k * P.g1, k * gamma_agg + v * h)
    proof = nizk.prove_ballot(P, gamma_agg, h, v, k, cipher, rng)
    return gamma_agg, h, cipher, proof


@pytest.mark.parametrize("v", [0, 1])
def test_ballot_proof_verifies(P, v):
    gamma_agg, h, cipher, proof = _ballot(P, _rng(), v)
    assert nizk.verify_ballot(P, gamma_agg, h, cipher, proof)


def test_ballot_proof_roundtrip(P):
    _, _, _, proof = _ballot(P, _rng(), 1)
    assert nizk.BallotProof.from_bytes(proof.to_bytes()) == proof


@pytest.mark.parametrize("v", [2, 5, ORDER - 1])
def test_ballot_proof_unprovable_outside_domain(P, v):
    """A ciphertext encrypting v not in {0,1} admits no accepted proof by
    either honest branch; a dishonest prover would need to forge one."""
    rng = _rng()
    gamma_agg = random_scalar(rng) * P.g1
    h = hash_to_g1(b"ballot base")
    k = random_scalar(rng)
    cipher = (k * P.g1, k * gamma_agg + v * h)
    # proving with the honest machinery claims v=0 or v=1; both must fail
    for claimed in (0, 1):
        proof = nizk.prove_ballot(P, gamma_agg, h, claimed, k, cipher, rng)
        assert not nizk.verify_ballot(P, gamma_agg, h, cipher, proof)


def test_ballot_proof_rejects_mutations(P):
    rng = _rng()
    gamma_agg, h, cipher, proof = _ballot(P, rng, 1)
    g1r = random_scalar(rng) * P.g1
    assert not nizk.verify_ballot(P, gamma_agg, h,
                                  (cipher[0] + g1r, cipher[1]), proof)
    assert not nizk.verify_ballot(P, gamma_agg, h,
                                  (cipher[0], cipher[1] + g1r), proof)
    for field in ("A0", "B0", "A1", "B1"):
        bad = replace(proof, **{field: getattr(proof, field) + g1r})
        assert not nizk.verify_ballot(P, gamma_agg, h, cipher, bad)
    for field in ("c0", "r0", "c1", "r1"):
        bad = replace(proof, **{field: (getattr(proof, field) + 1) % ORDER})
        assert not nizk.verify_ballot(P, gamma_agg, h, cipher, bad)


def test_ballot_proofs_not_transplantable(P):
    """A proof for one ciphertext must not validate another, even for the
    same plaintext."""
    rng = _rng()
    gamma_agg = random_scalar(rng) * P.g1
    h = hash_to_g1(b"ballot base")
    k1, k2 = random_scalar(rng), random_scalar(rng)
    c1 = (k1 * P.g1, k1 * gamma_agg + h)
    c2 = (k2 * P.g1, k2 * gamma_agg + h)
    proof = nizk.prove_ballot(P, gamma_agg, h, 1, k1, c1, rng)
    assert not nizk.verify_ballot(P, gamma_agg, h, c2, proof)


# -- key-possession proof ----------------------------------------------------------


def test_key_proof_verifies(P):
    rng = _rng()
    d = random_scalar(rng)
    gamma = d * P.g1
    proof = nizk.prove_key(P, d, gamma, "authority-1", rng)
    assert nizk.verify_key(P, gamma, "authority-1", proof)
    assert nizk.KeyProof.from_bytes(proof.to_bytes()) == proof


def test_key_proof_bound_to_identity(P):
    rng = _rng()
    d = random_scalar(rng)
    gamma = d * P.g1
    proof = nizk.prove_key(P, d, gamma, "authority-1", rng)
    assert not nizk.verify_key(P, gamma, "authority-2", proof)


def test_key_proof_rejects_foreign_key(P):
    rng = _rng()
    d = random_scalar(rng)
    proof = nizk.prove_key(P, d, d * P.g1, "authority-1", rng)
    other = random_scalar(rng) * P.g1
    assert not nizk.verify_key(P, other, "authority-1", proof)
