"""Threshold credential lifecycle: dealer, blind issuance, aggregation,
randomized shows, and the per-petition double-spend tag."""

from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zkpetition import credentials, devicesig
from zkpetition.groups import ORDER, SeededRng, hash_to_g1, random_scalar, setup

from oracles import LAGRANGE_12, LAGRANGE_123, lagrange_at_zero


@pytest.fixture(scope="module")
def P():
    return setup("v1")


def _issue(P, rng, t, n, m=None):
    """Runs the whole issuance flow; returns (m, credential, verify keys)."""
    signing, verify = credentials.ttp_keygen(P, t, n, rng)
    if m is None:
        m = random_scalar(rng)
    priv, pub = devicesig.keygen(rng)
    d, request = credentials.prepare_blind_sign(P, m, priv, pub, rng)
    shares = []
    for sk in signing:
        partial = credentials.blind_sign(P, sk, request)
        share = credentials.unblind(partial, d)
        assert credentials.verify_partial(P, verify[sk.index - 1], m, share)
        shares.append((sk.index, share))
    return m, shares, verify


# -- interpolation ----------------------------------------------------------------


def test_lagrange_known_vectors():
    assert credentials.lagrange_coefficients([1, 2]) == LAGRANGE_12
    assert credentials.lagrange_coefficients([1, 2, 3]) == LAGRANGE_123


@settings(max_examples=30, deadline=None)
@given(st.sets(st.integers(min_value=1, max_value=40), min_size=1, max_size=6))
def test_lagrange_matches_fraction_oracle(indices):
    indices = sorted(indices)
    assert credentials.lagrange_coefficients(indices) == lagrange_at_zero(indices)


def test_lagrange_rejects_bad_indices():
    with pytest.raises(ValueError):
        credentials.lagrange_coefficients([1, 1, 2])
    with pytest.raises(ValueError):
        credentials.lagrange_coefficients([0, 1])


@settings(max_examples=10, deadline=None)
@given(st.integers(min_value=1, max_value=4),
       st.lists(st.integers(min_value=0, max_value=ORDER - 1),
                min_size=4, max_size=4))
def test_interpolation_recovers_secret(t, coeffs):
    """Recombining any t shares of a degree t-1 polynomial at zero yields
    the constant term — checked in plain modular arithmetic."""
    poly = coeffs[:t]
    shares = {i: sum(c * pow(i, k, ORDER) for k, c in enumerate(poly)) % ORDER
              for i in range(1, t + 2)}
    for subset in combinations(shares, t):
        lag = credentials.lagrange_coefficients(list(subset))
        recovered = sum(l * shares[i] for l, i in zip(lag, subset)) % ORDER
        assert recovered == poly[0] % ORDER


# -- dealer -----------------------------------------------------------------------


def test_ttp_keygen_rejects_bad_threshold(P):
    rng = SeededRng(b"dealer")
    with pytest.raises(ValueError):
        credentials.ttp_keygen(P, 0, 3, rng)
    with pytest.raises(ValueError):
        credentials.ttp_keygen(P, 4, 3, rng)


def test_verify_keys_match_signing_keys(P):
    rng = SeededRng(b"dealer")
    signing, verify = credentials.ttp_keygen(P, 2, 3, rng)
    for sk, vk in zip(signing, verify):
        assert sk.index == vk.index
        assert vk.alpha == sk.x * P.g2
        assert vk.beta == sk.y * P.g2


# -- issuance ----------------------------------------------------------------------


def test_all_subsets_agree(P):
    rng = SeededRng(b"subsets")
    m, shares, verify = _issue(P, rng, 2, 3)
    creds = []
    for subset in combinations(shares, 2):
        cred = credentials.agg_cred(list(subset))
        agg_vk = credentials.agg_key(P, [verify[i - 1] for i, _ in subset])
        bundle = credentials.prove_cred(P, agg_vk, m, cred, "p", rng)
        assert credentials.verify_cred(P, agg_vk, bundle, "p")
        creds.append(cred)
    assert all(c == creds[0] for c in creds)


def test_blind_sign_checks_signature_before_proof(P):
    """A corrupted request body fails the device signature; only a validly
    re-signed request with a broken proof reaches the proof check."""
    rng = SeededRng(b"ordering")
    signing, _ = credentials.ttp_keygen(P, 1, 1, rng)
    m = random_scalar(rng)
    priv, pub = devicesig.keygen(rng)
    _, request = credentials.prepare_blind_sign(P, m, priv, pub, rng)

    from dataclasses import replace
    tampered = replace(request, c_m=request.c_m + P.g1)
    with pytest.raises(credentials.IssuanceRejected) as err:
        credentials.blind_sign(P, signing[0], tampered)
    assert err.value.code == "bad_signature"

    # attacker with their own device key re-signs the tampered body: the
    # signature now passes, so the broken proof is what gets caught
    epriv, epub = devicesig.keygen(rng)
    stolen = replace(tampered, pk_client=epub, request_sig=b"")
    stolen = replace(stolen, request_sig=devicesig.sign(epriv, stolen.signed_body()))
    with pytest.raises(credentials.IssuanceRejected) as err:
        credentials.blind_sign(P, signing[0], stolen)
    assert err.value.code == "bad_proof"


def test_unblind_with_wrong_secret_fails_verification(P):
    rng = SeededRng(b"wrongd")
    signing, verify = credentials.ttp_keygen(P, 1, 1, rng)
    m = random_scalar(rng)
    priv, pub = devicesig.keygen(rng)
    d, request = credentials.prepare_blind_sign(P, m, priv, pub, rng)
    partial = credentials.blind_sign(P, signing[0], request)
    bad = credentials.unblind(partial, (d + 1) % ORDER)
    assert not credentials.verify_partial(P, verify[0], m, bad)


def test_request_serialization_roundtrip(P):
    rng = SeededRng(b"serialize")
    m = random_scalar(rng)
    priv, pub = devicesig.keygen(rng)
    _, request = credentials.prepare_blind_sign(P, m, priv, pub, rng)
    body = request.signed_body()
    assert devicesig.verify(request.pk_client, body, request.request_sig)


# -- shows ------------------------------------------------------------------------


def _credential(P, rng, t=2, n=3):
    m, shares, verify = _issue(P, rng, t, n)
    cred = credentials.agg_cred(shares[:t])
    agg_vk = credentials.agg_key(P, verify[:t])
    return m, cred, agg_vk


def test_show_verifies_and_is_randomized(P):
    rng = SeededRng(b"shows")
    m, cred, agg_vk = _credential(P, rng)
    b1 = credentials.prove_cred(P, agg_vk, m, cred, "petition-a", rng)
    b2 = credentials.prove_cred(P, agg_vk, m, cred, "petition-a", rng)
    assert credentials.verify_cred(P, agg_vk, b1, "petition-a")
    assert credentials.verify_cred(P, agg_vk, b2, "petition-a")
    assert b1.kappa != b2.kappa
    assert b1.nu != b2.nu
    assert b1.sigma_prime != b2.sigma_prime
    assert b1.zeta == b2.zeta  # the double-spend tag is deterministic


def test_zeta_per_petition(P):
    rng = SeededRng(b"zeta")
    m, cred, agg_vk = _credential(P, rng)
    ba = credentials.prove_cred(P, agg_vk, m, cred, "petition-a", rng)
    bb = credentials.prove_cred(P, agg_vk, m, cred, "petition-b", rng)
    assert ba.zeta != bb.zeta
    assert ba.zeta == m * hash_to_g1(b"petition-a")


def test_show_rejects_identity_h_prime(P):
    rng = SeededRng(b"ident")
    m, cred, agg_vk = _credential(P, rng)
    bundle = credentials.prove_cred(P, agg_vk, m, cred, "p", rng)
    from dataclasses import replace
    zero = credentials.Credential(
        bundle.sigma_prime.h * 0, bundle.sigma_prime.s * 0)
    assert not credentials.verify_cred(
        P, agg_vk, replace(bundle, sigma_prime=zero), "p")


def test_show_rejects_wrong_key(P):
    rng = SeededRng(b"wrongkey")
    m, cred, agg_vk = _credential(P, rng)
    _, _, other_vk = _credential(P, rng)
    bundle = credentials.prove_cred(P, agg_vk, m, cred, "p", rng)
    assert not credentials.verify_cred(P, other_vk, bundle, "p")


def test_show_bundle_roundtrip(P):
    rng = SeededRng(b"bundle")
    m, cred, agg_vk = _credential(P, rng)
    bundle = credentials.prove_cred(P, agg_vk, m, cred, "p", rng)
    again = credentials.ShowBundle.from_bytes(bundle.to_bytes())
    assert again == bundle
    assert credentials.verify_cred(P, agg_vk, again, "p")


def test_forged_credential_fails(P):
    """A bundle built from a random 'credential' never passes the pairing
    check."""
    rng = SeededRng(b"forge")
    m, _, agg_vk = _credential(P, rng)
    fake = credentials.Credential(
        random_scalar(rng) * P.g1, random_scalar(rng) * P.g1)
    bundle = credentials.prove_cred(P, agg_vk, m, fake, "p", rng)
    assert not credentials.verify_cred(P, agg_vk, bundle, "p")
