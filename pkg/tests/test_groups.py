"""Group abstraction: scalar/point serialization, arithmetic laws,
hash-to-curve, pairing bilinearity, and deterministic randomness."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zkpetition.groups import (
    G1_LEN,
    G2_LEN,
    GT_LEN,
    ORDER,
    G1Point,
    G2Point,
    GTElement,
    SeededRng,
    SystemRng,
    hash_to_g1,
    pairing,
    random_scalar,
    scalar_from_bytes,
    scalar_to_bytes,
)

scalars = st.integers(min_value=0, max_value=ORDER - 1)
nonzero_scalars = st.integers(min_value=1, max_value=ORDER - 1)


# -- scalars -------------------------------------------------------------------


@given(scalars)
def test_scalar_roundtrip(x):
    data = scalar_to_bytes(x)
    assert len(data) == 32
    assert scalar_from_bytes(data) == x


def test_scalar_range_enforced():
    with pytest.raises(ValueError):
        scalar_from_bytes(scalar_to_bytes(ORDER - 1)[:-1] + b"\xff\xff")
    with pytest.raises(ValueError):
        scalar_from_bytes((ORDER).to_bytes(32, "big"))
    with pytest.raises(ValueError):
        scalar_from_bytes(b"\x00" * 31)
    with pytest.raises(ValueError):
        scalar_to_bytes(-1)
    with pytest.raises(ValueError):
        scalar_to_bytes(ORDER)


# -- group laws ----------------------------------------------------------------


@settings(max_examples=20, deadline=None)
@given(scalars, scalars)
def test_g1_scalar_mul_distributes(a, b):
    g = G1Point.generator()
    assert a * g + b * g == ((a + b) % ORDER) * g


def test_g1_basics():
    g = G1Point.generator()
    ident = G1Point.identity()
    assert g + ident == g
    assert g - g == ident
    assert -g + g == ident
    assert 0 * g == ident
    assert ORDER * g == ident
    assert 2 * g == g + g
    assert ident.is_identity() and not g.is_identity()


def test_g2_basics():
    g = G2Point.generator()
    ident = G2Point.identity()
    assert g + ident == g
    assert g - g == ident
    assert ORDER * g == ident
    assert 3 * g == g + g + g


@settings(max_examples=10, deadline=None)
@given(nonzero_scalars)
def test_point_serialization_roundtrip(k):
    p1 = k * G1Point.generator()
    assert len(p1.to_bytes()) == G1_LEN
    assert G1Point.from_bytes(p1.to_bytes()) == p1
    p2 = k * G2Point.generator()
    assert len(p2.to_bytes()) == G2_LEN
    assert G2Point.from_bytes(p2.to_bytes()) == p2


def test_identity_serialization():
    assert G1Point.from_bytes(b"\x00" * G1_LEN).is_identity()
    assert G2Point.from_bytes(b"\x00" * G2_LEN).is_identity()
    assert G1Point.identity().to_bytes() == b"\x00" * G1_LEN
    assert G2Point.identity().to_bytes() == b"\x00" * G2_LEN


def test_g1_rejects_off_curve():
    good = bytearray((5 * G1Point.generator()).to_bytes())
    good[40] ^= 1  # corrupt x; the (x, y) pair no longer satisfies the curve
    with pytest.raises(ValueError):
        G1Point.from_bytes(bytes(good))
    with pytest.raises(ValueError):
        G1Point.from_bytes(b"\x01" + b"\x00" * 64)  # bad prefix
    with pytest.raises(ValueError):
        G1Point.from_bytes(b"\x04" + b"\x00" * 63)  # bad length


def test_g2_rejects_off_twist():
    good = bytearray((7 * G2Point.generator()).to_bytes())
    good[50] ^= 1  # corrupt a coordinate; the point leaves the twist curve
    with pytest.raises(ValueError):
        G2Point.from_bytes(bytes(good))


# A point satisfying the twist equation whose order does not divide R
# (the twist group order is a large composite multiple of R).  The
# naive check R*P == O cannot distinguish it if the scalar is reduced
# mod the group order first, which is exactly the bug this guards.
_OUTSIDE_SUBGROUP = (
    b"\x04"
    + (2).to_bytes(32, "big")
    + (1).to_bytes(32, "big")
    + (7292567877523311580221095596750716176434782432868683424513645834767876293070)
    .to_bytes(32, "big")
    + (19659275751359636165940301690575149581329631496732780143538578556285923319774)
    .to_bytes(32, "big")
)


def test_g2_rejects_on_twist_wrong_subgroup():
    from zkpetition import bn254

    coords = [int.from_bytes(_OUTSIDE_SUBGROUP[1 + 32 * i : 33 + 32 * i], "big")
              for i in range(4)]
    pt = ((coords[0], coords[1]), (coords[2], coords[3]))
    assert bn254.g2_is_on_twist(pt)  # the on-curve check alone passes
    assert not bn254.g2_in_subgroup(pt)
    with pytest.raises(ValueError):
        G2Point.from_bytes(_OUTSIDE_SUBGROUP)


# -- hashing and pairing ---------------------------------------------------------


def test_hash_to_g1_deterministic_and_distinct():
    a = hash_to_g1(b"petition-1")
    b = hash_to_g1(b"petition-2")
    assert a == hash_to_g1(b"petition-1")
    assert a != b
    assert not a.is_identity()
    assert ORDER * a == G1Point.identity()  # in the right subgroup


def test_pairing_bilinear():
    g1, g2 = G1Point.generator(), G2Point.generator()
    e = pairing(g1, g2)
    assert e != GTElement.one()
    assert pairing(3 * g1, 5 * g2) == e ** 15
    assert pairing(3 * g1, g2) * pairing(2 * g1, g2) == pairing(5 * g1, g2)
    assert e ** ORDER == GTElement.one()


def test_pairing_identity_gives_one():
    assert pairing(G1Point.identity(), G2Point.generator()) == GTElement.one()
    assert pairing(G1Point.generator(), G2Point.identity()) == GTElement.one()


def test_gt_serialization_roundtrip():
    e = pairing(2 * G1Point.generator(), 3 * G2Point.generator())
    data = e.to_bytes()
    assert len(data) == GT_LEN
    assert GTElement.from_bytes(data) == e


# -- randomness -------------------------------------------------------------------


def test_seeded_rng_reproducible():
    a = SeededRng(b"seed")
    b = SeededRng(b"seed")
    assert a.read(100) == b.read(100)
    assert SeededRng(b"seed").read(40) != SeededRng(b"other").read(40)
    # stream position matters: two small reads equal one big read
    c = SeededRng(b"seed")
    assert c.read(60) + c.read(40) == SeededRng(b"seed").read(100)


def test_random_scalar_in_range():
    rng = SeededRng(b"scalars")
    for _ in range(100):
        x = random_scalar(rng)
        assert 1 <= x < ORDER
    assert random_scalar(SystemRng()) != random_scalar(SystemRng())
