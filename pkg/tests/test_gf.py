import random

import pytest

from diagramlab.gf import (
    FieldElem,
    MixedFieldsError,
    NoDeclaredParentError,
    NonPrimeError,
    ReducibleModulusError,
    ZeroInverseError,
    embed_subfield,
    frobenius,
    make_field,
    subfield_span,
)


def test_accepts_known_irreducible_cubic():
    # x^3 + x + 1 has values 1,3,1,1,4 at 0..4 mod 5: no roots, so irreducible.
    F = make_field(5, 3, (1, 1, 0, 1))
    assert F.order == 125
    assert F.modulus == (1, 1, 0, 1)


def test_prime_field_default_modulus_is_x():
    F = make_field(5, 1)
    assert F.modulus == (0, 1)
    assert F.order == 5


def test_non_prime_characteristic_rejected():
    with pytest.raises(NonPrimeError):
        make_field(4, 2)
    with pytest.raises(NonPrimeError):
        make_field(2, 3)


def test_reducible_modulus_rejected():
    # x^3 + 1 = (x+1)(x^2-x+1) over GF(5)
    with pytest.raises(ReducibleModulusError):
        make_field(5, 3, (1, 0, 0, 1))
    with pytest.raises(ReducibleModulusError):
        make_field(5, 3, (1, 1, 0, 2))  # not monic


def test_default_modulus_deterministic_and_small():
    F1 = make_field(5, 3)
    F2 = make_field(5, 3)
    assert F1.modulus == F2.modulus == (1, 1, 0, 1)


def test_prime_field_arithmetic():
    F = make_field(5, 1)
    two, three = F.element(2), F.element(3)
    assert (two * three).code == 1
    assert three.inverse().code == 2
    assert (two + three).code == 0
    assert (-two).code == 3


def test_field_axioms_random_triples():
    F = make_field(5, 3)
    rng = random.Random(7)
    for _ in range(200):
        a, b, c = (F.random_element(rng) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + (-a) == F.zero()
    for _ in range(100):
        a = F.random_nonzero(rng)
        assert a * a.inverse() == F.one()


def test_pow_and_inverse_agree():
    F = make_field(5, 3)
    rng = random.Random(3)
    for _ in range(50):
        a = F.random_nonzero(rng)
        assert a ** (F.order - 2) == a.inverse()
        assert a ** 0 == F.one()
        assert a ** -1 == a.inverse()


def test_zero_inverse_raises():
    F = make_field(5, 3)
    with pytest.raises(ZeroInverseError):
        F.zero().inverse()


def test_mixed_fields_raise():
    F = make_field(5, 3)
    G = make_field(7, 1)
    with pytest.raises(MixedFieldsError):
        F.one() + G.one()


def test_frobenius_prime_field_identity():
    F = make_field(5, 1)
    for a in F.elements():
        assert frobenius(a) == a


def test_frobenius_order_and_additivity():
    F = make_field(5, 3)
    rng = random.Random(11)
    for _ in range(100):
        a = F.random_element(rng)
        b = F.random_element(rng)
        it = a
        for _ in range(3):
            it = frobenius(it)
        assert it == a
        assert frobenius(a + b) == frobenius(a) + frobenius(b)
        assert frobenius(a * b) == frobenius(a) * frobenius(b)
    # exact order 3 on a generator
    g = F.multiplicative_generator
    assert frobenius(g) != g
    assert frobenius(frobenius(g)) != g


def test_fermat_identity_all_elements_small_field():
    F = make_field(3, 2)
    for a in F.elements():
        assert a ** F.order == a


def test_embedding_is_homomorphism():
    base = make_field(5, 3)
    ext = make_field(5, 6, parent=base)
    rng = random.Random(23)
    assert embed_subfield(base.zero(), ext) == ext.zero()
    assert embed_subfield(base.one(), ext) == ext.one()
    for _ in range(100):
        a, b = base.random_element(rng), base.random_element(rng)
        ea, eb = embed_subfield(a, ext), embed_subfield(b, ext)
        assert embed_subfield(a + b, ext) == ea + eb
        assert embed_subfield(a * b, ext) == ea * eb


def test_embedding_image_is_a_copy_of_the_subfield():
    base = make_field(3, 2)
    ext = make_field(3, 4, parent=base)
    image = {embed_subfield(a, ext).code for a in base.elements()}
    assert len(image) == base.order
    assert image == set(ext.embedded_codes())
    # closed under arithmetic
    codes = sorted(image)
    for a in codes[:6]:
        for b in codes[:6]:
            assert ext.add_codes(a, b) in image
            assert ext.mul_codes(a, b) in image


def test_embedding_requires_declared_parent():
    base = make_field(5, 3)
    ext = make_field(5, 6)
    with pytest.raises(NoDeclaredParentError):
        embed_subfield(base.one(), ext)


def test_span_trivial_cases():
    base = make_field(5, 3)
    ext = make_field(5, 6, parent=base)
    assert subfield_span([], base).dimension == 0
    assert subfield_span([ext.one()], base).dimension == 1


def test_span_reaches_full_extension():
    base = make_field(3, 2)
    ext = make_field(3, 4, parent=base)
    one = ext.one()
    g = ext.from_code(ext.encode((0, 1)))
    res = subfield_span([one, g], base)
    assert res.dimension == 2
    assert res.basis == [one, g]


def test_span_invariant_under_permutation_and_rescale():
    base = make_field(3, 2)
    ext = make_field(3, 4, parent=base)
    rng = random.Random(5)
    elems = [ext.random_nonzero(rng) for _ in range(4)]
    dim = subfield_span(elems, base).dimension
    rng.shuffle(elems)
    assert subfield_span(elems, base).dimension == dim
    scale = embed_subfield(base.random_nonzero(rng), ext)
    assert subfield_span([scale * e for e in elems], base).dimension == dim


def test_subfield_coords_roundtrip():
    base = make_field(3, 2)
    ext = make_field(3, 4, parent=base)
    rng = random.Random(9)
    x = ext.from_code(ext.encode((0, 1)))
    for _ in range(50):
        a = ext.random_element(rng)
        c0, c1 = ext.subfield_coords(a.code)
        rebuilt = embed_subfield(base.from_code(c0), ext) + \
            embed_subfield(base.from_code(c1), ext) * x
        assert rebuilt == a
