import random

import pytest

from diagramlab.diagram import (
    CharacterClashError,
    CoeffVector,
    CycleUndefinedError,
    DiagramError,
    LambdaSeq,
    UnknownCharacterError,
    WindowOverflowError,
    build_registry,
    generate_lambda,
    pi_tilde,
    s_pi_tilde,
    twist_identity_check,
)
from diagramlab.gf import embed_subfield, make_field
from diagramlab.weights import Character, GenericParams, OrbitIndexSet, delta

P5 = GenericParams(5, 3, (1, 1, 1))


@pytest.fixture(scope="module")
def fields():
    base = make_field(5, 3)
    ext = make_field(5, 6, parent=base)
    return base, ext


@pytest.fixture(scope="module")
def registry():
    return build_registry(P5)


def lam_of(fields, mode, seed=17, window=8):
    base, ext = fields
    return generate_lambda(mode, base, ext, window, random.Random(seed))


def unit(fields, i, code=None):
    _, ext = fields
    if code is None:
        return CoeffVector.unit(ext, i)
    return CoeffVector.unit(ext, i, ext.from_code(code))


# -- registry ------------------------------------------------------------------


def test_registry_has_twelve_distinct_characters(registry):
    chars = registry.characters()
    assert len(chars) == 12
    assert len(set(chars)) == 12


def test_registry_cycle_map(registry):
    for mask in range(8):
        J = OrbitIndexSet.from_bitmask(3, mask)
        chi = registry.socle_char_of_block(mask)
        assert registry.cycle_target(chi) == registry.socle_char_of_block(delta(J).bitmask)
    assert registry.cycle_target(registry.chi1) == registry.socle_char_of_block(0)
    assert registry.cycle_target(registry.chi2) == registry.socle_char_of_block(0b001)
    assert "cyc_chi1" in registry.notes


def test_cycle_undefined_on_swapped_specials(registry):
    with pytest.raises(CycleUndefinedError):
        registry.cycle_target(registry.chi1_swap)
    with pytest.raises(CycleUndefinedError):
        registry.cycle_target(registry.chi2_swap)


def test_registry_incidence(registry):
    mask2 = OrbitIndexSet.of(3, {2}).bitmask
    mask02 = OrbitIndexSet.of(3, {0, 2}).bitmask
    assert registry.incidence[mask2] == (registry.socle_char_of_block(mask2), registry.chi1)
    assert registry.incidence[0] == (registry.socle_char_of_block(0), registry.chi1_swap)
    assert registry.incidence[0b011] == (registry.socle_char_of_block(0b011), registry.chi2)
    assert registry.incidence[0b001] == (registry.socle_char_of_block(0b001), registry.chi2_swap)
    assert registry.incidence[mask02] == (registry.socle_char_of_block(mask02),)


def test_registry_clash_on_zero_twist():
    # with twist 0 the first distinguished character coincides with the
    # configured socle character of J={1,2} under the truncated encoding
    with pytest.raises(CharacterClashError):
        build_registry(P5, special_twist=0)


def test_transport_table(registry):
    assert registry.transport_of(registry.chi_plus).shift == +1
    assert registry.transport_of(registry.chi_plus.swap()).shift == -1
    assert registry.transport_of(registry.chi_minus).shift == -1
    assert registry.transport_of(registry.chi_minus.swap()).shift == +1
    assert registry.transport_of(registry.chi1).scale == "lambda"
    assert registry.transport_of(registry.chi1_swap).scale == "lambda_inverse"
    assert registry.transport_of(registry.chi2).shift == 0
    assert registry.transport_of(registry.socle_char_of_block(0)).shift == 0
    with pytest.raises(UnknownCharacterError):
        registry.transport_of(Character(124, 5, 9))


# -- lambda sequences ----------------------------------------------------------


def test_lambda_modes_validate(fields):
    base, ext = fields
    for mode in ("rational", "twisted", "spanning", "degenerate"):
        lam = lam_of(fields, mode)
        assert lam.mode == mode
        for i in range(-lam.window, lam.window + 1):
            assert not lam.at(i).is_zero
    lam = lam_of(fields, "rational")
    assert all(lam.is_rational_at(i) for i in range(-8, 9))
    lam = lam_of(fields, "twisted")
    assert lam.is_rational_at(0)
    assert all(lam.at(i) != lam.at(0) for i in range(-8, 9) if i != 0)


def test_lambda_mode_predicate_enforced(fields):
    base, ext = fields
    one = ext.one()
    values = {i: one for i in range(-2, 3)}
    with pytest.raises(DiagramError):
        LambdaSeq(base, ext, 2, values, "twisted")
    LambdaSeq(base, ext, 2, values, "degenerate")
    LambdaSeq(base, ext, 2, values, "rational")
    with pytest.raises(DiagramError):
        LambdaSeq(base, ext, 2, values, "spanning")


def test_lambda_window_coverage_required(fields):
    base, ext = fields
    values = {i: ext.one() for i in range(-2, 2)}  # missing +2
    with pytest.raises(DiagramError):
        LambdaSeq(base, ext, 2, values, "degenerate")


# -- coefficient vectors ---------------------------------------------------------


def test_coeff_vector_basics(fields):
    _, ext = fields
    c = CoeffVector.from_items(ext, [(2, 1), (0, 3), (5, 0)])
    assert c.support == (0, 2)
    assert c[5].is_zero
    assert c.shifted(3).support == (3, 5)
    assert c.minus(c).is_zero
    d = CoeffVector.from_items(ext, [(0, 1), (0, 4)])
    assert d.is_zero  # 1 + 4 = 0 mod 5


def test_coeff_vector_normalized(fields):
    _, ext = fields
    three = ext.element(3)
    c = CoeffVector.from_items(ext, [(1, three), (4, ext.element(2))])
    n = c.normalized()
    assert n[1] == ext.one()
    assert n[4] == ext.element(2) / three


# -- the involution ---------------------------------------------------------------


def test_pi_tilde_shift_up_example(fields, registry):
    lam = lam_of(fields, "twisted")
    chi, c = pi_tilde(registry.chi_plus, unit(fields, 0), lam, registry)
    assert chi == registry.chi_plus.swap()
    assert c.support == (1,)
    assert c[1] == lam.ext.one()


def test_pi_tilde_lambda_twist_example(fields, registry):
    _, ext = fields
    lam = lam_of(fields, "twisted")
    v = CoeffVector.from_items(ext, [(0, 1), (2, 1)])
    chi, c = pi_tilde(registry.chi1, v, lam, registry)
    assert chi == registry.chi1_swap
    assert c[0] == lam.at(0)
    assert c[2] == lam.at(2)


def test_pi_tilde_involution_randomized(fields, registry):
    base, ext = fields
    rng = random.Random(99)
    chars = registry.characters()
    count = 0
    for mode in ("rational", "twisted", "spanning", "degenerate"):
        lam = lam_of(fields, mode, seed=mode.__hash__() % 1000)
        for _ in range(250):
            chi = chars[rng.randrange(len(chars))]
            support = rng.sample(range(-6, 7), rng.randint(1, 4))
            c = CoeffVector.from_items(
                ext, [(i, ext.random_nonzero(rng)) for i in support])
            chi2, c2 = pi_tilde(chi, c, lam, registry)
            chi3, c3 = pi_tilde(chi2, c2, lam, registry)
            assert chi3 == chi and c3 == c
            count += 1
    assert count == 1000


def test_pi_tilde_window_overflow(fields, registry):
    lam = lam_of(fields, "twisted")
    with pytest.raises(WindowOverflowError):
        pi_tilde(registry.chi_plus, unit(fields, lam.window), lam, registry)


# -- socle cycling -----------------------------------------------------------------


def test_s_pi_tilde_examples(fields, registry):
    lam = lam_of(fields, "twisted")
    chi, c = s_pi_tilde(registry.socle_char_of_block(0), unit(fields, 0), lam, registry)
    assert chi == registry.socle_char_of_block(0b001)
    assert c.support == (0,)
    chi, c = s_pi_tilde(registry.chi_plus, unit(fields, 0), lam, registry)
    assert chi == registry.socle_char_of_block(0)
    assert c.support == (1,)
    with pytest.raises(CycleUndefinedError):
        s_pi_tilde(registry.chi1_swap, unit(fields, 0), lam, registry)


def test_orbit_loops_net_shift(fields, registry):
    lam = lam_of(fields, "twisted")
    # six steps around the big orbit: net shift +1
    chi = registry.socle_char_of_block(0)
    c = unit(fields, 0)
    for _ in range(6):
        chi, c = s_pi_tilde(chi, c, lam, registry)
    assert chi == registry.socle_char_of_block(0)
    assert c.support == (1,)
    assert c[1] == lam.ext.one()
    # two steps around the small orbit: net shift -1
    chi = registry.socle_char_of_block(0b100)
    c = unit(fields, 0)
    for _ in range(2):
        chi, c = s_pi_tilde(chi, c, lam, registry)
    assert chi == registry.socle_char_of_block(0b100)
    assert c.support == (-1,)
    assert c[-1] == lam.ext.one()


# -- the twist identity -------------------------------------------------------------


def test_twist_identity_default(fields, registry):
    _, ext = fields
    lam = lam_of(fields, "twisted")
    rep = twist_identity_check(lam, registry, [unit(fields, 0)])
    assert rep.ok
    r = rep.samples[0]["ratios"][0]
    assert r["ratio"] == list(lam.at(0).coeffs)


def test_twist_identity_two_point_support(fields, registry):
    _, ext = fields
    lam = lam_of(fields, "twisted")
    c = CoeffVector.from_items(ext, [(0, 1), (3, 2)])
    rep = twist_identity_check(lam, registry, [c])
    assert rep.ok
    ratios = {r["index"]: r["ratio"] for r in rep.samples[0]["ratios"]}
    assert ratios[0] == list(lam.at(0).coeffs)
    assert ratios[3] == list(lam.at(3).coeffs)


def test_twist_identity_degenerate_all_one(fields, registry):
    base, ext = fields
    one = ext.one()
    values = {i: one for i in range(-8, 9)}
    lam = LambdaSeq(base, ext, 8, values, "degenerate")
    rep = twist_identity_check(lam, registry, [unit(fields, 0)])
    assert rep.ok
    assert rep.samples[0]["ratios"][0]["ratio"] == list(one.coeffs)


def test_twist_identity_with_nontrivial_mu(fields, registry):
    base, _ = fields
    lam = lam_of(fields, "twisted")
    mu = base.element(3)
    rep = twist_identity_check(lam, registry, [unit(fields, 0)], mu=mu)
    assert rep.ok
    r = rep.samples[0]["ratios"][0]
    mu_ext = embed_subfield(mu, lam.ext)
    assert r["ratio"] == list((lam.at(0) * mu_ext).coeffs)
