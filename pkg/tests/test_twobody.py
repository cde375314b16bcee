import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trapsym.errors import ConfigInvalid, KernelUndersampled, MissingElement, StateOutOfRange
from trapsym.twobody import InteractionSpec, TwoBodyTable, canonical_key, contact_elements, interaction_elements

ROOT2PI = math.sqrt(2 * math.pi)
STATES = (0, 1, 2, 3, 4)


@pytest.fixture(scope="module")
def contact(harmonic):
    return contact_elements(harmonic, STATES, 1.0)


@pytest.fixture(scope="module")
def coarse():
    from trapsym.onebody import Grid, TrapSpec, solve_one_body

    return solve_one_body(TrapSpec("harmonic"), Grid(-8, 8, 401), 6)


@pytest.fixture(scope="module")
def gaussian(coarse):
    return interaction_elements(coarse, InteractionSpec("gaussian", strength=0.7, range=0.8), range(5))


def test_harmonic_contact_closed_forms(contact):
    assert contact.element(0, 0, 0, 0) == pytest.approx(1 / ROOT2PI, abs=1e-10)
    assert contact.direct(0, 1) == pytest.approx(1 / (2 * ROOT2PI), abs=1e-10)
    assert contact.exchange(0, 1) == pytest.approx(1 / (2 * ROOT2PI), abs=1e-10)
    assert contact.direct(1, 1) == pytest.approx(3 / (4 * ROOT2PI), abs=1e-10)
    assert contact.element(0, 0, 0, 2) == pytest.approx(-1 / (4 * math.sqrt(math.pi)), abs=1e-10)
    # odd total parity vanishes
    assert abs(contact.element(0, 0, 0, 1)) < 1e-12


def test_contact_scales_with_g(harmonic):
    a = contact_elements(harmonic, (0, 1), 1.0)
    b = contact_elements(harmonic, (0, 1), -2.5)
    assert b.direct(0, 1) == pytest.approx(-2.5 * a.direct(0, 1))


def test_gaussian_ground_state_closed_form(gaussian):
    # relative coordinate of two ground-state particles has unit variance
    s, w = 0.7, 0.8
    assert gaussian.direct(0, 0) == pytest.approx(s * w / math.sqrt(1 + w * w), abs=1e-8)


def test_narrow_gaussian_approaches_contact(harmonic, contact):
    spec = InteractionSpec.gaussian_for_contact(1.0, 0.05)
    table = interaction_elements(harmonic, spec, (0, 1, 2))
    for a, b, c, d in [(0, 0, 0, 0), (0, 1, 0, 1), (0, 1, 1, 0), (1, 1, 1, 1), (0, 0, 0, 2), (1, 2, 1, 2)]:
        assert table.element(a, b, c, d) == pytest.approx(contact.element(a, b, c, d), rel=0.02)


def raw_general(sol, spec, a, b, c, d):
    q, w = sol.q, sol.weights
    phi = sol.wavefunctions
    k = spec.kernel(q[:, None] - q[None, :])
    return float((w * phi[a] * phi[c]) @ k @ (w * phi[b] * phi[d]))


@settings(max_examples=40, deadline=None)
@given(st.tuples(*[st.integers(0, 4)] * 4))
def test_general_table_matches_direct_quadrature(gaussian, coarse, idx):
    spec = InteractionSpec("gaussian", strength=0.7, range=0.8)
    a, b, c, d = idx
    ref = raw_general(coarse, spec, a, b, c, d)
    for perm in [(a, b, c, d), (b, a, d, c), (c, d, a, b), (c, b, a, d), (a, d, c, b)]:
        assert gaussian.element(*perm) == pytest.approx(ref, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.permutations([0, 1, 2, 3]), st.tuples(*[st.sampled_from(STATES)] * 4))
def test_contact_is_fully_symmetric(contact, harmonic, perm, idx):
    w, phi = harmonic.weights, harmonic.wavefunctions
    ref = float(np.sum(w * phi[idx[0]] * phi[idx[1]] * phi[idx[2]] * phi[idx[3]]))
    assert contact.element(*(idx[i] for i in perm)) == pytest.approx(ref, abs=1e-12)


def test_dense_matches_elements(gaussian):
    pos = {s: i for i, s in enumerate(gaussian.states)}
    for a, b, c, d in [(0, 1, 2, 3), (4, 2, 0, 1), (1, 1, 3, 3)]:
        assert gaussian.dense[pos[a], pos[b], pos[c], pos[d]] == gaussian.element(a, b, c, d)


def test_storage_is_minimal(contact, gaussian):
    from math import comb

    assert len(contact.storage) == comb(len(STATES) + 3, 4)
    assert all(canonical_key("general", *k) == k for k in gaussian.storage)


def test_json_round_trip(gaussian, contact):
    for t in (gaussian, contact):
        back = TwoBodyTable.from_json(t.to_json())
        assert back.states == t.states and back.kind == t.kind
        assert np.array_equal(back.dense, t.dense)
        assert back.to_json() == t.to_json()


def test_missing_element(contact):
    with pytest.raises(MissingElement):
        contact.element(0, 0, 0, 7)
    storage = dict(contact.storage)
    storage.pop((0, 0, 0, 0))
    with pytest.raises(MissingElement):
        TwoBodyTable.from_storage(contact.states, "contact", storage)


def test_state_out_of_range(harmonic):
    with pytest.raises(StateOutOfRange):
        contact_elements(harmonic, (0, 25), 1.0)
    with pytest.raises(StateOutOfRange):
        contact_elements(harmonic, (), 1.0)


def test_undersampled_kernel(coarse):
    with pytest.raises(KernelUndersampled):
        interaction_elements(coarse, InteractionSpec("gaussian", strength=1.0, range=0.05), (0, 1))
    with pytest.raises(KernelUndersampled):
        interaction_elements(coarse, InteractionSpec("sampled_kernel", samples=((0.0, 1.0), (0.05, 0.0))), (0, 1))


def test_sampled_kernel_reproduces_gaussian(coarse, gaussian):
    r = np.linspace(0, 10, 4001)
    spec = InteractionSpec("sampled_kernel", samples=tuple(zip(r, 0.7 * np.exp(-0.5 * (r / 0.8) ** 2))))
    table = interaction_elements(coarse, spec, range(5))
    assert np.abs(table.dense - gaussian.dense).max() < 1e-5


def test_spec_validation_and_round_trip():
    with pytest.raises(ConfigInvalid):
        InteractionSpec("yukawa")
    with pytest.raises(ConfigInvalid):
        InteractionSpec("gaussian", strength=1.0, range=0.0)
    with pytest.raises(ConfigInvalid):
        InteractionSpec("sampled_kernel", samples=((1.0, 1.0), (0.5, 0.0)))
    for spec in [InteractionSpec("contact", g=-0.3), InteractionSpec("gaussian", strength=2.0, range=0.4)]:
        assert InteractionSpec.from_dict(spec.to_dict()) == spec
