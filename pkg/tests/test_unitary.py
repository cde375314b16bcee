import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq
from scipy.special import gamma

from trapsym.composition import Composition
from trapsym.errors import ConfigInvalid, NegativeAmplitude, RepeatedLabel, SizeMismatch, WrongN
from trapsym.onebody import Grid, TrapSpec, solve_one_body
from trapsym.permsym import Perm, all_perms, irrep_matrix, perm_compose, perm_sign
from trapsym.spectra import compositions_up_to_excitation, fermi_bose_map
from trapsym.unitary import (
    SECTOR_ORDER,
    Sector,
    near_unitary_shifts,
    near_unitary_split,
    ordering_perm,
    sector_action,
    sector_action_matrix,
    snippet_pair_wavefunctions,
    snippet_symmetrized_basis,
    tunneling_matrix,
    tunneling_params,
    unitary_spectrum,
)

ROOT2PI = math.sqrt(2 * math.pi)

# sector letter images under (12), (AB), (123), (ABC), rows a..f
SECTOR_MAP_TABLE = {
    "a": "bbec",
    "b": "aaff",
    "c": "fdae",
    "d": "ecbb",
    "e": "dfca",
    "f": "cedd",
}


# ------------------------------------------------------------------ sectors


def test_sector_map_table():
    ops = [
        ("particle", Perm.parse("(12)", 3)),
        ("ordering", ordering_perm("(AB)")),
        ("particle", Perm.parse("(123)", 3)),
        ("ordering", ordering_perm("(ABC)")),
    ]
    for s in SECTOR_ORDER:
        sec = Sector(s)
        got = "".join(sector_action(kind, g, sec).letter() for kind, g in ops)
        assert got == SECTOR_MAP_TABLE[sec.letter()], str(sec)


def test_worked_examples():
    s = Sector.parse("{312}")
    assert sector_action("ordering", ordering_perm("(AB)"), s) == Sector.parse("{132}")
    assert sector_action("particle", Perm.parse("(12)", 3), s) == Sector.parse("{321}")
    assert ordering_perm("{BAC}") == ordering_perm("(AB)")


def test_particle_and_ordering_commute():
    for p in all_perms(3):
        mp = sector_action_matrix("particle", p)
        for o in all_perms(3):
            mo = sector_action_matrix("ordering", o)
            assert np.array_equal(mp @ mo, mo @ mp)


def test_actions_are_representations():
    for a, b in itertools.product(all_perms(3), repeat=2):
        ab = perm_compose(a, b)
        for kind in ("particle", "ordering"):
            lhs = sector_action_matrix(kind, ab)
            rhs = sector_action_matrix(kind, a) @ sector_action_matrix(kind, b)
            assert np.array_equal(lhs, rhs)


def test_sector_errors():
    with pytest.raises(SizeMismatch):
        sector_action("particle", Perm.identity(2), Sector(SECTOR_ORDER[0]))
    with pytest.raises(ConfigInvalid):
        sector_action("rotation", Perm.identity(3), Sector(SECTOR_ORDER[0]))


# ------------------------------------------------------- symmetrized snippets


@pytest.fixture(scope="module")
def snippets():
    return snippet_symmetrized_basis(Composition((0, 1, 2)))


def test_snippet_basis_orthonormal(snippets):
    assert np.abs(snippets @ snippets.T - np.eye(6)).max() < 1e-12


def test_antisymmetric_row_is_sign_vector(snippets):
    signs = np.array([perm_sign(s) for s in SECTOR_ORDER]) / math.sqrt(6)
    assert np.allclose(snippets[5], signs, atol=1e-12)
    assert np.allclose(snippets[0], np.ones(6) / math.sqrt(6), atol=1e-12)


def test_ordering_reflection_pattern(snippets):
    uac = sector_action_matrix("ordering", ordering_perm("(AC)"))
    diag = np.diag(snippets @ uac @ snippets.T)
    assert np.allclose(diag, [1, 1, 1, -1, -1, -1], atol=1e-12)


def test_particle_rows_follow_young_yamanouchi(snippets):
    for p in all_perms(3):
        u = sector_action_matrix("particle", p)
        d = irrep_matrix((2, 1), p)
        for k in (1, 3):
            e = snippets[[k, k + 1]]
            assert np.allclose(u @ e.T, e.T @ d, atol=1e-12)


def test_snippet_basis_diagonalizes_symmetric_tunneling(snippets):
    t = 0.37
    block = snippets @ tunneling_matrix(t, t) @ snippets.T
    assert np.allclose(block, np.diag([-4 * t, -t, -t, -3 * t, -3 * t, 0.0]), atol=1e-12)


def test_snippet_basis_needs_distinct_labels():
    with pytest.raises(RepeatedLabel):
        snippet_symmetrized_basis(Composition((0, 0, 1)))


# ------------------------------------------------------------- near unitary


def test_closed_form_examples():
    assert near_unitary_shifts(1.0) == [("[2]", -2.0, 1), ("[1²]", 0.0, 1)]
    shifts = {n: s for n, s, _ in near_unitary_shifts(1.0, 1.0)}
    assert shifts == {"[3]": -4.0, "[21]": -3.0, "[21]'": -1.0, "[1³]": 0.0}
    shifts = {n: s for n, s, _ in near_unitary_shifts(1.0, 0.0)}
    assert shifts == {"[3]": -2.0, "[21]": -2.0, "[21]'": 0.0, "[1³]": 0.0}


@settings(max_examples=100)
@given(st.floats(0.0, 10.0), st.floats(0.0, 10.0))
def test_closed_form_matches_matrix(t, u):
    brute = np.linalg.eigvalsh(tunneling_matrix(t, u))
    closed = np.sort([s for _, s, d in near_unitary_shifts(t, u) for _ in range(d)])
    assert np.allclose(brute, closed, atol=1e-9 * max(1.0, t + u))


def test_negative_amplitude():
    with pytest.raises(NegativeAmplitude):
        near_unitary_shifts(-0.1)
    with pytest.raises(NegativeAmplitude):
        near_unitary_shifts(0.1, -0.2)


# ---------------------------------------------------------------- tunneling


def test_harmonic_amplitudes(harmonic):
    p3 = tunneling_params(harmonic, Composition((0, 1, 2)))
    assert p3.gt == pytest.approx(27 / (8 * ROOT2PI), abs=1e-8)
    assert p3.gu == pytest.approx(p3.gt, abs=1e-10)
    p2 = tunneling_params(harmonic, Composition((0, 1)), g=4.0)
    assert p2.gt == pytest.approx(2 / ROOT2PI, abs=1e-8)
    assert p2.t == pytest.approx(p2.gt / 4.0)
    assert p2.u is None


def test_two_body_amplitude_agrees_with_exact_relative_energy():
    # relative motion with a contact: -2 Γ(3/4 - ε/2) / Γ(1/4 - ε/2) = g/√2
    g = 400.0

    def f(eps):
        return -2 * gamma(0.75 - eps / 2) / gamma(0.25 - eps / 2) - g / math.sqrt(2)

    eps = brentq(f, 1.2, 1.4999999)
    shift = eps - 1.5
    sol = solve_one_body(TrapSpec("harmonic"), Grid(-10, 10, 1001), 4)
    t = tunneling_params(sol, Composition((0, 1)), g).t
    assert shift == pytest.approx(-2 * t, rel=2e-2)


def test_grid_refinement_is_stable():
    coarse = solve_one_body(TrapSpec("double_well"), Grid(-6, 6, 601), 6)
    fine = solve_one_body(TrapSpec("double_well"), Grid(-6, 6, 2401), 6)
    for labels in [(0, 1), (1, 3), (0, 1, 2)]:
        a = tunneling_params(coarse, Composition(labels))
        b = tunneling_params(fine, Composition(labels))
        assert a.gt == pytest.approx(b.gt, abs=1e-4)


def test_symmetric_traps_give_equal_amplitudes(double_well, box):
    for sol in (double_well, box):
        for labels in [(0, 1, 2), (0, 2, 3), (1, 2, 4)]:
            p = tunneling_params(sol, Composition(labels))
            assert p.gu == pytest.approx(p.gt, rel=1e-8)


def test_asymmetric_trap_breaks_equality():
    sol = solve_one_body(TrapSpec("polynomial", coefficients=(0, 0, 0.5, 0.15, 0.05)), Grid(-9, 9, 901), 5)
    p = tunneling_params(sol, Composition((0, 1, 2)))
    assert abs(p.gt - p.gu) > 1e-3 * p.gt


def test_tunneling_errors(harmonic):
    with pytest.raises(RepeatedLabel):
        tunneling_params(harmonic, Composition((0, 0, 1)))
    with pytest.raises(ConfigInvalid):
        tunneling_params(harmonic, Composition((0, 1)), g=0.0)


def test_parity_assignment(harmonic):
    comp = Composition.of((0, 1, 2), harmonic.energies)
    levels = near_unitary_split(tunneling_params(harmonic, comp), symmetric=True, parities=harmonic.parities)
    got = [(l.irrep_text(), l.parity_text(), round(l.shift / levels[0].shift * 4, 8)) for l in levels]
    # the Slater determinant of 0, 1, 2 is odd
    assert got == [("[3]", "+", 4.0), ("[21]", "-", 3.0), ("[21]'", "+", 1.0), ("[1³]", "-", 0.0)]
    two = near_unitary_split(tunneling_params(harmonic, Composition((0, 1))), True, harmonic.parities)
    assert [(l.irrep_text(), l.parity_text()) for l in two] == [("[2]", "+"), ("[1²]", "-")]


# ----------------------------------------------------------- unitary spectrum


def test_unitary_spectrum_examples():
    sig = [n + 0.5 for n in range(20)]
    comps = unitary_spectrum(sig, 3, 6.6)
    assert [c.labels for c in comps] == [(0, 1, 2), (0, 1, 3), (0, 1, 4), (0, 2, 3)]
    assert [c.labels for c in unitary_spectrum(sig, 2, 4.1)] == [(0, 1), (0, 2), (0, 3), (1, 2)]
    with pytest.raises(WrongN):
        unitary_spectrum(sig, 4, 20.0)


@pytest.mark.parametrize("N", [2, 3])
def test_fermi_bose_correspondence(N):
    sig = [n + 0.5 for n in range(30)]
    shift = N * (N - 1) // 2
    for X in range(6):
        bosons = sorted(fermi_bose_map(c).labels for c in compositions_up_to_excitation(N, X))
        fermions = sorted(c.labels for c in unitary_spectrum(sig, N, N * 0.5 + X + shift + 0.1))
        assert bosons == fermions


# --------------------------------------------------------- two-particle case


def test_snippet_pair_density_and_parity(harmonic):
    sym, asym = snippet_pair_wavefunctions(harmonic, Composition((0, 1)))
    assert np.allclose(sym**2, asym**2, atol=1e-14)
    w = harmonic.weights
    assert float(w @ (sym**2) @ w) == pytest.approx(1.0, abs=1e-8)
    # inversion q -> -q is index reversal on the symmetric grid
    inv = lambda f: f[::-1, ::-1]
    assert np.allclose(inv(asym), -asym, atol=1e-12)  # Slater determinant of 0, 1 is odd
    assert np.allclose(inv(sym), sym, atol=1e-12)
    # the symmetric snippet combination is exchange even
    assert np.allclose(sym.T, sym, atol=1e-14)
    assert np.allclose(asym.T, -asym, atol=1e-14)
