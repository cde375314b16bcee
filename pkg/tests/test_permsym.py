import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trapsym.composition import Composition
from trapsym.errors import LabelNotInComposition, ShapeAlphabetMismatch, SizeMismatch, UnsupportedN
from trapsym.permsym import (
    Perm,
    Tableau,
    act_particle_basis,
    act_state_perm,
    all_perms,
    character,
    class_operator_matrix,
    count_semistandard,
    count_symmetrized_states,
    enumerate_tableaux,
    irrep_dimension,
    irrep_matrix,
    kostka,
    kronecker_multiplicity,
    particle_perm_matrix,
    partitions,
    perm_compose,
    perm_invert,
    perm_sign,
    spin_sector_dims,
    symmetrized_basis,
    transpose,
)

perms = st.integers(1, 6).flatmap(lambda n: st.permutations(list(range(1, n + 1)))).map(lambda p: Perm(tuple(p)))


def same_size_pair(n_max=5):
    return st.integers(1, n_max).flatmap(
        lambda n: st.tuples(st.permutations(list(range(1, n + 1))), st.permutations(list(range(1, n + 1))))
    ).map(lambda ab: (Perm(tuple(ab[0])), Perm(tuple(ab[1]))))


COMPOSITIONS = [Composition(c) for c in [(0, 0, 0), (0, 0, 1), (0, 1, 1), (2, 5, 5), (0, 1, 2), (1, 3, 4), (0, 1), (2, 2), (3,)]]


# ------------------------------------------------------------- permutations


def test_notation_examples():
    assert Perm.parse("(132)", 3) == Perm.parse("{312}")
    assert Perm.parse("(123)", 3) == Perm.parse("{231}")
    assert str(Perm.parse("(12)", 3)) == "{213}"
    assert perm_compose(Perm.parse("{312}"), Perm.parse("{213}")) == Perm.parse("{321}")
    assert perm_invert(Perm.parse("{312}")) == Perm.parse("{231}")
    assert act_particle_basis(Perm.parse("{312}"), ("a", "b", "c")) == ("c", "a", "b")


@settings(max_examples=60)
@given(perms)
def test_cycle_notation_round_trip(p):
    assert Perm.parse(p.cycle_str() if p.cycle_str() != "e" else "", p.n) == p
    assert Perm.parse(str(p)) == p


@settings(max_examples=60)
@given(same_size_pair())
def test_action_is_homomorphism(ab):
    a, b = ab
    seq = tuple("abcdef"[: a.n])
    assert act_particle_basis(perm_compose(a, b), seq) == act_particle_basis(a, act_particle_basis(b, seq))
    assert perm_sign(perm_compose(a, b)) == perm_sign(a) * perm_sign(b)
    assert perm_compose(a, perm_invert(a)) == Perm.identity(a.n)


def test_size_mismatch():
    with pytest.raises(SizeMismatch):
        perm_compose(Perm.identity(2), Perm.identity(3))
    with pytest.raises(ValueError):
        Perm((1, 1, 2))


def test_state_permutation():
    comp = Composition((0, 1, 2))
    assert act_state_perm((0, 1), (0, 1, 2), comp) == (1, 0, 2)
    assert act_state_perm((0, 1, 2), (2, 0, 1), comp) == (0, 1, 2)
    with pytest.raises(LabelNotInComposition):
        act_state_perm((0, 5), (0, 1, 2), comp)


# ---------------------------------------------------------------- tableaux


def test_young_tableaux_of_21():
    tabs = enumerate_tableaux((2, 1), 3, "young")
    assert [t.text() for t in tabs] == ["12/3", "13/2"]
    assert all(t.is_valid() for t in tabs)


def test_weyl_counts_match_kostka():
    assert [t.text() for t in enumerate_tableaux((2, 1), ["a", "b", "c"], "weyl")] == ["ab/c", "ac/b"]
    assert len(enumerate_tableaux((2, 1), [0, 0, 1], "weyl")) == 1
    assert len(enumerate_tableaux((1, 1, 1), [0, 0, 1], "weyl")) == 0
    assert kostka((2, 1), Composition((0, 1, 2))) == 2


def test_tableau_errors():
    with pytest.raises(ShapeAlphabetMismatch):
        enumerate_tableaux((2, 1), [0, 1], "weyl")
    with pytest.raises(ShapeAlphabetMismatch):
        enumerate_tableaux((1, 2), 3, "young")
    assert not Tableau.parse("21/3", "young", int).is_valid()
    assert Tableau.parse("11/2", "weyl", int).is_valid()


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_hook_formula_counts_standard_tableaux(n):
    for mu in partitions(n):
        assert irrep_dimension(mu) == len(enumerate_tableaux(mu, n, "young"))
    assert sum(irrep_dimension(mu) ** 2 for mu in partitions(n)) == math.factorial(n)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4))
def test_semistandard_count_by_brute_force(n, J):
    for mu in partitions(n):
        brute = 0
        for word in itertools.combinations_with_replacement(range(J), n):
            brute += len(enumerate_tableaux(mu, word, "weyl"))
        assert count_semistandard(mu, J) == brute


def test_transpose():
    assert transpose((2, 1)) == (2, 1)
    assert transpose((3,)) == (1, 1, 1)


# ------------------------------------------------------------------- irreps


def test_irrep_matrices_form_a_representation():
    for a in all_perms(3):
        for b in all_perms(3):
            lhs = irrep_matrix((2, 1), perm_compose(a, b))
            assert np.allclose(lhs, irrep_matrix((2, 1), a) @ irrep_matrix((2, 1), b), atol=1e-14)
        d = irrep_matrix((2, 1), a)
        assert np.allclose(d @ d.T, np.eye(2))


def test_character_orthogonality():
    for mu in partitions(3):
        for nu in partitions(3):
            s = sum(character(mu, g) * character(nu, g) for g in all_perms(3)) / 6
            assert s == pytest.approx(1.0 if mu == nu else 0.0, abs=1e-12)


def test_kronecker_21_squared():
    assert [kronecker_multiplicity((2, 1), (2, 1), lam) for lam in partitions(3)] == [1, 1, 1]
    assert kronecker_multiplicity((1, 1, 1), (1, 1, 1), (3,)) == 1


def test_irrep_limits():
    with pytest.raises(UnsupportedN):
        irrep_matrix((2, 2), Perm.identity(4))


# -------------------------------------------------------- symmetrized bases


@pytest.mark.parametrize("comp", COMPOSITIONS, ids=str)
def test_basis_is_orthogonal(comp):
    b = symmetrized_basis(comp)
    assert b.coeffs.shape == (comp.degeneracy, comp.degeneracy)
    assert np.abs(b.coeffs @ b.coeffs.T - np.eye(comp.degeneracy)).max() < 1e-12


@pytest.mark.parametrize("comp", [c for c in COMPOSITIONS if c.N in (2, 3)], ids=str)
def test_class_operator_eigenvalues(comp):
    b = symmetrized_basis(comp)
    c2 = class_operator_matrix("C2_all", comp)
    u12 = class_operator_matrix("C2_12", comp)
    content = {(2,): 1, (1, 1): -1, (3,): 3, (2, 1): 0, (1, 1, 1): -3}
    for k, (mu, yi) in enumerate(zip(b.irreps, b.young_index)):
        v = b.coeffs[k]
        assert np.allclose(c2 @ v, content[mu] * v, atol=1e-12)
        sign = 1 if (mu in ((2,), (3,)) or (mu == (2, 1) and yi == 0)) else -1
        assert np.allclose(u12 @ v, sign * v, atol=1e-12)


@pytest.mark.parametrize("comp", [c for c in COMPOSITIONS if c.N == 3 and len(c.distinct) > 1], ids=str)
def test_21_rows_follow_young_yamanouchi(comp):
    b = symmetrized_basis(comp)
    pairs = [(k, k + 1) for k in range(len(b.irreps) - 1) if b.irreps[k] == (2, 1) and b.young_index[k] == 0]
    for p in all_perms(3):
        u = particle_perm_matrix(p, list(b.sequences))
        d = irrep_matrix((2, 1), p)
        for k0, k1 in pairs:
            e = b.coeffs[[k0, k1]]
            # U(p) e_j = Σ_i D_ij e_i
            assert np.allclose(u @ e.T, e.T @ d, atol=1e-12)


def test_state_two_cycle_separates_21_copies():
    comp = Composition((0, 1, 2))
    b = symmetrized_basis(comp)
    s01 = class_operator_matrix(("state", 0, 1), comp)
    diag = np.diag(b.coeffs @ s01 @ b.coeffs.T)
    assert np.allclose(diag, [1, 1, 1, -1, -1, -1])
    assert np.allclose(b.coeffs @ s01 @ b.coeffs.T, np.diag(diag), atol=1e-12)


def test_basis_labels():
    b = symmetrized_basis(Composition((0, 1, 2)))
    texts = [(w.text(), y.text()) for w, y in b.labels]
    assert texts == [("012", "123"), ("01/2", "12/3"), ("01/2", "13/2"), ("02/1", "12/3"), ("02/1", "13/2"), ("0/1/2", "1/2/3")]
    assert b.vector(0, b.sequences).shape == (6,)


# ------------------------------------------------------------ spin counting


@pytest.mark.parametrize("N", [2, 3])
@pytest.mark.parametrize("J", [1, 2, 3, 4])
def test_spin_sectors_fill_product_space(N, J):
    dims = spin_sector_dims(N, J)
    assert sum(v["dimension"] for v in dims.values()) == J**N


def test_fermion_counts_for_two_components():
    assert count_symmetrized_states(Composition((0, 1, 2)), "fermion", 2) == 8
    assert count_symmetrized_states(Composition((0, 0, 1)), "fermion", 2) == 2
    assert count_symmetrized_states(Composition((0, 0, 0)), "fermion", 2) == 0
    assert count_symmetrized_states(Composition((0, 0, 0)), "boson", 2) == 4
    assert count_symmetrized_states(Composition((0, 1, 2)), "fermion", 1) == 1


@pytest.mark.parametrize("J", [1, 2, 3, 4])
@pytest.mark.parametrize("comp", [c for c in COMPOSITIONS if c.N in (2, 3)], ids=str)
def test_boson_plus_fermion_never_exceed_total(J, comp):
    total = count_symmetrized_states(comp, "distinguishable", J)
    assert total == comp.degeneracy * J**comp.N
    assert count_symmetrized_states(comp, "boson", J) + count_symmetrized_states(comp, "fermion", J) <= total
