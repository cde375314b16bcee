"""Weak-coupling level splitting and exact diagonalization for N = 2, 3.

Symmetrized states are the rows of ``symmetrized_basis``. Interaction blocks
are assembled over particle sequences from a ``TwoBodyTable`` and then
conjugated into that basis. Within an S3 irrep only one Young-tableau row per
copy is needed, since the interaction commutes with particle permutations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .composition import Composition
from .errors import ConfigInvalid, EmptySector, MissingElement, NumericalError, WrongN
from .onebody import OneBodySolution
from .permsym import Partition, irrep_dimension, symmetrized_basis
from .spectra import enumerate_compositions, shape_text
from .twobody import InteractionSpec, TwoBodyTable, contact_elements, interaction_elements

PROVENANCES = ("weak", "ed", "unitary", "near_unitary")
MAX_DENSE = 2000


@dataclass(frozen=True)
class SplitLevel:
    """One energy level: ``total = base_energy + shift``.

    ``irrep`` is ``(shape, parity)`` with parity ``None`` for asymmetric traps.
    ``tag`` separates repeated irreps of one composition (``+``/``-`` for the
    two ``[21]`` levels of three distinct labels).
    """

    base_energy: float
    shift: float
    degeneracy: int
    irrep: tuple[Partition, int | None]
    provenance: str
    composition: Composition | None = None
    eigvec: np.ndarray | None = field(default=None, compare=False, repr=False)
    tag: str = ""

    @property
    def total_energy(self) -> float:
        return self.base_energy + self.shift

    def irrep_text(self) -> str:
        return shape_text(self.irrep[0]) + self.tag

    def parity_text(self) -> str:
        p = self.irrep[1]
        return "" if p is None else ("+" if p > 0 else "-")


@dataclass(frozen=True)
class EDConfig:
    """Truncation and interaction for exact diagonalization.

    ``sector`` restricts to one ``(shape, parity)``; ``parity`` may be
    ``None`` to keep both. ``young_index`` picks which Young-tableau row
    represents each ``[21]`` copy (0 for ``12/3``, 1 for ``13/2``).
    """

    e_max: float
    interaction: InteractionSpec
    sector: tuple[Partition, int | None] | None = None
    young_index: int = 0
    max_dense: int = MAX_DENSE


def _phase(v: np.ndarray) -> np.ndarray:
    v = np.array(v, dtype=float)
    nz = np.flatnonzero(np.abs(v) > 1e-12)
    if nz.size and v[nz[0]] < 0:
        v = -v
    return v


def _parity(comp: Composition, parities: Sequence[int] | None) -> int | None:
    if parities is None:
        return None
    return math.prod(int(parities[i]) for i in comp.labels)


# --------------------------------------------------------------- weak limit


def weak_split_2(comp: Composition, table: TwoBodyTable, parities: Sequence[int] | None = None) -> list[SplitLevel]:
    """First-order shifts of a two-particle level."""
    if comp.N != 2:
        raise WrongN("weak_split_2 needs a two-particle composition")
    base = comp.energy if comp.energy is not None else 0.0
    par = _parity(comp, parities)
    if len(comp.distinct) == 1:
        (a,) = comp.distinct
        return [SplitLevel(base, table.direct(a, a), 1, ((2,), par), "weak", comp, np.ones(1))]
    a, b = comp.distinct
    d, x = table.direct(a, b), table.exchange(a, b)
    return [
        SplitLevel(base, d + x, 1, ((2,), par), "weak", comp, np.array([1.0, 0.0])),
        SplitLevel(base, d - x, 1, ((1, 1), par), "weak", comp, np.array([0.0, 1.0])),
    ]


def sequence_interaction(rows: Sequence[tuple], cols: Sequence[tuple], table: TwoBodyTable) -> np.ndarray:
    """Pair interaction between particle sequences.

    N = 2: ``<s|V12|s'>``. N = 3: ``<s|V12 + V23 + V13|s'>``.
    """
    rows_a = np.array([[table.position(x) for x in s] for s in rows])
    cols_a = np.array([[table.position(x) for x in s] for s in cols])
    M = table.dense
    R = [rows_a[:, i][:, None] for i in range(rows_a.shape[1])]
    C = [cols_a[:, i][None, :] for i in range(cols_a.shape[1])]
    n = rows_a.shape[1]
    if n == 2:
        return M[R[0], R[1], C[0], C[1]]
    if n != 3:
        raise WrongN("sequence interaction is implemented for N = 2, 3")
    return (
        M[R[0], R[1], C[0], C[1]] * (R[2] == C[2])
        + M[R[1], R[2], C[1], C[2]] * (R[0] == C[0])
        + M[R[0], R[2], C[0], C[2]] * (R[1] == C[1])
    )


def v3_block(comp: Composition, table: TwoBodyTable, basis=None) -> np.ndarray:
    """``V12 + V23 + V13`` on a three-particle level, in the symmetrized basis."""
    if comp.N != 3:
        raise WrongN("v3_block needs a three-particle composition")
    basis = basis if basis is not None else symmetrized_basis(comp)
    seqs = basis.sequences
    missing = [x for x in comp.distinct if x not in table.states]
    if missing:
        raise MissingElement(f"states {missing} are not in the table")
    v = sequence_interaction(seqs, seqs, table)
    return basis.coeffs @ v @ basis.coeffs.T


def reduced_21_block(comp: Composition, table: TwoBodyTable) -> np.ndarray:
    """2x2 interaction between the ``ab/c`` and ``ac/b`` copies of ``[21]``."""
    a, b, c = comp.distinct
    d = table.direct(a, b) + table.direct(b, c) + table.direct(a, c)
    xab, xbc, xac = table.exchange(a, b), table.exchange(b, c), table.exchange(a, c)
    off = math.sqrt(3) / 2 * (xbc - xac)
    return np.array(
        [[d + xab - 0.5 * xbc - 0.5 * xac, off], [off, d - xab + 0.5 * xbc + 0.5 * xac]]
    )


def weak_split_3(comp: Composition, table: TwoBodyTable, parities: Sequence[int] | None = None) -> list[SplitLevel]:
    """First-order shifts of a three-particle level from closed forms."""
    if comp.N != 3:
        raise WrongN("weak_split_3 needs a three-particle composition")
    base = comp.energy if comp.energy is not None else 0.0
    par = _parity(comp, parities)
    distinct = comp.distinct
    if len(distinct) == 1:
        (a,) = distinct
        return [SplitLevel(base, 3 * table.direct(a, a), 1, ((3,), par), "weak", comp, np.ones(1))]
    if len(distinct) == 2:
        mult = comp.multiplicities
        x = next(k for k, m in mult.items() if m == 2)
        y = next(k for k, m in mult.items() if m == 1)
        vxx, d, e = table.direct(x, x), table.direct(x, y), table.exchange(x, y)
        return [
            SplitLevel(base, vxx + 2 * d + 2 * e, 1, ((3,), par), "weak", comp, np.array([1.0])),
            SplitLevel(base, vxx + 2 * d - e, 2, ((2, 1), par), "weak", comp, np.array([1.0])),
        ]
    a, b, c = distinct
    d = table.direct(a, b) + table.direct(b, c) + table.direct(a, c)
    xab, xbc, xac = table.exchange(a, b), table.exchange(b, c), table.exchange(a, c)
    rad = math.sqrt(max(0.0, xab**2 - xab * xbc + xbc**2 - xbc * xac + xac**2 - xab * xac))
    _, vecs = np.linalg.eigh(reduced_21_block(comp, table))
    return [
        SplitLevel(base, d + xab + xbc + xac, 1, ((3,), par), "weak", comp, np.array([1.0])),
        SplitLevel(base, d + rad, 2, ((2, 1), par), "weak", comp, _phase(vecs[:, 1]), "+"),
        SplitLevel(base, d - rad, 2, ((2, 1), par), "weak", comp, _phase(vecs[:, 0]), "-"),
        SplitLevel(base, d - xab - xbc - xac, 1, ((1, 1, 1), par), "weak", comp, np.array([1.0])),
    ]


def weak_split(comp: Composition, table: TwoBodyTable, parities: Sequence[int] | None = None) -> list[SplitLevel]:
    if comp.N == 2:
        return weak_split_2(comp, table, parities)
    return weak_split_3(comp, table, parities)


# ------------------------------------------------------- sector bookkeeping


@dataclass
class _SectorBasis:
    shape: Partition
    parity: int | None
    energies: list[float] = field(default_factory=list)
    comps: list[Composition] = field(default_factory=list)
    vectors: list[dict] = field(default_factory=list)  # sequence -> coefficient


def sector_bases(
    comps: Sequence[Composition], parities: Sequence[int] | None, young_index: int = 0
) -> dict[tuple[Partition, int | None], _SectorBasis]:
    """One symmetrized row per irrep copy, grouped by ``(shape, parity)``."""
    out: dict = {}
    for comp in comps:
        basis = symmetrized_basis(comp)
        par = _parity(comp, parities)
        for k, (mu, yi) in enumerate(zip(basis.irreps, basis.young_index)):
            if mu == (2, 1) and yi != young_index:
                continue
            key = (mu, par)
            sec = out.setdefault(key, _SectorBasis(mu, par))
            sec.energies.append(comp.energy)
            sec.comps.append(comp)
            sec.vectors.append({s: c for s, c in zip(basis.sequences, basis.coeffs[k]) if c != 0.0})
    return out


def sector_sizes(comps: Sequence[Composition], parities: Sequence[int] | None = None) -> dict:
    return {k: len(v.energies) for k, v in sector_bases(comps, parities).items()}


def _coefficient_matrix(sec: _SectorBasis) -> tuple[np.ndarray, list[tuple]]:
    seqs = sorted({s for vec in sec.vectors for s in vec})
    index = {s: i for i, s in enumerate(seqs)}
    cmat = np.zeros((len(sec.vectors), len(seqs)))
    for k, vec in enumerate(sec.vectors):
        for s, c in vec.items():
            cmat[k, index[s]] = c
    return cmat, seqs


def _sector_interaction(sec: _SectorBasis, table: TwoBodyTable) -> np.ndarray:
    cmat, seqs = _coefficient_matrix(sec)
    v = sequence_interaction(seqs, seqs, table)
    out = cmat @ v @ cmat.T
    return 0.5 * (out + out.T)


def _coincidence_interaction(sec: _SectorBasis, sol: OneBodySolution, g: float) -> np.ndarray:
    """Two-particle contact block ``g ∫ Ψ(q,q) Ψ'(q,q) dq`` from coincidence amplitudes."""
    cmat, seqs = _coefficient_matrix(sec)
    phi = sol.wavefunctions
    a = np.array([s[0] for s in seqs])
    b = np.array([s[1] for s in seqs])
    amp = cmat @ (phi[a] * phi[b])
    out = g * (amp * sol.weights) @ amp.T
    return 0.5 * (out + out.T)


def _dominant_base(sec: _SectorBasis, vec: np.ndarray) -> tuple[float, Composition]:
    k = int(np.argmax(np.abs(vec)))
    return sec.energies[k], sec.comps[k]


# ----------------------------------------------- merged first-order blocks


def first_order_levels(
    comps: Sequence[Composition],
    table: TwoBodyTable,
    parities: Sequence[int] | None = None,
    *,
    merge_tol: float = 1e-8,
) -> list[SplitLevel]:
    """First-order levels, merging compositions whose energies coincide.

    Isolated compositions use the closed forms. Groups within ``merge_tol``
    (harmonic shells, accidental box degeneracies) are diagonalized together
    per ``(shape, parity)`` sector.
    """
    comps = sorted(comps, key=lambda c: (c.energy, c.labels))
    groups: list[list[Composition]] = []
    for c in comps:
        if groups and abs(c.energy - groups[-1][0].energy) < merge_tol:
            groups[-1].append(c)
        else:
            groups.append([c])
    levels: list[SplitLevel] = []
    for grp in groups:
        if len(grp) == 1:
            levels += weak_split(grp[0], table, parities)
            continue
        for (mu, par), sec in sector_bases(grp, parities).items():
            block = _sector_interaction(sec, table)
            w, vecs = np.linalg.eigh(block)
            for val, vec in zip(w, vecs.T):
                base, comp = _dominant_base(sec, vec)
                levels.append(SplitLevel(base, float(val), irrep_dimension(mu), (mu, par), "weak", comp, _phase(vec)))
    return sorted(levels, key=lambda l: (l.total_energy, l.base_energy))


# ------------------------------------------------------- exact diagonalization


def _needed_table(sol: OneBodySolution, comps: Sequence[Composition], spec: InteractionSpec) -> TwoBodyTable:
    labels = sorted({x for c in comps for x in c.labels})
    return interaction_elements(sol, spec, labels)


def exact_diagonalize(sol: OneBodySolution, N: int, cfg: EDConfig) -> list[SplitLevel]:
    """Diagonalize ``H0 + V`` in symmetrized sectors truncated at ``cfg.e_max``.

    Each level is reported once with degeneracy ``d([μ])``. ``base_energy`` is
    the non-interacting energy of the basis state with the largest weight.
    """
    if N not in (2, 3):
        raise WrongN("exact diagonalization is provided for N = 2, 3")
    if cfg.young_index not in (0, 1):
        raise ConfigInvalid("young_index must be 0 or 1")
    comps = enumerate_compositions(sol.energies, N, cfg.e_max)
    sectors = sector_bases(comps, sol.parities, cfg.young_index)
    if cfg.sector is not None:
        want_mu, want_par = tuple(cfg.sector[0]), cfg.sector[1]
        sectors = {
            k: v for k, v in sectors.items() if k[0] == want_mu and (want_par is None or k[1] == want_par)
        }
    if not sectors:
        raise EmptySector("truncation leaves no basis state in the requested sector")
    fast_contact = N == 2 and cfg.interaction.kind == "contact"
    table = None if fast_contact else _needed_table(sol, [c for s in sectors.values() for c in s.comps], cfg.interaction)
    levels: list[SplitLevel] = []
    for (mu, par), sec in sorted(sectors.items(), key=lambda kv: (kv[0][0], kv[0][1] or 0), reverse=True):
        size = len(sec.energies)
        if size > cfg.max_dense:
            raise NumericalError(f"sector {shape_text(mu)} has {size} states; dense limit is {cfg.max_dense}")
        if fast_contact:
            v = _coincidence_interaction(sec, sol, cfg.interaction.g)
        else:
            v = _sector_interaction(sec, table)
        h = np.diag(sec.energies) + v
        try:
            w, vecs = np.linalg.eigh(h)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(str(exc)) from exc
        for val, vec in zip(w, vecs.T):
            base, comp = _dominant_base(sec, vec)
            levels.append(
                SplitLevel(base, float(val) - base, irrep_dimension(mu), (mu, par), "ed", comp, _phase(vec))
            )
    return sorted(levels, key=lambda l: (l.total_energy, l.irrep[0]))


def exact_diagonalize_full(sol: OneBodySolution, N: int, cfg: EDConfig) -> np.ndarray:
    """Eigenvalues of ``H0 + V`` over plain particle sequences (no symmetry used)."""
    comps = enumerate_compositions(sol.energies, N, cfg.e_max)
    seqs = sorted(s for c in comps for s in c.sequences())
    if len(seqs) > cfg.max_dense:
        raise NumericalError(f"{len(seqs)} sequences exceed the dense limit {cfg.max_dense}")
    table = _needed_table(sol, comps, cfg.interaction)
    energies = np.array([sum(sol.energies[i] for i in s) for s in seqs])
    h = np.diag(energies) + sequence_interaction(seqs, seqs, table)
    return np.linalg.eigvalsh(0.5 * (h + h.T))


def sector_eigenvalues(levels: Sequence[SplitLevel], shape: Partition, parity: int | None = None) -> np.ndarray:
    return np.array(
        sorted(l.total_energy for l in levels if l.irrep[0] == tuple(shape) and (parity is None or l.irrep[1] == parity))
    )


def extrapolate_cutoff(cutoffs: Sequence[float], energies: Sequence[float], terms: int = 3) -> float:
    """Limit of ``E(X)`` as the excitation cutoff ``X → ∞``.

    Contact interactions converge like ``X^{-1/2}``, so ``E`` is fitted by a
    polynomial in ``X^{-1/2}`` with ``terms`` corrections beyond the constant.
    """
    x = np.asarray(cutoffs, dtype=float)
    e = np.asarray(energies, dtype=float)
    if x.size < terms + 1:
        raise ConfigInvalid(f"need at least {terms + 1} cutoffs for {terms} correction terms")
    design = np.vstack([x ** (-0.5 * j) for j in range(terms + 1)]).T
    coef, *_ = np.linalg.lstsq(design, e, rcond=None)
    return float(coef[0])
