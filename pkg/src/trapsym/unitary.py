"""Strong-coupling limit of the contact interaction.

At infinite coupling the coincidence planes ``q_i = q_j`` cut configuration
space into ``N!`` ordering sectors ``Q_s`` (``q_{s1} < q_{s2} < ...``). Each
antisymmetric composition gives an ``N!``-fold level spanned by snippets, the
restrictions of the Slater determinant to one sector. Large but finite
coupling lets neighbouring sectors tunnel, which splits that level.

Sector actions (both reproduce the comparison table of sector maps):

* particle permutation ``p`` relabels particles: entry ``x`` becomes ``p⁻¹(x)``;
* ordering permutation ``o`` permutes positions: ``s -> (s_{o1}, s_{o2}, ...)``.

Orderings are written with letters, ``{BAC} = (AB)``; internally they are
``Perm`` objects over positions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .composition import Composition
from .errors import ConfigInvalid, DerivativeUnavailable, NegativeAmplitude, RepeatedLabel, SizeMismatch, WrongN
from .onebody import OneBodySolution
from .perturbation import SplitLevel
from .permsym import Perm, all_perms, perm_compose, perm_invert, perm_sign, transpositions
from .spectra import enumerate_compositions

# sector order used for every 6-vector: a, b, c, d, e, f
SECTOR_ORDER = tuple(Perm.parse(s) for s in ("{123}", "{213}", "{231}", "{321}", "{312}", "{132}"))
SECTOR_LETTERS = "abcdef"


@dataclass(frozen=True, order=True)
class Sector:
    """Configuration-space region ``q_{s1} < q_{s2} < ... < q_{sN}``."""

    order: Perm

    @classmethod
    def parse(cls, text: str) -> "Sector":
        return cls(Perm.parse(text))

    @property
    def sign(self) -> int:
        return perm_sign(self.order)

    def letter(self) -> str:
        return SECTOR_LETTERS[SECTOR_ORDER.index(self.order)]

    def __str__(self) -> str:
        return str(self.order)


def ordering_perm(text: str) -> Perm:
    """``{BCA}`` or ``(ABC)`` letter notation to a position permutation."""
    digits = text.translate(str.maketrans("ABCDEF", "123456"))
    return Perm.parse(digits, 3)


def sector_action(kind: str, g: Perm, s: Sector) -> Sector:
    """Image of sector ``s`` under a particle or ordering permutation."""
    if g.n != s.order.n:
        raise SizeMismatch(f"permutation of {g.n} acting on a sector of {s.order.n} particles")
    if kind == "particle":
        inv = perm_invert(g)
        return Sector(Perm(tuple(inv.images[x - 1] for x in s.order.images)))
    if kind == "ordering":
        return Sector(perm_compose(g, s.order))
    raise ConfigInvalid(f"unknown action kind {kind!r}")


def sector_action_matrix(kind: str, g: Perm, sectors: Sequence[Sector] | None = None) -> np.ndarray:
    """Permutation matrix ``M[index(g·s), index(s)] = 1`` on the snippet vectors."""
    sectors = list(sectors) if sectors is not None else [Sector(p) for p in SECTOR_ORDER]
    index = {s: i for i, s in enumerate(sectors)}
    m = np.zeros((len(sectors), len(sectors)))
    for j, s in enumerate(sectors):
        m[index[sector_action(kind, g, s)], j] = 1.0
    return m


# --------------------------------------------------------------- spectrum


def unitary_spectrum(sigma1: Sequence[float], N: int, e_max: float) -> list[Composition]:
    """Distinct-label compositions up to ``e_max``; each level is ``N!``-fold."""
    if N not in (2, 3):
        raise WrongN("the unitary spectrum is provided for N = 2, 3")
    return [c for c in enumerate_compositions(sigma1, N, e_max) if len(c.distinct) == N]


# ------------------------------------------------------- symmetrized snippets

SNIPPET_LABELS = (
    ("ABC", ""),
    ("AC/B", "12/3"),
    ("AC/B", "13/2"),
    ("AB/C", "12/3"),
    ("AB/C", "13/2"),
    ("A/B/C", ""),
)


def _phase(v: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(v) > 1e-12)
    return -v if v[nz[0]] < 0 else v


def snippet_symmetrized_basis(comp: Composition | None = None) -> np.ndarray:
    """Rows: the six symmetrized snippet vectors over sectors ``a..f``.

    Joint eigenvectors of the particle two-cycle class sum, particle ``(12)``
    and ordering ``(AC)``, in the row order of ``SNIPPET_LABELS``. The
    ``13/2`` row of each ``[21]`` pair follows from the ``12/3`` row through
    the Young-Yamanouchi action of ``(23)``.
    """
    if comp is not None and (comp.N != 3 or len(comp.distinct) != 3):
        raise RepeatedLabel("snippet bases need three distinct labels")
    c2 = sum(sector_action_matrix("particle", p) for p in transpositions(3))
    u12 = sector_action_matrix("particle", Perm.parse("(12)", 3))
    u23 = sector_action_matrix("particle", Perm.parse("(23)", 3))
    uac = sector_action_matrix("ordering", ordering_perm("(AC)"))
    w, vecs = np.linalg.eigh(9.0 * c2 + 3.0 * u12 + uac)
    key = {(3, 1, 1): 0, (0, 1, 1): 1, (0, 1, -1): 3, (-3, -1, -1): 5}
    rows = np.zeros((6, 6))
    for v in vecs.T:
        lab = tuple(int(round(float(v @ m @ v))) for m in (c2, u12, uac))
        if lab in key:
            rows[key[lab]] = _phase(v)
    for k in (1, 3):
        e1 = rows[k]
        rows[k + 1] = (u23 @ e1 + 0.5 * e1) * 2 / math.sqrt(3)
    return rows


# ---------------------------------------------------------------- tunneling


@dataclass(frozen=True)
class TunnelingParams:
    """Tunneling amplitudes as coupling-independent products ``g·t``, ``g·u``.

    ``u`` is ``None`` for two particles. ``t`` and ``u`` themselves follow by
    dividing by ``g``.
    """

    gt: float
    gu: float | None
    g: float
    composition: Composition

    @property
    def t(self) -> float:
        return self.gt / self.g

    @property
    def u(self) -> float | None:
        return None if self.gu is None else self.gu / self.g


def _derivatives(sol: OneBodySolution, labels: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    d = sol.derivatives
    if d is None or not np.all(np.isfinite(d[list(labels)])):
        raise DerivativeUnavailable("wavefunction derivatives are missing or not finite")
    return sol.wavefunctions[list(labels)], d[list(labels)]


def tunneling_params(sol: OneBodySolution, comp: Composition, g: float = 1.0) -> TunnelingParams:
    """Squared normal derivative of the Slater determinant on the coincidence set.

    Two particles: ``g t = ∫ (φa' φb - φa φb')² dq``. Three particles: with
    ``c(x) = φ'(x) × φ(x)`` and ``D(x, y) = c(x)·φ(y)`` (the cofactor expansion
    of the derivative), ``g t = ∬_{x<y} D²`` and ``g u = ∬_{y<x} D²``. Both use
    trapezoid weights on the solver grid; ``D`` vanishes on ``x = y``.
    """
    if not g > 0:
        raise ConfigInvalid("coupling must be positive")
    labels = comp.labels
    if len(set(labels)) != len(labels):
        raise RepeatedLabel("tunneling needs distinct labels")
    phi, dphi = _derivatives(sol, labels)
    w = sol.weights
    if comp.N == 2:
        wr = dphi[0] * phi[1] - phi[0] * dphi[1]
        return TunnelingParams(float(np.sum(w * wr * wr)), None, g, comp)
    if comp.N != 3:
        raise WrongN("tunneling amplitudes are provided for N = 2, 3")
    c = np.cross(dphi.T, phi.T)  # (n_grid, 3)
    dmat = c @ phi  # D[i, j] = c(x_i)·φ(x_j)
    sq = dmat * dmat * np.outer(w, w)
    gt = float(np.sum(np.triu(sq, 1)))
    gu = float(np.sum(np.tril(sq, -1)))
    return TunnelingParams(gt, gu, g, comp)


def tunneling_matrix(t: float, u: float) -> np.ndarray:
    """``-t M(AB) - u M(BC) - (t+u) 1`` on the six snippet vectors."""
    mab = sector_action_matrix("ordering", ordering_perm("(AB)"))
    mbc = sector_action_matrix("ordering", ordering_perm("(BC)"))
    return -t * mab - u * mbc - (t + u) * np.eye(6)


def near_unitary_shifts(t: float, u: float | None = None) -> list[tuple[str, float, int]]:
    """Closed-form ``(irrep, shift, degeneracy)``; ``u is None`` means two particles."""
    if t < 0 or (u is not None and u < 0):
        raise NegativeAmplitude("tunneling amplitudes must be non-negative")
    if u is None:
        return [("[2]", -2 * t, 1), ("[1²]", 0.0, 1)]
    rad = math.sqrt(t * t - t * u + u * u)
    return [
        ("[3]", -2 * t - 2 * u, 1),
        ("[21]", -t - u - rad, 2),
        ("[21]'", -t - u + rad, 2),
        ("[1³]", 0.0, 1),
    ]


_SHAPES = {"[2]": (2,), "[1²]": (1, 1), "[3]": (3,), "[21]": (2, 1), "[21]'": (2, 1), "[1³]": (1, 1, 1)}


def near_unitary_split(
    params: TunnelingParams, symmetric: bool = False, parities: Sequence[int] | None = None
) -> list[SplitLevel]:
    """Levels of one antisymmetric composition to first order in ``1/g``.

    With ``symmetric`` set and one-body ``parities`` given, the ``[3]`` and
    upper ``[21]`` levels take the parity opposite to the Slater determinant
    and the lower ``[21]`` and ``[1³]`` levels share it (for two particles the
    symmetric level flips parity).
    """
    comp = params.composition
    base = comp.energy if comp.energy is not None else 0.0
    pi = None
    if symmetric and parities is not None:
        pi = math.prod(int(parities[i]) for i in comp.labels)
    flipped = {"[2]", "[3]", "[21]'"}
    out = []
    for name, shift, deg in near_unitary_shifts(params.t, params.u):
        par = None if pi is None else (-pi if name in flipped else pi)
        tag = "'" if name.endswith("'") else ""
        out.append(SplitLevel(base, shift, deg, (_SHAPES[name], par), "near_unitary", comp, None, tag))
    return out


# ----------------------------------------------------------- two-particle case


def snippet_pair_wavefunctions(sol: OneBodySolution, comp: Composition) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric and antisymmetric snippet combinations on the grid, ``[i, j] = (q1_i, q2_j)``."""
    if comp.N != 2 or len(comp.distinct) != 2:
        raise RepeatedLabel("two distinct labels are required")
    a, b = comp.labels
    pa, pb = sol.wavefunctions[a], sol.wavefunctions[b]
    anti = (np.outer(pa, pb) - np.outer(pb, pa)) / math.sqrt(2)
    n = len(pa)
    i, j = np.indices((n, n))
    s12 = np.where(i < j, math.sqrt(2) * anti, 0.0)
    s21 = np.where(j < i, -math.sqrt(2) * anti, 0.0)
    sym = (s12 + s21) / math.sqrt(2)
    asym = (s12 - s21) / math.sqrt(2)
    return sym, asym
