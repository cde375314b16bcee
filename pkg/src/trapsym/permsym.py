"""Permutations, tableaux, S2/S3 irreps and symmetrized composition bases.

Conventions
-----------
A permutation ``p`` is written in one-line notation ``{p1 p2 ... pN}`` with
1-based images. It acts on a particle sequence by
``U(p)|n1 ... nN> = |n_{p1} ... n_{pN}>``. Composition is defined so that the
action is a homomorphism::

    act(compose(a, b), seq) == act(a, act(b, seq))

which gives ``compose(a, b)_i = b_{a_i}``. Cycle notation lists the map
``i -> p_i``, so the cycle ``(132)`` is ``{312}`` and ``(123)`` is ``{231}``.

Particle-sequence bases are ordered lexicographically in the state labels.
The two-dimensional S3 irrep uses the orthonormal Young-Yamanouchi matrices
``D(12) = diag(1, -1)`` and ``D(23) = [[-1/2, √3/2], [√3/2, 1/2]]``; basis
rows ``e_j`` transform as ``U(p) e_j = Σ_i D(p)_ij e_i``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from .composition import Composition
from .errors import (
    LabelNotInComposition,
    ShapeAlphabetMismatch,
    SizeMismatch,
    UnsupportedN,
)

Partition = tuple[int, ...]

SQRT2, SQRT3, SQRT6, SQRT12 = (math.sqrt(x) for x in (2, 3, 6, 12))


# ---------------------------------------------------------------- permutations


@dataclass(frozen=True, order=True)
class Perm:
    images: tuple[int, ...]

    def __post_init__(self) -> None:
        imgs = tuple(int(i) for i in self.images)
        if sorted(imgs) != list(range(1, len(imgs) + 1)):
            raise ValueError(f"{imgs} is not a permutation of 1..{len(imgs)}")
        object.__setattr__(self, "images", imgs)

    @classmethod
    def identity(cls, n: int) -> "Perm":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> "Perm":
        """Parse ``{312}`` (one-line) or ``(13)(2)`` / ``(132)`` (cycles)."""
        text = text.strip()
        if text.startswith("{"):
            return cls(tuple(int(c) for c in re.findall(r"\d", text)))
        cycles = [tuple(int(c) for c in grp) for grp in re.findall(r"\(([\d\s,]*)\)", text)]
        return cls.from_cycles(cycles, n)

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], n: int | None = None) -> "Perm":
        cycles = [tuple(c) for c in cycles]
        size = max([n or 0] + [max(c) for c in cycles if c])
        img = list(range(1, size + 1))
        for cyc in cycles:
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                img[a - 1] = b
        return cls(tuple(img))

    @property
    def n(self) -> int:
        return len(self.images)

    def cycles(self, include_fixed: bool = False) -> list[tuple[int, ...]]:
        seen: set[int] = set()
        out = []
        for start in range(1, self.n + 1):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            nxt = self.images[start - 1]
            while nxt != start:
                cyc.append(nxt)
                seen.add(nxt)
                nxt = self.images[nxt - 1]
            if len(cyc) > 1 or include_fixed:
                out.append(tuple(cyc))
        return out

    def cycle_type(self) -> Partition:
        return tuple(sorted((len(c) for c in self.cycles(include_fixed=True)), reverse=True))

    def __str__(self) -> str:
        return "{" + "".join(str(i) for i in self.images) + "}"

    def cycle_str(self) -> str:
        cyc = self.cycles()
        return "".join("(" + "".join(map(str, c)) + ")" for c in cyc) or "e"


def _check_same(a: Perm, b: Perm) -> None:
    if a.n != b.n:
        raise SizeMismatch(f"permutations act on {a.n} and {b.n} objects")


def perm_compose(a: Perm, b: Perm) -> Perm:
    """``a ∘ b``: apply ``b`` first, then ``a`` (as actions on sequences)."""
    _check_same(a, b)
    return Perm(tuple(b.images[i - 1] for i in a.images))


def perm_invert(a: Perm) -> Perm:
    inv = [0] * a.n
    for i, p in enumerate(a.images, start=1):
        inv[p - 1] = i
    return Perm(tuple(inv))


def perm_sign(a: Perm) -> int:
    return -1 if sum(len(c) - 1 for c in a.cycles()) % 2 else 1


def all_perms(n: int) -> list[Perm]:
    return [Perm(p) for p in permutations(range(1, n + 1))]


def act_particle_basis(p: Perm, seq: Sequence) -> tuple:
    if len(seq) != p.n:
        raise SizeMismatch(f"sequence of length {len(seq)} for a permutation of {p.n}")
    return tuple(seq[i - 1] for i in p.images)


def state_perm_from_cycle(cycle: Sequence[Hashable]) -> dict:
    """Label mapping for a cycle of state labels, e.g. ``('a', 'b', 'c')``."""
    cycle = tuple(cycle)
    return {a: b for a, b in zip(cycle, cycle[1:] + cycle[:1])}


def act_state_perm(sp: Mapping | Sequence, seq: Sequence, composition: Composition | None = None) -> tuple:
    """Replace each label ``x`` in ``seq`` by ``sp(x)``.

    ``sp`` is a mapping or a cycle of labels. Every label it moves must occur
    in the composition (by default the composition of ``seq``).
    """
    mapping = dict(sp) if isinstance(sp, Mapping) else state_perm_from_cycle(sp)
    present = set(composition.labels if composition is not None else seq)
    missing = [x for x, y in mapping.items() if x != y and (x not in present or y not in present)]
    if missing:
        raise LabelNotInComposition(f"labels {missing} are not in the composition")
    if sorted(mapping.values(), key=repr) != sorted(mapping.keys(), key=repr):
        raise ValueError("state permutation must be a bijection")
    return tuple(mapping.get(x, x) for x in seq)


# --------------------------------------------------------------------- tableaux


@dataclass(frozen=True)
class Tableau:
    shape: Partition
    rows: tuple[tuple, ...]
    flavor: str  # "young" or "weyl"

    def text(self) -> str:
        """Rows separated by ``/``; entries separated by ``,`` if any is multi-character."""
        sep = "," if any(len(str(x)) > 1 for row in self.rows for x in row) else ""
        return "/".join(sep.join(str(x) for x in row) for row in self.rows)

    @classmethod
    def parse(cls, text: str, flavor: str, convert=str) -> "Tableau":
        rows = []
        for part in text.split("/"):
            items = part.split(",") if "," in part else list(part)
            rows.append(tuple(convert(x) for x in items))
        return cls(tuple(len(r) for r in rows), tuple(rows), flavor)

    def is_valid(self) -> bool:
        strict_row = self.flavor == "young"
        for r, row in enumerate(self.rows):
            for c, x in enumerate(row):
                if c and (row[c - 1] >= x if strict_row else row[c - 1] > x):
                    return False
                if r and self.rows[r - 1][c] >= x:
                    return False
        return True

    def __str__(self) -> str:
        return self.text()


def is_partition(shape: Sequence[int]) -> bool:
    return all(s > 0 for s in shape) and all(a >= b for a, b in zip(shape, shape[1:]))


def transpose(shape: Partition) -> Partition:
    return tuple(sum(1 for s in shape if s > i) for i in range(shape[0])) if shape else ()


def partitions(n: int, max_part: int | None = None) -> list[Partition]:
    """Partitions of ``n`` in reverse lexicographic order (``[3], [21], [111]``)."""
    max_part = n if max_part is None else max_part
    if n == 0:
        return [()]
    out = []
    for first in range(min(n, max_part), 0, -1):
        out += [(first,) + rest for rest in partitions(n - first, first)]
    return out


def enumerate_tableaux(shape: Sequence[int], alphabet, flavor: str) -> list[Tableau]:
    """All valid tableaux of ``shape``.

    For ``young`` the alphabet is N (or the labels ``1..N``); for ``weyl`` it
    is the multiset of labels to place. Results are in lexicographic order of
    their row-by-row reading words.
    """
    shape = tuple(shape)
    if flavor not in ("young", "weyl"):
        raise ValueError("flavor must be 'young' or 'weyl'")
    if not is_partition(shape):
        raise ShapeAlphabetMismatch(f"{shape} is not a partition")
    if flavor == "young":
        labels = list(range(1, alphabet + 1)) if isinstance(alphabet, int) else sorted(alphabet)
        if labels != list(range(1, len(labels) + 1)):
            raise ShapeAlphabetMismatch("young tableaux are filled with 1..N")
    else:
        labels = sorted(alphabet)
    if sum(shape) != len(labels):
        raise ShapeAlphabetMismatch(f"shape {shape} has {sum(shape)} cells for {len(labels)} labels")

    cells = [(r, c) for r, n in enumerate(shape) for c in range(n)]
    remaining: dict = {}
    for x in labels:
        remaining[x] = remaining.get(x, 0) + 1
    grid: dict = {}
    out: list[Tableau] = []
    strict_row = flavor == "young"

    def fill(k: int) -> None:
        if k == len(cells):
            rows = tuple(tuple(grid[(r, c)] for c in range(n)) for r, n in enumerate(shape))
            out.append(Tableau(shape, rows, flavor))
            return
        r, c = cells[k]
        for x in sorted(remaining):
            if not remaining[x]:
                continue
            if c and (grid[(r, c - 1)] >= x if strict_row else grid[(r, c - 1)] > x):
                continue
            if r and grid[(r - 1, c)] >= x:
                continue
            remaining[x] -= 1
            grid[(r, c)] = x
            fill(k + 1)
            remaining[x] += 1
            del grid[(r, c)]

    fill(0)
    return out


def hook_lengths(shape: Partition) -> list[int]:
    conj = transpose(shape)
    return [shape[r] - c - 1 + conj[c] - r - 1 + 1 for r in range(len(shape)) for c in range(shape[r])]


def irrep_dimension(shape: Partition) -> int:
    """Number of standard Young tableaux (hook length formula)."""
    return math.factorial(sum(shape)) // math.prod(hook_lengths(shape))


def count_semistandard(shape: Partition, J: int) -> int:
    """Semistandard tableaux of ``shape`` over ``J`` letters (hook-content formula)."""
    if len(shape) > J:
        return 0
    num = Fraction(1)
    for (r, c), hook in zip(((r, c) for r in range(len(shape)) for c in range(shape[r])), hook_lengths(shape)):
        num *= Fraction(J + c - r, hook)
    return int(num)


# ------------------------------------------------------------- irreps of S2, S3

_D21_GENERATORS = {
    (2, 1, 3): np.array([[1.0, 0.0], [0.0, -1.0]]),
    (1, 3, 2): np.array([[-0.5, SQRT3 / 2], [SQRT3 / 2, 0.5]]),
}


@lru_cache(maxsize=None)
def _d21_table() -> dict:
    table = {(1, 2, 3): np.eye(2)}
    frontier = [(1, 2, 3)]
    while frontier:
        nxt = []
        for key in frontier:
            for gen, mat in _D21_GENERATORS.items():
                prod = perm_compose(Perm(gen), Perm(key)).images
                if prod not in table:
                    table[prod] = mat @ table[key]
                    nxt.append(prod)
        frontier = nxt
    return table


def irrep_matrix(shape: Partition, p: Perm) -> np.ndarray:
    """Orthogonal irrep matrix of ``p`` for N ≤ 3."""
    shape = tuple(shape)
    if sum(shape) != p.n:
        raise SizeMismatch(f"irrep {shape} for a permutation of {p.n}")
    if p.n > 3:
        raise UnsupportedN("explicit irreps are implemented for N ≤ 3")
    if shape == (p.n,):
        return np.ones((1, 1))
    if shape == (1,) * p.n:
        return np.full((1, 1), float(perm_sign(p)))
    return _d21_table()[p.images].copy()


def character(shape: Partition, p: Perm) -> float:
    return float(np.trace(irrep_matrix(shape, p)))


def kronecker_multiplicity(mu: Partition, nu: Partition, lam: Partition) -> int:
    """Multiplicity of ``lam`` in the inner product ``mu ⊗ nu`` (characters are real)."""
    n = sum(mu)
    if not (sum(nu) == sum(lam) == n):
        raise SizeMismatch("partitions of different N")
    total = sum(character(mu, g) * character(nu, g) * character(lam, g) for g in all_perms(n))
    return int(round(total / math.factorial(n)))


# --------------------------------------------------------- composition spaces


def particle_perm_matrix(p: Perm, sequences: Sequence[tuple]) -> np.ndarray:
    """Matrix of ``U(p)`` on the span of ``sequences`` (columns = inputs)."""
    index = {s: i for i, s in enumerate(sequences)}
    m = np.zeros((len(sequences), len(sequences)))
    for j, s in enumerate(sequences):
        m[index[act_particle_basis(p, s)], j] = 1.0
    return m


def state_perm_matrix(sp, comp: Composition) -> np.ndarray:
    seqs = comp.sequences()
    index = {s: i for i, s in enumerate(seqs)}
    m = np.zeros((len(seqs), len(seqs)))
    for j, s in enumerate(seqs):
        image = act_state_perm(sp, s, comp)
        if image not in index:
            raise LabelNotInComposition("state permutation leaves the composition space")
        m[index[image], j] = 1.0
    return m


def transpositions(n: int) -> list[Perm]:
    return [Perm.from_cycles([(i, j)], n) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def class_operator_matrix(op, comp: Composition) -> np.ndarray:
    """Two-cycle class operators on a composition space.

    ``op`` is ``"C2_all"`` (sum of all particle two-cycles), ``"C2_12"``
    (the single two-cycle of particles 1 and 2) or ``("state", a, b)`` for the
    state two-cycle exchanging labels ``a`` and ``b``.
    """
    if comp.N not in (2, 3):
        raise UnsupportedN("class operators are provided for N = 2, 3")
    seqs = comp.sequences()
    if op == "C2_all":
        return sum(particle_perm_matrix(t, seqs) for t in transpositions(comp.N))
    if op == "C2_12":
        return particle_perm_matrix(Perm.from_cycles([(1, 2)], comp.N), seqs)
    if isinstance(op, tuple) and len(op) == 3 and op[0] == "state":
        return state_perm_matrix((op[1], op[2]), comp)
    raise ValueError(f"unknown class operator {op!r}")


@dataclass(frozen=True)
class SymmetrizedBasis:
    """Orthogonal change of basis from particle sequences to ``|W Y>`` states.

    Row ``k`` of ``coeffs`` expands basis state ``labels[k]`` over
    ``sequences`` (lexicographic). ``irreps[k]`` is its S_N irrep and
    ``young_index[k]`` its position within that irrep (0 for ``12/3``,
    1 for ``13/2``).
    """

    composition: Composition
    sequences: tuple[tuple, ...]
    labels: tuple[tuple[Tableau, Tableau], ...]
    irreps: tuple[Partition, ...]
    young_index: tuple[int, ...]
    coeffs: np.ndarray

    def rows(self, shape: Partition, young: int | None = None) -> list[int]:
        return [
            k
            for k, (mu, y) in enumerate(zip(self.irreps, self.young_index))
            if mu == tuple(shape) and (young is None or y == young)
        ]

    def vector(self, k: int, order: Sequence[tuple]) -> np.ndarray:
        """Row ``k`` re-expressed over an arbitrary ordering of the sequences."""
        index = {s: i for i, s in enumerate(self.sequences)}
        return np.array([self.coeffs[k, index[tuple(s)]] for s in order])


def _young(text: str) -> Tableau:
    return Tableau.parse(text, "young", int)


def _weyl(rows: Sequence[Sequence]) -> Tableau:
    rows = tuple(tuple(r) for r in rows)
    return Tableau(tuple(len(r) for r in rows), rows, "weyl")


# rows over the listed sequence orders; letters stand for sorted distinct labels
_ABG_ORDER = ("abc", "bac", "cba", "acb", "cab", "bca")
_ABG_ROWS = (
    np.array([1, 1, 1, 1, 1, 1]) / SQRT6,
    np.array([2, 2, -1, -1, -1, -1]) / SQRT12,
    np.array([0, 0, -1, 1, -1, 1]) / 2,
    np.array([0, 0, -1, 1, 1, -1]) / 2,
    np.array([2, -2, 1, 1, -1, -1]) / SQRT12,
    np.array([1, -1, -1, -1, 1, 1]) / SQRT6,
)


def symmetrized_basis(comp: Composition) -> SymmetrizedBasis:
    """Simultaneous eigenbasis of the class operators on a composition space.

    Two labels ``x`` (doubled) and ``y`` (single) give
    ``(xxy + xyx + yxx)/√3``, ``(2xxy - xyx - yxx)/√6`` and ``(xyx - yxx)/√2``
    whatever their order. Three distinct labels ``a < b < c`` use the basis
    that also diagonalizes the state two-cycle ``(ab)``.
    """
    n = comp.N
    if n not in (1, 2, 3):
        raise UnsupportedN(f"symmetrized bases are provided for N ≤ 3, got {n}")
    seqs = comp.sequences()
    index = {s: i for i, s in enumerate(seqs)}
    mult = comp.multiplicities
    distinct = comp.distinct
    rows: list[np.ndarray] = []
    labels: list[tuple[Tableau, Tableau]] = []
    irreps: list[Partition] = []
    young_idx: list[int] = []

    def put(coeff_by_seq: dict) -> np.ndarray:
        v = np.zeros(len(seqs))
        for s, c in coeff_by_seq.items():
            v[index[s]] = c
        return v

    def add(vec, weyl_rows, young_text, shape, yi):
        rows.append(vec)
        labels.append((_weyl(weyl_rows), _young(young_text)))
        irreps.append(shape)
        young_idx.append(yi)

    if len(distinct) == 1:
        add(np.ones(1), [comp.labels], "123"[:n], (n,), 0)
    elif n == 2:
        a, b = distinct
        add(put({(a, b): 1 / SQRT2, (b, a): 1 / SQRT2}), [(a, b)], "12", (2,), 0)
        add(put({(a, b): 1 / SQRT2, (b, a): -1 / SQRT2}), [(a,), (b,)], "1/2", (1, 1), 0)
    elif len(distinct) == 2:
        x = next(lab for lab, m in mult.items() if m == 2)
        y = next(lab for lab, m in mult.items() if m == 1)
        xxy, xyx, yxx = (x, x, y), (x, y, x), (y, x, x)
        add(put({xxy: 1 / SQRT3, xyx: 1 / SQRT3, yxx: 1 / SQRT3}), [comp.labels], "123", (3,), 0)
        (weyl21,) = [t.rows for t in enumerate_tableaux((2, 1), comp.labels, "weyl")]
        add(put({xxy: 2 / SQRT6, xyx: -1 / SQRT6, yxx: -1 / SQRT6}), weyl21, "12/3", (2, 1), 0)
        add(put({xyx: 1 / SQRT2, yxx: -1 / SQRT2}), weyl21, "13/2", (2, 1), 1)
    else:
        a, b, c = distinct
        sub = {"a": a, "b": b, "c": c}
        order = [tuple(sub[ch] for ch in word) for word in _ABG_ORDER]
        meta = [
            ([(a, b, c)], "123", (3,), 0),
            ([(a, b), (c,)], "12/3", (2, 1), 0),
            ([(a, b), (c,)], "13/2", (2, 1), 1),
            ([(a, c), (b,)], "12/3", (2, 1), 0),
            ([(a, c), (b,)], "13/2", (2, 1), 1),
            ([(a,), (b,), (c,)], "1/2/3", (1, 1, 1), 0),
        ]
        for vec, (w, y, shape, yi) in zip(_ABG_ROWS, meta):
            add(put(dict(zip(order, vec))), w, y, shape, yi)

    coeffs = np.array(rows)
    coeffs.flags.writeable = False
    return SymmetrizedBasis(comp, tuple(seqs), tuple(labels), tuple(irreps), tuple(young_idx), coeffs)


# ------------------------------------------------------------------ spin sectors


def spin_sector_dims(N: int, J: int) -> dict[Partition, dict[str, int]]:
    """Decomposition of ``(C^J)^{⊗N}`` into S_N irreps.

    For each ``[μ]``: ``multiplicity`` is the number of copies of the S_N irrep
    (semistandard tableaux of shape μ over J letters, which is also the
    dimension of the paired U(J) irrep), ``irrep_dim`` is ``d([μ])`` and
    ``dimension`` their product.
    """
    if N not in (2, 3):
        raise UnsupportedN("spin sectors are tabulated for N = 2, 3")
    if J < 1:
        raise ValueError("J must be at least 1")
    out = {}
    for mu in partitions(N):
        m = count_semistandard(mu, J)
        d = irrep_dimension(mu)
        out[mu] = {"multiplicity": m, "irrep_dim": d, "dimension": m * d}
    return out


def kostka(mu: Partition, comp: Composition) -> int:
    """Copies of ``[μ]`` in a composition space (Weyl tableaux of that content)."""
    return len(enumerate_tableaux(mu, comp.labels, "weyl"))


def count_symmetrized_states(comp: Composition, statistics: str, J: int) -> int:
    """Physical states on one non-interacting level with ``J`` spin components.

    Bosons pair spatial ``[μ]`` with spin ``[μ]``; fermions pair it with the
    conjugate ``[μ]ᵀ``. Distinguishable particles see every product state.
    """
    N = comp.N
    if N not in (2, 3):
        raise UnsupportedN("state counting is provided for N = 2, 3")
    if J < 1:
        raise ValueError("J must be at least 1")
    if statistics == "distinguishable":
        return comp.degeneracy * J**N
    if statistics not in ("boson", "fermion"):
        raise ValueError(f"unknown statistics {statistics!r}")
    total = 0
    for mu in partitions(N):
        k = kostka(mu, comp)
        if k:
            partner = mu if statistics == "boson" else transpose(mu)
            total += k * count_semistandard(partner, J)
    return total
