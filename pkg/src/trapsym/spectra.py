"""Non-interacting N-body levels: enumeration, partial order, classification.

Point-group irreps use Mulliken names. For two particles the configuration
group is the square group D4 with one-dimensional irreps A1, A2, B1, B2 and
the doublet E; B1 is the irrep that is even under the single-particle
reflections and odd under the diagonal reflection ``q1 <-> q2``. For three
particles it is the cube group O_h.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .composition import Composition
from .errors import EmptySpectrum, SpectrumTooShort, UnknownClass, UnsupportedTrap
from .permsym import Partition, irrep_dimension, kostka, partitions

__all__ = [
    "Composition",
    "LevelClassification",
    "enumerate_compositions",
    "compositions_up_to_excitation",
    "partial_order_edges",
    "classify_level",
    "fermi_bose_map",
    "emergent_degeneracy_check",
]

_SUB = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")
_SUP = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")


def _sort_with_ties(comps: list[Composition], tie_tol: float) -> list[Composition]:
    comps = sorted(comps, key=lambda c: (c.energy, c.labels))
    out: list[Composition] = []
    run: list[Composition] = []
    for c in comps:
        if run and abs(c.energy - run[0].energy) > tie_tol * max(1.0, abs(c.energy)):
            out += sorted(run, key=lambda x: x.labels)
            run = []
        run.append(c)
    return out + sorted(run, key=lambda x: x.labels)


def enumerate_compositions(
    sigma1: Sequence[float], N: int, e_max: float, *, tie_tol: float = 1e-9
) -> list[Composition]:
    """Every multiset of ``N`` state indices with ``Σ ε ≤ e_max``.

    Sorted by energy; energies equal within ``tie_tol`` (relative) are ordered
    lexicographically. Raises ``SpectrumTooShort`` if a state beyond the end of
    ``sigma1`` could still fit under the cutoff.
    """
    eps = [float(e) for e in sigma1]
    if not eps:
        raise EmptySpectrum("one-body spectrum is empty")
    if any(b <= a for a, b in zip(eps, eps[1:])):
        raise EmptySpectrum("one-body spectrum must be strictly increasing")
    if N < 1:
        raise ValueError("N must be positive")
    slack = 1e-12 * max(1.0, abs(e_max))
    if e_max < N * eps[0] - slack:
        raise EmptySpectrum(f"cutoff {e_max} lies below the ground level {N * eps[0]}")
    if (N - 1) * eps[0] + eps[-1] <= e_max + slack:
        raise SpectrumTooShort(f"{len(eps)} one-body levels cannot certify completeness up to {e_max}")

    found: list[Composition] = []

    def grow(prefix: list[int], start: int, energy: float) -> None:
        left = N - len(prefix)
        if left == 0:
            found.append(Composition(tuple(prefix), energy))
            return
        for n in range(start, len(eps)):
            # remaining slots are at least eps[n] each
            if energy + left * eps[n] > e_max + slack:
                break
            grow(prefix + [n], n, energy + eps[n])

    grow([], 0, 0.0)
    return _sort_with_ties(found, tie_tol)


def compositions_up_to_excitation(N: int, x_max: int) -> list[Composition]:
    """Abstract compositions with label sum ≤ ``x_max`` (energies = label sums)."""
    return enumerate_compositions(range(x_max + 2), N, x_max)


def dominates(a: Composition, b: Composition) -> bool:
    """True if ``E_a ≤ E_b`` for every strictly increasing one-body spectrum.

    Holds exactly when the sorted labels of ``a`` are componentwise ≤ those of
    ``b``. Sufficiency is immediate. For necessity, if ``a_k > b_k`` pick a
    spectrum with a large jump just below ``a_k``: ``a`` then has more labels
    above the jump than ``b`` and costs more.
    """
    return a.N == b.N and all(x <= y for x, y in zip(a.labels, b.labels))


def partial_order_edges(comps: Sequence[Composition]) -> list[tuple[int, int]]:
    """Covering pairs ``(i, j)`` of the spectrum-independent order within ``comps``."""
    n = len(comps)
    less = [[i != j and dominates(comps[i], comps[j]) and comps[i] != comps[j] for j in range(n)] for i in range(n)]
    edges = []
    for i in range(n):
        for j in range(n):
            if less[i][j] and not any(less[i][k] and less[k][j] for k in range(n)):
                edges.append((i, j))
    return edges


def fermi_bose_map(comp: Composition) -> Composition:
    """Add ``⟨0, 1, ..., N-1⟩`` element-wise to the sorted labels."""
    return comp.shifted(range(comp.N))


def emergent_degeneracy_check(trap, X: int, N: int) -> int:
    """Degeneracy of the harmonic level with total excitation ``X``."""
    kind = trap if isinstance(trap, str) else getattr(trap, "kind", None)
    if kind != "harmonic":
        raise UnsupportedTrap("the emergent degeneracy formula needs a harmonic trap")
    if X < 0:
        raise ValueError("excitation must be non-negative")
    if N == 2:
        return X + 1
    if N == 3:
        return (X + 1) * (X + 2) // 2
    raise UnsupportedTrap("formula provided for N = 2, 3")


# ----------------------------------------------------------------- classification

_IRREP_DIM = {"A": 1, "B": 1, "E": 2, "T": 3}


def point_irrep_dim(name: str) -> int:
    return _IRREP_DIM[name[0]]


def shape_text(mu: Partition) -> str:
    """``[3]``, ``[21]``, ``[1³]``: repeated parts become powers."""
    parts = []
    for v in sorted(set(mu), reverse=True):
        m = mu.count(v)
        parts.append(str(v) + (str(m).translate(_SUP) if m > 1 else ""))
    return "[" + "".join(parts) + "]"


@dataclass(frozen=True)
class LevelClassification:
    """Labels of one non-interacting level.

    ``k_irreps`` holds ``(shape, parity, multiplicity)`` with parity ``+1``,
    ``-1`` or ``None`` for asymmetric traps.
    """

    composition: Composition
    k0_class: str
    c0_irreps: tuple[str, ...]
    k_irreps: tuple[tuple[Partition, int | None, int], ...]

    def c0_text(self) -> str:
        return " ⊕ ".join(self.c0_irreps)

    def k_text(self) -> str:
        out = []
        for mu, par, mult in self.k_irreps:
            sign = "" if par is None else ("+" if par > 0 else "-")
            out.append(("" if mult == 1 else str(mult)) + shape_text(mu) + sign)
        return " ⊕ ".join(out)

    def c0_dimension(self) -> int:
        total = 0
        for name in self.c0_irreps:
            mult, _, base = name.partition(" ") if " " in name else ("1", "", name)
            if base[0] == "[":
                total += int(mult) * irrep_dimension(_parse_shape(base))
            else:
                total += int(mult) * point_irrep_dim(base)
        return total

    def k_dimension(self) -> int:
        return sum(mult * irrep_dimension(mu) for mu, _, mult in self.k_irreps)


def _parse_shape(text: str) -> Partition:
    body = text.strip("[]")
    out: list[int] = []
    sup = {v: k for k, v in enumerate("⁰¹²³⁴⁵⁶⁷⁸⁹")}
    for ch in body:
        if ch in sup:
            out += [out[-1]] * (sup[ch] - 1)
        else:
            out.append(int(ch))
    return tuple(out)


def k0_class_label(comp: Composition, parities: Sequence[int]) -> str:
    """Parity-pattern class of a composition in a symmetric trap.

    ``parities`` gives one sign per distinct label (ascending label order).
    """
    mult = comp.multiplicities
    if len(parities) != len(mult):
        raise UnknownClass("need one parity per distinct label")
    pairs = sorted(zip(mult.values(), parities), reverse=True)  # doubled label first
    sym = {1: "+", -1: "-"}
    shape = comp.shape
    if comp.N not in (2, 3):
        raise UnknownClass("parity classes are tabulated for N = 2, 3")
    if len(shape) == 1:
        return "⌊" + sym[pairs[0][1]] + str(comp.N).translate(_SUP) + "⌋"
    if comp.N == 2 or shape == (1, 1, 1):
        npos = sum(1 for p in parities if p > 0)
        nneg = len(parities) - npos
        pos = "".join("+" + str(i).translate(_SUB) for i in range(1, npos + 1)) if npos > 1 else "+" * npos
        neg = "".join("-" + str(i).translate(_SUB) for i in range(1, nneg + 1)) if nneg > 1 else "-" * nneg
        return "⌊" + pos + neg + "⌋"
    (_, p2), (_, p1) = pairs
    if p2 == p1:
        s = sym[p2]
        return "⌊" + s + "₁²" + s + "₂⌋"
    # the even label is written first; the exponent marks the doubled one
    return "⌊+²-⌋" if p2 > 0 else "⌊+-²⌋"


# class -> (C0 irreps, K irreps as (shape, multiplicity)); parity of every K irrep
# is the product of the one-particle parities
_TABLE_N2 = {
    "⌊+²⌋": (("A1",), (((2,), 1),)),
    "⌊-²⌋": (("B2",), (((2,), 1),)),
    "⌊+-⌋": (("E",), (((2,), 1), ((1, 1), 1))),
    "⌊+₁+₂⌋": (("A1", "B1"), (((2,), 1), ((1, 1), 1))),
    "⌊-₁-₂⌋": (("A2", "B2"), (((2,), 1), ((1, 1), 1))),
}
_TABLE_N3 = {
    "⌊+³⌋": (("A1g",), (((3,), 1),)),
    "⌊-³⌋": (("A2u",), (((3,), 1),)),
    "⌊+²-⌋": (("T1u",), (((3,), 1), ((2, 1), 1))),
    "⌊+-²⌋": (("T2g",), (((3,), 1), ((2, 1), 1))),
    "⌊+₁²+₂⌋": (("A1g", "Eg"), (((3,), 1), ((2, 1), 1))),
    "⌊-₁²-₂⌋": (("A2u", "Eu"), (((3,), 1), ((2, 1), 1))),
    "⌊+₁+₂+₃⌋": (("A1g", "A2g", "2 Eg"), (((3,), 1), ((2, 1), 2), ((1, 1, 1), 1))),
    "⌊+₁+₂-⌋": (("T1u", "T2u"), (((3,), 1), ((2, 1), 2), ((1, 1, 1), 1))),
    "⌊+-₁-₂⌋": (("T1g", "T2g"), (((3,), 1), ((2, 1), 2), ((1, 1, 1), 1))),
    "⌊-₁-₂-₃⌋": (("A1u", "A2u", "2 Eu"), (((3,), 1), ((2, 1), 2), ((1, 1, 1), 1))),
}
# cells of the published tables that disagree with a direct character
# computation; ``literal=True`` reproduces them verbatim
_AS_PRINTED = {
    "⌊-²⌋": {"c0": ("A2",)},
    "⌊-³⌋": {"k": (((1, 1, 1), 1),)},
}


def classify_level(
    comp: Composition,
    parities: Sequence[int] | None = None,
    trap_symmetry: str = "symmetric",
    *,
    literal: bool = False,
) -> LevelClassification:
    """Symmetry labels of a non-interacting level.

    ``parities`` may list one sign per distinct label or one per particle (in
    sorted label order). With ``literal=True`` two cells that are misprinted
    in the standard reference tables are reproduced as printed.
    """
    if trap_symmetry not in ("asymmetric", "symmetric", "harmonic"):
        raise ValueError(f"unknown trap symmetry {trap_symmetry!r}")
    shapes = [(mu, kostka(mu, comp)) for mu in partitions(comp.N)]
    shapes = [(mu, k) for mu, k in shapes if k]
    if trap_symmetry == "asymmetric":
        k0 = comp.text()
        c0 = tuple(("" if k == 1 else f"{k} ") + shape_text(mu) for mu, k in shapes)
        return LevelClassification(comp, k0, c0, tuple((mu, None, k) for mu, k in shapes))
    if parities is None:
        raise UnknownClass("symmetric traps need one-particle parities")
    parities = [int(p) for p in parities]
    if len(parities) == comp.N and len(comp.distinct) != comp.N:
        parities = [parities[comp.labels.index(lab)] for lab in comp.distinct]
    if any(p not in (1, -1) for p in parities):
        raise UnknownClass("parities must be +1 or -1")
    k0 = k0_class_label(comp, parities)
    table = _TABLE_N2 if comp.N == 2 else _TABLE_N3
    if k0 not in table:
        raise UnknownClass(f"no table entry for {k0}")
    c0, k = table[k0]
    if literal and k0 in _AS_PRINTED:
        c0 = _AS_PRINTED[k0].get("c0", c0)
        k = _AS_PRINTED[k0].get("k", k)
    total = math.prod(p ** comp.multiplicities[lab] for p, lab in zip(parities, comp.distinct))
    return LevelClassification(comp, k0, tuple(c0), tuple((mu, total, m) for mu, m in k))


def classification_row(cl: LevelClassification) -> dict:
    c = cl.composition
    return {
        "labels": c.text(),
        "energy": c.energy,
        "degeneracy": c.degeneracy,
        "k0_class": cl.k0_class,
        "c0_irreps": cl.c0_text(),
        "k_irreps": cl.k_text(),
    }
