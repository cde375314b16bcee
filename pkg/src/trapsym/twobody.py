"""Two-body interaction matrix elements over a one-body basis.

Notation: ``element(a, b, c, d) = <ab|V12|cd>``. Direct and exchange terms are
``direct(a, b) = <ab|V|ab>`` and ``exchange(a, b) = <ab|V|ba>``.

Each table stores one value per canonical key, so its symmetry group holds by
construction:

* ``general``: keys are closed under ``(a,b,c,d) -> (b,a,d,c)`` (particle
  exchange), ``(c,d,a,b)`` (hermiticity of a real kernel) and ``(c,b,a,d)``
  (real orbitals). This gives 8 equivalent index orders.
* ``contact``: ``g ∫ φa φb φc φd`` is invariant under all 24 orders; the key
  is the sorted 4-tuple.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ConfigInvalid, KernelUndersampled, MissingElement, StateOutOfRange
from .onebody import OneBodySolution

INTERACTION_KINDS = ("contact", "gaussian", "sampled_kernel")


@dataclass(frozen=True)
class InteractionSpec:
    """A Galilean-invariant pair interaction ``V(|q_i - q_j|)``.

    ``contact`` uses ``g``. ``gaussian`` is ``strength * exp(-r²/(2 range²))``,
    a smoothed contact with ``g = strength * range * √(2π)``. ``sampled_kernel``
    interpolates ``samples`` = ``((r, V), ...)`` linearly in ``r ≥ 0`` and is
    zero beyond the last sample.
    """

    kind: str = "contact"
    g: float = 0.0
    strength: float = 0.0
    range: float = 1.0
    samples: tuple[tuple[float, float], ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in INTERACTION_KINDS:
            raise ConfigInvalid(f"unknown interaction kind {self.kind!r}")
        object.__setattr__(self, "samples", tuple((float(r), float(v)) for r, v in self.samples))
        if self.kind == "gaussian" and not self.range > 0:
            raise ConfigInvalid("gaussian range must be positive")
        if self.kind == "sampled_kernel":
            rs = [r for r, _ in self.samples]
            if len(rs) < 2 or rs[0] < 0 or any(b <= a for a, b in zip(rs, rs[1:])):
                raise ConfigInvalid("sampled kernel needs increasing separations r ≥ 0")

    @classmethod
    def gaussian_for_contact(cls, g: float, width: float) -> "InteractionSpec":
        return cls("gaussian", strength=g / (width * np.sqrt(2 * np.pi)), range=width)

    def kernel(self, r) -> np.ndarray:
        r = np.abs(np.asarray(r, dtype=float))
        if self.kind == "gaussian":
            return self.strength * np.exp(-0.5 * (r / self.range) ** 2)
        if self.kind == "sampled_kernel":
            rs, vs = zip(*self.samples)
            return np.interp(r, rs, vs, right=0.0)
        raise ConfigInvalid("a contact interaction has no sampled kernel")

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.kind == "contact":
            out["g"] = self.g
        elif self.kind == "gaussian":
            out.update(strength=self.strength, range=self.range)
        else:
            out["samples"] = [list(s) for s in self.samples]
        return out

    @classmethod
    def from_dict(cls, d: Mapping) -> "InteractionSpec":
        d = dict(d)
        if "samples" in d:
            d["samples"] = tuple(tuple(s) for s in d["samples"])
        return cls(**d)


# ------------------------------------------------------------- key symmetries


@lru_cache(maxsize=None)
def _slot_group(kind: str) -> tuple[tuple[int, ...], ...]:
    """Index-slot permutations that leave an element unchanged."""
    if kind == "contact":
        from itertools import permutations

        return tuple(permutations(range(4)))
    gens = [(1, 0, 3, 2), (2, 3, 0, 1), (2, 1, 0, 3)]
    group = {(0, 1, 2, 3)}
    frontier = list(group)
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                prod = tuple(g[i] for i in h)
                if prod not in group:
                    group.add(prod)
                    nxt.append(prod)
        frontier = nxt
    return tuple(sorted(group))


def canonical_key(kind: str, a, b, c, d) -> tuple:
    idx = (a, b, c, d)
    if kind == "contact":
        return tuple(sorted(idx))
    return min(tuple(idx[i] for i in g) for g in _slot_group(kind))


def _canonical_codes(n: int, kind: str) -> np.ndarray:
    """Integer code of the canonical key for every position 4-tuple."""
    grid = np.indices((n,) * 4).reshape(4, -1)
    weights = np.array([n**3, n**2, n, 1])
    if kind == "contact":
        return (np.sort(grid, axis=0).T @ weights).reshape((n,) * 4)
    codes = [grid[list(g)].T @ weights for g in _slot_group(kind)]
    return np.min(codes, axis=0).reshape((n,) * 4)


def _decode(code: int, n: int) -> tuple[int, int, int, int]:
    a, r = divmod(code, n**3)
    b, r = divmod(r, n**2)
    c, d = divmod(r, n)
    return a, b, c, d


@dataclass(frozen=True, eq=False)
class TwoBodyTable:
    """Matrix elements ``<ab|V|cd>`` over a set of one-body ``states``.

    ``storage`` maps canonical keys (state labels) to values; ``dense`` is the
    full 4-index array over positions in ``states`` gathered from it.
    """

    states: tuple[int, ...]
    kind: str
    storage: Mapping[tuple, float]
    dense: np.ndarray = field(repr=False)
    meta: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_dense(cls, states: Sequence[int], kind: str, values: np.ndarray, meta: dict | None = None) -> "TwoBodyTable":
        """Build from a raw 4-index array; each key takes the value at its canonical order."""
        states = tuple(int(s) for s in states)
        if len(set(states)) != len(states):
            raise ConfigInvalid("states must be distinct")
        if kind not in ("general", "contact"):
            raise ConfigInvalid(f"unknown table kind {kind!r}")
        n = len(states)
        values = np.asarray(values, dtype=float)
        if values.shape != (n,) * 4:
            raise ConfigInvalid(f"dense values must have shape {(n,) * 4}")
        # sort positions by label so canonical position codes match label keys
        order = np.argsort(states)
        sorted_states = tuple(states[i] for i in order)
        vals = values[np.ix_(order, order, order, order)]
        codes = _canonical_codes(n, kind)
        flat = vals.reshape(-1)
        dense = flat[codes]
        uniq = np.unique(codes)
        storage = {}
        for code in uniq.tolist():
            a, b, c, d = _decode(code, n)
            storage[(sorted_states[a], sorted_states[b], sorted_states[c], sorted_states[d])] = float(flat[code])
        dense.flags.writeable = False
        return cls(sorted_states, kind, storage, dense, dict(meta or {}))

    @classmethod
    def from_storage(cls, states: Sequence[int], kind: str, storage: Mapping, meta: dict | None = None) -> "TwoBodyTable":
        states = tuple(sorted(int(s) for s in states))
        pos = {s: i for i, s in enumerate(states)}
        n = len(states)
        flat = np.full(n**4, np.nan)
        weights = (n**3, n**2, n, 1)
        for key, val in storage.items():
            key = tuple(int(k) for k in key)
            if canonical_key(kind, *key) != key:
                raise ConfigInvalid(f"{key} is not a canonical {kind} key")
            flat[sum(pos[k] * w for k, w in zip(key, weights))] = float(val)
        dense = flat[_canonical_codes(n, kind)]
        if np.isnan(dense).any():
            raise MissingElement("storage does not cover every canonical key")
        dense.flags.writeable = False
        clean = {tuple(int(k) for k in key): float(v) for key, v in storage.items()}
        return cls(states, kind, clean, dense, dict(meta or {}))

    def position(self, label: int) -> int:
        try:
            return self.states.index(label)
        except ValueError:
            raise MissingElement(f"state {label} is not in the table") from None

    def element(self, a: int, b: int, c: int, d: int) -> float:
        """``<ab|V|cd>``."""
        key = canonical_key(self.kind, a, b, c, d)
        try:
            return self.storage[key]
        except KeyError:
            raise MissingElement(f"no element for {key}") from None

    def v(self, ac: tuple[int, int], bd: tuple[int, int]) -> float:
        """``v_{⌊ac⌋⌊bd⌋} = <ab|V|cd>``."""
        return self.element(ac[0], bd[0], ac[1], bd[1])

    def direct(self, a: int, b: int) -> float:
        return self.element(a, b, a, b)

    def exchange(self, a: int, b: int) -> float:
        return self.element(a, b, b, a)

    def sub_dense(self, labels: Sequence[int]) -> np.ndarray:
        idx = [self.position(s) for s in labels]
        return self.dense[np.ix_(idx, idx, idx, idx)]

    def to_json(self) -> str:
        items = [[list(k), v] for k, v in sorted(self.storage.items())]
        return json.dumps(
            {"format": "trapsym-twobody/1", "kind": self.kind, "states": list(self.states), "meta": self.meta, "elements": items},
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "TwoBodyTable":
        doc = json.loads(text)
        storage = {tuple(k): v for k, v in doc["elements"]}
        return cls.from_storage(doc["states"], doc["kind"], storage, doc.get("meta"))


# ------------------------------------------------------------------ builders


def _check_states(sol: OneBodySolution, states: Iterable[int]) -> tuple[int, ...]:
    states = tuple(sorted(set(int(s) for s in states)))
    if not states or states[0] < 0 or states[-1] >= sol.n_states:
        raise StateOutOfRange(f"states must lie in [0, {sol.n_states - 1}]")
    return states


def _pair_densities(sol: OneBodySolution, states: tuple[int, ...]) -> np.ndarray:
    phi = sol.wavefunctions[list(states)]
    n = len(states)
    return (phi[:, None, :] * phi[None, :, :]).reshape(n * n, -1)


def contact_elements(sol: OneBodySolution, states: Iterable[int], g: float) -> TwoBodyTable:
    """``g ∫ φa φb φc φd dq`` by trapezoid quadrature on the solver grid."""
    states = _check_states(sol, states)
    n = len(states)
    rho = _pair_densities(sol, states)
    t = g * (rho * sol.weights) @ rho.T  # [(a,c),(b,d)]
    values = t.reshape(n, n, n, n).transpose(0, 2, 1, 3)
    return TwoBodyTable.from_dense(states, "contact", values, {"g": g})


def general_elements(sol: OneBodySolution, spec: InteractionSpec, states: Iterable[int]) -> TwoBodyTable:
    """``∫∫ φa(q1) φb(q2) V(|q1-q2|) φc(q1) φd(q2)`` by double trapezoid quadrature."""
    if spec.kind == "contact":
        raise ConfigInvalid("use contact_elements for contact interactions")
    states = _check_states(sol, states)
    h = sol.grid.spacing
    if spec.kind == "gaussian" and spec.range <= 2 * h:
        raise KernelUndersampled(f"kernel range {spec.range:g} must exceed twice the grid spacing {h:g}")
    if spec.kind == "sampled_kernel":
        # the kernel reaches zero at the sample after the last nonzero one
        nonzero = [i for i, (_, v) in enumerate(spec.samples) if v != 0.0]
        support = spec.samples[min(nonzero[-1] + 1, len(spec.samples) - 1)][0] if nonzero else 0.0
        if 0.0 < support <= 2 * h:
            raise KernelUndersampled(f"kernel support {support:g} must exceed twice the grid spacing {h:g}")
    q = sol.q
    kernel = spec.kernel(q[:, None] - q[None, :])
    n = len(states)
    rho = _pair_densities(sol, states) * sol.weights
    t = rho @ kernel @ rho.T
    values = t.reshape(n, n, n, n).transpose(0, 2, 1, 3)
    return TwoBodyTable.from_dense(states, "general", values, {"interaction": spec.to_dict()})


def interaction_elements(sol: OneBodySolution, spec: InteractionSpec, states: Iterable[int]) -> TwoBodyTable:
    if spec.kind == "contact":
        return contact_elements(sol, states, spec.g)
    return general_elements(sol, spec, states)
