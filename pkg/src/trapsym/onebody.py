"""One-particle trap potentials and a banded finite-difference eigensolver.

The Hamiltonian is ``H = -1/2 d^2/dq^2 + V(q)`` in natural units. Grid end
points are hard walls (psi = 0). The kinetic operator is a central stencil of
selectable even order; near the walls the stencil reaches past the edge and
uses odd-reflected ghost values, which keeps the matrix symmetric and is exact
for the sine modes of a box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import linalg, sparse
from scipy.sparse.linalg import ArpackError, eigsh

from .errors import (
    AsymmetricTrap,
    ConfigInvalid,
    DegenerateSpectrum,
    GridTooSmall,
    NonconvergedEigensolver,
    NumericalError,
    UnsupportedKind,
)

TRAP_KINDS = ("harmonic", "power_law", "polynomial", "infinite_well", "double_well", "custom_sampled")

# central second-derivative weights c_0, c_1, ... (c_{-k} = c_k)
_D2 = {
    2: (-2.0, 1.0),
    4: (-5 / 2, 4 / 3, -1 / 12),
    6: (-49 / 18, 3 / 2, -3 / 20, 1 / 90),
    8: (-205 / 72, 8 / 5, -1 / 5, 8 / 315, -1 / 560),
}
# central first-derivative weights d_1, d_2, ... (d_{-k} = -d_k)
_D1 = {
    2: (1 / 2,),
    4: (2 / 3, -1 / 12),
    6: (3 / 4, -3 / 20, 1 / 60),
    8: (4 / 5, -1 / 5, 4 / 105, -1 / 280),
}
DEFAULT_ORDER = 8


@dataclass(frozen=True)
class TrapSpec:
    """A one-dimensional trap ``V(q - offset)``.

    Only the fields relevant to ``kind`` are read:
    power_law uses ``z``; polynomial uses ``coefficients`` (ascending powers);
    infinite_well uses ``width``; double_well uses ``a q^4 - b q^2``;
    custom_sampled uses ``samples``, a sequence of ``(q, V)`` pairs that is
    linearly interpolated and held constant outside its range.
    """

    kind: str = "harmonic"
    z: float = 2.0
    coefficients: tuple[float, ...] = ()
    width: float = 1.0
    a: float = 1.0
    b: float = 2.0
    samples: tuple[tuple[float, float], ...] = ()
    offset: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in TRAP_KINDS:
            raise ConfigInvalid(f"unknown trap kind {self.kind!r}")
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        object.__setattr__(self, "samples", tuple((float(q), float(v)) for q, v in self.samples))
        if self.kind == "power_law" and not self.z > 0:
            raise ConfigInvalid("power_law exponent z must be positive")
        if self.kind == "infinite_well" and not self.width > 0:
            raise ConfigInvalid("infinite_well width must be positive")
        if self.kind == "polynomial" and not self.coefficients:
            raise ConfigInvalid("polynomial trap needs at least one coefficient")
        if self.kind == "custom_sampled":
            if len(self.samples) < 2:
                raise ConfigInvalid("custom_sampled trap needs at least two samples")
            qs = [q for q, _ in self.samples]
            if any(b <= a for a, b in zip(qs, qs[1:])):
                raise ConfigInvalid("custom_sampled positions must be strictly increasing")

    def potential(self, q) -> np.ndarray:
        x = np.asarray(q, dtype=float) - self.offset
        if self.kind == "harmonic":
            return 0.5 * x**2
        if self.kind == "power_law":
            return np.abs(x) ** self.z
        if self.kind == "polynomial":
            return np.polynomial.polynomial.polyval(x, self.coefficients)
        if self.kind == "infinite_well":
            return np.zeros_like(x)
        if self.kind == "double_well":
            return self.a * x**4 - self.b * x**2
        qs, vs = zip(*self.samples)
        return np.interp(x, qs, vs)

    @property
    def is_symmetric(self) -> bool:
        """True if ``V(offset + x) == V(offset - x)``, judged by sampling."""
        if self.kind in ("harmonic", "power_law", "infinite_well", "double_well"):
            return True
        if self.kind == "custom_sampled":
            qs = np.array([q for q, _ in self.samples])
            span = max(abs(qs[0]), abs(qs[-1]))
        else:
            span = 10.0
        x = np.linspace(0.0, span, 401)
        left = self.potential(self.offset - x)
        right = self.potential(self.offset + x)
        scale = max(1.0, float(np.max(np.abs(right))))
        return bool(np.max(np.abs(left - right)) <= 1e-12 * scale)

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind, "offset": self.offset}
        if self.kind == "power_law":
            out["z"] = self.z
        elif self.kind == "polynomial":
            out["coefficients"] = list(self.coefficients)
        elif self.kind == "infinite_well":
            out["width"] = self.width
        elif self.kind == "double_well":
            out.update(a=self.a, b=self.b)
        elif self.kind == "custom_sampled":
            out["samples"] = [list(s) for s in self.samples]
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "TrapSpec":
        d = dict(d)
        if "samples" in d:
            d["samples"] = tuple(tuple(s) for s in d["samples"])
        if "coefficients" in d:
            d["coefficients"] = tuple(d["coefficients"])
        return cls(**d)


@dataclass(frozen=True)
class Grid:
    q_min: float
    q_max: float
    n_points: int

    def __post_init__(self) -> None:
        if not self.q_min < self.q_max:
            raise ConfigInvalid("grid needs q_min < q_max")
        if int(self.n_points) != self.n_points or self.n_points < 64:
            raise ConfigInvalid("grid needs an integer n_points >= 64")

    @property
    def spacing(self) -> float:
        return (self.q_max - self.q_min) / (self.n_points - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.q_min, self.q_max, self.n_points)

    def refined(self, factor: int) -> "Grid":
        """Same interval with the spacing divided by ``factor``."""
        return Grid(self.q_min, self.q_max, factor * (self.n_points - 1) + 1)

    def to_dict(self) -> dict:
        return {"q_min": self.q_min, "q_max": self.q_max, "n_points": self.n_points}


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class OneBodySolution:
    """Lowest eigenpairs of a trap on a grid.

    ``wavefunctions[n]`` and ``derivatives[n]`` are samples on every grid point,
    walls included, normalized so that trapezoid quadrature gives an
    orthonormal set.
    """

    trap: TrapSpec
    grid: Grid
    energies: np.ndarray
    wavefunctions: np.ndarray
    derivatives: np.ndarray
    parities: tuple[int, ...] | None
    order: int = DEFAULT_ORDER
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def n_states(self) -> int:
        return len(self.energies)

    @property
    def q(self) -> np.ndarray:
        return self.grid.points

    @property
    def weights(self) -> np.ndarray:
        w = np.full(self.grid.n_points, self.grid.spacing)
        w[0] = w[-1] = 0.5 * self.grid.spacing
        return w

    def overlaps(self) -> np.ndarray:
        phi = self.wavefunctions
        return (phi * self.weights) @ phi.T


def effective_grid(trap: TrapSpec, grid: Grid) -> Grid:
    """The grid actually used: an infinite well is solved on its own box."""
    if trap.kind == "infinite_well":
        half = 0.5 * trap.width
        return Grid(trap.offset - half, trap.offset + half, grid.n_points)
    return grid


def _hamiltonian_band(v: np.ndarray, h: float, order: int) -> np.ndarray:
    """Lower band storage of the interior Hamiltonian (``ab[k, j] = H[j+k, j]``)."""
    c = _D2[order]
    half = order // 2
    m = len(v)
    ab = np.zeros((half + 1, m))
    kin = -0.5 / h**2
    ab[0] = kin * c[0] + v
    for k in range(1, half + 1):
        ab[k, : m - k] = kin * c[k]
    # ghost values psi(-j) = -psi(j) about each wall
    for r in range(half):
        for s in range(r + 1):
            k = r + s + 2
            if k > half:
                continue
            ab[r - s, s] -= kin * c[k]
            ab[r - s, m - 1 - r] -= kin * c[k]
    return ab


def _lowest_eigenpairs(ab: np.ndarray, k: int, shift: float) -> tuple[np.ndarray, np.ndarray]:
    # shift-invert Lanczos below the spectrum; the banded LAPACK driver is the
    # slow but dependable fallback
    m = ab.shape[1]
    bands = [ab[d, : m - d] for d in range(ab.shape[0])]
    offsets = list(range(ab.shape[0]))
    mat = sparse.diags(bands + bands[1:], offsets + [-d for d in offsets[1:]], format="csc")
    try:
        # fixed start vector keeps repeated runs bit-identical; it must not be
        # parity-symmetric or Lanczos would miss half the spectrum
        v0 = np.random.default_rng(0).standard_normal(m)
        w, vecs = eigsh(mat, k=k, sigma=shift, which="LM", v0=v0)
        order = np.argsort(w)
        w, vecs = w[order], vecs[:, order]
    except (ArpackError, RuntimeError, ValueError):
        try:
            w, vecs = linalg.eig_banded(ab, lower=True, select="i", select_range=(0, k - 1))
        except (linalg.LinAlgError, ValueError) as exc:
            raise NonconvergedEigensolver(str(exc)) from exc
    if len(w) != k or not np.all(np.isfinite(w)):
        raise NonconvergedEigensolver("eigensolver returned an incomplete spectrum")
    return w, vecs


def _odd_pad(f: np.ndarray, width: int) -> np.ndarray:
    """Pad the last axis with values odd-reflected about both end points."""
    left = -f[..., width:0:-1]
    right = -f[..., -2 : -width - 2 : -1]
    return np.concatenate([left, f, right], axis=-1)


def finite_difference(f: np.ndarray, h: float, order: int = DEFAULT_ORDER) -> np.ndarray:
    """Central first derivative along the last axis with odd ghost values.

    Assumes ``f`` vanishes at both end points (Dirichlet walls).
    """
    d = _D1[order]
    half = len(d)
    padded = _odd_pad(np.asarray(f, dtype=float), half)
    n = f.shape[-1]
    out = np.zeros_like(f, dtype=float)
    for k, w in enumerate(d, start=1):
        out += w * (padded[..., half + k : half + k + n] - padded[..., half - k : half - k + n])
    return out / h


def _fix_sign(phi: np.ndarray) -> np.ndarray:
    # first lobe from the left positive; tiny leading tails are skipped
    for row in phi:
        thresh = 1e-4 * np.max(np.abs(row))
        idx = int(np.argmax(np.abs(row) > thresh))
        if row[idx] < 0:
            row *= -1.0
    return phi


def solve_one_body(
    trap: TrapSpec,
    grid: Grid,
    n_states: int,
    *,
    order: int = DEFAULT_ORDER,
    tol_ortho: float = 1e-8,
    degeneracy_tol: float = 1e-9,
    boundary_tol: float = 1e-7,
) -> OneBodySolution:
    """Lowest ``n_states`` eigenpairs of ``-1/2 d^2/dq^2 + V`` on ``grid``."""
    if order not in _D2:
        raise ConfigInvalid(f"stencil order must be one of {sorted(_D2)}")
    grid = effective_grid(trap, grid)
    if n_states < 1 or n_states > grid.n_points // 4:
        raise ConfigInvalid(f"n_states must be in [1, n_points/4], got {n_states}")
    q = grid.points
    h = grid.spacing
    v = trap.potential(q[1:-1])
    ab = _hamiltonian_band(v, h, order)
    w, vecs = _lowest_eigenpairs(ab, n_states, float(v.min()) - 1.0)

    phi = np.zeros((n_states, grid.n_points))
    phi[:, 1:-1] = vecs.T / math.sqrt(h)
    phi = _fix_sign(phi)

    gaps = np.diff(w)
    if gaps.size and gaps.min() < degeneracy_tol:
        raise DegenerateSpectrum(f"level gap {gaps.min():.3e} below {degeneracy_tol:g}")
    if trap.kind != "infinite_well":
        edge = np.max(np.abs(phi[:, [1, -2]]))
        if edge > boundary_tol:
            raise GridTooSmall(f"boundary amplitude {edge:.3e} exceeds {boundary_tol:g}; widen the grid")

    dphi = finite_difference(phi, h, order)
    parities = tuple((-1) ** n for n in range(n_states)) if trap.is_symmetric else None
    sol = OneBodySolution(trap, grid, _frozen(w), _frozen(phi), _frozen(dphi), parities, order)
    err = np.max(np.abs(sol.overlaps() - np.eye(n_states)))
    if err > tol_ortho:
        raise NonconvergedEigensolver(f"orthonormality defect {err:.3e} exceeds {tol_ortho:g}")
    return sol


def analytic_energy(trap: TrapSpec | str, n: int, width: float | None = None) -> float:
    """Closed-form level ``n`` for harmonic (``n + 1/2``) or box traps."""
    if n < 0:
        raise ConfigInvalid("state index must be non-negative")
    kind = trap if isinstance(trap, str) else trap.kind
    if kind == "harmonic":
        return n + 0.5
    if kind == "infinite_well":
        L = width if width is not None else (trap.width if isinstance(trap, TrapSpec) else None)
        if L is None or L <= 0:
            raise ConfigInvalid("infinite_well needs a positive width")
        return math.pi**2 / (2 * L**2) * (n + 1) ** 2
    raise UnsupportedKind(f"no closed-form spectrum for {kind!r}")


def parity_overlap(sol: OneBodySolution, n: int) -> float:
    """``∫ φ_n(q) φ_n(2·offset - q) dq`` by quadrature on the solution grid."""
    q = sol.q
    phi = sol.wavefunctions[n]
    mirrored = np.interp(2 * sol.trap.offset - q, q, phi, left=0.0, right=0.0)
    return float(np.sum(sol.weights * phi * mirrored))


def parity_of(sol: OneBodySolution, n: int) -> int:
    if sol.parities is None:
        raise AsymmetricTrap("parity is only defined for symmetric traps")
    expected = (-1) ** n
    ov = parity_overlap(sol, n)
    if abs(ov - expected) > 1e-3:
        raise NumericalError(f"state {n}: mirror overlap {ov:.6f} disagrees with parity {expected:+d}")
    return expected


def richardson_energies(
    trap: TrapSpec, grid: Grid, n_states: int, *, order: int = DEFAULT_ORDER, **kw
) -> np.ndarray:
    """Energies extrapolated from ``grid`` and the grid with half the spacing."""
    coarse = solve_one_body(trap, grid, n_states, order=order, **kw).energies
    fine = solve_one_body(trap, grid.refined(2), n_states, order=order, **kw).energies
    f = 2.0**order
    return (f * fine - coarse) / (f - 1.0)


def refinement_error(trap: TrapSpec, grid: Grid, n_states: int, *, factor: int = 4, **kw) -> float:
    """Largest energy change when the grid spacing is divided by ``factor``."""
    a = solve_one_body(trap, grid, n_states, **kw).energies
    b = solve_one_body(trap, grid.refined(factor), n_states, **kw).energies
    return float(np.max(np.abs(a - b)))


def spectrum(sol: OneBodySolution) -> Sequence[float]:
    return tuple(float(e) for e in sol.energies)
