"""Content-addressed on-disk cache for one-body solutions and element tables.

Keys are SHA-256 digests of a canonical JSON description of the inputs.
Solutions are stored as ``<key>.npz``; tables as ``<key>.json``. Files are
written to a temporary name in the same directory and renamed into place, so
a reader never sees a partial file.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import IoError
from .onebody import Grid, OneBodySolution, TrapSpec, solve_one_body
from .twobody import InteractionSpec, TwoBodyTable, interaction_elements

FORMAT_VERSION = 1


def content_key(payload: dict) -> str:
    text = json.dumps({"v": FORMAT_VERSION, **payload}, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def solution_key(trap: TrapSpec, grid: Grid, n_states: int, order: int) -> str:
    return content_key({"trap": trap.to_dict(), "grid": grid.to_dict(), "n_states": n_states, "order": order})


def table_key(sol_key: str, spec: InteractionSpec, states) -> str:
    return content_key({"solution": sol_key, "interaction": spec.to_dict(), "states": sorted(int(s) for s in states)})


def _atomic_write(path: Path, write) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=path.suffix)
    try:
        with os.fdopen(fd, "wb") as fh:
            write(fh)
        os.replace(tmp, path)
    except OSError as exc:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise IoError(f"cannot write cache file {path}: {exc}") from exc


class Cache:
    """Cache rooted at ``root``; ``root=None`` disables it."""

    def __init__(self, root: str | os.PathLike | None):
        self.root = Path(root) if root is not None else None
        self.hits = 0
        self.misses = 0

    def _path(self, key: str, suffix: str) -> Path | None:
        return None if self.root is None else self.root / f"{key}{suffix}"

    def solution(self, trap: TrapSpec, grid: Grid, n_states: int, order: int) -> OneBodySolution:
        key = solution_key(trap, grid, n_states, order)
        path = self._path(key, ".npz")
        if path is not None and path.exists():
            self.hits += 1
            return _load_solution(path, trap, grid, order)
        self.misses += 1
        sol = solve_one_body(trap, grid, n_states, order=order)
        if path is not None:
            _atomic_write(path, lambda fh: _save_solution(fh, sol))
        return sol

    def table(self, sol: OneBodySolution, spec: InteractionSpec, states) -> TwoBodyTable:
        skey = solution_key(sol.trap, sol.grid, sol.n_states, sol.order)
        key = table_key(skey, spec, states)
        path = self._path(key, ".json")
        if path is not None and path.exists():
            self.hits += 1
            return TwoBodyTable.from_json(path.read_text(encoding="utf-8"))
        self.misses += 1
        table = interaction_elements(sol, spec, states)
        if path is not None:
            _atomic_write(path, lambda fh: fh.write(table.to_json().encode()))
        return table


def _save_solution(fh, sol: OneBodySolution) -> None:
    parities = np.array(sol.parities if sol.parities is not None else [], dtype=int)
    np.savez(
        fh,
        energies=sol.energies,
        wavefunctions=sol.wavefunctions,
        derivatives=sol.derivatives,
        parities=parities,
        symmetric=np.array(sol.parities is not None),
        grid=np.array([sol.grid.q_min, sol.grid.q_max, sol.grid.n_points], dtype=float),
    )


def _load_solution(path: Path, trap: TrapSpec, grid: Grid, order: int) -> OneBodySolution:
    try:
        with np.load(path) as data:
            g = data["grid"]
            solved_grid = Grid(float(g[0]), float(g[1]), int(g[2]))
            parities = tuple(int(p) for p in data["parities"]) if bool(data["symmetric"]) else None
            arrays = [np.array(data[k]) for k in ("energies", "wavefunctions", "derivatives")]
    except (OSError, KeyError, ValueError) as exc:
        raise IoError(f"unreadable cache file {path}: {exc}") from exc
    for a in arrays:
        a.flags.writeable = False
    return OneBodySolution(trap, solved_grid, *arrays, parities, order, {"cached": True})
