"""Command-line driver.

Usage::

    trapsym <solve|classify|weak|ed|unitary|near-unitary> --config run.json \
        [--out DIR] [--format csv|json] [--cache DIR | --no-cache] [--as-printed]

Exit status: 0 on success, 2 for configuration errors, 3 for numerical
failures, 1 for I/O problems.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path
from typing import Any, Sequence

import jsonschema

from .cache import Cache, _atomic_write
from .composition import Composition
from .errors import ConfigError, ConfigInvalid, IoError, NumericalError, TrapSymError
from .onebody import DEFAULT_ORDER, Grid, OneBodySolution, TrapSpec
from .perturbation import EDConfig, SplitLevel, exact_diagonalize, first_order_levels
from .permsym import count_symmetrized_states
from .spectra import classification_row, classify_level, enumerate_compositions, partial_order_edges
from .twobody import InteractionSpec
from .unitary import near_unitary_split, tunneling_params, unitary_spectrum

SUBCOMMANDS = {
    "solve": "spectrum",
    "classify": "classify",
    "weak": "weak",
    "ed": "ed",
    "unitary": "unitary",
    "near-unitary": "near_unitary",
}
LEVEL_COLUMNS = ("base_energy", "shift", "total_energy", "degeneracy", "irrep", "parity", "provenance")

_NUM = {"type": "number"}
_TRAP = {
    "type": "object",
    "additionalProperties": False,
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["harmonic", "power_law", "polynomial", "infinite_well", "double_well", "custom_sampled"]},
        "z": _NUM,
        "coefficients": {"type": "array", "items": _NUM, "minItems": 1},
        "width": _NUM,
        "a": _NUM,
        "b": _NUM,
        "samples": {"type": "array", "items": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}},
        "offset": _NUM,
    },
}
CONFIG_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "trapsym run configuration",
    "type": "object",
    "additionalProperties": False,
    "required": ["version", "trap", "grid"],
    "properties": {
        "version": {"const": 1},
        "mode": {"enum": sorted(SUBCOMMANDS.values())},
        "trap": {"oneOf": [_TRAP, {"type": "array", "items": _TRAP, "minItems": 1, "maxItems": 2}]},
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "required": ["q_min", "q_max", "n_points"],
            "properties": {"q_min": _NUM, "q_max": _NUM, "n_points": {"type": "integer", "minimum": 64}},
        },
        "particles": {"type": "integer", "minimum": 1, "maximum": 3},
        "statistics": {"enum": ["distinguishable", "boson", "fermion"]},
        "spin_components": {"type": "integer", "minimum": 1},
        "interaction": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["contact", "gaussian", "sampled_kernel"]},
                "g": _NUM,
                "g_over_gap": _NUM,
                "strength": _NUM,
                "range": _NUM,
                "samples": {"type": "array", "items": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}},
            },
        },
        "cutoffs": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "e_max": _NUM,
                "n_states": {"type": "integer", "minimum": 1},
                "order": {"enum": [2, 4, 6, 8]},
            },
        },
        "composition": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1, "maxItems": 3},
        "sector": {
            "type": "object",
            "additionalProperties": False,
            "required": ["shape"],
            "properties": {
                "shape": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                "parity": {"enum": [1, -1, None]},
                "young_index": {"enum": [0, 1]},
            },
        },
        "as_printed": {"type": "boolean"},
    },
}


# ------------------------------------------------------------------ config


def load_config(path: str | os.PathLike) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigInvalid(f"cannot read config {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"config is not valid JSON: {exc}") from exc
    validate_config(doc)
    return doc


def validate_config(doc: dict) -> None:
    try:
        jsonschema.validate(doc, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigInvalid(f"config error at {where}: {exc.message}") from None


def _traps(cfg: dict) -> list[TrapSpec]:
    raw = cfg["trap"] if isinstance(cfg["trap"], list) else [cfg["trap"]]
    return [TrapSpec.from_dict(t) for t in raw]


def _require(cfg: dict, mode: str, *paths: str) -> None:
    for p in paths:
        node: Any = cfg
        for part in p.split("."):
            if not isinstance(node, dict) or part not in node:
                raise ConfigInvalid(f"mode {mode!r} needs {p!r} in the config")
            node = node[part]


def _e_max(cfg: dict) -> float:
    return float(cfg["cutoffs"]["e_max"])


def _interaction(cfg: dict, sol: OneBodySolution, N: int) -> InteractionSpec:
    raw = dict(cfg["interaction"])
    frac = raw.pop("g_over_gap", None)
    if frac is not None:
        if raw.get("kind") != "contact" or "g" in raw:
            raise ConfigInvalid("g_over_gap applies to a contact interaction without an explicit g")
        raw["g"] = frac * gap_scale(sol, N)
    return InteractionSpec.from_dict(raw)


def gap_scale(sol: OneBodySolution, N: int) -> float:
    """``E(0,1,..,N-1) - E(0^N)``: the spacing used to scale the coupling."""
    e = sol.energies
    return float(sum(e[:N]) - N * e[0])


# ------------------------------------------------------------------ output


def _fmt(x: Any) -> Any:
    if isinstance(x, float):
        return repr(x + 0.0)
    return x


def level_row(level: SplitLevel, **extra) -> dict:
    row = {
        "base_energy": level.base_energy,
        "shift": level.shift,
        "total_energy": level.total_energy,
        "degeneracy": level.degeneracy,
        "irrep": level.irrep_text(),
        "parity": level.parity_text(),
        "provenance": level.provenance,
        "composition": level.composition.text() if level.composition is not None else "",
    }
    row.update(extra)
    return row


def write_table(out_dir: Path, name: str, rows: list[dict], fmt: str, edges: list | None = None) -> list[Path]:
    """Write ``rows`` (and an optional edge list) as CSV or a JSON document."""
    if not rows:
        raise ConfigInvalid(f"nothing to write for {name}: the selection is empty")
    if fmt == "json":
        doc: dict = {"rows": [{k: (v + 0.0 if isinstance(v, float) else v) for k, v in r.items()} for r in rows]}
        if edges is not None:
            doc["edges"] = [list(e) for e in edges]
        path = out_dir / f"{name}.json"
        text = json.dumps(doc, ensure_ascii=False, indent=1) + "\n"
        _atomic_write(path, lambda fh: fh.write(text.encode("utf-8")))
        return [path]
    path = out_dir / f"{name}.csv"
    _atomic_write(path, lambda fh: fh.write(_csv_text(rows).encode("utf-8")))
    written = [path]
    if edges is not None:
        epath = out_dir / f"{name}_edges.csv"
        erows = [{"lower": a, "upper": b} for a, b in edges]
        text = _csv_text(erows) if erows else "lower,upper\r\n"
        _atomic_write(epath, lambda fh: fh.write(text.encode("utf-8")))
        written.append(epath)
    return written


def _csv_text(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\r\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: _fmt(v) for k, v in r.items()})
    return buf.getvalue()


# ------------------------------------------------------------------- modes


def _solve(cfg: dict, cache: Cache, trap: TrapSpec) -> OneBodySolution:
    g = cfg["grid"]
    grid = Grid(float(g["q_min"]), float(g["q_max"]), int(g["n_points"]))
    cut = cfg.get("cutoffs", {})
    n_states = int(cut.get("n_states", min(40, grid.n_points // 4)))
    return cache.solution(trap, grid, n_states, int(cut.get("order", DEFAULT_ORDER)))


def _compositions(cfg: dict, sol: OneBodySolution, N: int) -> list[Composition]:
    return enumerate_compositions(sol.energies, N, _e_max(cfg))


def run_spectrum(cfg, cache, out, fmt):
    trap = _traps(cfg)[0]
    sol = _solve(cfg, cache, trap)
    rows = [
        {"n": n, "energy": float(e), "parity": "" if sol.parities is None else ("+" if sol.parities[n] > 0 else "-")}
        for n, e in enumerate(sol.energies)
    ]
    files = write_table(out, "onebody", rows, fmt)
    N = int(cfg.get("particles", 1))
    if N >= 2 and "e_max" in cfg.get("cutoffs", {}):
        stats = cfg.get("statistics", "distinguishable")
        J = int(cfg.get("spin_components", 1))
        comps = _compositions(cfg, sol, N)
        crow = [
            {
                "index": i,
                "labels": c.text(),
                "energy": c.energy,
                "degeneracy": c.degeneracy,
                "population": count_symmetrized_states(c, stats, J),
            }
            for i, c in enumerate(comps)
        ]
        files += write_table(out, "spectrum", crow, fmt, partial_order_edges(comps))
    return files


def run_classify(cfg, cache, out, fmt, as_printed=False):
    _require(cfg, "classify", "cutoffs.e_max")
    trap = _traps(cfg)[0]
    sol = _solve(cfg, cache, trap)
    N = int(cfg.get("particles", 3))
    symmetric = sol.parities is not None
    rows = []
    for c in _compositions(cfg, sol, N):
        pars = [sol.parities[x] for x in c.distinct] if symmetric else None
        cl = classify_level(c, pars, "symmetric" if symmetric else "asymmetric", literal=as_printed)
        row = classification_row(cl)
        row["energy"] = float(f"{row['energy']:.10g}")
        rows.append(row)
    return write_table(out, "classify", rows, fmt)


def run_weak(cfg, cache, out, fmt):
    _require(cfg, "weak", "interaction", "cutoffs.e_max")
    N = int(cfg.get("particles", 3))
    rows = []
    for panel, trap in enumerate(_traps(cfg)):
        sol = _solve(cfg, cache, trap)
        spec = _interaction(cfg, sol, N)
        comps = _compositions(cfg, sol, N)
        labels = sorted({x for c in comps for x in c.labels})
        table = cache.table(sol, spec, labels)
        scale = gap_scale(sol, N)
        for lvl in first_order_levels(comps, table, sol.parities):
            rows.append(
                level_row(lvl, panel=panel, trap=trap.kind, g=spec.g, gap=scale, scaled_energy=lvl.total_energy / scale)
            )
    return write_table(out, "levels", rows, fmt)


def run_ed(cfg, cache, out, fmt):
    _require(cfg, "ed", "interaction", "cutoffs.e_max")
    N = int(cfg.get("particles", 3))
    if N not in (2, 3):
        raise ConfigInvalid("ed needs particles = 2 or 3")
    trap = _traps(cfg)[0]
    sol = _solve(cfg, cache, trap)
    spec = _interaction(cfg, sol, N)
    sector = None
    young = 0
    if "sector" in cfg:
        sec = cfg["sector"]
        sector = (tuple(sec["shape"]), sec.get("parity"))
        young = int(sec.get("young_index", 0))
    levels = exact_diagonalize(sol, N, EDConfig(_e_max(cfg), spec, sector, young))
    return write_table(out, "levels", [level_row(l, g=spec.g) for l in levels], fmt)


def run_unitary(cfg, cache, out, fmt):
    _require(cfg, "unitary", "cutoffs.e_max")
    N = int(cfg.get("particles", 3))
    sol = _solve(cfg, cache, _traps(cfg)[0])
    comps = unitary_spectrum(sol.energies, N, _e_max(cfg))
    rows = [
        {"index": i, "labels": c.text(), "energy": c.energy, "degeneracy": c.degeneracy}
        for i, c in enumerate(comps)
    ]
    return write_table(out, "unitary", rows, fmt, partial_order_edges(comps))


def run_near_unitary(cfg, cache, out, fmt):
    N = int(cfg.get("particles", 3))
    sol = _solve(cfg, cache, _traps(cfg)[0])
    if "composition" in cfg:
        labels = cfg["composition"]
        if len(labels) != N:
            raise ConfigInvalid("composition length must equal particles")
        comps = [Composition.of(labels, sol.energies)]
    else:
        _require(cfg, "near_unitary", "cutoffs.e_max")
        comps = unitary_spectrum(sol.energies, N, _e_max(cfg))
    g = float(cfg.get("interaction", {}).get("g", 1.0))
    symmetric = sol.parities is not None
    rows = []
    for comp in comps:
        params = tunneling_params(sol, comp, g)
        for lvl in near_unitary_split(params, symmetric, sol.parities):
            rows.append(
                level_row(
                    lvl,
                    g=g,
                    gt=params.gt,
                    gu=params.gu if params.gu is not None else "",
                    shift_in_t=lvl.shift / params.t,
                )
            )
    return write_table(out, "levels", rows, fmt)


RUNNERS = {
    "spectrum": run_spectrum,
    "classify": run_classify,
    "weak": run_weak,
    "ed": run_ed,
    "unitary": run_unitary,
    "near_unitary": run_near_unitary,
}


def run(cfg: dict, mode: str, out: Path, fmt: str = "csv", cache: Cache | None = None, as_printed: bool = False):
    """Validate ``cfg``, run one mode and return the written paths."""
    validate_config(cfg)
    if cfg.get("mode", mode) != mode:
        raise ConfigInvalid(f"config mode {cfg['mode']!r} does not match subcommand mode {mode!r}")
    cache = cache or Cache(None)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create output directory {out}: {exc}") from exc
    if mode == "classify":
        return run_classify(cfg, cache, out, fmt, as_printed)
    return RUNNERS[mode](cfg, cache, out, fmt)


def _default_cache() -> Path:
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "trapsym"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trapsym", description="Symmetry-resolved spectra of few trapped particles.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        grp = p.add_mutually_exclusive_group()
        grp.add_argument("--cache", default=None, help="cache directory")
        grp.add_argument("--no-cache", action="store_true")
        if name == "classify":
            p.add_argument("--as-printed", action="store_true", help="reproduce two misprinted table cells verbatim")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cache = Cache(None if args.no_cache else (args.cache or _default_cache()))
    try:
        cfg = load_config(args.config)
        paths = run(cfg, SUBCOMMANDS[args.command], Path(args.out), args.format, cache, getattr(args, "as_printed", False))
    except ConfigError as exc:
        print(f"trapsym: configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"trapsym: numerical failure: {exc}", file=sys.stderr)
        return 3
    except (IoError, TrapSymError) as exc:
        print(f"trapsym: {exc}", file=sys.stderr)
        return 1
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
