"""Declarative parameter sweeps, figure presets, config files and CSV output."""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace
from typing import Iterable, Mapping

import numpy as np

from . import bound, scattering
from .potentials import Family, PotentialSpec, decompose
from .transfer import oracle_amplitudes, oracle_real_bound_states

PARAMETERS = ("lam", "v0", "k", "a")
BOUND_OUTPUTS = ("beta",)
SCATTER_OUTPUTS = ("tL", "tR", "rL", "rR", "abs_t2", "abs_rL2", "abs_rR2", "dev_L", "dev_R",
                   "pseudo_defect")
OUTPUTS = BOUND_OUTPUTS + SCATTER_OUTPUTS
COMPLEX_OUTPUTS = ("tL", "tR", "rL", "rR")


class SweepSpecError(ValueError):
    """Invalid sweep description (CLI exit code 2)."""


def worker_count() -> int:
    cap = os.environ.get("PSEUDOWELL_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise SweepSpecError(f"PSEUDOWELL_THREADS must be an integer, got {cap!r}") from None
    return n


@dataclass(frozen=True)
class SweepSpec:
    """One swept parameter over a grid; the others are held fixed.

    The swept parameter must be left unset. ``linear=False`` gives a geometric grid.
    """

    family: Family
    swept: str
    start: float
    stop: float
    count: int
    outputs: tuple[str, ...]
    v0: float | None = None
    a: float | None = None
    lam: float | None = None
    k: float | None = None
    linear: bool = True
    oracle: bool = False
    variant: str = "resolved"

    def __post_init__(self):
        try:
            object.__setattr__(self, "family", Family.parse(self.family))
        except ValueError as exc:
            raise SweepSpecError(str(exc)) from None
        if isinstance(self.outputs, str):
            object.__setattr__(self, "outputs", tuple(o.strip() for o in self.outputs.split(",") if o.strip()))
        self.validate()

    def validate(self):
        if self.swept not in PARAMETERS:
            raise SweepSpecError(f"swept must be one of {', '.join(PARAMETERS)}, got {self.swept!r}")
        if getattr(self, self.swept) is not None:
            raise SweepSpecError(f"{self.swept} is swept and must not also be fixed")
        if self.count < 2:
            raise SweepSpecError("count must be at least 2")
        if not self.start < self.stop:
            raise SweepSpecError("grid needs start < stop")
        if not self.linear and self.start <= 0:
            raise SweepSpecError("a geometric grid needs start > 0")
        if not self.outputs:
            raise SweepSpecError("no outputs requested")
        unknown = [o for o in self.outputs if o not in OUTPUTS]
        if unknown:
            raise SweepSpecError(f"unknown outputs {unknown}; choose from {', '.join(OUTPUTS)}")
        if self.variant not in ("resolved", "printed"):
            raise SweepSpecError(f"variant must be resolved or printed, got {self.variant!r}")
        needed = {"v0", "a", "lam"} - {self.swept}
        if any(o in SCATTER_OUTPUTS for o in self.outputs) and self.swept != "k":
            needed.add("k")
        missing = sorted(p for p in needed if getattr(self, p) is None)
        if missing:
            raise SweepSpecError(f"missing fixed parameters: {', '.join(missing)}")
        if self.swept == "k" and self.start <= 0:
            raise SweepSpecError("k grid must stay above 0")

    def grid(self) -> np.ndarray:
        if self.linear:
            return np.linspace(self.start, self.stop, self.count)
        return np.geomspace(self.start, self.stop, self.count)

    def spec_at(self, value: float) -> PotentialSpec:
        """Potential at one grid value (ignored when sweeping ``k``)."""
        params = {p: getattr(self, p) for p in ("v0", "a", "lam")}
        if self.swept in params:
            params[self.swept] = value
        return PotentialSpec(self.family, **params)

    def header(self) -> list[str]:
        cols = [self.swept]
        for o in self.outputs:
            cols += [f"{o}_re", f"{o}_im"] if o in COMPLEX_OUTPUTS else [o]
        return cols


@dataclass
class SweepTable:
    header: list[str]
    rows: list[tuple]

    def column(self, name):
        i = self.header.index(name)
        return [row[i] for row in self.rows]


def _least_bound(spec: PotentialSpec, oracle: bool, variant: str):
    if oracle:
        eps, beta_max = bound.search_window(spec)
        roots = oracle_real_bound_states(decompose(spec), beta_max, beta_min=eps, n=bound.GRID_POINTS)
        return roots[0] if roots else None
    return bound.least_bound_beta(spec, variant=variant)


def _scatter_columns(spec: PotentialSpec, k, outputs, oracle: bool, variant: str):
    data = (oracle_amplitudes(decompose(spec), k) if oracle
            else scattering.amplitudes(spec, k, variant))
    k = np.atleast_1d(k)
    cols = {}
    for o in outputs:
        if o in COMPLEX_OUTPUTS:
            cols[o] = np.broadcast_to(getattr(data, o), k.shape)
        elif o == "abs_t2":
            cols[o] = np.abs(data.tR) ** 2
        elif o == "abs_rL2":
            cols[o] = np.abs(data.rL) ** 2
        elif o == "abs_rR2":
            cols[o] = np.abs(data.rR) ** 2
        elif o == "dev_L":
            cols[o] = scattering.unitarity_deviation(data, "L")
        elif o == "dev_R":
            cols[o] = scattering.unitarity_deviation(data, "R")
        elif o == "pseudo_defect":
            S = scattering.s_matrix(data)
            cols[o] = np.array([scattering.pseudo_unitarity_defect(m) for m in S.reshape(-1, 2, 2)])
    return {o: np.broadcast_to(v, k.shape) for o, v in cols.items()}


def run_sweep(spec: SweepSpec, workers: int | None = None) -> SweepTable:
    """Evaluate the requested outputs at every grid point, rows in grid order.

    Bound-state outputs are empty (``None``) where no real bound state exists.
    """
    grid = spec.grid()
    workers = worker_count() if workers is None else workers
    bound_outs = [o for o in spec.outputs if o in BOUND_OUTPUTS]
    scatter_outs = [o for o in spec.outputs if o in SCATTER_OUTPUTS]

    point_spec = spec.spec_at
    betas = [None] * len(grid)
    if bound_outs:
        if spec.swept == "k":
            # bound states do not depend on k
            betas = [_least_bound(point_spec(grid[0]), spec.oracle, spec.variant)] * len(grid)
        else:
            def one(value):
                return _least_bound(point_spec(value), spec.oracle, spec.variant)
            if workers > 1:
                with ThreadPoolExecutor(max_workers=workers) as pool:
                    betas = list(pool.map(one, grid))
            else:
                betas = [one(v) for v in grid]

    scatter = {}
    if scatter_outs:
        if spec.swept == "k":
            scatter = _scatter_columns(point_spec(0.0), grid, scatter_outs, spec.oracle, spec.variant)
        else:
            per_point = [_scatter_columns(point_spec(v), np.array([spec.k]), scatter_outs,
                                          spec.oracle, spec.variant) for v in grid]
            scatter = {o: np.concatenate([p[o] for p in per_point]) for o in scatter_outs}

    rows = []
    for i, value in enumerate(grid):
        row = [float(value)]
        for o in spec.outputs:
            if o == "beta":
                row.append(None if betas[i] is None else float(betas[i]))
            elif o in COMPLEX_OUTPUTS:
                z = complex(scatter[o][i])
                row += [z.real, z.imag]
            else:
                row.append(float(scatter[o][i]))
        rows.append(tuple(row))
    return SweepTable(spec.header(), rows)


# -- CSV and config ------------------------------------------------------------

def format_cell(value) -> str:
    return "" if value is None else repr(float(value))


def write_csv(table: SweepTable, stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(table.header)
    for row in table.rows:
        writer.writerow([format_cell(v) for v in row])


def to_csv(table: SweepTable) -> str:
    buf = io.StringIO()
    write_csv(table, buf)
    return buf.getvalue()


def read_csv(text: str) -> SweepTable:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    rows = [tuple(None if cell == "" else float(cell) for cell in row) for row in reader]
    return SweepTable(header, rows)


_FIELD_TYPES = {"start": float, "stop": float, "count": int, "v0": float, "a": float,
                "lam": float, "k": float}


def _parse_bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise SweepSpecError(f"not a boolean: {text!r}")


def parse_config(text: str) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment; blank lines ignored."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise SweepSpecError(f"line {lineno}: expected 'key = value'")
        key = key.strip()
        if key in out:
            raise SweepSpecError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value.strip()
    return out


def sweep_from_mapping(mapping: Mapping[str, object]) -> SweepSpec:
    known = {f.name for f in fields(SweepSpec)}
    unknown = set(mapping) - known
    if unknown:
        raise SweepSpecError(f"unknown keys: {', '.join(sorted(unknown))}")
    kwargs = {}
    for key, value in mapping.items():
        if value is None:
            continue
        try:
            if key in _FIELD_TYPES and isinstance(value, str):
                value = _FIELD_TYPES[key](value)
            elif key in ("linear", "oracle") and isinstance(value, str):
                value = _parse_bool(value)
        except ValueError as exc:
            raise SweepSpecError(f"bad value for {key}: {value!r}") from exc
        kwargs[key] = value
    missing = [k for k in ("family", "swept", "start", "stop", "count", "outputs") if k not in kwargs]
    if missing:
        raise SweepSpecError(f"missing keys: {', '.join(missing)}")
    return SweepSpec(**kwargs)


# -- figure presets --------------------------------------------------------------

@dataclass(frozen=True)
class FigurePreset:
    name: str
    sweep: SweepSpec
    description: str


def _presets() -> dict[str, FigurePreset]:
    # binding presets use v0 = a = 1; the k ranges and the Model II scattering
    # parameters are declared defaults, wide enough for the high-k limit
    fig1_scatter = dict(family=Family.MODEL_I, v0=100.0, a=10.0, lam=5.0, swept="k",
                        start=0.005, stop=100.0, count=4000)
    fig2_scatter = dict(family=Family.MODEL_II, v0=1.0, a=1.0, lam=0.5, swept="k",
                        start=0.05, stop=20.0, count=400)
    table = [
        ("fig1a", dict(family=Family.MODEL_I, v0=1.0, a=1.0, swept="lam", start=0.0, stop=1.5,
                       count=400, outputs=("beta",)), "Model I binding vs imaginary strength"),
        ("fig1b", dict(fig1_scatter, outputs=("abs_t2",)), "Model I transmission coefficient"),
        ("fig1c", dict(fig1_scatter, outputs=("abs_rL2", "abs_rR2")), "Model I reflection coefficients"),
        ("fig1d", dict(fig1_scatter, outputs=("dev_L", "dev_R")), "Model I deviation from unitarity"),
        ("fig2a", dict(family=Family.MODEL_II, v0=1.0, a=1.0, swept="lam", start=0.0, stop=2.0,
                       count=400, outputs=("beta",)), "Model II binding vs imaginary strength"),
        ("fig2b", dict(fig2_scatter, outputs=("abs_t2",)), "Model II transmission coefficient"),
        ("fig2c", dict(fig2_scatter, outputs=("abs_rL2", "abs_rR2")), "Model II reflection coefficients"),
        ("fig2d", dict(fig2_scatter, outputs=("dev_L", "dev_R")), "Model II deviation from unitarity"),
    ]
    return {name: FigurePreset(name, SweepSpec(**kw), desc) for name, kw, desc in table}


PRESETS = _presets()


def figure_table(name: str, oracle: bool = False, workers: int | None = None) -> SweepTable:
    if name not in PRESETS:
        raise SweepSpecError(f"unknown figure preset {name!r}; choose from {', '.join(PRESETS)}")
    spec = PRESETS[name].sweep
    if oracle:
        spec = replace(spec, oracle=True)
    return run_sweep(spec, workers=workers)


def emit_figure(name: str, output_path=None, oracle: bool = False) -> str:
    """Write the preset's CSV to ``output_path`` (if given) and return the text."""
    text = to_csv(figure_table(name, oracle=oracle))
    if output_path is not None:
        with open(output_path, "w", newline="") as fh:
            fh.write(text)
    return text


def preset_names() -> Iterable[str]:
    return PRESETS.keys()
