"""Batch experiments: configuration, presets, runs, reference output and comparison.

Every run writes plain CSV files (one header line, ``%.17g`` numbers) plus a
JSON sidecar holding the configuration echo, the schema version and a SHA-256
hash of each CSV. Files are written to a temporary name and renamed, so a
reader never sees a partial file.

Snapshot CSV columns: ``x, u_0..u_M, E, Var, lambda_1..lambda_{M+1}, U, F``.
Time-series CSV columns: ``step, t, entropy, mass_0..mass_M, drift_0..drift_M``
where ``drift`` is the mass change not accounted for by the boundary fluxes.
Audit CSV columns: ``location, speed, residual, scaled_residual,
entropy_residual, entropy_admissible``.
"""

from __future__ import annotations

import dataclasses
import enum
import hashlib
import json
import math
import os
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from sgburgers.comparison import (
    FDDissipation,
    FDSolver,
    fv_face_fluxes,
    fv_rhs,
    rankine_hugoniot_audit,
)
from sgburgers.cpr import (
    InflowDirichlet,
    Mesh1D,
    Outflow,
    Periodic,
    apply_filter,
    semidiscrete_rhs,
)
from sgburgers.fluxes import ec_flux, llf_es_flux
from sgburgers.galerkin import eigenvalues, entropy, entropy_flux, moment_profiles
from sgburgers.pc_basis import OrthogonalFamily, build_tensor
from sgburgers.reference import (
    BumpSetup,
    RiemannKind,
    RiemannSetup,
    bump_initial,
    family_coefficient,
    family_moments,
    initial_coefficients,
    integral_phi,
    integral_xi_phi,
    nodal_initial_field,
    reference_moments,
)
from sgburgers.sbp import exponential_filter, lobatto_operators
from sgburgers.timestepping import Scheme, Stepper, integrate

SCHEMA_VERSION = 1
OUTPUT_ENV = "SGBURGERS_OUTPUT"


class Case(enum.Enum):
    BUMP = "bump"
    RAREFACTION = "rarefaction"
    SHOCK = "shock"


class SolverKind(enum.Enum):
    CPR = "cpr"
    FV = "fv"
    FD = "fd"


class FluxChoice(enum.Enum):
    EC = "ec"
    LLF_ES = "llf_es"


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


@dataclass(frozen=True)
class ExperimentConfig:
    case: Case
    solver: SolverKind
    N: int
    steps: int
    t_end: float
    M: int = 3
    p: int = 3
    flux: FluxChoice = FluxChoice.LLF_ES
    omega: float = 1.0
    filter_order: int = 0
    filter_strength: float = 100.0
    fd_dissipation: FDDissipation = FDDissipation.SECOND_AND_FOURTH
    fd_order: int = 4
    c2: float = 0.5
    c4: float = 0.1
    scheme: Optional[Scheme] = None
    a: float = 1.0
    b: float = 0.2
    x0: float = 0.5
    r: float = 0.25
    epsilon: float = math.e / 100.0
    snapshot_every: int = 0
    name: str = "run"

    def __post_init__(self):
        enums = {
            "case": Case,
            "solver": SolverKind,
            "flux": FluxChoice,
            "fd_dissipation": FDDissipation,
        }
        for key, kind in enums.items():
            value = getattr(self, key)
            try:
                object.__setattr__(self, key, kind(value))
            except ValueError:
                allowed = ", ".join(m.value for m in kind)
                raise ConfigError(f"field '{key}': {value!r} is not one of {allowed}") from None
        if self.scheme is not None:
            try:
                object.__setattr__(self, "scheme", Scheme(self.scheme))
            except ValueError:
                raise ConfigError(f"field 'scheme': unknown scheme {self.scheme!r}") from None
        self._validate()

    def _validate(self):
        def need(ok, key, message):
            if not ok:
                raise ConfigError(f"field '{key}': {message}")

        for key in ("N", "steps"):
            need(int(getattr(self, key)) == getattr(self, key) and getattr(self, key) > 0, key, "must be a positive integer")
        need(self.t_end > 0, "t_end", "must be positive")
        need(self.M >= 1, "M", "PC order must be at least 1")
        need(self.snapshot_every >= 0, "snapshot_every", "must be nonnegative")
        if self.solver is SolverKind.CPR:
            need(1 <= self.p <= 20, "p", "polynomial degree must lie in [1, 20]")
        if self.solver is SolverKind.FV:
            need(0 < self.omega <= 1, "omega", "dissipation weight must lie in (0, 1]")
        if self.solver is SolverKind.FD:
            need(self.N >= 8, "N", "FD grid needs N >= 8 intervals")
            need(self.fd_order in (2, 4), "fd_order", "interior order must be 2 or 4")
            need(self.c2 >= 0 and self.c4 >= 0, "c2", "dissipation coefficients must be nonnegative")
        need(self.filter_order >= 0, "filter_order", "must be nonnegative (0 disables the filter)")
        need(self.filter_order == 0 or self.solver is SolverKind.CPR, "filter_order", "filtering applies to CPR only")
        need(self.a > 0, "a", "must be positive")
        need(self.b > 0, "b", "must be positive")
        need(0 <= self.x0 <= 1, "x0", "must lie in [0, 1]")
        if self.case is Case.BUMP:
            need(self.r > 0, "r", "bump radius must be positive")

    @property
    def dt(self) -> float:
        return self.t_end / self.steps

    @property
    def time_scheme(self) -> Scheme:
        if self.scheme is not None:
            return self.scheme
        return Scheme.RK4 if self.solver is SolverKind.FD else Scheme.SSPRK33

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        out = {}
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            out[f.name] = value.value if isinstance(value, enum.Enum) else value
        out["dt"] = self.dt
        out["time_scheme"] = self.time_scheme.value
        return out

    @classmethod
    def from_mapping(cls, mapping: dict, base: Optional["ExperimentConfig"] = None) -> "ExperimentConfig":
        """Build from string values (config file or ``--override``), optionally over *base*."""
        types = {f.name: f.type for f in dataclasses.fields(cls)}
        values = base.to_dict() if base is not None else {}
        values.pop("dt", None)
        values.pop("time_scheme", None)
        for key, raw in mapping.items():
            if key not in types:
                raise ConfigError(f"field '{key}': unknown configuration key")
            values[key] = _coerce(key, types[key], raw)
        missing = [k for k in ("case", "solver", "N", "steps", "t_end") if k not in values]
        if missing:
            raise ConfigError(f"field '{missing[0]}': required")
        return cls(**values)


def _coerce(key: str, annotation: str, raw):
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    try:
        if annotation == "int":
            return int(float(text)) if float(text).is_integer() else int(text)
        if annotation == "float":
            return float(text)
    except ValueError:
        raise ConfigError(f"field '{key}': cannot parse {raw!r} as {annotation}") from None
    if annotation.startswith("Optional") and text.lower() in ("", "none"):
        return None
    return text


def parse_config_text(text: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for number, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {number}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def load_config(path) -> ExperimentConfig:
    return ExperimentConfig.from_mapping(parse_config_text(Path(path).read_text()))


# Presets, desk-scaled from the full-resolution figures. Paper step counts
# fix dt = t_end / steps; the scaled variants keep the CFL number comparable.

_SHOCK_CPR = dict(case="shock", solver="cpr", M=3, p=3)
_SHOCK_FV = dict(case="shock", solver="fv", M=3)
_SHOCK_FD = dict(case="shock", solver="fd", M=3)

PRESETS: dict[str, list[dict]] = {
    # bump, t = 10, 10 000 steps in the paper and here
    "fig1": [
        dict(case="bump", solver="cpr", M=3, p=9, N=10, steps=10000, t_end=10.0, x0=0.25, name="cpr"),
        dict(case="bump", solver="fv", M=3, N=1000, steps=10000, t_end=10.0, x0=0.25, name="fv"),
    ],
    # rarefaction, t = 0.25, 1 000 steps, 80 degrees of freedom each (unscaled)
    "fig2": [
        dict(case="rarefaction", solver="cpr", M=3, p=7, N=10, steps=1000, t_end=0.25, name="cpr"),
        dict(case="rarefaction", solver="fv", M=3, N=80, steps=1000, t_end=0.25, name="fv"),
    ],
    # shock, t = 0.5; paper N = 2500 / 10 000 with 100 000 steps, here 1/10
    "fig3": [
        dict(_SHOCK_CPR, N=250, steps=10000, t_end=0.5, name="cpr"),
        dict(_SHOCK_FV, N=1000, steps=10000, t_end=0.5, name="fv"),
    ],
    "fig4-cpr-low": [dict(_SHOCK_CPR, N=100, steps=2500, t_end=0.5, name="cpr-low")],
    "fig4-cpr-high": [
        dict(_SHOCK_CPR, N=100, steps=2500, t_end=0.5, filter_order=1, filter_strength=100.0, name="cpr-high")
    ],
    "fig4-fv-low": [dict(_SHOCK_FV, N=400, steps=1000, t_end=0.5, omega=5e-3, name="fv-low")],
    "fig4-fv-high": [dict(_SHOCK_FV, N=400, steps=1000, t_end=0.5, omega=1.0, name="fv-high")],
    "fig4-fd-low": [dict(_SHOCK_FD, N=400, steps=2000, t_end=0.5, fd_dissipation="fourth_only", name="fd-low")],
    "fig4-fd-high": [
        dict(_SHOCK_FD, N=400, steps=2000, t_end=0.5, fd_dissipation="second_and_fourth", name="fd-high")
    ],
    "fig5": [
        dict(_SHOCK_FV, N=1000, steps=10000, t_end=0.5, omega=1.0, name="fv-omega1"),
        dict(_SHOCK_FV, N=1000, steps=10000, t_end=0.5, omega=5e-3, name="fv-omega5e-3"),
    ],
    "fig6": [
        dict(_SHOCK_FD, N=1000, steps=5000, t_end=0.5, fd_dissipation="second_and_fourth", name="fd-both"),
        dict(_SHOCK_FD, N=1000, steps=5000, t_end=0.5, fd_dissipation="fourth_only", name="fd-fourth"),
    ],
}


def preset_configs(name: str, overrides: Optional[dict] = None) -> list[ExperimentConfig]:
    try:
        entries = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}") from None
    configs = []
    for entry in entries:
        config = ExperimentConfig(**entry)
        if overrides:
            config = ExperimentConfig.from_mapping(overrides, base=config)
        configs.append(config)
    return configs


# Discretizations


@dataclass
class Discretization:
    """Solver-independent view of one run.

    ``state`` is the evolved array; ``samples`` maps it to mode vectors at the
    points ``x`` with quadrature weights ``weights``; ``boundary_flux`` returns
    ``f(x_lo) - f(x_hi)``, the net mass inflow per mode.
    """

    x: np.ndarray
    weights: np.ndarray
    initial: np.ndarray
    rhs: Callable[[np.ndarray], np.ndarray]
    samples: Callable[[np.ndarray], np.ndarray]
    boundary_flux: Callable[[np.ndarray], np.ndarray]
    post_step: Optional[Callable[[np.ndarray], np.ndarray]] = None


def boundary_condition(config: ExperimentConfig):
    if config.case is Case.BUMP:
        return Periodic()
    if config.case is Case.RAREFACTION:
        return Outflow()
    left, right = riemann_setup(config).states(config.M)
    return InflowDirichlet(left, right)


def riemann_setup(config: ExperimentConfig) -> RiemannSetup:
    return RiemannSetup(config.a, config.b, config.x0, RiemannKind(config.case.value))


def bump_setup(config: ExperimentConfig) -> BumpSetup:
    return BumpSetup(config.x0, config.r, config.epsilon, config.b)


def _initial_values(config: ExperimentConfig, coords: np.ndarray, nodal: bool) -> np.ndarray:
    if config.case is Case.BUMP:
        return bump_initial(coords, bump_setup(config), config.M)
    if nodal:
        return nodal_initial_field(config.case.value, coords, riemann_setup(config), config.M)
    return initial_coefficients(config.case.value, coords, riemann_setup(config), config.M)


def _boundary_pair(bc, first: np.ndarray, last: np.ndarray):
    """States on either side of the two domain ends."""
    if isinstance(bc, Periodic):
        return None
    if isinstance(bc, InflowDirichlet):
        return (bc.left_state, first), (last, bc.right_state)
    return (first, first), (last, last)


def build_discretization(config: ExperimentConfig) -> Discretization:
    tensor = build_tensor(config.M)
    bc = boundary_condition(config)
    flux_fn = llf_es_flux if config.flux is FluxChoice.LLF_ES else ec_flux
    periodic = isinstance(bc, Periodic)
    zero = np.zeros(tensor.size)

    def net_boundary(first, last):
        if periodic:
            return zero
        (l0, r0), (l1, r1) = _boundary_pair(bc, first, last)
        f = flux_fn(np.stack([l0, l1]), np.stack([r0, r1]), tensor)
        return f[0] - f[1]

    if config.solver is SolverKind.CPR:
        ops = lobatto_operators(config.p)
        mesh = Mesh1D(0.0, 1.0, config.N)
        coords = mesh.node_coordinates(ops)
        u0 = _initial_values(config, coords, nodal=True)
        post = None
        if config.filter_order > 0:
            filt = exponential_filter(config.p, config.filter_order, config.filter_strength)
            post = lambda u: apply_filter(u, filt)  # noqa: E731
        return Discretization(
            x=coords.ravel(),
            weights=np.tile(0.5 * mesh.h * ops.weights, config.N),
            initial=u0,
            rhs=lambda u: semidiscrete_rhs(u, mesh, ops, tensor, flux_fn, bc),
            samples=lambda u: u.reshape(-1, tensor.size),
            boundary_flux=lambda u: net_boundary(u[0, 0], u[-1, -1]),
            post_step=post,
        )
    if config.solver is SolverKind.FV:
        mesh = Mesh1D(0.0, 1.0, config.N)
        centres = mesh.faces[:-1] + 0.5 * mesh.h
        base = flux_fn if config.flux is FluxChoice.EC else ec_flux

        def fv_boundary(u):
            if periodic:
                return zero
            f = fv_face_fluxes(u, tensor, bc, config.omega, base)
            return f[0] - f[-1]

        return Discretization(
            x=centres,
            weights=np.full(config.N, mesh.h),
            initial=_initial_values(config, centres, nodal=False),
            rhs=lambda u: fv_rhs(u, mesh, tensor, bc, config.omega, base),
            samples=lambda u: u,
            boundary_flux=fv_boundary,
        )
    solver = FDSolver(
        0.0, 1.0, config.N + 1, config.fd_order, config.fd_dissipation, config.c2, config.c4
    )
    nodes = solver.nodes
    if isinstance(bc, Periodic):
        raise ConfigError("field 'case': the FD solver has no periodic boundary treatment")
    return Discretization(
        x=nodes,
        weights=solver.norm_weights,
        initial=_initial_values(config, nodes, nodal=False),
        rhs=lambda u: solver.rhs(u, tensor, bc, flux_fn),
        samples=lambda u: u,
        boundary_flux=lambda u: net_boundary(u[0], u[-1]),
    )


# Running


@dataclass
class RunReport:
    config: ExperimentConfig
    x: np.ndarray
    final_samples: np.ndarray
    final_state: np.ndarray
    times: np.ndarray
    entropy: np.ndarray
    mass: np.ndarray
    mass_drift: np.ndarray
    wall_time: float
    audits: list = field(default_factory=list)
    snapshot_paths: list = field(default_factory=list)
    timeseries_path: Optional[Path] = None
    audit_path: Optional[Path] = None
    metadata_path: Optional[Path] = None

    @property
    def max_mass_drift(self) -> np.ndarray:
        """Largest unexplained mass change per mode over the run."""
        return np.max(np.abs(self.mass_drift), axis=0)


def output_root() -> Path:
    return Path(os.environ.get(OUTPUT_ENV, "runs"))


def run(config: ExperimentConfig, out_dir=None, write: bool = True) -> RunReport:
    """Evolve *config* to ``t_end`` and (optionally) write snapshots and audits.

    Mass bookkeeping integrates the net boundary flux with the same Runge-Kutta
    stages as the solution (it rides along as extra state components), so
    ``drift`` isolates the scheme's conservation error.
    """
    disc = build_discretization(config)
    tensor = build_tensor(config.M)
    shape = disc.initial.shape
    n = disc.initial.size
    m = tensor.size

    def packed_rhs(v):
        u = v[:n].reshape(shape)
        return np.concatenate([disc.rhs(u).ravel(), disc.boundary_flux(u)])

    post = None
    if disc.post_step is not None:
        def post(v):
            v = v.copy()
            v[:n] = disc.post_step(v[:n].reshape(shape)).ravel()
            return v

    def mass_of(u):
        return disc.weights @ disc.samples(u)

    times, entropies, masses, drifts = [], [], [], []
    snapshots: list[tuple[int, np.ndarray]] = []
    mass0 = mass_of(disc.initial)

    def observer(step, v):
        u = v[:n].reshape(shape)
        s = disc.samples(u)
        mass = disc.weights @ s
        times.append(step * config.dt)
        entropies.append(0.5 * float(np.einsum("i,ik,ik->", disc.weights, s, s)))
        masses.append(mass)
        drifts.append(mass - mass0 - v[n:])
        if step == 0 or step == config.steps or (
            config.snapshot_every and step % config.snapshot_every == 0
        ):
            snapshots.append((step, u.copy()))

    v0 = np.concatenate([disc.initial.ravel(), np.zeros(m)])
    start = time.perf_counter()
    v = integrate(v0, packed_rhs, Stepper(config.time_scheme, config.dt), config.steps, post, observer)
    wall = time.perf_counter() - start
    final = v[:n].reshape(shape)
    samples = disc.samples(final)
    audits = []
    if config.case is Case.SHOCK:
        order = np.argsort(disc.x, kind="stable")
        audits = rankine_hugoniot_audit(disc.x[order], samples[order], tensor)
    report = RunReport(
        config=config,
        x=disc.x,
        final_samples=samples,
        final_state=final,
        times=np.array(times),
        entropy=np.array(entropies),
        mass=np.array(masses),
        mass_drift=np.array(drifts),
        wall_time=wall,
        audits=audits,
    )
    if write:
        _write_report(report, snapshots, disc, Path(out_dir) if out_dir else output_root() / config.name)
    return report


def profile_table(x: np.ndarray, samples: np.ndarray, order: int) -> tuple[list[str], np.ndarray]:
    """Snapshot columns for mode vectors *samples* at points *x*."""
    tensor = build_tensor(order)
    mean, var = moment_profiles(samples)
    lam = eigenvalues(samples, tensor)
    U = entropy(samples)
    F = entropy_flux(samples, tensor)
    header = (
        ["x"]
        + [f"u_{i}" for i in range(order + 1)]
        + ["E", "Var"]
        + [f"lambda_{i + 1}" for i in range(order + 1)]
        + ["U", "F"]
    )
    table = np.column_stack([x, samples, mean, var, lam, U, F])
    return header, table


def _atomic_write(path: Path, text: str) -> str:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w") as handle:
        handle.write(text)
    os.replace(tmp, path)
    return hashlib.sha256(text.encode()).hexdigest()


def _csv_text(header: list[str], table: np.ndarray) -> str:
    lines = [",".join(header)]
    for row in np.atleast_2d(table):
        lines.append(",".join("%.17g" % value for value in row))
    return "\n".join(lines) + "\n"


def write_csv(path, header: list[str], table: np.ndarray) -> str:
    """Write a CSV atomically; returns the SHA-256 of its content."""
    return _atomic_write(Path(path), _csv_text(header, table))


def read_csv(path) -> tuple[list[str], np.ndarray]:
    path = Path(path)
    with path.open() as handle:
        header = handle.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data


def _write_report(report: RunReport, snapshots, disc: Discretization, out: Path):
    config = report.config
    hashes = {}
    order = np.argsort(disc.x, kind="stable")
    for step, state in snapshots:
        header, table = profile_table(disc.x[order], disc.samples(state)[order], config.M)
        path = out / f"snapshot_{step:07d}.csv"
        hashes[path.name] = write_csv(path, header, table)
        report.snapshot_paths.append(path)
    m = config.M + 1
    ts_header = ["step", "t", "entropy"] + [f"mass_{i}" for i in range(m)] + [f"drift_{i}" for i in range(m)]
    steps = np.arange(len(report.times))
    ts = np.column_stack([steps, report.times, report.entropy, report.mass, report.mass_drift])
    report.timeseries_path = out / "timeseries.csv"
    hashes["timeseries.csv"] = write_csv(report.timeseries_path, ts_header, ts)
    if config.case is Case.SHOCK:
        audit_header = ["location", "speed", "residual", "scaled_residual", "entropy_residual", "entropy_admissible"]
        rows = np.array(
            [
                [a.location, a.speed, a.residual, a.scaled_residual, a.entropy_residual, float(a.entropy_admissible)]
                for a in report.audits
            ]
        ).reshape(-1, len(audit_header))
        report.audit_path = out / "rh_audit.csv"
        hashes["rh_audit.csv"] = write_csv(report.audit_path, audit_header, rows)
    meta = {
        "schema_version": SCHEMA_VERSION,
        "config": config.to_dict(),
        "wall_time_seconds": report.wall_time,
        "max_mass_drift": report.max_mass_drift.tolist(),
        "files": hashes,
    }
    report.metadata_path = out / "metadata.json"
    _atomic_write(report.metadata_path, json.dumps(meta, indent=2, sort_keys=True) + "\n")


# Reference output


def family_from_name(name: str, alpha: float = 0.0, beta: float = 0.0) -> OrthogonalFamily:
    key = name.lower()
    if key == "hermite":
        return OrthogonalFamily.hermite()
    if key == "jacobi":
        return OrthogonalFamily.jacobi(alpha, beta)
    if key == "laguerre":
        return OrthogonalFamily.laguerre(alpha)
    raise ConfigError(f"field 'family': unknown family {name!r}")


def reference_table(
    case,
    setup,
    grid,
    t: float,
    m_report: int,
    family: OrthogonalFamily = OrthogonalFamily.hermite(),
) -> tuple[list[str], np.ndarray]:
    """Columns ``x, u_0..u_{m_report}, E, Var`` of the untruncated solution.

    Hermite variances are exact (full series); other families report the
    series truncated at *m_report*. The bump case is only defined for
    Hermite and returns the initial profile advected with unit speed on the
    periodic unit interval.
    """
    case = Case(case)
    x = np.asarray(grid, dtype=float)
    if t < 0:
        raise ConfigError("field 't': must be nonnegative")
    hermite = family.kind.value == "hermite"
    if case is Case.BUMP:
        if not hermite:
            raise ConfigError("field 'family': the bump reference exists for Hermite only")
        coeffs = bump_initial(np.mod(x - t, 1.0), setup, max(m_report, 1))[:, : m_report + 1]
        mean, var = moment_profiles(coeffs)
    elif t == 0:
        if hermite:
            coeffs = initial_coefficients(case.value, x, setup, m_report)
            mean, var = moment_profiles(coeffs)
        else:
            sign = np.where(x > setup.x0, -1.0, 1.0) * (1.0 if case is Case.SHOCK else -1.0)
            coeffs = np.stack(
                [
                    sign * setup.a * _support_moment(family, i, 0) + setup.b * _support_moment(family, i, 1)
                    for i in range(m_report + 1)
                ],
                axis=-1,
            )
            mean, var = family_moments(coeffs, family)
    else:
        kind = RiemannKind(case.value)
        coeffs = np.stack(
            [np.asarray(family_coefficient(family, kind, i, x, t, setup)) * np.ones_like(x) for i in range(m_report + 1)],
            axis=-1,
        )
        if hermite:
            ref = reference_moments(kind, x, t, setup)
            mean, var = np.asarray(ref.expectation), np.asarray(ref.variance)
        else:
            mean, var = family_moments(coeffs, family)
    header = ["x"] + [f"u_{i}" for i in range(m_report + 1)] + ["E", "Var"]
    return header, np.column_stack([x, coeffs, mean, var])


def _support_moment(family: OrthogonalFamily, i: int, power: int) -> float:
    lo, hi = family.support
    return float(integral_phi(family, i, lo, hi) if power == 0 else integral_xi_phi(family, i, lo, hi))


def emit_reference(case, setup, grid, t, m_report, family=OrthogonalFamily.hermite(), out=None):
    header, table = reference_table(case, setup, grid, t, m_report, family)
    if out is not None:
        write_csv(out, header, table)
    return header, table


# Comparison


@dataclass(frozen=True)
class ErrorNorms:
    column: str
    l1: float
    l2: float
    linf: float


def trapezoid_weights(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    w = np.zeros_like(x)
    dx = np.diff(x)
    w[:-1] += 0.5 * dx
    w[1:] += 0.5 * dx
    return w


def compare_tables(
    header_a, data_a, header_b, data_b, interpolate: bool = False, atol: float = 1e-12
) -> list[ErrorNorms]:
    """L1, L2 (trapezoidal in x) and max norms of ``a - b`` for every shared column."""
    xa, xb = data_a[:, 0], data_b[:, 0]
    same_grid = xa.shape == xb.shape and np.allclose(xa, xb, rtol=0.0, atol=atol)
    if not same_grid and not interpolate:
        raise ConfigError("grids differ; pass interpolate=True to interpolate the second file linearly")
    weights = trapezoid_weights(xa)
    shared = [c for c in header_a[1:] if c in header_b[1:]]
    out = []
    for column in shared:
        a = data_a[:, header_a.index(column)]
        b = data_b[:, header_b.index(column)]
        if not same_grid:
            b = np.interp(xa, xb, b)
        diff = np.abs(a - b)
        out.append(
            ErrorNorms(
                column,
                float(weights @ diff),
                float(math.sqrt(weights @ diff**2)),
                float(diff.max(initial=0.0)),
            )
        )
    return out


def compare(run_csv, reference_csv, interpolate: bool = False) -> list[ErrorNorms]:
    ha, da = read_csv(run_csv)
    hb, db = read_csv(reference_csv)
    return compare_tables(ha, da, hb, db, interpolate)


# Profile analysis


@dataclass(frozen=True)
class Plateau:
    x_start: float
    x_end: float
    value: float

    @property
    def width(self) -> float:
        return self.x_end - self.x_start


def find_plateaus(x, values, tol: float = 0.02, min_width: float = 0.02) -> list[Plateau]:
    """Maximal runs of samples within *tol* of their running mean, at least *min_width* wide.

    Consecutive plateaus whose levels differ by less than *tol* are merged.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(values, dtype=float)
    order = np.argsort(x, kind="stable")
    x, v = x[order], v[order]
    runs = []
    start = 0
    total = v[0]
    for i in range(1, len(v) + 1):
        if i < len(v) and abs(v[i] - total / (i - start)) <= tol:
            total += v[i]
            continue
        runs.append((start, i - 1, total / (i - start)))
        if i < len(v):
            start, total = i, v[i]
    plateaus: list[Plateau] = []
    for s, e, mean in runs:
        if x[e] - x[s] < min_width:
            continue
        if plateaus and abs(plateaus[-1].value - mean) < tol:
            prev = plateaus.pop()
            w_prev, w_new = prev.width, x[e] - x[s]
            mean = (prev.value * w_prev + mean * w_new) / max(w_prev + w_new, 1e-300)
            plateaus.append(Plateau(prev.x_start, float(x[e]), float(mean)))
            continue
        plateaus.append(Plateau(float(x[s]), float(x[e]), float(mean)))
    return plateaus


def plateau_transitions(plateaus: list[Plateau]) -> list[tuple[float, float]]:
    """``(position, jump)`` between consecutive plateaus, position at the gap midpoint."""
    return [
        (0.5 * (p.x_end + q.x_start), q.value - p.value) for p, q in zip(plateaus[:-1], plateaus[1:])
    ]


def outer_shock_position(plateaus: list[Plateau], x0: float, margin: float = 0.1) -> Optional[float]:
    """Strongest transition left of ``x0 - margin`` (away from the centre)."""
    candidates = [(abs(j), pos) for pos, j in plateau_transitions(plateaus) if pos < x0 - margin]
    if not candidates:
        return None
    return max(candidates)[1]


def gnuplot_script(csv_paths: list, columns=("E", "Var"), title: str = "") -> str:
    """A gnuplot script plotting *columns* against ``x`` for each CSV."""
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set title '{title}'",
        "set xlabel 'x'",
    ]
    for column in columns:
        lines.append(f"set ylabel '{column}'")
        parts = [f"'{p}' using 'x':'{column}' with lines title '{Path(p).parent.name}'" for p in csv_paths]
        lines.append("plot " + ", \\\n     ".join(parts))
        lines.append("pause -1")
    return "\n".join(lines) + "\n"
