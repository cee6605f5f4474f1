"""Run configuration: line-oriented config files and CSV emission."""

from __future__ import annotations

import configparser
import csv
from dataclasses import dataclass, field
from typing import Optional

from .projection import ProjectionVariant


class ConfigError(ValueError):
    pass


_KNOWN_KEYS = {
    "problem": {"name", "nu", "T", "dt"},
    "discretization": {"p", "nx", "ny", "cells"},
    "projection": {"variant", "tau_d", "tau_c", "rt_degree"},
    "solver": {"pressure_tol", "linear_tol", "newton_tol", "newton_linear_tol",
               "max_it", "omega"},
    "output": {"path", "normalized_energies"},
}

_PROBLEMS = {"potential_flow", "potential_flow_forced", "gresho",
             "gresho_moving", "taylor_green_2d", "stationary_stokes"}


@dataclass
class RunConfig:
    problem: str
    p: int
    nx: int
    ny: int
    variant: ProjectionVariant
    dt: Optional[float] = None
    T: Optional[float] = None
    nu: Optional[float] = None
    pressure_tol: float = 1e-10
    linear_tol: float = 1e-10
    newton_tol: float = 1e-9
    newton_linear_tol: float = 1e-4
    max_it: int = 5000
    omega: float = 2.0
    out_path: Optional[str] = None
    normalized_energies: bool = False

    def __post_init__(self):
        if self.p < 1:
            raise ConfigError("p must be >= 1")
        if self.variant.kind in ("ppoisson_rt", "helmholtz_rt") and self.p < 2:
            raise ConfigError("RT-based projections need p >= 2")
        if self.dt is not None and self.dt <= 0:
            raise ConfigError("dt must be positive")


def parse_config(path):
    """Parse a key = value config file with the sections [problem],
    [discretization], [projection], [solver], [output]; unknown sections
    or keys are rejected by name."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    read = cp.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")
    for section in cp.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"unknown section [{section}] in {path}")
        for key in cp[section]:
            if key not in _KNOWN_KEYS[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")

    def get(section, key, conv=str, default=None):
        if section in cp and key in cp[section]:
            raw = cp[section][key]
            try:
                if conv is bool:
                    return raw.strip().lower() in ("1", "true", "yes", "on")
                return conv(raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for {key!r}: {raw!r}") from exc
        return default

    name = get("problem", "name")
    if name is None:
        raise ConfigError("missing required key 'name' in [problem]")
    if name not in _PROBLEMS:
        raise ConfigError(f"unknown problem {name!r}")

    p = get("discretization", "p", int)
    if p is None:
        raise ConfigError("missing required key 'p' in [discretization]")
    cells = get("discretization", "cells", int)
    nx = get("discretization", "nx", int, cells)
    ny = get("discretization", "ny", int, cells)
    if nx is None or ny is None:
        raise ConfigError("need 'cells' or both 'nx' and 'ny' in [discretization]")

    kind = get("projection", "variant", str, "helmholtz_rt")
    variant = ProjectionVariant(
        kind=kind,
        tau_d=get("projection", "tau_d", float),
        tau_c=get("projection", "tau_c", float),
        rt_degree=get("projection", "rt_degree", int))

    return RunConfig(
        problem=name, p=p, nx=nx, ny=ny, variant=variant,
        dt=get("problem", "dt", float),
        T=get("problem", "T", float),
        nu=get("problem", "nu", float),
        pressure_tol=get("solver", "pressure_tol", float, 1e-10),
        linear_tol=get("solver", "linear_tol", float, 1e-10),
        newton_tol=get("solver", "newton_tol", float, 1e-9),
        newton_linear_tol=get("solver", "newton_linear_tol", float, 1e-4),
        max_it=get("solver", "max_it", int, 5000),
        omega=get("solver", "omega", float, 2.0),
        out_path=get("output", "path"),
        normalized_energies=get("output", "normalized_energies", bool, False))


CSV_COLUMNS = ("t", "e_kin", "enstrophy", "dissipation", "max_div",
               "max_mass_residual", "err_v_l2", "err_v_h1", "err_p_l2")


def emit_csv(records, path, normalize=None):
    """Write diagnostics rows; None entries become empty cells.

    normalize, when given, divides e_kin and enstrophy by rho0*|Omega|
    (the alternative normalization used for turbulence diagnostics).
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            ekin, ens = rec.e_kin, rec.enstrophy
            if normalize:
                ekin /= normalize
                ens /= normalize
            row = [rec.t, ekin, ens, rec.dissipation, rec.max_div,
                   rec.max_mass_residual, rec.err_v_l2, rec.err_v_h1,
                   rec.err_p_l2]
            writer.writerow(["" if v is None else f"{v:.17g}" for v in row])
