"""Analytic benchmark problems.

Every callable is vectorized over coordinate arrays; time-dependent data
use the signature f(x, y, t).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np


@dataclass
class ProblemSpec:
    name: str
    bounds: Tuple[float, float, float, float]
    periodic: Tuple[bool, bool]
    nu: float
    rho: float
    convection: bool
    T: float
    dt: float
    v0: Callable  # v0(x, y) -> (vx, vy)
    p0: Optional[Callable] = None  # p0(x, y)
    exact_v: Optional[Callable] = None  # (x, y, t) -> (vx, vy)
    exact_p: Optional[Callable] = None
    exact_grad_v: Optional[Callable] = None  # -> (dxv1, dyv1, dxv2, dyv2)
    g: Optional[Callable] = None  # Dirichlet datum (x, y, t) -> (gx, gy)
    f: Optional[Callable] = None  # body force


# ----------------------------------------------------------------------
# potential flow: v = t * grad(chi) with a harmonic quintic potential


def harmonic_potential(x, y):
    return 5.0 * x**4 * y + y**5 - 10.0 * x**2 * y**3


def harmonic_potential_grad(x, y):
    gx = 20.0 * x**3 * y - 20.0 * x * y**3
    gy = 5.0 * x**4 + 5.0 * y**4 - 30.0 * x**2 * y**2
    return gx, gy


def _potential_hessian(x, y):
    hxx = 60.0 * x**2 * y - 20.0 * y**3
    hxy = 20.0 * x**3 - 60.0 * x * y**2
    hyy = 20.0 * y**3 - 60.0 * x**2 * y
    return hxx, hxy, hyy


def _forcing_potential(x, y):
    return np.exp(-10.0 * (1.0 - x + 2.0 * y))


def problem_potential_flow(forced=False, nu=0.1):
    """Time-growing potential flow on the unit square (Stokes mode).

    The velocity t*grad(chi) is harmonic and divergence-free for the
    quintic potential chi; the matching pressure is -chi, shifted by the
    forcing potential when the irrotational body force grad(psi) is
    switched on.  The exact velocity is independent of the viscosity,
    which makes the problem a pressure-robustness probe.
    """

    def exact_v(x, y, t):
        gx, gy = harmonic_potential_grad(x, y)
        return t * gx, t * gy

    def exact_grad_v(x, y, t):
        hxx, hxy, hyy = _potential_hessian(x, y)
        return t * hxx, t * hxy, t * hxy, t * hyy

    if forced:
        def exact_p(x, y, t):
            return -harmonic_potential(x, y) + _forcing_potential(x, y)

        def f(x, y, t):
            e = _forcing_potential(x, y)
            return 10.0 * e, -20.0 * e
    else:
        def exact_p(x, y, t):
            return -harmonic_potential(x, y) + 0.0 * x

        f = None

    return ProblemSpec(
        name="potential_flow_forced" if forced else "potential_flow",
        bounds=(0.0, 1.0, 0.0, 1.0), periodic=(False, False),
        nu=nu, rho=1.0, convection=False, T=1.0, dt=5e-3,
        v0=lambda x, y: exact_v(x, y, 0.0),
        p0=lambda x, y: exact_p(x, y, 0.0),
        exact_v=exact_v, exact_p=exact_p, exact_grad_v=exact_grad_v,
        g=exact_v, f=f)


# ----------------------------------------------------------------------
# Gresho vortex


def gresho_velocity(x, y, wind=(0.0, 0.0)):
    """Initial triangular-vorticity vortex centered at (0.5, 0.5)."""
    xt = x - 0.5
    yt = y - 0.5
    r = np.sqrt(xt**2 + yt**2)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv_r = np.where(r > 0, 1.0 / np.maximum(r, 1e-300), 0.0)
    # azimuthal speed: 5r (core), 2-5r (ring), 0 outside
    core = r < 0.2
    ring = (r >= 0.2) & (r < 0.4)
    vx = np.where(core, -5.0 * yt,
                  np.where(ring, -2.0 * yt * inv_r + 5.0 * yt, 0.0))
    vy = np.where(core, 5.0 * xt,
                  np.where(ring, 2.0 * xt * inv_r - 5.0 * xt, 0.0))
    return vx + wind[0], vy + wind[1]


def problem_gresho(moving=False, nu=1e-5):
    """Gresho vortex on the periodic unit square (Navier-Stokes mode);
    the moving variant adds the constant wind (1/3, 1/3)."""
    wind = (1.0 / 3.0, 1.0 / 3.0) if moving else (0.0, 0.0)
    return ProblemSpec(
        name="gresho_moving" if moving else "gresho",
        bounds=(0.0, 1.0, 0.0, 1.0), periodic=(True, True),
        nu=nu, rho=1.0, convection=True, T=3.0, dt=2e-3,
        v0=lambda x, y: gresho_velocity(x, y, wind))


# ----------------------------------------------------------------------
# 2D Taylor-Green vortex decay


def problem_taylor_green_2d(nu=0.01):
    """Decaying vortex on (-1,1)^2 with the standard analytic solution;
    satisfies the full Navier-Stokes equations with zero forcing.
    Dirichlet data are taken from the exact trace."""
    pi = np.pi

    def F(t):
        return np.exp(-2.0 * pi**2 * nu * t)

    def exact_v(x, y, t):
        return (-np.cos(pi * x) * np.sin(pi * y) * F(t),
                np.sin(pi * x) * np.cos(pi * y) * F(t))

    def exact_p(x, y, t):
        return -0.25 * (np.cos(2 * pi * x) + np.cos(2 * pi * y)) * F(t)**2

    def exact_grad_v(x, y, t):
        ft = F(t)
        d1v1 = pi * np.sin(pi * x) * np.sin(pi * y) * ft
        d2v1 = -pi * np.cos(pi * x) * np.cos(pi * y) * ft
        d1v2 = pi * np.cos(pi * x) * np.cos(pi * y) * ft
        d2v2 = -pi * np.sin(pi * x) * np.sin(pi * y) * ft
        return d1v1, d2v1, d1v2, d2v2

    return ProblemSpec(
        name="taylor_green_2d",
        bounds=(-1.0, 1.0, -1.0, 1.0), periodic=(False, False),
        nu=nu, rho=1.0, convection=True, T=1.0, dt=0.01,
        v0=lambda x, y: exact_v(x, y, 0.0),
        p0=lambda x, y: exact_p(x, y, 0.0),
        exact_v=exact_v, exact_p=exact_p, exact_grad_v=exact_grad_v,
        g=exact_v)


# ----------------------------------------------------------------------
# manufactured stationary Stokes solution (exactly representable for p>=2)


def problem_stationary_stokes(nu=0.1):
    """Stationary Stokes flow with polynomial solution v=(2x^2 y, -2x y^2),
    p = x + y - 1; both are exactly representable at p >= 2, so the
    interpolant is the discrete solution and time stepping must hold it."""

    def exact_v(x, y, t):
        return 2.0 * x**2 * y, -2.0 * x * y**2

    def exact_p(x, y, t):
        return x + y - 1.0

    def exact_grad_v(x, y, t):
        return 4.0 * x * y, 2.0 * x**2, -2.0 * y**2, -4.0 * x * y

    def f(x, y, t):
        # -nu*Lap(v) + grad(p)
        return 1.0 - nu * 4.0 * y, 1.0 + nu * 4.0 * x

    return ProblemSpec(
        name="stationary_stokes",
        bounds=(0.0, 1.0, 0.0, 1.0), periodic=(False, False),
        nu=nu, rho=1.0, convection=False, T=1.0, dt=0.02,
        v0=lambda x, y: exact_v(x, y, 0.0),
        p0=lambda x, y: exact_p(x, y, 0.0),
        exact_v=exact_v, exact_p=exact_p, exact_grad_v=exact_grad_v,
        g=exact_v, f=f)


_REGISTRY = {
    "potential_flow": lambda **kw: problem_potential_flow(forced=False, **kw),
    "potential_flow_forced": lambda **kw: problem_potential_flow(forced=True, **kw),
    "gresho": lambda **kw: problem_gresho(moving=False, **kw),
    "gresho_moving": lambda **kw: problem_gresho(moving=True, **kw),
    "taylor_green_2d": problem_taylor_green_2d,
    "stationary_stokes": problem_stationary_stokes,
}


def get_problem(name, nu=None):
    if name not in _REGISTRY:
        raise KeyError(f"unknown problem {name!r}; "
                       f"choices: {sorted(_REGISTRY)}")
    return _REGISTRY[name]() if nu is None else _REGISTRY[name](nu=nu)
