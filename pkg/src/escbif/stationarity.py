"""Necessary stationarity condition of the loop and its roots.

Any low-amplitude periodic solution of the loop with the forcing period
must, to first harmonic order and with the demodulation harmonics damped
out, have a mean operating point u_bar where

    C(u_bar, omega) = Re{ F_H(i omega) G_{u_bar}(i omega) } = 0,

with G the transfer function of the plant linearized at the equilibrium
l(u_bar).  Equivalently, where the response is nonzero, the loop phase must
satisfy angle G + angle F_H = pi/2 modulo pi.  This module evaluates the
condition, scans and refines its roots over the operating interval, and
estimates how far the root nearest a steady-state optimum sits from it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from .exceptions import DegenerateResponse, TangentSingularity
from .freq import EscConfig, filter_response, plant_response
from .plant import PlantModel, linearize, solve_equilibrium
from .zerodyn import transmission_zeros

__all__ = [
    "StationaryPoint",
    "condition_value",
    "phase_residual",
    "scan_condition",
    "find_stationary_points",
    "estimate_optimum_deviation",
    "condition_function",
    "config_at_omega",
]


@dataclass(frozen=True)
class StationaryPoint:
    """A refined root of C(u_bar, omega) = 0 at fixed loop tuning."""

    u_bar: float
    omega: float
    condition_value: float
    dC_du: float
    stability: str = "unknown"           # stable / unstable / unknown
    stability_source: str = "none"       # reduced_model / floquet / none


def config_at_omega(cfg: EscConfig, omega: float,
                    omega_ratio: Optional[float] = None) -> EscConfig:
    """Retune a config to a new perturbation frequency.

    With ``omega_ratio`` set, the filter break-offs follow the frequency as
    omega_h = omega_l = ratio * omega, which keeps the high-pass phase
    independent of omega; otherwise they stay fixed.
    """
    if omega_ratio is not None:
        return replace(cfg, omega=omega, omega_h=omega_ratio * omega,
                       omega_l=omega_ratio * omega)
    return replace(cfg, omega=omega)


def _loop_response(plant: PlantModel, cfg: EscConfig, u_bar: float,
                   x_guess=None):
    """Equilibrium, linearization, plant response and high-pass response."""
    eq = solve_equilibrium(plant, u_bar, x_guess=x_guess)
    lin = linearize(plant, eq)
    G = plant_response(lin, cfg.omega).value
    FH = filter_response(cfg, "high_pass", cfg.omega).value
    return eq, lin, G, FH


def condition_value(plant: PlantModel, cfg: EscConfig, u_bar: float,
                    x_guess=None) -> float:
    """C(u_bar, omega) = Re{F_H(i omega) G_{u_bar}(i omega)}."""
    _, _, G, FH = _loop_response(plant, cfg, u_bar, x_guess)
    return float((FH * G).real)


def _mod_pi(x: float) -> float:
    """Reduce an angle modulo pi into (-pi/2, pi/2]."""
    r = math.fmod(x, math.pi)
    if r > 0.5 * math.pi:
        r -= math.pi
    elif r <= -0.5 * math.pi:
        r += math.pi
    return r


def phase_residual(plant: PlantModel, cfg: EscConfig, u_bar: float,
                   x_guess=None, degeneracy_tol: float = 1e-12) -> float:
    """Distance of the local phase lag from the stationarity target.

    Returns angle G - (pi/2 - angle F_H) reduced modulo pi into
    (-pi/2, pi/2], which is zero exactly when C vanishes and the response
    does not.  Raises DegenerateResponse when |G| falls below
    ``degeneracy_tol``, the regime where the condition holds identically
    and the phase is meaningless.
    """
    _, _, G, FH = _loop_response(plant, cfg, u_bar, x_guess)
    if abs(G) <= degeneracy_tol:
        raise DegenerateResponse(
            f"|G(i omega)| = {abs(G):.3e} at u={u_bar!r}; phase undefined")
    target = 0.5 * math.pi - np.angle(FH)
    return _mod_pi(float(np.angle(G)) - target)


def condition_function(plant: PlantModel, cfg: EscConfig,
                       omega_ratio: Optional[float] = None
                       ) -> Callable[[float, float], float]:
    """C as a plain callable of (u_bar, omega), for scans and continuation."""

    def cond(u_bar: float, omega: float) -> float:
        return condition_value(plant, config_at_omega(cfg, omega, omega_ratio),
                               u_bar)

    return cond


def scan_condition(plant: PlantModel, cfg: EscConfig, u_interval, grid: int):
    """Evaluate C on a uniform grid with warm-started equilibria.

    Returns ``(u_values, C_values)``.
    """
    if grid < 2:
        raise ValueError("grid must be at least 2")
    lo, hi = float(u_interval[0]), float(u_interval[1])
    us = np.linspace(lo, hi, grid)
    Cs = np.empty(grid)
    guess = None
    for i, u in enumerate(us):
        eq = solve_equilibrium(plant, u, x_guess=guess)
        guess = eq.x_bar
        lin = linearize(plant, eq)
        G = plant_response(lin, cfg.omega).value
        FH = filter_response(cfg, "high_pass", cfg.omega).value
        Cs[i] = (FH * G).real
    return us, Cs


def _dC_du(plant, cfg, u, rel_step: float = 1e-5, x_guess=None) -> float:
    h = rel_step * (1.0 + abs(u))
    cp = condition_value(plant, cfg, u + h, x_guess)
    cm = condition_value(plant, cfg, u - h, x_guess)
    return (cp - cm) / (2.0 * h)


def find_stationary_points(plant: PlantModel, cfg: EscConfig,
                           u_interval=None, grid: int = 2000,
                           root_rtol: float = 1e-10) -> list[StationaryPoint]:
    """All roots of C over an operating interval at fixed tuning.

    The condition is scanned on a uniform grid, every sign change is
    bracketed and refined by Brent's method, and each root is returned with
    the local slope dC/du.  Stability is left ``unknown``; see
    ``timesim.reduced_stability`` and ``timesim.floquet_stability`` for
    labelling.  The refinement tolerance is ``root_rtol`` times the largest
    |C| seen on the scan grid.

    Closely spaced roots at the low end of the reactor operating range are
    the reason the default grid is fairly fine.
    """
    if u_interval is None:
        u_interval = plant.input_domain
    lo, hi = float(u_interval[0]), float(u_interval[1])
    if not (np.isfinite(lo) and np.isfinite(hi)):
        raise ValueError("u_interval must be finite")
    us, Cs = scan_condition(plant, cfg, (lo, hi), grid)
    scale = float(np.max(np.abs(Cs)))
    if scale == 0.0:
        return []

    points = []
    signs = np.sign(Cs)
    for i in np.flatnonzero(np.diff(signs) != 0):
        if signs[i] == 0:
            root = float(us[i])
        else:
            root = float(brentq(lambda u: condition_value(plant, cfg, u),
                                us[i], us[i + 1], xtol=1e-14, rtol=8.9e-16))
        cval = condition_value(plant, cfg, root)
        slope = _dC_du(plant, cfg, root)
        points.append(StationaryPoint(
            u_bar=root, omega=cfg.omega, condition_value=cval, dC_du=slope))
    # trailing exact zero on the grid is not caught by the diff above
    if signs[-1] == 0 and (not points or points[-1].u_bar != us[-1]):
        root = float(us[-1])
        points.append(StationaryPoint(
            u_bar=root, omega=cfg.omega,
            condition_value=condition_value(plant, cfg, root),
            dC_du=_dC_du(plant, cfg, root)))
    points.sort(key=lambda p: p.u_bar)
    bad = [p for p in points if abs(p.condition_value) > root_rtol * scale]
    if bad:
        raise RuntimeError(
            f"root refinement stalled at u={bad[0].u_bar!r} "
            f"(|C|={abs(bad[0].condition_value):.3e}, scale={scale:.3e})")
    return points


def estimate_optimum_deviation(plant: PlantModel, cfg: EscConfig,
                               u_star: float, zero_window: Optional[float] = None,
                               fd_rel: float = 1e-4) -> float:
    """First-order estimate of how far the near-optimal root sits from u_star.

    At an extremum of the steady-state map a real transmission zero z of
    the local linearization crosses the origin.  Writing the response as
    G(s) = (s - z) G0(s) and linearizing z(u) about u_star turns the phase
    condition into

        u - u_star  =  -omega / ( tan(pi/2 - angle G0(i omega)
                                       - angle F_H(i omega)) * dz/du ).

    The zero and its slope come from the transmission-zero pencil; G0 is
    obtained by dividing the crossing zero out of the measured response.
    The estimate is linear in omega once angle G0 has settled to its
    low-frequency limit.

    Raises
    ------
    DegenerateResponse
        No crossing zero exists at u_star (statically degenerate plants).
    TangentSingularity
        The tangent argument falls within 1e-6 of pi/2 modulo pi.
    """
    if zero_window is None:
        zero_window = 10.0 * cfg.omega
    eq = solve_equilibrium(plant, u_star)
    lin = linearize(plant, eq)

    def crossing(u):
        zs = transmission_zeros(linearize(plant, solve_equilibrium(plant, u)),
                                real_window=zero_window)
        if zs.crossing_zero is None:
            raise DegenerateResponse(
                f"no real transmission zero within |z| < {zero_window!r} "
                f"at u={u!r}")
        return zs.crossing_zero

    z_star = crossing(u_star)
    h = fd_rel * (1.0 + abs(u_star))
    dz_du = (crossing(u_star + h) - crossing(u_star - h)) / (2.0 * h)
    if dz_du == 0.0:
        raise DegenerateResponse("crossing zero derivative vanishes at u_star")

    G = plant_response(lin, cfg.omega).value
    FH = filter_response(cfg, "high_pass", cfg.omega).value
    G0 = G / (1j * cfg.omega - z_star)
    arg = 0.5 * math.pi - float(np.angle(G0)) - float(np.angle(FH))
    if abs(_mod_pi(arg - 0.5 * math.pi)) < 1e-6:
        raise TangentSingularity(
            f"tangent argument {arg!r} within 1e-6 of pi/2 modulo pi")
    return float(-cfg.omega / (math.tan(arg) * dz_du))
