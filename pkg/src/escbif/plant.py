"""Plant abstraction, equilibrium solving, and local linearization.

A plant is a smooth single-input single-output ODE system

    dx/dt = f(x, u),    y = h(x)

assumed open-loop stable on its admissible input interval, so that its steady
states form a manifold x = l(u) parametrized by the input.  This module solves
for points on that manifold with a damped Newton iteration, sweeps the
steady-state map J(u) = h(l(u)) with continuation warm starts, and linearizes
the dynamics about an equilibrium.

All types are immutable after construction and all operations are pure
functions of their inputs; parallel sweeps over disjoint input grids are safe
as long as each chunk recomputes its own warm starts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .exceptions import NonConvergence, SingularJacobian

__all__ = [
    "PlantModel",
    "Equilibrium",
    "LinearizedPlant",
    "solve_equilibrium",
    "equilibrium_map",
    "linearize",
    "verify_jacobians",
]

_SQRT_EPS = float(np.sqrt(np.finfo(float).eps))


@dataclass(frozen=True)
class PlantModel:
    """Nonlinear SISO plant dx/dt = f(x, u), y = h(x).

    Parameters
    ----------
    n : int
        State dimension.
    f : callable
        Vector field, ``f(x, u) -> ndarray`` of shape ``(n,)``.
    h : callable
        Scalar output map, ``h(x) -> float``.
    input_domain : (float, float)
        Closed interval of admissible steady inputs.
    dfdx, dfdu, dhdx : callable, optional
        Analytic Jacobians ``df/dx (n, n)``, ``df/du (n,)`` and
        ``dh/dx (n,)``.  When absent, central finite differences are used.
    x_init : callable, optional
        Cheap initial state guess ``x_init(u) -> ndarray`` used when no
        explicit guess is supplied to the equilibrium solver.  Defaults to
        the zero state.
    name : str
        Registry name, used in diagnostics only.
    """

    n: int
    f: Callable[[np.ndarray, float], np.ndarray]
    h: Callable[[np.ndarray], float]
    input_domain: tuple[float, float] = (-np.inf, np.inf)
    dfdx: Optional[Callable[[np.ndarray, float], np.ndarray]] = None
    dfdu: Optional[Callable[[np.ndarray, float], np.ndarray]] = None
    dhdx: Optional[Callable[[np.ndarray], np.ndarray]] = None
    x_init: Optional[Callable[[float], np.ndarray]] = None

    name: str = ""

    def initial_guess(self, u: float) -> np.ndarray:
        if self.x_init is not None:
            return np.asarray(self.x_init(u), dtype=float)
        return np.zeros(self.n)

    def contains_input(self, u: float) -> bool:
        lo, hi = self.input_domain
        return lo <= u <= hi


@dataclass(frozen=True)
class Equilibrium:
    """A steady state x_bar = l(u_bar) with its residual norm."""

    u_bar: float
    x_bar: np.ndarray
    residual: float


@dataclass(frozen=True)
class LinearizedPlant:
    """Jacobian triple (A, B, C) of a plant at an equilibrium.

    The local transfer function is G(s) = C (sI - A)^-1 B, so the
    steady-state gain is G(0) = -C A^-1 B.  That sign convention is used
    throughout the package and equals dJ/du at the operating point.
    """

    equilibrium: Equilibrium
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def steady_state_gain(self) -> float:
        return float(-self.C @ np.linalg.solve(self.A, self.B))

    @property
    def spectral_abscissa(self) -> float:
        return float(np.max(np.linalg.eigvals(self.A).real))


def _fd_dfdx(f, x, u):
    n = x.size
    J = np.empty((n, n))
    for j in range(n):
        step = _SQRT_EPS * (1.0 + abs(x[j]))
        xp = x.copy()
        xm = x.copy()
        xp[j] += step
        xm[j] -= step
        J[:, j] = (np.asarray(f(xp, u)) - np.asarray(f(xm, u))) / (2.0 * step)
    return J


def _fd_dfdu(f, x, u):
    step = _SQRT_EPS * (1.0 + abs(u))
    return (np.asarray(f(x, u + step)) - np.asarray(f(x, u - step))) / (2.0 * step)


def _fd_dhdx(h, x):
    n = x.size
    g = np.empty(n)
    for j in range(n):
        step = _SQRT_EPS * (1.0 + abs(x[j]))
        xp = x.copy()
        xm = x.copy()
        xp[j] += step
        xm[j] -= step
        g[j] = (h(xp) - h(xm)) / (2.0 * step)
    return g


def _state_jacobian(plant: PlantModel, x: np.ndarray, u: float) -> np.ndarray:
    if plant.dfdx is not None:
        return np.asarray(plant.dfdx(x, u), dtype=float)
    return _fd_dfdx(plant.f, x, u)


def solve_equilibrium(
    plant: PlantModel,
    u_bar: float,
    x_guess: Optional[np.ndarray] = None,
    rtol: float = 1e-10,
    max_iter: int = 50,
    max_damping: int = 30,
) -> Equilibrium:
    """Solve f(x, u_bar) = 0 by damped Newton iteration.

    The residual tolerance is relative to the state scale,
    ``rtol * (||x||_inf + 1)``.  Steps are halved up to ``max_damping``
    times whenever the residual would increase, which keeps warm starts
    from overshooting in stiff corners of the manifold.

    Raises
    ------
    NonConvergence
        Iteration budget exhausted; bad guess or u outside the stable
        manifold.
    SingularJacobian
        The Newton system is singular, signalling a static bifurcation of
        the equilibrium map.
    """
    if not plant.contains_input(u_bar):
        raise ValueError(f"input {u_bar!r} outside input_domain {plant.input_domain}")
    x = np.array(plant.initial_guess(u_bar) if x_guess is None else x_guess,
                 dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite initial state guess")

    fx = np.asarray(plant.f(x, u_bar), dtype=float)
    res = float(np.max(np.abs(fx)))
    for _ in range(max_iter):
        tol = rtol * (float(np.max(np.abs(x))) + 1.0)
        if res <= tol:
            return Equilibrium(u_bar=float(u_bar), x_bar=x, residual=res)
        J = _state_jacobian(plant, x, u_bar)
        try:
            step = np.linalg.solve(J, -fx)
        except np.linalg.LinAlgError as err:
            raise SingularJacobian(
                f"singular equilibrium Jacobian at u={u_bar!r}") from err
        lam = 1.0
        for _ in range(max_damping):
            x_new = x + lam * step
            f_new = np.asarray(plant.f(x_new, u_bar), dtype=float)
            res_new = float(np.max(np.abs(f_new)))
            if res_new < res:
                break
            lam *= 0.5
        x, fx, res = x_new, f_new, res_new
    raise NonConvergence(
        f"equilibrium Newton did not converge at u={u_bar!r} "
        f"(residual {res:.3e})")


def equilibrium_map(
    plant: PlantModel,
    u_grid,
    x_guess: Optional[np.ndarray] = None,
    rtol: float = 1e-10,
) -> np.ndarray:
    """Sweep the steady-state map J(u) = h(l(u)) over a sorted input grid.

    Each solve is warm started from the previous equilibrium, so the sweep
    acts as a natural continuation along the manifold.  Returns an array of
    shape ``(len(u_grid), 2)`` with columns ``(u, J(u))``.
    """
    u_grid = np.asarray(u_grid, dtype=float)
    if u_grid.ndim != 1 or u_grid.size == 0:
        raise ValueError("u_grid must be a non-empty 1-d array")
    if np.any(np.diff(u_grid) < 0):
        raise ValueError("u_grid must be sorted ascending")
    lo, hi = plant.input_domain
    if u_grid[0] < lo or u_grid[-1] > hi:
        raise ValueError("u_grid extends outside input_domain")

    out = np.empty((u_grid.size, 2))
    guess = x_guess
    for i, u in enumerate(u_grid):
        try:
            eq = solve_equilibrium(plant, u, x_guess=guess, rtol=rtol)
        except NonConvergence as err:
            raise NonConvergence(f"equilibrium sweep failed at u={u!r}") from err
        guess = eq.x_bar
        out[i, 0] = u
        out[i, 1] = plant.h(eq.x_bar)
    return out


def linearize(plant: PlantModel, eq: Equilibrium) -> LinearizedPlant:
    """Jacobian triple (A, B, C) at an equilibrium.

    Analytic Jacobians are used when the plant supplies them, otherwise
    central finite differences with steps scaled to the state and input
    magnitudes.
    """
    x, u = eq.x_bar, eq.u_bar
    A = _state_jacobian(plant, x, u)
    if plant.dfdu is not None:
        B = np.asarray(plant.dfdu(x, u), dtype=float).reshape(plant.n)
    else:
        B = _fd_dfdu(plant.f, x, u).reshape(plant.n)
    if plant.dhdx is not None:
        C = np.asarray(plant.dhdx(x), dtype=float).reshape(plant.n)
    else:
        C = _fd_dhdx(plant.h, x).reshape(plant.n)
    return LinearizedPlant(equilibrium=eq, A=A, B=B, C=C)


def verify_jacobians(plant: PlantModel, x: np.ndarray, u: float) -> dict:
    """Max relative mismatch between analytic and finite-difference Jacobians.

    Only the Jacobians the plant actually supplies are checked.  The
    returned dict maps ``"dfdx"``, ``"dfdu"``, ``"dhdx"`` to scalar errors.
    """
    x = np.asarray(x, dtype=float)
    errors = {}

    def rel(err, ref):
        return float(np.max(np.abs(err)) / (np.max(np.abs(ref)) + 1.0))

    if plant.dfdx is not None:
        fd = _fd_dfdx(plant.f, x, u)
        an = np.asarray(plant.dfdx(x, u), dtype=float)
        errors["dfdx"] = rel(an - fd, fd)
    if plant.dfdu is not None:
        fd = _fd_dfdu(plant.f, x, u)
        an = np.asarray(plant.dfdu(x, u), dtype=float).reshape(plant.n)
        errors["dfdu"] = rel(an - fd, fd)
    if plant.dhdx is not None:
        fd = _fd_dhdx(plant.h, x)
        an = np.asarray(plant.dhdx(x), dtype=float).reshape(plant.n)
        errors["dhdx"] = rel(an - fd, fd)
    return errors
