"""Benchmark plant registry.

Three plants cover the interesting regimes:

* ``reactor``: an isothermal plug-flow tubular reactor converting A -> B
  with a B -> C side reaction, discretized in space by first-order upwind
  differences (method of lines).  The feed velocity is the input and the
  exit concentration of B the output, so the steady-state map has an
  interior maximum and the plant keeps a dynamic response there.
* ``hammerstein``: a static quadratic nonlinearity feeding a first-order
  lag.  The linearization vanishes identically at the optimum.
* ``linear``: a one-pole linear plant, the negative control with no
  extremum and no stationary loop solutions.

Closed-form steady-state oracles for the reactor live here as well so that
tests and demos can check the numerical path against an independent one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .plant import PlantModel

__all__ = [
    "ReactorConfig",
    "build_reactor",
    "build_hammerstein",
    "build_linear",
    "get_plant",
    "reactor_steady_profile",
    "plug_flow_exit_concentration",
    "optimal_velocity",
]


@dataclass(frozen=True)
class ReactorConfig:
    """Parameters of the discretized tubular reactor.

    ``n_cells`` upwind cells of width 1/n_cells span the normalized reactor
    length; the state stacks the A concentrations in every cell followed by
    the B concentrations, and the output is B in the exit cell.
    """

    a0: float = 1.0
    b0: float = 0.0
    k1: float = 1.0
    k2: float = 0.02
    n_cells: int = 40
    v_domain: tuple[float, float] = (0.02, 1.2)

    def __post_init__(self):
        if not (self.k1 > self.k2 > 0.0):
            raise ValueError("need k1 > k2 > 0 for an interior optimum")
        if self.n_cells < 2:
            raise ValueError("need at least 2 cells")


def build_reactor(cfg: ReactorConfig = ReactorConfig()) -> PlantModel:
    """Method-of-lines reactor as a PlantModel with analytic Jacobians.

    Cell j of the upwind discretization obeys

        da_j/dt = -v (a_j - a_{j-1}) / dz - k1 a_j
        db_j/dt = -v (b_j - b_{j-1}) / dz + k1 a_j - k2 b_j

    with the inlet values a_0, b_0 acting as ghost cells and dz = 1/n.
    The state Jacobian is block lower-bidiagonal with strictly negative
    diagonal for v > 0, so the plant is open-loop stable on its domain.
    """
    m = cfg.n_cells
    dz = 1.0 / m
    k1, k2, a0, b0 = cfg.k1, cfg.k2, cfg.a0, cfg.b0
    idx = np.arange(m)

    def shifted(c, inlet):
        out = np.empty_like(c)
        out[0] = inlet
        out[1:] = c[:-1]
        return out

    def f(x, v):
        a = x[:m]
        b = x[m:]
        da = -v * (a - shifted(a, a0)) / dz - k1 * a
        db = -v * (b - shifted(b, b0)) / dz + k1 * a - k2 * b
        return np.concatenate([da, db])

    def h(x):
        return float(x[-1])

    def dfdx(x, v):
        A = np.zeros((2 * m, 2 * m))
        c = v / dz
        A[idx, idx] = -c - k1
        A[idx[1:], idx[1:] - 1] = c
        A[m + idx, m + idx] = -c - k2
        A[m + idx[1:], m + idx[1:] - 1] = c
        A[m + idx, idx] = k1
        return A

    def dfdu(x, v):
        a = x[:m]
        b = x[m:]
        out = np.empty(2 * m)
        out[:m] = -(a - shifted(a, a0)) / dz
        out[m:] = -(b - shifted(b, b0)) / dz
        return out

    def dhdx(x):
        g = np.zeros(2 * m)
        g[-1] = 1.0
        return g

    return PlantModel(
        n=2 * m,
        f=f,
        h=h,
        input_domain=cfg.v_domain,
        dfdx=dfdx,
        dfdu=dfdu,
        dhdx=dhdx,
        x_init=lambda v: np.zeros(2 * m),
        name="reactor",
    )


def reactor_steady_profile(cfg: ReactorConfig, v: float) -> np.ndarray:
    """Closed-form steady state of the discretized reactor.

    The steady-state equations form a lower-triangular chain and solve
    cell by cell:

        a_j = a_{j-1} / (1 + dz k1 / v)
        b_j = (b_{j-1} + (dz k1 / v) a_j) / (1 + dz k2 / v)
    """
    m = cfg.n_cells
    dz = 1.0 / m
    ra = 1.0 / (1.0 + dz * cfg.k1 / v)
    a = cfg.a0 * ra ** np.arange(1, m + 1)
    b = np.empty(m)
    prev = cfg.b0
    for j in range(m):
        b[j] = (prev + (dz * cfg.k1 / v) * a[j]) / (1.0 + dz * cfg.k2 / v)
        prev = b[j]
    return np.concatenate([a, b])


def plug_flow_exit_concentration(cfg: ReactorConfig, v: float) -> float:
    """Exit concentration of B for the continuous plug-flow limit.

    For b0 = 0 this is a0 k1 (exp(-k2/v) - exp(-k1/v)) / (k1 - k2); a
    nonzero inlet b0 adds b0 exp(-k2/v).
    """
    k1, k2 = cfg.k1, cfg.k2
    conv = cfg.a0 * k1 * (math.exp(-k2 / v) - math.exp(-k1 / v)) / (k1 - k2)
    return conv + cfg.b0 * math.exp(-k2 / v)


def optimal_velocity(cfg: ReactorConfig) -> float:
    """argmax of the continuous plug-flow exit concentration,
    (k1 - k2) / ln(k1 / k2)."""
    return (cfg.k1 - cfg.k2) / math.log(cfg.k1 / cfg.k2)


def build_hammerstein(u_star: float = 1.0, tau: float = 1.0) -> PlantModel:
    """Static quadratic map -(u - u_star)^2 followed by a lag 1/(tau s + 1).

    The steady-state map is J(u) = -(u - u_star)^2 with its maximum at
    u_star, where the input Jacobian vanishes and the local transfer
    function is identically zero.
    """
    if tau <= 0.0:
        raise ValueError("tau must be positive")

    def f(x, u):
        return np.array([(-x[0] - (u - u_star) ** 2) / tau])

    return PlantModel(
        n=1,
        f=f,
        h=lambda x: float(x[0]),
        input_domain=(u_star - 5.0, u_star + 5.0),
        dfdx=lambda x, u: np.array([[-1.0 / tau]]),
        dfdu=lambda x, u: np.array([-2.0 * (u - u_star) / tau]),
        dhdx=lambda x: np.array([1.0]),
        x_init=lambda u: np.zeros(1),
        name="hammerstein",
    )


def build_linear(pole: float = -1.0) -> PlantModel:
    """One-pole plant dx/dt = pole x + u, y = x (negative control)."""
    if pole >= 0.0:
        raise ValueError("pole must be negative")

    def f(x, u):
        return np.array([pole * x[0] + u])

    return PlantModel(
        n=1,
        f=f,
        h=lambda x: float(x[0]),
        input_domain=(-5.0, 5.0),
        dfdx=lambda x, u: np.array([[pole]]),
        dfdu=lambda x, u: np.array([1.0]),
        dhdx=lambda x: np.array([1.0]),
        x_init=lambda u: np.zeros(1),
        name="linear",
    )


def get_plant(name: str, **params) -> PlantModel:
    """Build a registered benchmark plant with optional parameter overrides.

    ``reactor`` accepts the ReactorConfig fields plus ``v_min``/``v_max``;
    ``hammerstein`` accepts ``u_star`` and ``tau``; ``linear`` accepts
    ``pole``.
    """
    if name == "reactor":
        kwargs = {}
        v_min = v_max = None
        for key, val in params.items():
            if key == "v_min":
                v_min = float(val)
            elif key == "v_max":
                v_max = float(val)
            elif key == "v_domain":
                kwargs["v_domain"] = (float(val[0]), float(val[1]))
            elif key == "n_cells":
                kwargs["n_cells"] = int(val)
            elif key in {"a0", "b0", "k1", "k2"}:
                kwargs[key] = float(val)
            else:
                raise ValueError(f"unknown reactor parameter {key!r}")
        if v_min is not None or v_max is not None:
            base = kwargs.get("v_domain", ReactorConfig.v_domain)
            kwargs["v_domain"] = (base[0] if v_min is None else v_min,
                                  base[1] if v_max is None else v_max)
        return build_reactor(ReactorConfig(**kwargs))
    if name == "hammerstein":
        allowed = {"u_star", "tau"}
        bad = set(params) - allowed
        if bad:
            raise ValueError(f"unknown hammerstein parameters {sorted(bad)}")
        return build_hammerstein(**{k: float(v) for k, v in params.items()})
    if name == "linear":
        bad = set(params) - {"pole"}
        if bad:
            raise ValueError(f"unknown linear parameters {sorted(bad)}")
        return build_linear(**{k: float(v) for k, v in params.items()})
    raise ValueError(
        f"unknown plant {name!r}; available: reactor, hammerstein, linear")
