"""Transmission zeros and static bifurcations of the zero dynamics.

The transmission zeros of a linearization (A, B, C) are the finite values z
where the system pencil

    M(z) = [[ zI - A, -B ],
            [   C,     0 ]]

drops rank, excluding pole-zero cancellations.  They equal the eigenvalues
of the linearized zero dynamics, so a real zero crossing the origin as the
operating point moves along the equilibrium manifold marks a static
bifurcation of the zero dynamics; by transversality the steady-state gain
G(0) changes sign at the same point, which is exactly an extremum of the
steady-state map.  The scan in this module locates such crossings.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .exceptions import IllConditionedPencil
from .plant import LinearizedPlant, PlantModel, linearize, solve_equilibrium

__all__ = [
    "ZeroSet",
    "ZeroCrossingScan",
    "transmission_zeros",
    "zero_crossing_scan",
]


@dataclass(frozen=True)
class ZeroSet:
    """Finite transmission zeros of a linearized plant.

    ``crossing_zero`` is the real zero of smallest magnitude (inside the
    requested window), or None when no real zero qualifies;
    ``ambiguous_crossing`` flags a second real zero within a factor two in
    magnitude, where the selection is a matter of convention.
    ``maclaurin_zero`` is the small-zero approximation -c0/c1 built from
    the series coefficients c_i = C A^(-1-i) B, valid while the zero stays
    close to the origin.
    """

    zeros: np.ndarray
    crossing_zero: Optional[float]
    maclaurin_zero: float
    steady_state_gain: float
    ambiguous_crossing: bool = False


@dataclass(frozen=True)
class ZeroCrossingScan:
    """Crossing zero and steady-state gain along an input grid.

    ``crossing_zero`` holds NaN where no real zero fell inside the window.
    ``sign_change_brackets`` lists indices i such that the crossing zero is
    defined at both grid points i and i+1 and changes sign between them.
    """

    u: np.ndarray
    crossing_zero: np.ndarray
    steady_state_gain: np.ndarray
    sign_change_brackets: list[int]


def transmission_zeros(lin: LinearizedPlant,
                       real_window: Optional[float] = None,
                       residual_rtol: float = 1e-8,
                       pole_rtol: float = 1e-8,
                       real_imag_tol: float = 1e-7) -> ZeroSet:
    """Finite transmission zeros via the generalized eigenvalue pencil.

    The pencil form is solved with a dense QZ decomposition rather than a
    symbolic determinant; at the state dimensions of the benchmarks (tens
    of states) this is both robust and cheap.  Infinite eigenvalues are
    discarded, candidates within ``pole_rtol`` of an eigenvalue of A are
    dropped as pole-zero cancellations, and every surviving zero must pass
    the residual check |C (zI - A)^-1 B| <= residual_rtol ||C|| ||B||.

    Raises IllConditionedPencil when candidates exist but none passes the
    residual check.
    """
    n = lin.n
    E = np.zeros((n + 1, n + 1))
    E[:n, :n] = np.eye(n)
    F = np.zeros((n + 1, n + 1))
    F[:n, :n] = lin.A
    F[:n, n] = lin.B
    F[n, :n] = -lin.C
    eigs = scipy.linalg.eig(F, E, right=False)
    candidates = eigs[np.isfinite(eigs)]

    AinvB = np.linalg.solve(lin.A, lin.B)
    c0 = float(lin.C @ AinvB)
    c1 = float(lin.C @ np.linalg.solve(lin.A, AinvB))
    maclaurin = -c0 / c1 if c1 != 0.0 else np.nan
    gain = -c0

    if candidates.size == 0:
        return ZeroSet(zeros=np.empty(0, dtype=complex), crossing_zero=None,
                       maclaurin_zero=maclaurin, steady_state_gain=gain)

    poles = np.linalg.eigvals(lin.A)
    not_pole = np.array([
        np.min(np.abs(z - poles)) > pole_rtol * (1.0 + abs(z))
        for z in candidates])
    candidates = candidates[not_pole]
    if candidates.size == 0:
        return ZeroSet(zeros=np.empty(0, dtype=complex), crossing_zero=None,
                       maclaurin_zero=maclaurin, steady_state_gain=gain)

    norm_CB = np.linalg.norm(lin.C) * np.linalg.norm(lin.B)
    eye = np.eye(n)
    keep = []
    for z in candidates:
        resp = lin.C @ np.linalg.solve(z * eye - lin.A, lin.B.astype(complex))
        if abs(resp) <= residual_rtol * norm_CB:
            keep.append(z)
    if not keep:
        raise IllConditionedPencil(
            f"{candidates.size} pencil eigenvalues, none passed the "
            f"residual check at rtol {residual_rtol!r}")
    zeros = np.array(sorted(keep, key=abs), dtype=complex)

    is_real = np.abs(zeros.imag) <= real_imag_tol * (1.0 + np.abs(zeros.real))
    real_zeros = zeros[is_real].real
    if real_window is not None:
        real_zeros = real_zeros[np.abs(real_zeros) <= real_window]
    crossing = None
    ambiguous = False
    if real_zeros.size:
        order = np.argsort(np.abs(real_zeros))
        crossing = float(real_zeros[order[0]])
        if real_zeros.size > 1:
            second = abs(real_zeros[order[1]])
            ambiguous = second <= 2.0 * abs(crossing) and abs(crossing) > 0.0
    return ZeroSet(zeros=zeros, crossing_zero=crossing,
                   maclaurin_zero=maclaurin, steady_state_gain=gain,
                   ambiguous_crossing=ambiguous)


def zero_crossing_scan(plant: PlantModel, u_grid,
                       real_window: Optional[float] = None,
                       **zero_kwargs) -> ZeroCrossingScan:
    """Crossing zero and steady-state gain along a sorted input grid.

    Equilibria are warm started along the grid.  A bracket is reported for
    every pair of adjacent grid points where the crossing zero is defined
    on both sides and changes sign, which is the static-bifurcation
    signature; the steady-state gain columns let callers confirm the
    transversality (the gain flips sign in the same bracket).
    """
    u_grid = np.asarray(u_grid, dtype=float)
    if np.any(np.diff(u_grid) <= 0):
        raise ValueError("u_grid must be strictly increasing")
    zc = np.full(u_grid.size, np.nan)
    g0 = np.empty(u_grid.size)
    guess = None
    for i, u in enumerate(u_grid):
        eq = solve_equilibrium(plant, u, x_guess=guess)
        guess = eq.x_bar
        zs = transmission_zeros(linearize(plant, eq),
                                real_window=real_window, **zero_kwargs)
        if zs.crossing_zero is not None:
            zc[i] = zs.crossing_zero
        g0[i] = zs.steady_state_gain
    brackets = [
        int(i) for i in range(u_grid.size - 1)
        if np.isfinite(zc[i]) and np.isfinite(zc[i + 1])
        and np.sign(zc[i]) != np.sign(zc[i + 1])
    ]
    return ZeroCrossingScan(u=u_grid, crossing_zero=zc, steady_state_gain=g0,
                            sign_change_brackets=brackets)
