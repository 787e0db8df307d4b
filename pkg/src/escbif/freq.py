"""Frequency-domain building blocks of the loop.

Holds the loop tuning record, the complex frequency response of linearized
plants and of the first-order loop filters, and Fourier-coefficient
extraction from uniformly sampled periodic signals.
"""

from __future__ import annotations

import cmath
import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import SingularSolve, WindowMismatch
from .plant import LinearizedPlant

__all__ = [
    "EscConfig",
    "FilterTuningWarning",
    "ComplexResponse",
    "HarmonicCoefficients",
    "plant_response",
    "filter_response",
    "extract_harmonics",
]

_trapezoid = getattr(np, "trapezoid", None) or np.trapz


class FilterTuningWarning(UserWarning):
    """Loop filters tuned outside the regime the analysis assumes."""


@dataclass(frozen=True)
class EscConfig:
    """Tuning of the perturbation-based extremum seeking loop.

    Parameters
    ----------
    omega : float
        Perturbation frequency in rad per unit time.
    omega_h : float
        High-pass break-off frequency; F_H(s) = s / (s + omega_h).
    omega_l : float
        Low-pass break-off frequency; F_L(s) = omega_l / (s + omega_l).
    k : float
        Integral gain (positive for maximization).
    a : float
        Perturbation amplitude.

    The analysis assumes omega_h < omega and omega_l well below omega; a
    ``FilterTuningWarning`` is emitted when either is violated.
    """

    omega: float
    omega_h: float
    omega_l: float
    k: float
    a: float

    def __post_init__(self):
        for field in ("omega", "omega_h", "omega_l", "a"):
            if getattr(self, field) <= 0.0:
                raise ValueError(f"{field} must be strictly positive")
        if self.k == 0.0:
            raise ValueError("k must be nonzero")
        if self.omega_h >= self.omega:
            warnings.warn("omega_h >= omega: high-pass filter will distort "
                          "the perturbation band", FilterTuningWarning,
                          stacklevel=2)
        if self.omega_l >= self.omega:
            warnings.warn("omega_l >= omega: low-pass filter will pass "
                          "demodulation harmonics", FilterTuningWarning,
                          stacklevel=2)

    @property
    def period(self) -> float:
        return 2.0 * np.pi / self.omega


@dataclass(frozen=True)
class ComplexResponse:
    """A complex frequency-response value with polar accessors."""

    value: complex

    @property
    def magnitude(self) -> float:
        return abs(self.value)

    @property
    def phase(self) -> float:
        """Principal argument in (-pi, pi]."""
        p = cmath.phase(self.value)
        if p <= -np.pi:
            p += 2.0 * np.pi
        return p


@dataclass(frozen=True)
class HarmonicCoefficients:
    """Mean and first-harmonic Fourier coefficients of a real signal.

    For a real signal c_{-1} is the conjugate of c_1, so only c_1 is
    stored.
    """

    c0: complex
    c1: complex
    period: float


def plant_response(lin: LinearizedPlant, omega: float) -> ComplexResponse:
    """G(i omega) = C (i omega I - A)^-1 B via one complex linear solve.

    Requires i*omega not to be an eigenvalue of A, which holds whenever A
    is Hurwitz and omega is real.
    """
    n = lin.n
    M = 1j * omega * np.eye(n) - lin.A
    try:
        sol = np.linalg.solve(M, lin.B.astype(complex))
    except np.linalg.LinAlgError as err:
        raise SingularSolve(
            f"response solve singular at omega={omega!r}") from err
    return ComplexResponse(value=complex(lin.C @ sol))


def filter_response(cfg: EscConfig, which: str, omega: float) -> ComplexResponse:
    """Frequency response of the loop filters at a given frequency.

    ``which`` selects ``"high_pass"`` (F_H) or ``"low_pass"`` (F_L).  The
    first-order forms are hard-coded here; substituting other filters only
    requires replacing this operation, nothing downstream depends on the
    specific shape.
    """
    if omega < 0.0:
        raise ValueError("omega must be nonnegative")
    s = 1j * omega
    if which == "high_pass":
        return ComplexResponse(value=complex(s / (s + cfg.omega_h)))
    if which == "low_pass":
        return ComplexResponse(value=complex(cfg.omega_l / (s + cfg.omega_l)))
    raise ValueError(f"unknown filter {which!r}")


def extract_harmonics(times, values, omega: float,
                      min_samples_per_period: int = 64) -> HarmonicCoefficients:
    """Mean and first-harmonic coefficients of a uniformly sampled signal.

    The window must span an integer number of forcing periods to within
    half a sample; both endpoint-inclusive windows (last sample at
    t0 + m T) and endpoint-exclusive windows (last sample one step before)
    are accepted.  Quadrature is trapezoidal on the uniform grid, which is
    spectrally accurate for periodic integrands.
    """
    t = np.asarray(times, dtype=float)
    x = np.asarray(values, dtype=float)
    if t.ndim != 1 or t.shape != x.shape or t.size < 4:
        raise ValueError("times and values must be equal-length 1-d arrays")
    dt = t[1] - t[0]
    if dt <= 0 or not np.allclose(np.diff(t), dt, rtol=1e-8, atol=1e-12 * abs(dt)):
        raise ValueError("samples must be uniformly spaced")
    period = 2.0 * np.pi / omega
    if period / dt < min_samples_per_period - 1e-9:
        raise ValueError(
            f"need at least {min_samples_per_period} samples per period, "
            f"got {period / dt:.1f}")

    span = t[-1] - t[0]
    m_incl = round(span / period)
    m_excl = round((span + dt) / period)
    phase = np.exp(-1j * omega * t)
    if m_incl >= 1 and abs(span - m_incl * period) <= 0.5 * dt:
        # window includes both endpoints of the last period
        c0 = complex(_trapezoid(x, t) / span)
        c1 = complex(_trapezoid(x * phase, t) / span)
    elif m_excl >= 1 and abs(span + dt - m_excl * period) <= 0.5 * dt:
        # endpoint-exclusive window; rectangle rule is exact trapezoid here
        c0 = complex(np.mean(x))
        c1 = complex(np.mean(x * phase))
    else:
        raise WindowMismatch(
            f"window of length {span!r} is not an integer number of periods "
            f"T={period!r} within half a sample")
    return HarmonicCoefficients(c0=c0, c1=c1, period=period)
