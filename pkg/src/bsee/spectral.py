"""Diagonal spectral realization of the elliptic operator and its calculus.

The generator is represented through the eigenvalues ``lam`` of its negative
part on a truncated eigenbasis, so the semigroup, the implicit-Euler
resolvent, and the fractional-power norms are all componentwise multipliers.
Coefficient vectors ("H-vectors") are plain 1-d numpy arrays of length
``mode_count``.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError, StructuralError


class SpectralOperator:
    """Self-adjoint coercive operator given by eigenvalues of its negative.

    Parameters
    ----------
    eigenvalues : array-like
        Nondecreasing positive values ``lam_1 <= ... <= lam_M``.
    delta : float, optional
        Declared coercivity constant; defaults to the smallest eigenvalue.
    """

    def __init__(self, eigenvalues, delta=None):
        lam = np.asarray(eigenvalues, dtype=float)
        if lam.ndim != 1 or lam.size < 1:
            raise StructuralError("eigenvalues must be a non-empty 1-d array")
        if not np.all(np.isfinite(lam)):
            raise StructuralError("eigenvalues must be finite")
        if np.any(np.diff(lam) < 0):
            raise StructuralError("eigenvalues must be nondecreasing")
        self.delta = float(delta) if delta is not None else float(lam[0])
        if self.delta <= 0 or lam[0] < self.delta - 1e-15 * abs(self.delta):
            raise DomainError(
                "coercivity requires 0 < delta <= min(eigenvalues); got "
                f"delta={self.delta}, min={lam[0]}"
            )
        self.eigenvalues = lam
        self.eigenvalues.setflags(write=False)

    @property
    def mode_count(self):
        return self.eigenvalues.size

    def __repr__(self):
        return (
            f"SpectralOperator(modes={self.mode_count}, "
            f"lam=[{self.eigenvalues[0]:.4g}..{self.eigenvalues[-1]:.4g}])"
        )


def laplacian_1d(modes=16):
    """Dirichlet Laplacian on the unit interval: lam_m = (m*pi)^2."""
    m = np.arange(1, modes + 1, dtype=float)
    return SpectralOperator((m * np.pi) ** 2)


_PRESETS = {"laplacian_1d": laplacian_1d}


def operator_from_config(spec):
    """Build an operator from a config mapping.

    Accepts either ``{"name": "laplacian_1d", "modes": 16}`` or an explicit
    eigenvalue list ``{"eigenvalues": [...]}``.
    """
    if "eigenvalues" in spec:
        return SpectralOperator(spec["eigenvalues"], delta=spec.get("delta"))
    name = spec.get("name", "laplacian_1d")
    if name not in _PRESETS:
        raise StructuralError(f"unknown operator preset '{name}'")
    kwargs = {k: v for k, v in spec.items() if k not in ("name",)}
    return _PRESETS[name](**kwargs)


def as_coeff_vector(v, op):
    """Validate ``v`` as a coefficient vector of ``op`` and return it as float64."""
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1 or arr.size != op.mode_count:
        raise StructuralError(
            f"coefficient vector must have length {op.mode_count}, got shape {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise StructuralError("coefficient vector must be finite")
    return arr


class TimeGrid:
    """Uniform grid 0 = t_0 < ... < t_J = T with step tau = T/J."""

    def __init__(self, horizon, steps):
        if not horizon > 0:
            raise DomainError(f"horizon must be positive, got {horizon}")
        if not (isinstance(steps, (int, np.integer)) and steps >= 1):
            raise DomainError(f"steps must be a positive integer, got {steps}")
        self.horizon = float(horizon)
        self.steps = int(steps)
        self.tau = self.horizon / self.steps
        # linspace pins both endpoints exactly
        self.nodes = np.linspace(0.0, self.horizon, self.steps + 1)
        self.nodes.setflags(write=False)

    def __repr__(self):
        return f"TimeGrid(T={self.horizon}, J={self.steps})"

    def refined(self, substeps):
        if not (isinstance(substeps, (int, np.integer)) and substeps >= 1):
            raise DomainError(f"substeps must be a positive integer, got {substeps}")
        return TimeGrid(self.horizon, self.steps * int(substeps))


def norm_gamma(v, op, gamma):
    """Fractional-power norm sqrt(sum_m lam_m^(2*gamma) v_m^2) for gamma in [0, 1]."""
    if not 0.0 <= gamma <= 1.0:
        raise DomainError(f"gamma must lie in [0, 1], got {gamma}")
    arr = as_coeff_vector(v, op)
    if gamma == 0.0:
        return float(np.linalg.norm(arr))
    return float(np.sqrt(np.sum(op.eigenvalues ** (2.0 * gamma) * arr**2)))


def semigroup_factors(t, op):
    if t < 0:
        raise DomainError(f"semigroup time must be nonnegative, got {t}")
    return np.exp(-op.eigenvalues * t)


def apply_semigroup(t, v, op):
    """Apply the analytic contraction semigroup at time t >= 0."""
    arr = as_coeff_vector(v, op)
    return semigroup_factors(t, op) * arr


def resolvent_factors(tau, op, power=1):
    if tau <= 0:
        raise DomainError(f"resolvent step must be positive, got {tau}")
    if power < 1:
        raise DomainError(f"resolvent power must be >= 1, got {power}")
    # log1p keeps large tau*lam stable instead of overflowing (1+x)^m
    return np.exp(-float(power) * np.log1p(tau * op.eigenvalues))


def resolvent_step(tau, v, op):
    """One implicit-Euler resolvent application: v_m -> v_m / (1 + tau*lam_m)."""
    arr = as_coeff_vector(v, op)
    return resolvent_factors(tau, op) * arr


def resolvent_power(m, tau, v, op):
    """m-fold resolvent composition, computed componentwise in log space."""
    arr = as_coeff_vector(v, op)
    return resolvent_factors(tau, op, power=m) * arr
