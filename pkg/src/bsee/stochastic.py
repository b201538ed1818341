"""Adapted random fields, piecewise-constant processes, and the
conditional-expectation operators shared by both stochastic backends.

A field at time index ``j`` is stored as a 2-d array ``values[site, mode]``:
sites are spatial lattice nodes (lattice backend) or sample paths
(regression backend).  A piecewise process holds one field per grid node and
is constant on each ``[t_j, t_{j+1})``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import StructuralError


@dataclass
class AdaptedField:
    """A random coefficient field measurable at grid node ``time_index``."""

    time_index: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise StructuralError(
                f"field values must be 2-d (site, mode), got shape {self.values.shape}"
            )

    @property
    def modes(self):
        return self.values.shape[1]

    def check_finite(self):
        if not np.all(np.isfinite(self.values)):
            raise StructuralError("field contains non-finite entries")
        return self


@dataclass
class PiecewiseProcess:
    """Element of the piecewise-constant adapted class on a time grid.

    ``fields[j]`` is the value on ``[t_j, t_{j+1})``; ``fields[-1]`` is the
    terminal slot (used only by backward processes).
    """

    grid: "object"
    fields: list = dc_field(default_factory=list)

    def __post_init__(self):
        if len(self.fields) != self.grid.steps + 1:
            raise StructuralError(
                f"process needs {self.grid.steps + 1} fields, got {len(self.fields)}"
            )
        for j, f in enumerate(self.fields):
            if f.time_index != j:
                raise StructuralError(
                    f"field {j} carries time_index {f.time_index}"
                )

    def values(self, j):
        return self.fields[j].values

    @property
    def modes(self):
        return self.fields[0].modes


def zeros_process(backend, modes):
    grid = backend.grid
    fields = [
        AdaptedField(j, np.zeros((backend.site_count(j), modes)))
        for j in range(grid.steps + 1)
    ]
    return PiecewiseProcess(grid, fields)


def process_from_function(backend, fn, modes=None):
    """Sample a Markovian function ``fn(t, w) -> (sites, modes)`` on every node."""
    grid = backend.grid
    fields = [
        backend.field_from_function(j, lambda w, t=grid.nodes[j]: fn(t, w))
        for j in range(grid.steps + 1)
    ]
    return PiecewiseProcess(grid, fields)


def _check_level(backend, v, j):
    if v.time_index != j + 1:
        raise StructuralError(
            f"expected a field at index {j + 1}, got {v.time_index}"
        )
    if not 0 <= j < backend.grid.steps:
        raise StructuralError(f"time index {j} out of range")


def cond_expect(backend, j, v):
    """Conditional expectation of a field at j+1 down to node j."""
    _check_level(backend, v, j)
    return AdaptedField(j, backend.reduce_expect(j, backend.payload_rep(v.values, j)[0]))


def ito_coefficient(backend, j, v):
    """Increment coefficient (1/tau) E_j[v * dW_j] of a field at j+1."""
    _check_level(backend, v, j)
    return AdaptedField(j, backend.reduce_ito(j, backend.payload_rep(v.values, j)[0]))


def project_piecewise(backend, fine_process, substeps):
    """Orthogonal projection of a fine-sampled process onto the coarse
    piecewise-constant class.

    ``fine_process`` must live on ``backend.grid.refined(substeps)`` (the
    sub-grid shares every coarse node).  Per coarse step the sub-node values
    are combined by the composite trapezoid rule and conditioned down to the
    left node, which realizes the time-average-then-condition formula of the
    orthogonal projection.
    """
    grid = backend.grid
    s = int(substeps)
    if fine_process.grid.steps != grid.steps * s:
        raise StructuralError(
            "fine process is not aligned: expected "
            f"{grid.steps * s} steps, got {fine_process.grid.steps}"
        )
    fine = backend.refine(s)
    # trapezoid weights over s+1 sub-nodes, normalized to mean one
    w = np.full(s + 1, 1.0 / s)
    w[0] *= 0.5
    w[-1] *= 0.5
    out = []
    for j in range(grid.steps):
        acc = None
        for i in range(s + 1):
            vals = fine_process.values(s * j + i)
            # condition the sub-level field down to the coarse node t_j
            for level in range(s * j + i - 1, s * j - 1, -1):
                vals = fine.reduce_expect(level, fine.payload_rep(vals, level)[0])
            acc = w[i] * vals if acc is None else acc + w[i] * vals
        out.append(AdaptedField(j, acc))
    out.append(AdaptedField(grid.steps, fine_process.values(grid.steps * s).copy()))
    return PiecewiseProcess(grid, out)


def pythagoras_samples(backend, j, v):
    """Sitewise samples of the three squared norms in the increment-splitting
    identity ||v - dW*I(v)||^2 + ||dW*I(v)||^2 = ||v||^2.

    Returns three arrays aligned with the backend's sampling of the pair
    (state at j, increment); their weighted means are the squared norms.
    Used both for the exact lattice check and for Monte-Carlo standard
    errors on the regression backend.
    """
    _check_level(backend, v, j)
    return backend.pythagoras_terms(j, v.values)


def pythagoras_check(backend, j, v):
    """The three squared norms (a, b, c) with contract a + b = c."""
    a, b, c = pythagoras_samples(backend, j, v)
    wts = backend.pair_weights(j)
    return (
        float(np.sum(wts * a)),
        float(np.sum(wts * b)),
        float(np.sum(wts * c)),
    )
