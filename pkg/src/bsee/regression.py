"""Least-squares Monte-Carlo backend.

One seeded Brownian path ensemble is drawn at construction and reused by
every solve on the backend (common random numbers).  Conditional
expectations are realized as per-mode least-squares projections onto
Hermite polynomials of the normalized current coordinate W(t_j)/sqrt(t_j)
(constant basis at t_0), so adaptedness of the result is structural.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial import hermite_e

from .errors import BackendError, DomainError
from .stochastic import AdaptedField


class RegressionBackend:
    name = "regression"

    def __init__(self, grid, path_count=100_000, seed=0, degree=4):
        if path_count < 2:
            raise DomainError("path_count must be at least 2")
        if degree < 0:
            raise DomainError("degree must be nonnegative")
        self.grid = grid
        self.path_count = int(path_count)
        self.seed = int(seed)
        self.degree = int(degree)
        rng = np.random.default_rng(self.seed)
        self.dW = rng.standard_normal((self.path_count, grid.steps)) * np.sqrt(grid.tau)
        self.W = np.zeros((self.path_count, grid.steps + 1))
        np.cumsum(self.dW, axis=1, out=self.W[:, 1:])
        self._proj = {}

    # -- sampling structure ------------------------------------------------

    def site_count(self, j=None):
        return self.path_count

    def pair_weights(self, j):
        return np.full(self.path_count, 1.0 / self.path_count)

    def field_from_function(self, j, fn):
        vals = np.asarray(fn(self.W[:, j][:, None]), dtype=float)
        vals = np.broadcast_to(vals, (self.path_count, vals.shape[-1])).copy()
        return AdaptedField(j, vals)

    def refine(self, substeps):
        """Backend on the sub-grid whose paths agree with this ensemble at
        every coarse node (sub-increments are bridged inside each step)."""
        s = int(substeps)
        if s == 1:
            return self
        fine = RegressionBackend.__new__(RegressionBackend)
        fine.grid = self.grid.refined(s)
        fine.path_count = self.path_count
        fine.seed = self.seed
        fine.degree = self.degree
        rng = np.random.default_rng((self.seed, s))
        h = self.grid.tau / s
        dW = rng.standard_normal((self.path_count, self.grid.steps, s)) * np.sqrt(h)
        # constrain each block of sub-increments to sum to the coarse one
        dW += (self.dW[:, :, None] - dW.sum(axis=2, keepdims=True)) / s
        fine.dW = dW.reshape(self.path_count, -1)
        fine.W = np.zeros((self.path_count, fine.grid.steps + 1))
        np.cumsum(fine.dW, axis=1, out=fine.W[:, 1:])
        fine._proj = {}
        return fine

    # -- projection --------------------------------------------------------

    def basis(self, j):
        if j == 0:
            return np.ones((self.path_count, 1))
        t = self.grid.nodes[j]
        x = self.W[:, j] / np.sqrt(t)
        return hermite_e.hermevander(x, self.degree)

    def _projector(self, j):
        if j not in self._proj:
            X = self.basis(j)
            q, r = np.linalg.qr(X)
            diag = np.abs(np.diag(r))
            if diag.min() <= 1e-12 * max(diag.max(), 1.0):
                raise BackendError(
                    f"singular regression basis at node {j}",
                    diagnostics={
                        "node": j,
                        "condition": float(diag.max() / max(diag.min(), 1e-300)),
                    },
                )
            self._proj[j] = q
        return self._proj[j]

    def projection(self, j, values):
        """Least-squares projection of per-path values onto the node-j basis."""
        q = self._projector(j)
        return q @ (q.T @ values)

    # -- one-step reductions -----------------------------------------------

    def payload_rep(self, values, j):
        return values, self.W[:, j][:, None]

    def reduce_expect(self, j, rep):
        return self.projection(j, rep)

    def reduce_ito(self, j, rep):
        return self.projection(j, rep * self.dW[:, j][:, None]) / self.grid.tau

    # -- inner products and norms -------------------------------------------

    def inner(self, j, u, v, weights="chain"):
        return float(np.einsum("im,im->", u, v) / self.path_count)

    def norm_sq(self, j, values, weights="chain"):
        return self.inner(j, values, values)

    def error_norm(self, j, values):
        return float(np.sqrt(self.norm_sq(j, values)))

    field_norm = error_norm

    # -- identity machinery --------------------------------------------------

    def pythagoras_terms(self, j, values):
        iv = self.reduce_ito(j, values)
        dw = self.dW[:, j][:, None]
        resid = values - dw * iv
        mart = dw * iv
        a = np.einsum("im,im->i", resid, resid)
        b = np.einsum("im,im->i", mart, mart)
        c = np.einsum("im,im->i", values, values)
        return a, b, c
