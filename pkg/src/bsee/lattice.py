"""Gauss-Hermite lattice backend.

The Brownian coordinate lives on a fixed uniform grid spanning
``+- extent_R * sqrt(T)``.  One time step is the quadrature

    E_j[v](x)  =  sum_k  w_k * v(x + sqrt(tau) * xi_k),

with ``(xi_k, w_k)`` normalized Gauss-Hermite nodes/weights and off-grid
evaluation by (clamped) polynomial interpolation.  Every operator here is a
sparse matrix acting on the site axis of a ``(site, mode)`` field, so the
conditional expectation ``E``, the increment-coefficient operator ``I``, and
the chain weights ``rho_{j+1} = E^T rho_j`` satisfy the adaptedness
identities exactly, not just up to quadrature error.

Conventions used throughout the solvers:

* expectations for identity checks use the chain weights (exact tower
  property by construction);
* error norms for convergence studies integrate against the Gaussian
  density of the Brownian coordinate at each node (``weights="gaussian"``);
* the increment never appears as a sampled variable; it exists only inside
  quadratures over the Gauss-Hermite nodes.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .errors import DomainError, StructuralError
from .stochastic import AdaptedField


def gauss_hermite(order):
    """Nodes/weights for the standard normal: sum w = 1, sum w*xi = 0, sum w*xi^2 = 1."""
    x, w = np.polynomial.hermite.hermgauss(order)
    return x * np.sqrt(2.0), w / np.sqrt(np.pi)


def _lagrange_rows(nodes, targets, order):
    """Sparse interpolation matrix evaluating a grid function at ``targets``.

    Targets outside the grid are clamped to the nearest edge value.  The
    cubic rule uses the 4-point Lagrange stencil around the enclosing cell
    (shifted inward at the edges), which reproduces cubics exactly.
    """
    n = nodes.size
    dx = nodes[1] - nodes[0]
    t = np.clip(targets, nodes[0], nodes[-1])
    if order == "linear":
        width = 2
        cell = np.clip(((t - nodes[0]) // dx).astype(int), 0, n - 2)
        start = cell
    elif order == "cubic":
        width = 4
        cell = np.clip(((t - nodes[0]) // dx).astype(int), 0, n - 2)
        start = np.clip(cell - 1, 0, n - 4)
    else:
        raise DomainError(f"interpolation order must be 'linear' or 'cubic', got {order!r}")
    cols = start[:, None] + np.arange(width)[None, :]
    xs = nodes[0] + cols * dx
    wts = np.ones((t.size, width))
    for a in range(width):
        for b in range(width):
            if a == b:
                continue
            wts[:, a] *= (t - xs[:, b]) / (xs[:, a] - xs[:, b])
    rows = np.repeat(np.arange(t.size), width)
    return sp.csr_matrix(
        (wts.ravel(), (rows, cols.ravel())), shape=(t.size, n)
    )


class LatticeBackend:
    """Conditional-expectation engine on a one-dimensional spatial lattice."""

    name = "lattice"

    def __init__(self, grid, gh_order=8, extent_R=6.0, n_points=257, interp="cubic"):
        if n_points < 9 or n_points % 2 == 0:
            raise DomainError("n_points must be an odd integer >= 9")
        if gh_order < 2:
            raise DomainError("gh_order must be >= 2")
        self.grid = grid
        self.gh_order = int(gh_order)
        self.extent_R = float(extent_R)
        self.n_points = int(n_points)
        self.interp = interp

        half = self.extent_R * np.sqrt(grid.horizon)
        self.xnodes = np.linspace(-half, half, self.n_points)
        self.xnodes.setflags(write=False)
        self.gh_xi, self.gh_w = gauss_hermite(self.gh_order)
        self.sqrt_tau = np.sqrt(grid.tau)

        self._shift = [
            _lagrange_rows(self.xnodes, self.xnodes + self.sqrt_tau * xi, interp)
            for xi in self.gh_xi
        ]
        self.E_mat = sum(w * S for w, S in zip(self.gh_w, self._shift)).tocsr()
        self.I_mat = sum(
            (w * xi / self.sqrt_tau) * S
            for w, xi, S in zip(self.gh_w, self.gh_xi, self._shift)
        ).tocsr()
        self.E_mat_T = self.E_mat.T.tocsr()
        self.I_mat_T = self.I_mat.T.tocsr()

        center = self.n_points // 2
        rho = np.zeros(self.n_points)
        rho[center] = 1.0
        chain = [rho]
        for _ in range(grid.steps):
            chain.append(self.E_mat_T @ chain[-1])
        self._chain = chain
        self._gaussian = [self._gaussian_weights(j) for j in range(grid.steps + 1)]
        self._refined = {}

    # -- sampling structure ------------------------------------------------

    def site_count(self, j=None):
        return self.n_points

    def _gaussian_weights(self, j):
        t = self.grid.nodes[j]
        w = np.zeros(self.n_points)
        if t == 0.0:
            w[self.n_points // 2] = 1.0
            return w
        w = np.exp(-self.xnodes**2 / (2.0 * t))
        return w / w.sum()

    def chain_weights(self, j):
        return self._chain[j]

    def gaussian_weights(self, j):
        return self._gaussian[j]

    def pair_weights(self, j):
        """Joint weights over (increment node k, site i) at level j."""
        return self.gh_w[:, None] * self._chain[j][None, :]

    def field_from_function(self, j, fn):
        vals = np.asarray(fn(self.xnodes[:, None]), dtype=float)
        vals = np.broadcast_to(vals, (self.n_points, vals.shape[-1])).copy()
        return AdaptedField(j, vals)

    def refine(self, substeps):
        """Backend on the sub-grid with step tau/substeps, sharing the lattice."""
        s = int(substeps)
        if s == 1:
            return self
        if s not in self._refined:
            self._refined[s] = LatticeBackend(
                self.grid.refined(s),
                gh_order=self.gh_order,
                extent_R=self.extent_R,
                n_points=self.n_points,
                interp=self.interp,
            )
        return self._refined[s]

    # -- one-step reductions -----------------------------------------------

    def shifted(self, values):
        """Evaluate a level-(j+1) field at x + sqrt(tau)*xi_k: (K, site, mode)."""
        return np.stack([S @ values for S in self._shift])

    def payload_rep(self, values, j):
        """Joint representation of a next-level field plus the base coordinate."""
        return self.shifted(values), self.xnodes[:, None]

    def reduce_expect(self, j, rep):
        return np.einsum("k,kim->im", self.gh_w, rep)

    def reduce_ito(self, j, rep):
        return np.einsum("k,kim->im", self.gh_w * self.gh_xi / self.sqrt_tau, rep)

    # -- inner products and norms -------------------------------------------

    def inner(self, j, u, v, weights="chain"):
        w = self._chain[j] if weights == "chain" else self._gaussian[j]
        return float(np.dot(w, np.einsum("im,im->i", u, v)))

    def norm_sq(self, j, values, weights="chain"):
        return self.inner(j, values, values, weights=weights)

    def error_norm(self, j, values):
        """L2(Omega; H) norm under the Gaussian density of the coordinate."""
        return float(np.sqrt(max(self.norm_sq(j, values, weights="gaussian"), 0.0)))

    def field_norm(self, j, values):
        """Norm under the chain weights (used for identity checks and solves)."""
        return float(np.sqrt(max(self.norm_sq(j, values), 0.0)))

    def joint_norm_sq(self, j, rep):
        """Squared norm of a joint (K, site, mode) payload under pair weights."""
        per = np.einsum("kim,kim->ki", rep, rep)
        return float(np.sum(self.pair_weights(j) * per))

    # -- identity machinery --------------------------------------------------

    def pythagoras_terms(self, j, values):
        rep = self.shifted(values)
        iv = self.reduce_ito(j, rep)
        dw = self.sqrt_tau * self.gh_xi[:, None, None]
        resid = rep - dw * iv[None, :, :]
        mart = dw * iv[None, :, :]
        a = np.einsum("kim,kim->ki", resid, resid)
        b = np.einsum("kim,kim->ki", mart, mart)
        c = np.einsum("kim,kim->ki", rep, rep)
        return a, b, c
