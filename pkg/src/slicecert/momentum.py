"""Momentum maps for linear symplectic actions.

Each generator A_i contributes the quadratic component
J_i(x) = -1/2 x^T Omega A_i x, normalized with zero constant term.
The sign is pinned by the differential identity
grad J_i(x) . v = omega(A_i x, v), which the test suite asserts.
"""

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch
from .linalg import nullspace, orthonormalize
from .phase_space import Poly
from .symmetry import Subalgebra


def quadratic_momentum(space, generator_matrix):
    """Momentum component of a single Hamiltonian matrix, as an exact Poly."""
    a = np.asarray(generator_matrix, dtype=float)
    s = -0.5 * (space.omega @ a)
    s = 0.5 * (s + s.T)  # symmetric up to rounding for Hamiltonian a
    return Poly.quadratic_form(s)


def adstar_matrix(algebra, eta):
    """Matrix of mu -> ad*_eta mu, where <ad*_eta mu, xi> = -<mu, [eta, xi]>."""
    eta = np.asarray(eta, dtype=float)
    if algebra.dim == 0:
        return np.zeros((0, 0))
    return -np.einsum("a,aji->ji", eta, algebra.structure)


def ad_star(algebra, eta, mu):
    """Infinitesimal coadjoint action ad*_eta mu; bilinear in (eta, mu)."""
    mu = np.asarray(mu, dtype=float)
    return adstar_matrix(algebra, eta) @ mu


def momentum_isotropy_algebra(algebra, mu):
    """k = nullspace of eta -> ad*_eta mu (isotropy of mu in the coadjoint action)."""
    mu = np.asarray(mu, dtype=float)
    d = algebra.dim
    if d == 0:
        return Subalgebra(basis=np.zeros((0, 0)))
    # column a is ad*_{e_a} mu
    mat = -np.einsum("aji,i->ja", algebra.structure, mu)
    null = nullspace(mat)
    return Subalgebra.from_vectors(algebra, null.T)


class MomentumMap:
    """Momentum map of a linear action, with cached quadratic data."""

    def __init__(self, space, algebra):
        self.space = space
        self.algebra = algebra
        d = algebra.dim
        n = space.dim
        self._quad = np.zeros((d, n, n))
        for i in range(d):
            s = -0.5 * (space.omega @ algebra.generators[i])
            self._quad[i] = 0.5 * (s + s.T)
        self._components = None

    @property
    def dim(self):
        return self.algebra.dim

    def component(self, i):
        """J_{e_i} as an exact polynomial."""
        if self._components is None:
            self._components = tuple(
                quadratic_momentum(self.space, self.algebra.generators[k])
                for k in range(self.algebra.dim)
            )
        return self._components[i]

    def xi_component(self, xi):
        """J_xi = sum_i xi_i J_i as a polynomial."""
        xi = np.asarray(xi, dtype=float)
        out = Poly.zero(self.space.dim)
        for i in range(self.algebra.dim):
            if xi[i] != 0.0:
                out = out + xi[i] * self.component(i)
        return out

    def value(self, x):
        """J(x) in the dual-generator basis; batched over leading axes."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.space.dim:
            raise DimensionMismatch(f"point of length {x.shape[-1]}, expected {self.space.dim}")
        if self.algebra.dim == 0:
            return np.zeros(x.shape[:-1] + (0,))
        return np.einsum("...m,imn,...n->...i", x, self._quad, x)

    __call__ = value

    def component_hessians(self):
        """Array (d, 2n, 2n) of the constant Hessians of the J_i."""
        return 2.0 * self._quad

    def differential_rows(self, p):
        """Rows grad J_i(p); their common kernel is ker dJ(p)."""
        p = self.space.check_point(p)
        if self.algebra.dim == 0:
            return np.zeros((0, self.space.dim))
        return 2.0 * np.einsum("imn,n->im", self._quad, p)

    def kernel_basis(self, p):
        """Metric-orthonormal basis (columns) of ker dJ(p)."""
        null = nullspace(self.differential_rows(p))
        return orthonormalize(null, gram=self.space.metric)

    def equivariance_residual(self, x, eta, t):
        """|J(exp(tA(eta)) x) - Coad_{exp(t eta)} J(x)|.

        The coadjoint transport is the propagator of mu' = ad*_eta mu, i.e.
        expm of the constant ad* matrix.
        """
        x = self.space.check_point(x)
        eta = np.asarray(eta, dtype=float)
        g = scipy.linalg.expm(float(t) * self.algebra.matrix(eta))
        moved = self.value(g @ x)
        if self.algebra.dim == 0:
            return 0.0
        transport = scipy.linalg.expm(float(t) * adstar_matrix(self.algebra, eta))
        return float(np.linalg.norm(moved - transport @ self.value(x)))


def invariance_residual(space, algebra, hamiltonian, samples=100, rng=None):
    """Max of |grad h(x) . (A_i x)| over random sample points and generators.

    Zero (to rounding) iff h is invariant under the identity component of the
    generated group.
    """
    if algebra.dim == 0:
        return 0.0
    if rng is None:
        rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(samples):
        x = rng.standard_normal(space.dim)
        grad = hamiltonian.gradient(x)
        for i in range(algebra.dim):
            worst = max(worst, abs(float(grad @ (algebra.generators[i] @ x))))
    return worst
