"""Velocity families, restricted Hessians, and the definiteness search.

A point p is a relative equilibrium when grad h(p) = grad J_xi(p) for some
algebra element xi; the solution set is the affine family xi_1 + h, with h
the isotropy algebra of p.  The certificate searches that family for a
velocity whose Hessian restricted to the symplectic slice is definite.  The
criterion is sufficient only: INCONCLUSIVE never asserts instability.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import NotRelativeEquilibrium, PreconditionViolated
from .linalg import inertia
from .momentum import MomentumMap
from .symmetry import Subalgebra, compactness_certificate, isotropy_algebra

# Definiteness threshold, applied to the spectrum after scaling the matrix
# by 1/max(1, max|entry|); separates genuine definiteness from numerical zeros.
DEFINITENESS_TOL = 1e-7

VELOCITY_TOL = 1e-9

VERDICT_POS = "STABLE_POS_DEF"
VERDICT_NEG = "STABLE_NEG_DEF"
VERDICT_INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class VelocityFamily:
    """Affine family xi1 + span(directions) of velocities of one point."""

    xi1: np.ndarray
    directions: Subalgebra  # isotropy algebra at the point
    residual: float

    @property
    def dim(self):
        return self.directions.dim

    def member(self, s):
        s = np.asarray(s, dtype=float)
        if self.dim == 0:
            return self.xi1.copy()
        return self.xi1 + self.directions.basis.T @ s


@dataclass(frozen=True)
class StabilityCertificate:
    """Outcome of the definiteness search over one velocity family."""

    verdict: str
    xi_star: np.ndarray
    spectrum: np.ndarray
    margin: float
    compactness_verified: bool
    inertia_at_xi1: tuple
    boundary_hit: bool = False
    best_definite_values: dict = field(default_factory=dict)

    @property
    def stable(self):
        return self.verdict in (VERDICT_POS, VERDICT_NEG)


def velocity_residual(space, algebra, hamiltonian, p, xi):
    """Norm of grad h(p) - grad J_xi(p); zero iff xi is a velocity at p."""
    mm = MomentumMap(space, algebra)
    target = hamiltonian.gradient(space.check_point(p))
    rows = mm.differential_rows(p)
    xi = np.asarray(xi, dtype=float)
    predicted = rows.T @ xi if algebra.dim else np.zeros(space.dim)
    return float(np.linalg.norm(target - predicted))


def solve_velocities(space, algebra, hamiltonian, p, tol=VELOCITY_TOL):
    """Solve grad J_xi(p) = grad h(p) for xi by least squares.

    Returns the minimum-norm particular solution together with the isotropy
    algebra (the family directions); raises NotRelativeEquilibrium when the
    residual exceeds tol * (1 + |grad h(p)|).
    """
    p = space.check_point(p)
    mm = MomentumMap(space, algebra)
    target = hamiltonian.gradient(p)
    if algebra.dim == 0:
        xi1 = np.zeros(0)
        residual = float(np.linalg.norm(target))
    else:
        mat = mm.differential_rows(p).T  # (2n, d)
        xi1, _, _, _ = np.linalg.lstsq(mat, target, rcond=None)
        residual = float(np.linalg.norm(mat @ xi1 - target))
    if residual > tol * (1.0 + float(np.linalg.norm(target))):
        raise NotRelativeEquilibrium(
            f"critical-point residual {residual:.3e} exceeds tolerance; "
            "the point is not a relative equilibrium"
        )
    return VelocityFamily(xi1=xi1, directions=isotropy_algebra(algebra, p), residual=residual)


def restricted_hessian(space, algebra, hamiltonian, p, xi, frame, check=True):
    """B^T (d2h(p) - d2J_xi(p)) B for B the slice basis of ``frame``."""
    p = space.check_point(p)
    xi = np.asarray(xi, dtype=float)
    if check:
        res = velocity_residual(space, algebra, hamiltonian, p, xi)
        bound = VELOCITY_TOL * (1.0 + float(np.linalg.norm(hamiltonian.gradient(p))))
        if res > bound:
            raise PreconditionViolated(
                f"xi is not a velocity of p (residual {res:.3e} > {bound:.3e})"
            )
    mm = MomentumMap(space, algebra)
    q = hamiltonian.hessian(p)
    if algebra.dim:
        q = q - np.einsum("i,imn->mn", xi, mm.component_hessians())
    b = frame.basis_n
    h = b.T @ q @ b
    return 0.5 * (h + h.T)


def orthogonal_velocity(family, algebra_metric):
    """The unique family member orthogonal to the isotropy algebra.

    This is the baseline velocity of the splitting-based criteria; the
    projection uses the supplied positive-definite metric on coordinates.
    """
    if family.dim == 0:
        return family.xi1.copy()
    metric = np.asarray(algebra_metric, dtype=float)
    hb = family.directions.basis  # (m, d)
    gram = hb @ metric @ hb.T
    coef = np.linalg.solve(gram, hb @ metric @ family.xi1)
    return family.xi1 - hb.T @ coef


def _min_eig_supergradient(hmat, direction_mats, cluster_tol=1e-8):
    """Supergradient of s -> lambda_min(H(s)) at the current matrix.

    At a simple minimal eigenvalue this is (u^T dH/ds_i u); at clustered
    spectra the eigenvector contributions over the minimal eigenspace are
    averaged, which is a valid supergradient of the concave objective.
    """
    w, u = np.linalg.eigh(hmat)
    scale = max(1.0, float(np.abs(w).max()))
    members = np.nonzero(w <= w[0] + cluster_tol * scale)[0]
    cols = u[:, members]
    grad = np.array([np.mean(np.einsum("ij,jk,ki->i", cols.T, d, cols)) for d in direction_mats])
    return float(w[0]), grad


def _ascend_lambda_min(h0, direction_mats, rng, restarts, box, max_iter):
    """Projected supergradient ascent of lambda_min over the box |s|_inf <= box."""
    m = len(direction_mats)

    def hmat(s):
        h = h0.copy()
        for k in range(m):
            h += s[k] * direction_mats[k]
        return h

    def value(s):
        return float(np.linalg.eigvalsh(hmat(s))[0])

    if m == 0:
        s0 = np.zeros(0)
        return s0, value(s0), False

    starts = [np.zeros(m)]
    starts.extend(rng.uniform(-box, box, size=(restarts, m)))
    best_s, best_val = np.zeros(m), -np.inf
    for s0 in starts:
        s = np.asarray(s0, dtype=float).copy()
        val = value(s)
        step = 1.0 + float(np.abs(s).max())
        for _ in range(max_iter):
            _, grad = _min_eig_supergradient(hmat(s), direction_mats)
            gnorm = float(np.linalg.norm(grad))
            if gnorm < 1e-15:
                break
            direction = grad / gnorm
            improved = False
            while step > 1e-13 * (1.0 + float(np.abs(s).max())):
                trial = np.clip(s + step * direction, -box, box)
                tval = value(trial)
                if tval > val:
                    s, val = trial, tval
                    step = min(step * 2.0, box)
                    improved = True
                    break
                step *= 0.5
            if not improved:
                break
        if val > best_val:
            best_s, best_val = s, val
    boundary = bool(np.any(np.abs(best_s) >= box * (1.0 - 1e-9)))
    return best_s, best_val, boundary


def definiteness_search(
    space,
    algebra,
    hamiltonian,
    p,
    family,
    frame,
    rng=None,
    restarts=20,
    box=1e3,
    max_iter=500,
    tol=DEFINITENESS_TOL,
):
    """Search the affine family for a definite restricted Hessian.

    Maximizes lambda_min(H(s)) and lambda_min(-H(s)) separately by projected
    supergradient ascent with random restarts (s = 0 always included).  If
    either optimum clears the definiteness threshold the corresponding STABLE
    verdict is returned with the certifying velocity, spectrum, and margin;
    otherwise the certificate is INCONCLUSIVE, which makes no instability
    claim (the criterion is sufficient only).
    """
    if rng is None or isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(42 if rng is None else int(rng))
    p = space.check_point(p)
    h0 = restricted_hessian(space, algebra, hamiltonian, p, family.xi1, frame)
    mm = MomentumMap(space, algebra)
    direction_mats = []
    for k in range(family.dim):
        hj = np.einsum("i,imn->mn", family.directions.basis[k], mm.component_hessians())
        d = -(frame.basis_n.T @ hj @ frame.basis_n)
        direction_mats.append(0.5 * (d + d.T))

    def hmat(s):
        h = h0.copy()
        for k in range(family.dim):
            h += s[k] * direction_mats[k]
        return h

    def scaled(value, s):
        h = hmat(s)
        scale = max(1.0, float(np.abs(h).max())) if h.size else 1.0
        return value / scale

    slice_dim = h0.shape[0]
    compact = compactness_certificate(algebra, space.metric)
    base_inertia = inertia(h0, tol)

    if slice_dim == 0:
        # Empty slice: the restriction is vacuously definite.
        return StabilityCertificate(
            verdict=VERDICT_POS,
            xi_star=family.xi1.copy(),
            spectrum=np.zeros(0),
            margin=np.inf,
            compactness_verified=compact,
            inertia_at_xi1=base_inertia,
            best_definite_values={"positive": np.inf, "negative": np.inf},
        )

    pos_s, pos_val, pos_boundary = _ascend_lambda_min(h0, direction_mats, rng, restarts, box, max_iter)
    neg_s, neg_val, neg_boundary = _ascend_lambda_min(-h0, [-d for d in direction_mats], rng, restarts, box, max_iter)
    pos_scaled = scaled(pos_val, pos_s)
    neg_scaled = scaled(neg_val, neg_s)

    if pos_scaled > tol or neg_scaled > tol:
        if pos_scaled >= neg_scaled:
            verdict, s_best, boundary = VERDICT_POS, pos_s, pos_boundary
        else:
            verdict, s_best, boundary = VERDICT_NEG, neg_s, neg_boundary
    else:
        verdict = VERDICT_INCONCLUSIVE
        s_best, boundary = (pos_s, pos_boundary) if pos_scaled >= neg_scaled else (neg_s, neg_boundary)

    spectrum = np.linalg.eigvalsh(hmat(s_best))
    margin = float(np.abs(spectrum).min()) if spectrum.size else np.inf
    return StabilityCertificate(
        verdict=verdict,
        xi_star=family.member(s_best),
        spectrum=spectrum,
        margin=margin,
        compactness_verified=compact,
        inertia_at_xi1=base_inertia,
        boundary_hit=boundary,
        best_definite_values={"positive": pos_val, "negative": neg_val},
    )
