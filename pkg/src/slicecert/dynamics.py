"""Symplectic integration and the empirical stability probe.

The flow of X_h = Omega^{-1} grad h is integrated with the implicit midpoint
rule, which conserves all quadratic first integrals (in particular every
momentum component) up to solver residual.  The probe measures how far
trajectories started near p wander from the K-orbit of p; the orbit distance
is a heuristic minimization and only ever overestimates, so probes err
toward declaring escape, never toward confirming stability.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.optimize

from .errors import SolverDiverged, ValidationError
from .linalg import metric_inv_sqrt
from .momentum import MomentumMap

MIDPOINT_TOL = 1e-12
MAX_NEWTON = 50


def hamiltonian_vector_field(space, hamiltonian, x):
    """X_h(x) = Omega^{-1} grad h(x); satisfies x1' = dh/dy1 in canonical
    2d coordinates and conserves h and every momentum component."""
    x = space.check_point(x)
    return space.omega_inverse() @ hamiltonian.gradient(x)


def integrate(space, hamiltonian, x0, dt, steps, tol=MIDPOINT_TOL, max_newton=MAX_NEWTON):
    """Implicit midpoint trajectory; returns an array of steps+1 points.

    Quadratic Hamiltonians reduce to a constant linear update (the Newton
    solve is exact in one step); otherwise each step runs a Newton iteration
    to the stated residual and raises SolverDiverged on failure.
    """
    x0 = space.check_point(x0)
    dt = float(dt)
    if dt <= 0.0:
        raise ValidationError(f"dt must be positive, got {dt}")
    steps = int(steps)
    if steps < 1:
        raise ValidationError(f"steps must be >= 1, got {steps}")
    n = space.dim
    omega_inv = space.omega_inverse()
    traj = np.empty((steps + 1, n))
    traj[0] = x0

    if hamiltonian.degree() <= 2:
        origin = np.zeros(n)
        lmat = omega_inv @ hamiltonian.hessian(origin)
        shift = dt * (omega_inv @ hamiltonian.gradient(origin))
        a_minus = np.eye(n) - 0.5 * dt * lmat
        a_plus = np.eye(n) + 0.5 * dt * lmat
        lu = scipy.linalg.lu_factor(a_minus)
        x = x0
        for k in range(steps):
            x = scipy.linalg.lu_solve(lu, a_plus @ x + shift)
            traj[k + 1] = x
        return traj

    eye = np.eye(n)
    x = x0
    for k in range(steps):
        y = x + dt * (omega_inv @ hamiltonian.gradient(x))
        converged = False
        for _ in range(max_newton):
            mid = 0.5 * (x + y)
            res = y - x - dt * (omega_inv @ hamiltonian.gradient(mid))
            if not np.all(np.isfinite(res)):
                break
            if np.abs(res).max() <= tol * (1.0 + np.abs(y).max()):
                converged = True
                break
            jac = eye - 0.5 * dt * (omega_inv @ hamiltonian.hessian(mid))
            try:
                y = y - np.linalg.solve(jac, res)
            except np.linalg.LinAlgError:
                break
        if not converged:
            raise SolverDiverged(f"implicit midpoint failed to converge at step {k}")
        x = y
        traj[k + 1] = x
    return traj


def _orbit_distance_full(space, algebra, x, p, sub_k, starts=32, rng=None, extra_start=None):
    """(distance, minimizer) for min over g in exp(k) of |x - g.p|_metric."""
    x = space.check_point(x)
    p = space.check_point(p)
    metric = space.metric

    def metric_dist(q):
        d = x - q
        return float(np.sqrt(max(d @ metric @ d, 0.0)))

    if sub_k.dim == 0:
        return metric_dist(p), np.zeros(0)
    amats = [algebra.matrix(sub_k.basis[i]) for i in range(sub_k.dim)]
    gen_scale = max(np.abs(a @ p).max() for a in amats)
    if gen_scale <= 1e-13 * (1.0 + float(np.abs(p).max())):
        # K fixes p: the orbit is the single point p.
        return metric_dist(p), np.zeros(sub_k.dim)

    m = sub_k.dim
    norms = [np.linalg.norm(a, 2) for a in amats]
    box = math.pi * max(1.0, 1.0 / min(norms))

    def objective(t):
        a = np.tensordot(t, amats, axes=1)
        q = scipy.linalg.expm(a) @ p
        d = x - q
        return float(d @ metric @ d)

    if rng is None:
        rng = np.random.default_rng(0)
    start_list = [np.zeros(m)]
    if extra_start is not None and len(extra_start) == m:
        start_list.append(np.asarray(extra_start, dtype=float))
    start_list.extend(rng.uniform(-box, box, size=(max(0, starts - len(start_list)), m)))

    best_val = objective(np.zeros(m))
    best_t = np.zeros(m)
    for t0 in start_list:
        res = scipy.optimize.minimize(
            objective,
            t0,
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-16, "maxiter": 400 * m, "maxfev": 400 * m},
        )
        if res.fun < best_val:
            best_val, best_t = float(res.fun), np.asarray(res.x, dtype=float)
    return float(np.sqrt(max(best_val, 0.0))), best_t


def orbit_distance(space, algebra, x, p, sub_k, starts=32, rng=None):
    """Approximate metric distance from x to the K-orbit of p.

    Multi-start Nelder-Mead over exponential coordinates of K; the identity
    is always a start, so the result never exceeds |x - p|_metric.
    """
    dist, _ = _orbit_distance_full(space, algebra, x, p, sub_k, starts=starts, rng=rng)
    return dist


@dataclass(frozen=True)
class ProbeReport:
    """Empirical summary of trajectories started in a metric ball around p."""

    epsilon: float
    horizon: float
    samples: int
    max_orbit_distance: float
    energy_drift: float
    momentum_drift: float
    escaped: bool
    solver_failures: int
    dt: float
    escape_factor: float


def stability_probe(
    space,
    algebra,
    hamiltonian,
    p,
    sub_k,
    epsilon,
    horizon,
    samples,
    dt=1e-2,
    escape_factor=100.0,
    rng=None,
    distance_starts=4,
    csv_path=None,
):
    """Integrate ``samples`` trajectories from the metric epsilon-ball at p.

    Records the largest observed distance to the K-orbit, the energy and
    momentum drifts, and whether any trajectory exceeded
    escape_factor * epsilon.  Orbit distances are evaluated on a subsample
    of each trajectory, with evaluation points placed at the ambient-norm
    peaks of each window so excursions are not missed between samples.
    """
    if epsilon <= 0:
        raise ValidationError(f"epsilon must be positive, got {epsilon}")
    p = space.check_point(p)
    if rng is None or isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(42 if rng is None else int(rng))
    steps = max(1, int(math.ceil(horizon / dt)))
    stride = max(1, steps // 200)
    inv_sqrt = metric_inv_sqrt(space.metric)
    mm = MomentumMap(space, algebra)

    max_dist = 0.0
    energy_drift = 0.0
    momentum_drift = 0.0
    failures = 0
    writer = None
    handle = None
    if csv_path is not None:
        handle = open(csv_path, "w", newline="")
        writer = csv.writer(handle)
        header = ["sample", "t"]
        header += [f"x{i + 1}" for i in range(space.dim)]
        header += ["h"] + [f"J{i + 1}" for i in range(algebra.dim)] + ["orbitDistance"]
        writer.writerow(header)

    try:
        for sample in range(samples):
            direction = rng.standard_normal(space.dim)
            direction /= np.linalg.norm(direction)
            radius = epsilon * rng.random() ** (1.0 / space.dim)
            x0 = p + radius * (inv_sqrt @ direction)
            try:
                traj = integrate(space, hamiltonian, x0, dt, steps)
            except SolverDiverged:
                failures += 1
                continue

            energies = np.atleast_1d(hamiltonian.value(traj))
            energy_drift = max(energy_drift, float(np.abs(energies - energies[0]).max()))
            if algebra.dim:
                momenta = mm.value(traj)
                momentum_drift = max(
                    momentum_drift,
                    float(np.abs(momenta - momenta[0]).max()),
                )
            else:
                momenta = np.zeros((len(traj), 0))

            # ambient distances pick the evaluation points inside each window
            diffs = traj - p
            ambient = np.sqrt(np.einsum("ti,ij,tj->t", diffs, space.metric, diffs))
            indices = {0, steps}
            for lo in range(0, steps + 1, stride):
                hi = min(lo + stride, steps + 1)
                indices.add(lo + int(np.argmax(ambient[lo:hi])))
            warm = None
            for idx in sorted(indices):
                dist, warm = _orbit_distance_full(
                    space,
                    algebra,
                    traj[idx],
                    p,
                    sub_k,
                    starts=distance_starts,
                    rng=rng,
                    extra_start=warm,
                )
                max_dist = max(max_dist, dist)
                if writer is not None:
                    row = [sample, idx * dt]
                    row += list(traj[idx])
                    row += [energies[idx]] + list(momenta[idx]) + [dist]
                    writer.writerow(row)
    finally:
        if handle is not None:
            handle.close()

    return ProbeReport(
        epsilon=float(epsilon),
        horizon=float(horizon),
        samples=int(samples),
        max_orbit_distance=max_dist,
        energy_drift=energy_drift,
        momentum_drift=momentum_drift,
        escaped=bool(max_dist > escape_factor * epsilon),
        solver_failures=failures,
        dt=float(dt),
        escape_factor=float(escape_factor),
    )
