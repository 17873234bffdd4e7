"""Symplectic vector spaces and exact polynomial observables.

Observables are sparse multivariate polynomials with exact symbolic
differentiation, so every derivative identity downstream is checkable to
rounding error rather than finite-difference error.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, ValidationError

# Coefficients at or below this magnitude are dropped when terms are collected
# (only true zeros in practice; user coefficients are never rounded).
COEFF_DEDUP = 1e-300


def canonical_omega(dim):
    """Default symplectic matrix in coordinates (x1, y1, x2, y2, ...).

    The per-pair block is [[0, -1], [1, 0]], oriented so that the counter-
    rotating generator blkdiag([[0,-1],[1,0]], [[0,1],[-1,0]]) produces the
    momentum 1/2(x1^2+y1^2) - 1/2(x2^2+y2^2) under the differential identity
    grad J(x) . v = omega(A x, v).
    """
    if dim % 2 or dim <= 0:
        raise ValidationError(f"phase-space dimension must be even and positive, got {dim}")
    block = np.array([[0.0, -1.0], [1.0, 0.0]])
    omega = np.zeros((dim, dim))
    for j in range(dim // 2):
        omega[2 * j : 2 * j + 2, 2 * j : 2 * j + 2] = block
    return omega


@dataclass(frozen=True)
class SymplecticSpace:
    """Phase space R^2n with symplectic matrix and a reference inner product.

    omega(u, v) = u^T Omega v; the metric is any symmetric positive-definite
    matrix, used for orthonormalizations and distances.
    """

    dim: int
    omega: np.ndarray
    metric: np.ndarray

    def __post_init__(self):
        if self.dim % 2 or self.dim <= 0:
            raise ValidationError(f"phase-space dimension must be even and positive, got {self.dim}")
        omega = np.asarray(self.omega, dtype=float)
        metric = np.asarray(self.metric, dtype=float)
        if omega.shape != (self.dim, self.dim):
            raise DimensionMismatch(f"omega must be {self.dim}x{self.dim}, got {omega.shape}")
        if metric.shape != (self.dim, self.dim):
            raise DimensionMismatch(f"metric must be {self.dim}x{self.dim}, got {metric.shape}")
        if np.abs(omega + omega.T).max() > 1e-12 * max(1.0, np.abs(omega).max()):
            raise ValidationError("omega is not antisymmetric")
        if abs(np.linalg.det(omega)) <= 1e-12:
            raise ValidationError("omega is not invertible")
        if np.abs(metric - metric.T).max() > 1e-12 * max(1.0, np.abs(metric).max()):
            raise ValidationError("metric is not symmetric")
        if np.linalg.eigvalsh(0.5 * (metric + metric.T)).min() <= 0.0:
            raise ValidationError("metric is not positive definite")
        omega.setflags(write=False)
        metric.setflags(write=False)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "metric", metric)
        object.__setattr__(self, "_omega_inv", None)

    @classmethod
    def canonical(cls, dim, omega=None, metric=None):
        if omega is None:
            omega = canonical_omega(dim)
        if metric is None:
            metric = np.eye(dim)
        return cls(dim=dim, omega=np.asarray(omega, dtype=float), metric=np.asarray(metric, dtype=float))

    def omega_form(self, u, v):
        """omega(u, v)."""
        return float(np.asarray(u) @ self.omega @ np.asarray(v))

    def inner(self, u, v):
        return float(np.asarray(u) @ self.metric @ np.asarray(v))

    def norm(self, v):
        return float(np.sqrt(max(self.inner(v, v), 0.0)))

    def omega_inverse(self):
        if self._omega_inv is None:
            object.__setattr__(self, "_omega_inv", np.linalg.inv(self.omega))
        return self._omega_inv

    def check_point(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DimensionMismatch(f"expected a point of length {self.dim}, got shape {x.shape}")
        return x


class Poly:
    """Sparse multivariate polynomial: exponent multi-index -> coefficient.

    Immutable after construction.  Differentiation is exact; evaluation is
    vectorized over trailing batches of points.
    """

    __slots__ = ("nvars", "_terms", "_exps", "_coeffs", "_partials", "_hess_polys", "_degree")

    def __init__(self, nvars, terms=None):
        nvars = int(nvars)
        if nvars <= 0:
            raise ValidationError("polynomial needs at least one variable")
        collected = {}
        for exps, coeff in (terms or {}).items():
            key = tuple(int(e) for e in exps)
            if len(key) != nvars:
                raise DimensionMismatch(f"exponent index of length {len(key)}, expected {nvars}")
            if any(e < 0 for e in key):
                raise ValidationError("negative exponent in polynomial term")
            collected[key] = collected.get(key, 0.0) + float(coeff)
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "_terms", {k: c for k, c in collected.items() if abs(c) > COEFF_DEDUP})
        object.__setattr__(self, "_exps", None)
        object.__setattr__(self, "_coeffs", None)
        object.__setattr__(self, "_partials", None)
        object.__setattr__(self, "_hess_polys", None)
        object.__setattr__(self, "_degree", None)

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, nvars):
        return cls(nvars, {})

    @classmethod
    def constant(cls, nvars, value):
        return cls(nvars, {tuple([0] * nvars): value})

    @classmethod
    def coordinate(cls, nvars, index, coeff=1.0):
        exps = [0] * nvars
        exps[index] = 1
        return cls(nvars, {tuple(exps): coeff})

    @classmethod
    def monomial(cls, nvars, exponents, coeff):
        return cls(nvars, {tuple(exponents): coeff})

    @classmethod
    def quadratic_form(cls, matrix):
        """Polynomial x^T Q x for a square matrix Q (need not be symmetric)."""
        q = np.asarray(matrix, dtype=float)
        n = q.shape[0]
        terms = {}
        for i in range(n):
            for j in range(n):
                if q[i, j] == 0.0:
                    continue
                exps = [0] * n
                exps[i] += 1
                exps[j] += 1
                key = tuple(exps)
                terms[key] = terms.get(key, 0.0) + q[i, j]
        return cls(n, terms)

    @classmethod
    def from_records(cls, nvars, records):
        """Build from a list of {"exponents": [...], "coeff": c} records."""
        terms = {}
        for rec in records:
            key = tuple(int(e) for e in rec["exponents"])
            terms[key] = terms.get(key, 0.0) + float(rec["coeff"])
        return cls(nvars, terms)

    def to_records(self):
        return [
            {"exponents": list(exps), "coeff": coeff}
            for exps, coeff in sorted(self._terms.items())
        ]

    # -- structure ---------------------------------------------------------

    @property
    def terms(self):
        return dict(self._terms)

    def is_zero(self):
        return not self._terms

    def degree(self):
        if self._degree is None:
            deg = max((sum(e) for e in self._terms), default=0)
            object.__setattr__(self, "_degree", deg)
        return self._degree

    def _arrays(self):
        if self._exps is None:
            if self._terms:
                exps = np.array(list(self._terms.keys()), dtype=np.int64)
                coeffs = np.array(list(self._terms.values()), dtype=float)
            else:
                exps = np.zeros((0, self.nvars), dtype=np.int64)
                coeffs = np.zeros(0)
            object.__setattr__(self, "_exps", exps)
            object.__setattr__(self, "_coeffs", coeffs)
        return self._exps, self._coeffs

    # -- evaluation ---------------------------------------------------------

    def value(self, x):
        """Evaluate at a point (last axis = variables; batches allowed)."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.nvars:
            raise DimensionMismatch(f"point of length {x.shape[-1]}, expected {self.nvars}")
        exps, coeffs = self._arrays()
        if len(coeffs) == 0:
            out = np.zeros(x.shape[:-1])
        else:
            powers = x[..., None, :] ** exps
            out = np.prod(powers, axis=-1) @ coeffs
        if out.ndim == 0:
            return float(out)
        return out

    __call__ = value

    def partial(self, index):
        """Exact partial derivative with respect to variable ``index``."""
        terms = {}
        for exps, coeff in self._terms.items():
            e = exps[index]
            if e == 0:
                continue
            new = list(exps)
            new[index] = e - 1
            key = tuple(new)
            terms[key] = terms.get(key, 0.0) + coeff * e
        return Poly(self.nvars, terms)

    def _partial_list(self):
        if self._partials is None:
            object.__setattr__(self, "_partials", tuple(self.partial(i) for i in range(self.nvars)))
        return self._partials

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.nvars,):
            raise DimensionMismatch(f"point of shape {x.shape}, expected ({self.nvars},)")
        return np.array([p.value(x) for p in self._partial_list()])

    def hessian(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.nvars,):
            raise DimensionMismatch(f"point of shape {x.shape}, expected ({self.nvars},)")
        if self._hess_polys is None:
            partials = self._partial_list()
            rows = tuple(tuple(partials[i].partial(j) for j in range(i, self.nvars)) for i in range(self.nvars))
            object.__setattr__(self, "_hess_polys", rows)
        h = np.zeros((self.nvars, self.nvars))
        for i in range(self.nvars):
            for j in range(i, self.nvars):
                v = self._hess_polys[i][j - i].value(x)
                h[i, j] = v
                h[j, i] = v
        return h

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise DimensionMismatch("polynomials over different variable counts")
            return other
        return Poly.constant(self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self._terms)
        for exps, coeff in other._terms.items():
            terms[exps] = terms.get(exps, 0.0) + coeff
        return Poly(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly(self.nvars, {e: c * float(other) for e, c in self._terms.items()})
        other = self._coerce(other)
        terms = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                key = tuple(a + b for a, b in zip(e1, e2))
                terms[key] = terms.get(key, 0.0) + c1 * c2
        return Poly(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, exponent):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValidationError("polynomial powers must be non-negative integers")
        out = Poly.constant(self.nvars, 1.0)
        for _ in range(exponent):
            out = out * self
        return out

    def compose_linear(self, matrix):
        """Substitute x -> M y, returning the expanded polynomial in y."""
        m = np.asarray(matrix, dtype=float)
        if m.shape[0] != self.nvars:
            raise DimensionMismatch(f"matrix with {m.shape[0]} rows, expected {self.nvars}")
        k = m.shape[1]
        linear = []
        for i in range(self.nvars):
            terms = {}
            for j in range(k):
                if m[i, j] != 0.0:
                    exps = [0] * k
                    exps[j] = 1
                    terms[tuple(exps)] = m[i, j]
            linear.append(Poly(k, terms))
        powers = {}

        def lin_pow(i, e):
            key = (i, e)
            if key not in powers:
                powers[key] = linear[i] ** e
            return powers[key]

        out = Poly.zero(k)
        for exps, coeff in self._terms.items():
            term = Poly.constant(k, coeff)
            for i, e in enumerate(exps):
                if e:
                    term = term * lin_pow(i, e)
            out = out + term
        return out

    # -- misc -----------------------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, Poly) and self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self._terms.items())))

    def __repr__(self):
        if not self._terms:
            return f"Poly({self.nvars}, 0)"
        parts = []
        for exps, coeff in sorted(self._terms.items()):
            mono = "*".join(f"x{i}^{e}" for i, e in enumerate(exps) if e) or "1"
            parts.append(f"{coeff:g}*{mono}")
        return f"Poly({self.nvars}, {' + '.join(parts)})"
