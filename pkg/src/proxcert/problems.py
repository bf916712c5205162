"""Composite problems: smooth oracles, prox-friendly regularizers, and generators.

A problem is min F(x) = f(x) + g(x) over real coordinate vectors, with f convex
and L-smooth (optionally mu-strongly convex) and g convex with a cheap proximal
operator.  Oracles are plain callables bundled in frozen dataclasses; problem
objects are immutable and safe to share between concurrent runs.
"""

from __future__ import annotations

import dataclasses
import hashlib
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numpy.typing import NDArray

from .errors import RejectedInputError

Vector = NDArray[np.float64]

# Scale-aware tolerances for validating generator inputs.
_SYM_TOL = 1e-12
_EIG_TOL = 1e-10


def as_vector(x, dim: Optional[int] = None) -> Vector:
    """Validate and convert `x` to a finite 1-D float64 vector."""
    v = np.asarray(x, dtype=np.float64)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1 or v.size < 1:
        raise RejectedInputError(f"expected a 1-D vector, got shape {v.shape}")
    if dim is not None and v.size != dim:
        raise RejectedInputError(f"expected a vector of dim {dim}, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise RejectedInputError("vector has non-finite coordinates")
    return v


@dataclass(frozen=True)
class SmoothOracle:
    """First-order oracle for the smooth term f.

    `lipschitz` is the gradient Lipschitz constant L and `strong_convexity` the
    declared mu; L >= mu >= 0.  mu is never estimated from data: unknown strong
    convexity is declared as 0.
    """

    value: Callable[[Vector], float]
    gradient: Callable[[Vector], Vector]
    lipschitz: float
    strong_convexity: float = 0.0

    def __post_init__(self):
        if not (self.lipschitz >= self.strong_convexity >= 0.0):
            raise RejectedInputError(
                f"need L >= mu >= 0, got L={self.lipschitz}, mu={self.strong_convexity}"
            )


@dataclass(frozen=True)
class ProxOracle:
    """Oracle for the nonsmooth term g: value (may be +inf) and prox.

    prox(v, t) returns argmin_u { g(u) + ||u - v||^2 / (2 t) } for t > 0.
    """

    value: Callable[[Vector], float]
    prox: Callable[[Vector, float], Vector]


@dataclass(frozen=True)
class CompositeProblem:
    """An immutable f + g instance, optionally carrying a known minimizer."""

    smooth: SmoothOracle
    nonsmooth: ProxOracle
    dim: int
    known_minimizer: Optional[Vector] = None
    known_optimum: Optional[float] = None
    content_hash: Optional[str] = None
    name: Optional[str] = None

    def __post_init__(self):
        if self.dim < 1:
            raise RejectedInputError(f"dim must be >= 1, got {self.dim}")
        if self.known_minimizer is not None:
            x_star = as_vector(self.known_minimizer, self.dim)
            object.__setattr__(self, "known_minimizer", x_star)
            scale = 1.0 + float(np.linalg.norm(x_star))
            if self._grad_map_norm(x_star) > 1e-8 * scale:
                raise RejectedInputError(
                    "known_minimizer fails the gradient-mapping fixed-point check"
                )
            if self.known_optimum is not None:
                f_star = float(self.known_optimum)
                if abs(self.value(x_star) - f_star) > 1e-10 * (1.0 + abs(f_star)):
                    raise RejectedInputError(
                        "known_optimum is inconsistent with F(known_minimizer)"
                    )

    def value(self, x: Vector) -> float:
        """F(x) = f(x) + g(x); may be +inf outside dom(g)."""
        return float(self.smooth.value(x)) + float(self.nonsmooth.value(x))

    def with_reference(self, x_star, f_star: float) -> "CompositeProblem":
        """Return a copy with known_minimizer/known_optimum set (and validated)."""
        return dataclasses.replace(
            self, known_minimizer=as_vector(x_star, self.dim), known_optimum=float(f_star)
        )

    def _grad_map_norm(self, x: Vector) -> float:
        # Gradient-mapping norm at the canonical step 1/(2L); inlined to keep
        # this module free of a dependency on the solvers module.
        s = 0.5 / self.smooth.lipschitz if self.smooth.lipschitz > 0 else 1.0
        z = self.nonsmooth.prox(x - s * self.smooth.gradient(x), s)
        return float(np.linalg.norm(x - z)) / s


# ---------------------------------------------------------------------------
# Proximal operators and regularizers
# ---------------------------------------------------------------------------

def prox_l1(v: Vector, t: float) -> Vector:
    """Coordinatewise soft threshold: sign(v_i) * max(|v_i| - t, 0)."""
    if t <= 0:
        raise RejectedInputError(f"threshold t must be > 0, got {t}")
    v = as_vector(v)
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def prox_box(v: Vector, lo, hi) -> Vector:
    """Clamp v into [lo, hi] coordinatewise (prox of the box indicator)."""
    v = as_vector(v)
    lo = as_vector(lo, v.size)
    hi = as_vector(hi, v.size)
    if np.any(lo > hi):
        raise RejectedInputError("box bounds must satisfy lo <= hi coordinatewise")
    return np.clip(v, lo, hi)


def prox_zero(v: Vector, t: float) -> Vector:
    """Prox of g = 0 is the identity."""
    if t <= 0:
        raise RejectedInputError(f"threshold t must be > 0, got {t}")
    return as_vector(v)


def l1_regularizer(lam: float) -> ProxOracle:
    """g(x) = lam * ||x||_1 with its soft-threshold prox."""
    if lam <= 0:
        raise RejectedInputError(f"l1 weight must be > 0, got {lam}")
    return ProxOracle(
        value=lambda x: lam * float(np.sum(np.abs(x))),
        prox=lambda v, t: prox_l1(v, t * lam),
    )


def box_regularizer(lo, hi) -> ProxOracle:
    """Indicator of the box [lo, hi]: 0 inside, +inf outside; prox is the clamp."""
    lo = as_vector(lo)
    hi = as_vector(hi, lo.size)
    if np.any(lo > hi):
        raise RejectedInputError("box bounds must satisfy lo <= hi coordinatewise")

    def value(x: Vector) -> float:
        return 0.0 if bool(np.all(x >= lo) and np.all(x <= hi)) else math.inf

    return ProxOracle(value=value, prox=lambda v, t: prox_box(v, lo, hi))


def zero_regularizer() -> ProxOracle:
    """g = 0; reduces the proximal step to a plain gradient step."""
    return ProxOracle(value=lambda x: 0.0, prox=prox_zero)


# ---------------------------------------------------------------------------
# Problem generators
# ---------------------------------------------------------------------------

def _content_hash(kind: str, *arrays) -> str:
    """Hash of the defining data in a canonical byte order (little-endian f8)."""
    h = hashlib.sha256()
    h.update(kind.encode("ascii"))
    for a in arrays:
        a = np.ascontiguousarray(np.asarray(a, dtype=np.float64))
        h.update(np.array(a.shape, dtype="<i8").tobytes())
        h.update(a.astype("<f8").tobytes())
    return h.hexdigest()


def _quadratic_smooth(Q: np.ndarray, b: Vector) -> SmoothOracle:
    """Smooth oracle for f(x) = 1/2 x'Qx - b'x with L, mu from the spectrum of Q."""
    Q = np.asarray(Q, dtype=np.float64)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
        raise RejectedInputError(f"Q must be square, got shape {Q.shape}")
    b = as_vector(b, Q.shape[0])
    scale = 1.0 + float(np.max(np.abs(Q))) if Q.size else 1.0
    if float(np.max(np.abs(Q - Q.T))) > _SYM_TOL * scale:
        raise RejectedInputError("Q is not symmetric within tolerance")
    eigs = np.linalg.eigvalsh(Q)
    lam_min, lam_max = float(eigs[0]), float(eigs[-1])
    if lam_min < -_EIG_TOL * (1.0 + abs(lam_max)):
        raise RejectedInputError(f"Q is indefinite (lambda_min = {lam_min})")
    mu = lam_min if lam_min > _EIG_TOL * (1.0 + abs(lam_max)) else 0.0
    return SmoothOracle(
        value=lambda x: 0.5 * float(x @ (Q @ x)) - float(b @ x),
        gradient=lambda x: Q @ x - b,
        lipschitz=max(lam_max, 0.0),
        strong_convexity=mu,
    )


def quadratic_problem(Q, b) -> CompositeProblem:
    """f(x) = 1/2 x'Qx - b'x with g = 0.

    Q must be symmetric positive semidefinite.  When Q is positive definite the
    minimizer Q^{-1} b and its objective value are attached to the problem.
    """
    Q = np.asarray(Q, dtype=np.float64)
    smooth = _quadratic_smooth(Q, b)
    b = as_vector(b, Q.shape[0])
    x_star = f_star = None
    if smooth.strong_convexity > 0.0:
        x_star = np.linalg.solve(Q, b)
        f_star = smooth.value(x_star)
    return CompositeProblem(
        smooth=smooth,
        nonsmooth=zero_regularizer(),
        dim=Q.shape[0],
        known_minimizer=x_star,
        known_optimum=f_star,
        content_hash=_content_hash("quadratic", Q, b),
    )


def box_quadratic_problem(Q, b, lo, hi) -> CompositeProblem:
    """Strongly convex quadratic f with g the indicator of the box [lo, hi]."""
    Q = np.asarray(Q, dtype=np.float64)
    smooth = _quadratic_smooth(Q, b)
    b = as_vector(b, Q.shape[0])
    lo = as_vector(lo, Q.shape[0])
    hi = as_vector(hi, Q.shape[0])
    return CompositeProblem(
        smooth=smooth,
        nonsmooth=box_regularizer(lo, hi),
        dim=Q.shape[0],
        content_hash=_content_hash("box_quadratic", Q, b, lo, hi),
    )


def _power_iteration_lmax(M: np.ndarray, rel_tol: float = 1e-10,
                          max_iters: int = 10_000) -> float:
    """Largest eigenvalue of a symmetric PSD matrix by power iteration.

    Deterministic: the start vector comes from a fixed-seed PCG64 stream, so the
    estimate is reproducible bit-for-bit on a given platform.
    """
    rng = np.random.default_rng(0)
    v = rng.standard_normal(M.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iters):
        w = M @ v
        nrm = float(np.linalg.norm(w))
        if nrm == 0.0:
            return 0.0
        v = w / nrm
        lam_new = float(v @ (M @ v))
        if abs(lam_new - lam) <= rel_tol * max(abs(lam_new), 1e-300):
            return lam_new
        lam = lam_new
    return lam


def lasso_problem(A, b, lam: float) -> CompositeProblem:
    """f(x) = 1/2 ||Ax - b||^2 with g(x) = lam * ||x||_1.

    L = lambda_max(A'A) via power iteration; mu = lambda_min(A'A), which is 0
    whenever A has a nontrivial null space.  Reference fields are left unset
    (the harness computes them by a long run).
    """
    if lam <= 0:
        raise RejectedInputError(f"lasso weight lam must be > 0, got {lam}")
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise RejectedInputError(f"A must be a matrix, got shape {A.shape}")
    m, n = A.shape
    b = as_vector(b, m)
    gram = A.T @ A
    lipschitz = _power_iteration_lmax(gram)
    if m < n:
        mu = 0.0
    else:
        lam_min = float(np.linalg.eigvalsh(gram)[0])
        mu = lam_min if lam_min > _EIG_TOL * (1.0 + lipschitz) else 0.0
    smooth = SmoothOracle(
        value=lambda x: 0.5 * float(np.sum((A @ x - b) ** 2)),
        gradient=lambda x: A.T @ (A @ x - b),
        lipschitz=max(lipschitz, mu),
        strong_convexity=mu,
    )
    return CompositeProblem(
        smooth=smooth,
        nonsmooth=l1_regularizer(lam),
        dim=n,
        content_hash=_content_hash("lasso", A, b, np.array([lam])),
    )


def finite_difference_gradient_check(oracle: SmoothOracle, x: Vector,
                                     h: float) -> float:
    """Max relative mismatch between central differences and oracle.gradient(x).

    The relative error in coordinate i is measured against 1 + |gradient(x)_i|
    so a zero gradient stays well defined.
    """
    if h <= 0:
        raise RejectedInputError(f"step h must be > 0, got {h}")
    x = as_vector(x)
    g = oracle.gradient(x)
    worst = 0.0
    for i in range(x.size):
        step = np.zeros_like(x)
        step[i] = h
        diff = (oracle.value(x + step) - oracle.value(x - step)) / (2.0 * h)
        worst = max(worst, abs(diff - float(g[i])) / (1.0 + abs(float(g[i]))))
    return worst
