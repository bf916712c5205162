"""Stepping rules and the run driver.

Four variants over one prox-gradient core:

  ista                 y_{k+1} = z_k,  x_{k+1} = y_{k+1}
  apm                  y_{k+1} = z_k,  x_{k+1} = y_{k+1} + (k/(k+a)) (y_{k+1} - y_k)
  mapm                 y_{k+1} = z_k if F(z_k) <= F(y_k) else y_k,
                       x_{k+1} = y_{k+1} + (k/(k+a)) (y_{k+1} - y_k)
                                 + ((k+a-1)/(k+a)) (z_k - y_{k+1})
  strongly_convex_apm  apm with constant momentum (1-sqrt(mu/L))/(1+sqrt(mu/L))

where z_k = prox_{sg}(x_k - s grad f(x_k)).  Steppers are pure: state in,
state out.  F(y_k) is computed once per iteration and cached in the state; the
mapm acceptance test compares cached values only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigurationError
from .problems import CompositeProblem, Vector, as_vector

VARIANTS = ("ista", "apm", "mapm", "strongly_convex_apm")

# Allows s = 1/L computed in floats to pass the s <= 1/L bound.
_STEP_SLACK = 1e-12


@dataclass
class SolverConfig:
    """Run configuration.

    step=None selects the canonical default s = 1/(2L) at run start.  alpha is
    ignored by ista and strongly_convex_apm; it must be >= 3 for the
    accelerated variants.
    """

    variant: str
    alpha: float = 3.0
    step: Optional[float] = None
    max_iters: int = 1000
    grad_map_tol: float = 0.0
    record_certificates: bool = False

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigurationError(
                f"unknown variant {self.variant!r}; valid: {', '.join(VARIANTS)}"
            )
        if self.variant in ("apm", "mapm") and not self.alpha >= 3.0:
            raise ConfigurationError(
                f"alpha must be >= 3 for {self.variant}, got {self.alpha}"
            )
        if self.step is not None and not self.step > 0.0:
            raise ConfigurationError(f"step must be > 0, got {self.step}")
        if self.max_iters < 0:
            raise ConfigurationError(f"max_iters must be >= 0, got {self.max_iters}")
        if self.grad_map_tol < 0.0:
            raise ConfigurationError(
                f"grad_map_tol must be >= 0, got {self.grad_map_tol}"
            )


@dataclass
class SolverState:
    """Iterates after k steps; x = y at k = 0 by construction."""

    k: int
    x: Vector
    y: Vector
    f_y: float
    z: Optional[Vector] = None


@dataclass
class IterationRecord:
    """One trace row: scalars for output plus iterates for certification."""

    k: int
    f_y: float
    grad_map_norm: float
    gap: Optional[float] = None
    accepted: Optional[bool] = None
    energy: Optional[float] = None
    slacks: Optional[dict] = None
    x: Optional[Vector] = None
    y: Optional[Vector] = None
    grad_map: Optional[Vector] = None
    f_z: Optional[float] = None


def bind_step(problem: CompositeProblem, step: Optional[float]) -> float:
    """Resolve the step size against the problem's L and enforce 0 < s <= 1/L."""
    L = problem.smooth.lipschitz
    if step is None:
        if L <= 0.0:
            raise ConfigurationError("cannot default the step size when L = 0")
        return 0.5 / L
    s = float(step)
    if s <= 0.0:
        raise ConfigurationError(f"step must be > 0, got {s}")
    if L > 0.0 and s * L > 1.0 + _STEP_SLACK:
        raise ConfigurationError(
            f"step {s} exceeds 1/L = {1.0 / L} (certificates assume s <= 1/L)"
        )
    return s


def gradient_mapping(problem: CompositeProblem, s: float, x: Vector):
    """Return (z, G) with z = prox_{sg}(x - s grad f(x)) and G = (x - z)/s.

    Both are returned so callers never recompute the prox; G vanishes exactly
    at minimizers of F.
    """
    if s <= 0.0:
        raise ConfigurationError(f"step must be > 0, got {s}")
    L = problem.smooth.lipschitz
    if L > 0.0 and s * L > 1.0 + _STEP_SLACK:
        raise ConfigurationError(f"step {s} exceeds 1/L = {1.0 / L}")
    z = problem.nonsmooth.prox(x - s * problem.smooth.gradient(x), s)
    return z, (x - z) / s


def _prox_eval(problem, s, state, prox_eval):
    """(z, G, F(z)) at state.x, computing only what the caller did not supply."""
    if prox_eval is not None:
        return prox_eval
    z, G = gradient_mapping(problem, s, state.x)
    return z, G, problem.value(z)


def ista_step(problem: CompositeProblem, s: float, state: SolverState,
              prox_eval=None) -> SolverState:
    """Unaccelerated baseline: both iterates move to the prox point."""
    z, _, f_z = _prox_eval(problem, s, state, prox_eval)
    return SolverState(k=state.k + 1, x=z, y=z, f_y=f_z, z=z)


def apm_step(problem: CompositeProblem, config: SolverConfig, state: SolverState,
             prox_eval=None) -> SolverState:
    """Accelerated step with momentum k/(k+alpha)."""
    s = bind_step(problem, config.step)
    z, _, f_z = _prox_eval(problem, s, state, prox_eval)
    k, a = state.k, config.alpha
    y_next = z
    x_next = y_next + (k / (k + a)) * (y_next - state.y)
    return SolverState(k=k + 1, x=x_next, y=y_next, f_y=f_z, z=z)


def mapm_step(problem: CompositeProblem, config: SolverConfig, state: SolverState,
              prox_eval=None) -> SolverState:
    """Monotone accelerated step.

    The prox point is accepted when F(z_k) <= F(y_k) (ties accept), so the
    cached F(y_k) sequence is nonincreasing by construction.  When every step
    accepts, the third x-update term is exactly zero and the (x, y) sequences
    coincide with apm's.
    """
    s = bind_step(problem, config.step)
    z, _, f_z = _prox_eval(problem, s, state, prox_eval)
    k, a = state.k, config.alpha
    if f_z <= state.f_y:
        y_next, f_next = z, f_z
    else:
        y_next, f_next = state.y, state.f_y
    x_next = (y_next + (k / (k + a)) * (y_next - state.y)
              + ((k + a - 1.0) / (k + a)) * (z - y_next))
    return SolverState(k=k + 1, x=x_next, y=y_next, f_y=f_next, z=z)


def constant_momentum(mu: float, lipschitz: float) -> float:
    """(1 - sqrt(mu/L)) / (1 + sqrt(mu/L)), the known-mu extrapolation factor."""
    if mu <= 0.0:
        raise ConfigurationError(
            "strongly_convex_apm needs mu > 0 (the mu = 0 limit coefficient 1 "
            "is not covered by the known-mu rate)"
        )
    r = math.sqrt(mu / lipschitz)
    return (1.0 - r) / (1.0 + r)


def strongly_convex_apm_step(problem: CompositeProblem, s: float,
                             state: SolverState, prox_eval=None) -> SolverState:
    """apm-shaped step with the constant known-mu momentum coefficient."""
    beta = constant_momentum(problem.smooth.strong_convexity,
                             problem.smooth.lipschitz)
    z, _, f_z = _prox_eval(problem, s, state, prox_eval)
    y_next = z
    x_next = y_next + beta * (y_next - state.y)
    return SolverState(k=state.k + 1, x=x_next, y=y_next, f_y=f_z, z=z)


def run(problem: CompositeProblem, config: SolverConfig, x0) -> list:
    """Drive a solver from x_0 = y_0 and return one IterationRecord per k.

    Stops after max_iters steps or as soon as ||G_s(x_k)|| <= grad_map_tol.
    A record is emitted for every visited k including k = 0, so a full run of
    max_iters steps yields max_iters + 1 records.  When record_certificates is
    set and the problem knows its minimizer and optimum, energies and
    certificate slacks are filled in afterwards via the certificate engine.
    """
    x0 = as_vector(x0, problem.dim)
    s = bind_step(problem, config.step)
    if config.variant == "strongly_convex_apm":
        constant_momentum(problem.smooth.strong_convexity, problem.smooth.lipschitz)

    f_star = problem.known_optimum
    state = SolverState(k=0, x=x0, y=x0, f_y=problem.value(x0))
    records = []
    while True:
        z, G = gradient_mapping(problem, s, state.x)
        f_z = problem.value(z)
        gnorm = float(np.linalg.norm(G))
        records.append(IterationRecord(
            k=state.k,
            f_y=state.f_y,
            grad_map_norm=gnorm,
            gap=(state.f_y - f_star) if f_star is not None else None,
            accepted=(f_z <= state.f_y) if config.variant == "mapm" else None,
            x=state.x,
            y=state.y,
            grad_map=G,
            f_z=f_z,
        ))
        if gnorm <= config.grad_map_tol or state.k >= config.max_iters:
            break
        prox_eval = (z, G, f_z)
        if config.variant == "ista":
            state = ista_step(problem, s, state, prox_eval)
        elif config.variant == "apm":
            state = apm_step(problem, config, state, prox_eval)
        elif config.variant == "mapm":
            state = mapm_step(problem, config, state, prox_eval)
        else:
            state = strongly_convex_apm_step(problem, s, state, prox_eval)

    if (config.record_certificates and problem.known_minimizer is not None
            and problem.known_optimum is not None):
        _fill_certificates(problem, config, s, records)
    return records


def _fill_certificates(problem, config, s, records):
    from . import certificates as cert

    ctx = cert.EnergyContext(
        alpha=config.alpha,
        s=s,
        mu=problem.smooth.strong_convexity,
        lipschitz=problem.smooth.lipschitz,
        x_star=problem.known_minimizer,
        f_star=problem.known_optimum,
    )
    if config.variant in ("apm", "mapm"):
        for rec in records:
            rec.energy = cert.energy(ctx, rec.k, rec.x, rec.y, rec.f_y)
    reports = cert.certify_trace(ctx, records, variant=config.variant)
    by_k: dict = {}
    for rep in reports:
        if rep.status == "ok":
            by_k.setdefault(rep.k, {})[rep.name] = rep.slack
    for rec in records:
        if rec.k in by_k:
            rec.slacks = by_k[rec.k]
