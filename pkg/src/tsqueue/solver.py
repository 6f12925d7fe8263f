"""Recover the Lagrange multiplier beta from a target mean queue size.

The constraint "model mean equals A" is solved by Newton-Raphson with the
closed-form step assembled from three zeta ratios, safeguarded by step
halving and, when Newton misbehaves, bisection on a bracket grown
geometrically from the initial guess.  The mean is strictly decreasing in
beta, so the bracket always exists and the fallback cannot fail.
"""

import math
from dataclasses import dataclass
from typing import Optional

from .distribution import QueueModel, mean
from .errors import DegenerateStep, DomainError, NoConvergence
from .zeta import scaled_hurwitz_zeta

__all__ = ["SolverConfig", "SolverResult", "mean_residual", "newton_step", "solve_beta"]


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for solve_beta; defaults suit the whole (q, A) range."""

    beta0: Optional[float] = None
    tol: float = 1e-10
    max_iter: int = 100

    def __post_init__(self):
        if self.beta0 is not None and not (
            math.isfinite(self.beta0) and self.beta0 > 0.0
        ):
            raise DomainError(f"beta0 must be positive, got {self.beta0}")
        if not (math.isfinite(self.tol) and self.tol > 0.0):
            raise DomainError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise DomainError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass(frozen=True)
class SolverResult:
    beta: float
    iterations: int
    residual: float
    fallback_used: bool


def _validate_target(q, A):
    if not (math.isfinite(q) and 0.5 < q < 1.0):
        raise DomainError(f"entropy index q must lie strictly in (1/2, 1), got {q}")
    if not (math.isfinite(A) and A > 0.0):
        raise DomainError(f"target mean must be positive, got {A}")


def mean_residual(q: float, beta: float, A: float) -> float:
    """mean(q, beta) - A: strictly decreasing in beta, zero at the root."""
    _validate_target(q, A)
    return mean(QueueModel(q, beta)) - A


def newton_step(q: float, beta: float, A: float) -> float:
    """Closed-form Newton increment for the mean constraint.

    Written in terms of the scaled sums S(sigma, c) = c**sigma *
    zeta(sigma, c); the common c**(1-s) prefactor of the raw zeta form
    cancels exactly, so the step is computable even where the individual
    zeta values underflow.
    """
    _validate_target(q, A)
    model = QueueModel(q, beta)
    s, c = model.s, model.c
    s0 = scaled_hurwitz_zeta(s, c)
    s1 = scaled_hurwitz_zeta(s - 1.0, c)
    s2 = scaled_hurwitz_zeta(s + 1.0, c)
    r = A / c
    denominator = s1 - (2.0 + r) * s0 + (1.0 + r) * s2
    if abs(denominator) < 1e-300:
        raise DegenerateStep(
            f"Newton denominator {denominator} is numerically zero "
            f"at q={q}, beta={beta}, A={A}"
        )
    numerator = s1 - (1.0 + r) * s0
    return beta * (1.0 - q) * numerator / denominator


def solve_beta(q: float, A: float, config: Optional[SolverConfig] = None) -> SolverResult:
    """Find beta with mean(q, beta) = A to within tol * max(1, A).

    Newton iterates from beta0 (default ln((A+1)/A), the exact q -> 1
    solution); any iterate leaving (0, inf) or increasing the residual is
    halved, and five consecutive halvings hand over to bisection.
    """
    cfg = config if config is not None else SolverConfig()
    _validate_target(q, A)
    beta0 = cfg.beta0 if cfg.beta0 is not None else math.log1p(1.0 / A)
    target = cfg.tol * max(1.0, A)

    beta = beta0
    resid = mean_residual(q, beta, A)
    iterations = 0
    for _ in range(cfg.max_iter):
        iterations += 1
        try:
            step = newton_step(q, beta, A)
        except DegenerateStep:
            return _bisect(q, A, beta0, cfg, iterations)
        candidate = beta + step
        halvings = 0
        while True:
            if candidate > 0.0 and math.isfinite(candidate):
                new_resid = mean_residual(q, candidate, A)
                if abs(new_resid) <= abs(resid):
                    break
            halvings += 1
            if halvings > 5:
                return _bisect(q, A, beta0, cfg, iterations)
            step *= 0.5
            candidate = beta + step
        moved = abs(candidate - beta)
        beta, resid = candidate, new_resid
        if moved <= cfg.tol * beta and abs(resid) <= target:
            return SolverResult(
                beta=beta, iterations=iterations, residual=abs(resid),
                fallback_used=False,
            )
    raise NoConvergence(
        f"beta solve did not converge in {cfg.max_iter} iterations "
        f"(beta={beta}, residual={resid})",
        beta=beta, residual=abs(resid), iterations=iterations,
    )


def _bisect(q, A, beta0, cfg, iterations):
    """Bisection fallback on a bracket expanded geometrically from beta0."""
    target = cfg.tol * max(1.0, A)
    lo = hi = beta0
    r0 = mean_residual(q, beta0, A)
    iterations += 1
    if r0 == 0.0:
        return SolverResult(beta0, iterations, 0.0, True)
    if r0 > 0.0:  # mean too large: the root lies above beta0
        for _ in range(1100):
            hi *= 2.0
            iterations += 1
            if not math.isfinite(hi):
                break
            if mean_residual(q, hi, A) <= 0.0:
                break
        else:
            hi = math.inf
    else:
        for _ in range(1100):
            lo *= 0.5
            iterations += 1
            if lo <= 0.0:
                break
            if mean_residual(q, lo, A) >= 0.0:
                break
        else:
            lo = 0.0
    if not (math.isfinite(hi) and lo > 0.0):
        raise NoConvergence(
            f"could not bracket the root from beta0={beta0}",
            beta=beta0, residual=abs(r0), iterations=iterations,
        )

    beta = 0.5 * (lo + hi)
    for _ in range(4096):
        iterations += 1
        r = mean_residual(q, beta, A)
        if r > 0.0:
            lo = beta
        elif r < 0.0:
            hi = beta
        else:
            return SolverResult(beta, iterations, 0.0, True)
        if (hi - lo) <= cfg.tol * beta and abs(r) <= target:
            return SolverResult(beta, iterations, abs(r), True)
        new_beta = 0.5 * (lo + hi)
        if new_beta == beta:  # interval exhausted at float resolution
            if abs(r) <= target:
                return SolverResult(beta, iterations, abs(r), True)
            raise NoConvergence(
                f"bisection stalled at beta={beta} with residual {r}",
                beta=beta, residual=abs(r), iterations=iterations,
            )
        beta = new_beta
    raise NoConvergence(
        f"bisection exceeded its iteration budget (beta={beta})",
        beta=beta, residual=abs(r), iterations=iterations,
    )
