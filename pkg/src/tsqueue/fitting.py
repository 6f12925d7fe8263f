"""Correspondence data generation and the two candidate rho(beta) laws.

``generate_correspondence`` walks a log-spaced grid of target means,
recovering beta from the entropy model and rho from the storage model at
the matching Hurst parameter, so each record carries both
parameterizations of the same operating point.

Two fit families are provided for rho as a function of beta:

    Model I   rho = a + b * exp(-beta)                (linear least squares)
    Model II  rho = c * beta**(-eta) + d * exp(-mu*beta)
              (damped Gauss-Newton, analytic Jacobian, eta and mu kept
               positive through a log reparameterization)
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NoConvergence, SingularFit
from .norros import hurst_from_q, norros_rho
from .solver import solve_beta

__all__ = [
    "CorrespondenceRecord",
    "FitReport",
    "generate_correspondence",
    "fit_model_i",
    "fit_model_ii",
    "evaluate_fit",
]

_GRADIENT_TOL = 1e-8
_MAX_GN_ITER = 500


@dataclass(frozen=True)
class CorrespondenceRecord:
    """One (mean, beta, rho, q) row linking the two parameterizations."""

    mean: float
    beta: float
    rho: float
    q: float


@dataclass(frozen=True)
class FitReport:
    """Fitted model, parameters in natural form, and goodness of fit."""

    model_kind: str  # "I" or "II"
    params: tuple
    rmse: float
    r_squared: float
    iterations: int
    converged: bool


def generate_correspondence(q, mean_min=0.1, mean_max=100.0, points=50):
    """Records for a log-spaced mean grid, sorted by ascending mean."""
    if not (math.isfinite(q) and 0.5 < q < 1.0):
        raise DomainError(f"entropy index q must lie strictly in (1/2, 1), got {q}")
    if not (0.0 < mean_min < mean_max):
        raise DomainError(
            f"need 0 < mean_min < mean_max, got {mean_min}, {mean_max}"
        )
    points = int(points)
    if points < 2:
        raise DomainError(f"need at least 2 grid points, got {points}")
    hurst = hurst_from_q(q)
    records = []
    for target in np.geomspace(mean_min, mean_max, points):
        target = float(target)
        try:
            beta = solve_beta(q, target).beta
        except NoConvergence as exc:
            raise NoConvergence(
                f"beta solve failed at mean={target}: {exc}",
                beta=exc.beta, residual=exc.residual, iterations=exc.iterations,
            ) from exc
        rho = norros_rho(target, hurst)
        records.append(CorrespondenceRecord(mean=target, beta=beta, rho=rho, q=q))
    return records


def _as_arrays(data, min_points):
    pairs = [(float(b), float(r)) for b, r in data]
    if len(pairs) < min_points:
        raise DomainError(f"need at least {min_points} data points, got {len(pairs)}")
    arr = np.asarray(pairs, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("data contains non-finite values")
    return arr[:, 0], arr[:, 1]


def _goodness(rho, predicted):
    residuals = rho - predicted
    rmse = float(np.sqrt(np.mean(residuals**2)))
    ss_res = float(residuals @ residuals)
    ss_tot = float(np.sum((rho - rho.mean()) ** 2))
    if ss_tot > 0.0:
        r_squared = 1.0 - ss_res / ss_tot
    else:
        r_squared = 1.0 if ss_res == 0.0 else -math.inf
    return rmse, r_squared


def fit_model_i(data) -> FitReport:
    """Exact least-squares fit of rho = a + b exp(-beta)."""
    beta, rho = _as_arrays(data, min_points=3)
    regressor = np.exp(-beta)
    if np.ptp(regressor) == 0.0:
        raise SingularFit("all regressor values exp(-beta) are identical")
    design = np.column_stack([np.ones_like(regressor), regressor])
    coeffs, _, rank, _ = np.linalg.lstsq(design, rho, rcond=None)
    if rank < 2:
        raise SingularFit("design matrix is rank deficient")
    a, b = (float(v) for v in coeffs)
    rmse, r_squared = _goodness(rho, a + b * regressor)
    return FitReport("I", (a, b), rmse, r_squared, iterations=1, converged=True)


# log_eta and log_mu are kept inside +-50 so eta, mu never collapse to 0.0
# or inf in doubles; the bound is far outside any data-supported value.
_LOG_BOUND = 50.0


def _model_ii_predict(theta, beta):
    c, log_eta, d, log_mu = theta
    eta, mu = math.exp(log_eta), math.exp(log_mu)
    with np.errstate(over="ignore", under="ignore"):
        power = beta ** (-eta)
        decay = np.exp(-mu * beta)
        prediction = c * power + d * decay
    return prediction, (power, decay, eta, mu)


def _model_ii_jacobian(theta, beta, parts):
    c, _, d, _ = theta
    power, decay, eta, mu = parts
    return np.column_stack([
        power,
        -c * eta * np.log(beta) * power,
        decay,
        -d * mu * beta * decay,
    ])


def _model_ii_starts(beta, rho):
    """Deterministic start points; each term's parameters come from the
    regime where that term dominates, plus a Model-I-like start so the
    optimizer can reach nearly-pure-exponential solutions."""
    order = np.argsort(beta)
    b_sorted, r_sorted = beta[order], rho[order]
    half = max(len(b_sorted) // 2, 2)
    low_b, low_r = b_sorted[:half], r_sorted[:half]
    high_b, high_r = b_sorted[-half:], r_sorted[-half:]
    rho_scale = max(float(np.max(np.abs(r_sorted))), 1e-6)

    # decay rate and amplitude from ln rho vs beta on the low-beta half
    d0, mu0 = rho_scale, 1.0
    mask = low_r > 0.0
    if mask.sum() >= 2:
        slope, intercept = np.polyfit(low_b[mask], np.log(low_r[mask]), 1)
        if math.isfinite(slope) and slope < 0.0:
            mu0 = min(max(-float(slope), 1e-2), 1e2)
        if math.isfinite(intercept):
            d0 = float(np.exp(np.clip(intercept, -30.0, 30.0)))

    # power-law amplitude and exponent from ln rho vs ln beta on the
    # high-beta half
    c0, eta0 = 1e-3 * rho_scale, 1.0
    mask = high_r > 0.0
    if mask.sum() >= 2:
        slope, intercept = np.polyfit(np.log(high_b[mask]), np.log(high_r[mask]), 1)
        if math.isfinite(slope):
            eta0 = min(max(-float(slope), 1e-2), 1e2)
        if math.isfinite(intercept):
            c0 = float(np.exp(np.clip(intercept, -30.0, 30.0)))

    # Model-I-like start: constant-ish power term plus unit-rate decay
    design = np.column_stack([np.ones_like(b_sorted), np.exp(-b_sorted)])
    coeffs, _, rank, _ = np.linalg.lstsq(design, r_sorted, rcond=None)
    a_full, b_full = (float(v) for v in coeffs) if rank == 2 else (0.0, rho_scale)

    starts = [
        np.array([c0, math.log(eta0), d0, 0.0]),
        np.array([c0, math.log(eta0), d0, math.log(mu0)]),
        np.array([a_full, math.log(1e-2), max(b_full, 1e-3 * rho_scale), math.log(mu0)]),
    ]
    return starts


def _clamp_theta(theta):
    theta[1] = min(max(theta[1], -_LOG_BOUND), _LOG_BOUND)
    theta[3] = min(max(theta[3], -_LOG_BOUND), _LOG_BOUND)
    return theta


def _gauss_newton(theta, beta, rho):
    """One damped Gauss-Newton run; returns (converged, sse, theta, iters)."""
    theta = _clamp_theta(theta.copy())
    lam = 1e-3
    n = len(beta)
    predicted, parts = _model_ii_predict(theta, beta)
    residuals = rho - predicted
    sse = float(residuals @ residuals)
    if not math.isfinite(sse):
        return False, math.inf, theta, 1
    best_sse, best_theta = sse, theta.copy()
    for iteration in range(1, _MAX_GN_ITER + 1):
        jac = _model_ii_jacobian(theta, beta, parts)
        gradient = jac.T @ residuals
        rmse = math.sqrt(sse / n)
        if sse < best_sse:
            best_sse, best_theta = sse, theta.copy()
        if np.max(np.abs(gradient)) <= _GRADIENT_TOL * (1.0 + rmse):
            return True, sse, theta, iteration
        jtj = jac.T @ jac
        damping = np.diag(np.clip(np.diag(jtj), 1e-12, None))
        try:
            delta = np.linalg.solve(jtj + lam * damping, gradient)
        except np.linalg.LinAlgError:
            lam *= 10.0
            if lam > 1e14:
                return False, best_sse, best_theta, iteration
            continue
        trial = _clamp_theta(theta + delta)
        trial_pred, trial_parts = _model_ii_predict(trial, beta)
        trial_res = rho - trial_pred
        with np.errstate(over="ignore", invalid="ignore"):
            trial_sse = float(trial_res @ trial_res)
        if math.isfinite(trial_sse) and trial_sse <= sse:
            step_small = np.max(np.abs(trial - theta)) <= 1e-15 * (
                1.0 + np.max(np.abs(theta))
            )
            theta, predicted, parts = trial, trial_pred, trial_parts
            residuals, sse = trial_res, trial_sse
            lam = max(lam * 0.1, 1e-14)
            if step_small:
                return True, sse, theta, iteration
        else:
            lam *= 10.0
            if lam > 1e14:
                return False, best_sse, best_theta, iteration
    return False, best_sse, best_theta, _MAX_GN_ITER


def fit_model_ii(data) -> FitReport:
    """Damped Gauss-Newton fit of rho = c beta**(-eta) + d exp(-mu beta).

    Runs from a small set of deterministic start points (the problem has
    genuine local minima, e.g. on nearly pure-exponential data) and
    returns the best converged solution.
    """
    beta, rho = _as_arrays(data, min_points=5)
    if np.any(beta <= 0.0):
        raise DomainError("Model II requires all beta > 0")
    if np.ptp(beta) == 0.0:
        raise SingularFit("all beta values are identical")

    best_converged = None
    best_any = None
    for start in _model_ii_starts(beta, rho):
        converged, sse, theta, iterations = _gauss_newton(start, beta, rho)
        candidate = (sse, theta, iterations)
        if best_any is None or sse < best_any[0]:
            best_any = candidate
        if converged and (best_converged is None or sse < best_converged[0]):
            best_converged = candidate
    if best_converged is not None:
        sse, theta, iterations = best_converged
        return _model_ii_report(theta, beta, rho, iterations, converged=True)
    sse, theta, iterations = best_any
    report = _model_ii_report(theta, beta, rho, iterations, converged=False)
    raise NoConvergence(
        f"Model II fit did not converge (best rmse={report.rmse})", report=report
    )


def _model_ii_report(theta, beta, rho, iterations, converged):
    c, log_eta, d, log_mu = theta
    predicted, _ = _model_ii_predict(theta, beta)
    rmse, r_squared = _goodness(rho, predicted)
    params = (float(c), math.exp(log_eta), float(d), math.exp(log_mu))
    return FitReport("II", params, rmse, r_squared, iterations, converged)


def evaluate_fit(report: FitReport, beta: float) -> float:
    """Predicted rho at one beta from a converged fit report."""
    if not report.converged:
        raise DomainError("cannot evaluate a fit that did not converge")
    beta = float(beta)
    if not math.isfinite(beta):
        raise DomainError(f"beta must be finite, got {beta}")
    if report.model_kind == "I":
        a, b = report.params
        return a + b * math.exp(-beta)
    if report.model_kind == "II":
        if beta <= 0.0:
            raise DomainError(f"Model II prediction requires beta > 0, got {beta}")
        c, eta, d, mu = report.params
        return c * beta ** (-eta) + d * math.exp(-mu * beta)
    raise DomainError(f"unknown model kind {report.model_kind!r}")
