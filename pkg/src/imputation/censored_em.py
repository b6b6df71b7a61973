"""
EM imputation of rounded zeros in additive log-ratio coordinates.

Every part j is expressed against a reference part r that is never zero
(revenue, x5, in the accounting panel): y_j = log(x_j / x_r). A zero in part j
is a left-censored y_j lying below log(DL_j / x_r). The log-ratio coordinates
are modeled as jointly normal:

  E-step: for each row, the censored coordinates are conditioned on the
          observed ones, then replaced by the mean of that conditional normal
          truncated above at the censoring bound (Mills-ratio formula, with the
          standardized bound clamped to [-8, 8]).
  M-step: mean vector and covariance are re-estimated from the completed
          coordinates plus the truncated variances of the censored cells.

Convergence is declared when the relative change of the stacked mean and
covariance parameters drops below `tol`.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from src.errors import DataError, NumericalError, UnimputablePartError
from src.imputation.zeros import DetectionLimits, as_part_rows

logger = logging.getLogger(__name__)

REVENUE_PART = 4
BOUND_CLAMP = 8.0
# starting value for censored cells, as a fraction of DL
START_FRACTION = 0.65


@dataclass(frozen=True)
class EMReport:
    converged: bool
    iterations: int
    change_norm: float
    history: tuple[float, ...]
    n_imputed: int
    reference_part: int

    def to_dict(self):
        return {
            "converged": self.converged,
            "iterations": self.iterations,
            "change_norm": self.change_norm,
            "n_imputed": self.n_imputed,
            "reference_part": f"x{self.reference_part + 1}",
        }


@dataclass(frozen=True, eq=False)
class ImputationResult:
    rows: np.ndarray
    report: EMReport
    method: str = field(default="em")


def _stack(mu, sigma):
    return np.concatenate([mu, sigma.ravel()])


def _m_step(y, v):
    n = y.shape[0]
    mu = y.mean(axis=0)
    dev = y - mu
    sigma = dev.T @ dev / n + np.diag(v.mean(axis=0))
    return mu, sigma


def _e_step(y_obs, censored, bounds, mu, sigma):
    """Conditional truncated-normal means and variances for censored cells."""
    y = y_obs.copy()
    v = np.zeros_like(y_obs)
    patterns = np.unique(censored, axis=0)
    for pattern in patterns:
        if not pattern.any():
            continue
        rows = np.nonzero((censored == pattern).all(axis=1))[0]
        c = pattern
        o = ~pattern
        if o.any():
            s_oo_inv = np.linalg.pinv(sigma[np.ix_(o, o)], hermitian=True)
            coef = sigma[np.ix_(c, o)] @ s_oo_inv
            m = mu[c] + (y_obs[np.ix_(rows, o)] - mu[o]) @ coef.T
            cond_cov = sigma[np.ix_(c, c)] - coef @ sigma[np.ix_(o, c)]
        else:
            m = np.broadcast_to(mu[c], (rows.size, int(c.sum())))
            cond_cov = sigma[np.ix_(c, c)]
        sd = np.sqrt(np.maximum(np.diag(cond_cov), np.finfo(float).tiny))
        bound = bounds[np.ix_(rows, c)]
        b = np.clip((bound - m) / sd, -BOUND_CLAMP, BOUND_CLAMP)
        mills = np.exp(norm.logpdf(b) - norm.logcdf(b))
        # mean of N(m, sd^2) truncated above at bound, written from the bound side
        y[np.ix_(rows, c)] = bound - sd * (b + mills)
        v[np.ix_(rows, c)] = sd ** 2 * np.maximum(1.0 - b * mills - mills ** 2, 0.0)
    return y, v


def em_impute(rows, dl: DetectionLimits, tol: float = 1e-6, max_iter: int = 200,
              reference: int = REVENUE_PART) -> ImputationResult:
    """
    Replace zero cells by values in (0, DL_j] with the censored-EM procedure.

    Args:
        rows: (n, D) array of non-negative parts
        dl: Detection limits, one per part
        tol: Relative parameter-change threshold for convergence
        max_iter: Iteration cap; hitting it yields a non-converged report
        reference: 0-based index of the never-zero reference part

    Returns:
        ImputationResult; cells that were positive are returned bit-identical.

    Raises:
        DataError: the reference part has zeros or D < 2
        UnimputablePartError: a part with zeros has no positive detection limit
        NumericalError: the parameters became non-finite
    """
    arr = as_part_rows(rows)
    n, D = arr.shape
    if D < 2:
        raise DataError("Imputation needs at least two parts")
    zeros = arr == 0
    if not zeros.any():
        logger.info("No zero cells; EM imputation skipped")
        report = EMReport(True, 0, 0.0, (), 0, reference)
        return ImputationResult(arr.copy(), report)

    if zeros[:, reference].any():
        raise DataError(f"Reference part x{reference + 1} has zeros; it cannot anchor the log-ratios")
    limits = dl.to_array()
    if limits.shape[0] != D:
        raise DataError(f"Detection limits cover {limits.shape[0]} parts, data has {D}")
    for j in np.nonzero(zeros.any(axis=0))[0]:
        if not limits[j] > 0:
            raise UnimputablePartError(f"Part x{j + 1} has zeros but detection limit {limits[j]}")

    others = np.array([j for j in range(D) if j != reference])
    ref_col = arr[:, reference]
    censored = zeros[:, others]
    bounds = np.log(limits[others][None, :] / ref_col[:, None])
    with np.errstate(divide="ignore"):
        y_obs = np.log(arr[:, others] / ref_col[:, None])
    y_obs = np.where(censored, bounds + np.log(START_FRACTION), y_obs)

    y, v = y_obs, np.zeros_like(y_obs)
    mu, sigma = _m_step(y, v)
    theta = _stack(mu, sigma)
    history = []
    converged = False
    change = float("inf")

    for iteration in range(1, max_iter + 1):
        y, v = _e_step(y_obs, censored, bounds, mu, sigma)
        mu, sigma = _m_step(y, v)
        new_theta = _stack(mu, sigma)
        if not np.all(np.isfinite(new_theta)):
            raise NumericalError(f"EM parameters became non-finite at iteration {iteration}")
        change = float(np.linalg.norm(new_theta - theta) / max(np.linalg.norm(theta), np.finfo(float).tiny))
        history.append(change)
        theta = new_theta
        logger.debug(f"EM iteration {iteration}: relative change {change:.3e}")
        if change < tol:
            converged = True
            break

    imputed = ref_col[:, None] * np.exp(y)
    imputed = np.clip(imputed, np.finfo(float).tiny, limits[others][None, :])
    block = arr[:, others].copy()
    block[censored] = imputed[censored]
    out = arr.copy()
    out[:, others] = block

    report = EMReport(
        converged=converged,
        iterations=len(history),
        change_norm=change,
        history=tuple(history),
        n_imputed=int(censored.sum()),
        reference_part=reference,
    )
    if converged:
        logger.info(f"EM converged after {report.iterations} iterations; imputed {report.n_imputed} cells")
    else:
        logger.warning(f"EM did not converge within {max_iter} iterations (last change {change:.3e})")
    return ImputationResult(out, report)
