"""Accelerated proximal solvers for datacube recovery.

Three variants share one iteration skeleton: a gradient (or subgradient)
step on the data term at the extrapolated iterate, a prox step, then FISTA
extrapolation, stopping on the relative change of the extrapolated iterate.

- apg_bpdn: least squares plus an l1 penalty on coefficients in an
  orthonormal spectral basis and a frame-wise orthonormal wavelet basis;
  the prox is soft thresholding in the transformed domain.
- recover_hybrid: least squares plus a total-variation term (handled by a
  subgradient inside the gradient step) and an l1 penalty on spectral-basis
  coefficients only; the prox transforms along the band axis alone.
- recover_hybrid_nonortho: the same objective for an invertible,
  possibly non-orthonormal spectral dictionary, iterated in coefficient
  space with the dictionary's inverse maps. Handing it an orthonormal
  basis reproduces recover_hybrid.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .regularizers import prox_l1, tv_sum_and_subgradient
from .sensing import adjoint, project
from .transforms import basis_apply

_DIVERGENCE_LIMIT = 1e6


class DivergenceError(RuntimeError):
    """Raised when the iteration blows up (step size too large for the operator)."""


@dataclass(frozen=True)
class SolverConfig:
    """Shared solver knobs.

    step_size is the fixed gradient step; gamma weights the BPDN l1 term;
    gamma1/gamma2 weight the hybrid objective's TV and spectral-l1 terms;
    tau is the relative-change stopping threshold; max_iters caps the
    iteration count; accelerate toggles FISTA extrapolation.
    """

    step_size: float = 0.25
    gamma: float = 0.0
    gamma1: float = 0.0
    gamma2: float = 0.0
    tau: float = 1e-3
    max_iters: int = 200
    accelerate: bool = True

    def __post_init__(self):
        if self.step_size <= 0:
            raise ValueError(f"step_size must be > 0, got {self.step_size}")
        for name in ("gamma", "gamma1", "gamma2"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        if self.tau <= 0:
            raise ValueError(f"tau must be > 0, got {self.tau}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")


@dataclass(frozen=True)
class Trace:
    """Per-iteration diagnostics of one solver run."""

    rel_change: np.ndarray
    cost: np.ndarray
    subgrad_norm: np.ndarray
    truth_error: Optional[np.ndarray]
    reason: str  # "threshold" or "max-iters"

    @property
    def iterations(self):
        return len(self.cost)

    def best_cost(self):
        """Running minimum of the objective (non-increasing by construction)."""
        return np.minimum.accumulate(self.cost)


def fista_momentum(alpha_prev):
    """Next momentum parameter and extrapolation weight.

    alpha_next = (1 + sqrt(1 + 4 alpha_prev^2)) / 2;
    weight = (alpha_prev - 1) / alpha_next. Starting from alpha = 1 the
    first step is unextrapolated.
    """
    if alpha_prev < 1:
        raise ValueError(f"momentum parameter must be >= 1, got {alpha_prev}")
    alpha_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * alpha_prev * alpha_prev))
    return alpha_next, (alpha_prev - 1.0) / alpha_next


def relative_change(x_new, x_prev):
    """||x_new - x_prev||_F / ||x_prev||_F with guarded zero cases.

    Zero change reads as 0 regardless of the denominator; a nonzero change
    from a zero previous iterate reads as +inf.
    """
    num = float(np.linalg.norm(x_new - x_prev))
    if num == 0.0:
        return 0.0
    den = float(np.linalg.norm(x_prev))
    return num / den if den > 0.0 else float("inf")


def stopping(x_n, x_prev, tau, n, max_iters):
    """Halt when the relative change drops below tau or n reaches max_iters."""
    return relative_change(x_n, x_prev) < tau or n >= max_iters


def cost_bpdn(x, y, sp, pp, spatial_basis, spectral_basis, gamma):
    """0.5*||Y - Phi_s X Phi_p^T||_F^2 + gamma*||Psi_s^T X Psi_p||_1."""
    resid = y - project(x, sp, pp)
    coeff = spatial_basis.analyze(basis_apply(spectral_basis, x, "analysis"))
    return 0.5 * float(np.sum(resid * resid)) + gamma * float(np.abs(coeff).sum())


def cost_hybrid(x, y, sp, pp, spectral_basis, gamma1, gamma2):
    """0.5*||Y - Phi_s X Phi_p^T||_F^2 + gamma1*TV + gamma2*||Psi_s^T X||_1."""
    resid = y - project(x, sp, pp)
    tv_total, _ = tv_sum_and_subgradient(x, pp.n_v, pp.n_h)
    coeff = basis_apply(spectral_basis, x, "analysis")
    return (0.5 * float(np.sum(resid * resid)) + gamma1 * tv_total
            + gamma2 * float(np.abs(coeff).sum()))


def _truth_metric(x, x_truth, truth_norm2):
    diff = x - x_truth
    return float(np.sum(diff * diff)) / truth_norm2


def _run(y, sp, pp, config, descent_fn, prox_fn, cost_fn, x_truth):
    """Shared accelerated proximal loop; descent_fn returns the full
    (negated) gradient/subgradient of the smooth-plus-TV part."""
    if x_truth is not None:
        x_truth = np.asarray(x_truth, dtype=np.float64)
        truth_norm2 = float(np.sum(x_truth * x_truth))
        if truth_norm2 == 0.0:
            raise ValueError("ground truth is identically zero")
    x = adjoint(y, sp, pp)
    x_tilde_prev = x
    alpha = 1.0
    rels, costs, snorms, terrs = [], [], [], []
    reason = "max-iters"
    # overflow warnings on a diverging run are expected; the guard reports it
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, config.max_iters + 1):
            g = descent_fn(x)
            x_tilde = prox_fn(x + config.step_size * g)
            if config.accelerate:
                alpha, weight = fista_momentum(alpha)
            else:
                weight = 0.0
            x_next = x_tilde + weight * (x_tilde - x_tilde_prev)
            rel = relative_change(x_next, x)
            cost = cost_fn(x_next)
            rels.append(rel)
            costs.append(cost)
            snorms.append(float(np.linalg.norm(g)))
            if x_truth is not None:
                terrs.append(_truth_metric(x_next, x_truth, truth_norm2))
            if rel > _DIVERGENCE_LIMIT or not np.isfinite(cost):
                raise DivergenceError(
                    f"iteration {n} diverged with step size {config.step_size}: "
                    f"relative change {rel:.3e}, cost {cost:.3e}")
            x_tilde_prev = x_tilde
            x = x_next
            if rel < config.tau:
                reason = "threshold"
                break
    return x, Trace(
        rel_change=np.array(rels),
        cost=np.array(costs),
        subgrad_norm=np.array(snorms),
        truth_error=np.array(terrs) if x_truth is not None else None,
        reason=reason)


def _require_orthonormal(basis):
    if not basis.orthonormal:
        raise ValueError("this solver requires an orthonormal spectral basis; "
                         "use recover_hybrid_nonortho for general dictionaries")


def apg_bpdn(measurements, spatial_basis, spectral_basis, config, x_truth=None):
    """Accelerated proximal-gradient BPDN baseline.

    Minimizes the least-squares data term plus config.gamma times the l1
    norm of the coefficients in the given orthonormal spatial wavelet and
    spectral bases. Returns (recovered band-by-pixel matrix, Trace).
    """
    y, sp, pp = measurements.y, measurements.spectral, measurements.spatial
    _require_orthonormal(spectral_basis)
    if spectral_basis.n_s != sp.n_s:
        raise ValueError(f"spectral basis size {spectral_basis.n_s} does not "
                         f"match projector bands {sp.n_s}")
    if (spatial_basis.n_v, spatial_basis.n_h) != (pp.n_v, pp.n_h):
        raise ValueError("spatial basis grid does not match the projector")
    xi = config.step_size * config.gamma

    def descent(x):
        return adjoint(y - project(x, sp, pp), sp, pp)

    def prox(z):
        coeff = spatial_basis.analyze(basis_apply(spectral_basis, z, "analysis"))
        shrunk = prox_l1(coeff, xi)
        return basis_apply(spectral_basis, spatial_basis.synthesize(shrunk),
                           "synthesis")

    def cost(x):
        return cost_bpdn(x, y, sp, pp, spatial_basis, spectral_basis, config.gamma)

    return _run(y, sp, pp, config, descent, prox, cost, x_truth)


def recover_hybrid(measurements, spectral_basis, config, x_truth=None):
    """Accelerated proximal-subgradient solver for the hybrid objective.

    The TV term enters through its subgradient inside the gradient step;
    the spectral-l1 term through a prox in the orthonormal spectral basis.
    Returns (recovered band-by-pixel matrix, Trace).
    """
    y, sp, pp = measurements.y, measurements.spectral, measurements.spatial
    _require_orthonormal(spectral_basis)
    if spectral_basis.n_s != sp.n_s:
        raise ValueError(f"spectral basis size {spectral_basis.n_s} does not "
                         f"match projector bands {sp.n_s}")
    xi = config.step_size * config.gamma2

    def descent(x):
        g = adjoint(y - project(x, sp, pp), sp, pp)
        if config.gamma1 > 0:
            _, h = tv_sum_and_subgradient(x, pp.n_v, pp.n_h)
            g = g - config.gamma1 * h
        return g

    def prox(z):
        if config.gamma2 == 0:
            return z
        shrunk = prox_l1(basis_apply(spectral_basis, z, "analysis"), xi)
        return basis_apply(spectral_basis, shrunk, "synthesis")

    def cost(x):
        return cost_hybrid(x, y, sp, pp, spectral_basis,
                           config.gamma1, config.gamma2)

    return _run(y, sp, pp, config, descent, prox, cost, x_truth)


def recover_hybrid_nonortho(measurements, dictionary, config, x_truth=None):
    """Hybrid solver for an invertible, possibly non-orthonormal dictionary.

    Iterates in coefficient space: the gradient step is mapped through the
    dictionary inverse, soft thresholding acts on the coefficients, and the
    iterate returns to band space through the inverse transpose. With an
    orthonormal dictionary this reproduces recover_hybrid.
    """
    y, sp, pp = measurements.y, measurements.spectral, measurements.spatial
    if dictionary.n_s != sp.n_s:
        raise ValueError(f"dictionary size {dictionary.n_s} does not match "
                         f"projector bands {sp.n_s}")
    if np.linalg.matrix_rank(dictionary.matrix) < dictionary.n_s:
        raise np.linalg.LinAlgError("dictionary is rank-deficient")
    if x_truth is not None:
        x_truth = np.asarray(x_truth, dtype=np.float64)
        truth_norm2 = float(np.sum(x_truth * x_truth))
        if truth_norm2 == 0.0:
            raise ValueError("ground truth is identically zero")
    xi = config.step_size * config.gamma2

    x = adjoint(y, sp, pp)
    r = basis_apply(dictionary, x, "analysis")
    r_tilde_prev = r
    alpha = 1.0
    rels, costs, snorms, terrs = [], [], [], []
    reason = "max-iters"
    # overflow warnings on a diverging run are expected; the guard reports it
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, config.max_iters + 1):
            g = adjoint(y - project(x, sp, pp), sp, pp)
            if config.gamma1 > 0:
                _, h = tv_sum_and_subgradient(x, pp.n_v, pp.n_h)
                g = g - config.gamma1 * h
            r_half = r + config.step_size * basis_apply(dictionary, g,
                                                        "pinv_analysis")
            r_tilde = prox_l1(r_half, xi) if config.gamma2 > 0 else r_half
            if config.accelerate:
                alpha, weight = fista_momentum(alpha)
            else:
                weight = 0.0
            r_next = r_tilde + weight * (r_tilde - r_tilde_prev)
            x_next = basis_apply(dictionary, r_next, "pinv_synthesis")
            rel = relative_change(x_next, x)
            resid = y - project(x_next, sp, pp)
            tv_total, _ = tv_sum_and_subgradient(x_next, pp.n_v, pp.n_h)
            cost = (0.5 * float(np.sum(resid * resid)) + config.gamma1 * tv_total
                    + config.gamma2 * float(np.abs(r_next).sum()))
            rels.append(rel)
            costs.append(cost)
            snorms.append(float(np.linalg.norm(g)))
            if x_truth is not None:
                terrs.append(_truth_metric(x_next, x_truth, truth_norm2))
            if rel > _DIVERGENCE_LIMIT or not np.isfinite(cost):
                raise DivergenceError(
                    f"iteration {n} diverged with step size {config.step_size}: "
                    f"relative change {rel:.3e}, cost {cost:.3e}")
            r_tilde_prev = r_tilde
            r = r_next
            x = x_next
            if rel < config.tau:
                reason = "threshold"
                break
    return x, Trace(
        rel_change=np.array(rels),
        cost=np.array(costs),
        subgrad_norm=np.array(snorms),
        truth_error=np.array(terrs) if x_truth is not None else None,
        reason=reason)
