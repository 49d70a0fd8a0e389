r"""ADMM solvers for TNN + Casorati-nuclear-norm regularized dynamic reconstruction.

The problem is

.. math::
   \min_X \tfrac12\|S F X - b\|_F^2 + \lambda_1\|X\|_{\mathrm{TNN}}
          + \lambda_2\|C(X)\|_*

with the splitting ``Z = X``, ``M = C(X)``.  Each iteration updates, in order,
``Z`` (TSVT of ``X - W1/mu1`` at ``lambda1/mu1``), ``M`` (SVT of
``C(X) - W2/mu2`` at ``lambda2/mu2``), ``X`` (closed form, diagonal in k-space
for Cartesian masks), then the multipliers ``W1``, ``W2``.

:func:`admm_tmnn_image` keeps ``X`` in the image domain and pays two FFTs per
X-update; :func:`admm_tmnn_kspace` runs the same scheme directly on k-space
variables, which is valid because both nuclear norms are invariant under the
unitary per-frame 2-D DFT.  A weight of zero removes its splitting branch
entirely, so ``lambda1 = 0`` gives the Casorati-only baseline and
``lambda2 = 0`` the TNN-only baseline.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from ._validation import check_kspace, check_positive
from .prox import _svt, _tsvt
from .sampling import _fft2, _ifft2, apply_A, ifft2_per_frame
from .tensor import _casorati_nn, _tnn, casorati_nn, mode3_fold, mode3_unfold, tnn

__all__ = [
    "SolverConfig",
    "SolverDivergenceError",
    "SolverResult",
    "SolverState",
    "VARIANTS",
    "admm_tmnn_image",
    "admm_tmnn_kspace",
    "baseline",
    "default_mu",
    "objective",
    "reconstruct",
]

logger = logging.getLogger(__name__)

VARIANTS = ("image_domain", "kspace_fast")


class SolverDivergenceError(FloatingPointError):
    """An ADMM iterate became non-finite."""


@dataclass(frozen=True)
class SolverConfig:
    """Parameters of one ADMM run.

    ``mu1``/``mu2`` left as ``None`` are set from the data by :func:`default_mu`.
    Setting both weights to zero is rejected unless ``allow_unregularized`` is
    true (pure data-consistency, i.e. the zero-filled reconstruction).
    """

    lambda1: float = 0.1
    lambda2: float = 0.1
    mu1: Optional[float] = None
    mu2: Optional[float] = None
    max_iters: int = 200
    rel_tol: float = 1e-4
    variant: str = "kspace_fast"
    allow_unregularized: bool = False

    def __post_init__(self):
        check_positive(self.lambda1, "lambda1", strict=False)
        check_positive(self.lambda2, "lambda2", strict=False)
        for name in ("mu1", "mu2"):
            if getattr(self, name) is not None:
                check_positive(getattr(self, name), name)
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ValueError(f"max_iters must be a positive integer, got {self.max_iters}")
        if not 0 < self.rel_tol < 1:
            raise ValueError(f"rel_tol must lie in (0, 1), got {self.rel_tol}")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.lambda1 == 0 and self.lambda2 == 0 and not self.allow_unregularized:
            raise ValueError("lambda1 + lambda2 must be > 0 (set allow_unregularized for data consistency only)")

    def with_mu(self, b) -> "SolverConfig":
        """Copy with unset penalties filled in by :func:`default_mu`."""
        return replace(
            self,
            mu1=self.mu1 if self.mu1 is not None else default_mu(b, self.lambda1),
            mu2=self.mu2 if self.mu2 is not None else default_mu(b, self.lambda2),
        )


@dataclass
class SolverState:
    """ADMM variables after iteration ``iter``; k-space objects in the fast variant."""

    x: np.ndarray
    z: Optional[np.ndarray]
    m: Optional[np.ndarray]
    w1: Optional[np.ndarray]
    w2: Optional[np.ndarray]
    iter: int


@dataclass(frozen=True)
class SolverResult:
    reconstruction: np.ndarray
    cost_trace: np.ndarray
    primal_residuals: np.ndarray
    iters_run: int
    wall_time: float
    converged: bool
    config: SolverConfig
    elapsed: np.ndarray = field(repr=False)

    def trace_rows(self):
        """Per-iteration ``(iteration, cost, res_tnn, res_mnn, elapsed_s)`` tuples."""
        for k in range(self.iters_run):
            r1, r2 = self.primal_residuals[k]
            yield k + 1, float(self.cost_trace[k]), float(r1), float(r2), float(self.elapsed[k])


#: ratio between the shrinkage threshold lambda/mu and the mean zero-filled magnitude
MU_THRESHOLD_RATIO = 3.0


def default_mu(b, lam: float) -> float:
    """Penalty heuristic ``lam / (3 * mean|A^* b|)``.

    Keeps the shrinkage threshold ``lam / mu`` at a fixed multiple of the
    signal level, so iterates scale with the data when ``lam`` does.  Returns
    1.0 when ``lam`` is zero (the branch is unused) or the data vanish.
    """
    scale = float(np.mean(np.abs(ifft2_per_frame(b))))
    if lam == 0 or scale == 0:
        return 1.0
    return lam / (MU_THRESHOLD_RATIO * scale)


def _objective_kspace(xk, b, mask, lambda1, lambda2) -> float:
    resid = np.where(mask, xk, 0) - b
    val = 0.5 * float(np.vdot(resid, resid).real)
    if lambda1:
        val += lambda1 * _tnn(xk)
    if lambda2:
        val += lambda2 * _casorati_nn(xk)
    return val


def objective(x, b, mask, cfg: SolverConfig) -> float:
    """Regularized least-squares cost of the image `x` for data `b` on `mask`."""
    b, mask = check_kspace(b, mask)
    resid = apply_A(x, mask) - b
    val = 0.5 * float(np.vdot(resid, resid).real)
    if cfg.lambda1:
        val += cfg.lambda1 * tnn(x)
    if cfg.lambda2:
        val += cfg.lambda2 * casorati_nn(x)
    return val


def _run(b, mask, cfg: SolverConfig, *, kspace: bool, callback) -> SolverResult:
    b, mask = check_kspace(b, mask)
    cfg = cfg.with_mu(b)
    shape = b.shape
    lam1, lam2, mu1, mu2 = cfg.lambda1, cfg.lambda2, cfg.mu1, cfg.mu2
    use_z, use_m = lam1 > 0, lam2 > 0
    samp = mask.astype(float)
    denom = samp + (mu1 if use_z else 0.0) + (mu2 if use_m else 0.0)
    inv_denom = np.divide(1.0, denom, out=np.zeros_like(denom), where=denom > 0)

    t0 = time.perf_counter()
    # warm start at the zero-filled reconstruction
    x = b.copy() if kspace else _ifft2(b)
    z = x.copy() if use_z else None
    w1 = np.zeros(shape, dtype=np.complex128) if use_z else None
    m = mode3_unfold(x).copy() if use_m else None
    w2 = np.zeros_like(m) if use_m else None

    def cost_of(v):
        if kspace:
            return _objective_kspace(v, b, mask, lam1, lam2)
        return _objective_kspace(_fft2(v), b, mask, lam1, lam2)

    prev = cost_of(x)
    costs, resids, elapsed = [], [], []
    converged = False
    for it in range(1, cfg.max_iters + 1):
        if use_z:
            z = _tsvt(x - w1 / mu1, lam1 / mu1)
        if use_m:
            m = _svt(mode3_unfold(x) - w2 / mu2, lam2 / mu2)

        num = np.zeros(shape, dtype=np.complex128)
        if use_z:
            num += mu1 * z + w1
        if use_m:
            num += mode3_fold(mu2 * m + w2, shape)
        if kspace:
            x = (b + num) * inv_denom
        else:
            x = _ifft2((b + _fft2(num)) * inv_denom)

        r1 = r2 = 0.0
        if use_z:
            dz = z - x
            w1 = w1 + mu1 * dz
            r1 = float(np.linalg.norm(dz))
        if use_m:
            dm = m - mode3_unfold(x)
            w2 = w2 + mu2 * dm
            r2 = float(np.linalg.norm(dm))

        if not np.all(np.isfinite(x)):
            raise SolverDivergenceError(f"non-finite iterate at iteration {it}")
        cost = cost_of(x)
        if not math.isfinite(cost):
            raise SolverDivergenceError(f"non-finite cost at iteration {it}")
        costs.append(cost)
        resids.append((r1, r2))
        elapsed.append(time.perf_counter() - t0)
        if callback is not None:
            callback(SolverState(x=x, z=z, m=m, w1=w1, w2=w2, iter=it))

        change = abs(cost - prev)
        if change == 0 or (prev > 0 and change / prev < cfg.rel_tol):
            converged = True
            break
        prev = cost

    recon = _ifft2(x) if kspace else x
    wall = time.perf_counter() - t0
    logger.debug("%s: %d iterations, cost %.6g, %.3fs", cfg.variant, len(costs), costs[-1], wall)
    return SolverResult(
        reconstruction=recon,
        cost_trace=np.asarray(costs),
        primal_residuals=np.asarray(resids).reshape(-1, 2),
        iters_run=len(costs),
        wall_time=wall,
        converged=converged,
        config=cfg,
        elapsed=np.asarray(elapsed),
    )


def admm_tmnn_image(b, mask, cfg: SolverConfig,
                    callback: Callable[[SolverState], None] | None = None) -> SolverResult:
    """Image-domain ADMM; the X-update applies ``F`` and ``F^*`` once each."""
    if cfg.variant != "image_domain":
        raise ValueError(f"admm_tmnn_image needs variant='image_domain', got {cfg.variant!r}")
    return _run(b, mask, cfg, kspace=False, callback=callback)


def admm_tmnn_kspace(b, mask, cfg: SolverConfig,
                     callback: Callable[[SolverState], None] | None = None) -> SolverResult:
    """k-space ADMM (tensor completion form); FFT-free X-update, one inverse FFT at exit."""
    if cfg.variant != "kspace_fast":
        raise ValueError(f"admm_tmnn_kspace needs variant='kspace_fast', got {cfg.variant!r}")
    return _run(b, mask, cfg, kspace=True, callback=callback)


def reconstruct(b, mask, cfg: SolverConfig, callback=None) -> SolverResult:
    """Dispatch on ``cfg.variant``."""
    solver = admm_tmnn_kspace if cfg.variant == "kspace_fast" else admm_tmnn_image
    return solver(b, mask, cfg, callback)


def baseline(b, mask, cfg: SolverConfig, callback=None) -> SolverResult:
    """Single-regularizer run (TNN-only or Casorati-only); one weight must be zero."""
    if cfg.lambda1 != 0 and cfg.lambda2 != 0:
        raise ValueError("a baseline needs lambda1 == 0 (MNN only) or lambda2 == 0 (TNN only)")
    return reconstruct(b, mask, cfg, callback)
