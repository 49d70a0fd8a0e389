"""scikit-learn compatible front end to the ADMM solvers."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_kspace, check_tensor3
from .metrics import snr_db
from .solvers import SolverConfig, reconstruct

__all__ = ["TMNNReconstructor"]


class TMNNReconstructor(TransformerMixin, BaseEstimator):
    """Reconstruct a dynamic image from zero-filled Cartesian k-space.

    ``X`` passed to :meth:`fit` / :meth:`transform` is the centered k-space
    tensor (n1 x n2 x n3, zero outside the mask).  ``mask`` defaults to the
    support of ``X``, which is exact unless a measured sample is exactly zero.

    Setting ``lambda2=0`` gives the TNN-only model and ``lambda1=0`` the
    Casorati-only model.

    Attributes
    ----------
    reconstruction_ : ndarray
        Image-domain reconstruction of the data seen by :meth:`fit`.
    result_ : SolverResult
        Full solver output including cost and residual traces.
    n_iter_ : int
    """

    def __init__(self, lambda1=0.1, lambda2=0.1, mu1=None, mu2=None, max_iters=200,
                 rel_tol=1e-4, variant="kspace_fast", allow_unregularized=False):
        self.lambda1 = lambda1
        self.lambda2 = lambda2
        self.mu1 = mu1
        self.mu2 = mu2
        self.max_iters = max_iters
        self.rel_tol = rel_tol
        self.variant = variant
        self.allow_unregularized = allow_unregularized

    def _config(self) -> SolverConfig:
        return SolverConfig(**self.get_params())

    @staticmethod
    def _data(X, mask):
        X = check_tensor3(X, "X")
        if mask is None:
            mask = X != 0
        return check_kspace(X, mask)

    def fit(self, X, y=None, mask=None):
        b, mask = self._data(X, mask)
        self.result_ = reconstruct(b, mask, self._config())
        self.reconstruction_ = self.result_.reconstruction
        self.n_iter_ = self.result_.iters_run
        return self

    def transform(self, X, mask=None) -> np.ndarray:
        check_is_fitted(self, "result_")
        b, mask = self._data(X, mask)
        return reconstruct(b, mask, self._config()).reconstruction

    def fit_transform(self, X, y=None, mask=None) -> np.ndarray:
        return self.fit(X, y, mask=mask).reconstruction_

    def score(self, X, y, mask=None) -> float:
        """SNR in dB of the reconstruction of ``X`` against the reference image ``y``."""
        return snr_db(y, self.transform(X, mask=mask))
