"""Dynamic MRI reconstruction with combined tensor and Casorati nuclear norms."""

from .estimator import TMNNReconstructor
from .metrics import error_image, nmse, snr_db
from .phantoms import PhantomSpec, make_cine_phantom, make_perfusion_phantom, make_phantom
from .prox import svt, tsvt
from .sampling import (add_noise, apply_A, apply_A_star, fft2_per_frame, ifft2_per_frame,
                       pseudo_radial_mask, undersampling_ratio, variable_density_mask)
from .solvers import (SolverConfig, SolverDivergenceError, SolverResult, SolverState,
                      admm_tmnn_image, admm_tmnn_kspace, baseline, objective, reconstruct)
from .tensor import (TSvdFactors, bcirc, bdiag_spectral, casorati_nn, dft3, idft3,
                     mode3_fold, mode3_unfold, t_product, t_svd, t_transpose, tnn)

__version__ = "0.1.0"
