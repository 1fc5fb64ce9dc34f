"""Direct and inverse scattering for Schrodinger operators on the half line
with potentials supported in [0, 1]."""

from .errors import ScatteringError
from .potential import Potential, cosine_transform, fourier_transform, mean
from .scattering import bound_states, jost, phase_shift, smatrix
from .spectra import dirichlet_eigenvalues, eigenlist, mixed_eigenvalues
from .phasemap import SpectralData, extract_data, extract_even_data, solve_pn, validate_even
from .recover import recover_even, recover_generic
from .dressing import DressingParams, classify_kstar, cstar, dress, dress_support_preserving
from .smap import SMatrixSamples, linearized_inverse, newton_invert, psi_gradient, psi_map
from .config import RunConfig

__version__ = "0.1.0"
