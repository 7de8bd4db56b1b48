from ._version import __version__
from .cfrac import BreakdownError, CfOptions, DepthGrowth, SecularFunction, SecularMode, ascend, descend, detect_termination, one_sided_green, secular_one_sided, secular_two_sided
from .factor import Layout, Normalization, UflFactors, factorize, left_eigenvector, polish_eigenvalue, verify, wavefunction_one_sided, wavefunction_two_sided
from .hermitize import BlockSecular, Mat2, SearchInterval, block_form, double, mcf_ascend, mcf_descend, secular_block, singular_values
from .model_factory import ModelKind, model_factory
from .operators import CoefficientSource, FiniteTridiagonal, PotentialKind, PotentialSpec, WindowError, bose_hubbard, discrete_schrodinger, non_bh_k5, singh_like_source, snapshot, truncate
from .oracle import OracleSizeError, det_scan_spectrum, jacobi_eigen, lu_det, svd_oracle
from .roots import ContourError, Root, RootDivergenceError, RootOptions, SearchRegion, SpectrumResult, gershgorin_region, locate_roots, newton_refine, winding_count
