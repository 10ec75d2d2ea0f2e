"""Linear-time local geometry encodings for point clouds.

Each point's neighborhood is summarized as a fixed-length complex vector
whose inner products realize a Gaussian kernel mixture over the local
shape. The factorized encoder computes all n encodings in Theta(npd) time
and O(np + nd + pd) memory; quadratic sharp/soft reference paths and a
closed-form mixture oracle exist so every claim is testable.
"""

from .bench import (BenchRecord, SweepRecord, bench_scaling, factorized_mem_estimate,
                    factorized_peak_memory, fit_log_slope, sharp_mem_estimate,
                    sweep_params, uniform_ball, write_bench_csv, write_sweep_csv)
from .encoder import (AdjacencySpec, EncodingMatrix, encode_dense_factorized,
                      encode_dense_sharp, encode_dense_soft_exact, encode_multi_beta,
                      encode_pointwise, normalize_rows)
from .errors import (CloudParseError, ContractError, DegenerateEncodingError,
                     DegenerateOutputError, EmptyInputError, EncodingFormatError,
                     ParameterError, ValidationError, VecKMError)
from .features import (FeatureBasis, basis_for_role, canonical_seed, embed,
                       make_basis, normal_quantiles, role_seed)
from .kernel import (RADIUS_BETA_PRODUCT, KernelEstimate, gaussian_kernel,
                     kernel_estimate, radius_for_beta)
from .mixture import (KernelMixture, encoding_similarity, mixture_eval,
                      mixture_similarity, reconstruct, reconstruction_grid)
from .pcio import (read_cloud, read_encoding, write_cloud, write_encoding,
                   write_encoding_csv)
from .shapes import (CORRUPTION_MODELS, CYLINDER_HALF_HEIGHT, CYLINDER_RADIUS,
                     SHAPE_KINDS, TORUS_MAJOR, TORUS_MINOR, PointCloud, corrupt,
                     gen_shape)

__version__ = "0.1.0"

__all__ = [
    "AdjacencySpec", "BenchRecord", "CloudParseError", "ContractError",
    "CORRUPTION_MODELS", "CYLINDER_HALF_HEIGHT", "CYLINDER_RADIUS",
    "DegenerateEncodingError", "DegenerateOutputError",
    "EmptyInputError", "EncodingFormatError", "EncodingMatrix", "FeatureBasis",
    "KernelEstimate", "KernelMixture", "ParameterError", "PointCloud",
    "RADIUS_BETA_PRODUCT", "SHAPE_KINDS", "SweepRecord", "TORUS_MAJOR",
    "TORUS_MINOR", "ValidationError",
    "VecKMError", "basis_for_role", "bench_scaling", "canonical_seed", "corrupt",
    "embed", "encode_dense_factorized", "encode_dense_sharp",
    "encode_dense_soft_exact", "encode_multi_beta", "encode_pointwise",
    "encoding_similarity", "factorized_mem_estimate", "factorized_peak_memory",
    "fit_log_slope", "gaussian_kernel", "gen_shape", "kernel_estimate",
    "make_basis", "mixture_eval", "mixture_similarity", "normal_quantiles",
    "normalize_rows", "radius_for_beta", "read_cloud", "read_encoding",
    "reconstruct", "reconstruction_grid", "role_seed", "sharp_mem_estimate",
    "sweep_params", "uniform_ball", "write_bench_csv", "write_cloud",
    "write_encoding", "write_encoding_csv", "write_sweep_csv",
]
