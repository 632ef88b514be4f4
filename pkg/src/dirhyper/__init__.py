"""Directed noise operators, p-biased Fourier analysis and Bregman-cube experiments."""

from .bregman import (
    GENERATORS,
    CubeMetricParams,
    EmbeddingAnchors,
    asymmetry_grid,
    asymmetry_hessian,
    cube_distance,
    divergence,
    get_generator,
    induced_cube_params,
    pm_reduction_check,
    pseudo_cube_embed,
    verify_embedding,
)
from .cube_fn import (
    BiasedMeasure,
    CubeFunction,
    Spectrum,
    biased_fourier,
    chi,
    expectation,
    inverse_fourier,
    norm,
)
from .errors import CapacityError, DomainError, InvalidParameterError, NotApplicable
from .instances import GapInstanceConfig, gap_statistics, generate
from .noise import (
    HypercontractivityCase,
    NoiseParams,
    apply_asymmetric,
    apply_symmetric,
    apply_tau,
    decompose,
    hypercontractivity_gap,
    verify_decomposition,
)
from .shatter import (
    Partition,
    ShatterParams,
    gamma_all,
    heavy_set,
    make_partition,
    partition_shatter,
    shattering_report,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "DomainError",
    "InvalidParameterError",
    "NotApplicable",
    "GapInstanceConfig",
    "gap_statistics",
    "generate",
    "GENERATORS",
    "CubeMetricParams",
    "EmbeddingAnchors",
    "asymmetry_grid",
    "asymmetry_hessian",
    "cube_distance",
    "divergence",
    "get_generator",
    "induced_cube_params",
    "pm_reduction_check",
    "pseudo_cube_embed",
    "verify_embedding",
    "BiasedMeasure",
    "CubeFunction",
    "Spectrum",
    "biased_fourier",
    "chi",
    "expectation",
    "inverse_fourier",
    "norm",
    "HypercontractivityCase",
    "NoiseParams",
    "apply_asymmetric",
    "apply_symmetric",
    "apply_tau",
    "decompose",
    "hypercontractivity_gap",
    "verify_decomposition",
    "Partition",
    "ShatterParams",
    "gamma_all",
    "heavy_set",
    "make_partition",
    "partition_shatter",
    "shattering_report",
]
