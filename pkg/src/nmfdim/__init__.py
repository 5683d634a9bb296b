"""Latent dimensionality estimation for noisy nonnegative dictionary models.

The pipeline contracts the empirical fourth-order cumulant of the data into
a square second-moment matrix, recovers the support union of a row-sparse
self-representation of that matrix by penalized least squares, and reports
the number of surviving rows as the estimated number of components.
"""

from .estimator import ComponentCountEstimator
from .exceptions import NmfDimError
from .grouplasso import (
    GroupLassoProblem,
    GroupLassoSolution,
    SolverSettings,
    kkt_check,
    recovery_conditions,
    row_group_prox,
    solve,
)
from .guarantees import (
    PerturbationReport,
    RecoveryConstantsReport,
    SupportCertificate,
    build_support_certificate,
    choose_support_rows,
    perturbation_report,
    recovery_constants,
)
from .laws import LatentLaw
from .moments import (
    CumulantTensor,
    MomentEstimate,
    contract_to_matrix,
    empirical_second_moment,
    fourth_cumulant_dense,
    population_second_moment,
)
from .pipeline import (
    ComponentEstimate,
    SweepConfig,
    concentration_table,
    estimate_components,
    lambda_path,
    sweep,
)
from .synth import (
    Dataset,
    DictionarySpec,
    GenerativeConfig,
    calibrate_tail_scale,
    export_pgm,
    generate,
    swimmer,
)

__version__ = "0.1.0"

__all__ = [
    "ComponentCountEstimator",
    "ComponentEstimate",
    "CumulantTensor",
    "Dataset",
    "DictionarySpec",
    "GenerativeConfig",
    "GroupLassoProblem",
    "GroupLassoSolution",
    "LatentLaw",
    "MomentEstimate",
    "NmfDimError",
    "PerturbationReport",
    "RecoveryConstantsReport",
    "SolverSettings",
    "SupportCertificate",
    "SweepConfig",
    "build_support_certificate",
    "calibrate_tail_scale",
    "choose_support_rows",
    "concentration_table",
    "contract_to_matrix",
    "empirical_second_moment",
    "estimate_components",
    "export_pgm",
    "fourth_cumulant_dense",
    "generate",
    "kkt_check",
    "lambda_path",
    "perturbation_report",
    "population_second_moment",
    "recovery_conditions",
    "recovery_constants",
    "row_group_prox",
    "solve",
    "sweep",
    "swimmer",
]
