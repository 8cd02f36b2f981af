"""Skew-Hermitian generators with prescribed monodromy on a subspace, and
the projector loops they trace on the Grassmannian."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConvergenceError,
    EmptySpan,
    HoloflowError,
    LoopNotClosed,
    NoRoomForExtension,
    NotHermitian,
    NotOrthonormal,
    NotUnitary,
    ShapeError,
)
from .flow import (  # noqa: E402
    FlowConfig,
    Trajectory,
    closure_residual,
    exact_flow,
    exact_trajectory,
    integrate_rk4,
    loop_monodromy,
    trajectory_stats,
)
from .linalg import (  # noqa: E402
    SpectralData,
    commutator,
    expm,
    expm_spectral,
    extend_to_unitary,
    hermitian_eig,
    orthonormalize,
    spectral_from_generator,
    unitary_eig,
)
from .synth import (  # noqa: E402
    BoundaryProblem,
    MonodromyReport,
    SynthesisParams,
    SynthesisResult,
    nontriviality_certificate,
    rotation,
    synthesize,
    verify_monodromy,
)

__all__ = [
    "__version__",
    "ConvergenceError",
    "EmptySpan",
    "HoloflowError",
    "LoopNotClosed",
    "NoRoomForExtension",
    "NotHermitian",
    "NotOrthonormal",
    "NotUnitary",
    "ShapeError",
    "FlowConfig",
    "Trajectory",
    "closure_residual",
    "exact_flow",
    "exact_trajectory",
    "integrate_rk4",
    "loop_monodromy",
    "trajectory_stats",
    "SpectralData",
    "commutator",
    "expm",
    "expm_spectral",
    "extend_to_unitary",
    "hermitian_eig",
    "orthonormalize",
    "spectral_from_generator",
    "unitary_eig",
    "BoundaryProblem",
    "MonodromyReport",
    "SynthesisParams",
    "SynthesisResult",
    "nontriviality_certificate",
    "rotation",
    "synthesize",
    "verify_monodromy",
]
