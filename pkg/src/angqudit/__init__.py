"""Simulation toolkit for path-entangled photon pairs behind angular slits."""

__version__ = "0.1.0"

from ._backend import BACKEND  # noqa: E402
from .entanglement import (  # noqa: E402
    concurrence_two_qubit,
    hermitian_eigenvalues,
    logarithmic_negativity,
    partial_transpose,
    trace_norm,
)
from .errors import (  # noqa: E402
    AngQuditError,
    InvalidParameterError,
    InvalidStateError,
    NumericalInconsistencyError,
    TruncationError,
    VerificationError,
)
from .interference import (  # noqa: E402
    FringeGrid,
    coincidence_rate,
    coincidence_rate_asymmetric,
    diffraction_envelope,
    fringe_scan,
    visibility_from_fringes,
)
from .physics import (  # noqa: E402
    AngularMask,
    SlmSpec,
    SpiralSpectrum,
    gaussian_spectrum,
    slit_fourier,
    slit_fourier_numeric,
    slm_capacity,
    uniform_spectrum,
)
from .states import (  # noqa: E402
    DensityMatrix,
    PathwayStateParams,
    asymmetric_mixed_state,
    pathway_to_oam,
    pure_qudit_state,
    validate_density,
)
from .witness import (  # noqa: E402
    MeasurementOperator,
    WitnessCertificate,
    expectation_values,
    negativity_lower_bound,
    oam_projectors,
    superposition_projectors,
    verify_certificate,
)
