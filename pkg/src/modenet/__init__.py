"""Linear optomechanical mode networks: scattering, noise, isolators and circulators."""

from .dynamics import (
    DynamicsMatrices,
    ScatteringMatrix,
    assemble,
    external_block,
    frequency_sweep,
    scattering,
    time_domain_response,
)
from .errors import (
    CertificationFailure,
    ConfigError,
    DegenerateDenominatorError,
    DesignInfeasibleError,
    InvalidParameterError,
    ModenetError,
    NoFiniteSolutionError,
    NotFoundError,
    OracleFailure,
)
from .model import (
    CavityMode,
    Coupling,
    MechanicalMode,
    NetworkSpec,
    PumpSpec,
    apply_cross_damping,
    circulator_preset,
    cooperativity,
    isolator_preset,
)

__version__ = "0.1.0"
