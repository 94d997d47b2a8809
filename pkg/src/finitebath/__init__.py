"""Entropy production of qubit erasure with finite, possibly interacting, baths."""

from .engine import ProcessOutcome, engineered_q, marginal_bath, marginal_system, max_cool
from .errors import NumericalError
from .spectra import (
    CriticalParams,
    EngineeredParams,
    critical_degenerate,
    engineered_interacting,
    non_interacting_qubits,
)
from .thermo import (
    LevelDistribution,
    Spectrum,
    SystemDiag,
    entropy,
    gibbs,
    heat_capacity,
    mean_energy,
    relative_entropy,
    solve_beta_star,
    variance_energy,
)

__version__ = "0.1.0"
