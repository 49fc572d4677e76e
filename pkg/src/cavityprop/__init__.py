"""Exact propagators of a two-level atom coupled to the continuum modes of a
leaky Fabry-Perot cavity, and their application to single-photon scattering.

The package is organized bottom-up:

    cavity_modes            continuum mode structure of the two-sided cavity
    quasimode_propagators   model parameters, coupling g(k), closed-form
                            quasi-mode propagators Phi^(N)_pq(omega)
    diagrammatics           event-sequence enumeration, linked amplitudes,
                            full propagators G^(N)_pq with spectator terms
    scattering              long-time two-photon joint spectral amplitude
                            C(k1, k2) for a Lorentzian input packet
    oracle                  discretized-Hamiltonian time evolution used as
                            independent ground truth
    cli                     command-line front end
"""

from .cavity_modes import (
    CavityGeometry,
    MirrorCoefficients,
    QuasiModeParams,
    d_function,
    mirror_coefficients,
    mode_function,
    quasimode_params,
)
from .diagrammatics import (
    EventSequence,
    ProcessSpec,
    PropagatorValue,
    closed_form_g1,
    closed_form_g2,
    count_sequences,
    enumerate_sequences,
    full_propagator,
    linked_amplitude,
    linked_sum,
)
from .oracle import (
    DiscretizedModel,
    SectorState,
    build,
    compare_joint_spectrum,
    evolve,
    evolve_single_excitation,
)
from .quasimode_propagators import (
    ModelParams,
    PoleDecomposition,
    PoleEvaluationError,
    coupling,
    gamma_sp,
    phi,
    pole_decomposition,
    zeta,
)
from .scattering import (
    InputPacket,
    JointSpectrumGrid,
    PoleCollisionError,
    TwoPhotonAmplitude,
    i1,
    i2,
    integrated_norm_exact,
    joint_spectrum_grid,
    two_photon_amplitude,
)

__all__ = [
    "CavityGeometry",
    "MirrorCoefficients",
    "QuasiModeParams",
    "d_function",
    "mirror_coefficients",
    "mode_function",
    "quasimode_params",
    "ModelParams",
    "PoleDecomposition",
    "PoleEvaluationError",
    "coupling",
    "gamma_sp",
    "phi",
    "pole_decomposition",
    "zeta",
    "EventSequence",
    "ProcessSpec",
    "PropagatorValue",
    "closed_form_g1",
    "closed_form_g2",
    "count_sequences",
    "enumerate_sequences",
    "full_propagator",
    "linked_amplitude",
    "linked_sum",
    "InputPacket",
    "JointSpectrumGrid",
    "PoleCollisionError",
    "TwoPhotonAmplitude",
    "i1",
    "i2",
    "integrated_norm_exact",
    "joint_spectrum_grid",
    "two_photon_amplitude",
    "DiscretizedModel",
    "SectorState",
    "build",
    "compare_joint_spectrum",
    "evolve",
    "evolve_single_excitation",
]

__version__ = "0.1.0"
