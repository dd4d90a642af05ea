"""Heralded temporal shaping of single photons from time-energy entangled pairs."""

__version__ = "0.1.0"

from .analytic import GaussianScenario, gaussian_heralded_width, purity_closed_form, purity_limit
from .heralding import (
    DetectorSpectralResponse,
    HeraldedShape,
    SignalDensityMatrix,
    SpectralFilter,
    herald_filtered,
    herald_frequency_resolved,
    herald_mixture,
    herald_time_resolved,
    heralded_density_matrix,
)
from .metrics import (
    fidelity,
    heralding_rate_modulated,
    heralding_rate_pulsed,
    purity,
    validate_regime,
)
from .numerics import (
    Field1D,
    Field2D,
    TimeGrid,
    auto_grid,
    convolve_1d,
    fourier_kernel_project,
    integrate_1d,
    window_grid,
)
from .shaping import (
    Modulator,
    apply_modulator,
    gaussian_modulator,
    rect_modulator,
    tabulated_modulator,
)
from .states import (
    ClassicalMixture,
    GaussianBiphotonParams,
    JointAmplitude,
    correlated_mixture,
    entanglement_proxy,
    make_gaussian_joint,
    make_separable,
    make_tabulated,
)
