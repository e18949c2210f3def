"""
WeakSINDy package containing the numerical core: benchmark systems,
polynomial dictionaries, spectral estimation and sparse regression.
"""

from .dictionary import CoefficientMatrix, DictionaryMatrix, DictionarySpec, build_spec, evaluate, term_names
from .ode_bench import (DivergenceError, NoiseSpec, OdeSystem, Trajectory, add_noise, make_polynomial_system,
                        make_system, noise_sigma, simulate, system_from_coefficients)
from .sparse_regression import SolverConfig, st_ridge, st_ridge_multi
from .spectral import (FourierCoeffs, FrequencySelection, PsdEstimate, TaperSet, fourier_coeffs, multitaper_psd,
                       periodogram, select_frequencies, slepian_tapers, sweep_selection)

__all__ = [
    'CoefficientMatrix', 'DictionaryMatrix', 'DictionarySpec', 'build_spec', 'evaluate', 'term_names',
    'DivergenceError', 'NoiseSpec', 'OdeSystem', 'Trajectory', 'add_noise', 'make_polynomial_system',
    'make_system', 'noise_sigma', 'simulate', 'system_from_coefficients',
    'SolverConfig', 'st_ridge', 'st_ridge_multi',
    'FourierCoeffs', 'FrequencySelection', 'PsdEstimate', 'TaperSet', 'fourier_coeffs', 'multitaper_psd',
    'periodogram', 'select_frequencies', 'slepian_tapers', 'sweep_selection',
]
