"""Optical read-out of sub-wavelength bit sequences with multi-pixel detection."""

from .detection import GainSet, PixelArray, SignalMatrix, build_signal_matrix, solve_gains
from .disc import BitSequence, PhaseMask, mask_from_bits, reflect
from .field_core import FieldProfile, Grid1D, normalize, overlap, photon_number
from .focal_field import FocusSpec, na_scan, paraxial_focal_field, richards_wolf_focal_field, spot_size_86
from .noise import NoiseBudget, NoiseMode, NoiseParams
from .propagation import PropagationSpec, to_detector_plane
from .readout import ReadConfig, ReadOutcome, data_rate_estimate, decide, monte_carlo_error_rate
from .system import ReadoutSystem, SystemConfig

__all__ = [
    "BitSequence", "FieldProfile", "FocusSpec", "GainSet", "Grid1D", "NoiseBudget", "NoiseMode",
    "NoiseParams", "PhaseMask", "PixelArray", "PropagationSpec", "ReadConfig", "ReadOutcome",
    "ReadoutSystem", "SignalMatrix", "SystemConfig", "build_signal_matrix", "data_rate_estimate",
    "decide", "mask_from_bits", "monte_carlo_error_rate", "na_scan", "normalize", "overlap",
    "paraxial_focal_field", "photon_number", "reflect", "richards_wolf_focal_field", "solve_gains",
    "spot_size_86", "to_detector_plane",
]
__version__ = "0.1.0"
