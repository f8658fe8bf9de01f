"""End-to-end optical chain: focus -> disc -> detector -> signals -> noise."""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace
from functools import cached_property

import numpy as np

from . import detection as det
from . import noise as nz
from .disc import BitSequence, all_sequences, mask_from_bits, reflect
from .field_core import FieldProfile, Grid1D
from .focal_field import FocusSpec, beam_waist, focal_line_profile
from .propagation import PropagationSpec, detector_grid, intensity_distance, to_detector_plane

PRESETS = {
    "classical": dict(B=10.0, squeeze_db=0.0),
    "shot": dict(B=0.0, squeeze_db=0.0),
    "squeezed": dict(B=0.0, squeeze_db=10.0),
}


@dataclass(frozen=True)
class SystemConfig:
    wavelength: float = 780e-9
    na: float = 0.47
    medium_index: float = 1.0
    model: str = "vectorial"
    filling: float | None = None
    focal_length: float = 4e-3
    lens_diameter: float | None = None
    method: str = "fraunhofer"
    pitch: float | None = None  # None -> w0
    offset: float = 0.0
    n_bits: int = 3
    n_inc: float = 25.0
    disc_points: int = 4096
    disc_half_width: float = 8.0  # in units of w0
    detector_points: int = 1024
    detector_span: float = 1.2
    pixel_boundaries: tuple | None = None  # None -> equal stripes over the aperture

    def as_dict(self) -> dict:
        return asdict(self)


class ReadoutSystem:
    """Caches the expensive, offset-independent stages (focal profile, w0)."""

    def __init__(self, cfg: SystemConfig | None = None):
        self.cfg = cfg or SystemConfig()
        self._cache = {}

    @cached_property
    def focus(self) -> FocusSpec:
        c = self.cfg
        return FocusSpec(c.wavelength, c.na, c.medium_index, c.model, c.filling)

    @cached_property
    def w0(self) -> float:
        return beam_waist(self.focus)

    @property
    def pitch(self) -> float:
        return self.cfg.pitch if self.cfg.pitch is not None else self.w0

    @cached_property
    def propagation(self) -> PropagationSpec:
        c = self.cfg
        if c.lens_diameter is None:
            spec = PropagationSpec.from_focus(c.wavelength, c.na, c.focal_length, method=c.method)
        else:
            spec = PropagationSpec(c.wavelength, c.focal_length, c.lens_diameter, c.method)
        spec.check_na(c.na)
        return spec

    @cached_property
    def disc_grid(self) -> Grid1D:
        return Grid1D.centered(self.cfg.disc_half_width * self.w0, self.cfg.disc_points)

    @cached_property
    def det_grid(self) -> Grid1D:
        return detector_grid(self.propagation, self.cfg.detector_points, self.cfg.detector_span)

    @cached_property
    def incident(self) -> FieldProfile:
        return focal_line_profile(self.focus, self.disc_grid, self.cfg.n_inc)

    @cached_property
    def pixels(self) -> det.PixelArray:
        if self.cfg.pixel_boundaries is not None:
            arr = det.PixelArray(tuple(self.cfg.pixel_boundaries))
        else:
            arr = det.PixelArray.equal(self.propagation.lens_diameter)
        if not arr.covers(0.5 * self.propagation.lens_diameter):
            raise ValueError("pixel array does not cover the lens aperture")
        return arr

    def sequence(self, label: str, offset: float | None = None) -> BitSequence:
        off = self.cfg.offset if offset is None else offset
        return BitSequence.from_string(label, self.pitch, off)

    def disc_field(self, label: str, offset: float | None = None) -> FieldProfile:
        return reflect(self.incident, mask_from_bits(self.sequence(label, offset), self.disc_grid))

    def far_field(self, label: str, offset: float | None = None, method: str | None = None) -> FieldProfile:
        off = self.cfg.offset if offset is None else float(offset)
        return self._far_field(label, off, method or self.cfg.method)

    def _far_field(self, label, offset, method):
        key = (label, offset, method)
        if key not in self._cache:
            spec = replace(self.propagation, method=method)
            self._cache[key] = to_detector_plane(self.disc_field(label, offset), spec, self.det_grid)
        return self._cache[key]

    def far_fields(self, offset: float | None = None, method: str | None = None) -> dict:
        return {s: self.far_field(s, offset, method) for s in all_sequences(self.cfg.n_bits)}

    def merged(self, offset: float | None = None) -> bool:
        off = self.cfg.offset if offset is None else offset
        return off == 0.0 and self.cfg.n_bits == 3

    def detected_profiles(self, offset: float | None = None) -> dict:
        """Far fields keyed by merged labels when merged, raw labels otherwise."""
        ff = self.far_fields(offset)
        return det.merge_profiles(ff) if self.merged(offset) else ff

    def signal_matrix(self, offset: float | None = None, pixels: det.PixelArray | None = None) -> det.SignalMatrix:
        off = self.cfg.offset if offset is None else offset
        meta = {"n_inc": self.cfg.n_inc, "offset": off, "pitch": self.pitch, "w0": self.w0,
                "pixel_boundaries": list((pixels or self.pixels).boundaries)}
        return det.build_signal_matrix(self.detected_profiles(off), pixels or self.pixels,
                                       merge=False, meta=meta)

    def merged_pixel_numbers(self, pixels: det.PixelArray) -> np.ndarray:
        prof = det.merge_profiles(self.far_fields(0.0))
        return np.array([det.pixel_photon_numbers(prof[lab], pixels) for lab in det.MERGED_LABELS])

    def degeneracy_split(self, offset: float) -> dict:
        """Split of the mirror pairs and shape change of every other profile at ``offset``."""
        base, moved = self.far_fields(0.0), self.far_fields(offset)
        pairs = {"001/100": ("001", "100"), "011/110": ("011", "110")}
        split = {k: intensity_distance(moved[a], moved[b]) for k, (a, b) in pairs.items()}
        shift = {s: intensity_distance(moved[s], base[s]) for s in moved}
        return {"offset": offset, "profiles": moved, "split": split, "shift": shift}

    # noise

    def noise_model(self, params: nz.NoiseParams, squeezed: bool, offset: float | None = None):
        """Budgets for every (i, j) plus the pieces needed for sampling."""
        S = self.signal_matrix(offset)
        prof = self.detected_profiles(offset)
        labels = S.labels
        modes = {(i, j): nz.noise_mode(prof[i], S.gains[b], self.pixels, (i, j))
                 for a, i in enumerate(labels) for b, j in enumerate(labels)}
        basis = nz.build_squeezed_subspace([modes[(i, i)] for i in labels]) if squeezed else []
        nz.check_orthonormal(basis)
        budgets = []
        for a, i in enumerate(labels):
            for b, j in enumerate(labels):
                vq = nz.quantum_variance(modes[(i, j)], params, basis, check=False)
                budgets.append(nz.total_variance(S.values[a, b], vq, params, (i, j)))
        return S, modes, basis, budgets

    def sigma_matrix(self, budgets, n: int) -> np.ndarray:
        return np.array([b.sigma_total for b in budgets]).reshape(n, n)

    def pixel_sampling_model(self, S: det.SignalMatrix, params: nz.NoiseParams, basis) -> tuple:
        prof = self.detected_profiles(S.meta["offset"])
        L = []
        for lab in S.labels:
            C = nz.pixel_covariance(prof[lab], self.pixels, params, basis)
            ev, V = np.linalg.eigh(C)
            L.append(V * np.sqrt(np.clip(ev, 0.0, None)))
        G = np.array([g.array for g in S.gains])
        return S.pixel_numbers, np.array(L), G
