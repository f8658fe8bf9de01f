"""Disc plane -> detector plane.

The detector sits in the lens plane at distance ``f`` from the disc. The
default ``fraunhofer`` method is the far-field (stationary-phase) limit of the
2-D Rayleigh-Sommerfeld integral, keeping the exact direction cosine
``sin(theta) = xi / R0`` rather than the small-angle ``xi / f``:

    U(xi) = (f / R0) sqrt(k / (2 pi R0)) exp(i (k R0 - pi/4)) * int u(x) exp(-i k x xi / R0) dx

with ``R0 = sqrt(xi^2 + f^2)``. It conserves energy over the propagating
spectrum. ``rayleigh_sommerfeld`` evaluates the full integral as a cross-check.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from . import kernels
from .field_core import FieldProfile, Grid1D

METHODS = ("fraunhofer", "rayleigh_sommerfeld")


@dataclass(frozen=True)
class PropagationSpec:
    wavelength: float
    focal_length: float
    lens_diameter: float
    method: str = "fraunhofer"
    aperture: bool = True

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown propagation method {self.method!r}")
        if not (self.wavelength > 0 and self.focal_length > 0 and self.lens_diameter > 0):
            raise ValueError("wavelength, focal_length and lens_diameter must be > 0")
        if self.focal_length / self.wavelength <= 1e3:
            raise ValueError(f"focal_length/wavelength = {self.focal_length / self.wavelength:.3g} "
                             "must exceed 1e3 (far-field regime)")

    @classmethod
    def from_focus(cls, wavelength: float, na: float, focal_length: float = 4e-3, **kw) -> PropagationSpec:
        return cls(wavelength, focal_length, 2 * focal_length * float(np.tan(np.arcsin(na))), **kw)

    @property
    def k(self) -> float:
        return 2 * np.pi / self.wavelength

    @property
    def na(self) -> float:
        return float(np.sin(np.arctan(self.lens_diameter / (2 * self.focal_length))))

    def check_na(self, na: float, tol: float = 1e-6) -> None:
        want = float(np.tan(np.arcsin(na)))
        got = self.lens_diameter / (2 * self.focal_length)
        if abs(got - want) > tol * want:
            raise ValueError(f"lens geometry D/2f = {got:.8g} inconsistent with NA {na} (tan = {want:.8g})")


def detector_grid(spec: PropagationSpec, n_points: int = 1024, span: float = 1.2) -> Grid1D:
    return Grid1D.centered(0.5 * span * spec.lens_diameter, n_points)


def to_detector_plane(u_disc: FieldProfile, spec: PropagationSpec, grid: Grid1D | None = None) -> FieldProfile:
    grid = grid or detector_grid(spec)
    half = 0.5 * spec.lens_diameter
    if spec.aperture and (grid.x_min > -half or grid.x_max < half):
        raise ValueError("detector grid does not cover the lens aperture")
    xi = grid.x
    k, f = spec.k, spec.focal_length
    wu = u_disc.grid.weights * u_disc.amplitude
    x0, dx = u_disc.grid.x[0], u_disc.grid.dx
    if spec.method == "fraunhofer":
        R0 = np.hypot(xi, f)
        s = kernels.far_field_sum(x0, dx, wu, k * xi / R0)
        U = (f / R0) * np.sqrt(k / (2 * np.pi * R0)) * np.exp(1j * (k * R0 - 0.25 * np.pi)) * s
    else:
        U = kernels.rayleigh_sommerfeld_sum(x0, dx, wu, xi, f, k)
    if spec.aperture:
        U = np.where(np.abs(xi) <= half, U, 0.0)
    return FieldProfile(grid, U)


def intensity_distance(a: FieldProfile, b: FieldProfile) -> float:
    """Relative L2 distance of two intensity profiles (normalised by their mean norm)."""
    if a.grid != b.grid:
        raise ValueError("profiles on different grids")
    w = a.grid.weights
    ia, ib = a.intensity, b.intensity
    num = np.sqrt(w @ (ia - ib) ** 2)
    den = 0.5 * (np.sqrt(w @ ia ** 2) + np.sqrt(w @ ib ** 2))
    return float(num / den) if den > 0 else 0.0


def profiles_to_csv(profiles: dict) -> str:
    buf = io.StringIO()
    buf.write("sequence,x,re,im,intensity\n")
    for label, p in profiles.items():
        for xv, a, it in zip(p.x, p.amplitude, p.intensity):
            buf.write(f"{label},{float(xv)!r},{float(a.real)!r},{float(a.imag)!r},{float(it)!r}\n")
    return buf.getvalue()
