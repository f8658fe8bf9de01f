"""Focal-plane field of a focused, x-polarised beam.

Two models are provided: the vectorial Richards-Wolf integrals and the scalar
paraxial (Airy) pattern. Spot sizes use the diameter enclosing 86 % of the
focal-plane energy ``|Ex|^2 + |Ey|^2 + |Ez|^2``.

Field constants assume a unit focal length; only shapes and ratios matter
downstream because every profile is renormalised to a photon number.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.special import j0, j1, jv

from .field_core import FieldProfile, Grid1D, normalize

GL_NODES = 256
SPOT_FRACTION = 0.86


@dataclass(frozen=True)
class FocusSpec:
    wavelength: float = 780e-9
    numerical_aperture: float = 0.47
    medium_index: float = 1.0
    model: str = "vectorial"
    # pupil filling ratio of a Gaussian beam (beam radius / aperture radius); None = plane wave
    filling: float | None = None
    # paraxial aperture measured as sin(theta_max) ("sine") or tan(theta_max) ("tangent")
    paraxial_aperture: str = "sine"

    def __post_init__(self):
        if not self.wavelength > 0:
            raise ValueError(f"wavelength must be > 0, got {self.wavelength}")
        if not self.medium_index > 0:
            raise ValueError(f"medium_index must be > 0, got {self.medium_index}")
        if not 0 < self.numerical_aperture < self.medium_index:
            raise ValueError(
                f"numerical aperture must satisfy 0 < NA < medium_index "
                f"(NA={self.numerical_aperture}, n={self.medium_index})")
        if self.model not in ("vectorial", "paraxial"):
            raise ValueError(f"unknown focusing model {self.model!r}")
        if self.paraxial_aperture not in ("sine", "tangent"):
            raise ValueError(f"unknown paraxial aperture convention {self.paraxial_aperture!r}")
        if self.filling is not None and not self.filling > 0:
            raise ValueError(f"filling must be > 0, got {self.filling}")

    @property
    def theta_max(self) -> float:
        return float(np.arcsin(self.numerical_aperture / self.medium_index))

    @property
    def k(self) -> float:
        """Wavenumber in the medium."""
        return 2 * np.pi * self.medium_index / self.wavelength

    @property
    def paraxial_na(self) -> float:
        if self.paraxial_aperture == "tangent":
            return self.medium_index * float(np.tan(self.theta_max))
        return self.numerical_aperture


@dataclass(frozen=True)
class Grid2D:
    """Square uniform grid, same sampling on both axes."""
    half_width: float
    n_points: int = 257

    @classmethod
    def default(cls, wavelength: float) -> Grid2D:
        return cls(2.0 * wavelength, 257)

    @property
    def axis(self) -> np.ndarray:
        return Grid1D.centered(self.half_width, self.n_points).x

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / (self.n_points - 1)

    def mesh(self):
        a = self.axis
        return np.meshgrid(a, a, indexing="xy")  # X[iy, ix], Y[iy, ix]


@dataclass(frozen=True)
class FocalField2D:
    grid: Grid2D
    Ex: np.ndarray = field(repr=False)
    Ey: np.ndarray = field(repr=False)
    Ez: np.ndarray = field(repr=False)

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.Ex) ** 2 + np.abs(self.Ey) ** 2 + np.abs(self.Ez) ** 2

    def peaks(self) -> dict:
        return {"Ex": float(np.abs(self.Ex).max()),
                "Ey": float(np.abs(self.Ey).max()),
                "Ez": float(np.abs(self.Ez).max())}

    def to_csv(self) -> str:
        X, Y = self.grid.mesh()
        buf = io.StringIO()
        buf.write("x,y,|Ex|,|Ey|,|Ez|,intensity\n")
        cols = (X.ravel(), Y.ravel(), np.abs(self.Ex).ravel(), np.abs(self.Ey).ravel(),
                np.abs(self.Ez).ravel(), self.intensity.ravel())
        for row in zip(*cols):
            buf.write(",".join(repr(float(v)) for v in row) + "\n")
        return buf.getvalue()


def _pupil(spec: FocusSpec, s: np.ndarray) -> np.ndarray:
    if spec.filling is None:
        return np.ones_like(s)
    return np.exp(-(s / (spec.filling * np.sin(spec.theta_max))) ** 2)


def _theta_nodes(spec: FocusSpec, n_nodes: int):
    t, w = np.polynomial.legendre.leggauss(n_nodes)
    a = spec.theta_max
    return 0.5 * a * (t + 1.0), 0.5 * a * w


def radial_integrals(r, spec: FocusSpec, n_nodes: int = GL_NODES):
    """I0, I1, I2 at radii ``r`` (Gauss-Legendre over theta, sqrt(cos) apodisation)."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    th, w = _theta_nodes(spec, n_nodes)
    s, c = np.sin(th), np.cos(th)
    apod = np.sqrt(c) * _pupil(spec, s) * w
    g0, g1, g2 = apod * s * (1 + c), apod * s * s, apod * s * (1 - c)
    out = np.empty((3, r.size))
    for lo in range(0, r.size, 2048):
        v = spec.k * np.outer(r[lo:lo + 2048], s)
        out[0, lo:lo + 2048] = j0(v) @ g0
        out[1, lo:lo + 2048] = j1(v) @ g1
        out[2, lo:lo + 2048] = jv(2, v) @ g2
    return out[0], out[1], out[2]


def _amp(spec: FocusSpec) -> float:
    return 0.5 * spec.k


def richards_wolf_focal_field(spec: FocusSpec, grid: Grid2D, n_nodes: int = GL_NODES) -> FocalField2D:
    X, Y = grid.mesh()
    rho = np.hypot(X, Y)
    phi = np.arctan2(Y, X)
    radii, inv = np.unique(rho, return_inverse=True)
    i0, i1, i2 = (a[inv].reshape(rho.shape) for a in radial_integrals(radii, spec, n_nodes))
    A = _amp(spec)
    Ex = -1j * A * (i0 + i2 * np.cos(2 * phi))
    Ey = -1j * A * i2 * np.sin(2 * phi)
    Ez = -2.0 * A * i1 * np.cos(phi)
    return FocalField2D(grid, Ex, Ey, Ez.astype(complex))


def _airy(spec: FocusSpec, r):
    K = 2 * np.pi * spec.paraxial_na / spec.wavelength
    v = K * np.asarray(r, dtype=float)
    safe = np.where(v == 0, 1.0, v)
    return (K * K / (2 * np.pi)) * np.where(v == 0, 0.5, j1(safe) / safe)


def paraxial_focal_field(spec: FocusSpec, grid: Grid2D) -> FocalField2D:
    """Airy pattern of a uniformly filled circular pupil, stored in Ex."""
    X, Y = grid.mesh()
    Ex = _airy(spec, np.hypot(X, Y)).astype(complex)
    zero = np.zeros_like(Ex)
    return FocalField2D(grid, Ex, zero, zero.copy())


def focal_field(spec: FocusSpec, grid: Grid2D) -> FocalField2D:
    if spec.model == "vectorial":
        return richards_wolf_focal_field(spec, grid)
    return paraxial_focal_field(spec, grid)


def paraxial_pupil_energy(spec: FocusSpec) -> float:
    """Energy of the uniform pupil, ``pi K^2 / (2 pi)^2``; equals the focal energy by Parseval."""
    K = 2 * np.pi * spec.paraxial_na / spec.wavelength
    return K * K / (4 * np.pi)


def vectorial_total_energy(spec: FocusSpec, n_nodes: int = GL_NODES) -> float:
    """Focal-plane ``int |E|^2 dA`` from the angular spectrum: ``2 pi int sin(t) P(t)^2 dt``."""
    th, w = _theta_nodes(spec, n_nodes)
    return float(2 * np.pi * np.sum(w * np.sin(th) * _pupil(spec, np.sin(th)) ** 2))


def spot_size_86(intensity: np.ndarray, grid: Grid2D, fraction: float = SPOT_FRACTION) -> float:
    """Diameter of the smallest centred disc holding ``fraction`` of the grid energy.

    Radii are quantised to the grid: the returned disc holds at least
    ``fraction`` of the energy, the next smaller grid radius holds less.
    """
    intensity = np.asarray(intensity, dtype=float)
    if np.any(intensity < 0):
        raise ValueError("intensity must be nonnegative")
    X, Y = grid.mesh()
    radii, inv = np.unique(np.hypot(X, Y), return_inverse=True)
    ring = np.bincount(inv.ravel(), weights=intensity.ravel(), minlength=radii.size)
    cum = np.cumsum(ring)
    total = cum[-1]
    if not total > 0:
        raise ValueError("zero total energy, spot size undefined")
    i = int(np.searchsorted(cum, fraction * total * (1 - 1e-14)))
    return 2.0 * float(radii[min(i, radii.size - 1)])


def _radial_window(spec: FocusSpec, model: str, window: float) -> float:
    na = spec.paraxial_na if model == "paraxial" else spec.numerical_aperture
    return window * spec.wavelength / na


def encircled_energy(spec: FocusSpec, r: np.ndarray, model: str | None = None) -> np.ndarray:
    """Fraction of the total focal energy inside radius ``r`` (``r`` sorted, starting at 0).

    The azimuthal integral is done analytically; the total comes from
    Parseval, so the slowly decaying tails need not be sampled.
    """
    model = model or spec.model
    r = np.asarray(r, dtype=float)
    if model == "vectorial":
        i0, i1, i2 = radial_integrals(r, spec)
        dens = _amp(spec) ** 2 * 2 * np.pi * r * (i0 ** 2 + 2 * i1 ** 2 + i2 ** 2)
        total = vectorial_total_energy(spec)
    else:
        dens = 2 * np.pi * r * _airy(spec, r) ** 2
        total = paraxial_pupil_energy(spec)
    return cumulative_trapezoid(dens, r, initial=0.0) / total


def spot_size_86_radial(spec: FocusSpec, model: str | None = None, window: float = 20.0,
                        n_r: int = 4001, fraction: float = SPOT_FRACTION) -> float:
    """D86 from the azimuthally integrated encircled-energy curve."""
    model = model or spec.model
    r = np.linspace(0.0, _radial_window(spec, model, window), n_r)
    ee = encircled_energy(spec, r, model)
    if ee[-1] < fraction:
        raise ValueError(f"radial window too small: only {ee[-1]:.4f} of the energy enclosed")
    i = int(np.searchsorted(ee, fraction))
    r86 = np.interp(fraction, ee[i - 1:i + 1], r[i - 1:i + 1])
    return 2.0 * float(r86)


@dataclass(frozen=True)
class ScanRow:
    na: float
    d86_paraxial: float
    d86_vectorial: float


def na_scan(spec_base: FocusSpec, na_values) -> list[ScanRow]:
    rows = []
    for na in na_values:
        try:
            spec = replace(spec_base, numerical_aperture=float(na))
            rows.append(ScanRow(float(na),
                                spot_size_86_radial(spec, "paraxial"),
                                spot_size_86_radial(spec, "vectorial")))
        except ValueError as exc:
            raise ValueError(f"NA={na}: {exc}") from exc
    return rows


def scan_to_csv(rows) -> str:
    lines = ["na,d86_paraxial,d86_vectorial"]
    lines += [f"{r.na!r},{r.d86_paraxial!r},{r.d86_vectorial!r}" for r in rows]
    return "\n".join(lines) + "\n"


def focal_slice_x(field2d: FocalField2D, n_inc: float | None = None) -> FieldProfile:
    """Ex along the y = 0 line as a 1-D profile."""
    axis = field2d.grid.axis
    iy = int(np.argmin(np.abs(axis)))
    if abs(axis[iy]) > 1e-9 * field2d.grid.spacing:
        raise ValueError("2-D grid has no y = 0 line; use an odd number of points")
    prof = FieldProfile(Grid1D.centered(field2d.grid.half_width, field2d.grid.n_points), field2d.Ex[iy, :])
    return normalize(prof, n_inc) if n_inc is not None else prof


def focal_line_profile(spec: FocusSpec, grid: Grid1D, n_inc: float | None = None) -> FieldProfile:
    """Ex(x, 0) evaluated directly on a 1-D grid (no 2-D map needed)."""
    x = grid.x
    if spec.model == "vectorial":
        i0, _, i2 = radial_integrals(np.abs(x), spec)
        amp = -1j * _amp(spec) * (i0 + i2)
    else:
        amp = _airy(spec, np.abs(x)).astype(complex)
    prof = FieldProfile(grid, amp)
    return normalize(prof, n_inc) if n_inc is not None else prof


def slice_width_86(spec: FocusSpec, window: float = 30.0, n_r: int = 6001,
                   fraction: float = SPOT_FRACTION) -> float:
    """Full width of the centred interval holding ``fraction`` of the energy of |Ex(x, 0)|^2."""
    r = np.linspace(0.0, spec.wavelength * window / spec.numerical_aperture, n_r)
    if spec.model == "vectorial":
        i0, _, i2 = radial_integrals(r, spec)
        dens = (i0 + i2) ** 2
    else:
        dens = _airy(spec, r) ** 2
    cum = cumulative_trapezoid(dens, r, initial=0.0)
    i = int(np.searchsorted(cum, fraction * cum[-1]))
    return 2.0 * float(np.interp(fraction * cum[-1], cum[i - 1:i + 1], r[i - 1:i + 1]))


def beam_waist(spec: FocusSpec) -> float:
    """Waist w0 used as the default bit pitch: half the 86 % width of the focal line profile."""
    return 0.5 * slice_width_86(spec)
