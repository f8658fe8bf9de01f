"""Uniform 1-D grids and complex field profiles.

Amplitudes are kept in photon-flux units: ``|u(x)|**2`` integrates to a
photon number, so pixel counts need no extra constants.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import GridMismatchError


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ValueError(f"n_points must be an integer >= 2, got {self.n_points}")
        if not np.isfinite(self.x_min) or not np.isfinite(self.x_max) or not self.x_max > self.x_min:
            raise ValueError(f"need finite x_max > x_min, got [{self.x_min}, {self.x_max}]")

    @classmethod
    def centered(cls, half_width: float, n_points: int) -> Grid1D:
        return cls(-float(half_width), float(half_width), int(n_points))

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def x(self) -> np.ndarray:
        # built from the centre so that symmetric grids are exactly symmetric
        c = 0.5 * (self.x_min + self.x_max)
        return c + (np.arange(self.n_points) - 0.5 * (self.n_points - 1)) * self.dx

    @property
    def weights(self) -> np.ndarray:
        """Trapezoid weights; ``weights @ f`` integrates ``f``."""
        w = np.full(self.n_points, self.dx)
        w[0] = w[-1] = 0.5 * self.dx
        return w

    def refined(self) -> Grid1D:
        """Same window, twice the intervals."""
        return Grid1D(self.x_min, self.x_max, 2 * self.n_points - 1)


@dataclass(frozen=True)
class FieldProfile:
    grid: Grid1D
    amplitude: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.asarray(self.amplitude, dtype=np.complex128)
        if a.shape != (self.grid.n_points,):
            raise ValueError(f"amplitude shape {a.shape} does not match grid of {self.grid.n_points} points")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "amplitude", a)

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.amplitude) ** 2

    def scaled(self, factor: complex) -> FieldProfile:
        return FieldProfile(self.grid, factor * self.amplitude)

    def mirrored(self) -> FieldProfile:
        """Profile reflected about the grid centre."""
        return FieldProfile(self.grid, self.amplitude[::-1])

    def to_csv(self, path=None) -> str:
        text = profile_to_csv(self)
        if path is not None:
            Path(path).write_text(text)
        return text


def _check_same_grid(f: FieldProfile, g: FieldProfile) -> None:
    if f.grid != g.grid:
        raise GridMismatchError(f"grid mismatch: {f.grid} vs {g.grid}")


def photon_number(f: FieldProfile) -> float:
    """Trapezoid integral of ``|u|^2`` over the grid."""
    return float(f.grid.weights @ f.intensity)


def overlap(f: FieldProfile, g: FieldProfile) -> complex:
    """``int conj(u_f) u_g dx``."""
    _check_same_grid(f, g)
    return complex(f.grid.weights @ (np.conj(f.amplitude) * g.amplitude))


def normalize(f: FieldProfile, target: float) -> FieldProfile:
    n = photon_number(f)
    if not n > 0:
        raise ValueError("cannot normalize a zero-energy profile")
    if target < 0:
        raise ValueError(f"target photon number must be >= 0, got {target}")
    return f.scaled(np.sqrt(target / n))


def centered_width(f: FieldProfile, fraction: float = 0.86) -> float:
    """Full width of the smallest interval centred on x=0 holding ``fraction`` of the energy."""
    x = f.x
    dens = f.intensity * f.grid.weights
    order = np.argsort(np.abs(x), kind="stable")
    r = np.abs(x)[order]
    cum = np.cumsum(dens[order])
    total = cum[-1]
    if not total > 0:
        raise ValueError("zero-energy profile has no width")
    i = int(np.searchsorted(cum, fraction * total))
    return 2.0 * float(r[min(i, r.size - 1)])


def profile_to_csv(f: FieldProfile) -> str:
    buf = io.StringIO()
    buf.write("x,re,im\n")
    for xv, a in zip(f.x, f.amplitude):
        buf.write(f"{float(xv)!r},{float(a.real)!r},{float(a.imag)!r}\n")
    return buf.getvalue()


def profile_from_csv(text: str) -> FieldProfile:
    """Inverse of :func:`profile_to_csv`; the grid is rebuilt from the first/last x."""
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if lines[0].replace(" ", "") != "x,re,im":
        raise ValueError(f"unexpected CSV header {lines[0]!r}")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    grid = Grid1D(float(data[0, 0]), float(data[-1, 0]), data.shape[0])
    if not np.allclose(grid.x, data[:, 0], rtol=0, atol=1e-9 * grid.dx):
        raise ValueError("x column is not a uniform grid")
    return FieldProfile(grid, data[:, 1] + 1j * data[:, 2])
