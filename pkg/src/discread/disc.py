"""Bit sequences burnt on the disc and their reflective 0/pi phase masks.

Encoding: the surface starts at the "pit" level left of the first bit; a 1
toggles the level (pit <-> hole) at its site, a 0 keeps it. Holes reflect
with a pi phase. Bit ``j`` of ``n`` sits at
``x_j = (j - (n - 1)/2) * pitch + offset``, so the sequence is centred on the
beam when ``offset = 0``. A grid node at ``x`` lies past a toggle at ``x_j``
iff ``x >= x_j``.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import GridMismatchError
from .field_core import FieldProfile, Grid1D


@dataclass(frozen=True)
class BitSequence:
    bits: tuple
    pitch: float
    offset: float = 0.0

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if len(bits) < 1:
            raise ValueError("a bit sequence needs at least one bit")
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"bits must be 0 or 1, got {bits}")
        if not self.pitch > 0:
            raise ValueError(f"pitch must be > 0, got {self.pitch}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_string(cls, text: str, pitch: float, offset: float = 0.0) -> BitSequence:
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not a bit string: {text!r}")
        return cls(tuple(int(c) for c in text), pitch, offset)

    @property
    def label(self) -> str:
        return "".join(map(str, self.bits))

    @property
    def n_bits(self) -> int:
        return len(self.bits)

    @property
    def sites(self) -> np.ndarray:
        j = np.arange(self.n_bits)
        return (j - 0.5 * (self.n_bits - 1)) * self.pitch + self.offset

    @property
    def transitions(self) -> np.ndarray:
        return self.sites[np.asarray(self.bits, dtype=bool)]

    def reversed(self) -> BitSequence:
        return BitSequence(self.bits[::-1], self.pitch, self.offset)


def all_sequences(n_bits: int = 3) -> list[str]:
    return ["".join(p) for p in product("01", repeat=n_bits)]


@dataclass(frozen=True)
class PhaseMask:
    grid: Grid1D
    phase: np.ndarray = field(repr=False)
    transitions: tuple = ()

    def __post_init__(self):
        p = np.asarray(self.phase, dtype=float).copy()
        if p.shape != (self.grid.n_points,):
            raise ValueError("phase array does not match the grid")
        if not np.all((p == 0.0) | (p == np.pi)):
            raise ValueError("phase values must be 0 or pi")
        p.setflags(write=False)
        object.__setattr__(self, "phase", p)

    @property
    def factor(self) -> np.ndarray:
        """Exact +/-1 reflection factor ``exp(i phase)``."""
        return np.where(self.phase == 0.0, 1.0, -1.0)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("x,phase\n")
        for xv, ph in zip(self.grid.x, self.phase):
            buf.write(f"{float(xv)!r},{float(ph)!r}\n")
        return buf.getvalue()


def mask_from_bits(seq: BitSequence, grid: Grid1D) -> PhaseMask:
    lo = seq.sites[0] - 0.5 * seq.pitch
    hi = seq.sites[-1] + 0.5 * seq.pitch
    if grid.x_min > lo or grid.x_max < hi:
        raise ValueError(f"grid [{grid.x_min:.4g}, {grid.x_max:.4g}] does not contain "
                         f"the bit cells [{lo:.4g}, {hi:.4g}]")
    x = grid.x
    level = np.zeros(x.size, dtype=np.int64)
    for t in seq.transitions:
        level ^= (x >= t)
    return PhaseMask(grid, np.where(level == 1, np.pi, 0.0), tuple(float(t) for t in seq.transitions))


def reflect(incident: FieldProfile, mask: PhaseMask) -> FieldProfile:
    if incident.grid != mask.grid:
        raise GridMismatchError(f"grid mismatch: {incident.grid} vs {mask.grid}")
    return FieldProfile(incident.grid, incident.amplitude * mask.factor)
