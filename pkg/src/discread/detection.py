"""Five-pixel detection, per-sequence gain sets and the signal matrix.

For a gain set built on profile ``j`` the signal of profile ``i`` reduces to

    S_i(j) = b_i (r_i - r_j),  r = (N1 + N5 - N3/2) / (N2 + N4),  b = N2 + N4

so the sign pattern of the whole matrix is fixed by the ordering of ``r``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DegeneracyMismatchError, SingularGeometryError
from .field_core import FieldProfile

# merged labels, reference order; each entry lists the raw sequences it gathers
MERGED = {"000": ("000",), "001/100": ("001", "100"), "010": ("010",),
          "011/110": ("011", "110"), "101": ("101",), "111": ("111",)}

MERGED_LABELS = tuple(MERGED)
# reference signal matrix at N_inc = 25, same order; used for sign checks and display scaling
REFERENCE_SIGNALS = np.array([
    [0, -34, -204, -254, -77, -303],
    [15, 0, -76, -99, -19, -121],
    [23, 20, 0, -6, 16, -13],
    [24, 22, 5, 0, 19, -5],
    [19, 11, -36, -50, 0, -63],
    [24, 23, 9, 5, 20, 0],
], dtype=float)


@dataclass(frozen=True)
class PixelArray:
    boundaries: tuple

    def __post_init__(self):
        b = tuple(float(v) for v in self.boundaries)
        if len(b) != 6:
            raise ValueError(f"need 6 boundaries for 5 pixels, got {len(b)}")
        if not all(np.isfinite(b)) or any(b2 <= b1 for b1, b2 in zip(b, b[1:])):
            raise ValueError(f"pixel boundaries must be finite and strictly increasing: {b}")
        object.__setattr__(self, "boundaries", b)

    @classmethod
    def equal(cls, width: float, n_pixels: int = 5) -> PixelArray:
        return cls(tuple(np.linspace(-0.5 * width, 0.5 * width, n_pixels + 1)))

    @classmethod
    def symmetric(cls, outer: float, middle: float, inner: float) -> PixelArray:
        """Mirror-symmetric layout from the three positive boundary positions."""
        return cls((-outer, -middle, -inner, inner, middle, outer))

    def covers(self, half_aperture: float, rtol: float = 1e-9) -> bool:
        return self.boundaries[0] <= -half_aperture * (1 - rtol) and self.boundaries[-1] >= half_aperture * (1 - rtol)

    def labels(self, x: np.ndarray) -> np.ndarray:
        """Pixel index (0..4) of every node, -1 outside; the last pixel is closed on the right."""
        b = np.asarray(self.boundaries)
        idx = np.searchsorted(b, x, side="right") - 1
        idx[x == b[-1]] = len(b) - 2
        idx[(x < b[0]) | (x > b[-1])] = -1
        return idx


def pixel_photon_numbers(u: FieldProfile, array: PixelArray) -> np.ndarray:
    """Photon number on each pixel: trapezoid weights of the nodes falling inside it."""
    g = u.grid
    tol = 1e-9 * g.dx
    if array.boundaries[0] < g.x_min - tol or array.boundaries[-1] > g.x_max + tol:
        raise ValueError("pixel array extends beyond the detector grid")
    lab = array.labels(u.x)
    dens = g.weights * u.intensity
    inside = lab >= 0
    return np.bincount(lab[inside], weights=dens[inside], minlength=5)


@dataclass(frozen=True)
class GainSet:
    target: str
    gains: tuple

    def __post_init__(self):
        s = tuple(float(v) for v in self.gains)
        if len(s) != 5:
            raise ValueError("a gain set has 5 gains")
        scale = max(abs(v) for v in s) or 1.0
        if abs(s[0] - s[4]) > 1e-12 * scale or abs(s[1] - s[3]) > 1e-12 * scale:
            raise ValueError(f"gains must satisfy s1 = s5 and s2 = s4: {s}")
        if abs(s[2] + 0.5 * s[0]) > 1e-12 * scale:
            raise ValueError(f"gains must satisfy s3 = -s1/2: {s}")
        object.__setattr__(self, "gains", s)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.gains)

    def scaled(self, c: float) -> GainSet:
        return GainSet(self.target, tuple(c * np.asarray(self.gains)))


def solve_gains(N, target: str = "", s1: float = 1.0) -> GainSet:
    N = np.asarray(N, dtype=float)
    den = N[1] + N[3]
    if not den > 0:
        raise SingularGeometryError("N2 + N4 = 0: pixels 2 and 4 receive no light, change the layout")
    s2 = -s1 * (N[0] + N[4] - 0.5 * N[2]) / den
    return GainSet(target, (s1, s2, -0.5 * s1, s2, s1))


def signal(N, g) -> float:
    """``sum_k sigma_k N_k``; ``g`` is a :class:`GainSet` or any 5-vector of gains."""
    gains = g.array if isinstance(g, GainSet) else np.asarray(g, dtype=float)
    return float(np.dot(gains, np.asarray(N, dtype=float)))


def _snap(S: np.ndarray, scale: np.ndarray) -> np.ndarray:
    # entries at roundoff level of the weighted sum are exact zeros
    return np.where(np.abs(S) <= 1e-12 * scale, 0.0, S)


@dataclass(frozen=True)
class SignalMatrix:
    labels: tuple
    values: np.ndarray = field(repr=False)
    pixel_numbers: np.ndarray = field(repr=False)
    gains: tuple = field(repr=False)
    meta: dict = field(default_factory=dict)

    def entry(self, i: str, j: str) -> float:
        return float(self.values[self.labels.index(i), self.labels.index(j)])

    def zero_mask(self, rtol: float = 1e-8) -> np.ndarray:
        return np.abs(self.values) <= rtol * np.abs(self.values).max()

    def rescaled_to(self, table: np.ndarray = REFERENCE_SIGNALS) -> np.ndarray:
        """Per-column positive factors fitted (least squares) to a reference table, for display."""
        S = self.values
        c = np.einsum("ij,ij->j", S, table) / np.maximum(np.einsum("ij,ij->j", S, S), 1e-300)
        return S * np.clip(c, 0.0, None)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["i\\j", *self.labels])
        for lab, row in zip(self.labels, self.values):
            w.writerow([lab, *(repr(float(v)) for v in row)])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {"labels": list(self.labels), "signals": self.values.tolist(),
               "pixel_numbers": self.pixel_numbers.tolist(),
               "gains": {g.target: list(g.gains) for g in self.gains}, "meta": self.meta}
        return json.dumps(doc, indent=2, sort_keys=True)


def merge_profiles(profiles: dict, tol: float = 1e-8) -> dict:
    """Gather mirror-degenerate sequences; raise if their intensities differ by more than ``tol``."""
    from .propagation import intensity_distance
    out = {}
    for lab, members in MERGED.items():
        ps = [profiles[m] for m in members]
        for p in ps[1:]:
            d = intensity_distance(ps[0], p)
            if d > tol:
                raise DegeneracyMismatchError(f"{members}: intensity distance {d:.3g} > {tol:g}")
        # intensities coincide; the first member's amplitude (phase included) represents the pair
        out[lab] = ps[0]
    return out


def build_signal_matrix(profiles: dict, array: PixelArray, merge: bool = True,
                        tol: float = 1e-8, meta: dict | None = None) -> SignalMatrix:
    """Signal matrix over merged (6x6) or raw (8x8) profiles; only intensities enter."""
    if merge:
        profiles = merge_profiles(profiles, tol)
    labels = tuple(profiles)
    N = np.array([pixel_photon_numbers(profiles[lab], array) for lab in labels])
    gains = tuple(solve_gains(N[j], lab) for j, lab in enumerate(labels))
    G = np.array([g.array for g in gains])
    S = N @ G.T
    scale = N @ np.abs(G).T
    return SignalMatrix(labels, _snap(S, scale), N, gains, dict(meta or {}))


def ratio_key(N) -> float:
    N = np.asarray(N, dtype=float)
    return float((N[0] + N[4] - 0.5 * N[2]) / (N[1] + N[3]))


def sign_agreement(S: np.ndarray, table: np.ndarray = REFERENCE_SIGNALS) -> np.ndarray:
    """Boolean matrix: entry sign matches the reference (diagonal counted as agreeing)."""
    return np.sign(S) == np.sign(table)


def calibrate_pixel_boundaries(pixel_numbers_for, half_aperture: float, n_steps: int = 24,
                               table: np.ndarray = REFERENCE_SIGNALS, ratio_target: float = 204.0 / 36.0):
    """Search symmetric layouts spanning the aperture for the best agreement with the reference sign pattern.

    ``pixel_numbers_for(array)`` returns the 6x5 merged pixel-number matrix in
    reference order. Ties are broken by the 010-column ratio S_000/S_101 in log
    distance to ``ratio_target``. Returns ``(array, n_sign_matches, ratio)``.
    """
    best = None
    fr = (np.arange(n_steps) + 0.5) / n_steps
    for a in fr:
        for b in fr:
            if b >= a:
                continue
            arr = PixelArray.symmetric(half_aperture, a * half_aperture, b * half_aperture)
            N = pixel_numbers_for(arr)
            if np.any(N[:, 1] + N[:, 3] <= 0):
                continue
            r = (N[:, 0] + N[:, 4] - 0.5 * N[:, 2]) / (N[:, 1] + N[:, 3])
            S = (N[:, 1] + N[:, 3])[:, None] * (r[:, None] - r[None, :])
            hits = int(sign_agreement(S, table).sum())
            ratio = S[0, 2] / S[4, 2] if S[4, 2] != 0 else np.inf
            miss = abs(np.log(ratio / ratio_target)) if np.isfinite(ratio) and ratio > 0 else np.inf
            key = (-hits, miss)
            if best is None or key < best[0]:
                best = (key, arr, hits, float(ratio))
    if best is None:
        raise SingularGeometryError("no admissible pixel layout found")
    return best[1], best[2], best[3]
