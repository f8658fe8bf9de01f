"""Noise budget of the gain-weighted signals.

Quantum noise follows the noise-mode picture: the measurement S_i(j) only
probes the mode ``w_ij(x) ~ sigma_k(j) u_i(x)`` (``x`` in pixel k), so

    var_quantum = f^2 n_ref <dX^2_w>,   f^2 n_ref = sum_k sigma_k^2 N_k(i),

where ``n_ref`` is the detected photon number of ``u_i`` and
``<dX^2_w> = P eta + (1 - P)`` with ``eta = 10^(-s/10)`` and ``P`` the weight of
``w`` in the squeezed subspace. Classical excess noise adds ``B S^2 / N_inc``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .detection import GainSet, PixelArray
from .field_core import FieldProfile, overlap, photon_number


@dataclass(frozen=True)
class NoiseParams:
    B: float = 10.0
    squeeze_db: float = 10.0
    n_inc: float = 25.0

    def __post_init__(self):
        if not self.B >= 0:
            raise ValueError(f"classical noise factor B must be >= 0, got {self.B}")
        if not self.squeeze_db >= 0:
            raise ValueError(f"squeezing must be >= 0 dB, got {self.squeeze_db}")
        if not self.n_inc > 0:
            raise ValueError(f"N_inc must be > 0, got {self.n_inc}")

    @property
    def eta(self) -> float:
        """Variance factor of a squeezed quadrature."""
        return 10.0 ** (-self.squeeze_db / 10.0)

    @property
    def beta2(self) -> float:
        return self.B / self.n_inc

    @classmethod
    def from_excess_db(cls, excess_db: float, **kw) -> NoiseParams:
        return cls(B=10.0 ** (excess_db / 10.0), **kw)


@dataclass(frozen=True)
class NoiseMode:
    profile: FieldProfile = field(repr=False)
    source: tuple
    f2: float
    n_ref: float

    @property
    def shot_variance(self) -> float:
        return self.f2 * self.n_ref


@dataclass(frozen=True)
class NoiseBudget:
    disc_sequence: str
    gain_set: str
    mean: float
    var_classical: float
    var_quantum: float
    var_total: float = field(init=False)

    def __post_init__(self):
        if self.var_classical < 0 or self.var_quantum < 0:
            raise ValueError("variance contributions must be nonnegative")
        object.__setattr__(self, "var_total", self.var_classical + self.var_quantum)

    @property
    def sigma_total(self) -> float:
        return float(np.sqrt(self.var_total))


def classical_variance(S: float, p: NoiseParams) -> float:
    return float(p.B * S * S / p.n_inc)


def node_gains(grid_x: np.ndarray, g, array: PixelArray) -> np.ndarray:
    """Per-node gain; ``g`` is a GainSet or any plain 5-vector."""
    gains = g.array if isinstance(g, GainSet) else np.asarray(g, dtype=float)
    if gains.shape != (5,):
        raise ValueError("need 5 gains")
    lab = array.labels(grid_x)
    return np.where(lab >= 0, gains[np.clip(lab, 0, 4)], 0.0)


def noise_mode(u_i: FieldProfile, g, array: PixelArray, source=("", "")) -> NoiseMode:
    w = node_gains(u_i.x, g, array) * u_i.amplitude
    raw = FieldProfile(u_i.grid, w)
    norm2 = photon_number(raw)  # = sum_k sigma_k^2 N_k
    if not norm2 > 0:
        raise ValueError(f"noise mode {source} vanishes: all gains zero on the illuminated pixels")
    n_ref = photon_number(u_i)
    return NoiseMode(raw.scaled(1.0 / np.sqrt(norm2)), tuple(source), norm2 / n_ref, n_ref)


def check_orthonormal(basis, tol: float = 1e-8) -> None:
    if not basis:
        return
    G = np.array([[overlap(a, b) for b in basis] for a in basis])
    err = np.abs(G - np.eye(len(basis))).max()
    if err > tol:
        raise ValueError(f"squeezed basis is not orthonormal (max Gram error {err:.3g})")


def parallel_fraction(nm: NoiseMode, basis) -> float:
    return float(min(1.0, sum(abs(overlap(b, nm.profile)) ** 2 for b in basis)))


def quadrature_variance(P: float, p: NoiseParams) -> float:
    return P * p.eta + (1.0 - P)


def quantum_variance(nm: NoiseMode, p: NoiseParams, basis=(), check: bool = True) -> float:
    if check:
        check_orthonormal(list(basis))
    P = parallel_fraction(nm, basis) if basis else 0.0
    return nm.shot_variance * quadrature_variance(P, p)


def build_squeezed_subspace(modes, rank_tol: float = 1e-10) -> list[FieldProfile]:
    """Orthonormal basis of span{modes} (Gram-Schmidt, two passes)."""
    profs = [m.profile if isinstance(m, NoiseMode) else m for m in modes]
    basis: list[FieldProfile] = []
    for v in profs:
        n0 = np.sqrt(photon_number(v))
        a = v.amplitude.copy()
        for _ in range(2):
            for b in basis:
                a = a - overlap(b, FieldProfile(v.grid, a)) * b.amplitude
        r = FieldProfile(v.grid, a)
        nr = np.sqrt(photon_number(r))
        if n0 > 0 and nr > rank_tol * n0:
            basis.append(r.scaled(1.0 / nr))
    if not basis:
        raise ValueError("squeezed subspace has rank 0")
    return basis


def total_variance(mean: float, var_quantum: float, p: NoiseParams, labels=("", "")) -> NoiseBudget:
    return NoiseBudget(labels[0], labels[1], float(mean), classical_variance(mean, p), float(var_quantum))


def pixel_covariance(u_i: FieldProfile, array: PixelArray, p: NoiseParams, basis=()) -> np.ndarray:
    """5x5 covariance of the pixel counts for light profile ``u_i``.

    ``diag(N) + (eta - 1) Re(A^H A) + beta^2 N N^T`` with ``A[b, k]`` the
    overlap of squeezed basis vector ``b`` with ``u_i`` restricted to pixel k.
    Any gain vector gives ``sigma^T C sigma`` equal to the budget's total variance.
    """
    lab = array.labels(u_i.x)
    wts = u_i.grid.weights
    dens = wts * u_i.intensity
    N = np.array([dens[lab == k].sum() for k in range(5)])
    C = np.diag(N) + p.beta2 * np.outer(N, N)
    if basis:
        A = np.array([[np.sum(wts[lab == k] * np.conj(b.amplitude[lab == k]) * u_i.amplitude[lab == k])
                       for k in range(5)] for b in basis])
        C = C + (p.eta - 1.0) * np.real(A.conj().T @ A)
    return C


BUDGET_HEADER = ["disc_sequence", "gain_set", "mean", "var_classical", "var_quantum", "var_total", "sigma_total"]


def budget_to_csv(budgets) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BUDGET_HEADER)
    for b in budgets:
        w.writerow([b.disc_sequence, b.gain_set, repr(b.mean), repr(b.var_classical),
                    repr(b.var_quantum), repr(b.var_total), repr(b.sigma_total)])
    return buf.getvalue()
