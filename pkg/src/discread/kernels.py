"""Inner loops of the 1-D propagators.

Both kernels evaluate O(n_out * n_src) complex sums. Each has a numba
implementation and a pure-numpy one; :func:`far_field_sum` and
:func:`rayleigh_sommerfeld_sum` dispatch on :data:`discread._accel.USE_NUMBA`
at call time.
"""

import numpy as np
from scipy.special import hankel1

from . import _accel
from ._accel import njit

_CHUNK = 128


@njit(cache=True, fastmath=False)
def _far_field_numba(x0, dx, wu, kappa):
    n = wu.shape[0]
    out = np.empty(kappa.shape[0], dtype=np.complex128)
    for m in range(kappa.shape[0]):
        q = kappa[m]
        z = np.exp(-1j * q * x0)
        step = np.exp(-1j * q * dx)
        acc = 0.0 + 0.0j
        for i in range(n):
            acc += wu[i] * z
            z *= step
            # re-anchor the phasor every 512 steps to bound drift
            if (i & 511) == 511:
                z = np.exp(-1j * q * (x0 + (i + 1) * dx))
        out[m] = acc
    return out


def _far_field_numpy(x0, dx, wu, kappa):
    x = x0 + dx * np.arange(wu.shape[0])
    out = np.empty(kappa.shape[0], dtype=np.complex128)
    for s in range(0, kappa.shape[0], _CHUNK):
        q = kappa[s:s + _CHUNK]
        out[s:s + _CHUNK] = np.exp(-1j * np.outer(q, x)) @ wu
    return out


def far_field_sum(x0: float, dx: float, wu: np.ndarray, kappa: np.ndarray) -> np.ndarray:
    """``sum_n wu[n] * exp(-i kappa[m] (x0 + n dx))`` for every ``kappa[m]``.

    ``wu`` already carries the quadrature weights.
    """
    wu = np.ascontiguousarray(wu, dtype=np.complex128)
    kappa = np.ascontiguousarray(kappa, dtype=np.float64)
    if _accel.USE_NUMBA:
        return _far_field_numba(float(x0), float(dx), wu, kappa)
    return _far_field_numpy(float(x0), float(dx), wu, kappa)


@njit(cache=True, fastmath=False)
def _rs_numba(x0, dx, wu, xi, z, k):
    n = wu.shape[0]
    out = np.empty(xi.shape[0], dtype=np.complex128)
    # large-argument expansion of H1^(1): sum_m i^m a_m / kr^m,
    # a_m = prod_{l=1..m} (4 - (2l-1)^2) / (m! 8^m)
    a1, a2, a3, a4 = 3.0 / 8.0, -15.0 / 128.0, 315.0 / 3072.0, -14175.0 / 98304.0
    for m in range(xi.shape[0]):
        acc = 0.0 + 0.0j
        for i in range(n):
            d = xi[m] - (x0 + i * dx)
            r = np.sqrt(d * d + z * z)
            kr = k * r
            inv = 1.0 / kr
            series = 1.0 + 1j * a1 * inv - a2 * inv * inv - 1j * a3 * inv ** 3 + a4 * inv ** 4
            h1 = np.sqrt(2.0 / (np.pi * kr)) * np.exp(1j * (kr - 0.75 * np.pi)) * series
            acc += wu[i] * (1j * k * z / (2.0 * r)) * h1
        out[m] = acc
    return out


def _rs_numpy(x0, dx, wu, xi, z, k):
    x = x0 + dx * np.arange(wu.shape[0])
    out = np.empty(xi.shape[0], dtype=np.complex128)
    for s in range(0, xi.shape[0], _CHUNK):
        r = np.sqrt((xi[s:s + _CHUNK, None] - x[None, :]) ** 2 + z * z)
        kern = (1j * k * z / (2.0 * r)) * hankel1(1, k * r)
        out[s:s + _CHUNK] = kern @ wu
    return out


def rayleigh_sommerfeld_sum(x0: float, dx: float, wu: np.ndarray, xi: np.ndarray,
                            z: float, k: float) -> np.ndarray:
    """First Rayleigh-Sommerfeld integral in two dimensions (x, z).

    Kernel ``(i k z / 2R) H1^(1)(kR)``. The numba path uses the large-argument
    expansion of the Hankel function and therefore requires ``k z >> 1``.
    """
    wu = np.ascontiguousarray(wu, dtype=np.complex128)
    xi = np.ascontiguousarray(xi, dtype=np.float64)
    if _accel.USE_NUMBA:
        if k * z < 1e3:
            raise ValueError(f"k*z = {k * z:.3g} too small for the asymptotic Hankel kernel")
        return _rs_numba(float(x0), float(dx), wu, xi, float(z), float(k))
    return _rs_numpy(float(x0), float(dx), wu, xi, float(z), float(k))
