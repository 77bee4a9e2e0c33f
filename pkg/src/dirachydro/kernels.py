"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

The two kernels here sit in every inner loop of the verification pipeline:

* ``wave_sum`` evaluates a sum of plane waves at a batch of spacetime
  points (every finite-difference stencil hits it ~17 times per sample);
* ``bilinear_sandwich`` evaluates a stack of real spinor sandwiches
  psi^dag OP psi for a batch of spinors (every polar decomposition needs 16
  of them).

Backend selection: numba is used when importable unless the environment
variable ``DIRACHYDRO_NUMPY=1`` forces the numpy path.  Both implementations
are importable directly (``wave_sum_numpy`` / ``wave_sum_numba`` ...) so the
benchmark and the equivalence tests can compare them regardless of the
active default.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "BACKEND",
    "wave_sum",
    "bilinear_sandwich",
    "wave_sum_numpy",
    "bilinear_sandwich_numpy",
    "wave_sum_numba",
    "bilinear_sandwich_numba",
]


def wave_sum_numpy(points, phases, amps, coeffs):
    """Evaluate sum_k coeffs[k] * exp(-i phases[k].x) * amps[k] at each point.

    points: (N,4) float; phases: (K,4) float (index-lowered momenta);
    amps: (K,4) complex; coeffs: (K,) complex.  Returns (N,4) complex.
    """
    ph = points @ phases.T                       # (N,K)
    return (coeffs * np.exp(-1j * ph)) @ amps


def bilinear_sandwich_numpy(psis, ops):
    """Real parts of psi^dag ops[k] psi for a batch of spinors.

    psis: (N,4) complex; ops: (L,4,4) complex.  Returns (N,L) float.
    """
    return np.einsum("ni,kij,nj->nk", psis.conj(), ops, psis).real


def _wave_sum_loops(points, phases, amps, coeffs):
    n = points.shape[0]
    k = phases.shape[0]
    out = np.zeros((n, 4), dtype=np.complex128)
    for i in range(n):
        for w in range(k):
            ph = 0.0
            for mu in range(4):
                ph += phases[w, mu] * points[i, mu]
            factor = coeffs[w] * (np.cos(ph) - 1j * np.sin(ph))
            for c in range(4):
                out[i, c] += factor * amps[w, c]
    return out


def _bilinear_sandwich_loops(psis, ops):
    n = psis.shape[0]
    l = ops.shape[0]
    out = np.zeros((n, l))
    for i in range(n):
        for k in range(l):
            acc = 0.0 + 0.0j
            for a in range(4):
                row = 0.0 + 0.0j
                for b in range(4):
                    row += ops[k, a, b] * psis[i, b]
                acc += np.conj(psis[i, a]) * row
            out[i, k] = acc.real
    return out


wave_sum_numba = None
bilinear_sandwich_numba = None

_FORCE_NUMPY = os.environ.get("DIRACHYDRO_NUMPY", "0") == "1"
try:
    from numba import njit

    wave_sum_numba = njit(cache=True)(_wave_sum_loops)
    bilinear_sandwich_numba = njit(cache=True)(_bilinear_sandwich_loops)
    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

if _HAVE_NUMBA and not _FORCE_NUMPY:
    BACKEND = "numba"
    wave_sum = wave_sum_numba
    bilinear_sandwich = bilinear_sandwich_numba
else:
    BACKEND = "numpy"
    wave_sum = wave_sum_numpy
    bilinear_sandwich = bilinear_sandwich_numpy


def warm_up() -> None:
    """Trigger JIT compilation (no-op on the numpy backend)."""
    pts = np.zeros((1, 4))
    ph = np.zeros((1, 4))
    am = np.zeros((1, 4), dtype=np.complex128)
    cf = np.ones(1, dtype=np.complex128)
    wave_sum(pts, ph, am, cf)
    bilinear_sandwich(am, np.zeros((1, 4, 4), dtype=np.complex128))
