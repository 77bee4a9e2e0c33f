"""Minkowski Clifford algebra in a fixed chiral representation.

Conventions used throughout the package:

* signature (+,-,-,-), stored in ``ETA``;
* totally antisymmetric symbol with upper indices, ``eps(0,1,2,3) = +1``
  (so the all-lower version picks up a factor ``det(eta) = -1``);
* ``sigma[a,b] = [gamma[a], gamma[b]] / 4`` with upper indices;
* ``pi`` is the parity-odd element, a scalar multiple of
  ``gamma0 gamma1 gamma2 gamma3`` whose phase is fixed at build time by the
  duality relation ``2i sigma_ab = eps_abcd pi sigma^cd``.

All tensors are stored with upper (contravariant) indices; lowering is always
explicit through ``ETA``.  The representation is chiral (``pi`` diagonal) and
is additionally pinned by requiring the rest-frame spinor ``(1,0,1,0)`` to
carry velocity ``e0`` and spin ``+e3``, which fixes the orientation of the
spatial gamma triple.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "ETA",
    "EPS",
    "EPS_LOWER",
    "CliffordBasis",
    "LorentzPair",
    "build_basis",
    "levi_civita",
    "lower",
    "boost_lift",
    "rotation_lift",
]

ETA = np.diag([1.0, -1.0, -1.0, -1.0])
ETA.setflags(write=False)


def levi_civita(a: int, b: int, c: int, d: int) -> int:
    """Totally antisymmetric symbol with upper indices, eps(0,1,2,3) = +1."""
    idx = (a, b, c, d)
    if len(set(idx)) < 4:
        return 0
    inversions = sum(
        1 for i in range(4) for j in range(i + 1, 4) if idx[i] > idx[j]
    )
    return -1 if inversions % 2 else 1


def _eps_array() -> np.ndarray:
    e = np.zeros((4, 4, 4, 4))
    for p in itertools.permutations(range(4)):
        e[p] = levi_civita(*p)
    e.setflags(write=False)
    return e


EPS = _eps_array()
EPS_LOWER = -EPS  # four lowerings contribute det(eta) = -1
EPS_LOWER.setflags(write=False)


def lower(v: np.ndarray) -> np.ndarray:
    """Lower the single index of a 4-vector with the metric."""
    return ETA @ np.asarray(v)


# Pauli matrices; the y-component enters the representation with flipped
# sign, which is what orients the spatial triple so that the template
# spinor (1,0,1,0) carries spin +e3 under the duality-fixed pi.
_S1 = np.array([[0, 1], [1, 0]], dtype=complex)
_S2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
_S3 = np.array([[1, 0], [0, -1]], dtype=complex)
_LIFT_TRIPLE = np.stack([_S1, -_S2, _S3])
_I2 = np.eye(2, dtype=complex)
_Z2 = np.zeros((2, 2), dtype=complex)


def _block(a, b, c, d) -> np.ndarray:
    return np.block([[a, b], [c, d]])


@dataclass(frozen=True)
class CliffordBasis:
    """The 16-element Clifford basis (identity, gamma, sigma, gamma*pi, pi)."""

    gamma: np.ndarray      # (4,4,4), index a upper
    sigma: np.ndarray      # (4,4,4,4), indices (a,b) upper
    pi: np.ndarray         # (4,4)
    eta: np.ndarray        # (4,4)
    eps: np.ndarray        # (4,4,4,4), all-upper symbol

    @property
    def identity(self) -> np.ndarray:
        return np.eye(4, dtype=complex)

    @property
    def gamma_lower(self) -> np.ndarray:
        return np.einsum("ab,bij->aij", self.eta, self.gamma)

    @property
    def sigma_lower(self) -> np.ndarray:
        return np.einsum("ac,bd,cdij->abij", self.eta, self.eta, self.sigma)

    def sixteen(self) -> list[np.ndarray]:
        """The 16 basis elements, in the order I, gamma^a, sigma^{a<b}, gamma^a pi, pi."""
        out = [self.identity]
        out += [self.gamma[a] for a in range(4)]
        out += [self.sigma[a, b] for a in range(4) for b in range(a + 1, 4)]
        out += [self.gamma[a] @ self.pi for a in range(4)]
        out.append(self.pi)
        return out

    def validate(self, tol: float = 1e-14) -> None:
        """Check every defining identity entrywise; raise AssertionError on failure."""
        g, s, p = self.gamma, self.sigma, self.pi
        ident = self.identity
        for a in range(4):
            for b in range(4):
                anti = g[a] @ g[b] + g[b] @ g[a] - 2.0 * ETA[a, b] * ident
                if np.abs(anti).max() > tol:
                    raise AssertionError(f"anticommutator broken at ({a},{b})")
        comm = 0.25 * (np.einsum("aij,bjk->abik", g, g) - np.einsum("bij,ajk->abik", g, g))
        if np.abs(comm - s).max() > tol:
            raise AssertionError("sigma is not the quarter-commutator")
        s_low = self.sigma_lower
        dual = np.einsum("abcd,cdik->abik", EPS_LOWER, np.einsum("ij,cdjk->cdik", p, s))
        if np.abs(2j * s_low - dual).max() > tol:
            raise AssertionError("duality relation 2i sigma_ab = eps_abcd pi sigma^cd broken")
        gl = self.gamma_lower
        for i, j, k in itertools.product(range(4), repeat=3):
            lhs = gl[i] @ gl[j] @ gl[k]
            rhs = gl[i] * ETA[j, k] - gl[j] * ETA[i, k] + gl[k] * ETA[i, j]
            rhs = rhs + 1j * sum(EPS_LOWER[i, j, k, q] * p @ g[q] for q in range(4))
            if np.abs(lhs - rhs).max() > tol:
                raise AssertionError(f"triple-product identity broken at ({i},{j},{k})")
        basis = self.sixteen()
        gram = np.array([[np.trace(x.conj().T @ y) for y in basis] for x in basis])
        if np.linalg.matrix_rank(gram) != 16:
            raise AssertionError("16 basis elements are not linearly independent")


def _build_raw(eps_lower: np.ndarray) -> CliffordBasis:
    g0 = _block(_Z2, _I2, _I2, _Z2)
    g1 = _block(_Z2, _S1, -_S1, _Z2)
    g2 = _block(_Z2, -_S2, _S2, _Z2)
    g3 = _block(_Z2, _S3, -_S3, _Z2)
    gamma = np.stack([g0, g1, g2, g3])
    sigma = 0.25 * (
        np.einsum("aij,bjk->abik", gamma, gamma)
        - np.einsum("bij,ajk->abik", gamma, gamma)
    )
    prod = g0 @ g1 @ g2 @ g3
    sigma_low = np.einsum("ac,bd,cdij->abij", ETA, ETA, sigma)
    pi = None
    for phase in (1j, -1j):
        cand = phase * prod
        dual = np.einsum(
            "abcd,cdik->abik", eps_lower, np.einsum("ij,cdjk->cdik", cand, sigma)
        )
        if np.abs(2j * sigma_low - dual).max() < 1e-13:
            pi = cand
            break
    if pi is None:
        raise AssertionError("no phase of gamma0..gamma3 product satisfies the duality relation")
    for arr in (gamma, sigma, pi):
        arr.setflags(write=False)
    return CliffordBasis(gamma=gamma, sigma=sigma, pi=pi, eta=ETA, eps=EPS)


@lru_cache(maxsize=None)
def build_basis() -> CliffordBasis:
    """Construct and validate the chiral basis (cached; immutable)."""
    basis = _build_raw(EPS_LOWER)
    basis.validate()
    return basis


def _corrupted_basis() -> CliffordBasis:
    """Test hook: basis built against a sign-flipped antisymmetric symbol.

    Skips validation on purpose; identity suites run against it must fail.
    """
    basis = build_basis()
    return CliffordBasis(
        gamma=basis.gamma, sigma=basis.sigma, pi=basis.pi, eta=ETA, eps=-EPS
    )


@dataclass(frozen=True)
class LorentzPair:
    """A real Lorentz transformation together with its spinorial lift.

    ``spin_part`` may carry an overall unit phase exp(i*charge_phase) on top
    of the bare lift; the compatibility relation
    ``spin_part gamma^b spin_part^-1 Lambda^a_b = gamma^a`` is insensitive
    to it.
    """

    vector_part: np.ndarray              # (4,4) real
    spin_part: np.ndarray                # (4,4) complex
    charge_phase: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "vector_part", np.asarray(self.vector_part, float))
        object.__setattr__(self, "spin_part", np.asarray(self.spin_part, complex))

    def compose(self, other: "LorentzPair") -> "LorentzPair":
        return LorentzPair(
            self.vector_part @ other.vector_part,
            self.spin_part @ other.spin_part,
            self.charge_phase + other.charge_phase,
        )

    def inverse(self) -> "LorentzPair":
        return LorentzPair(
            np.linalg.inv(self.vector_part),
            np.linalg.inv(self.spin_part),
            -self.charge_phase,
        )

    def metric_residual(self) -> float:
        v = self.vector_part
        return float(np.abs(v.T @ ETA @ v - ETA).max())

    def compatibility_residual(self, basis: CliffordBasis | None = None) -> float:
        basis = basis or build_basis()
        s_inv = np.linalg.inv(self.spin_part)
        turned = np.einsum(
            "ab,bij->aij",
            self.vector_part,
            np.einsum("ij,bjk,kl->bil", self.spin_part, basis.gamma, s_inv),
        )
        return float(np.abs(turned - basis.gamma).max())


_IDENTITY_PAIR = None


def identity_pair() -> LorentzPair:
    global _IDENTITY_PAIR
    if _IDENTITY_PAIR is None:
        _IDENTITY_PAIR = LorentzPair(np.eye(4), np.eye(4, dtype=complex))
    return _IDENTITY_PAIR


def boost_lift(rapidity) -> LorentzPair:
    """Pure boost with the given rapidity 3-vector.

    The vector part maps e0 to (cosh|w|, sinh|w| n); the spin part is the
    corresponding exponential of the boost generators, written in closed
    form (block-diagonal in the chiral representation).
    """
    w = np.asarray(rapidity, float)
    a = float(np.linalg.norm(w))
    vec = np.eye(4)
    if a > 0.0:
        n = w / a
        ch, sh = np.cosh(a), np.sinh(a)
        vec[0, 0] = ch
        vec[0, 1:] = sh * n
        vec[1:, 0] = sh * n
        vec[1:, 1:] = np.eye(3) + (ch - 1.0) * np.outer(n, n)
    half = np.cosh(a / 2.0)
    slope = np.sinh(a / 2.0) / a if a > 0.0 else 0.5
    wm = np.einsum("k,kij->ij", w, _LIFT_TRIPLE)
    spin = _block(half * _I2 - slope * wm, _Z2, _Z2, half * _I2 + slope * wm)
    return LorentzPair(vec, spin)


def rotation_lift(axis_angle) -> LorentzPair:
    """Proper spatial rotation by |axis_angle| about its direction, with SU(2) lift."""
    th = np.asarray(axis_angle, float)
    a = float(np.linalg.norm(th))
    vec = np.eye(4)
    if a > 0.0:
        n = th / a
        k = np.array([[0, -n[2], n[1]], [n[2], 0, -n[0]], [-n[1], n[0], 0]])
        vec[1:, 1:] = np.eye(3) + np.sin(a) * k + (1.0 - np.cos(a)) * (k @ k)
    half = np.cos(a / 2.0)
    slope = np.sin(a / 2.0) / a if a > 0.0 else 0.5
    tm = np.einsum("k,kij->ij", th, _LIFT_TRIPLE)
    blockm = half * _I2 + 1j * slope * tm
    spin = _block(blockm, _Z2, _Z2, blockm)
    return LorentzPair(vec, spin)
