"""Bilinear covariants and the polar decomposition of single spinors.

A non-singular spinor (Phi^2 + Theta^2 > 0) factors as

    psi = phi * exp(-i beta pi / 2) * L^-1 (1,0,1,0)^T

with module phi > 0, chiral angle beta in (-pi, pi], and L the frame map
that carries the spinor to rest with spin along the third axis.  The branch
is fixed by beta = atan2(Theta, Phi); the residual phase freedom (a gauge
shift is indistinguishable from a rotation about the spin axis acting on the
template) is folded entirely into the phase of ``L.spin_part``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .clifford import (
    ETA,
    CliffordBasis,
    LorentzPair,
    _I2,
    _LIFT_TRIPLE,
    _Z2,
    _block,
    build_basis,
    identity_pair,
    lower,
    rotation_lift,
)
from .errors import ConstraintViolation, SingularSpinor

__all__ = [
    "TEMPLATE",
    "Bilinears",
    "PolarData",
    "adjoint",
    "bilinears",
    "bilinears_batch",
    "polar_decompose",
    "polar_reconstruct",
    "rest_frame_map",
    "auxiliary_identities",
]

SINGULAR_EPS = 1e-20
CONSTRAINT_TOL = 1e-8

TEMPLATE = np.array([1.0, 0.0, 1.0, 0.0], dtype=complex)
TEMPLATE.setflags(write=False)

_PAIRS = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def _sandwich_ops(basis: CliffordBasis) -> np.ndarray:
    """Operator stack turning psi^dag OP psi into (Phi, Theta, U, S, M-pairs)."""
    g0 = basis.gamma[0]
    ops = [g0, 1j * g0 @ basis.pi]
    ops += [g0 @ basis.gamma[a] for a in range(4)]
    ops += [g0 @ basis.gamma[a] @ basis.pi for a in range(4)]
    ops += [2j * g0 @ basis.sigma[i, j] for (i, j) in _PAIRS]
    stack = np.stack(ops)
    stack.setflags(write=False)
    return stack


_OPS_CACHE: dict[int, np.ndarray] = {}


def _ops_for(basis: CliffordBasis) -> np.ndarray:
    key = id(basis)
    if key not in _OPS_CACHE:
        _OPS_CACHE[key] = _sandwich_ops(basis)
    return _OPS_CACHE[key]


@dataclass(frozen=True)
class Bilinears:
    """The six real covariants of one spinor (antisymmetric pair included twice)."""

    Phi: float
    Theta: float
    U: np.ndarray           # (4,) upper
    S: np.ndarray           # (4,) upper
    M: np.ndarray           # (4,4) upper, antisymmetric
    Sigma: np.ndarray       # (4,4) upper, antisymmetric (Hodge dual of M)

    @property
    def density2(self) -> float:
        """Phi^2 + Theta^2 = (2 phi^2)^2."""
        return self.Phi**2 + self.Theta**2


def adjoint(psi, basis: CliffordBasis | None = None) -> np.ndarray:
    """Row spinor psi^dag gamma^0."""
    basis = basis or build_basis()
    return np.asarray(psi, complex).conj() @ basis.gamma[0]


def bilinears_batch(psis, basis: CliffordBasis | None = None):
    """(Phi, Theta, U, S, M) for a batch of spinors; arrays shaped (N,...)."""
    basis = basis or build_basis()
    psis = np.ascontiguousarray(psis, dtype=complex)
    raw = kernels.bilinear_sandwich(psis, _ops_for(basis))
    phi, theta = raw[:, 0], raw[:, 1]
    u = raw[:, 2:6]
    s = raw[:, 6:10]
    m = np.zeros((len(psis), 4, 4))
    for c, (i, j) in enumerate(_PAIRS):
        m[:, i, j] = raw[:, 10 + c]
        m[:, j, i] = -raw[:, 10 + c]
    return phi, theta, u, s, m


def bilinears(psi, basis: CliffordBasis | None = None) -> Bilinears:
    """All six covariants of one spinor, with the Hodge dual computed from M."""
    basis = basis or build_basis()
    phi, theta, u, s, m = bilinears_batch(np.asarray(psi, complex)[None], basis)
    m_low = ETA @ m[0] @ ETA
    sigma = -0.5 * np.einsum("abij,ab->ij", basis.eps, m_low)
    return Bilinears(float(phi[0]), float(theta[0]), u[0], s[0], m[0], sigma)


def _check_frame_vectors(u, s, tol=CONSTRAINT_TOL):
    u = np.asarray(u, float)
    s = np.asarray(s, float)
    uu = u @ ETA @ u
    ss = s @ ETA @ s
    us = u @ ETA @ s
    if abs(uu - 1.0) > tol or abs(ss + 1.0) > tol or abs(us) > tol or u[0] <= 0.0:
        raise ConstraintViolation(
            f"u.u={uu:.3e}, s.s={ss:.3e}, u.s={us:.3e}, u0={u[0]:.3e}"
        )
    return u, s


def rest_frame_map(u, s) -> LorentzPair:
    """Frame map sending velocity u to e0 and spin s to e3.

    Built as the pure boost that brings u to rest followed by the rotation
    aligning the boosted spin with the third axis.  Closed forms throughout;
    regular as |u_spatial| -> 0.
    """
    u, s = _check_frame_vectors(u, s)
    c = np.sqrt((1.0 + u[0]) / 2.0)
    bv = np.eye(4)
    bv[0, 0] = u[0]
    bv[0, 1:] = -u[1:]
    bv[1:, 0] = -u[1:]
    bv[1:, 1:] = np.eye(3) + np.outer(u[1:], u[1:]) / (1.0 + u[0])
    # spin part of the inverse boost, half-rapidity closed form
    wm = np.einsum("k,kij->ij", u[1:], _LIFT_TRIPLE) / (2.0 * c)
    bs = _block(c * _I2 + wm, _Z2, _Z2, c * _I2 - wm)
    boost = LorentzPair(bv, bs)
    s_rest = bv @ s
    n3 = s_rest[1:]
    axis = np.cross(n3, [0.0, 0.0, 1.0])
    sin_t = np.linalg.norm(axis)
    cos_t = n3[2]
    if sin_t < 1e-12:
        rot = identity_pair() if cos_t > 0 else rotation_lift([np.pi, 0.0, 0.0])
    else:
        rot = rotation_lift(np.arctan2(sin_t, cos_t) * axis / sin_t)
    return rot.compose(boost)


@dataclass(frozen=True)
class PolarData:
    """Polar factorization of one spinor: module, chiral angle, velocity, spin, frame."""

    phi: float
    beta: float
    u: np.ndarray
    s: np.ndarray
    L: LorentzPair

    def validate(self, tol=CONSTRAINT_TOL) -> None:
        if self.phi <= 0.0:
            raise ConstraintViolation("module phi must be positive")
        _check_frame_vectors(self.u, self.s, tol)
        lu = self.L.vector_part @ self.u
        ls = self.L.vector_part @ self.s
        if np.abs(lu - [1, 0, 0, 0]).max() > tol or np.abs(ls - [0, 0, 0, 1]).max() > tol:
            raise ConstraintViolation("frame map does not carry (u,s) to (e0,e3)")


def _chiral_exp(beta: float, basis: CliffordBasis) -> np.ndarray:
    """exp(-i beta pi / 2); pi is diagonal in the chiral representation."""
    return np.diag(np.exp(-0.5j * beta * np.diag(basis.pi)))


def polar_decompose(psi, basis: CliffordBasis | None = None) -> PolarData:
    """Factor a non-singular spinor into its polar data.

    The frame map is rest_frame_map(u, s) with the residual phase folded
    into the spin part (charge_phase records the angle); the third-axis
    rotation angle is kept at zero.  Reconstruction is exact to rounding.
    """
    basis = basis or build_basis()
    psi = np.asarray(psi, complex)
    b = bilinears(psi, basis)
    dens = b.density2
    if dens < SINGULAR_EPS:
        raise SingularSpinor(f"Phi^2+Theta^2 = {dens:.3e} below {SINGULAR_EPS}")
    f2 = np.sqrt(dens)                       # 2 phi^2
    phi = float(np.sqrt(f2 / 2.0))
    beta = float(np.arctan2(b.Theta, b.Phi))
    u = b.U / f2
    s = b.S / f2
    frame = rest_frame_map(u, s)
    bare = phi * (_chiral_exp(beta, basis) @ np.linalg.solve(frame.spin_part, TEMPLATE))
    chi = float(np.angle(np.vdot(bare, psi)))
    frame = LorentzPair(
        frame.vector_part, frame.spin_part * np.exp(-1j * chi), -chi
    )
    return PolarData(phi=phi, beta=beta, u=u, s=s, L=frame)


def polar_reconstruct(data: PolarData, basis: CliffordBasis | None = None) -> np.ndarray:
    """psi = phi exp(-i beta pi/2) L^-1 (1,0,1,0)^T."""
    basis = basis or build_basis()
    data.validate()
    return data.phi * (
        _chiral_exp(data.beta, basis) @ np.linalg.solve(data.L.spin_part, TEMPLATE)
    )


def auxiliary_identities(psi, basis: CliffordBasis | None = None) -> tuple[float, float]:
    """Residual norms of the two frame-vector spinor identities.

    First: 2 sigma^{mu nu} u_mu s_nu pi psi + psi.
    Second: i s_mu gamma^mu psi sin(beta) + s_mu gamma^mu pi psi cos(beta) + psi.
    Both normalized by |psi|; zero for every non-singular spinor.
    """
    basis = basis or build_basis()
    psi = np.asarray(psi, complex)
    b = bilinears(psi, basis)
    dens = b.density2
    if dens < SINGULAR_EPS:
        raise SingularSpinor("flag spinor: identities undefined")
    f2 = np.sqrt(dens)
    u, s = b.U / f2, b.S / f2
    beta = np.arctan2(b.Theta, b.Phi)
    ul, sl = lower(u), lower(s)
    r1 = 2.0 * np.einsum("mnij,m,n->ij", basis.sigma, ul, sl) @ basis.pi @ psi + psi
    slash = np.einsum("m,mij->ij", sl, basis.gamma)
    r2 = 1j * np.sin(beta) * slash @ psi + np.cos(beta) * slash @ basis.pi @ psi + psi
    scale = np.linalg.norm(psi)
    return float(np.linalg.norm(r1) / scale), float(np.linalg.norm(r2) / scale)
