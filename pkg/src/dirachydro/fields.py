"""Spinor fields on flat spacetime: exact wave solutions, finite differences,
Dirac residuals, and extraction of the tensorial connections.

Spacetime is flat Minkowski in Cartesian coordinates (t, x, y, z) with a
trivial tetrad, so the spinorial connection reduces to the gauge term
i q A_mu.  Momenta, potentials and the axial torsion vector are stored with
upper indices; phases and derivative indices are lowered explicitly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np
import numpy.polynomial.polynomial as npoly

from . import kernels
from .clifford import EPS, EPS_LOWER, ETA, LorentzPair, build_basis, lower
from .errors import (
    BranchJump,
    DegenerateNullspaceWarning,
    IllConditioned,
    MixedBackgrounds,
    NoRealRoot,
    SingularSpinor,
)
from .spinors import TEMPLATE, bilinears_batch, rest_frame_map

__all__ = [
    "FD_STEP",
    "Background",
    "SpinorField",
    "PolarPoint",
    "TensorialConnection",
    "derivative",
    "covariant_derivative",
    "dirac_residual",
    "plane_wave",
    "superpose",
    "lorentz_transform",
    "extract_polar_fields",
    "extract_connections",
]

FD_STEP = 1e-3
_OFFSETS = np.array([-2.0, -1.0, 1.0, 2.0])
_WEIGHTS = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0   # 4th-order central
_PAIRS = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


@dataclass(frozen=True)
class Background:
    """Mass, charge, gauge potential, constant axial torsion, torsion coupling."""

    m: float = 1.0
    q: float = 0.0
    A: np.ndarray | Callable = (0.0, 0.0, 0.0, 0.0)
    W: np.ndarray = (0.0, 0.0, 0.0, 0.0)
    X: float = 1.0

    def __post_init__(self):
        if not callable(self.A):
            object.__setattr__(self, "A", np.asarray(self.A, float))
        object.__setattr__(self, "W", np.asarray(self.W, float))
        if self.m < 0:
            raise ValueError("mass must be non-negative")

    def gauge_potential(self, x) -> np.ndarray:
        if callable(self.A):
            return np.asarray(self.A(np.asarray(x, float)), float)
        return self.A

    @property
    def constant_A(self) -> np.ndarray:
        if callable(self.A):
            raise ValueError("background gauge potential is not constant")
        return self.A

    def same_as(self, other: "Background") -> bool:
        if (self.m, self.q, self.X) != (other.m, other.q, other.X):
            return False
        if not np.array_equal(self.W, other.W):
            return False
        if callable(self.A) or callable(other.A):
            return self.A is other.A
        return np.array_equal(self.A, other.A)


@dataclass
class Wave:
    """One exact plane-wave branch: coefficient, contravariant momentum, amplitude."""

    coeff: complex
    p: np.ndarray        # (4,) upper
    amp: np.ndarray      # (4,) complex, unit norm


class SpinorField:
    """A spinor-valued field psi(x) over a fixed background.

    Exact wave solutions carry their wave content in ``waves`` so batched
    evaluation can run through the hot kernel; arbitrary smooth fields are
    supported through a plain callable.  Evaluation is pure and safe to call
    from multiple threads.
    """

    def __init__(
        self,
        background: Background,
        value: Optional[Callable[[np.ndarray], np.ndarray]] = None,
        waves: Optional[Sequence[Wave]] = None,
        degenerate: bool = False,
    ):
        if (value is None) == (waves is None):
            raise ValueError("provide exactly one of value= or waves=")
        self.background = background
        self._value = value
        self.waves = list(waves) if waves is not None else None
        self.degenerate = degenerate
        if self.waves is not None:
            self._phases = np.stack([lower(w.p) for w in self.waves])
            self._amps = np.stack([w.amp for w in self.waves]).astype(complex)
            self._coeffs = np.array([w.coeff for w in self.waves], dtype=complex)

    def value(self, x) -> np.ndarray:
        return self.value_batch(np.asarray(x, float)[None])[0]

    def value_batch(self, points) -> np.ndarray:
        points = np.ascontiguousarray(points, dtype=float)
        if self.waves is not None:
            return kernels.wave_sum(points, self._phases, self._amps, self._coeffs)
        return np.stack([np.asarray(self._value(x), complex) for x in points])


def derivative(field: SpinorField, x, mu: int, h: float = FD_STEP) -> np.ndarray:
    """4th-order central finite difference of psi along coordinate mu."""
    x = np.asarray(x, float)
    pts = np.repeat(x[None], 4, axis=0)
    pts[:, mu] += _OFFSETS * h
    vals = field.value_batch(pts)
    return (_WEIGHTS[:, None] * vals).sum(0) / h


def covariant_derivative(field: SpinorField, x, mu: int, h: float = FD_STEP) -> np.ndarray:
    """nabla_mu psi = d_mu psi + i q A_mu psi (flat space, zero spin connection)."""
    a_low = lower(field.background.gauge_potential(x))
    return derivative(field, x, mu, h) + 1j * field.background.q * a_low[mu] * field.value(x)


def _all_covariant_derivatives(field, x, h):
    x = np.asarray(x, float)
    pts = [x[None]]
    for mu in range(4):
        block = np.repeat(x[None], 4, axis=0)
        block[:, mu] += _OFFSETS * h
        pts.append(block)
    vals = field.value_batch(np.vstack(pts))
    psi = vals[0]
    a_low = lower(field.background.gauge_potential(x))
    q = field.background.q
    nab = np.empty((4, 4), dtype=complex)
    for mu in range(4):
        stencil = vals[1 + 4 * mu : 5 + 4 * mu]
        nab[mu] = (_WEIGHTS[:, None] * stencil).sum(0) / h + 1j * q * a_low[mu] * psi
    return psi, nab


def _dirac_matrix(k_up, bg: Background, basis) -> np.ndarray:
    """gamma^mu k_mu - X W_mu gamma^mu pi - m, for contravariant k."""
    k_low = lower(k_up)
    w_low = lower(bg.W)
    slash = np.einsum("a,aij->ij", k_low, basis.gamma)
    torsion = np.einsum("a,aij->ij", w_low, basis.gamma) @ basis.pi
    return slash - bg.X * torsion - bg.m * basis.identity


def dirac_residual(field: SpinorField, x, h: float = FD_STEP):
    """Residual spinor of i gamma^mu nabla_mu psi - X W gamma pi psi - m psi.

    Returns (residual, norm) with the norm scaled by m |psi| (by |psi| alone
    in the massless case).
    """
    basis = build_basis()
    bg = field.background
    psi, nab = _all_covariant_derivatives(field, x, h)
    slashed = 1j * np.einsum("aij,aj->i", basis.gamma, nab)
    torsion = bg.X * np.einsum("a,aij->ij", lower(bg.W), basis.gamma) @ basis.pi @ psi
    res = slashed - torsion - bg.m * psi
    scale = (bg.m if bg.m > 0 else 1.0) * np.linalg.norm(psi)
    return res, float(np.linalg.norm(res) / scale)


def _dispersion_poly(kvec, b_up, m):
    """Quartic in k0: (k.k - b.b - m^2)^2 - 4[(k.b)^2 - k.k b.b]."""
    k2 = float(kvec @ kvec)
    b2 = float(b_up @ ETA @ b_up)
    p_kk = np.array([-k2, 0.0, 1.0])                       # k.k as poly in k0
    p_core = np.array([-(k2 + b2 + m * m), 0.0, 1.0])      # k.k - b.b - m^2
    p_kb = np.array([-(kvec @ b_up[1:]), b_up[0]])         # k.b
    return npoly.polysub(
        npoly.polymul(p_core, p_core),
        4.0 * npoly.polysub(npoly.polymul(p_kb, p_kb), b2 * p_kk),
    )


def _positive_roots(poly) -> list[float]:
    roots = np.roots(poly[::-1])
    der = npoly.polyder(poly)
    out = []
    for r in roots:
        if abs(r.imag) > 1e-7 * max(1.0, abs(r)) or r.real <= 0.0:
            continue
        z = r.real
        for _ in range(3):                # Newton polish
            dz = npoly.polyval(z, der)
            if dz == 0.0:
                break
            z = z - npoly.polyval(z, poly) / dz
        if z > 0.0 and not any(abs(z - y) < 1e-8 * max(1.0, z) for y in out):
            out.append(float(z))
    return sorted(out)


def _rest_spin_projection(w, w_torsion, basis):
    """Component of the rest-frame spin along the rest-frame torsion direction."""
    phi, theta, u4, s4 = bilinears_batch(w[None], basis)[:4]
    f2 = np.sqrt(phi[0] ** 2 + theta[0] ** 2)
    u, s = u4[0] / f2, s4[0] / f2
    frame = rest_frame_map(u, s)
    ref = (frame.vector_part @ w_torsion)[1:]
    if np.linalg.norm(ref) < 1e-12:
        ref = np.array([0.0, 0.0, 1.0])
    sr = (frame.vector_part @ s)[1:]
    return float(np.dot(sr, ref))


def _fix_phase(w):
    k = int(np.argmax(np.abs(w)))
    return w * np.exp(-1j * np.angle(w[k]))


def plane_wave(p_spatial, branch: str = "up", bg: Background | None = None) -> SpinorField:
    """Exact positive-energy plane wave psi(x) = exp(-i p.x) w on a constant background.

    ``p_spatial`` is the contravariant spatial momentum of the phase; the
    energy p0 solves the dispersion relation of the wave operator including
    the torsion term.  For nonzero torsion the two positive roots carry the
    two spin states; ``branch`` selects by the sign of the rest-frame spin
    projection onto the torsion direction.  For zero torsion the root is
    doubly degenerate and the branch picks the boosted rest-frame spin
    eigenstate (flagged via ``field.degenerate`` when the choice had to fall
    back to a plain orthonormal basis).
    """
    bg = bg if bg is not None else Background()
    if bg.m <= 0:
        raise ValueError("plane waves require m > 0")
    if branch not in ("up", "down"):
        raise ValueError("branch must be 'up' or 'down'")
    basis = build_basis()
    a_const = bg.constant_A
    kvec = np.asarray(p_spatial, float) - bg.q * a_const[1:]
    b_up = bg.X * bg.W

    if np.allclose(b_up, 0.0):
        k0 = float(np.sqrt(kvec @ kvec + bg.m**2))
        k_up = np.array([k0, *kvec])
        rest = TEMPLATE if branch == "up" else np.array([0.0, 1.0, 0.0, 1.0], complex)
        slash = np.einsum("a,aij->ij", lower(k_up), basis.gamma)
        w = (slash + bg.m * basis.identity) @ rest
        w = _fix_phase(w / np.linalg.norm(w))
        return SpinorField(bg, waves=[Wave(1.0 + 0.0j, k_up + bg.q * a_const, w)])

    roots = _positive_roots(_dispersion_poly(kvec, b_up, bg.m))
    if not roots:
        raise NoRealRoot(f"no positive-energy root for p={p_spatial}, W={bg.W}, X={bg.X}")
    candidates = []
    degenerate = False
    for k0 in roots:
        k_up = np.array([k0, *kvec])
        mat = _dirac_matrix(k_up, bg, basis)
        _, sv, vh = np.linalg.svd(mat)
        if sv[-2] < 1e-8 * sv[0]:           # nullity 2: no spin splitting here
            degenerate = True
            pick = vh[-1].conj() if branch == "down" else vh[-2].conj()
            candidates.append((0.0, k0, _fix_phase(pick)))
        else:
            w = _fix_phase(vh[-1].conj())
            candidates.append((_rest_spin_projection(w, bg.W, basis), k0, w))
    if degenerate or len(candidates) == 1:
        if degenerate:
            warnings.warn(
                "degenerate nullspace: branch selection fell back to an "
                "orthonormal choice",
                DegenerateNullspaceWarning,
            )
        proj, k0, w = candidates[0]
    else:
        candidates.sort(key=lambda z: z[0])
        proj, k0, w = candidates[-1] if branch == "up" else candidates[0]
    p_up = np.array([k0, *kvec]) + bg.q * a_const
    return SpinorField(bg, waves=[Wave(1.0 + 0.0j, p_up, w)], degenerate=degenerate)


def superpose(fields: Sequence[SpinorField], coeffs: Sequence[complex]) -> SpinorField:
    """Pointwise linear combination of wave fields on one shared background."""
    if len(fields) != len(coeffs) or not fields:
        raise ValueError("need one coefficient per field")
    bg = fields[0].background
    waves = []
    degenerate = False
    for f, c in zip(fields, coeffs):
        if not f.background.same_as(bg):
            raise MixedBackgrounds("superposed fields must share one background")
        if f.waves is None:
            raise ValueError("superpose only combines exact wave fields")
        degenerate = degenerate or f.degenerate
        waves += [Wave(c * w.coeff, w.p, w.amp) for w in f.waves]
    return SpinorField(bg, waves=waves, degenerate=degenerate)


def lorentz_transform(field: SpinorField, pair: LorentzPair) -> SpinorField:
    """Global transform: psi'(x) = S psi(Lambda^-1 x), background vectors rotated."""
    if field.waves is None:
        raise ValueError("lorentz_transform only handles exact wave fields")
    bg = field.background
    new_bg = replace(
        bg,
        A=pair.vector_part @ bg.constant_A,
        W=pair.vector_part @ bg.W,
    )
    waves = [
        Wave(w.coeff, pair.vector_part @ w.p, pair.spin_part @ w.amp)
        for w in field.waves
    ]
    return SpinorField(new_bg, waves=waves, degenerate=field.degenerate)


@dataclass(frozen=True)
class PolarPoint:
    """Pointwise polar variables and their 4th-order FD gradients."""

    phi2: float
    beta: float
    u: np.ndarray            # (4,) upper
    s: np.ndarray            # (4,) upper
    grad_beta: np.ndarray    # (4,) lower (d_mu beta)
    grad_logphi2: np.ndarray # (4,) lower
    grad_u: np.ndarray       # (4,4): [mu, a], d_mu u^a
    grad_s: np.ndarray       # (4,4)
    psi: np.ndarray          # (4,) complex, field value at the point


def extract_polar_fields(field: SpinorField, x, h: float = FD_STEP) -> PolarPoint:
    """Polar variables at x plus gradients, differentiating the pointwise
    decomposition across the FD stencil.  The chiral angle is unwrapped to
    the branch nearest the center value; a swing above pi/2 within one
    stencil raises BranchJump."""
    x = np.asarray(x, float)
    pts = [x[None]]
    for mu in range(4):
        block = np.repeat(x[None], 4, axis=0)
        block[:, mu] += _OFFSETS * h
        pts.append(block)
    vals = field.value_batch(np.vstack(pts))
    phi_b, theta_b, u_b, s_b = bilinears_batch(vals)[:4]
    dens = phi_b**2 + theta_b**2
    if dens.min() < 1e-20:
        raise SingularSpinor("field singular inside the FD stencil")
    f2 = np.sqrt(dens)
    beta_all = np.arctan2(theta_b, phi_b)
    u_all = u_b / f2[:, None]
    s_all = s_b / f2[:, None]
    beta_c = beta_all[0]
    grad_beta = np.zeros(4)
    grad_logphi2 = np.zeros(4)
    grad_u = np.zeros((4, 4))
    grad_s = np.zeros((4, 4))
    for mu in range(4):
        sl = slice(1 + 4 * mu, 5 + 4 * mu)
        b = beta_all[sl]
        b = beta_c + np.mod(b - beta_c + np.pi, 2.0 * np.pi) - np.pi
        if np.abs(b - beta_c).max() > np.pi / 2:
            raise BranchJump("chiral angle varies by more than pi/2 across the stencil")
        grad_beta[mu] = (_WEIGHTS @ b) / h
        grad_logphi2[mu] = (_WEIGHTS @ np.log(f2[sl])) / h
        grad_u[mu] = (_WEIGHTS[:, None] * u_all[sl]).sum(0) / h
        grad_s[mu] = (_WEIGHTS[:, None] * s_all[sl]).sum(0) / h
    return PolarPoint(
        phi2=float(f2[0] / 2.0),
        beta=float(beta_c),
        u=u_all[0],
        s=s_all[0],
        grad_beta=grad_beta,
        grad_logphi2=grad_logphi2,
        grad_u=grad_u,
        grad_s=grad_s,
        psi=vals[0],
    )


@dataclass(frozen=True)
class TensorialConnection:
    """Gauge and spacetime tensorial connections extracted at one point.

    ``P`` and ``R`` carry upper indices (R indexed [i, j, mu]).  ``raw``
    stores the per-coordinate minimum-norm solution in the lowered solve
    coordinates (P_mu, R_{01 mu}, R_{02 mu}, R_{03 mu}, R_{12 mu},
    R_{13 mu}, R_{23 mu}); ``kernel_direction`` is the shared unit null
    direction of the extraction system in those coordinates.  Physical,
    kernel-invariant checks must not depend on where along the kernel line
    the solution sits.
    """

    P: np.ndarray                   # (4,) upper
    R: np.ndarray                   # (4,4,4) upper, antisymmetric in (i,j)
    kernel_direction: np.ndarray    # (7,)
    B: np.ndarray                   # (4,) upper: 1/2 eps_{n a p i} R^{a p i}
    Rtrace: np.ndarray              # (4,) upper: R_{n a}^a
    V: np.ndarray                   # (4,) upper: 1/4 R_{ij mu} eps^{ij c d} u_c s_d
    raw: np.ndarray                 # (4,7)

    @staticmethod
    def from_raw(raw, kernel_direction, u, s) -> "TensorialConnection":
        raw = np.asarray(raw, float)
        p_low = raw[:, 0]
        r_low = np.zeros((4, 4, 4))
        for c, (i, j) in enumerate(_PAIRS):
            r_low[i, j, :] = raw[:, 1 + c]
            r_low[j, i, :] = -raw[:, 1 + c]
        r_up = np.einsum("ia,jb,mc,abc->ijm", ETA, ETA, ETA, r_low)
        b_low = 0.5 * np.einsum("napi,api->n", EPS_LOWER, r_up)
        rtr_low = np.einsum("abm,bm->a", r_low, ETA)
        v_low = 0.25 * np.einsum("ijm,ijcd,c,d->m", r_low, EPS, lower(u), lower(s))
        return TensorialConnection(
            P=ETA @ p_low,
            R=r_up,
            kernel_direction=np.asarray(kernel_direction, float),
            B=ETA @ b_low,
            Rtrace=ETA @ rtr_low,
            V=ETA @ v_low,
            raw=raw,
        )

    def shifted(self, t, u, s) -> "TensorialConnection":
        """Shift the solution along the kernel line by t (scalar or per-mu)."""
        t = np.broadcast_to(np.asarray(t, float), (4,))
        raw = self.raw + t[:, None] * self.kernel_direction[None, :]
        return TensorialConnection.from_raw(raw, self.kernel_direction, u, s)

    def transformed(self, pair: LorentzPair, u, s) -> "TensorialConnection":
        """Rotate every tensor index by the pair's vector part (u, s already rotated)."""
        lam = pair.vector_part
        r_new = np.einsum("ia,jb,mc,abc->ijm", lam, lam, lam, self.R)
        r_low = np.einsum("ia,jb,mc,abc->ijm", ETA, ETA, ETA, r_new)
        b_low = 0.5 * np.einsum("napi,api->n", EPS_LOWER, r_new)
        rtr_low = np.einsum("abm,bm->a", r_low, ETA)
        v_low = 0.25 * np.einsum("ijm,ijcd,c,d->m", r_low, EPS, lower(u), lower(s))
        raw = np.full((4, 7), np.nan)            # solve coordinates lose meaning
        return TensorialConnection(
            P=lam @ self.P,
            R=r_new,
            kernel_direction=self.kernel_direction,
            B=ETA @ b_low,
            Rtrace=ETA @ rtr_low,
            V=ETA @ v_low,
            raw=raw,
        )


def extract_connections(
    field: SpinorField, x, h: float = FD_STEP, polar: PolarPoint | None = None
) -> TensorialConnection:
    """Solve nabla_mu psi = (-i/2 d_mu beta pi + 1/2 d_mu ln phi^2 - i P_mu
    - 1/2 R_{ij mu} sigma^{ij}) psi for (P_mu, R_{ij mu}) per coordinate.

    Eight real equations, seven unknowns, a one-dimensional kernel (the
    phase / spin-axis-rotation redundancy); the minimum-norm least-squares
    representative is returned together with the kernel direction.
    """
    basis = build_basis()
    x = np.asarray(x, float)
    pp = polar if polar is not None else extract_polar_fields(field, x, h)
    psi = pp.psi
    cols = [-1j * psi] + [-(basis.sigma[i, j] @ psi) for (i, j) in _PAIRS]
    a = np.zeros((8, 7))
    for c, col in enumerate(cols):
        a[0::2, c] = col.real
        a[1::2, c] = col.imag
    _, sv, vt = np.linalg.svd(a)
    if sv[-2] < 1e-6 * sv[0]:
        raise IllConditioned("extraction system rank fell below 6")
    kernel = vt[-1]
    _, nab = _all_covariant_derivatives(field, x, h)
    raw = np.zeros((4, 7))
    scale = np.linalg.norm(psi)
    for mu in range(4):
        b = (
            nab[mu]
            + 0.5j * pp.grad_beta[mu] * (basis.pi @ psi)
            - 0.5 * pp.grad_logphi2[mu] * psi
        )
        rhs = np.empty(8)
        rhs[0::2] = b.real
        rhs[1::2] = b.imag
        z, _, _, _ = np.linalg.lstsq(a, rhs, rcond=None)
        if np.linalg.norm(a @ z - rhs) > 1e-8 * max(1.0, scale):
            raise IllConditioned("least-squares reconstruction residual above 1e-8")
        raw[mu] = z
    return TensorialConnection.from_raw(raw, kernel, pp.u, pp.s)
