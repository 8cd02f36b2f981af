"""Generators with prescribed monodromy on a subspace.

Given a subspace V0 (as an orthonormal frame F0) and a unitary g0 acting on
it, build a skew-Hermitian H on the ambient space with exp(H) V0 = V0 and
exp(H)|V0 = g0, such that [H, P0] is generally nonzero so the induced loop
P(t) = exp(tH) P0 exp(-tH) actually moves.

Recipe: diagonalize g0 = sum u_k e_k e_k^H, append one extra basis vector
e_{m+1} orthogonal to V0 carrying a second copy of the pivot eigenvalue,
and let a 2x2 unitary ``omega`` mix the two copies whose logarithms differ
by 2*pi*winding. All other directions get eigenvalue 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import NoRoomForExtension, ShapeError
from .linalg import (
    as_frame,
    as_unitary,
    commutator,
    dagger,
    expm,
    extend_to_unitary,
    fro,
    projector,
    skew_hermitian,
    unitary_eig,
)

NONTRIVIAL_TOL = 1e-8
OMEGA_TOL = 1e-12
_TIE_TOL = 1e-10


@dataclass(frozen=True)
class BoundaryProblem:
    """Subspace frame F0 (n x m) and target g0 (m x m, in F0 coordinates)."""

    frame: np.ndarray
    g0: np.ndarray

    def __post_init__(self):
        f = as_frame(self.frame)
        n, m = f.shape
        if m >= n:
            raise NoRoomForExtension(
                f"frame: rank {m} fills the ambient dimension {n}; need m < n"
            )
        g0 = as_unitary(self.g0, name="g0")
        if g0.shape != (m, m):
            raise ShapeError(f"g0: expected shape ({m}, {m}), got {g0.shape}")
        object.__setattr__(self, "frame", f)
        object.__setattr__(self, "g0", g0)

    @property
    def n(self) -> int:
        return self.frame.shape[0]

    @property
    def m(self) -> int:
        return self.frame.shape[1]

    @property
    def p0(self) -> np.ndarray:
        return projector(self.frame)


@dataclass(frozen=True)
class SynthesisParams:
    """Coordinates on the solution family.

    ``pivot`` is 1-based and selects which eigenvalue of g0 is doubled;
    ``None`` means the last one (m).
    """

    omega: np.ndarray = field(default_factory=lambda: np.eye(2, dtype=complex))
    winding: int = 1
    pivot: int | None = None

    def __post_init__(self):
        omega = as_unitary(self.omega, tol=OMEGA_TOL, name="omega")
        if omega.shape != (2, 2):
            raise ShapeError(f"omega: expected shape (2, 2), got {omega.shape}")
        if int(self.winding) != self.winding:
            raise ValueError("winding: must be an integer")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "winding", int(self.winding))

    def pivot_for(self, m: int) -> int:
        p = m if self.pivot is None else int(self.pivot)
        if not 1 <= p <= m:
            raise ValueError(f"pivot: {p} outside [1, {m}]")
        return p


def rotation(angle: float) -> np.ndarray:
    """Real 2x2 rotation [[cos, -sin], [sin, cos]] as a complex array."""
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]], dtype=complex)


class MonodromyReport(NamedTuple):
    proj_residual: float
    restriction_residual: float
    skew_residual: float
    commutator_norm: float
    nontrivial: bool


@dataclass(frozen=True)
class SynthesisResult:
    """Output of :func:`synthesize`.

    ``H`` is the ambient generator, ``basis`` the unitary E whose columns
    are e_1..e_n, ``U`` the diagonal target exp(H_omega) in that basis and
    ``H_block`` the block generator H_omega itself (so H = E H_block E^H).
    """

    H: np.ndarray
    basis: np.ndarray
    U: np.ndarray
    H_block: np.ndarray
    phases: np.ndarray
    report: MonodromyReport


def _lex_key(vec: np.ndarray) -> tuple:
    return tuple(x for z in np.round(vec, 12) for x in (z.real, z.imag))


def diagonalize_boundary(prob: BoundaryProblem):
    """Eigenphases of g0 (ascending, principal) and the matching ambient frame F0 V."""
    spec = unitary_eig(prob.g0)
    phases = spec.phases
    order = list(np.argsort(phases, kind="stable"))
    # ties: order by eigenvector coordinates so the output is deterministic
    ordered: list[int] = []
    i = 0
    while i < len(order):
        j = i + 1
        while j < len(order) and phases[order[j]] - phases[order[j - 1]] < _TIE_TOL:
            j += 1
        ordered.extend(sorted(order[i:j], key=lambda k: _lex_key(spec.vectors[:, k])))
        i = j
    vecs = spec.vectors[:, ordered]
    return phases[ordered].copy(), prob.frame @ vecs


def build_extension(eigenframe, phases, params: SynthesisParams):
    """Return (E, U, reordered phases).

    The pivot eigenpair is moved to position m, E extends the eigenframe to
    an ambient unitary, and U = diag(u_1..u_m, u_m, 1, ..., 1).
    """
    f = as_frame(eigenframe)
    n, m = f.shape
    phases = np.asarray(phases, dtype=float)
    if phases.shape != (m,):
        raise ShapeError(f"expected {m} phases, got {phases.shape}")
    if m >= n:
        raise NoRoomForExtension(f"rank {m} subspace of dimension {n} has no complement")
    p = params.pivot_for(m)
    perm = [k for k in range(m) if k != p - 1] + [p - 1]
    phases = phases[perm]
    basis = extend_to_unitary(f[:, perm])
    diag = np.ones(n, dtype=complex)
    diag[:m] = np.exp(1j * phases)
    diag[m] = diag[m - 1]
    return basis, np.diag(diag), phases


def omega_block(lam_m: float, params: SynthesisParams) -> np.ndarray:
    """omega diag(i lam_m, i (lam_m + 2 pi w)) omega^H."""
    w = params.omega
    d = np.array([1j * lam_m, 1j * (lam_m + 2.0 * math.pi * params.winding)])
    return (w * d) @ dagger(w)


def build_generator(phases, params: SynthesisParams, n: int) -> np.ndarray:
    """Block generator blockdiag(i*diag(phases[:-1]), Omega, 0) of size n."""
    phases = np.asarray(phases, dtype=float)
    m = phases.shape[0]
    if m < 1 or n < m + 1:
        raise NoRoomForExtension(f"need 1 <= m < n, got m={m}, n={n}")
    h = np.zeros((n, n), dtype=complex)
    h[np.arange(m - 1), np.arange(m - 1)] = 1j * phases[: m - 1]
    h[m - 1 : m + 1, m - 1 : m + 1] = omega_block(phases[-1], params)
    return skew_hermitian(h)


def verify_monodromy(h, prob: BoundaryProblem) -> MonodromyReport:
    """Residuals of the closed-loop and restriction conditions for ``h``.

    exp is always the Taylor oracle :func:`holoflow.linalg.expm`.
    """
    h = np.asarray(h, dtype=complex)
    if h.shape != (prob.n, prob.n):
        raise ShapeError(f"H: expected shape ({prob.n}, {prob.n}), got {h.shape}")
    p0 = prob.p0
    fwd = expm(h)
    back = expm(-h)
    comm = fro(commutator(h, p0))
    return MonodromyReport(
        proj_residual=fro(fwd @ p0 @ back - p0),
        restriction_residual=fro(dagger(prob.frame) @ fwd @ prob.frame - prob.g0),
        skew_residual=fro(h + dagger(h)),
        commutator_norm=comm,
        nontrivial=comm > NONTRIVIAL_TOL,
    )


def synthesize(prob: BoundaryProblem, params: SynthesisParams | None = None) -> SynthesisResult:
    params = params or SynthesisParams()
    phases, eigenframe = diagonalize_boundary(prob)
    basis, u, phases = build_extension(eigenframe, phases, params)
    h_block = build_generator(phases, params, prob.n)
    h = skew_hermitian(basis @ h_block @ dagger(basis))
    return SynthesisResult(
        H=h,
        basis=basis,
        U=u,
        H_block=h_block,
        phases=phases,
        report=verify_monodromy(h, prob),
    )


class Certificate(NamedTuple):
    omega_offdiag: float
    nontrivial: bool

    @property
    def commutator_norm(self) -> float:
        """Predicted |[H_omega, A]|_F."""
        return math.sqrt(2.0) * self.omega_offdiag


def nontriviality_certificate(params: SynthesisParams, lam_m: float = 0.0) -> Certificate:
    """Closed-form |Omega_12| = 2 pi |w| |omega_11| |omega_21|.

    Independent of ``lam_m``: the equal part of the two logarithms commutes
    with omega and drops out.
    """
    w = params.omega
    off = 2.0 * math.pi * abs(params.winding) * abs(w[0, 0]) * abs(w[1, 0])
    return Certificate(off, off > 1e-12)
