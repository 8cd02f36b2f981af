"""Dense complex linear algebra used throughout holoflow.

Matrices are plain ``numpy`` complex arrays. The domain "types" (frames,
projectors, unitaries, skew-Hermitian generators) are ndarrays that have
passed the corresponding ``as_*`` check; only :class:`SpectralData` carries
extra structure and gets its own class.

Two exponentials are provided on purpose: :func:`expm` (scaling and
squaring of a Taylor series, usable on any matrix) and
:func:`expm_spectral` (evaluation through an eigendecomposition). They
share no code and are used to check each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import (
    ConvergenceError,
    EmptySpan,
    NonFiniteError,
    NotHermitian,
    NotOrthonormal,
    NotUnitary,
    ShapeError,
)

FRAME_TOL = 1e-10
UNITARY_TOL = 1e-10
PROJECTOR_TOL = 1e-10
PROJECTOR_TRACE_TOL = 1e-8
HERMITIAN_TOL = 1e-10
GROUP_TOL = 1e-8
DROP_TOL = 1e-8

PRINCIPAL = "principal"
GENERATOR = "generator"


def fro(a) -> float:
    return float(np.linalg.norm(a))


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def _scale(a) -> float:
    return max(1.0, fro(a))


# -- validation -------------------------------------------------------------


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    m = np.array(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise ShapeError(f"{name}: expected a non-empty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFiniteError(f"{name}: non-finite entries")
    return m


def as_square(a, name: str = "matrix") -> np.ndarray:
    m = as_matrix(a, name)
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"{name}: expected a square matrix, got shape {m.shape}")
    return m


def as_frame(f, tol: float = FRAME_TOL) -> np.ndarray:
    """Check that ``f`` is an n x m matrix with orthonormal columns."""
    f = as_matrix(f, "frame")
    n, m = f.shape
    if m > n:
        raise NotOrthonormal(f"frame: {m} columns cannot be orthonormal in dimension {n}")
    err = fro(dagger(f) @ f - np.eye(m))
    if err > tol:
        raise NotOrthonormal(f"frame: columns not orthonormal (||F^H F - I|| = {err:.3e})")
    return f


def as_unitary(u, tol: float = UNITARY_TOL, name: str = "matrix") -> np.ndarray:
    u = as_square(u, name)
    err = fro(dagger(u) @ u - np.eye(u.shape[0]))
    if err > tol:
        raise NotUnitary(f"{name}: not unitary (||U^H U - I|| = {err:.3e})")
    return u


def as_projector(p, rank: int | None = None) -> np.ndarray:
    p = as_square(p, "projector")
    if fro(p - dagger(p)) > PROJECTOR_TOL:
        raise NotHermitian("projector: not Hermitian")
    if fro(p @ p - p) > PROJECTOR_TOL:
        raise ShapeError("projector: not idempotent")
    if rank is not None and abs(np.trace(p).real - rank) > PROJECTOR_TRACE_TOL:
        raise ShapeError(f"projector: trace differs from rank {rank}")
    return p


def skew_hermitian(m) -> np.ndarray:
    """Return the skew-Hermitian part (M - M^H) / 2."""
    m = as_square(m)
    return 0.5 * (m - dagger(m))


def projector(frame) -> np.ndarray:
    """Orthogonal projector F F^H onto the column span of a frame."""
    f = np.asarray(frame, dtype=complex)
    return f @ dagger(f)


def projector_rank(p) -> int:
    return int(round(np.trace(p).real))


# -- frames -----------------------------------------------------------------


def _columns(vectors) -> list[np.ndarray]:
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        return [vectors[:, j] for j in range(vectors.shape[1])]
    return [np.asarray(v, dtype=complex).ravel() for v in vectors]


def orthonormalize(vectors: Iterable, tol: float = DROP_TOL) -> np.ndarray:
    """Orthonormal basis of span(vectors) via modified Gram-Schmidt, run twice.

    A 2-D array is read column by column. A vector whose residual after
    projection is below ``tol * max(1, |v|)`` is dropped.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    cols = _columns(vectors)
    if not cols:
        raise EmptySpan("no input vectors")
    n = cols[0].shape[0]
    basis: list[np.ndarray] = []
    for v in cols:
        if v.shape != (n,):
            raise ShapeError(f"vector of length {v.shape[0]} in a set of length-{n} vectors")
        if not np.all(np.isfinite(v)):
            raise NonFiniteError("non-finite vector entry")
        w = v.astype(complex)
        for _ in range(2):
            for q in basis:
                w = w - (q.conj() @ w) * q
        r = np.linalg.norm(w)
        if r < tol * max(1.0, np.linalg.norm(v)):
            continue
        basis.append(w / r)
    if not basis:
        raise EmptySpan("all input vectors are numerically zero")
    return np.column_stack(basis)


def extend_to_unitary(partial) -> np.ndarray:
    """Complete an orthonormal frame to an n x n unitary.

    The input columns are copied unchanged. Each new column is the standard
    basis vector with the largest residual against the columns so far,
    orthogonalized twice and normalized.
    """
    f = as_frame(partial)
    n, m = f.shape
    out = np.zeros((n, n), dtype=complex)
    out[:, :m] = f
    eye = np.eye(n, dtype=complex)
    for k in range(m, n):
        q = out[:, :k]
        resid = eye - q @ (dagger(q) @ eye)
        resid = resid - q @ (dagger(q) @ resid)
        j = int(np.argmax(np.linalg.norm(resid, axis=0)))
        w = resid[:, j]
        out[:, k] = w / np.linalg.norm(w)
    return out


# -- eigensolvers -----------------------------------------------------------


def hermitian_eig(a, tol: float = 1e-14, max_sweeps: int = 60):
    """Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi.

    Returns ``(w, V)`` with ``w`` ascending and ``A V = V diag(w)``.
    Sweeps stop once the off-diagonal Frobenius norm is at most
    ``tol * |A|_F``.
    """
    a = as_square(a)
    n = a.shape[0]
    if fro(a - dagger(a)) > HERMITIAN_TOL * _scale(a):
        raise NotHermitian("matrix is not Hermitian")
    a = 0.5 * (a + dagger(a))
    v = np.eye(n, dtype=complex)
    norm = fro(a)
    if norm == 0.0:
        return np.zeros(n), v
    target = tol * norm
    skip = target / n

    def off(x):
        return fro(x - np.diag(np.diag(x)))

    for _ in range(max_sweeps):
        if off(a) <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= skip:
                    continue
                phase = apq / mag
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # unitary phase removal on q followed by a real rotation
                g = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = dagger(g) @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ g
    else:
        if off(a) > target:
            raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
    w = np.diag(a).real
    order = np.argsort(w, kind="stable")
    return w[order].copy(), v[:, order]


def _fix_gauge(v: np.ndarray) -> np.ndarray:
    # make the first largest-modulus entry of each column real positive
    out = v.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        mags = np.abs(col)
        j = int(np.argmax(mags >= mags.max() * (1 - 1e-12)))
        out[:, k] = col * (abs(col[j]) / col[j])
    return out


@dataclass(frozen=True)
class SpectralData:
    """Spectral form V diag(exp(i*phases)) V^H of a unitary.

    ``branch`` records how phases were chosen: ``"principal"`` for values in
    (-pi, pi] read off a unitary, ``"generator"`` for unrestricted phases
    taken from a skew-Hermitian generator.
    """

    phases: np.ndarray
    vectors: np.ndarray
    branch: str = PRINCIPAL

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * np.exp(1j * self.phases)) @ dagger(self.vectors)


def _principal(phi: float) -> float:
    return phi + 2.0 * math.pi if phi <= -math.pi else phi


def _clusters(values: np.ndarray, tol: float) -> list[list[int]]:
    groups = [[0]]
    for k in range(1, len(values)):
        if values[k] - values[k - 1] < tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    return groups


def _refine(u: np.ndarray, vecs: np.ndarray, sep: float = 1e-6) -> np.ndarray:
    # Stage one resolves eigenvalues only as well as their cosines differ, so
    # u_j, u_k far apart on the circle but with close cosines leave a coupling
    # in V^H U V. One first-order step removes it.
    b = dagger(vecs) @ u @ vecs
    d = np.diag(b)
    gap = d[None, :] - d[:, None]
    mask = np.abs(gap) > sep
    corr = np.zeros_like(b)
    corr[mask] = b[mask] / gap[mask]
    return orthonormalize(vecs + vecs @ corr, tol=0.5)


def unitary_eig(u, group_tol: float = GROUP_TOL) -> SpectralData:
    """Diagonalize a unitary by splitting it into commuting Hermitian parts.

    The Hermitian part (U + U^H)/2 is diagonalized first. Inside each
    cluster of its eigenvalues (consecutive gap < ``group_tol``) the
    restriction of (U - U^H)/2i separates eigenvalues sharing a cosine.
    A first-order correction then decouples eigenvectors whose eigenvalues
    are far apart but have nearly equal cosines. Phases are principal
    values in (-pi, pi].
    """
    u = as_unitary(u)
    herm = 0.5 * (u + dagger(u))
    skew = -0.5j * (u - dagger(u))
    cosines, v = hermitian_eig(herm)
    vecs = np.empty_like(v)
    for group in _clusters(cosines, group_tol):
        block = v[:, group]
        if len(group) > 1:
            _, rot = hermitian_eig(dagger(block) @ skew @ block)
            block = block @ rot
        vecs[:, group] = block
    vecs = _refine(u, vecs)
    vecs = _fix_gauge(vecs)
    rayleigh = np.einsum("ik,ij,jk->k", vecs.conj(), u, vecs)
    phases = np.array([_principal(math.atan2(z.imag, z.real)) for z in rayleigh])
    return SpectralData(phases, vecs, PRINCIPAL)


def spectral_from_generator(h) -> SpectralData:
    """Spectral data of exp(H) read from a skew-Hermitian H = V diag(i*mu) V^H."""
    h = as_square(h)
    mu, v = hermitian_eig(-1j * skew_hermitian(h))
    return SpectralData(mu, v, GENERATOR)


# -- exponentials -----------------------------------------------------------


def expm(m) -> np.ndarray:
    """Matrix exponential by scaling and squaring a truncated Taylor series.

    The matrix is scaled by 2**-s so that its 1-norm is at most 0.5; the
    series runs until a term is below 1e-18 relative to the partial sum.
    """
    m = as_square(m)
    n = m.shape[0]
    norm1 = float(np.max(np.sum(np.abs(m), axis=0)))
    s = 0
    if norm1 > 0.5:
        s = int(math.ceil(math.log2(norm1 / 0.5)))
    x = m / (2.0**s)
    result = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(1, 200):
        term = term @ x / k
        result = result + term
        if np.max(np.abs(term)) <= 1e-18 * max(np.max(np.abs(result)), 1e-300):
            break
    for _ in range(s):
        result = result @ result
    return result


def expm_spectral(spec: SpectralData, t: float = 1.0) -> np.ndarray:
    """Evaluate V diag(exp(i t phases)) V^H."""
    v = spec.vectors
    return (v * np.exp(1j * t * np.asarray(spec.phases))) @ dagger(v)


def commutator(a, b) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape != b.shape:
        raise ShapeError(f"commutator needs equal square shapes, got {a.shape} and {b.shape}")
    return a @ b - b @ a
