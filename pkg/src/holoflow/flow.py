"""Projector dynamics dP/dt = [H, P] on the Grassmannian.

:func:`exact_flow` conjugates by exp(tH); :func:`integrate_rk4` integrates
the commutator ODE directly and never touches an exponential, so the two
serve as checks on one another.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import LoopNotClosed, ShapeError
from .linalg import as_frame, as_square, commutator, dagger, expm, fro, hermitian_eig, projector

CLOSURE_TOL = 1e-6


@dataclass(frozen=True)
class FlowConfig:
    steps: int = 100
    stride: int = 1
    retraction: bool = False

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps: must be >= 1")
        if self.stride < 1 or self.steps % self.stride:
            raise ValueError(f"stride: {self.stride} must be positive and divide steps={self.steps}")

    @property
    def sample_times(self) -> np.ndarray:
        return np.arange(0, self.steps + 1, self.stride) / self.steps


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    projectors: np.ndarray  # (samples, n, n)

    def __post_init__(self):
        if len(self.times) < 2 or self.times[0] != 0.0:
            raise ValueError("trajectory needs >= 2 samples starting at t = 0")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("sample times must be strictly increasing")

    @property
    def distances(self) -> np.ndarray:
        """Frobenius distance of every sample to P(0)."""
        diff = self.projectors - self.projectors[0]
        return np.linalg.norm(diff, axis=(1, 2))


class TrajectoryStats(NamedTuple):
    max_distance: float
    closure: float
    max_idempotency_drift: float
    max_hermiticity_drift: float
    max_trace_drift: float


def _check_pair(h, p0):
    h = as_square(h, "H")
    p0 = as_square(p0, "P0")
    if h.shape != p0.shape:
        raise ShapeError(f"H has shape {h.shape} but P0 has shape {p0.shape}")
    return h, p0


def exact_flow(h, p0, t: float) -> np.ndarray:
    """P(t) = exp(tH) P0 exp(tH)^H."""
    h, p0 = _check_pair(h, p0)
    if t == 0:
        return p0.copy()
    g = expm(t * h)
    return g @ p0 @ dagger(g)


def exact_trajectory(h, p0, cfg: FlowConfig) -> Trajectory:
    h, p0 = _check_pair(h, p0)
    times = cfg.sample_times
    return Trajectory(times, np.stack([exact_flow(h, p0, t) for t in times]))


def retract(p) -> np.ndarray:
    """Nearest projector: eigenvalues of the Hermitian part snapped to {0, 1} at 1/2."""
    p = np.asarray(p)
    w, v = hermitian_eig(0.5 * (p + dagger(p)))
    keep = v[:, w >= 0.5]
    return keep @ dagger(keep)


def integrate_rk4(h, p0, cfg: FlowConfig) -> Trajectory:
    """Classical RK4 for dP/dt = [H, P] over [0, 1] with ``cfg.steps`` steps.

    With ``cfg.retraction`` the state is re-projected onto the Grassmannian
    at every stored sample.
    """
    h, p0 = _check_pair(h, p0)
    dt = 1.0 / cfg.steps

    def rhs(p):
        return commutator(h, p)

    samples = [p0.copy()]
    p = p0.copy()
    for step in range(1, cfg.steps + 1):
        k1 = rhs(p)
        k2 = rhs(p + 0.5 * dt * k1)
        k3 = rhs(p + 0.5 * dt * k2)
        k4 = rhs(p + dt * k3)
        p = p + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if step % cfg.stride == 0:
            if cfg.retraction:
                p = retract(p)
            samples.append(p.copy())
    return Trajectory(cfg.sample_times, np.stack(samples))


def closure_residual(h, p0) -> float:
    return fro(exact_flow(h, p0, 1.0) - np.asarray(p0))


def loop_monodromy(h, frame) -> np.ndarray:
    """F0^H exp(H) F0, the unitary a closed loop induces on span(F0)."""
    f = as_frame(frame)
    resid = closure_residual(h, projector(f))
    if resid > CLOSURE_TOL:
        raise LoopNotClosed(f"exp(H) moves the subspace (closure residual {resid:.3e})")
    return dagger(f) @ expm(np.asarray(h, dtype=complex)) @ f


def sample_drifts(traj: Trajectory):
    """Per-sample (idempotency, hermiticity, trace) constraint violations."""
    ps = traj.projectors
    rank = round(np.trace(ps[0]).real)
    idem = np.linalg.norm(ps @ ps - ps, axis=(1, 2))
    herm = np.linalg.norm(ps - np.conj(np.swapaxes(ps, 1, 2)), axis=(1, 2))
    trace = np.trace(ps, axis1=1, axis2=2)
    return idem, herm, trace, np.abs(trace - rank)


def trajectory_stats(traj: Trajectory) -> TrajectoryStats:
    dist = traj.distances
    idem, herm, _, trace_drift = sample_drifts(traj)
    return TrajectoryStats(
        max_distance=float(dist.max()),
        closure=float(dist[-1]),
        max_idempotency_drift=float(idem.max()),
        max_hermiticity_drift=float(herm.max()),
        max_trace_drift=float(trace_drift.max()),
    )
