import math

import numpy as np

from holoflow import BoundaryProblem, SynthesisParams, rotation

ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def record(number: int, name: str, passed: bool, detail: str) -> bool:
    ACCEPTANCE[number] = (name, bool(passed), detail)
    return passed


def random_unitary(rng, n):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_skew(rng, n, spectral_norm):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = 0.5 * (z - z.conj().T)
    return h * (spectral_norm / np.linalg.norm(h, 2))


def random_instance(rng, n=None, m=None, winding=None):
    n = n if n is not None else int(rng.integers(3, 17))
    m = m if m is not None else int(rng.integers(1, n))
    w = winding if winding is not None else int(rng.integers(-3, 4))
    frame = random_unitary(rng, n)[:, :m]
    prob = BoundaryProblem(frame, random_unitary(rng, m))
    return prob, SynthesisParams(random_unitary(rng, 2), w)


REF_H = 1j * math.pi * np.array([[0.5, 0, 0], [0, 2, -1], [0, -1, 2]])


def reference_problem():
    return BoundaryProblem(np.eye(3)[:, :2], np.diag([1j, -1]))


def reference_params(winding=1):
    return SynthesisParams(rotation(math.pi / 4), winding)
