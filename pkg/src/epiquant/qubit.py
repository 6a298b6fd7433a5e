"""The two-outcome spin model in its exact two-dimensional form.

Directions are unit 3-vectors; the sign-of-component observable along a
direction has the familiar half-angle representation, so transition
probabilities, singlet correlations, and CHSH values have closed forms.
A local-realistic contrast model (signs of a latent vector sampled
uniformly on the sphere) and a Bloch-sphere coverage statistic are
included for comparison experiments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)


def as_direction(v) -> np.ndarray:
    """Validate a unit 3-vector (tolerance 1e-12 on the norm)."""
    arr = np.asarray(v, dtype=float)
    if arr.shape != (3,):
        raise ValueError("direction must be a 3-vector")
    if abs(np.linalg.norm(arr) - 1.0) > 1e-12:
        raise ValueError(f"direction norm {np.linalg.norm(arr)!r} is not 1")
    return arr


def planar_direction(angle_degrees: float) -> np.ndarray:
    """Unit vector at the given angle in the x-z plane."""
    rad = np.radians(angle_degrees)
    return np.array([np.sin(rad), 0.0, np.cos(rad)])


def rotation_matrix_2x2(axis, angle: float) -> np.ndarray:
    """Half-angle representation of the rotation by ``angle`` about ``axis``."""
    n = as_direction(axis)
    half = angle / 2.0
    n_dot_sigma = sum(n[i] * _PAULI[i] for i in range(3))
    return np.cos(half) * np.eye(2) - 1j * np.sin(half) * n_dot_sigma


def rotation_to(a) -> np.ndarray:
    """A 2x2 rotation carrying the +z axis onto direction ``a``."""
    a = as_direction(a)
    cos_t = np.clip(a[2], -1.0, 1.0)
    if cos_t > 1.0 - 1e-14:
        return np.eye(2, dtype=complex)
    if cos_t < -1.0 + 1e-14:
        return rotation_matrix_2x2([1.0, 0.0, 0.0], np.pi)
    axis = np.cross([0.0, 0.0, 1.0], a)
    axis = axis / np.linalg.norm(axis)
    return rotation_matrix_2x2(axis, np.arccos(cos_t))


@dataclass
class QubitState:
    """Amplitudes of the state answering sign(a . spin) = sign."""

    bloch: np.ndarray
    sign: int
    amplitudes: np.ndarray

    @classmethod
    def along(cls, a, sign: int) -> "QubitState":
        a = as_direction(a)
        if sign not in (-1, 1):
            raise ValueError("sign must be +1 or -1")
        base = np.array([1.0, 0.0], dtype=complex) if sign > 0 else \
            np.array([0.0, 1.0], dtype=complex)
        amps = rotation_to(a) @ base
        return cls(bloch=a, sign=sign, amplitudes=amps)

    def bloch_of_amplitudes(self) -> np.ndarray:
        v = self.amplitudes
        return np.array([float(np.real(np.vdot(v, s @ v))) for s in _PAULI])


def qubit_transition(a, s: int, b, t: int) -> float:
    """P(sign along b = t | sign along a = s), via the 2x2 representation.

    Agrees with the closed form (1 + s t a.b) / 2.
    """
    psi = QubitState.along(a, s).amplitudes
    chi = QubitState.along(b, t).amplitudes
    return float(np.abs(np.vdot(chi, psi)) ** 2)


def epr_correlation(a, b) -> float:
    """Product expectation for the bound pair: minus the direction overlap."""
    a = as_direction(a)
    b = as_direction(b)
    return -float(np.dot(a, b))


@dataclass
class SingletPair:
    """Two subsystems bound by opposite latent vectors.

    Joint outcome probabilities P(s, t) = (1 - s t a.b) / 4 reproduce the
    anticorrelated statistics; the latent vector never enters.
    """

    def joint_distribution(self, a, b) -> dict:
        d = float(np.dot(as_direction(a), as_direction(b)))
        return {(s, t): (1.0 - s * t * d) / 4.0
                for s in (1, -1) for t in (1, -1)}

    def sample_correlation(self, a, b, samples: int, seed: int, stream: int = 0):
        """Empirical product mean and its standard error.

        ``stream`` selects an independent derived stream of the same seed
        (one per measurement setting, say).
        """
        if samples < 1:
            raise ValueError("need at least one sample")
        dist = self.joint_distribution(a, b)
        pairs = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
        probs = np.array([dist[p] for p in pairs])
        rng = np.random.default_rng(
            np.random.Philox(key=np.uint64(seed), counter=[0, 0, 0, stream]))
        counts = rng.multinomial(samples, probs)
        products = np.array([s * t for s, t in pairs])
        corr = float((counts * products).sum() / samples)
        se = float(np.sqrt(max(1.0 - corr * corr, 0.0) / samples))
        marg_a = float((counts * np.array([s for s, _ in pairs])).sum() / samples)
        marg_b = float((counts * np.array([t for _, t in pairs])).sum() / samples)
        return corr, se, marg_a, marg_b


def chsh(a, a2, b, b2, correlation=epr_correlation):
    """CHSH combination |E(a,b) - E(a,b') + E(a',b) + E(a',b')|."""
    e_ab = correlation(a, b)
    e_ab2 = correlation(a, b2)
    e_a2b = correlation(a2, b)
    e_a2b2 = correlation(a2, b2)
    s = abs(e_ab - e_ab2 + e_a2b + e_a2b2)
    return {
        "E": {"ab": e_ab, "ab'": e_ab2, "a'b": e_a2b, "a'b'": e_a2b2},
        "S": s,
        "violated": s > 2.0,
    }


def classical_sign_model(a, b, samples: int, seed: int, stream: int = 0):
    """Empirical correlation of opposite latent signs, uniform latent vector.

    One side reports sign(a . phi), the other -sign(b . phi) for the same
    phi drawn uniformly on the sphere; converges to -1 + 2 theta / pi.
    Returns (correlation, standard error).
    """
    a = as_direction(a)
    b = as_direction(b)
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(
        np.random.Philox(key=np.uint64(seed), counter=[0, 0, 0, stream]))
    phi = rng.normal(size=(samples, 3))
    sa = np.sign(phi @ a)
    sb = -np.sign(phi @ b)
    sa[sa == 0] = 1.0
    sb[sb == 0] = -1.0
    corr = float(np.mean(sa * sb))
    se = float(np.sqrt(max(1.0 - corr * corr, 0.0) / samples))
    return corr, se


def classical_sign_correlation_exact(a, b) -> float:
    """Closed form of the contrast model's correlation: -1 + 2 theta / pi."""
    d = np.clip(float(np.dot(as_direction(a), as_direction(b))), -1.0, 1.0)
    theta = np.arccos(d)
    return -1.0 + 2.0 * theta / np.pi


def random_rotations(count: int, seed: int) -> np.ndarray:
    """Uniformly random 2x2 rotations via normalized 4-normal quaternions."""
    rng = np.random.default_rng(np.random.Philox(key=np.uint64(seed)))
    q = rng.normal(size=(count, 4))
    q = q / np.linalg.norm(q, axis=1, keepdims=True)
    mats = np.empty((count, 2, 2), dtype=complex)
    mats[:, 0, 0] = q[:, 0] - 1j * q[:, 3]
    mats[:, 0, 1] = -q[:, 2] - 1j * q[:, 1]
    mats[:, 1, 0] = q[:, 2] - 1j * q[:, 1]
    mats[:, 1, 1] = q[:, 0] + 1j * q[:, 3]
    return mats


def bloch_vector(amplitudes: np.ndarray) -> np.ndarray:
    v = np.asarray(amplitudes, dtype=complex)
    return np.array([float(np.real(np.vdot(v, s @ v))) for s in _PAULI])


def sphere_grid(count: int = 1000) -> np.ndarray:
    """Deterministic, roughly uniform unit-sphere grid (Fibonacci spiral)."""
    i = np.arange(count)
    z = 1.0 - 2.0 * (i + 0.5) / count
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    golden = np.pi * (3.0 - np.sqrt(5.0))
    theta = golden * i
    return np.column_stack([r * np.cos(theta), r * np.sin(theta), z])


def bloch_coverage(samples: int, seed: int, grid_size: int = 1000) -> dict:
    """How densely rotated images of one state cover the Bloch sphere.

    Maps a fixed seed state through ``samples`` random rotations and
    returns the maximum, over a fixed sphere grid, of the distance to the
    nearest sampled Bloch vector.  Exploratory evidence of coverage only.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    mats = random_rotations(samples, seed)
    seed_state = np.array([1.0, 0.0], dtype=complex)
    images = mats @ seed_state
    # Bloch vectors of all images, vectorized
    x = 2.0 * np.real(np.conj(images[:, 0]) * images[:, 1])
    y = 2.0 * np.imag(np.conj(images[:, 0]) * images[:, 1])
    z = np.abs(images[:, 0]) ** 2 - np.abs(images[:, 1]) ** 2
    cloud = np.column_stack([x, y, z])
    grid = sphere_grid(grid_size)
    worst = 0.0
    chunk = 200
    for start in range(0, grid_size, chunk):
        dots = grid[start:start + chunk] @ cloud.T
        best = dots.max(axis=1)
        dist = np.sqrt(np.clip(2.0 - 2.0 * best, 0.0, None))
        worst = max(worst, float(dist.max()))
    return {"samples": samples, "grid_size": grid_size, "max_min_distance": worst}
