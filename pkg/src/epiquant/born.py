"""Transition probabilities, effects, and density-matrix recovery.

Transition matrices come from squared overlaps of state vectors.  Effects
are probability-weighted sums of rank-one projectors onto an orthonormal
basis; probabilities of effects are computed through the declared
decomposition and agree with the trace form by construction.  A spanning
sample of (effect, probability) pairs determines the underlying density
matrix by least squares, with a declared projection onto the physical set.

Finite-dimensional spaces only admit finite sums of effects, so additivity
is exercised through finite mixtures; countable additivity has no content
here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import NotAnEffect, RankDeficient
from .hilbert import HilbertRep, StateVector


@dataclass
class TransitionMatrix:
    """P[k][i] = probability of value i in ``to`` given value k in ``from``."""

    from_experiment: str
    to_experiment: str
    entries: np.ndarray
    realization_mode: str

    def __post_init__(self):
        p = np.asarray(self.entries, dtype=float)
        if p.min() < -1e-12 or p.max() > 1 + 1e-12:
            raise ValueError("transition entries outside [0, 1]")
        if np.abs(p.sum(axis=1) - 1).max() > 1e-12:
            raise ValueError("transition rows do not sum to one")
        if np.abs(p.sum(axis=0) - 1).max() > 1e-12:
            raise ValueError("transition columns do not sum to one")
        self.entries = p


def transition_matrix(rep: HilbertRep, a: str, b: str) -> TransitionMatrix:
    """Born transitions between two experiments' perfect-measurement states."""
    amat = rep.states_matrix(a)
    bmat = rep.states_matrix(b)
    p = np.abs(amat.conj().T @ bmat) ** 2
    return TransitionMatrix(a, b, p.real, rep.realization_mode)


class EffectDecomposition:
    """An orthonormal basis with probability weights, defining an effect."""

    def __init__(self, vectors: np.ndarray, weights: Sequence[float],
                 basis_label: Optional[str] = None):
        v = np.asarray(vectors, dtype=complex)
        w = np.asarray(weights, dtype=float)
        if v.ndim != 2 or v.shape[1] != w.shape[0]:
            raise ValueError("need one weight per basis vector")
        gram = v.conj().T @ v
        if np.abs(gram - np.eye(v.shape[1])).max() > 1e-10:
            raise ValueError("effect basis is not orthonormal")
        if w.min() < -1e-12 or w.max() > 1 + 1e-12:
            raise NotAnEffect("weights outside [0, 1]")
        self.vectors = v
        self.weights = np.clip(w, 0.0, 1.0)
        self.basis_label = basis_label

    def matrix(self) -> np.ndarray:
        return (self.vectors * self.weights) @ self.vectors.conj().T


class Effect:
    """An effect with its generating decomposition and its matrix.

    Equality of effects is matrix equality at 1e-12; the decomposition is
    retained so probabilities can be computed through it and compared with
    the trace form.
    """

    def __init__(self, decomposition: EffectDecomposition):
        self.decomposition = decomposition
        self.matrix = decomposition.matrix()
        eig = np.linalg.eigvalsh(self.matrix)
        if eig.min() < -1e-12 or eig.max() > 1 + 1e-12:
            raise NotAnEffect("effect spectrum outside [0, 1]")

    @classmethod
    def from_basis(cls, rep: HilbertRep, a: str, weights) -> "Effect":
        return cls(EffectDecomposition(rep.states_matrix(a), weights, basis_label=a))

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "Effect":
        """Effect from a Hermitian matrix via its eigendecomposition."""
        m = np.asarray(matrix, dtype=complex)
        if np.abs(m - m.conj().T).max() > 1e-12:
            raise NotAnEffect("matrix is not Hermitian")
        w, v = np.linalg.eigh(m)
        if w.min() < -1e-12 or w.max() > 1 + 1e-12:
            raise NotAnEffect("matrix spectrum outside [0, 1]")
        return cls(EffectDecomposition(v, np.clip(w, 0.0, 1.0)))

    def same_matrix(self, other: "Effect", tol: float = 1e-12) -> bool:
        return bool(np.abs(self.matrix - other.matrix).max() <= tol)


def _state_density(state) -> np.ndarray:
    if isinstance(state, StateVector):
        v = state.coords
        return np.outer(v, v.conj())
    matrix = getattr(state, "matrix", None)
    if matrix is not None:
        return np.asarray(matrix, dtype=complex)
    arr = np.asarray(state, dtype=complex)
    if arr.ndim == 1:
        return np.outer(arr, arr.conj())
    return arr


def effect_probability(state, effect: Effect,
                       via: Optional[EffectDecomposition] = None) -> float:
    """Probability of an effect: weighted Born transitions to its basis.

    ``via`` selects an alternative decomposition of the same effect matrix
    (checked at 1e-12); the result is independent of the choice.
    """
    decomp = effect.decomposition if via is None else via
    if via is not None:
        if np.abs(decomp.matrix() - effect.matrix).max() > 1e-12:
            raise ValueError("alternative decomposition gives a different effect")
    rho = _state_density(state)
    total = 0.0
    for i in range(decomp.vectors.shape[1]):
        v = decomp.vectors[:, i]
        total += decomp.weights[i] * float(np.real(np.vdot(v, rho @ v)))
    return total


def mixture_check(e1: Effect, e2: Effect, state) -> float:
    """|P(avg) - avg of P| for the equal mixture of two effects.

    The mixture is decomposed through its own eigenbasis; the residual is
    the operational additivity defect and should vanish to rounding.
    """
    if np.array_equal(e1.matrix, e2.matrix):
        # the mixture of an effect with itself is that effect; keep its
        # declared decomposition so the identity holds without rounding
        avg = e1
    else:
        avg = Effect.from_matrix(0.5 * (e1.matrix + e2.matrix))
    p_avg = effect_probability(state, avg)
    p1 = effect_probability(state, e1)
    p2 = effect_probability(state, e2)
    return abs(p_avg - 0.5 * p1 - 0.5 * p2)


def _effect_row(m: np.ndarray, d: int) -> np.ndarray:
    """Design row so that row . params == tr(rho E).

    Unknown params are (rho_ii, Re rho_ij, Im rho_ij for i<j); then
    tr(rho E) = sum_i rho_ii E_ii + sum_{i<j} 2(Re rho_ij Re E_ij
    + Im rho_ij Im E_ij).
    """
    out = np.empty(d * d)
    idx = 0
    for i in range(d):
        out[idx] = m[i, i].real
        idx += 1
    for i in range(d):
        for j in range(i + 1, d):
            out[idx] = 2.0 * m[i, j].real
            idx += 1
            out[idx] = 2.0 * m[i, j].imag
            idx += 1
    return out


def _rho_from_params(x: np.ndarray, d: int) -> np.ndarray:
    m = np.zeros((d, d), dtype=complex)
    idx = 0
    for i in range(d):
        m[i, i] = x[idx]
        idx += 1
    for i in range(d):
        for j in range(i + 1, d):
            re = x[idx]
            idx += 1
            im = x[idx]
            idx += 1
            m[i, j] = re + 1j * im
            m[j, i] = re - 1j * im
    return m


@dataclass
class GleasonFit:
    """Least-squares density matrix recovered from effect probabilities."""

    recovered: np.ndarray
    residual: float       # max |P - tr(rho_hat E)| after projection
    raw_residual: float   # same, before the physical projection
    sample_size: int


def gleason_fit(samples: Sequence[tuple]) -> GleasonFit:
    """Recover a density matrix from (effect, probability) pairs.

    Solves the linear system tr(rho E_s) = P_s for a Hermitian rho by least
    squares, then projects onto the physical set: eigenvalues clipped at
    zero, trace renormalized to one.  Raises :class:`RankDeficient` when
    the effect matrices do not span the Hermitian space (the fit would not
    be identifiable).
    """
    if not samples:
        raise RankDeficient("empty sample")
    d = samples[0][0].matrix.shape[0]
    if len(samples) < d * d:
        raise RankDeficient(f"need at least {d * d} samples, got {len(samples)}")
    design = np.stack([_effect_row(e.matrix, d) for e, _ in samples])
    probs = np.array([float(p) for _, p in samples])
    x, _, rank, _ = np.linalg.lstsq(design, probs, rcond=None)
    if rank < d * d:
        raise RankDeficient(
            f"effect sample spans only {rank} of {d * d} Hermitian dimensions")
    rho = _rho_from_params(x, d)
    raw_residual = float(
        max(abs(float(np.real(np.trace(rho @ e.matrix))) - p) for e, p in samples))
    w, v = np.linalg.eigh(rho)
    w = np.clip(w, 0.0, None)
    if w.sum() <= 0:
        raise RankDeficient("projected density matrix has zero trace")
    w = w / w.sum()
    rho_proj = (v * w) @ v.conj().T
    residual = float(
        max(abs(float(np.real(np.trace(rho_proj @ e.matrix))) - p) for e, p in samples))
    return GleasonFit(rho_proj, residual, raw_residual, len(samples))
