"""Hilbert-space structure over an experiment model.

The ambient space is the function space over the state-space points.  The
common space H is spanned by the normalized value indicators of the
reference experiment.  Group elements act through the right regular
permutation representation; products of conjugated subgroup elements give
the representation W on H, from which state vectors (question, answer),
observables, and generalized coherent states are built.

Each word factor is conjugated into the reference experiment's subgroup
and composed exactly as a group element before being restricted to H, so
no floating-point error accumulates along words.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import (
    BasisMismatch,
    DegenerateFallback,
    NotInGeneratedSubgroup,
    WellDefinednessViolation,
)
from .models import ExperimentModel, generated_domain
from .groups import word_decompose

AMBIENT = "ambient"
COMMON = "common"


@dataclass
class AmplitudeVector:
    """Complex coordinates tagged with the basis they refer to.

    Vectors in different bases cannot be combined; the ambient tag indexes
    state-space points, the common tag indexes the reference value basis.
    """

    coords: np.ndarray
    basis: str

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=complex)
        if self.coords.ndim != 1:
            raise ValueError("amplitude coordinates must be one-dimensional")
        if not np.all(np.isfinite(self.coords)):
            raise ValueError("non-finite amplitude coordinates")

    def _check(self, other: "AmplitudeVector"):
        if self.basis != other.basis:
            raise BasisMismatch(f"cannot combine {self.basis!r} with {other.basis!r}")

    def norm(self) -> float:
        return float(np.linalg.norm(self.coords))

    def inner(self, other: "AmplitudeVector") -> complex:
        self._check(other)
        return complex(np.vdot(self.coords, other.coords))

    def add(self, other: "AmplitudeVector") -> "AmplitudeVector":
        self._check(other)
        return AmplitudeVector(self.coords + other.coords, self.basis)

    def scale(self, z) -> "AmplitudeVector":
        return AmplitudeVector(self.coords * z, self.basis)


def fix_phase(v: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Rotate a global phase so the first non-negligible coordinate is real > 0."""
    idx = np.flatnonzero(np.abs(v) > tol)
    if idx.size == 0:
        return v.copy()
    z = v[idx[0]]
    return v * (np.conj(z) / abs(z))


@dataclass
class StateVector:
    """The state `question: value of experiment? answer: k-th value`."""

    experiment: str
    value_index: int
    amplitude: AmplitudeVector
    route: str  # "theorem1" (word transport) or "indicator_fallback" (projection)

    @property
    def coords(self) -> np.ndarray:
        return self.amplitude.coords


@dataclass
class ObservableOperator:
    experiment: str
    matrix: np.ndarray
    eigenvalues: tuple


@dataclass
class Representation:
    """W on the common space, defined on the generated subgroup."""

    domain: tuple            # sorted element indices
    matrices: dict           # element index -> (n, n) complex matrix
    words: dict              # element index -> tuple of (experiment, element) letters
    realization_mode: str    # "theorem1" if the domain covers the group
    residuals: dict          # max unitarity / homomorphism / invariance deviations

    def __contains__(self, g: int) -> bool:
        return g in self.matrices

    def matrix(self, g: int) -> np.ndarray:
        if g not in self.matrices:
            raise NotInGeneratedSubgroup(f"element index {g} outside the domain of W")
        return self.matrices[g]


def build_regular_rep(model: ExperimentModel) -> dict:
    """Permutation matrices of the right regular representation, per element."""
    n = len(model.action.points)
    out = {}
    for g in range(len(model.group)):
        mat = np.zeros((n, n), dtype=float)
        mat[np.arange(n), model.action.perms[g]] = 1.0
        out[g] = mat
    return out


def indicator_basis(model: ExperimentModel, a: str) -> np.ndarray:
    """Columns are normalized value-block indicators of experiment ``a``."""
    exp = model.catalog[a]
    n_pts = len(model.action.points)
    mat = np.zeros((n_pts, exp.n_values), dtype=float)
    for k, block in enumerate(exp.blocks()):
        if block.size == 0:
            raise ValueError(f"empty value block {exp.values[k]!r} in {a!r}")
        mat[block, k] = 1.0 / np.sqrt(block.size)
    return mat


class HilbertRep:
    """Everything derived from one model: W, state vectors, observables."""

    def __init__(self, model: ExperimentModel,
                 tolerances: Tolerances = DEFAULT_TOLERANCES):
        self.model = model
        self.tolerances = tolerances
        self.reference = model.reference
        group = model.group

        counts = {a: model.catalog[a].n_values for a in model.labels}
        if len(set(counts.values())) != 1:
            raise ValueError(
                "experiments disagree on the number of values, so no common "
                f"space exists: {counts}")

        self.basis = indicator_basis(model, self.reference)   # (|Phi|, n)
        self.dim = self.basis.shape[1]
        self.domain_set, self.subgroups = generated_domain(model)
        domain = tuple(sorted(self.domain_set))

        conn = model.catalog.connections
        c = self.reference

        def conjugate(a: str, h: int) -> int:
            # word factor: move into the reference frame, act, move back
            return group.mul(group.mul(conn[(a, c)], h), conn[(c, a)])

        sets = [(a, self.subgroups[a]) for a in model.labels]
        perms = model.action.perms
        matrices, words = {}, {}
        for g in domain:
            word = word_decompose(group, g, sets)
            gamma = group.identity
            for (a, h) in word:
                gamma = group.mul(gamma, conjugate(a, h))
            moved = self.basis[perms[gamma], :]          # U(gamma) C
            matrices[g] = (self.basis.T @ moved).astype(complex)
            words[g] = tuple(word)

        # invariance: each conjugated subgroup generator keeps H inside H
        proj_out = np.eye(len(model.action.points)) - self.basis @ self.basis.T
        inv_res = 0.0
        for a in model.labels:
            for h in sorted(self.subgroups[a]):
                gamma = conjugate(a, h)
                moved = self.basis[perms[gamma], :]
                inv_res = max(inv_res, float(np.abs(proj_out @ moved).max()))

        eye = np.eye(self.dim)
        uni_res = 0.0
        for g in domain:
            m = matrices[g]
            uni_res = max(uni_res, float(np.abs(m.conj().T @ m - eye).max()))

        hom_res = 0.0
        for g in domain:
            for h in domain:
                gh = group.mul(g, h)
                dev = float(np.abs(matrices[g] @ matrices[h] - matrices[gh]).max())
                hom_res = max(hom_res, dev)
        if hom_res > tolerances.word:
            raise WellDefinednessViolation(
                f"word products disagree by {hom_res:.3e} > {tolerances.word:.1e}"
            )

        mode = "theorem1" if len(domain) == len(group) else "indicator_fallback"
        self.representation = Representation(
            domain=domain, matrices=matrices, words=words,
            realization_mode=mode,
            residuals={
                "unitarity": uni_res,
                "homomorphism": hom_res,
                "invariance": inv_res,
            },
        )

        self._states: dict = {}
        for a in model.labels:
            g_ca = conn[(c, a)]
            if g_ca in matrices:
                mat = matrices[g_ca]
                for k in range(self.dim):
                    vec = fix_phase(mat[:, k].copy())
                    self._states[(a, k)] = StateVector(
                        a, k, AmplitudeVector(vec, COMMON), "theorem1")
            else:
                ind = indicator_basis(model, a)
                cols = []
                for k in range(ind.shape[1]):
                    vec = self.basis.T @ ind[:, k]
                    norm = np.linalg.norm(vec)
                    if norm < 1e-12:
                        raise DegenerateFallback(
                            f"state ({a}, {k}) projects to zero on the common space"
                        )
                    cols.append(fix_phase(vec.astype(complex) / norm))
                fam = np.column_stack(cols)
                gram_dev = float(np.abs(fam.conj().T @ fam - np.eye(self.dim)).max())
                if gram_dev > tolerances.structural:
                    # non-negative block overlaps are orthogonal only when the
                    # value partitions coincide, in which case the connection
                    # would lie in the reference subgroup and the word route
                    # would have applied; reaching here means the model has no
                    # faithful realization under this construction
                    raise DegenerateFallback(
                        f"indicator projections for {a!r} are not orthonormal "
                        f"(Gram deviation {gram_dev:.3e}); the value blocks of "
                        f"{a!r} and {c!r} overlap, so no faithful fallback "
                        "realization exists")
                for k in range(ind.shape[1]):
                    self._states[(a, k)] = StateVector(
                        a, k, AmplitudeVector(cols[k], COMMON), "indicator_fallback")

        self._observables: dict = {}
        for a in model.labels:
            exp = model.catalog[a]
            t = np.zeros((self.dim, self.dim), dtype=complex)
            for k in range(exp.n_values):
                v = self._states[(a, k)].coords
                t += exp.eigenvalues[k] * np.outer(v, v.conj())
            self._observables[a] = ObservableOperator(a, t, exp.eigenvalues)

        spectra = [tuple(sorted(model.catalog[a].eigenvalues)) for a in model.labels]
        self.uniform_spectrum = all(
            max(abs(x - y) for x, y in zip(s, spectra[0])) <= tolerances.structural
            for s in spectra
        )

    # -- accessors -------------------------------------------------------

    def state(self, a: str, k) -> StateVector:
        """State vector for experiment ``a``; ``k`` is a value index or label."""
        if isinstance(k, str):
            k = self.model.catalog[a].values.index(k)
        return self._states[(a, k)]

    def states_matrix(self, a: str) -> np.ndarray:
        """Columns are the state vectors of ``a`` in value order."""
        return np.column_stack([self._states[(a, k)].coords for k in range(self.dim)])

    def observable(self, a: str) -> ObservableOperator:
        return self._observables[a]

    def projector(self, a: str, k) -> np.ndarray:
        v = self.state(a, k).coords
        return np.outer(v, v.conj())

    @property
    def realization_mode(self) -> str:
        return self.representation.realization_mode


def build_W(model: ExperimentModel,
            tolerances: Tolerances = DEFAULT_TOLERANCES) -> Representation:
    return HilbertRep(model, tolerances).representation


def state_vector(rep: HilbertRep, a: str, k) -> StateVector:
    return rep.state(a, k)


def observable(rep: HilbertRep, a: str) -> ObservableOperator:
    return rep.observable(a)


@dataclass
class GCSResult:
    """Orbit of a seed state under W, deduplicated up to phase."""

    seed: tuple
    vectors: list
    representatives: list  # element names mapping to each distinct vector
    covers_all_states: bool
    missing: list

    @property
    def count(self) -> int:
        return len(self.vectors)


def enumerate_gcs(rep: HilbertRep, seed: StateVector,
                  tol: float = 1e-10) -> GCSResult:
    """All images of the seed under the representation, up to phase."""
    group = rep.model.group
    vectors, reps = [], []
    for g in rep.representation.domain:
        v = fix_phase(rep.representation.matrices[g] @ seed.coords)
        if not any(np.abs(v - u).max() <= tol for u in vectors):
            vectors.append(v)
            reps.append(group.elements[g])
    missing = []
    for a in rep.model.labels:
        for k in range(rep.dim):
            sv = rep.state(a, k).coords
            if not any(np.abs(sv - u).max() <= tol for u in vectors):
                missing.append([a, rep.model.catalog[a].values[k]])
    return GCSResult(
        seed=(seed.experiment, seed.value_index),
        vectors=vectors,
        representatives=reps,
        covers_all_states=not missing,
        missing=missing,
    )
