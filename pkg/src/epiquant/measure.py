"""Density matrices, statistical readout models, and measurement updating.

A measurement of experiment ``b`` with readout model p(y | value_j) is the
operator measure M(y) = sum_j p(y | value_j) P_bj.  Predictive
distributions are tr(rho M(y)); the no-readout update replaces rho by its
diagonal part in the measured basis; a read value collapses to the
corresponding projector.  The Monte Carlo harness replays bit-exactly
from its seed: run ``i`` draws from a counter-based stream derived from
(seed, i), so runs can be sharded and merged without changing results.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import BadPrior, ZeroProbabilityOutcome
from .hilbert import HilbertRep


class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace operator."""

    def __init__(self, matrix, provenance: Optional[tuple] = None):
        m = np.asarray(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("density matrix must be square")
        if np.abs(m - m.conj().T).max() > 1e-12:
            raise ValueError("density matrix is not Hermitian")
        eig = np.linalg.eigvalsh(m)
        if eig.min() < -1e-10:
            raise ValueError(f"density matrix has negative eigenvalue {eig.min():.3e}")
        if abs(np.trace(m).real - 1.0) > 1e-12:
            raise ValueError("density matrix trace differs from one")
        self.matrix = m
        self.provenance = provenance

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def entropy(self) -> float:
        """Von Neumann entropy in nats."""
        eig = np.clip(np.linalg.eigvalsh(self.matrix), 0.0, None)
        nz = eig[eig > 1e-15]
        return float(-(nz * np.log(nz)).sum())


def density_from_prior(rep: HilbertRep, a: str, prior) -> DensityMatrix:
    """rho = sum_k prior_k P_ak for a prior over experiment ``a``'s values."""
    w = np.asarray(prior, dtype=float)
    if w.ndim != 1 or w.shape[0] != rep.dim:
        raise BadPrior(f"prior needs {rep.dim} weights")
    if w.min() < 0:
        raise BadPrior("negative prior weight")
    if abs(w.sum() - 1.0) > 1e-12:
        raise BadPrior(f"prior sums to {w.sum()!r}, not 1")
    basis = rep.states_matrix(a)
    rho = (basis * w) @ basis.conj().T
    return DensityMatrix(rho, provenance=(a, tuple(float(x) for x in w)))


def pure_state(rep: HilbertRep, a: str, k) -> DensityMatrix:
    """Projector onto one state vector as a density matrix."""
    return DensityMatrix(rep.projector(a, k), provenance=(a, k))


class StatisticalModel:
    """Readout model for one experiment: p(outcome | parameter value).

    ``likelihood[y, j]`` is the probability of observing outcome ``y``
    when the value index is ``j``; every column is a distribution.
    """

    def __init__(self, experiment: str, outcomes: Sequence[str], likelihood):
        self.experiment = experiment
        self.outcomes = tuple(str(y) for y in outcomes)
        lk = np.asarray(likelihood, dtype=float)
        if lk.ndim != 2 or lk.shape[0] != len(self.outcomes):
            raise ValueError("likelihood needs one row per outcome")
        if lk.min() < 0 or lk.max() > 1:
            raise ValueError("likelihood entries outside [0, 1]")
        if np.abs(lk.sum(axis=0) - 1.0).max() > 1e-12:
            raise ValueError("likelihood columns must sum to one")
        self.likelihood = lk

    @classmethod
    def perfect(cls, rep: HilbertRep, b: str) -> "StatisticalModel":
        values = rep.model.catalog[b].values
        return cls(b, values, np.eye(len(values)))

    @classmethod
    def symmetric_noise(cls, rep: HilbertRep, b: str, error: float) -> "StatisticalModel":
        """Correct readout with probability 1-error, uniform otherwise."""
        values = rep.model.catalog[b].values
        n = len(values)
        if not 0 <= error <= 1:
            raise ValueError("error rate outside [0, 1]")
        lk = np.full((n, n), error / (n - 1) if n > 1 else 0.0)
        np.fill_diagonal(lk, 1.0 - error)
        return cls(b, values, lk)


class OperatorMeasure:
    """Per-outcome effects M(y) = sum_j p(y | value_j) P_bj; sums to identity."""

    def __init__(self, rep: HilbertRep, stat_model: StatisticalModel):
        b = stat_model.experiment
        if stat_model.likelihood.shape[1] != rep.dim:
            raise ValueError("likelihood needs one column per parameter value")
        basis = rep.states_matrix(b)
        self.experiment = b
        self.outcomes = stat_model.outcomes
        self.stat_model = stat_model
        self.elements = {}
        total = np.zeros((rep.dim, rep.dim), dtype=complex)
        for y, name in enumerate(self.outcomes):
            m = (basis * stat_model.likelihood[y]) @ basis.conj().T
            eig = np.linalg.eigvalsh(m)
            if eig.min() < -1e-12 or eig.max() > 1 + 1e-12:
                raise ValueError(f"element {name!r} is not an effect")
            self.elements[name] = m
            total += m
        if np.abs(total - np.eye(rep.dim)).max() > 1e-12:
            raise ValueError("operator measure does not sum to the identity")


def predictive_distribution(rho: DensityMatrix, measure: OperatorMeasure) -> dict:
    """P(y) = tr(rho M(y)) over the measure's outcomes."""
    out = {}
    for name in measure.outcomes:
        out[name] = float(np.real(np.trace(rho.matrix @ measure.elements[name])))
    total = sum(out.values())
    if abs(total - 1.0) > 1e-12:
        raise ValueError(f"predictive distribution sums to {total!r}")
    return out


def conditional_expectation(rep: HilbertRep, a: str, k, b: str) -> float:
    """Expected eigenvalue of experiment ``b`` given a perfect answer to ``a``."""
    v = rep.state(a, k).coords
    t = rep.observable(b).matrix
    return float(np.real(np.vdot(v, t @ v)))


def posterior_state(rep: HilbertRep, rho: DensityMatrix, b: str,
                    outcome=None) -> DensityMatrix:
    """State update after measuring ``b``.

    Without an outcome: the diagonal part of rho in the ``b`` basis (for a
    prior-built rho this is the predictive mixture over answers).  With an
    outcome (value index or label): the projector onto that answer, the
    perfect-readout convention.
    """
    basis = rep.states_matrix(b)
    kappa = np.real(np.einsum("ij,jk,ki->i", basis.conj().T, rho.matrix, basis))
    if outcome is None:
        kappa = np.clip(kappa, 0.0, None)
        kappa = kappa / kappa.sum()
        return DensityMatrix((basis * kappa) @ basis.conj().T,
                             provenance=(b, tuple(float(x) for x in kappa)))
    j = outcome
    if isinstance(outcome, str):
        j = rep.model.catalog[b].values.index(outcome)
    if kappa[j] < 1e-15:
        raise ZeroProbabilityOutcome(
            f"outcome {outcome!r} of {b!r} has probability {kappa[j]:.3e}")
    return DensityMatrix(rep.projector(b, j), provenance=(b, j))


def run_stream(seed: int, run_index: int) -> np.random.Generator:
    """Independent, replayable stream for one run: counter block (seed, i)."""
    bitgen = np.random.Philox(key=np.uint64(seed), counter=[0, 0, 0, run_index])
    return np.random.Generator(bitgen)


@dataclass
class StepRecord:
    experiment: str
    value: str
    outcome: str
    bayes_weights: dict
    pre_diag: list
    post_diag: list


@dataclass
class SimulationTrace:
    """Aggregated result of a seeded measurement sequence.

    ``steps`` holds per-step frequency tables over all runs; ``first_run``
    keeps the full step-by-step record (sampled value, observed outcome,
    Bayes weights over values given the outcome, pre/post state diagonals
    in the measured basis) for the first run only.
    """

    seed: int
    runs: int
    plan: list
    steps: list
    first_run: list

    def to_payload(self) -> dict:
        return {
            "seed": self.seed,
            "runs": self.runs,
            "plan": self.plan,
            "steps": self.steps,
            "first_run": [
                {
                    "experiment": r.experiment,
                    "value": r.value,
                    "outcome": r.outcome,
                    "bayes_weights": r.bayes_weights,
                    "pre_diagonal": r.pre_diag,
                    "post_diagonal": r.post_diag,
                }
                for r in self.first_run
            ],
        }


def simulate_sequence(rep: HilbertRep, initial: DensityMatrix,
                      plan: Sequence[tuple], runs: int, seed: int) -> SimulationTrace:
    """Sample measurement chains and aggregate outcome frequencies.

    ``plan`` is a list of (experiment label, StatisticalModel) steps.  Per
    run and step: draw a parameter value from the current predictive
    weights, draw an observation from the readout likelihood, collapse to
    the drawn value's projector.  Runs use independent derived streams, so
    any sharding that merges count tables by summation gives identical
    frequencies.
    """
    if runs < 1:
        raise ValueError("need at least one run")
    labels = {b: rep.model.catalog[b].values for b, _ in plan}
    value_counts = [dict.fromkeys(labels[b], 0) for b, _ in plan]
    outcome_counts = [dict.fromkeys(sm.outcomes, 0) for _, sm in plan]
    first_run: list = []

    # After a collapse the chain is Markov over value indices, so the whole
    # plan reduces to precomputed weight tables; the per-run loop only draws.
    dim = rep.dim
    kappa_tables = []   # step -> (n_prev_states, dim) predictive weights
    first_kappa = None
    for s, (b, sm) in enumerate(plan):
        basis = rep.states_matrix(b)
        if s == 0:
            kappa = np.real(np.einsum("ij,jk,ki->i", basis.conj().T,
                                      initial.matrix, basis))
            kappa = np.clip(kappa, 0.0, None)
            kappa = kappa / kappa.sum()
            first_kappa = kappa
            kappa_tables.append(kappa[None, :])
        else:
            prev_basis = rep.states_matrix(plan[s - 1][0])
            rows = np.abs(prev_basis.conj().T @ basis) ** 2
            rows = rows / rows.sum(axis=1, keepdims=True)
            kappa_tables.append(rows)
    kappa_cum = [np.cumsum(t, axis=1) for t in kappa_tables]
    lk_cum = [np.cumsum(sm.likelihood, axis=0) for _, sm in plan]

    n_steps = len(plan)
    for i in range(runs):
        rng = run_stream(seed, i)
        draws = rng.random(2 * n_steps)
        prev = 0
        for s, (b, sm) in enumerate(plan):
            cum = kappa_cum[s][prev if s else 0]
            j = min(int(np.searchsorted(cum, draws[2 * s], side="right")), dim - 1)
            lcum = lk_cum[s][:, j]
            y = min(int(np.searchsorted(lcum, draws[2 * s + 1], side="right")),
                    len(lcum) - 1)
            value_counts[s][labels[b][j]] += 1
            outcome_counts[s][sm.outcomes[y]] += 1
            if i == 0:
                kappa = kappa_tables[s][prev if s else 0]
                bayes = sm.likelihood[y] * kappa
                bayes = bayes / bayes.sum()
                post_diag = np.zeros(dim)
                post_diag[j] = 1.0
                first_run.append(StepRecord(
                    experiment=b,
                    value=labels[b][j],
                    outcome=sm.outcomes[y],
                    bayes_weights={labels[b][t]: float(bayes[t])
                                   for t in range(dim)},
                    pre_diag=[float(x) for x in kappa],
                    post_diag=[float(x) for x in post_diag],
                ))
            prev = j

    steps = []
    for s, (b, sm) in enumerate(plan):
        steps.append({
            "index": s,
            "experiment": b,
            "value_frequencies": {k: v / runs for k, v in value_counts[s].items()},
            "outcome_frequencies": {k: v / runs for k, v in outcome_counts[s].items()},
        })
    return SimulationTrace(seed=seed, runs=runs,
                           plan=[b for b, _ in plan], steps=steps,
                           first_run=first_run)
