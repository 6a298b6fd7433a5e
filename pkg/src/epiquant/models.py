"""Experiment catalogs over a group-equipped state space, and their validation.

An :class:`ExperimentModel` bundles a right group action on a finite state
space with a catalog of mutually exclusive experiments.  Each experiment
assigns one of finitely many values to every state-space point; declared
connection elements transform one experiment's value map into another's.

``validate_assumptions`` checks the whole assumption set by exhaustive
enumeration and reports per-assumption pass/fail/warning entries instead of
raising.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ModelError, TrivialSubgroupWarning
from .groups import FiniteGroup, GroupAction, word_decompose


class Experiment:
    """A named experiment: a total value map on the state space.

    ``values`` is the ordered list of distinct value labels (sorted);
    ``value_map[p]`` is the value index at point ``p``; ``eigenvalues[k]``
    is the real number attached to value ``k`` (defaults to ``k + 1``).
    """

    def __init__(self, label: str, value_map: Sequence[int], values: Sequence[str],
                 eigenvalues: Optional[Sequence[float]] = None):
        self.label = str(label)
        self.values = tuple(str(v) for v in values)
        if len(set(self.values)) != len(self.values):
            raise ModelError("duplicate value labels", path=f"experiments.{label}")
        self.value_map = np.asarray(value_map, dtype=np.int64)
        used = set(self.value_map.tolist())
        if not used <= set(range(len(self.values))):
            raise ModelError("value index out of range", path=f"experiments.{label}")
        if used != set(range(len(self.values))):
            raise ModelError("some declared values are never taken",
                             path=f"experiments.{label}")
        if len(self.values) < 2:
            raise ModelError(
                "an experiment needs at least two distinct values to pose a question",
                path=f"experiments.{label}",
            )
        if eigenvalues is None:
            eigenvalues = [float(k + 1) for k in range(len(self.values))]
        if len(eigenvalues) != len(self.values):
            raise ModelError("eigenvalue count does not match value count",
                             path=f"experiments.{label}")
        self.eigenvalues = tuple(float(x) for x in eigenvalues)

    @property
    def n_values(self) -> int:
        return len(self.values)

    def blocks(self):
        """Point-index blocks per value, in value order."""
        return [np.flatnonzero(self.value_map == k) for k in range(self.n_values)]


class ExperimentCatalog:
    """Experiments plus pairwise connection elements and a reference label.

    ``connections`` maps ordered label pairs ``(a, b)`` to the group element
    index ``g_ab`` meant to satisfy ``value_b(p) = value_a(p . g_ab)`` up to
    a value relabeling.  A partial table is completed deterministically:
    g_aa = identity, g_ba = inverse(g_ab), and compositions along declared
    links; a catalog whose declared links leave some pair unreachable is a
    model error.  Correctness of every completed entry is then checked by
    the validator, never assumed.
    """

    def __init__(self, experiments: Sequence[Experiment], connections, reference: str,
                 group: FiniteGroup):
        self.experiments = {e.label: e for e in experiments}
        if len(self.experiments) != len(experiments):
            raise ModelError("duplicate experiment labels", path="experiments")
        self.labels = tuple(sorted(self.experiments))
        if reference not in self.experiments:
            raise ModelError(f"reference experiment {reference!r} not in catalog",
                             path="reference")
        self.reference = reference
        self.connections = self._complete(dict(connections), group)

    def _complete(self, declared, group: FiniteGroup):
        for (a, b) in declared:
            if a not in self.experiments or b not in self.experiments:
                raise ModelError(f"connection ({a}, {b}) names an unknown experiment",
                                 path="connections")
        table = dict(declared)
        for a in self.labels:
            table.setdefault((a, a), group.identity)
        for (a, b), g in list(table.items()):
            table.setdefault((b, a), group.inv(g))
        # close under composition until stable: g_ac = g_ab * g_bc
        changed = True
        while changed:
            changed = False
            for (a, b), gab in list(table.items()):
                for (b2, c), gbc in list(table.items()):
                    if b2 != b or (a, c) in table:
                        continue
                    table[(a, c)] = group.mul(gab, gbc)
                    table[(c, a)] = group.inv(table[(a, c)])
                    changed = True
        for a in self.labels:
            for b in self.labels:
                if (a, b) not in table:
                    raise ModelError(
                        f"no connection path between {a!r} and {b!r}",
                        path="connections",
                    )
        return table

    def __getitem__(self, label: str) -> Experiment:
        return self.experiments[label]


class ExperimentModel:
    """A group action on the state space together with an experiment catalog."""

    def __init__(self, action: GroupAction, catalog: ExperimentCatalog):
        if len(action.points) == 0:
            raise ModelError("empty state space", path="phi")
        for label in catalog.labels:
            exp = catalog[label]
            if len(exp.value_map) != len(action.points):
                raise ModelError("value map does not cover the state space",
                                 path=f"experiments.{label}")
        self.action = action
        self.catalog = catalog

    @property
    def group(self) -> FiniteGroup:
        return self.action.group

    @property
    def labels(self):
        return self.catalog.labels

    @property
    def reference(self) -> str:
        return self.catalog.reference

    def connection(self, a: str, b: str) -> int:
        return self.catalog.connections[(a, b)]


def derive_induced_subgroup(model: ExperimentModel, a: str) -> frozenset[int]:
    """Maximal element set compatible with experiment ``a``'s value partition.

    Returns all g such that points sharing a value still share a value
    after acting by g.  For a bijective action this set is automatically a
    subgroup; that is asserted exactly rather than assumed.  Emits
    :class:`TrivialSubgroupWarning` when only the identity qualifies.
    """
    exp = model.catalog[a]
    vm = exp.value_map
    group = model.group
    members = []
    for g in range(len(group)):
        moved = vm[model.action.perms[g]]
        ok = True
        for k in range(exp.n_values):
            block = moved[vm == k]
            if block.size and not np.all(block == block[0]):
                ok = False
                break
        if ok:
            members.append(g)
    result = frozenset(members)
    if not group.is_subgroup(result):
        raise AssertionError(
            f"compatible set for {a!r} is not a subgroup; broken action"
        )
    if result == {group.identity}:
        warnings.warn(
            f"induced subgroup of {a!r} is trivial", TrivialSubgroupWarning,
            stacklevel=2,
        )
    return result


def induced_value_permutation(model: ExperimentModel, a: str, g: int):
    """Value permutation sigma with value(p . g) = sigma[value(p)], for g in G^a."""
    exp = model.catalog[a]
    vm = exp.value_map
    moved = vm[model.action.perms[g]]
    sigma = np.full(exp.n_values, -1, dtype=np.int64)
    for k in range(exp.n_values):
        block = moved[vm == k]
        if not np.all(block == block[0]):
            raise ValueError(f"{model.group.elements[g]} is not compatible with {a!r}")
        sigma[k] = block[0]
    return sigma


def discover_value_bijection(model: ExperimentModel, a: str, b: str):
    """Value relabeling beta with value_b(p) = beta[value_a(p . g_ab)], or None.

    Model files keep per-experiment value names readable, so the relation
    between connected experiments is allowed to hold up to a bijection of
    value sets; this recovers it (as an index map a-value -> b-value) or
    returns None with a witness point when no consistent bijection exists.
    """
    ea, eb = model.catalog[a], model.catalog[b]
    g = model.connection(a, b)
    va = ea.value_map[model.action.perms[g]]
    vb = eb.value_map
    mapping = {}
    for p in range(len(model.action.points)):
        k = int(va[p])
        if k in mapping and mapping[k] != int(vb[p]):
            return None, model.action.points[p]
        mapping[k] = int(vb[p])
    if len(mapping) != ea.n_values or len(set(mapping.values())) != eb.n_values:
        return None, None
    if ea.n_values != eb.n_values:
        return None, None
    return mapping, None


@dataclass
class AssumptionCheck:
    check_id: str
    name: str
    status: str  # "pass" | "warning" | "fail"
    details: str
    witness: Optional[dict] = None

    def to_payload(self):
        out = {
            "id": self.check_id,
            "name": self.name,
            "status": self.status,
            "details": self.details,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class ValidationReport:
    checks: list[AssumptionCheck]
    derived: dict
    generation_status: dict

    @property
    def ok(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    @property
    def statuses(self) -> dict:
        return {c.check_id: c.status for c in self.checks}

    def to_payload(self):
        return {
            "assumptions": [c.to_payload() for c in self.checks],
            "derived": self.derived,
            "generation_status": self.generation_status,
            "ok": self.ok,
        }


def validate_assumptions(model: ExperimentModel) -> ValidationReport:
    """Check the full assumption set; failures become report entries.

    Deterministic: identical models produce identical reports.
    """
    group = model.group
    action = model.action
    catalog = model.catalog
    checks: list[AssumptionCheck] = []

    # 1. a set of mutually exclusive experiments with one parameter each
    checks.append(AssumptionCheck(
        "mutually_exclusive_experiments",
        "catalog of mutually exclusive experiments",
        "pass" if len(catalog.labels) >= 1 else "fail",
        f"{len(catalog.labels)} experiments: {', '.join(catalog.labels)}",
    ))

    # 2. every parameter is a function of the shared state and G acts on it
    total = all(
        len(catalog[a].value_map) == len(action.points) for a in catalog.labels
    )
    checks.append(AssumptionCheck(
        "total_parameter_group_action",
        "parameters are functions of the shared state space; the group acts on it",
        "pass" if total else "fail",
        f"|state space| = {len(action.points)}, |group| = {len(group)}; "
        "action verified as a right action",
    ))

    # 3. induced subgroups, nontrivial
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TrivialSubgroupWarning)
        subgroups = {a: derive_induced_subgroup(model, a) for a in catalog.labels}
    trivial = sorted(a for a, s in subgroups.items() if s == {group.identity})
    checks.append(AssumptionCheck(
        "induced_subgroups_nontrivial",
        "each experiment has a nontrivial compatible subgroup",
        "warning" if trivial else "pass",
        ("trivial for: " + ", ".join(trivial)) if trivial else
        "; ".join(f"|G^{a}| = {len(subgroups[a])}" for a in catalog.labels),
    ))

    # 4. pairwise connections transform one parameter into another
    bijections = {}
    conn_fail = None
    for a in catalog.labels:
        for b in catalog.labels:
            beta, witness = discover_value_bijection(model, a, b)
            if beta is None:
                conn_fail = {"pair": [a, b], "point": witness}
                break
            bijections[f"{a}->{b}"] = {
                catalog[a].values[k]: catalog[b].values[v] for k, v in sorted(beta.items())
            }
        if conn_fail:
            break
    checks.append(AssumptionCheck(
        "pairwise_connections",
        "a declared group element transforms each parameter into each other",
        "fail" if conn_fail else "pass",
        "no value bijection consistent with the declared element"
        if conn_fail else "value bijections recorded for all ordered pairs",
        witness=conn_fail,
    ))

    # 5. chain rule for connections
    chain_fail = None
    for a in catalog.labels:
        if catalog.connections[(a, a)] != group.identity:
            chain_fail = {"triple": [a, a, a]}
            break
        for b in catalog.labels:
            for c in catalog.labels:
                lhs = catalog.connections[(a, c)]
                rhs = group.mul(catalog.connections[(a, b)], catalog.connections[(b, c)])
                if lhs != rhs:
                    chain_fail = {
                        "triple": [a, b, c],
                        "expected": group.elements[rhs],
                        "declared": group.elements[lhs],
                    }
                    break
            if chain_fail:
                break
        if chain_fail:
            break
    checks.append(AssumptionCheck(
        "connection_chain_rule",
        "connections compose: g_ac = g_ab g_bc, g_aa = identity",
        "fail" if chain_fail else "pass",
        "chain rule violated" if chain_fail else
        f"all {len(catalog.labels) ** 3} triples verified exactly",
        witness=chain_fail,
    ))

    # 6. finitely many values, at least two
    counts = {a: catalog[a].n_values for a in catalog.labels}
    checks.append(AssumptionCheck(
        "finite_parameter_values",
        "each parameter takes finitely many (>= 2) values",
        "pass",
        "; ".join(f"{a}: {counts[a]}" for a in catalog.labels),
    ))

    # 7-9. realized trivially by finiteness
    checks.append(AssumptionCheck(
        "state_space_locally_compact",
        "the state space is locally compact",
        "pass",
        "finite spaces are compact",
    ))
    checks.append(AssumptionCheck(
        "invariant_measure",
        "a right-invariant measure exists on the state space",
        "pass",
        "counting measure is invariant under every permutation action",
    ))
    checks.append(AssumptionCheck(
        "group_compact",
        "the group is compact",
        "pass",
        f"finite group of order {len(group)}",
    ))

    # 10. the induced subgroups generate the group
    union = set()
    for s in subgroups.values():
        union |= s
    generated = group.closure(union)
    covers = len(generated) == len(group)
    checks.append(AssumptionCheck(
        "subgroups_generate_group",
        "the induced subgroups generate the whole group",
        "pass" if covers else "warning",
        f"generated order {len(generated)} of {len(group)}",
    ))

    block_sizes = {
        a: {catalog[a].values[k]: int(b.size) for k, b in enumerate(catalog[a].blocks())}
        for a in catalog.labels
    }
    derived = {
        "induced_subgroup_orders": {a: len(subgroups[a]) for a in catalog.labels},
        "induced_subgroups": {
            a: [group.elements[i] for i in sorted(subgroups[a])] for a in catalog.labels
        },
        "block_sizes": block_sizes,
        "value_bijections": bijections,
    }
    generation_status = {
        "generated_order": len(generated),
        "group_order": len(group),
        "covers": covers,
    }
    return ValidationReport(checks, derived, generation_status)


def generated_domain(model: ExperimentModel):
    """Subgroup generated by all induced subgroups, with the subgroup map."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TrivialSubgroupWarning)
        subgroups = {a: derive_induced_subgroup(model, a) for a in model.labels}
    union = set()
    for s in subgroups.values():
        union |= s
    return model.group.closure(union), subgroups


def word_for(model: ExperimentModel, g: int, subgroups=None):
    """Shortest word for ``g`` over the induced subgroups, in label order."""
    if subgroups is None:
        _, subgroups = generated_domain(model)
    sets = [(a, subgroups[a]) for a in model.labels]
    return word_decompose(model.group, g, sets)
