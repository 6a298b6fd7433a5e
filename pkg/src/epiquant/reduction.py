"""Wide parameters, cartesian totals, and orbit-based model reduction.

A wide parameter carries a value range acted on by a subgroup; the
cartesian total of several wide parameters is the tuple space under the
componentwise action of the common subgroup.  Reduction restricts a
parameter's range to orbits, which keeps the value map compatible with
the group (natural in the checked sense).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np

from .errors import ActionMismatch, EmptyRestriction, NoOrbitSelected
from .groups import FiniteGroup, GroupAction, orbits_of_permutation_action
from .models import ExperimentModel, derive_induced_subgroup, induced_value_permutation


def subgroup_as_group(group: FiniteGroup, members) -> tuple[FiniteGroup, dict]:
    """A subgroup reindexed as its own group; returns (group, old->new map)."""
    members = sorted(set(members))
    index = {g: i for i, g in enumerate(members)}
    names = [group.elements[g] for g in members]
    table = [[index[group.mul(a, b)] for b in members] for a in members]
    return FiniteGroup(names, table), index


class WideParameter:
    """A value range with a right action of a subgroup on it.

    ``action`` maps element indices (of the shared group) to permutations
    of range indices; its domain must be a subgroup and the permutations
    must compose according to the right-action law.
    """

    def __init__(self, experiment: str, values: Sequence[str], action: dict,
                 group: FiniteGroup):
        self.experiment = experiment
        self.values = tuple(str(v) for v in values)
        self.group = group
        domain = sorted(action)
        if not group.is_subgroup(domain):
            raise ActionMismatch(f"action domain for {experiment!r} is not a subgroup")
        self.domain = tuple(domain)
        perms = {}
        n = len(self.values)
        for g in domain:
            row = np.asarray(action[g], dtype=np.int64)
            if sorted(row.tolist()) != list(range(n)):
                raise ActionMismatch(
                    f"element {group.elements[g]} does not permute the range")
            perms[g] = row
        if not np.array_equal(perms[group.identity], np.arange(n)):
            raise ActionMismatch("identity must act trivially on the range")
        for g in domain:
            for h in domain:
                gh = group.mul(g, h)
                if not np.array_equal(perms[gh], perms[h][perms[g]]):
                    raise ActionMismatch(
                        f"range action violates the right-action law at "
                        f"({group.elements[g]}, {group.elements[h]})")
        self.perms = perms

    @classmethod
    def from_experiment(cls, model: ExperimentModel, a: str) -> "WideParameter":
        """The value range of experiment ``a`` under its induced subgroup."""
        sub = derive_induced_subgroup(model, a)
        action = {g: induced_value_permutation(model, a, g) for g in sorted(sub)}
        return cls(a, model.catalog[a].values, action, model.group)

    def orbits(self):
        rows = [self.perms[g] for g in self.domain]
        return orbits_of_permutation_action(rows, len(self.values))


class CartesianTotal:
    """Tuple space of several wide parameters under the shared subgroup.

    The acting set is the intersection of the factors' domains (itself a
    subgroup); the action is componentwise.  ``action`` exposes the result
    as a plain group action of the reindexed subgroup on tuple points.
    """

    def __init__(self, factors: Sequence[WideParameter], group: FiniteGroup):
        if not factors:
            raise ActionMismatch("need at least one factor")
        for f in factors:
            if f.group is not group:
                raise ActionMismatch(
                    f"factor {f.experiment!r} carries an action of a different group")
        self.factors = tuple(factors)
        self.group = group
        domain = set(factors[0].domain)
        for f in factors[1:]:
            domain &= set(f.domain)
        self.domain = tuple(sorted(domain))
        if not group.is_subgroup(self.domain):
            raise ActionMismatch("intersection of factor domains is not a subgroup")

        self.points = tuple(product(*[range(len(f.values)) for f in factors]))
        self._point_index = {p: i for i, p in enumerate(self.points)}
        sub, index = subgroup_as_group(group, self.domain)
        perms = []
        for g in self.domain:
            row = [
                self._point_index[tuple(int(f.perms[g][p[i]])
                                        for i, f in enumerate(factors))]
                for p in self.points
            ]
            perms.append(row)
        self.action = GroupAction(sub, [self.point_name(p) for p in self.points], perms)

    def point_name(self, point: tuple) -> str:
        return "(" + ",".join(self.factors[i].values[v]
                              for i, v in enumerate(point)) + ")"

    def project(self, factor_index: int):
        """Range permutations recovered from the tuple action for one factor."""
        f = self.factors[factor_index]
        return {g: f.perms[g] for g in self.domain}


def realized_tuples(model: ExperimentModel) -> set:
    """Value-index tuples (in sorted label order) realized by some point."""
    labels = model.labels
    maps = [model.catalog[a].value_map for a in labels]
    return {tuple(int(vm[p]) for vm in maps)
            for p in range(len(model.action.points))}


def admissible_values(total: CartesianTotal, psi, factor_index: int):
    """Values of one coordinate realized within the restriction ``psi``."""
    psi = list(psi)
    if not psi:
        raise EmptyRestriction("the restricted tuple set is empty")
    factor = total.factors[factor_index]
    return sorted({factor.values[p[factor_index]] for p in psi})


def natural_function_check(f, action: GroupAction):
    """Exhaustively test f(p1) == f(p2) implies f(p1 g) == f(p2 g).

    ``f`` maps point indices to labels (sequence or callable).  Returns
    (True, None) or (False, witness) with witness naming (p1, p2, g).
    """
    n = len(action.points)
    fv = [f(p) if callable(f) else f[p] for p in range(n)]
    for p1 in range(n):
        for p2 in range(p1 + 1, n):
            if fv[p1] != fv[p2]:
                continue
            for g in range(len(action.group)):
                q1 = action.perms[g, p1]
                q2 = action.perms[g, p2]
                if fv[q1] != fv[q2]:
                    return False, {
                        "p1": action.points[p1],
                        "p2": action.points[p2],
                        "g": action.group.elements[g],
                    }
    return True, None


@dataclass
class ReducedExperiment:
    """A parameter restricted to selected orbits of its range action.

    ``value_map`` sends each range value inside a selected orbit to its
    orbit label; values outside the selection are absent.
    """

    source: WideParameter
    selected_orbits: tuple
    orbit_labels: tuple
    value_map: dict

    @property
    def reduced_values(self):
        return tuple(self.orbit_labels)


def orbit_label(wide: WideParameter, orbit) -> str:
    return "|".join(wide.values[v] for v in orbit)


def orbit_reduce(wide: WideParameter, selected_orbits: Sequence[int]) -> ReducedExperiment:
    """Restrict a wide parameter's range to the chosen orbits.

    ``selected_orbits`` indexes the canonical orbit partition of the range.
    """
    parts = wide.orbits()
    chosen = sorted(set(selected_orbits))
    if not chosen:
        raise NoOrbitSelected("no orbits selected")
    for idx in chosen:
        if not 0 <= idx < len(parts):
            raise NoOrbitSelected(
                f"orbit index {idx} out of range (have {len(parts)} orbits)")
    labels = tuple(orbit_label(wide, parts[i]) for i in chosen)
    vmap = {}
    for pos, i in enumerate(chosen):
        for v in parts[i]:
            vmap[wide.values[v]] = labels[pos]
    return ReducedExperiment(wide, tuple(chosen), labels, vmap)


def reduce_model_data(model: ExperimentModel, factor: str,
                      selected_orbits: Sequence[int]):
    """Model-file data with one experiment's values collapsed to orbit labels.

    Returns ``(data, reduced)``: the model-file dict and the underlying
    :class:`ReducedExperiment`.  The selection must cover every value the
    experiment realizes, so the state space, group, and connections carry
    over unchanged; only the value labels (and their default eigenvalues)
    change.
    """
    from .modelfile import model_to_data  # local import to avoid a cycle

    wide = WideParameter.from_experiment(model, factor)
    reduced = orbit_reduce(wide, selected_orbits)
    exp = model.catalog[factor]
    missing = [v for v in exp.values if v not in reduced.value_map]
    if missing:
        raise NoOrbitSelected(
            "selection drops realized values: " + ", ".join(missing)
            + "; select orbits covering the whole realized range")
    data = model_to_data(model)
    values = data["experiments"][factor]["values"]
    data["experiments"][factor]["values"] = {
        p: reduced.value_map[v] for p, v in values.items()
    }
    del data["experiments"][factor]["eigenvalues"]
    return data, reduced
