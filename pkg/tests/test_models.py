"""Model semantics: induced subgroups, value bijections, assumption checks."""

import numpy as np
import pytest

from epiquant import (
    Experiment,
    ExperimentCatalog,
    ExperimentModel,
    FiniteGroup,
    GroupAction,
    validate_assumptions,
)
from epiquant.errors import ModelError, TrivialSubgroupWarning
from epiquant.models import derive_induced_subgroup, discover_value_bijection


def brute_force_compatible_set(model, a):
    """Independent oracle: scan all (g, p1, p2) triples directly."""
    exp = model.catalog[a]
    vm = exp.value_map
    n_points = len(model.action.points)
    members = []
    for g in range(len(model.group)):
        ok = True
        for p1 in range(n_points):
            for p2 in range(n_points):
                if vm[p1] == vm[p2]:
                    q1 = model.action.perms[g, p1]
                    q2 = model.action.perms[g, p2]
                    if vm[q1] != vm[q2]:
                        ok = False
                        break
            if not ok:
                break
        if ok:
            members.append(g)
    return frozenset(members)


class TestInducedSubgroups:
    def test_triangle_order_three(self, triangle6_model):
        for a in triangle6_model.labels:
            sub = derive_induced_subgroup(triangle6_model, a)
            assert sub == brute_force_compatible_set(triangle6_model, a)
            assert len(sub) == 3
            names = {triangle6_model.group.elements[g] for g in sub}
            assert names == {"r0", "r120", "r240"}

    def test_spin3_order_four(self, spin3_model):
        for a in spin3_model.labels:
            sub = derive_induced_subgroup(spin3_model, a)
            assert sub == brute_force_compatible_set(spin3_model, a)
            assert len(sub) == 4

    def test_subgroup_closure_exact(self, spin3_model, triangle6_model):
        for model in (spin3_model, triangle6_model):
            for a in model.labels:
                sub = derive_induced_subgroup(model, a)
                grp = model.group
                for x in sub:
                    assert grp.inv(x) in sub
                    for y in sub:
                        assert grp.mul(x, y) in sub

    def test_injective_value_map_gives_full_group(self):
        # every element preserves a partition into singletons
        grp = FiniteGroup(["e", "a", "b"], [[0, 1, 2], [1, 2, 0], [2, 0, 1]])
        act = GroupAction(grp, ["x", "y", "z"],
                          [[0, 1, 2], [1, 2, 0], [2, 0, 1]])
        exp = Experiment("inj", [0, 1, 2], ["u", "v", "w"])
        cat = ExperimentCatalog([exp], {}, "inj", grp)
        model = ExperimentModel(act, cat)
        assert derive_induced_subgroup(model, "inj") == frozenset(range(3))

    def test_trivial_subgroup_warns(self):
        # 4 points, C2 acting by a double transposition that breaks the
        # 3/1 value split: only the identity is compatible
        grp = FiniteGroup(["e", "s"], [[0, 1], [1, 0]])
        act = GroupAction(grp, ["p0", "p1", "p2", "p3"],
                          [[0, 1, 2, 3], [1, 0, 3, 2]])
        exp = Experiment("q", [0, 0, 0, 1], ["lo", "hi"])
        cat = ExperimentCatalog([exp], {}, "q", grp)
        model = ExperimentModel(act, cat)
        with pytest.warns(TrivialSubgroupWarning):
            sub = derive_induced_subgroup(model, "q")
        assert sub == frozenset({0})


class TestValueBijections:
    def test_spin3_identity_bijection(self, spin3_model):
        beta, witness = discover_value_bijection(spin3_model, "d0", "d60")
        assert witness is None
        assert beta == {0: 0, 1: 1}

    def test_block_transport_equality(self, spin3_model, triangle6_model):
        # {p : value_b(p) = beta(v)} must equal {p : value_a(p g_ab) = v}
        for model in (spin3_model, triangle6_model):
            for a in model.labels:
                for b in model.labels:
                    beta, _ = discover_value_bijection(model, a, b)
                    assert beta is not None
                    g = model.connection(a, b)
                    va = model.catalog[a].value_map[model.action.perms[g]]
                    vb = model.catalog[b].value_map
                    for k, image in beta.items():
                        left = set(np.flatnonzero(vb == image).tolist())
                        right = set(np.flatnonzero(va == k).tolist())
                        assert left == right


class TestValidation:
    def test_spin3_all_pass(self, spin3_model):
        report = validate_assumptions(spin3_model)
        assert len(report.checks) == 10
        assert all(c.status == "pass" for c in report.checks)
        assert report.generation_status["covers"]

    def test_triangle_generation_warning_only(self, triangle6_model):
        report = validate_assumptions(triangle6_model)
        statuses = report.statuses
        assert statuses["subgroups_generate_group"] == "warning"
        others = {k: v for k, v in statuses.items()
                  if k != "subgroups_generate_group"}
        assert set(others.values()) == {"pass"}
        assert report.generation_status == {
            "generated_order": 3, "group_order": 12, "covers": False}

    def test_bad_chain_rule_named_triple(self, triangle6_model):
        # rebuild the triangle catalog with one corrupted connection
        model = triangle6_model
        grp = model.group
        conns = dict(model.catalog.connections)
        conns[("w2", "w3")] = grp.index("r30")  # breaks g_13 = g_12 g_23
        exps = [model.catalog[a] for a in model.labels]
        broken = ExperimentModel(
            model.action, ExperimentCatalog(exps, conns, "w1", grp))
        report = validate_assumptions(broken)
        chain = next(c for c in report.checks
                     if c.check_id == "connection_chain_rule")
        assert chain.status == "fail"
        assert chain.witness is not None
        assert len(chain.witness["triple"]) == 3
        assert not report.ok

    def test_report_deterministic(self, spin3_model):
        r1 = validate_assumptions(spin3_model)
        r2 = validate_assumptions(spin3_model)
        assert r1.to_payload() == r2.to_payload()

    def test_derived_facts(self, spin3_model):
        report = validate_assumptions(spin3_model)
        assert report.derived["induced_subgroup_orders"] == {
            "d0": 4, "d60": 4, "d120": 4}
        assert report.derived["block_sizes"]["d0"] == {"+1": 6, "-1": 6}


class TestExperimentInvariants:
    def test_single_valued_experiment_rejected(self):
        with pytest.raises(ModelError, match="two distinct values"):
            Experiment("flat", [0, 0], ["only"])

    def test_default_eigenvalues_are_indices(self):
        exp = Experiment("e", [0, 1, 2], ["A", "B", "C"])
        assert exp.eigenvalues == (1.0, 2.0, 3.0)

    def test_unused_declared_value_rejected(self):
        with pytest.raises(ModelError, match="never taken"):
            Experiment("e", [0, 0, 1], ["A", "B", "C"])
