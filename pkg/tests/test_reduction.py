"""Wide parameters, cartesian totals, naturality, orbit reduction."""

import numpy as np
import pytest

from epiquant import (
    CartesianTotal,
    FiniteGroup,
    GroupAction,
    WideParameter,
    admissible_values,
    model_from_data,
    natural_function_check,
    orbit_reduce,
    realized_tuples,
    reduce_model_data,
)
from epiquant.errors import (
    ActionMismatch,
    EmptyRestriction,
    ModelError,
    NoOrbitSelected,
)


def c2():
    return FiniteGroup(["e", "m"], [[0, 1], [1, 0]])


def signed_magnitudes():
    """Range {-2, -1, +1, +2} with a sign-preserving, magnitude-mixing swap."""
    group = c2()
    return WideParameter("theta", ["-2", "-1", "+1", "+2"],
                         {0: [0, 1, 2, 3], 1: [1, 0, 3, 2]}, group), group


class TestWideParameter:
    def test_from_experiment_matches_value_orbits(self, spin3_model):
        wide = WideParameter.from_experiment(spin3_model, "d0")
        assert wide.values == ("+1", "-1")
        # the half-turn swaps the signs, so the range is one orbit
        assert wide.orbits() == [(0, 1)]

    def test_invalid_domain_rejected(self):
        group = c2()
        with pytest.raises(ActionMismatch, match="subgroup"):
            WideParameter("t", ["a", "b"], {1: [1, 0]}, group)

    def test_action_law_enforced(self):
        group = FiniteGroup(["e", "r", "r2"],
                            [[0, 1, 2], [1, 2, 0], [2, 0, 1]])
        # r acts by a transposition: r*r = r2 would have to act by the
        # identity, but r2 is declared with a 3-cycle
        with pytest.raises(ActionMismatch, match="right-action"):
            WideParameter("t", ["a", "b", "c"],
                          {0: [0, 1, 2], 1: [1, 0, 2], 2: [1, 2, 0]}, group)


class TestCartesianTotal:
    def test_single_factor_isomorphic(self):
        wide, group = signed_magnitudes()
        total = CartesianTotal([wide], group)
        assert len(total.points) == 4
        recovered = total.project(0)
        for g, perm in recovered.items():
            assert np.array_equal(perm, wide.perms[g])

    def test_two_binary_factors_trivial_action(self):
        group = FiniteGroup(["e"], [[0]])
        f1 = WideParameter("x", ["0", "1"], {0: [0, 1]}, group)
        f2 = WideParameter("y", ["0", "1"], {0: [0, 1]}, group)
        total = CartesianTotal([f1, f2], group)
        assert len(total.points) == 4
        from epiquant.groups import orbits
        parts = orbits(total.action, {0})
        assert parts == [(0,), (1,), (2,), (3,)]

    def test_mixed_groups_rejected(self):
        wide, group = signed_magnitudes()
        other = c2()
        f2 = WideParameter("u", ["a", "b"], {0: [0, 1], 1: [1, 0]}, other)
        with pytest.raises(ActionMismatch, match="different group"):
            CartesianTotal([wide, f2], group)

    def test_spin3_realized_subset(self, spin3_model):
        """Brute-force enumeration over the 12 points gives 6 of 8 triples."""
        factors = [WideParameter.from_experiment(spin3_model, a)
                   for a in spin3_model.labels]
        total = CartesianTotal(factors, spin3_model.group)
        assert len(total.points) == 8
        realized = realized_tuples(spin3_model)
        assert len(realized) == 6
        # independent recount straight from the value maps
        recount = set()
        for p in range(12):
            recount.add(tuple(int(spin3_model.catalog[a].value_map[p])
                              for a in spin3_model.labels))
        assert realized == recount
        psi = [t for t in total.points if t in realized]
        assert len(psi) == 6


class TestAdmissibleValues:
    def test_full_restriction_gives_full_range(self, spin3_model):
        factors = [WideParameter.from_experiment(spin3_model, a)
                   for a in spin3_model.labels]
        total = CartesianTotal(factors, spin3_model.group)
        for i in range(3):
            assert admissible_values(total, total.points, i) == ["+1", "-1"]

    def test_singleton_restriction(self, spin3_model):
        factors = [WideParameter.from_experiment(spin3_model, a)
                   for a in spin3_model.labels]
        total = CartesianTotal(factors, spin3_model.group)
        psi = [total.points[0]]
        for i in range(3):
            assert len(admissible_values(total, psi, i)) == 1

    def test_spin3_both_signs_admissible(self, spin3_model):
        factors = [WideParameter.from_experiment(spin3_model, a)
                   for a in spin3_model.labels]
        total = CartesianTotal(factors, spin3_model.group)
        psi = [t for t in total.points if t in realized_tuples(spin3_model)]
        for i in range(3):
            assert admissible_values(total, psi, i) == ["+1", "-1"]

    def test_empty_restriction_rejected(self, spin3_model):
        factors = [WideParameter.from_experiment(spin3_model, a)
                   for a in spin3_model.labels]
        total = CartesianTotal(factors, spin3_model.group)
        with pytest.raises(EmptyRestriction):
            admissible_values(total, [], 0)


class TestNaturalFunction:
    def test_constant_function_natural(self, spin3_model):
        ok, witness = natural_function_check(lambda p: 0, spin3_model.action)
        assert ok and witness is None

    def test_injective_function_natural(self, spin3_model):
        ok, _ = natural_function_check(list(range(12)), spin3_model.action)
        assert ok

    def test_first_coordinate_under_swap_fails(self):
        group = c2()
        action = GroupAction(group, ["00", "01", "10", "11"],
                             [[0, 1, 2, 3], [0, 2, 1, 3]])
        ok, witness = natural_function_check([0, 0, 1, 1], action)
        assert not ok
        assert witness == {"p1": "00", "p2": "01", "g": "m"}


class TestOrbitReduce:
    def test_sign_reduction(self):
        wide, _ = signed_magnitudes()
        assert wide.orbits() == [(0, 1), (2, 3)]
        reduced = orbit_reduce(wide, [0, 1])
        assert reduced.reduced_values == ("-2|-1", "+1|+2")
        assert reduced.value_map == {
            "-2": "-2|-1", "-1": "-2|-1", "+1": "+1|+2", "+2": "+1|+2"}

    def test_partial_selection_excludes_values(self):
        wide, _ = signed_magnitudes()
        reduced = orbit_reduce(wide, [1])
        assert set(reduced.value_map) == {"+1", "+2"}

    def test_selection_validated(self):
        wide, _ = signed_magnitudes()
        with pytest.raises(NoOrbitSelected):
            orbit_reduce(wide, [])
        with pytest.raises(NoOrbitSelected):
            orbit_reduce(wide, [5])

    def test_reduced_map_is_natural(self):
        wide, group = signed_magnitudes()
        reduced = orbit_reduce(wide, [0, 1])
        action = GroupAction(group, wide.values,
                             [wide.perms[0], wide.perms[1]])
        fmap = [reduced.value_map[v] for v in wide.values]
        ok, witness = natural_function_check(fmap, action)
        assert ok, witness

    def test_transitive_range_reduces_to_single_value(self, spin3_model):
        # select-all on a transitive range gives a one-valued experiment,
        # which the model loader then rejects
        data, reduced = reduce_model_data(spin3_model, "d0", [0])
        assert reduced.reduced_values == ("+1|-1",)
        with pytest.raises(ModelError, match="two distinct values"):
            model_from_data(data)

    def test_dropping_realized_values_rejected(self, spin3_model):
        wide = WideParameter.from_experiment(spin3_model, "d60")
        assert wide.orbits() == [(0, 1)]  # transitive: nothing to drop
        with pytest.raises(NoOrbitSelected, match="out of range"):
            reduce_model_data(spin3_model, "d60", [1])

    def test_projection_recovers_factor(self, spin3_model):
        factors = [WideParameter.from_experiment(spin3_model, a)
                   for a in spin3_model.labels]
        total = CartesianTotal(factors, spin3_model.group)
        for i, factor in enumerate(factors):
            recovered = total.project(i)
            for g in total.domain:
                assert np.array_equal(recovered[g], factor.perms[g])
