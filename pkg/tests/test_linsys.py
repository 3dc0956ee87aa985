"""Constraint system: matrix layout, exact rank, and the two solvers."""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from eprb.behavior import validate
from eprb.linsys import (
    DEPENDENT_POSITIONS,
    FREE_POSITIONS,
    ConstraintMatrix,
    DependentSet,
    FreeSet,
    behavior_from_free_set,
    build_matrix,
    check_feasible,
    combine,
    rank,
    solve_dependent,
    solve_dependent_generic,
)

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0

HARDY_OPTIMUM = FreeSet(
    p1=GOLDEN ** -3,
    p4=0.0,
    p5=0.0,
    p8=GOLDEN ** -4,
    p9=0.0,
    p12=GOLDEN ** -4,
    p14=GOLDEN ** -4,
    p15=GOLDEN ** -4,
)

free_floats = st.floats(0.0, 1.0)
free_sets = st.builds(FreeSet, *([free_floats] * 8))


class TestMatrix:
    def test_dimensions_and_rhs(self):
        m = build_matrix()
        assert len(m.rows) == 12
        assert all(len(r) == 16 for r in m.rows)
        assert m.rhs == (1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0)
        assert all(c in (-1, 0, 1) for row in m.rows for c in row)

    def test_first_row_is_first_block_normalization(self):
        row = build_matrix().rows[0]
        assert row == (1, 1, 1, 1) + (0,) * 12

    def test_fifth_row_equates_a1_plus_marginals(self):
        row = build_matrix().rows[4]
        expected = [0] * 16
        expected[0] = expected[1] = 1
        expected[4] = expected[5] = -1
        assert row == tuple(expected)

    def test_last_row_equates_b2_minus_marginals(self):
        row = build_matrix().rows[11]
        expected = [0] * 16
        expected[5] = expected[7] = 1
        expected[13] = expected[15] = -1
        assert row == tuple(expected)

    def test_uniform_box_satisfies_every_row(self):
        residuals = build_matrix().residuals((0.25,) * 16)
        assert residuals == (0.0,) * 12

    def test_shape_is_enforced(self):
        with pytest.raises(ValueError):
            ConstraintMatrix(build_matrix().rows[:11], build_matrix().rhs[:11])


class TestRank:
    def test_full_system_has_rank_8(self):
        assert rank(build_matrix()) == 8

    def test_normalization_rows_alone_have_rank_4(self):
        assert rank(build_matrix().rows[:4]) == 4

    def test_duplicated_row_adds_nothing(self):
        rows = list(build_matrix().rows)
        rows.append(rows[0])
        assert rank(rows) == 8

    def test_identity_like(self):
        assert rank([[1, 0], [0, 1], [1, 1]]) == 2
        assert rank([[0, 0], [0, 0]]) == 0


class TestSolve:
    def test_all_half_free_gives_zero_dependent(self):
        assert solve_dependent(FreeSet.constant(0.5)).as_tuple() == (0.0,) * 8

    def test_all_zero_free_gives_half_dependent(self):
        assert solve_dependent(FreeSet.constant(0.0)).as_tuple() == (0.5,) * 8

    def test_quantum_extremal_value(self):
        high = (2.0 + math.sqrt(2.0)) / 8.0
        solved = solve_dependent(FreeSet.constant(high))
        for value in solved.as_tuple():
            assert value == pytest.approx(0.5 - high, abs=1e-15)

    def test_uniform_is_a_fixed_point(self):
        assert solve_dependent(FreeSet.constant(0.25)).as_tuple() == (0.25,) * 8

    def test_hardy_optimum_witness(self):
        solved = solve_dependent(HARDY_OPTIMUM)
        assert solved.p13 == pytest.approx(GOLDEN ** -5, abs=1e-15)

    def test_combined_behavior_validates(self):
        b = behavior_from_free_set(FreeSet.constant(0.25))
        assert validate(b).all_passed

    def test_combine_places_entries(self):
        free = FreeSet(*[i / 100 for i in range(8)])
        dep = DependentSet(*[i / 10 for i in range(8)])
        b = combine(free, dep)
        for pos, v in zip(FREE_POSITIONS, free.as_tuple()):
            assert b.p(pos) == v
        for pos, v in zip(DEPENDENT_POSITIONS, dep.as_tuple()):
            assert b.p(pos) == v

    @given(free_sets)
    def test_substitution_residual_tiny(self, free):
        b = combine(free, solve_dependent(free))
        worst = max(abs(r) for r in build_matrix().residuals(b.probs))
        assert worst < 1e-12

    @given(free_sets)
    def test_closed_form_matches_generic_elimination(self, free):
        closed = solve_dependent(free).as_tuple()
        generic = solve_dependent_generic(free).as_tuple()
        assert max(abs(a - b) for a, b in zip(closed, generic)) < 1e-12

    @given(free_sets, free_sets, st.floats(0.0, 1.0))
    def test_solution_is_affine(self, u1, u2, alpha):
        mixed = FreeSet(
            *(
                alpha * a + (1.0 - alpha) * b
                for a, b in zip(u1.as_tuple(), u2.as_tuple())
            )
        )
        direct = solve_dependent(mixed).as_tuple()
        blended = tuple(
            alpha * a + (1.0 - alpha) * b
            for a, b in zip(solve_dependent(u1).as_tuple(), solve_dependent(u2).as_tuple())
        )
        assert max(abs(a - b) for a, b in zip(direct, blended)) < 1e-12

    @given(free_sets)
    def test_witness_relation_restates_its_closed_form(self, free):
        solved = solve_dependent(free)
        lhs = 2.0 * solved.p13 - 1.0
        rhs = (
            free.p4
            + free.p5
            + free.p9
            - free.p1
            - free.p8
            - free.p12
            - free.p14
            - free.p15
        )
        assert abs(lhs - rhs) < 1e-15


class TestFeasibility:
    def test_hardy_optimum_all_pass(self):
        report = check_feasible(HARDY_OPTIMUM)
        assert report.all_passed
        solved = solve_dependent(HARDY_OPTIMUM)
        assert 2.0 * solved.p13 - 1.0 < 0.0 <= HARDY_OPTIMUM.p4 + HARDY_OPTIMUM.p5 + HARDY_OPTIMUM.p9

    def test_all_half_saturates_free_total(self):
        report = check_feasible(FreeSet.constant(0.5))
        assert report.all_passed
        assert report.check("free total <= 4").residual == 0.0
        assert sum(FreeSet.constant(0.5).as_tuple()) == 4.0

    def test_pair_sum_violation(self):
        free = FreeSet(p1=1.0, p4=0.0, p5=0.0, p8=1.0, p9=0.0, p12=0.0, p14=0.0, p15=0.0)
        report = check_feasible(free)
        assert not report.all_passed
        assert report.check("p1+p8 <= 1").residual == pytest.approx(1.0, abs=0)

    def test_out_of_range_input_is_a_precondition_error(self):
        with pytest.raises(ValueError, match="outside"):
            check_feasible(FreeSet.constant(1.5))

    def test_subset_sum_flag_adds_checks(self):
        base = check_feasible(FreeSet.constant(0.25))
        full = check_feasible(FreeSet.constant(0.25), all_subset_sums=True)
        assert len(full.checks) == len(base.checks) + 255
        assert full.all_passed

    def test_bound_checks_catch_negative_dependent(self):
        # push the solved witness negative: large complement, empty targets
        free = FreeSet(p1=1.0, p4=0.0, p5=0.0, p8=1.0, p9=0.0, p12=1.0, p14=1.0, p15=1.0)
        report = check_feasible(free)
        assert not report.check("bounds p13").passed
        assert not report.check("p1+p8+p12+p14+p15 <= 1+p4+p5+p9").passed


class TestOctetParsing:
    def test_free_set_round_trip(self):
        free = FreeSet(*[i / 10 for i in range(8)])
        assert FreeSet.from_dict(free.to_dict()) == free

    def test_free_set_rejects_missing_and_unknown(self):
        from eprb.behavior import BehaviorFormatError

        with pytest.raises(BehaviorFormatError, match="missing"):
            FreeSet.from_dict({"p1": 0.5})
        data = FreeSet.constant(0.5).to_dict()
        data["p2"] = 0.1
        with pytest.raises(BehaviorFormatError, match="unknown"):
            FreeSet.from_dict(data)

    def test_from_behavior_extracts_octets(self):
        b = behavior_from_free_set(HARDY_OPTIMUM)
        assert FreeSet.from_behavior(b) == HARDY_OPTIMUM
        assert DependentSet.from_behavior(b) == solve_dependent(HARDY_OPTIMUM)
