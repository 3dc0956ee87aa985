"""Behavior table construction, validation checks, and CHSH quantities."""

import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from eprb.behavior import (
    Behavior,
    BehaviorFormatError,
    CorrelationVector,
    chsh_delta,
    correlation,
    validate,
)
from eprb.boxes import pr_box, quantum_extremal_box, uniform_box
from eprb.quantum import QuantumModel, behavior_from_model

# Block (a1,b1) concentrated on (+,+), block (a1,b2) on (+,-): the A-side
# rates agree across B's settings, but B's outcome rates flip with A's
# choice wired in, so both B-side marginal checks fail by 1/2.
SIGNALING_BOX = Behavior.from_blocks(
    [
        (1.0, 0.0, 0.0, 0.0),
        (0.0, 1.0, 0.0, 0.0),
        (0.25, 0.25, 0.25, 0.25),
        (0.25, 0.25, 0.25, 0.25),
    ]
)


@st.composite
def normalized_behaviors(draw):
    raw = draw(
        st.lists(st.floats(1e-3, 1.0), min_size=16, max_size=16)
    )
    probs = []
    for b in range(4):
        block = raw[4 * b:4 * b + 4]
        total = sum(block)
        probs.extend(v / total for v in block)
    return Behavior(tuple(probs))


class TestConstruction:
    def test_needs_16_entries(self):
        with pytest.raises(BehaviorFormatError):
            Behavior((0.25,) * 15)

    def test_rejects_non_finite(self):
        probs = [0.25] * 16
        probs[7] = math.nan
        with pytest.raises(BehaviorFormatError):
            Behavior(tuple(probs))

    def test_flat_dict_missing_key(self):
        data = {f"p{i}": 0.25 for i in range(1, 16)}
        with pytest.raises(BehaviorFormatError, match="p16"):
            Behavior.from_flat_dict(data)

    def test_structural_error_distinct_from_failed_check(self):
        # a constraint-violating behavior still constructs; only the
        # report flags it
        bad = Behavior((0.7,) * 16)
        report = validate(bad)
        assert not report.all_passed
        with pytest.raises(BehaviorFormatError):
            Behavior.from_json("{not json")

    def test_out_of_range_entries_are_constructible(self):
        b = Behavior((-0.5,) + (0.1,) * 15)
        assert b.p(1) == -0.5

    def test_flat_positions(self):
        b = Behavior(tuple(float(i) for i in range(1, 17)))
        assert b.prob(1, 1, 1, 1) == 1.0
        assert b.prob(1, 1, 1, -1) == 2.0
        assert b.prob(1, 1, -1, 1) == 3.0
        assert b.prob(2, 2, -1, -1) == 16.0
        assert b.block(2, 1) == (9.0, 10.0, 11.0, 12.0)


class TestValidate:
    def test_uniform_box_all_pass_zero_residuals(self):
        report = validate(uniform_box())
        assert report.all_passed
        assert all(c.residual == 0.0 for c in report.checks)
        assert len(report.checks) == 24

    def test_pr_box_passes(self):
        report = validate(pr_box())
        assert report.all_passed
        assert all(c.residual == 0.0 for c in report.checks)

    def test_signaling_box_b_side_fails(self):
        report = validate(SIGNALING_BOX)
        assert report.check("no-signaling a1").passed
        assert report.check("no-signaling a2").passed
        assert report.check("no-signaling b1").residual == pytest.approx(0.5, abs=0)
        assert report.check("no-signaling b2").residual == pytest.approx(0.5, abs=0)
        assert not report.check("no-signaling b1").passed
        for j, k in ((1, 1), (1, 2), (2, 1), (2, 2)):
            assert report.check(f"normalization a{j}b{k}").passed
        failed = {c.name for c in report.failures()}
        assert failed == {"no-signaling b1", "no-signaling b2"}

    def test_bounds_check_catches_out_of_range(self):
        probs = [0.25] * 16
        probs[0] = 1.25
        report = validate(Behavior(tuple(probs)))
        assert report.check("bounds p1").residual == pytest.approx(0.25)
        assert not report.all_passed

    def test_tolerance_must_be_positive(self):
        with pytest.raises(ValueError):
            validate(uniform_box(), tol=0.0)

    def test_report_dict_shape(self):
        d = validate(uniform_box()).to_dict()
        assert d["passed"] is True
        assert {c["status"] for c in d["checks"]} == {"pass"}


class TestCorrelation:
    def test_pr_box_blocks(self):
        b = pr_box()
        assert correlation(b, 1, 1) == 1.0
        assert correlation(b, 1, 2) == 1.0
        assert correlation(b, 2, 1) == 1.0
        assert correlation(b, 2, 2) == -1.0

    def test_uniform_zero(self):
        for j in (1, 2):
            for k in (1, 2):
                assert correlation(uniform_box(), j, k) == 0.0

    def test_singlet_same_axis_perfect_anticorrelation(self):
        b = behavior_from_model(QuantumModel.singlet())
        assert correlation(b, 1, 1) == pytest.approx(-1.0, abs=1e-12)

    def test_vector_matches_entries(self):
        b = quantum_extremal_box()
        v = CorrelationVector.from_behavior(b)
        assert v.c11 == correlation(b, 1, 1)
        assert v.c22 == correlation(b, 2, 2)
        assert v.chsh_sum == pytest.approx(chsh_delta(b), abs=0)

    @given(normalized_behaviors())
    def test_bounded_for_normalized_tables(self, b):
        v = CorrelationVector.from_behavior(b)
        for c in (v.c11, v.c12, v.c21, v.c22):
            assert -1.0 - 1e-12 <= c <= 1.0 + 1e-12


class TestChshDelta:
    def test_pr_box_is_4_exactly(self):
        assert chsh_delta(pr_box()) == 4.0
        assert chsh_delta(pr_box(2)) == -4.0

    def test_uniform_is_zero(self):
        assert chsh_delta(uniform_box()) == 0.0

    def test_quantum_extremal_reaches_2_sqrt_2(self):
        assert chsh_delta(quantum_extremal_box()) == pytest.approx(
            2.0 * math.sqrt(2.0), abs=1e-12
        )
        assert chsh_delta(quantum_extremal_box(2)) == pytest.approx(
            -2.0 * math.sqrt(2.0), abs=1e-12
        )

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError, match="not normalized"):
            chsh_delta(Behavior((0.5,) * 16))

    @given(normalized_behaviors())
    def test_forms_agree_for_normalized(self, b):
        v = CorrelationVector.from_behavior(b).chsh_sum
        s = 2.0 * (sum(b.p(i) for i in (1, 4, 5, 8, 9, 12, 14, 15)) - 2.0)
        assert abs(v - s) < 1e-12

    @given(normalized_behaviors())
    def test_bounded_by_4(self, b):
        assert abs(chsh_delta(b)) <= 4.0 + 1e-12


class TestJson:
    def test_round_trip_is_bit_exact(self):
        b = quantum_extremal_box()
        again = Behavior.from_json(b.to_json())
        assert again.probs == b.probs

    def test_output_carries_blocks_and_flat_echo(self):
        data = json.loads(pr_box().to_json())
        assert len(data["blocks"]) == 4
        assert data["blocks"][0] == {"pp": 0.5, "pm": 0.0, "mp": 0.0, "mm": 0.5}
        assert data["p1"] == 0.5 and data["p16"] == 0.0

    def test_flat_form_accepted(self):
        flat = {f"p{i}": v for i, v in enumerate(pr_box().probs, start=1)}
        assert Behavior.from_dict(flat).probs == pr_box().probs

    def test_blocks_take_precedence(self):
        data = json.loads(uniform_box().to_json())
        data["p1"] = 0.9  # stale flat echo must lose against blocks
        assert Behavior.from_dict(data).p(1) == 0.25

    def test_malformed_block_raises(self):
        with pytest.raises(BehaviorFormatError):
            Behavior.from_dict({"blocks": [{"pp": 1.0}] * 4})

    @given(st.lists(st.floats(0.0, 1.0), min_size=16, max_size=16))
    def test_round_trip_arbitrary_tables(self, values):
        b = Behavior(tuple(values))
        assert Behavior.from_json(b.to_json()).probs == b.probs
