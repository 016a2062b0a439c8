import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from timeinfo import (
    ProcessChain,
    UnifiedTimeMeasure,
    apply_frame,
    entropy_increase_verdict,
    entropy_reduction_verdict,
    recall_entropy,
)
from timeinfo.errors import InvalidChain, InvalidFrame, MissingRealization, NotDeterministic, NotRefinement
from timeinfo.frames import EqualityReason, Law

from conftest import H_POINT2, H_THIRD, LOG2_3, distributions, two_stage


def test_frame_at_later_stage_collapses_realized_path(branch_chain):
    framed = apply_frame(branch_chain, UnifiedTimeMeasure.at_stage(branch_chain, 1))
    assert framed.known_stages == [0, 1]
    assert framed.effective_probability(0) == 1.0
    (t,) = framed.transitions
    assert t.raw_probability == pytest.approx(0.2)
    assert all(s.entropy == 0.0 for s in framed.stages)


def test_frame_at_earlier_stage_leaves_future_uncertain(branch_chain):
    framed = apply_frame(branch_chain, UnifiedTimeMeasure.at_stage(branch_chain, 0))
    assert framed.known_stages == [0]
    assert framed.stages[1].entropy == pytest.approx(H_POINT2)
    with pytest.raises(KeyError):
        framed.effective_probability(0)


def test_frame_before_chain_changes_nothing(merge_chain):
    shifted = ProcessChain(
        [type(s)(s.moment.tick + 5, s.outcomes) for s in merge_chain.stages],
        merge_chain.kernels,
        merge_chain.realized,
    )
    frame = UnifiedTimeMeasure.at_tick(shifted, 2)
    assert frame.anchor_stage is None
    framed = apply_frame(shifted, frame)
    assert framed.known_stages == []
    assert framed.stages[0].entropy == pytest.approx(LOG2_3)


def test_frame_propagates_from_last_known_stage():
    chain = two_stage([0.5, 0.5], [[0.5, 0.5], [0, 1]], realized=["x1", "y1"])
    framed = apply_frame(chain, UnifiedTimeMeasure.at_stage(chain, 0))
    np.testing.assert_allclose(framed.stages[1].distribution.probabilities, [0.5, 0.5])
    raw = apply_frame(chain, UnifiedTimeMeasure.at_stage(chain, 0), renormalize=False)
    np.testing.assert_allclose(raw.stages[1].distribution.probabilities, [0.25, 0.75])


def test_frame_errors(merge_chain):
    with pytest.raises(InvalidFrame):
        UnifiedTimeMeasure.at_stage(merge_chain, 2)
    bare = ProcessChain(merge_chain.stages, merge_chain.kernels)
    with pytest.raises(MissingRealization):
        apply_frame(bare, UnifiedTimeMeasure.at_stage(bare, 1))
    assert apply_frame(bare, UnifiedTimeMeasure.at_stage(bare, 1), renormalize=False)


def test_frame_rejects_invalid_chain():
    from timeinfo import OperatorKernel, TimeMomentSet

    a = TimeMomentSet.uniform(0, ["x1", "x2"])
    b = TimeMomentSet.from_mapping(1, {"y1": 0.2, "y2": 0.8})
    chain = ProcessChain([a, b], [OperatorKernel.identity(2)])
    with pytest.raises(InvalidChain):
        apply_frame(chain, UnifiedTimeMeasure.at_tick(chain, 1))


def test_reduction_law_on_merge(merge_chain):
    v = entropy_reduction_verdict(merge_chain)
    assert v.law is Law.THEOREM_1 and v.holds and not v.equality
    assert v.lhs_bits == pytest.approx(H_THIRD, abs=1e-12)
    assert v.rhs_bits == pytest.approx(LOG2_3, abs=1e-12)
    assert v.conditional_bits == pytest.approx(2 / 3, abs=1e-12)
    assert v.decomposition_holds
    assert v.framed_bits == 0.0


def test_reduction_equality_on_bijection(identity_chain):
    v = entropy_reduction_verdict(identity_chain)
    assert v.equality and v.equality_reason is EqualityReason.BIJECTION


def test_increase_law_on_split():
    chain = two_stage([0.5, 0.5], [[0.5, 0.5, 0, 0], [0, 0, 0.5, 0.5]], realized=["x1", "y2"])
    v = entropy_increase_verdict(chain)
    assert v.law is Law.THEOREM_2 and v.holds
    assert (v.rhs_bits, v.lhs_bits) == pytest.approx((1.0, 2.0))
    assert v.conditional_bits == pytest.approx(1.0)
    assert v.note


def test_laws_reject_wrong_kernel_kind(merge_chain):
    with pytest.raises(NotRefinement):
        entropy_increase_verdict(merge_chain)
    mixed = two_stage([0.5, 0.5], [[0.5, 0.5], [0.5, 0.5]])
    with pytest.raises(NotDeterministic):
        entropy_reduction_verdict(mixed)
    with pytest.raises(IndexError):
        entropy_reduction_verdict(merge_chain, step=1)


def test_recall_entropy(merge_chain):
    assert recall_entropy(merge_chain) == pytest.approx(1.0)
    assert recall_entropy(merge_chain, expected=True) == pytest.approx(2 / 3)
    other = ProcessChain(merge_chain.stages, merge_chain.kernels, ["x1", "y1"])
    assert recall_entropy(other) == 0.0
    with pytest.raises(MissingRealization):
        recall_entropy(ProcessChain(merge_chain.stages, merge_chain.kernels))


@settings(max_examples=200, deadline=None)
@given(distributions(1, 5), st.data())
def test_frame_dichotomy(src, data):
    """Stages inside the window carry zero bits, later stages keep their own entropy."""
    targets = [data.draw(st.integers(0, 3)) for _ in src]
    used = sorted(set(targets))
    rows = np.zeros((len(src), len(used)))
    rows[np.arange(len(src)), [used.index(t) for t in targets]] = 1.0
    chain = two_stage(src, rows)
    i = data.draw(st.integers(0, len(src) - 1))
    realized = [f"x{i + 1}", f"y{used.index(targets[i]) + 1}"]
    chain = ProcessChain(chain.stages, chain.kernels, realized)
    anchor = data.draw(st.integers(0, 1))
    framed = apply_frame(chain, UnifiedTimeMeasure.at_stage(chain, anchor))
    for s in framed.stages:
        assert s.known == (s.index <= anchor)
        assert s.entropy == 0.0  # known, or the deterministic image of a known point
    unframed = apply_frame(chain, UnifiedTimeMeasure.at_tick(chain, 0), renormalize=False)
    assert unframed.stages[1].entropy == pytest.approx(entropy_reduction_verdict(chain).lhs_bits)
