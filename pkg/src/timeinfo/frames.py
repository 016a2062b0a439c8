"""Unified time measure and the entropy laws.

A frame puts the closed endpoint of an observation window on the moment of one
stage.  Everything at or before that moment is knowledge; realized transitions
into known stages become certain, and later stages are conditioned on the
last known outcome.

Two verdicts compare the entropy of consecutive stages.  Looking back from the
later moment through a deterministic operator, entropy cannot grow; looking
ahead from the earlier moment through a refining operator, it cannot shrink.
Both are tight exactly on bijections.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import (
    IdentityViolation,
    InvalidChain,
    InvalidFrame,
    MissingRealization,
    NotDeterministic,
    NotRefinement,
)
from .events import DROP_TOL, OperatorKernel, ProcessChain, TimeMomentSet, reverse_kernel, validate_chain
from .measures import (
    Direction,
    KnowledgeStatus,
    conditional_entropy,
    shannon_entropy,
)
from .timeline import ObservationWindow, TimeMoment

VERDICT_TOL = 1e-9
IDENTITY_TOL = 1e-6

REFINEMENT_NOTE = (
    "entropy increase is evaluated for refinement kernels "
    "(each target reachable from exactly one source)"
)

__all__ = [
    "VERDICT_TOL",
    "IDENTITY_TOL",
    "UnifiedTimeMeasure",
    "FramedStage",
    "FramedTransition",
    "FramedChain",
    "Law",
    "EqualityReason",
    "LawVerdict",
    "apply_frame",
    "entropy_reduction_verdict",
    "entropy_increase_verdict",
    "recall_entropy",
]


@dataclass(frozen=True)
class UnifiedTimeMeasure:
    """Observation window (F, t] whose closed endpoint sits on a stage moment.

    ``anchor_stage`` is None when the anchor tick is not the moment of any
    stage (for instance a frame placed before the whole chain).
    """

    anchor_stage: int | None
    window: ObservationWindow

    @classmethod
    def at_stage(cls, chain: ProcessChain, index: int) -> UnifiedTimeMeasure:
        if isinstance(index, bool) or not isinstance(index, int) or not 0 <= index < len(chain):
            raise InvalidFrame(f"anchor stage {index!r} is not a stage of a {len(chain)}-stage chain")
        return cls(index, ObservationWindow.past(chain.stages[index].moment))

    @classmethod
    def at_tick(cls, chain: ProcessChain, tick: int) -> UnifiedTimeMeasure:
        moment = TimeMoment(tick)
        index = next((i for i, s in enumerate(chain.stages) if s.moment == moment), None)
        return cls(index, ObservationWindow.past(moment))


@dataclass(frozen=True)
class FramedStage:
    index: int
    moment: TimeMoment
    status: KnowledgeStatus
    distribution: TimeMomentSet
    realized: str | None
    entropy: float

    @property
    def known(self) -> bool:
        return self.status is KnowledgeStatus.KNOWLEDGE


@dataclass(frozen=True)
class FramedTransition:
    """A realized transition into a known stage, before and after renormalization."""

    step: int
    source_label: str
    target_label: str
    raw_probability: float
    effective_probability: float


@dataclass(frozen=True, eq=False)
class FramedChain:
    chain: ProcessChain
    frame: UnifiedTimeMeasure
    stages: tuple[FramedStage, ...]
    kernels: tuple[OperatorKernel, ...]
    transitions: tuple[FramedTransition, ...]

    @property
    def known_stages(self) -> list[int]:
        return [s.index for s in self.stages if s.known]

    def effective_probability(self, step: int) -> float:
        for t in self.transitions:
            if t.step == step:
                return t.effective_probability
        raise KeyError(f"transition {step} is not a realized transition into a known stage")


def _require_valid(chain: ProcessChain):
    report = validate_chain(chain)
    if not report.ok:
        raise InvalidChain(report)


def _as_set(moment, labels, probs) -> tuple[TimeMomentSet, np.ndarray]:
    keep = np.flatnonzero(probs >= DROP_TOL)
    tms = TimeMomentSet(moment, tuple((labels[i], probs[i]) for i in keep))
    return tms, keep


def apply_frame(
    chain: ProcessChain, frame: UnifiedTimeMeasure, renormalize: bool = True
) -> FramedChain:
    """View ``chain`` from the frame's anchor moment.

    With ``renormalize`` the realized path up to the anchor collapses to
    certainty and the remaining stages are propagated from the last known
    outcome.  Without it only the knowledge status changes.
    """
    _require_valid(chain)
    stages = chain.stages
    known = [frame.window.contains(s.moment) for s in stages]
    last_known = max((i for i, k in enumerate(known) if k), default=-1)
    if renormalize and last_known >= 0 and chain.realized is None:
        raise MissingRealization(
            f"stage {last_known} is knowledge but the chain records no realized outcome"
        )
    collapse = renormalize and last_known >= 0

    out_stages = []
    kernels = list(chain.kernels)
    transitions = []
    keeps = []
    probs = None
    for i, stage in enumerate(stages):
        realized = None if chain.realized is None else chain.realized[i]
        if collapse and i <= last_known:
            probs = np.zeros(len(stage))
            probs[stage.index(realized)] = 1.0
        elif collapse:
            probs = probs @ chain.kernels[i - 1].rows
        else:
            probs = stage.probabilities
        tms, keep = _as_set(stage.moment, stage.labels, probs)
        keeps.append(keep)
        status = KnowledgeStatus.KNOWLEDGE if known[i] else KnowledgeStatus.UNCERTAIN
        h = 0.0 if known[i] else shannon_entropy(tms.probabilities)
        out_stages.append(FramedStage(i, stage.moment, status, tms, realized, h))

    if collapse:
        for k, kernel in enumerate(chain.kernels):
            if k + 1 <= last_known:
                # realized step between known stages; artificial steps have raw mass 0
                rows = np.ones((1, 1))
            else:
                rows = kernel.rows[np.ix_(keeps[k], keeps[k + 1])]
                rows = rows / rows.sum(axis=1, keepdims=True)
            kernels[k] = OperatorKernel(
                rows, out_stages[k].distribution.labels, out_stages[k + 1].distribution.labels
            )
            if k + 1 <= last_known:
                transitions.append(
                    FramedTransition(
                        k,
                        chain.realized[k],
                        chain.realized[k + 1],
                        chain.realized_alpha(k),
                        float(rows[0, 0]),
                    )
                )
    return FramedChain(chain, frame, tuple(out_stages), tuple(kernels), tuple(transitions))


class Law(enum.Enum):
    THEOREM_1 = "entropy-reduction"
    THEOREM_2 = "entropy-increase"


class EqualityReason(enum.Enum):
    BIJECTION = "bijection"
    NONE = "none"


@dataclass(frozen=True)
class LawVerdict:
    """Outcome of comparing H(Y1) (``lhs_bits``) against H(X0) (``rhs_bits``).

    ``conditional_bits`` is H(X0|Y1) for the reduction law and H(Y1|X0) for
    the increase law; ``decomposition_residual`` is how far the matching
    chain-rule identity is from exact.  ``framed_bits`` is the entropy of the
    anchored stage after knowledge collapse, which is always zero.
    """

    law: Law
    holds: bool
    lhs_bits: float
    rhs_bits: float
    equality: bool
    equality_reason: EqualityReason
    conditional_bits: float
    decomposition_residual: float
    framed_bits: float = 0.0
    note: str = ""

    @property
    def decomposition_holds(self) -> bool:
        return abs(self.decomposition_residual) <= IDENTITY_TOL


def _segment(chain: ProcessChain, step: int):
    _require_valid(chain)
    if not 0 <= step < len(chain.kernels):
        raise IndexError(f"chain has no transition {step}")
    return chain.stages[step], chain.kernels[step]


def entropy_reduction_verdict(chain: ProcessChain, step: int = 0) -> LawVerdict:
    """Entropy-reduction law for the transition ``step -> step + 1``.

    Frame at the later moment, deterministic operator: H(Y1) <= H(X0), with
    H(X0) = H(Y1) + H(X0|Y1).
    """
    source, kernel = _segment(chain, step)
    if not kernel.is_deterministic:
        raise NotDeterministic(f"transition {step} uses a {kernel.kind.value} kernel")
    marginal, _ = reverse_kernel(source, kernel)
    h_y = shannon_entropy(marginal.probabilities)
    h_x = shannon_entropy(source.probabilities)
    h_x_given_y = conditional_entropy(source, kernel, Direction.BACKWARD)
    equal = abs(h_y - h_x) < VERDICT_TOL
    return LawVerdict(
        Law.THEOREM_1,
        holds=h_y <= h_x + VERDICT_TOL,
        lhs_bits=h_y,
        rhs_bits=h_x,
        equality=equal,
        equality_reason=EqualityReason.BIJECTION if kernel.is_bijective else EqualityReason.NONE,
        conditional_bits=h_x_given_y,
        decomposition_residual=h_x - (h_y + h_x_given_y),
    )


def entropy_increase_verdict(chain: ProcessChain, step: int = 0) -> LawVerdict:
    """Entropy-increase law for the transition ``step -> step + 1``.

    Frame at the earlier moment, refining operator: H(Y1) >= H(X0), with
    H(Y1) = H(X0) + H(Y1|X0).
    """
    source, kernel = _segment(chain, step)
    if not kernel.is_refinement:
        raise NotRefinement(f"transition {step} uses a {kernel.kind.value} kernel")
    marginal, _ = reverse_kernel(source, kernel)
    h_y = shannon_entropy(marginal.probabilities)
    h_x = shannon_entropy(source.probabilities)
    h_y_given_x = conditional_entropy(source, kernel, Direction.FORWARD)
    equal = abs(h_y - h_x) < VERDICT_TOL
    return LawVerdict(
        Law.THEOREM_2,
        holds=h_y >= h_x - VERDICT_TOL,
        lhs_bits=h_y,
        rhs_bits=h_x,
        equality=equal,
        equality_reason=EqualityReason.BIJECTION if kernel.is_bijective else EqualityReason.NONE,
        conditional_bits=h_y_given_x,
        decomposition_residual=h_y - (h_x + h_y_given_x),
        note=REFINEMENT_NOTE,
    )


def recall_entropy(chain: ProcessChain, step: int = 0, expected: bool = False) -> float:
    """Uncertainty left about stage ``step`` when stage ``step + 1`` is known.

    The default form conditions on the realized outcome of the later stage.
    ``expected=True`` returns H(X0|Y1) averaged over the later stage and
    checks it against H(X0) - H(Y1).
    """
    source, kernel = _segment(chain, step)
    if not kernel.is_deterministic:
        raise NotDeterministic(f"transition {step} uses a {kernel.kind.value} kernel")
    target_labels = chain.stages[step + 1].labels
    if expected:
        h = conditional_entropy(source, kernel, Direction.BACKWARD)
        marginal, _ = reverse_kernel(source, kernel, target_labels)
        gap = shannon_entropy(source.probabilities) - shannon_entropy(marginal.probabilities)
        if abs(h - gap) > IDENTITY_TOL:
            raise IdentityViolation(f"H(X|Y) = {h!r} but H(X) - H(Y) = {gap!r}")
        return h
    if chain.realized is None:
        raise MissingRealization("per-event recall needs a realized outcome at the later stage")
    marginal, back = reverse_kernel(source, kernel, target_labels)
    row = back.rows[marginal.index(chain.realized[step + 1])]
    return shannon_entropy(row)
