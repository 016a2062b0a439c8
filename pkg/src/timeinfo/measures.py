"""Information volume and entropy gated by an observation window.

An outcome whose moment lies inside the window is *knowledge*: it has already
been observed, so its information volume and the entropy of its set are zero.
Outside the window the usual Shannon quantities apply.  All logarithms are
base 2, so every result is in bits.

Quantities that couple two moments (conditional entropy, the joint
distribution, mutual information) involve two observations and are therefore
never gated by a single window.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import ArityMismatch
from .events import OperatorKernel, TimeMomentSet, reverse_kernel
from .timeline import ObservationWindow, TimeMoment, window_contains

LOG_BASE = 2

__all__ = [
    "LOG_BASE",
    "MeasureContext",
    "KnowledgeStatus",
    "KnowledgeTag",
    "Direction",
    "AnalyticBits",
    "JointDistribution",
    "shannon_entropy",
    "knowledge_tag",
    "information_volume",
    "entropy",
    "conditional_entropy",
    "joint_distribution",
    "mutual_information_volume",
    "knowledge_step_profile",
]


@dataclass(frozen=True)
class MeasureContext:
    """Observation window used to decide what is already known.

    ``window=None`` means nothing has been observed yet.
    """

    window: ObservationWindow | None = None
    log_base: int = LOG_BASE

    def __post_init__(self):
        if self.log_base != LOG_BASE:
            raise ValueError("only base-2 logarithms (bits) are supported")

    @classmethod
    def at(cls, anchor, closed: bool = True) -> MeasureContext:
        """Context whose window is (F, anchor], all history up to ``anchor``."""
        return cls(ObservationWindow.past(anchor, closed))

    def is_known(self, moment) -> bool:
        return self.window is not None and window_contains(self.window, moment)


NO_OBSERVATION = MeasureContext()


class KnowledgeStatus(enum.Enum):
    KNOWLEDGE = "KNOWLEDGE"
    UNCERTAIN = "UNCERTAIN"


@dataclass(frozen=True)
class KnowledgeTag:
    label: str
    moment: TimeMoment
    status: KnowledgeStatus


class Direction(enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


class AnalyticBits(float):
    """A bit count that only exists as an analytical construct.

    Behaves like a float; ``analytic_only`` marks that the quantity needs two
    observations and has no single observation-time reading.
    """

    analytic_only = True

    def __repr__(self):
        return f"AnalyticBits({float(self)!r})"


@dataclass(frozen=True, eq=False)
class JointDistribution:
    matrix: np.ndarray
    source_labels: tuple[str, ...]
    target_labels: tuple[str, ...]
    analytic_only: bool = True

    @property
    def source_marginal(self) -> np.ndarray:
        return self.matrix.sum(axis=1)

    @property
    def target_marginal(self) -> np.ndarray:
        return self.matrix.sum(axis=0)


def shannon_entropy(probs) -> float:
    """-sum p log2 p over the positive entries of ``probs``."""
    p = np.asarray(probs, dtype=float)
    p = p[p > 0.0]
    # + 0.0 turns a -0.0 from the singleton case into 0.0
    return float(-np.sum(p * np.log2(p))) + 0.0


def _row_entropies(rows: np.ndarray) -> np.ndarray:
    safe = np.where(rows > 0.0, rows, 1.0)
    return -np.sum(rows * np.log2(safe), axis=1)


def knowledge_tag(
    tms: TimeMomentSet, label: str, ctx: MeasureContext = NO_OBSERVATION
) -> KnowledgeTag:
    tms.index(label)
    status = KnowledgeStatus.KNOWLEDGE if ctx.is_known(tms.moment) else KnowledgeStatus.UNCERTAIN
    return KnowledgeTag(label, tms.moment, status)


def information_volume(
    tms: TimeMomentSet, label: str, ctx: MeasureContext = NO_OBSERVATION
) -> float:
    """Bits carried by outcome ``label``; zero once the outcome's moment is observed."""
    p = tms.probability(label)
    if ctx.is_known(tms.moment):
        return 0.0
    return float(-np.log2(p)) + 0.0


def entropy(tms: TimeMomentSet, ctx: MeasureContext = NO_OBSERVATION) -> float:
    if ctx.is_known(tms.moment):
        return 0.0
    return shannon_entropy(tms.probabilities)


def _check_arity(source: TimeMomentSet, kernel: OperatorKernel):
    if len(source) != kernel.source_arity:
        raise ArityMismatch(
            f"source has {len(source)} outcomes but the kernel expects {kernel.source_arity}"
        )


def conditional_entropy(
    source: TimeMomentSet, kernel: OperatorKernel, direction: Direction = Direction.FORWARD
) -> float:
    """H(Y|X) for ``FORWARD``; H(X|Y) via the Bayes-reversed kernel for ``BACKWARD``."""
    _check_arity(source, kernel)
    direction = Direction(direction)
    if direction is Direction.FORWARD:
        weights, rows = source.probabilities, kernel.rows
    else:
        marginal, back = reverse_kernel(source, kernel)
        weights, rows = marginal.probabilities, back.rows
    return float(weights @ _row_entropies(rows)) + 0.0


def joint_distribution(source: TimeMomentSet, kernel: OperatorKernel) -> JointDistribution:
    _check_arity(source, kernel)
    matrix = source.probabilities[:, None] * kernel.rows
    matrix.setflags(write=False)
    targets = kernel.target_labels or tuple(f"y{j + 1}" for j in range(kernel.target_arity))
    return JointDistribution(matrix, source.labels, targets)


def mutual_information_volume(source: TimeMomentSet, kernel: OperatorKernel) -> AnalyticBits:
    """Mutual information of the two stages, nonnegative, tagged analytic-only."""
    joint = joint_distribution(source, kernel).matrix
    px = source.probabilities[:, None]
    py = joint.sum(axis=0)[None, :]
    mask = joint > 0.0
    ratio = np.where(mask, joint, 1.0) / np.where(mask, px * py, 1.0)
    bits = float(np.sum(joint * np.log2(ratio)))
    # only rounding can push this below zero
    return AnalyticBits(max(bits, 0.0))


def knowledge_step_profile(moment, sweep: Iterable) -> list[tuple[TimeMoment, int]]:
    """Probability that the event at ``moment`` is knowledge, per window anchor.

    For each anchor t the window is (F, t]; the profile is the unit step that
    switches on at the occurrence moment.
    """
    moment = moment if isinstance(moment, TimeMoment) else TimeMoment(moment)
    anchors = [a if isinstance(a, TimeMoment) else TimeMoment(a) for a in sweep]
    if not anchors:
        raise ValueError("sweep must contain at least one anchor")
    return [(a, int(window_contains(ObservationWindow.past(a), moment))) for a in anchors]
