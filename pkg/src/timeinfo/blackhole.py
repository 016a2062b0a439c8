"""Negative probability bookkeeping and information-volume conservation.

Once a transition has been realized, the branches that could have happened
but did not are moved into an absorbing *black hole* state and booked with
negative probability.  The realized transition itself becomes certain, so the
information volume of the realized path is the same at its start and its end.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ImpossibleRealization, InvalidChain, MissingRealization, UnknownLabel
from .events import OperatorKernel, ProcessChain, TimeMomentSet, ViolationKind, validate_chain

BLACK_HOLE = "<black-hole>"
INFINITE_BITS = math.inf
CONSERVATION_TOL = 1e-9
NATURAL_THRESHOLD = 1e-6

__all__ = [
    "BLACK_HOLE",
    "INFINITE_BITS",
    "NATURAL_THRESHOLD",
    "BlackHoleEntry",
    "LostMass",
    "ExtendedTransition",
    "ExtendedChain",
    "ConservationReport",
    "Variation",
    "VariationVerdict",
    "extend_with_blackhole",
    "conservation_check",
    "raw_conservation_check",
    "classify_variation",
]


@dataclass(frozen=True)
class BlackHoleEntry:
    """One sibling branch that did not occur, booked at ``-p(sibling | source)``.

    ``stage_index`` is the stage the lost outcome belonged to.
    """

    stage_index: int
    source_label: str
    lost_label: str
    negative_probability: float

    def __post_init__(self):
        if not -1.0 <= self.negative_probability < 0.0:
            raise ValueError(f"negative probability {self.negative_probability!r} outside [-1, 0)")


@dataclass(frozen=True)
class LostMass:
    """Aggregate of one realized transition: ``alpha - 1`` over all its siblings."""

    stage_index: int
    source_label: str
    realized_label: str
    alpha: float

    @property
    def negative_probability(self) -> float:
        return self.alpha - 1.0


@dataclass(frozen=True, eq=False)
class ExtendedTransition:
    """Signed transition matrix with a trailing black-hole row and column.

    The realized source row carries 1 on the realized target and the
    aggregate negative mass in the black-hole column.  The black-hole row has
    no edge to any real state.
    """

    step: int
    source_labels: tuple[str, ...]
    target_labels: tuple[str, ...]
    rows: np.ndarray

    def probability(self, source: str, target: str) -> float:
        return float(self.rows[self.source_labels.index(source), self.target_labels.index(target)])


@dataclass(frozen=True, eq=False)
class ExtendedChain:
    chain: ProcessChain
    transitions: tuple[ExtendedTransition, ...]
    ledger: tuple[BlackHoleEntry, ...]
    lost: tuple[LostMass, ...]

    @property
    def extrapolated(self) -> bool:
        """True outside the singleton-start, single-step setting the conservation law is stated for."""
        return len(self.chain.stages[0]) > 1 or len(self.chain.kernels) > 1


@dataclass(frozen=True)
class ConservationReport:
    start_bits: float
    end_bits: float
    conserved: bool
    ledger: tuple[BlackHoleEntry, ...]
    extrapolated: bool = False


def _checked_realized(chain: ProcessChain):
    if chain.realized is None:
        raise MissingRealization("black-hole extension needs a realized path")
    report = validate_chain(chain)
    impossible = report.of_kind(ViolationKind.IMPOSSIBLE_REALIZATION)
    if impossible:
        raise ImpossibleRealization(str(impossible[0]))
    if not report.ok:
        raise InvalidChain(report)


def extend_with_blackhole(chain: ProcessChain) -> ExtendedChain:
    """Renormalize every realized transition and book the lost branches."""
    _checked_realized(chain)
    transitions, ledger, lost = [], [], []
    for k, kernel in enumerate(chain.kernels):
        src, tgt = chain.stages[k], chain.stages[k + 1]
        i, j = src.index(chain.realized[k]), tgt.index(chain.realized[k + 1])
        alpha = float(kernel.rows[i, j])
        n, m = kernel.rows.shape
        rows = np.zeros((n + 1, m + 1))
        rows[:n, :m] = kernel.rows
        rows[i, :] = 0.0
        rows[i, j] = 1.0
        rows[i, m] = alpha - 1.0
        rows[n, m] = 1.0
        rows.setflags(write=False)
        transitions.append(
            ExtendedTransition(k, src.labels + (BLACK_HOLE,), tgt.labels + (BLACK_HOLE,), rows)
        )
        for jj, p in enumerate(kernel.rows[i]):
            if jj != j and p > 0.0:
                ledger.append(BlackHoleEntry(k + 1, src.labels[i], tgt.labels[jj], -float(p)))
        lost.append(LostMass(k + 1, src.labels[i], tgt.labels[j], alpha))
    return ExtendedChain(chain, tuple(transitions), tuple(ledger), tuple(lost))


def _bits(p: float) -> float:
    if p <= 0.0:
        return INFINITE_BITS
    return float(-np.log2(p)) + 0.0


def conservation_check(extended: ExtendedChain) -> ConservationReport:
    """Information volume of the realized path at its first and last stage."""
    chain = extended.chain
    p_start = chain.stages[0].probability(chain.realized[0])
    factor = 1.0
    for t in extended.transitions:
        factor *= t.probability(chain.realized[t.step], chain.realized[t.step + 1])
    start, end = _bits(p_start), _bits(p_start * factor)
    return ConservationReport(
        start, end, abs(start - end) < CONSERVATION_TOL, extended.ledger, extended.extrapolated
    )


def raw_conservation_check(chain: ProcessChain) -> ConservationReport:
    """The same accounting with the raw transition probabilities and no black hole."""
    if chain.realized is None:
        raise MissingRealization("conservation needs a realized path")
    p_start = chain.stages[0].probability(chain.realized[0])
    factor = 1.0
    for k in range(len(chain.kernels)):
        factor *= chain.realized_alpha(k)
    start, end = _bits(p_start), _bits(p_start * factor)
    conserved = math.isfinite(end) and abs(start - end) < CONSERVATION_TOL
    extrapolated = len(chain.stages[0]) > 1 or len(chain.kernels) > 1
    return ConservationReport(start, end, conserved, (), extrapolated)


class Variation(enum.Enum):
    NATURAL = "NATURAL"
    ARTIFICIAL = "ARTIFICIAL"
    ORDINARY = "ORDINARY"


@dataclass(frozen=True)
class VariationVerdict:
    kind: Variation
    alpha: float
    information_bits: float


def classify_variation(
    source: TimeMomentSet,
    kernel: OperatorKernel,
    realized,
    threshold: float = NATURAL_THRESHOLD,
    source_label: str | None = None,
) -> VariationVerdict:
    """Classify the realization of ``realized`` from ``source``.

    ``realized`` is a target label (or index).  With ``source_label`` the
    probability is that kernel entry; otherwise it is the pushforward
    probability of ``realized``, which is the kernel entry for a singleton
    source.  A realization of probability exactly 0 is artificial and carries
    infinite information volume.
    """
    if not 0.0 <= threshold < 1.0:
        raise ValueError(f"threshold must lie in [0, 1), got {threshold!r}")
    if isinstance(realized, (int, np.integer)) and not isinstance(realized, bool):
        j = int(realized)
        if not 0 <= j < kernel.target_arity:
            raise UnknownLabel(f"target index {j} out of range")
    else:
        labels = kernel.target_labels or tuple(f"y{k + 1}" for k in range(kernel.target_arity))
        if realized not in labels:
            raise UnknownLabel(f"{realized!r} is not a target outcome")
        j = labels.index(realized)
    if source_label is not None:
        alpha = float(kernel.rows[source.index(source_label), j])
    else:
        alpha = float(source.probabilities @ kernel.rows[:, j])
    if alpha == 0.0:
        kind = Variation.ARTIFICIAL
    elif alpha <= threshold:
        kind = Variation.NATURAL
    else:
        kind = Variation.ORDINARY
    return VariationVerdict(kind, alpha, _bits(alpha))
