"""Time moment sets, operator kernels and process chains.

A :class:`TimeMomentSet` is a distribution over mutually exclusive outcomes that
all happen at one time moment.  Consecutive sets are joined by an
:class:`OperatorKernel`, a row-stochastic matrix ``rows[i, j] = p(y_j | x_i)``.
A :class:`ProcessChain` strings them together and must be temporally
consistent: each stage is the pushforward of the previous one.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    ArityMismatch,
    InvalidKernel,
    InvalidTimeMomentSet,
    NotDeterministic,
    UnknownLabel,
)
from .timeline import TimeMoment

logger = logging.getLogger(__name__)

PROB_TOL = 1e-9
DROP_TOL = 1e-12

__all__ = [
    "PROB_TOL",
    "DROP_TOL",
    "TimeMomentSet",
    "KernelKind",
    "OperatorKernel",
    "ProcessChain",
    "ViolationKind",
    "Violation",
    "ValidationReport",
    "SurjectivityResult",
    "IndependenceReport",
    "validate_chain",
    "pushforward",
    "reverse_kernel",
    "check_surjectivity",
    "independence_report",
    "independence_test",
]


def _moment(value) -> TimeMoment:
    return value if isinstance(value, TimeMoment) else TimeMoment(value)


def _set_problems(labels, probs):
    """(kind, detail, deviation) triples describing why a set is not a valid time moment set."""
    problems = []
    seen = set()
    for label in labels:
        if label in seen:
            problems.append((ViolationKind.DUPLICATE_LABEL, f"label {label!r} repeated", None))
        seen.add(label)
    if len(labels) == 0:
        problems.append((ViolationKind.NORMALIZATION, "no outcomes", 1.0))
        return problems
    for label, p in zip(labels, probs):
        if not np.isfinite(p) or p <= 0.0:
            problems.append(
                (ViolationKind.NONPOSITIVE, f"p({label}) = {float(p):.12g} is not positive", None)
            )
    total = float(np.sum(probs))
    if not abs(total - 1.0) <= PROB_TOL:
        problems.append(
            (ViolationKind.NORMALIZATION, f"probabilities sum to {total:.12g}", abs(total - 1.0))
        )
    return problems


@dataclass(frozen=True)
class TimeMomentSet:
    """Mutually exclusive outcomes with positive probabilities, pinned to one moment."""

    moment: TimeMoment
    outcomes: tuple[tuple[str, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "moment", _moment(self.moment))
        outcomes = tuple((str(label), float(p)) for label, p in self.outcomes)
        object.__setattr__(self, "outcomes", outcomes)
        problems = _set_problems(self.labels, self.probabilities)
        if problems:
            raise InvalidTimeMomentSet("; ".join(detail for _, detail, _ in problems))

    @classmethod
    def unchecked(cls, moment, outcomes) -> TimeMomentSet:
        """Build without enforcing the invariants; ``validate_chain`` reports them instead."""
        self = object.__new__(cls)
        object.__setattr__(self, "moment", _moment(moment))
        object.__setattr__(
            self, "outcomes", tuple((str(label), float(p)) for label, p in outcomes)
        )
        return self

    @classmethod
    def from_mapping(cls, moment, probabilities: Mapping[str, float]) -> TimeMomentSet:
        return cls(moment, tuple(probabilities.items()))

    @classmethod
    def uniform(cls, moment, labels: Iterable[str]) -> TimeMomentSet:
        labels = list(labels)
        return cls(moment, tuple((label, 1.0 / len(labels)) for label in labels))

    @cached_property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.outcomes)

    @cached_property
    def probabilities(self) -> np.ndarray:
        probs = np.array([p for _, p in self.outcomes], dtype=float)
        probs.setflags(write=False)
        return probs

    @cached_property
    def _index(self) -> dict[str, int]:
        return {label: i for i, label in enumerate(self.labels)}

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownLabel(f"{label!r} is not an outcome of the set at tick {self.moment.tick}") from None

    def probability(self, label: str) -> float:
        return float(self.probabilities[self.index(label)])

    def __contains__(self, label) -> bool:
        return label in self._index

    def __len__(self) -> int:
        return len(self.outcomes)

    def as_dict(self) -> dict[str, float]:
        return dict(self.outcomes)


class KernelKind(enum.Enum):
    DETERMINISTIC = "deterministic"
    REFINEMENT = "refinement"
    BIJECTIVE = "bijective"
    GENERAL = "general"


def _kernel_problems(rows: np.ndarray):
    problems = []
    if not np.all(np.isfinite(rows)) or np.any(rows < 0.0) or np.any(rows > 1.0):
        problems.append((ViolationKind.KERNEL_RANGE, "kernel entries must lie in [0, 1]", None))
    sums = rows.sum(axis=1)
    dev = np.abs(sums - 1.0)
    for i in np.flatnonzero(~(dev <= PROB_TOL)):
        problems.append(
            (ViolationKind.NORMALIZATION, f"kernel row {i} sums to {float(sums[i]):.12g}", float(dev[i]))
        )
    return problems


@dataclass(frozen=True, eq=False)
class OperatorKernel:
    """Row-stochastic transition map between two consecutive time moment sets.

    ``rows[i, j]`` is the probability of moving from source outcome ``i`` to
    target outcome ``j``.  Axis labels are optional; when present they must
    match the stages the kernel joins.
    """

    rows: np.ndarray
    source_labels: tuple[str, ...] | None = None
    target_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        rows = np.array(self.rows, dtype=float)
        if rows.ndim != 2 or rows.shape[0] == 0 or rows.shape[1] == 0:
            raise InvalidKernel(f"kernel must be a non-empty matrix, got shape {rows.shape}")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        for name, n in (("source_labels", rows.shape[0]), ("target_labels", rows.shape[1])):
            labels = getattr(self, name)
            if labels is not None:
                labels = tuple(str(label) for label in labels)
                if len(labels) != n:
                    raise InvalidKernel(f"{name} has {len(labels)} entries for {n} kernel axes")
                object.__setattr__(self, name, labels)
        problems = _kernel_problems(rows)
        if problems and not getattr(self, "_skip_checks", False):
            raise InvalidKernel("; ".join(detail for _, detail, _ in problems))

    @classmethod
    def unchecked(cls, rows, source_labels=None, target_labels=None) -> OperatorKernel:
        self = object.__new__(cls)
        object.__setattr__(self, "_skip_checks", True)
        self.__init__(rows, source_labels, target_labels)
        return self

    @classmethod
    def identity(cls, n: int, source_labels=None, target_labels=None) -> OperatorKernel:
        return cls(np.eye(n), source_labels, target_labels)

    @classmethod
    def from_mapping(cls, targets: Sequence[int], target_arity: int, **labels) -> OperatorKernel:
        """Deterministic kernel sending source ``i`` to target ``targets[i]``."""
        rows = np.zeros((len(targets), target_arity))
        rows[np.arange(len(targets)), list(targets)] = 1.0
        return cls(rows, **labels)

    @property
    def source_arity(self) -> int:
        return self.rows.shape[0]

    @property
    def target_arity(self) -> int:
        return self.rows.shape[1]

    @cached_property
    def is_deterministic(self) -> bool:
        return bool(np.all((self.rows > 0.0).sum(axis=1) == 1))

    @cached_property
    def is_refinement(self) -> bool:
        return bool(np.all((self.rows > 0.0).sum(axis=0) <= 1))

    @property
    def is_bijective(self) -> bool:
        return (
            self.source_arity == self.target_arity
            and self.is_deterministic
            and self.is_refinement
        )

    @property
    def kind(self) -> KernelKind:
        if self.is_bijective:
            return KernelKind.BIJECTIVE
        if self.is_deterministic:
            return KernelKind.DETERMINISTIC
        if self.is_refinement:
            return KernelKind.REFINEMENT
        return KernelKind.GENERAL

    def problems(self):
        return _kernel_problems(self.rows)

    def __repr__(self):
        return f"OperatorKernel({self.kind.value}, {self.source_arity}x{self.target_arity})"


class ViolationKind(enum.Enum):
    NORMALIZATION = "Normalization"
    NONPOSITIVE = "NonPositiveProbability"
    DUPLICATE_LABEL = "DuplicateLabel"
    KERNEL_RANGE = "KernelRange"
    KERNEL_COUNT = "KernelCount"
    ORDERING = "Ordering"
    ARITY = "ArityMismatch"
    LABEL_MISMATCH = "LabelMismatch"
    TEMPORAL_INCONSISTENCY = "TemporalInconsistency"
    UNKNOWN_REALIZATION = "UnknownRealization"
    IMPOSSIBLE_REALIZATION = "ImpossibleRealization"


@dataclass(frozen=True)
class Violation:
    """One problem found by :func:`validate_chain`.

    ``stage`` is the stage the problem is reported against; kernel problems
    are reported against the stage the kernel feeds.
    """

    kind: ViolationKind
    stage: int | None
    detail: str
    deviation: float | None = None

    def __str__(self):
        where = "chain" if self.stage is None else f"stage {self.stage}"
        dev = "" if self.deviation is None else f" (deviation {self.deviation:.7f})"
        return f"{where}: {self.kind.value}{dev}: {self.detail}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def of_kind(self, kind: ViolationKind) -> list[Violation]:
        return [v for v in self.violations if v.kind is kind]


@dataclass(frozen=True, eq=False)
class ProcessChain:
    """Time moment sets in strictly increasing time order joined by kernels.

    ``realized`` optionally records which outcome actually happened at each
    stage.  ``artificial`` marks chains where a realized transition is allowed
    to have zero probability (artificial variation).
    """

    stages: tuple[TimeMomentSet, ...]
    kernels: tuple[OperatorKernel, ...] = ()
    realized: tuple[str, ...] | None = None
    artificial: bool = False

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))
        object.__setattr__(self, "kernels", tuple(self.kernels))
        if self.realized is not None:
            object.__setattr__(self, "realized", tuple(self.realized))

    def __len__(self) -> int:
        return len(self.stages)

    def validate(self) -> ValidationReport:
        return validate_chain(self)

    def segment(self, step: int) -> ProcessChain:
        """The two-stage chain covering the transition ``step -> step + 1``."""
        if not 0 <= step < len(self.kernels):
            raise IndexError(f"chain has no transition {step}")
        realized = None if self.realized is None else self.realized[step : step + 2]
        return ProcessChain(
            self.stages[step : step + 2], self.kernels[step : step + 1], realized, self.artificial
        )

    def realized_alpha(self, step: int) -> float:
        """Raw probability of the realized transition ``step -> step + 1``."""
        if self.realized is None:
            raise ValueError("chain has no realized path")
        src, tgt = self.stages[step], self.stages[step + 1]
        i, j = src.index(self.realized[step]), tgt.index(self.realized[step + 1])
        return float(self.kernels[step].rows[i, j])


def _push_vector(probs: np.ndarray, kernel: OperatorKernel) -> np.ndarray:
    return probs @ kernel.rows


def validate_chain(chain: ProcessChain) -> ValidationReport:
    """Collect every invariant violation of ``chain``, in stage order."""
    out: list[Violation] = []
    stages, kernels = chain.stages, chain.kernels
    for s, stage in enumerate(stages):
        for kind, detail, dev in _set_problems(stage.labels, stage.probabilities):
            out.append(Violation(kind, s, detail, dev))
    if len(kernels) != max(len(stages) - 1, 0):
        out.append(
            Violation(
                ViolationKind.KERNEL_COUNT,
                None,
                f"{len(stages)} stages need {max(len(stages) - 1, 0)} kernels, got {len(kernels)}",
            )
        )
    for s in range(1, len(stages)):
        if not stages[s - 1].moment < stages[s].moment:
            out.append(
                Violation(
                    ViolationKind.ORDERING,
                    s,
                    f"tick {stages[s].moment.tick} does not follow tick {stages[s - 1].moment.tick}",
                )
            )
    for k, kernel in enumerate(kernels[: max(len(stages) - 1, 0)]):
        src, tgt = stages[k], stages[k + 1]
        for kind, detail, dev in kernel.problems():
            out.append(Violation(kind, k + 1, f"kernel {k}: {detail}", dev))
        if kernel.rows.shape != (len(src), len(tgt)):
            out.append(
                Violation(
                    ViolationKind.ARITY,
                    k + 1,
                    f"kernel {k} is {kernel.source_arity}x{kernel.target_arity} "
                    f"but joins {len(src)} -> {len(tgt)} outcomes",
                )
            )
            continue
        for axis, labels, stage in (
            ("source", kernel.source_labels, src),
            ("target", kernel.target_labels, tgt),
        ):
            if labels is not None and labels != stage.labels:
                out.append(
                    Violation(
                        ViolationKind.LABEL_MISMATCH,
                        k + 1,
                        f"kernel {k} {axis} labels {list(labels)} != stage labels {list(stage.labels)}",
                    )
                )
        pushed = _push_vector(src.probabilities, kernel)
        dev = np.abs(pushed - tgt.probabilities)
        worst = float(dev.max())
        if not worst <= PROB_TOL:
            j = int(dev.argmax())
            out.append(
                Violation(
                    ViolationKind.TEMPORAL_INCONSISTENCY,
                    k + 1,
                    f"declared p({tgt.labels[j]}) = {float(tgt.probabilities[j]):.12g} but the "
                    f"pushforward gives {float(pushed[j]):.12g}",
                    worst,
                )
            )
    if chain.realized is not None:
        out.extend(_realization_violations(chain))
    return ValidationReport(tuple(out))


def _realization_violations(chain: ProcessChain) -> list[Violation]:
    out = []
    realized, stages = chain.realized, chain.stages
    if len(realized) != len(stages):
        out.append(
            Violation(
                ViolationKind.UNKNOWN_REALIZATION,
                None,
                f"{len(realized)} realized labels for {len(stages)} stages",
            )
        )
        return out
    missing = False
    for s, (label, stage) in enumerate(zip(realized, stages)):
        if label not in stage:
            missing = True
            out.append(
                Violation(ViolationKind.UNKNOWN_REALIZATION, s, f"{label!r} is not an outcome")
            )
    if missing or chain.artificial:
        return out
    for k, kernel in enumerate(chain.kernels[: len(stages) - 1]):
        if kernel.rows.shape != (len(stages[k]), len(stages[k + 1])):
            continue
        if chain.realized_alpha(k) <= 0.0:
            out.append(
                Violation(
                    ViolationKind.IMPOSSIBLE_REALIZATION,
                    k + 1,
                    f"transition {realized[k]} -> {realized[k + 1]} has probability 0",
                )
            )
    return out


def _target_labels(kernel: OperatorKernel, labels) -> tuple[str, ...]:
    if labels is not None:
        labels = tuple(labels)
    elif kernel.target_labels is not None:
        labels = kernel.target_labels
    else:
        labels = tuple(f"y{j + 1}" for j in range(kernel.target_arity))
    if len(labels) != kernel.target_arity:
        raise ArityMismatch(f"{len(labels)} labels for {kernel.target_arity} targets")
    return labels


def _check_arity(source: TimeMomentSet, kernel: OperatorKernel):
    if len(source) != kernel.source_arity:
        raise ArityMismatch(
            f"source has {len(source)} outcomes but the kernel expects {kernel.source_arity}"
        )


def pushforward(
    source: TimeMomentSet, kernel: OperatorKernel, moment=None, labels=None
) -> TimeMomentSet:
    """Distribution at the next moment, ``p(y_j) = sum_i p(x_i) rows[i, j]``.

    Outcomes whose mass falls below ``DROP_TOL`` are dropped.  The moment
    defaults to one tick after the source.
    """
    _check_arity(source, kernel)
    labels = _target_labels(kernel, labels)
    moment = source.moment.tick + 1 if moment is None else moment
    pushed = _push_vector(source.probabilities, kernel)
    keep = pushed >= DROP_TOL
    return TimeMomentSet(
        moment, tuple((lab, p) for lab, p, k in zip(labels, pushed, keep) if k)
    )


def reverse_kernel(
    source: TimeMomentSet, kernel: OperatorKernel, labels=None
) -> tuple[TimeMomentSet, OperatorKernel]:
    """Bayes reversal ``p(x | y) = rows[x, y] p(x) / p(y)``.

    Returns the pushforward marginal and the reversed kernel whose rows are
    indexed by the surviving target outcomes.
    """
    _check_arity(source, kernel)
    labels = _target_labels(kernel, labels)
    joint = source.probabilities[:, None] * kernel.rows
    py = joint.sum(axis=0)
    keep = np.flatnonzero(py >= DROP_TOL)
    marginal = TimeMomentSet(
        source.moment.tick + 1, tuple((labels[j], py[j]) for j in keep)
    )
    back = (joint[:, keep] / py[keep]).T
    return marginal, OperatorKernel(back, marginal.labels, source.labels)


@dataclass(frozen=True)
class SurjectivityResult:
    surjective: bool
    witness: str | None = None
    bijective: bool = False

    def __bool__(self):
        return self.surjective


def check_surjectivity(kernel: OperatorKernel, target: TimeMomentSet) -> SurjectivityResult:
    """Check that every declared target outcome has an incoming edge.

    A target outcome with positive probability and no incoming edge cannot
    receive any mass, so a ``False`` result doubles as proof that the chain
    carrying this kernel is inconsistent.
    """
    if not kernel.is_deterministic:
        raise NotDeterministic(f"{kernel!r} has a row that is not one-hot")
    if len(target) != kernel.target_arity:
        raise ArityMismatch(
            f"target has {len(target)} outcomes but the kernel maps onto {kernel.target_arity}"
        )
    incoming = (kernel.rows > 0.0).any(axis=0)
    for j, label in enumerate(target.labels):
        if not incoming[j]:
            return SurjectivityResult(False, label, False)
    return SurjectivityResult(True, None, kernel.is_bijective)


@dataclass(frozen=True)
class IndependenceReport:
    forward: bool
    backward: bool
    max_forward_gap: float
    max_backward_gap: float

    @property
    def independent(self) -> bool:
        return self.forward and self.backward

    @property
    def anomaly(self) -> bool:
        return self.forward != self.backward


def independence_report(source: TimeMomentSet, kernel: OperatorKernel) -> IndependenceReport:
    """Compare ``p(y|x)`` with ``p(y)`` and ``p(x|y)`` with ``p(x)`` everywhere."""
    _check_arity(source, kernel)
    py = _push_vector(source.probabilities, kernel)
    fgap = float(np.abs(kernel.rows - py[None, :]).max())
    _, back = reverse_kernel(source, kernel)
    bgap = float(np.abs(back.rows - source.probabilities[None, :]).max())
    return IndependenceReport(fgap <= PROB_TOL, bgap <= PROB_TOL, fgap, bgap)


def independence_test(source: TimeMomentSet, kernel: OperatorKernel) -> bool:
    rep = independence_report(source, kernel)
    if rep.anomaly:
        logger.warning(
            "independence directions disagree: forward gap %.3g, backward gap %.3g",
            rep.max_forward_gap,
            rep.max_backward_gap,
        )
    return rep.independent
