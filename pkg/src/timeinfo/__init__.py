"""Time-indexed information measures for discrete process chains.

Outcomes are pinned to moments on a discrete time axis.  Whether an outcome
still carries information depends on an observation window: once its moment
is inside the window it is knowledge and its information volume is zero.
"""

__version__ = "0.1.0"

from .blackhole import (
    BLACK_HOLE,
    INFINITE_BITS,
    BlackHoleEntry,
    ConservationReport,
    ExtendedChain,
    Variation,
    classify_variation,
    conservation_check,
    extend_with_blackhole,
    raw_conservation_check,
)
from .errors import *  # noqa: F401,F403
from .events import (
    KernelKind,
    OperatorKernel,
    ProcessChain,
    TimeMomentSet,
    ValidationReport,
    Violation,
    ViolationKind,
    check_surjectivity,
    independence_test,
    pushforward,
    reverse_kernel,
    validate_chain,
)
from .frames import (
    LawVerdict,
    UnifiedTimeMeasure,
    apply_frame,
    entropy_increase_verdict,
    entropy_reduction_verdict,
    recall_entropy,
)
from .measures import (
    Direction,
    KnowledgeStatus,
    MeasureContext,
    conditional_entropy,
    entropy,
    information_volume,
    joint_distribution,
    knowledge_step_profile,
    mutual_information_volume,
)
from .timeline import (
    PAST_INFINITE,
    ObservationWindow,
    TimeMoment,
    compare_durations,
    interval_to_frequency,
    window_contains,
)
