"""Brute-force, exact-rational cross-checks for the engine.

Chains here carry :class:`fractions.Fraction` probabilities.  Path
probabilities are enumerated exactly; entropies are only turned into floats
at the very end, through ``log2`` of integer numerators and denominators.
None of this goes through the numpy code paths it is used to check.
"""
from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .blackhole import conservation_check, extend_with_blackhole, raw_conservation_check
from .errors import TooLarge
from .events import OperatorKernel, ProcessChain, TimeMomentSet
from .frames import entropy_increase_verdict, entropy_reduction_verdict
from .measures import Direction, conditional_entropy, entropy, mutual_information_volume

MAX_PATHS = 10**6
DIVERGENCE_TOL = 1e-6
KINDS = ("deterministic", "refinement", "bijective")

__all__ = [
    "RationalChain",
    "enumerate_joint",
    "marginal",
    "exact_entropy",
    "pair_measures",
    "random_chain",
    "Divergence",
    "OracleReport",
    "oracle_entropy_laws",
]


def _frac(v) -> Fraction:
    return v if type(v) is Fraction else Fraction(v)


@dataclass(frozen=True)
class RationalChain:
    """Exact mirror of a :class:`ProcessChain`; all sums must equal 1 exactly."""

    stages: tuple[tuple[tuple[str, Fraction], ...], ...]
    kernels: tuple[tuple[tuple[Fraction, ...], ...], ...]
    ticks: tuple[int, ...] | None = None
    realized: tuple[str, ...] | None = None

    def __post_init__(self):
        stages = tuple(tuple((str(l), _frac(p)) for l, p in s) for s in self.stages)
        kernels = tuple(tuple(tuple(_frac(v) for v in row) for row in k) for k in self.kernels)
        object.__setattr__(self, "stages", stages)
        object.__setattr__(self, "kernels", kernels)
        if self.ticks is None:
            object.__setattr__(self, "ticks", tuple(range(len(stages))))
        if len(kernels) != len(stages) - 1:
            raise ValueError(f"{len(stages)} stages need {len(stages) - 1} kernels")
        for s, stage in enumerate(stages):
            if sum(p for _, p in stage) != 1 or any(p <= 0 for _, p in stage):
                raise ValueError(f"stage {s} is not a positive distribution summing to 1")
        for k, kern in enumerate(kernels):
            if len(kern) != len(stages[k]) or any(len(r) != len(stages[k + 1]) for r in kern):
                raise ValueError(f"kernel {k} has the wrong shape")
            if any(sum(r) != 1 or min(r) < 0 for r in kern):
                raise ValueError(f"kernel {k} is not row-stochastic")

    @classmethod
    def from_source(cls, source: Sequence[Fraction], kernel, source_prefix="x", target_prefix="y"):
        """Two-stage chain whose target is the exact pushforward of ``source``."""
        source = [Fraction(p) for p in source]
        kernel = [[Fraction(v) for v in row] for row in kernel]
        m = len(kernel[0])
        pushed = [sum(source[i] * kernel[i][j] for i in range(len(source))) for j in range(m)]
        keep = [j for j in range(m) if pushed[j] > 0]
        stages = (
            tuple((f"{source_prefix}{i + 1}", p) for i, p in enumerate(source)),
            tuple((f"{target_prefix}{j + 1}", pushed[j]) for j in keep),
        )
        kernel = tuple(tuple(row[j] for j in keep) for row in kernel)
        return cls(stages, (kernel,))

    def with_realized(self, realized) -> RationalChain:
        labels = [self.labels(s) for s in range(len(self.stages))]
        realized = tuple(realized)
        if len(realized) != len(labels) or any(r not in l for r, l in zip(realized, labels)):
            raise ValueError(f"realized path {realized} does not match the stages")
        out = object.__new__(RationalChain)
        for name in ("stages", "kernels", "ticks"):
            object.__setattr__(out, name, getattr(self, name))
        object.__setattr__(out, "realized", realized)
        return out

    def labels(self, s: int) -> tuple[str, ...]:
        return tuple(l for l, _ in self.stages[s])

    def to_process_chain(self) -> ProcessChain:
        stages = [
            TimeMomentSet(t, tuple((l, float(p)) for l, p in s))
            for t, s in zip(self.ticks, self.stages)
        ]
        kernels = [
            OperatorKernel(np.array([[float(v) for v in row] for row in k]))
            for k in self.kernels
        ]
        return ProcessChain(stages, kernels, self.realized)


def enumerate_joint(chain: RationalChain, limit: int = MAX_PATHS) -> dict[tuple[str, ...], Fraction]:
    """Exact probability of every full path with nonzero mass."""
    total = math.prod(len(s) for s in chain.stages)
    if total > limit:
        raise TooLarge(f"{total} paths exceed the limit of {limit}")
    paths: dict[tuple[int, ...], Fraction] = {(i,): p for i, (_, p) in enumerate(chain.stages[0])}
    for kern in chain.kernels:
        nxt = {}
        for path, p in paths.items():
            for j, q in enumerate(kern[path[-1]]):
                if q:
                    nxt[path + (j,)] = p * q
        paths = nxt
    names = [chain.labels(s) for s in range(len(chain.stages))]
    return {tuple(names[s][i] for s, i in enumerate(path)): p for path, p in paths.items()}


def marginal(joint: dict, stages: Sequence[int]) -> dict[tuple[str, ...], Fraction]:
    out: dict[tuple[str, ...], Fraction] = defaultdict(Fraction)
    for path, p in joint.items():
        out[tuple(path[s] for s in stages)] += p
    return dict(out)


def _log2(q: Fraction) -> float:
    return math.log2(q.numerator) - math.log2(q.denominator)


def exact_entropy(dist) -> float:
    """Shannon entropy in bits of exact probabilities (mapping values or a sequence)."""
    values = dist.values() if hasattr(dist, "values") else dist
    return math.fsum(-float(p) * _log2(p) for p in values if p > 0) + 0.0


def pair_measures(joint: dict, a: int = 0, b: int = 1) -> dict[str, float]:
    """H(A), H(B), H(A|B), H(B|A) and I(A;B) between stages ``a`` and ``b``."""
    ha = exact_entropy(marginal(joint, [a]))
    hb = exact_entropy(marginal(joint, [b]))
    hab = exact_entropy(marginal(joint, [a, b]))
    return {
        "H(X)": ha,
        "H(Y)": hb,
        "H(X|Y)": hab - hb,
        "H(Y|X)": hab - ha,
        "I(X;Y)": ha + hb - hab,
    }


def _composition(rng: np.random.Generator, n: int, adversarial: bool = False) -> list[Fraction]:
    if adversarial:
        if n == 1:
            return [Fraction(1)]
        eps = Fraction(1, 10**9)
        rest = _composition(rng, n - 1)
        out = [1 - eps] + [eps * r for r in rest]
        perm = rng.permutation(n)
        return [out[i] for i in perm]
    w = [int(v) for v in rng.integers(1, 21, size=n)]
    total = sum(w)
    return [Fraction(v, total) for v in w]


def _surjection(rng: np.random.Generator, n: int, m: int) -> list[int]:
    """Uniform random map {0..n-1} -> {0..m-1} conditioned on being onto."""
    if m > n:
        raise ValueError("no surjection onto a larger set")
    if m == 1:
        return [0] * n
    targets = np.arange(m)
    while True:
        batch = rng.integers(0, m, size=(256, n))
        onto = np.all(np.any(batch[:, :, None] == targets, axis=1), axis=1)
        hits = np.flatnonzero(onto)
        if hits.size:
            return batch[hits[0]].tolist()


def random_chain(
    rng: np.random.Generator, kind: str, arity_bound: int = 8, adversarial: bool = False
) -> RationalChain:
    """Two-stage chain with a random deterministic, refinement or bijective kernel."""
    if kind == "deterministic":
        n = int(rng.integers(1, arity_bound + 1))
        m = int(rng.integers(1, n + 1))
        f = _surjection(rng, n, m)
        kernel = [[Fraction(int(f[i] == j)) for j in range(m)] for i in range(n)]
    elif kind == "refinement":
        m = int(rng.integers(1, arity_bound + 1))
        n = int(rng.integers(1, m + 1))
        parent = _surjection(rng, m, n)
        kernel = [[Fraction(0)] * m for _ in range(n)]
        for i in range(n):
            children = [j for j in range(m) if parent[j] == i]
            for j, w in zip(children, _composition(rng, len(children))):
                kernel[i][j] = w
    elif kind == "bijective":
        n = int(rng.integers(1, arity_bound + 1))
        perm = rng.permutation(n)
        kernel = [[Fraction(int(perm[i] == j)) for j in range(n)] for i in range(n)]
    else:
        raise ValueError(f"unknown kernel kind {kind!r}")
    source = _composition(rng, len(kernel), adversarial)
    return RationalChain.from_source(source, kernel)


def _random_realization(rng: np.random.Generator, chain: RationalChain) -> RationalChain:
    i = int(rng.integers(0, len(chain.stages[0])))
    reachable = [j for j, q in enumerate(chain.kernels[0][i]) if q > 0]
    j = reachable[int(rng.integers(0, len(reachable)))]
    return chain.with_realized((chain.labels(0)[i], chain.labels(1)[j]))


def _is_bijection(kernel) -> bool:
    n, m = len(kernel), len(kernel[0])
    return n == m and all(sum(1 for v in row if v) == 1 for row in kernel) and all(
        sum(1 for row in kernel if row[j]) == 1 for j in range(m)
    )


@dataclass(frozen=True)
class Divergence:
    trial: int
    kind: str
    quantity: str
    engine: float
    oracle: float

    def __str__(self):
        return f"trial {self.trial} ({self.kind}): {self.quantity} engine={self.engine!r} oracle={self.oracle!r}"


@dataclass(frozen=True)
class OracleReport:
    trials: int
    seed: int
    arity_bound: int
    divergences: tuple[Divergence, ...]
    kinds: dict = field(default_factory=dict)
    equalities: int = 0
    bijections: int = 0
    max_gap: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.divergences


def _check_trial(index: int, kind: str, rc: RationalChain, out: list) -> tuple[bool, bool, float]:
    joint = enumerate_joint(rc)
    want = pair_measures(joint)
    chain = rc.to_process_chain()
    src, kern = chain.stages[0], chain.kernels[0]
    got = {
        "H(X)": entropy(src),
        "H(Y)": entropy(chain.stages[1]),
        "H(X|Y)": conditional_entropy(src, kern, Direction.BACKWARD),
        "H(Y|X)": conditional_entropy(src, kern, Direction.FORWARD),
        "I(X;Y)": float(mutual_information_volume(src, kern)),
    }
    gap = 0.0
    for name, value in got.items():
        d = abs(value - want[name])
        gap = max(gap, d)
        if not d <= DIVERGENCE_TOL:
            out.append(Divergence(index, kind, name, value, want[name]))

    bijective = _is_bijection(rc.kernels[0])
    equal = False
    laws = []
    if kind in ("deterministic", "bijective"):
        laws.append((entropy_reduction_verdict(chain), want["H(Y)"] <= want["H(X)"] + 1e-9, "H(X|Y)"))
    if kind in ("refinement", "bijective"):
        laws.append((entropy_increase_verdict(chain), want["H(Y)"] >= want["H(X)"] - 1e-9, "H(Y|X)"))
    for verdict, oracle_holds, cond in laws:
        name = verdict.law.value
        if verdict.holds != oracle_holds:
            out.append(Divergence(index, kind, f"{name}.holds", verdict.holds, oracle_holds))
        oracle_equal = abs(want["H(Y)"] - want["H(X)"]) < 1e-9
        if verdict.equality != oracle_equal:
            out.append(Divergence(index, kind, f"{name}.equality", verdict.equality, oracle_equal))
        for label, value, ref in (
            ("lhs", verdict.lhs_bits, want["H(Y)"]),
            ("rhs", verdict.rhs_bits, want["H(X)"]),
            ("conditional", verdict.conditional_bits, want[cond]),
            ("residual", verdict.decomposition_residual, 0.0),
        ):
            d = abs(value - ref)
            gap = max(gap, d)
            if not d <= DIVERGENCE_TOL:
                out.append(Divergence(index, kind, f"{name}.{label}", value, ref))
        equal = verdict.equality

    p_start = dict(rc.stages[0])[rc.realized[0]]
    alpha = rc.kernels[0][rc.labels(0).index(rc.realized[0])][rc.labels(1).index(rc.realized[1])]
    start = -_log2(p_start) + 0.0
    raw_end = -_log2(p_start * alpha) + 0.0
    report = conservation_check(extend_with_blackhole(chain))
    raw = raw_conservation_check(chain)
    for label, value, ref in (
        ("conservation.start", report.start_bits, start),
        ("conservation.end", report.end_bits, start),
        ("raw.end", raw.end_bits, raw_end),
    ):
        d = abs(value - ref)
        gap = max(gap, d)
        if not d <= DIVERGENCE_TOL:
            out.append(Divergence(index, kind, label, value, ref))
    if not report.conserved:
        out.append(Divergence(index, kind, "conservation.conserved", False, True))
    return bijective, equal, gap


def oracle_entropy_laws(
    arity_bound: int = 8,
    trials: int = 10_000,
    seed: int = 0,
    kinds: Sequence[str] = KINDS,
    adversarial: bool = False,
) -> OracleReport:
    """Compare the engine with exact enumeration on random two-stage chains.

    Trial ``i`` draws from ``numpy.random.default_rng([seed, i])``, so every
    trial is reproducible on its own and the report does not depend on the
    order trials are run in.
    """
    if not 1 <= arity_bound <= 8:
        raise ValueError("arity_bound must lie in 1..8")
    divergences: list[Divergence] = []
    kinds_seen: Counter = Counter()
    equalities = bijections = 0
    max_gap = 0.0
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        kind = kinds[int(rng.integers(0, len(kinds)))]
        rc = _random_realization(rng, random_chain(rng, kind, arity_bound, adversarial))
        bij, eq, gap = _check_trial(i, kind, rc, divergences)
        kinds_seen[kind] += 1
        bijections += bij
        equalities += eq
        max_gap = max(max_gap, gap)
    return OracleReport(
        trials, seed, arity_bound, tuple(divergences), dict(sorted(kinds_seen.items())),
        equalities, bijections, max_gap,
    )
