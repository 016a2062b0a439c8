"""End-to-end acceptance checks.

Each test prints one ``PASS``/``FAIL`` line for its criterion before
asserting, so ``pytest -v -s`` (or the captured output on failure) reads as
a checklist.
"""
import io
import json
import time
from fractions import Fraction

import numpy as np
import pytest

from timeinfo import (
    Direction,
    KnowledgeStatus,
    MeasureContext,
    OperatorKernel,
    ProcessChain,
    TimeMoment,
    TimeMomentSet,
    UnifiedTimeMeasure,
    apply_frame,
    conditional_entropy,
    conservation_check,
    entropy,
    entropy_increase_verdict,
    entropy_reduction_verdict,
    extend_with_blackhole,
    information_volume,
    knowledge_step_profile,
)
from timeinfo.cli import main
from timeinfo.measures import knowledge_tag
from timeinfo.oracle import (
    RationalChain,
    _is_bijection,
    _random_realization,
    enumerate_joint,
    oracle_entropy_laws,
    pair_measures,
    random_chain,
)
from timeinfo.specfile import BUNDLED, bundled_path

TRIALS = 10_000
SEED = 42


@pytest.fixture
def report(capsys):
    def _report(number, title, ok, detail=""):
        with capsys.disabled():
            line = f"criterion {number} {title}: {'PASS' if ok else 'FAIL'}"
            print(f"\n{line}{' (' + detail + ')' if detail else ''}")
        return ok

    return _report


def _law_suite(kind, verdict):
    rng = np.random.default_rng(SEED)
    failures, eq_mismatch, bijections, worst_residual = 0, 0, 0, 0.0
    start = time.perf_counter()
    for _ in range(TRIALS):
        rc = random_chain(rng, kind)
        v = verdict(rc.to_process_chain())
        bij = _is_bijection(rc.kernels[0])
        bijections += bij
        failures += not v.holds
        eq_mismatch += v.equality != bij
        worst_residual = max(worst_residual, abs(v.decomposition_residual))
    return failures, eq_mismatch, bijections, worst_residual, time.perf_counter() - start


def test_entropy_reduction_suite(report):
    failures, eq_mismatch, bij, worst, elapsed = _law_suite("deterministic", entropy_reduction_verdict)
    ok = failures == 0 and eq_mismatch == 0 and elapsed < 10.0
    report(1, "entropy reduction, deterministic kernels", ok,
           f"{TRIALS} trials, {failures} violations, {eq_mismatch} equality mismatches, "
           f"{bij} bijections, {elapsed:.2f} s")
    assert ok


def test_entropy_increase_suite(report):
    failures, eq_mismatch, bij, worst, elapsed = _law_suite("refinement", entropy_increase_verdict)
    ok = failures == 0 and eq_mismatch == 0 and elapsed < 10.0
    report(2, "entropy increase, refinement kernels", ok,
           f"{TRIALS} trials, {failures} violations, {eq_mismatch} equality mismatches, "
           f"{bij} bijections, {elapsed:.2f} s")
    assert ok


def test_reduction_decomposition(report):
    *_, worst, _ = _law_suite("deterministic", entropy_reduction_verdict)
    rc = RationalChain.from_source([Fraction(1, 3)] * 3, [[1, 0], [0, 1], [0, 1]])
    exact = pair_measures(enumerate_joint(rc))
    shown = tuple(f"{exact[k]:.7f}" for k in ("H(X)", "H(Y)", "H(X|Y)"))
    v = entropy_reduction_verdict(rc.to_process_chain())
    engine = tuple(f"{x:.7f}" for x in (v.rhs_bits, v.lhs_bits, v.conditional_bits))
    expected = ("1.5849625", "0.9182958", "0.6666667")
    ok = worst <= 1e-6 and shown == expected and engine == expected
    report(3, "H(X0) = H(Y1) + H(X0|Y1)", ok,
           f"max residual {worst:.2e}; merge example {shown[0]} = {shown[1]} + {shown[2]}")
    assert ok


def _general_chain(rng):
    n, m = int(rng.integers(1, 9)), int(rng.integers(1, 9))
    src = rng.dirichlet(np.ones(n))
    rows = rng.dirichlet(np.ones(m), size=n)
    tgt = src @ rows
    stages = [
        TimeMomentSet(0, tuple((f"x{i + 1}", p) for i, p in enumerate(src))),
        TimeMomentSet(1, tuple((f"y{j + 1}", p) for j, p in enumerate(tgt))),
    ]
    i, j = int(rng.integers(0, n)), int(rng.integers(0, m))
    return ProcessChain(stages, [OperatorKernel(rows)], [f"x{i + 1}", f"y{j + 1}"])


def test_conservation_suite(report):
    rng = np.random.default_rng(SEED)
    worst, broken = 0.0, 0
    for t in range(TRIALS):
        if t % 2:
            chain = _random_realization(rng, random_chain(rng, ("deterministic", "refinement", "bijective")[t % 3]))
            chain = chain.to_process_chain()
        else:
            chain = _general_chain(rng)
        rep = conservation_check(extend_with_blackhole(chain))
        worst = max(worst, abs(rep.start_bits - rep.end_bits))
        broken += not rep.conserved
    doc_out = io.StringIO()
    main(["verify-laws", str(bundled_path("fig4.json")), "--format", "json"], doc_out, io.StringIO())
    ledger = [e["negative_probability"] for e in json.loads(doc_out.getvalue())["ledger"]]
    ok = broken == 0 and worst < 1e-9 and ledger == [-0.8]
    report(4, "conservation with the black-hole extension", ok,
           f"{TRIALS} trials, max |I(start) - I(end)| = {worst:.2e}, fig4 ledger {ledger}")
    assert ok


def test_fig1_reproduction(report):
    out_b, out_a = io.StringIO(), io.StringIO()
    code_b = main(["validate", str(bundled_path("fig1b.json")), "--format", "json"], out_b, io.StringIO())
    code_a = main(["validate", str(bundled_path("fig1a.json")), "--format", "json"], out_a, io.StringIO())
    b, a = json.loads(out_b.getvalue()), json.loads(out_a.getvalue())
    entropies = [s["entropy_bits"] for s in b.get("stages", [])]
    kinds = [(v["kind"], v["deviation"]) for v in a.get("violations", [])]
    ok = code_b == 0 and entropies == [1.0, 1.0] and code_a == 2 and kinds == [("TemporalInconsistency", 0.3)]
    report(5, "two-stage figure reproduction", ok, f"fig1b H = {entropies}, fig1a {kinds}")
    assert ok


def test_knowledge_gate(report):
    rng = np.random.default_rng(SEED)
    bad = 0
    for _ in range(1000):
        n = int(rng.integers(2, 7))
        tick = int(rng.integers(1, 40))
        tms = TimeMomentSet(tick, tuple((f"e{i}", p) for i, p in enumerate(rng.dirichlet(np.ones(n)))))
        label = tms.labels[int(rng.integers(0, n))]
        lo, hi = int(rng.integers(0, tick)), int(rng.integers(tick, 60))
        sweep = sorted(set(rng.integers(lo, hi + 1, size=12).tolist()) | {tick - 1, tick, hi})
        step = [int(a >= tick) for a in sweep]
        kernel = OperatorKernel(rng.dirichlet(np.ones(3), size=n))
        observed = {
            "profile": [v for _, v in knowledge_step_profile(TimeMoment(tick), sweep)],
            "tag": [int(knowledge_tag(tms, label, MeasureContext.at(a)).status is KnowledgeStatus.KNOWLEDGE)
                    for a in sweep],
            "entropy": [int(entropy(tms, MeasureContext.at(a)) == 0.0) for a in sweep],
            "volume": [int(information_volume(tms, label, MeasureContext.at(a)) == 0.0) for a in sweep],
        }
        chain = ProcessChain([tms])
        observed["frame"] = [
            int(apply_frame(chain, UnifiedTimeMeasure.at_tick(chain, a), renormalize=False).stages[0].known)
            for a in sweep
        ]
        # conditional quantities take no window and must not move with the anchor
        ungated = {conditional_entropy(tms, kernel, Direction.FORWARD) for _ in sweep}
        bad += len(ungated) != 1
        bad += any(v != step for v in observed.values())
    ok = bad == 0
    report(6, "knowledge gate step profile", ok, f"1000 (event, sweep) pairs, {bad} mismatches")
    assert ok


def test_oracle_agreement(report):
    rep = oracle_entropy_laws(trials=TRIALS, seed=SEED)
    adv = oracle_entropy_laws(trials=2000, seed=SEED, adversarial=True)
    ok = rep.passed and adv.passed
    report(7, "engine vs exact-rational oracle", ok,
           f"{rep.trials} trials seed {SEED}: {len(rep.divergences)} divergences, "
           f"max gap {rep.max_gap:.2e}; adversarial: {len(adv.divergences)} divergences")
    assert ok, [str(d) for d in (rep.divergences + adv.divergences)[:5]]


def test_cli_golden_determinism(report):
    from pathlib import Path

    golden = Path(__file__).parent / "golden"
    mismatched = []
    for name in BUNDLED:
        for command in ("validate", "analyze", "verify-laws"):
            for form, ext in (("text", "txt"), ("json", "json")):
                runs = []
                for _ in range(3):
                    out = io.StringIO()
                    code = main([command, str(bundled_path(name)), "--format", form], out, io.StringIO())
                    runs.append(f"exit {code}\n{out.getvalue()}")
                path = golden / f"{command}_{name.removesuffix('.json')}.{ext}"
                if len(set(runs)) != 1 or path.read_text() != runs[0]:
                    mismatched.append(path.name)
    ok = not mismatched
    report(8, "CLI golden determinism", ok, f"{len(BUNDLED) * 6} golden files, mismatches: {mismatched or 'none'}")
    assert ok
