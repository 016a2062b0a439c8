"""Command-line front end: ``timeinfo validate | analyze | verify-laws``.

Exit codes: 0 ok, 1 unreadable or malformed document, 2 invalid chain,
3 bad flags, 4 a law verdict failed.  Every number is printed with seven
decimals, rounded half to even, so reports are byte-stable.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import re
import sys
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path

from . import __version__
from .blackhole import (
    NATURAL_THRESHOLD,
    classify_variation,
    conservation_check,
    extend_with_blackhole,
    raw_conservation_check,
)
from .errors import InvalidFrame, TimeInfoError
from .events import ProcessChain, check_surjectivity, independence_test, validate_chain
from .frames import (
    UnifiedTimeMeasure,
    apply_frame,
    entropy_increase_verdict,
    entropy_reduction_verdict,
    recall_entropy,
)
from .measures import (
    Direction,
    MeasureContext,
    conditional_entropy,
    information_volume,
    knowledge_step_profile,
    mutual_information_volume,
    shannon_entropy,
)
from .oracle import oracle_entropy_laws
from .specfile import SpecError, load_document

EXIT_OK, EXIT_PARSE, EXIT_INVALID, EXIT_FLAGS, EXIT_LAW = 0, 1, 2, 3, 4
_Q = Decimal("0.0000001")


def fmt(x) -> str:
    """Seven decimals, round half to even, on the shortest decimal form of ``x``."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    out = format(Decimal(repr(x)).quantize(_Q, rounding=ROUND_HALF_EVEN), "f")
    return "0.0000000" if out == "-0.0000000" else out


def _num(x):
    """JSON form of a number: the same rounded value the text report prints."""
    s = fmt(x)
    return s if s.endswith("inf") else float(s)


def _yn(flag) -> str:
    return "yes" if flag else "no"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_FLAGS, f"{self.prog}: error: {message}\n")


def _emit(report: dict, fmt_name: str, render, out):
    if fmt_name == "json":
        out.write(json.dumps(report, indent=2, ensure_ascii=False) + "\n")
    else:
        out.write("\n".join(render(report)) + "\n")


def _violation_dicts(report):
    return [
        {
            "stage": v.stage,
            "kind": v.kind.value,
            "deviation": None if v.deviation is None else _num(v.deviation),
            "detail": v.detail,
        }
        for v in report.violations
    ]


def _violation_lines(rows):
    out = []
    for v in rows:
        where = "chain" if v["stage"] is None else f"stage {v['stage']}"
        dev = "" if v["deviation"] is None else f" deviation {fmt(v['deviation'])}"
        out.append(f"{where}: {v['kind']}{dev}: {v['detail']}")
    return out


# validate ------------------------------------------------------------------


def build_validate(doc) -> dict:
    chain = doc.chain
    report = validate_chain(chain)
    out = {"command": "validate", "document": doc.name, "ok": report.ok}
    if report.ok:
        out["stages"] = [
            {"index": i, "tick": s.moment.tick, "entropy_bits": _num(shannon_entropy(s.probabilities))}
            for i, s in enumerate(chain.stages)
        ]
    out["violations"] = _violation_dicts(report)
    return out


def render_validate(r: dict) -> list[str]:
    lines = [f"document: {r['document']}"]
    if r["ok"]:
        lines.append("OK")
        for s in r["stages"]:
            lines.append(f"stage {s['index']} tick {s['tick']}: H = {fmt(s['entropy_bits'])} bits")
    else:
        lines.append(f"INVALID: {len(r['violations'])} violation(s)")
        lines.extend(_violation_lines(r["violations"]))
    return lines


# analyze -------------------------------------------------------------------


def _sweep(chain: ProcessChain) -> list[int]:
    first, last = chain.stages[0].moment.tick, chain.stages[-1].moment.tick
    return list(range(max(first - 1, 0), last + 2))


def _frame_view(chain, frame):
    return apply_frame(chain, frame, renormalize=chain.realized is not None)


def build_analyze(doc, frame_anchor=None, threshold=NATURAL_THRESHOLD) -> dict:
    chain = doc.chain
    anchor = doc.frame_anchor if frame_anchor is None else frame_anchor
    if anchor is None:
        frame = None
        stages = [
            (s, "UNCERTAIN", s, shannon_entropy(s.probabilities)) for s in chain.stages
        ]
        kernels = chain.kernels
        effective = {}
    else:
        frame = UnifiedTimeMeasure.at_stage(chain, anchor)
        view = _frame_view(chain, frame)
        stages = [(raw, fs.status.value, fs.distribution, fs.entropy) for raw, fs in zip(chain.stages, view.stages)]
        kernels = chain.kernels
        effective = {t.step: t for t in view.transitions}
    ctx = MeasureContext(None if frame is None else frame.window)

    out_stages = []
    for i, (raw, status, dist, h) in enumerate(stages):
        realized = None if chain.realized is None else chain.realized[i]
        out_stages.append(
            {
                "index": i,
                "tick": raw.moment.tick,
                "status": status,
                "realized": realized,
                "entropy_bits": _num(h),
                "raw_entropy_bits": _num(shannon_entropy(raw.probabilities)),
                "outcomes": [
                    {
                        "label": label,
                        "probability": _num(p),
                        "information_bits": _num(information_volume(dist, label, ctx)),
                    }
                    for label, p in dist.outcomes
                ],
            }
        )

    transitions = []
    for k, kernel in enumerate(kernels):
        src = chain.stages[k]
        entry = {
            "step": k,
            "kind": kernel.kind.value,
            "independent": independence_test(src, kernel),
            "mutual_information_bits": _num(mutual_information_volume(src, kernel)),
            "mutual_information_tag": "analytic-only",
            "conditional_entropy_forward_bits": _num(conditional_entropy(src, kernel, Direction.FORWARD)),
            "conditional_entropy_backward_bits": _num(conditional_entropy(src, kernel, Direction.BACKWARD)),
            "realized": None,
        }
        if chain.realized is not None:
            i = src.index(chain.realized[k])
            j = chain.stages[k + 1].index(chain.realized[k + 1])
            alpha = float(kernel.rows[i, j])
            t = effective.get(k)
            verdict = classify_variation(src, kernel, j, threshold, source_label=chain.realized[k])
            entry["realized"] = {
                "source": chain.realized[k],
                "target": chain.realized[k + 1],
                "raw_probability": _num(alpha),
                "effective_probability": _num(alpha if t is None else t.effective_probability),
                "variation": verdict.kind.value,
            }
        transitions.append(entry)

    sweep = _sweep(chain)
    step_effect = []
    if chain.realized is not None:
        for i, (label, stage) in enumerate(zip(chain.realized, chain.stages)):
            profile = knowledge_step_profile(stage.moment, sweep)
            step_effect.append(
                {
                    "stage": i,
                    "label": label,
                    "tick": stage.moment.tick,
                    "series": [[a.tick, v] for a, v in profile],
                }
            )
    trajectory = []
    for tick in sweep:
        view = _frame_view(chain, UnifiedTimeMeasure.at_tick(chain, tick))
        trajectory.append([tick, _num(view.stages[-1].entropy)])

    return {
        "command": "analyze",
        "document": doc.name,
        "frame": None
        if frame is None
        else {"anchor_stage": frame.anchor_stage, "anchor_tick": frame.window.anchor.tick},
        "stages": out_stages,
        "transitions": transitions,
        "step_effect": step_effect,
        "entropy_trajectory": trajectory,
    }


def render_analyze(r: dict) -> list[str]:
    lines = [f"document: {r['document']}"]
    if r["frame"] is None:
        lines.append("frame: none (raw analysis)")
    else:
        f = r["frame"]
        lines.append(f"frame: anchor stage {f['anchor_stage']}, window (F, {f['anchor_tick']}]")
    for s in r["stages"]:
        realized = "" if s["realized"] is None else f" realized={s['realized']}"
        lines.append(
            f"stage {s['index']} tick {s['tick']} {s['status']}{realized}: "
            f"H = {fmt(s['entropy_bits'])} bits (raw {fmt(s['raw_entropy_bits'])})"
        )
        for o in s["outcomes"]:
            lines.append(
                f"  {o['label']}: p = {fmt(o['probability'])}, I = {fmt(o['information_bits'])} bits"
            )
    for t in r["transitions"]:
        lines.append(
            f"transition {t['step']} -> {t['step'] + 1} ({t['kind']}): "
            f"independent={_yn(t['independent'])}, "
            f"I(X;Y) = {fmt(t['mutual_information_bits'])} bits [{t['mutual_information_tag']}], "
            f"H(Y|X) = {fmt(t['conditional_entropy_forward_bits'])}, "
            f"H(X|Y) = {fmt(t['conditional_entropy_backward_bits'])}"
        )
        rz = t["realized"]
        if rz is not None:
            lines.append(
                f"  realized {rz['source']} -> {rz['target']}: raw rho = {fmt(rz['raw_probability'])}, "
                f"effective rho = {fmt(rz['effective_probability'])}, variation {rz['variation']}"
            )
    for s in r["step_effect"]:
        series = " ".join(f"{a}:{v}" for a, v in s["series"])
        lines.append(f"step effect {s['label']} (stage {s['stage']}, tick {s['tick']}): {series}")
    series = " ".join(f"{a}:{fmt(v)}" for a, v in r["entropy_trajectory"])
    lines.append(f"entropy trajectory (last stage): {series}")
    return lines


def write_plot_series(report: dict, directory) -> list[Path]:
    """Write each series as ``anchor_tick,value`` CSV files into ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []

    def dump(name, rows, render):
        path = directory / name
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["anchor_tick", "value"])
            for a, v in rows:
                w.writerow([a, render(v)])
        written.append(path)

    dump("entropy_trajectory.csv", report["entropy_trajectory"], fmt)
    for s in report["step_effect"]:
        safe = re.sub(r"[^A-Za-z0-9_.-]", "_", s["label"])
        dump(f"step_effect_{s['stage']}_{safe}.csv", s["series"], str)
    return written


# verify-laws ---------------------------------------------------------------


def _row(law, step, status, equality=None, lhs=None, rhs=None, value=None, note=""):
    return {
        "law": law,
        "step": step,
        "status": status,
        "equality": equality,
        "lhs_bits": None if lhs is None else _num(lhs),
        "rhs_bits": None if rhs is None else _num(rhs),
        "value_bits": None if value is None else _num(value),
        "note": note,
    }


def _status(ok) -> str:
    return "holds" if ok else "fails"


def build_verify(doc, threshold=NATURAL_THRESHOLD) -> dict:
    chain = doc.chain
    report = validate_chain(chain)
    out = {"command": "verify-laws", "document": doc.name, "ok": report.ok}
    if not report.ok:
        out["violations"] = _violation_dicts(report)
        return out
    rows = []
    for k, kernel in enumerate(chain.kernels):
        target = chain.stages[k + 1]
        bij = kernel.is_bijective
        if kernel.is_deterministic:
            sj = check_surjectivity(kernel, target)
            rows.append(_row("Lemma 1", k, _status(sj.surjective), note=f"witness {sj.witness}" if sj.witness else "surjective"))
            v = entropy_reduction_verdict(chain, k)
            rows.append(_row("T1", k, _status(v.holds), v.equality, v.lhs_bits, v.rhs_bits, note=f"equality reason {v.equality_reason.value}"))
            rows.append(_row("Eq10", k, _status(v.decomposition_holds), None, v.lhs_bits + v.conditional_bits, v.rhs_bits, v.decomposition_residual, "H(X0) = H(Y1) + H(X0|Y1)"))
            rows.append(_row("Inf 1.1", k, _status(v.equality == bij), v.equality, note=f"bijective={_yn(bij)}"))
            rows.append(_row("Inf 1.2", k, "holds", value=recall_entropy(chain, k, expected=True), note="H(X0|Y1) = H(X0) - H(Y1)"))
            if chain.realized is not None:
                rows.append(_row("Inf 1.2", k, "info", value=recall_entropy(chain, k), note=f"recall given {chain.realized[k + 1]}"))
        else:
            rows.append(_row("T1", k, "out-of-hypothesis", note=f"{kernel.kind.value} kernel is not deterministic"))
        if kernel.is_refinement:
            v = entropy_increase_verdict(chain, k)
            rows.append(_row("T2", k, _status(v.holds), v.equality, v.lhs_bits, v.rhs_bits, note=v.note))
            rows.append(_row("Inf 2.1", k, _status(v.equality == bij), v.equality, note=f"bijective={_yn(bij)}"))
            rows.append(_row("Inf 2.2", k, _status(v.decomposition_holds), None, v.lhs_bits, v.rhs_bits + v.conditional_bits, v.conditional_bits, "H(Y1) = H(X0) + H(Y1|X0)"))
        else:
            rows.append(_row("T2", k, "out-of-hypothesis", note=f"{kernel.kind.value} kernel is not a refinement"))
        if chain.realized is not None:
            src = chain.stages[k]
            j = target.index(chain.realized[k + 1])
            var = classify_variation(src, kernel, j, threshold, source_label=chain.realized[k])
            rows.append(_row("Variation", k, "info", value=var.information_bits, note=f"{var.kind.value} (rho = {fmt(var.alpha)})"))
    ledger = []
    if chain.realized is not None:
        ext = extend_with_blackhole(chain)
        cons = conservation_check(ext)
        raw = raw_conservation_check(chain)
        note = "black-hole extension" + (" (extrapolated setting)" if cons.extrapolated else "")
        rows.append(_row("T3", None, _status(cons.conserved), None, cons.end_bits, cons.start_bits, note=note))
        rows.append(_row("T3 raw", None, "info", None, raw.end_bits, raw.start_bits, note=f"without black hole conserved={_yn(raw.conserved)}"))
        ledger = [
            {
                "stage": e.stage_index,
                "source": e.source_label,
                "lost": e.lost_label,
                "negative_probability": _num(e.negative_probability),
            }
            for e in ext.ledger
        ]
        out["lost_mass"] = [
            {"stage": m.stage_index, "source": m.source_label, "realized": m.realized_label,
             "alpha": _num(m.alpha), "negative_probability": _num(m.negative_probability)}
            for m in ext.lost
        ]
    out["rows"] = rows
    out["ledger"] = ledger
    out["all_hold"] = all(r["status"] != "fails" for r in rows)
    return out


def build_verify_random(trials: int, seed: int) -> dict:
    rep = oracle_entropy_laws(arity_bound=8, trials=trials, seed=seed)
    return {
        "command": "verify-laws",
        "mode": "random",
        "trials": rep.trials,
        "seed": rep.seed,
        "arity_bound": rep.arity_bound,
        "kinds": rep.kinds,
        "equalities": rep.equalities,
        "bijections": rep.bijections,
        "max_gap": _num(rep.max_gap),
        "failed_trials": len({d.trial for d in rep.divergences}),
        "divergences": [str(d) for d in rep.divergences],
        "all_hold": rep.passed,
    }


def _opt(x):
    return "-" if x is None else fmt(x)


def render_verify(r: dict) -> list[str]:
    if r.get("mode") == "random":
        kinds = ", ".join(f"{k}={v}" for k, v in r["kinds"].items())
        lines = [
            f"random verification: {r['trials']} trials, seed {r['seed']}, arity <= {r['arity_bound']}",
            f"kinds: {kinds}",
            f"equality verdicts: {r['equalities']}, bijections: {r['bijections']}",
            f"max engine/oracle gap: {fmt(r['max_gap'])}",
        ]
        lines.extend(f"DIVERGENCE {d}" for d in r["divergences"])
        lines.append(
            f"summary: {r['trials'] - r['failed_trials']} of {r['trials']} trials pass, "
            f"{len(r['divergences'])} divergences -> {'PASS' if r['all_hold'] else 'FAIL'}"
        )
        return lines
    lines = [f"document: {r['document']}"]
    if not r["ok"]:
        lines.append("INVALID chain")
        lines.extend(_violation_lines(r["violations"]))
        return lines
    lines.append(f"{'law':<9} {'step':>4}  {'status':<18} {'equal':<5} {'lhs':>10} {'rhs':>10} {'value':>10}  note")
    for row in r["rows"]:
        step = "-" if row["step"] is None else str(row["step"])
        eq = "-" if row["equality"] is None else _yn(row["equality"])
        lines.append(
            f"{row['law']:<9} {step:>4}  {row['status']:<18} {eq:<5} "
            f"{_opt(row['lhs_bits']):>10} {_opt(row['rhs_bits']):>10} {_opt(row['value_bits']):>10}  {row['note']}"
        )
    for e in r["ledger"]:
        lines.append(f"black hole: stage {e['stage']} {e['source']} -/-> {e['lost']} rho = {fmt(e['negative_probability'])}")
    for m in r.get("lost_mass", []):
        lines.append(f"lost mass: stage {m['stage']} {m['source']} -> {m['realized']} alpha - 1 = {fmt(m['negative_probability'])}")
    lines.append(f"summary: {'ALL HOLD' if r['all_hold'] else 'FAILURE'}")
    return lines


# entry point ---------------------------------------------------------------


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="timeinfo", description="Time-indexed information measures for discrete process chains.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--threshold", type=float, default=NATURAL_THRESHOLD,
                       help="largest realized probability counted as natural variation")

    p = sub.add_parser("validate", help="check a chain document")
    p.add_argument("path")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("analyze", help="entropies, knowledge status and step effect")
    p.add_argument("path")
    p.add_argument("--frame-anchor", type=int, default=None, metavar="N")
    p.add_argument("--plot-out", default=None, metavar="DIR",
                   help="directory for anchor_tick,value CSV series")
    common(p)

    p = sub.add_parser("verify-laws", help="entropy laws and conservation, or random oracle runs")
    p.add_argument("path", nargs="?")
    p.add_argument("--random", nargs=2, type=int, metavar=("TRIALS", "SEED"))
    common(p)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = make_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    threshold = getattr(args, "threshold", NATURAL_THRESHOLD)
    if not 0.0 <= threshold < 1.0:
        err.write("timeinfo: error: --threshold must lie in [0, 1)\n")
        return EXIT_FLAGS

    if args.command == "verify-laws" and args.random is not None:
        if args.path is not None:
            err.write("timeinfo: error: give either a path or --random, not both\n")
            return EXIT_FLAGS
        trials, seed = args.random
        if trials < 1 or seed < 0:
            err.write("timeinfo: error: --random needs trials >= 1 and seed >= 0\n")
            return EXIT_FLAGS
        report = build_verify_random(trials, seed)
        _emit(report, args.format, render_verify, out)
        return EXIT_OK if report["all_hold"] else EXIT_LAW
    if args.path is None:
        err.write("timeinfo: error: a document path is required\n")
        return EXIT_FLAGS

    try:
        doc = load_document(args.path)
    except SpecError as exc:
        err.write(f"timeinfo: parse error: {exc}\n")
        return EXIT_PARSE

    if args.command == "validate":
        report = build_validate(doc)
        _emit(report, args.format, render_validate, out)
        return EXIT_OK if report["ok"] else EXIT_INVALID

    validation = validate_chain(doc.chain)
    if args.command == "verify-laws":
        report = build_verify(doc, threshold)
        _emit(report, args.format, render_verify, out)
        if not report["ok"]:
            return EXIT_INVALID
        return EXIT_OK if report["all_hold"] else EXIT_LAW

    if not validation.ok:
        _emit(build_validate(doc), args.format, render_validate, out)
        return EXIT_INVALID
    try:
        report = build_analyze(doc, args.frame_anchor, threshold)
    except InvalidFrame as exc:
        err.write(f"timeinfo: error: {exc}\n")
        return EXIT_FLAGS
    except TimeInfoError as exc:
        err.write(f"timeinfo: error: {exc}\n")
        return EXIT_INVALID
    _emit(report, args.format, render_analyze, out)
    if args.plot_out:
        write_plot_series(report, args.plot_out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
