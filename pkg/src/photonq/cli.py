"""Command-line entry point: ``photonq <subcommand> [options]``.

Exit status is 0 only when every requested check passes and all I/O
succeeds; 1 signals a failed check, 2 a usage, parse or I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import commcomplex as cc
from . import mbqc, network
from .statevec import Forced, ImpossibleOutcomeError, Sample, fidelity_up_to_phase

DEFAULT_SEED = 0
CSV_HEADER = ("n", "V", "eta", "p_quantum", "p_classical", "advantage")


class CliError(Exception):
    """Reported on stderr with exit status 2."""


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _non_negative(text: str) -> float:
    value = float(text)
    if not math.isfinite(value) or value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative number, got {text}")
    return value


def parse_grid(text: str) -> list[float]:
    """``lo:hi:step`` (inclusive of ``hi``), a comma list, or a single value."""
    text = text.strip()
    if ":" not in text:
        return [float(v) for v in text.split(",") if v.strip()]
    try:
        lo, hi, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like lo:hi:step, got {text!r}") from None
    if step <= 0 or hi < lo:
        raise argparse.ArgumentTypeError(f"grid {text!r} needs step > 0 and hi >= lo")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 12) for i in range(count)]


def parse_n_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _machine_block(payload: dict) -> str:
    return "# machine\n" + json.dumps(payload, sort_keys=True) + "\n"


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def cmd_mbqc_run(args, out) -> int:
    try:
        pattern = mbqc.Pattern.load(args.pattern)
    except OSError as exc:
        raise CliError(f"cannot read pattern: {exc}") from exc
    except mbqc.PatternParseError as exc:
        raise CliError(f"parse error: {exc}") from exc

    if args.forced is not None:
        if len(args.forced) != len(pattern) or set(args.forced) - {"0", "1"}:
            raise CliError(
                f"--forced needs a {len(pattern)}-character bit string, got {args.forced!r}"
            )
        modes = [Forced(int(c)) for c in args.forced]
    else:
        modes = None
    try:
        result = mbqc.run_pattern(pattern, modes, seed=args.seed)
    except ImpossibleOutcomeError as exc:
        raise CliError(str(exc)) from exc

    target = mbqc.circuit_oracle(pattern)
    fidelity = fidelity_up_to_phase(result.corrected_output, target)
    correction = mbqc.correction_label(result.byproduct)
    amps = result.corrected_output.amplitudes
    # Fix the global phase so the printed amplitudes are comparable across runs.
    pivot = amps[np.argmax(np.abs(amps))]
    amps = amps * np.conj(pivot) / abs(pivot)

    print(f"pattern        : {len(pattern)} measurement(s) from {args.pattern}", file=out)
    for j, (nominal, used, s, p) in enumerate(
        zip(pattern.angles, result.adapted_angles, result.outcomes, result.probabilities), start=1
    ):
        note = "adapted" if used != nominal else "nominal"
        print(f"  step {j}: B({used:+.6f}) [{note}, nominal {nominal:+.6f}]  s={s}  p={p:.6f}", file=out)
    print(f"byproduct      : a={result.byproduct.a} b={result.byproduct.b}", file=out)
    print(f"correction     : {correction}", file=out)
    print(f"output         : {amps[0]:.6f} |0> + {amps[1]:.6f} |1>", file=out)
    print(f"fidelity       : {fidelity:.6f}", file=out)
    passed = fidelity >= 1 - mbqc.FIDELITY_TOL
    out.write(
        _machine_block(
            {
                "adapted_angles": [round(a, 12) for a in result.adapted_angles],
                "outcomes": list(result.outcomes),
                "byproduct": [result.byproduct.a, result.byproduct.b],
                "correction": correction,
                "fidelity": round(fidelity, 12),
                "pass": passed,
            }
        )
    )
    return 0 if passed else 1


def cmd_mbqc_verify(args, out) -> int:
    if not 1 <= args.max_length <= mbqc.MAX_VERIFY_LENGTH:
        raise CliError(f"--max-length must be in [1, {mbqc.MAX_VERIFY_LENGTH}]")
    rng = np.random.default_rng(args.seed)
    failures = 0
    total = 0
    worst = 1.0
    for k in range(1, args.max_length + 1):
        if k <= 2:
            patterns = list(mbqc.grid_patterns(k, args.grid))
        else:
            patterns = list(mbqc.random_patterns(k, args.samples, rng))
        k_fail = 0
        for pattern in patterns:
            report = mbqc.verify_pattern(pattern)
            total += len(report.branches)
            worst = min(worst, report.min_fidelity)
            k_fail += sum(
                b.fidelity < args.threshold or abs(b.probability - 2.0**-k) > mbqc.FIDELITY_TOL
                for b in report.branches
            )
        failures += k_fail
        verdict = "PASS" if k_fail == 0 else "FAIL"
        print(f"length {k}: {len(patterns)} pattern(s) x {2**k} branches  {verdict}", file=out)
    print(f"branches checked: {total}, min fidelity {worst:.12f}", file=out)
    print("verdict: " + ("PASS" if failures == 0 else f"FAIL ({failures} branch(es))"), file=out)
    return 0 if failures == 0 else 1


def write_region_csv(samples, stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for s in samples:
        writer.writerow(
            (s.n, _fmt(s.V), _fmt(s.eta), _fmt(s.p_quantum), _fmt(s.p_classical),
             "true" if s.advantage else "false")
        )


def cmd_cc_scan(args, out) -> int:
    v_grid = args.v_grid if args.v_grid is not None else args.grid
    eta_grid = args.eta_grid if args.eta_grid is not None else args.grid
    for name, grid in (("V", v_grid), ("eta", eta_grid)):
        if any(not 0 <= g <= 1 for g in grid):
            raise CliError(f"{name} grid must lie in [0, 1]")
    try:
        samples = cc.scan_region(args.n, v_grid, eta_grid)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    buffer = io.StringIO()
    write_region_csv(samples, buffer)
    if args.out is None or args.out == "-":
        out.write(buffer.getvalue())
    else:
        try:
            Path(args.out).write_text(buffer.getvalue())
        except OSError as exc:
            raise CliError(f"cannot write {args.out}: {exc}") from exc
    return 0


def cmd_cc_simulate(args, out) -> int:
    if args.n % 2 == 0:
        raise CliError("n must be odd for simulation")
    try:
        estimate, stderr = cc.monte_carlo(args.n, args.V, args.eta, args.trials, args.seed)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    analytic = cc.analytic_success(args.n, args.V, args.eta)
    within = abs(estimate - analytic) <= 3 * stderr + 1e-12
    print(f"n={args.n} V={args.V} eta={args.eta} trials={args.trials} seed={args.seed}", file=out)
    print(f"estimate       : {estimate:.6f}", file=out)
    print(f"standard error : {stderr:.6f}", file=out)
    print(f"analytic       : {analytic:.6f}", file=out)
    print(f"p_classical    : {cc.p_classical(args.n):.6f}", file=out)
    print(f"verdict        : {'pass' if within else 'FAIL'} (|diff| <= 3 sigma)", file=out)
    out.write(
        _machine_block(
            {"estimate": estimate, "stderr": stderr, "analytic": analytic, "pass": within}
        )
    )
    return 0 if within else 1


def cmd_cc_min_partners(args, out) -> int:
    n = cc.min_partners(args.V, args.eta, odd_only=args.odd_only)
    parity = "odd n" if args.odd_only else "any n"
    print(f"minimal partners ({parity}) at V={args.V} eta={args.eta}: {n if n else 'none <= 101'}", file=out)
    return 0


def _swap_mode(args):
    return Sample.from_seed(args.seed) if args.forced is None else args.forced


def cmd_swap(args, out) -> int:
    if args.forced is not None and args.forced not in range(4):
        raise CliError("--forced must be a Bell label 0..3")
    outcome, pair = network.entanglement_swap(_swap_mode(args))
    fid = fidelity_up_to_phase(pair, network.bell_pair())
    correction = network.swap_correction(outcome.k) or "I"
    print(f"outcome        : {outcome.k} ({outcome.name})", file=out)
    print(f"probability    : {outcome.probability:.6f}", file=out)
    print(f"correction     : {correction}", file=out)
    print(f"fidelity       : {fid:.6f}", file=out)
    out.write(_machine_block({"k": outcome.k, "probability": round(outcome.probability, 12),
                              "fidelity": round(fid, 12)}))
    return 0 if fid >= 1 - 1e-9 else 1


def cmd_ghz_merge(args, out) -> int:
    if args.forced is not None and args.forced not in range(4):
        raise CliError("--forced must be a Bell label 0..3")
    try:
        outcome, merged = network.ghz_merge(args.n, args.m, _swap_mode(args))
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    size = args.n + args.m - 2
    fid = fidelity_up_to_phase(merged, network.ghz_state(size))
    print(f"outcome        : {outcome.k} ({outcome.name})", file=out)
    print(f"probability    : {outcome.probability:.6f}", file=out)
    print(f"fidelity       : {fid:.6f} with {size}-party GHZ", file=out)
    out.write(_machine_block({"k": outcome.k, "probability": round(outcome.probability, 12),
                              "fidelity": round(fid, 12), "parties": size}))
    return 0 if fid >= 1 - 1e-9 else 1


def cmd_timing(args, out) -> int:
    try:
        budget = mbqc.LatencyBudget(args.detector, args.logic, args.eom, args.index)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    cycle, fiber = mbqc.feed_forward_budget(budget)
    print(f"cycle {cycle:.1f} ns, fiber {fiber:.1f} m", file=out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="photonq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def seeded(p):
        p.add_argument("--seed", type=_u64, default=DEFAULT_SEED, help="RNG seed (default 0)")
        return p

    p = seeded(sub.add_parser("mbqc-run", help="run a measurement pattern with feed-forward"))
    p.add_argument("pattern", help="pattern file: one angle (radians) per line, # comments")
    p.add_argument("--forced", help="bit string of forced outcomes, one per measurement")
    p.set_defaults(func=cmd_mbqc_run)

    p = seeded(sub.add_parser("mbqc-verify", help="all-branch feed-forward equivalence suite"))
    p.add_argument("--max-length", type=int, default=5)
    p.add_argument("--grid", type=_positive_int, default=8, help="angle grid density for lengths 1-2")
    p.add_argument("--samples", type=_positive_int, default=20, help="random patterns per longer length")
    p.add_argument("--threshold", type=float, default=1 - mbqc.FIDELITY_TOL, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_mbqc_verify)

    p = sub.add_parser("cc-scan", help="advantage region over (n, V, eta) as CSV")
    p.add_argument("--n", type=parse_n_list, default=[3, 4, 5], help="comma-separated party counts")
    p.add_argument("--grid", type=parse_grid, default=parse_grid("0:1:0.1"),
                   help="lo:hi:step used for both V and eta unless overridden")
    p.add_argument("--v-grid", type=parse_grid)
    p.add_argument("--eta-grid", type=parse_grid)
    p.add_argument("--out", help="output path; '-' or omitted for stdout")
    p.set_defaults(func=cmd_cc_scan)

    p = seeded(sub.add_parser("cc-simulate", help="Monte Carlo protocol run vs analytic rate"))
    p.add_argument("n", type=int)
    p.add_argument("V", type=float)
    p.add_argument("eta", type=float)
    p.add_argument("--trials", type=_positive_int, default=100_000)
    p.set_defaults(func=cmd_cc_simulate)

    p = sub.add_parser("cc-min-partners", help="smallest party count with an advantage")
    p.add_argument("V", type=float)
    p.add_argument("eta", type=float)
    p.add_argument("--odd-only", action="store_true")
    p.set_defaults(func=cmd_cc_min_partners)

    p = seeded(sub.add_parser("swap", help="entanglement swapping demonstration"))
    p.add_argument("--forced", type=int, help="Bell label 0..3 (Phi+, Phi-, Psi+, Psi-)")
    p.set_defaults(func=cmd_swap)

    p = seeded(sub.add_parser("ghz-merge", help="fuse two GHZ resources"))
    p.add_argument("n", type=int)
    p.add_argument("m", type=int)
    p.add_argument("--forced", type=int, help="Bell label 0..3")
    p.set_defaults(func=cmd_ghz_merge)

    p = sub.add_parser("timing", help="feed-forward latency and fiber delay")
    p.add_argument("--detector", type=_non_negative, default=30.0, help="ns")
    p.add_argument("--logic", type=_non_negative, default=10.0, help="ns")
    p.add_argument("--eom", type=_non_negative, default=110.0, help="ns")
    p.add_argument("--index", type=float, default=mbqc.DEFAULT_FIBER_INDEX, help="fiber refractive index")
    p.set_defaults(func=cmd_timing)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except CliError as exc:
        print(f"photonq {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
