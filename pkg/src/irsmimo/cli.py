"""Command-line interface.

Subcommands:
    place        enumerate candidate sites and show the greedy selection
    optimize     solve one scenario and print the allocation
    sweep        run a configured sweep, write CSV + report figures
    oracle       brute-force a small instance and compare with the solver
    check-props  run the closed-form proposition checks

All subcommands accept --config (YAML scenario/sweep document), --out
(write the textual or CSV output to a file) and --quiet. `sweep --strict`
exits nonzero if any row carries an error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from .allocation import brute_force_oracle, equal_allocation, sca_optimize
from .analysis import double_irs_threshold, scaling_slope
from .config import default_config
from .errors import IrsError
from .experiments import ExperimentSpec, emit_csv, parse_config, run_sweep
from .placement import enumerate_candidates, link_cnr, place_surfaces
from .plots import render_sweep_figures


def _fmt(x) -> str:
    return format(float(x), ".12g")


def _load_spec(args) -> ExperimentSpec:
    if args.config is None:
        return parse_config({})
    with open(args.config) as handle:
        return parse_config(handle.read())


def _deliver(lines, out_path, quiet) -> None:
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w") as handle:
            handle.write(text)
    if not quiet:
        sys.stdout.write(text)


def _cmd_place(args) -> int:
    spec = _load_spec(args)
    config = spec.scenario
    candidates = enumerate_candidates(config)
    lines = [f"candidates ({len(candidates)}):"]
    lines.append("  idx  aod_phase      aoa_phase      x            y            gain")
    for i, cand in enumerate(candidates):
        lines.append(
            f"  {i:>3}  {cand.aod_phase:>13.10f}  {cand.aoa_phase:>13.10f}  "
            f"{cand.position[0]:>11.6f}  {cand.position[1]:>11.6f}  {_fmt(cand.gain)}"
        )
    placement = place_surfaces(config)
    cnr = link_cnr(placement, config)
    lines.append(f"greedy selection (K={config.num_surfaces}):")
    for k, surface in enumerate(placement.surfaces):
        lines.append(
            f"  surface {k + 1}: position ({_fmt(surface.position[0])}, "
            f"{_fmt(surface.position[1])})  aod={_fmt(surface.aod_phase)}  "
            f"aoa={_fmt(surface.aoa_phase)}  |rho|={_fmt(abs(surface.cascade_gain))}  "
            f"cnr={_fmt(cnr[k])}"
        )
    _deliver(lines, args.out, args.quiet)
    return 0


def _cmd_optimize(args) -> int:
    spec = _load_spec(args)
    config = spec.scenario
    placement = place_surfaces(config)
    cnr = link_cnr(placement, config)
    solution = sca_optimize(cnr, config)
    baseline = equal_allocation(cnr, config)
    lines = [
        f"scenario: K={config.num_surfaces}  M={config.element_budget}  "
        f"P={_fmt(config.power_budget)} W",
        f"refinements: {solution.iterations}",
        f"relaxed objective: {_fmt(solution.trace[-1])} bits/s/Hz",
        f"rounded SE: {_fmt(solution.se)} bits/s/Hz "
        f"(equal split: {_fmt(baseline.se)})",
        "  surface  elements  power_w          link_cnr",
    ]
    for k in range(len(solution.elements)):
        lines.append(
            f"  {k + 1:>7}  {solution.elements[k]:>8}  "
            f"{solution.powers[k]:<15.10g}  {_fmt(cnr[k])}"
        )
    _deliver(lines, args.out, args.quiet)
    return 0


def _cmd_sweep(args) -> int:
    spec = _load_spec(args)
    rows = run_sweep(spec, collect_timings=args.timings)
    out_path = args.out or spec.output_path or "sweep.csv"
    emit_csv(rows, out_path)
    messages = [f"wrote {len(rows)} rows to {out_path}"]
    if not args.no_plots:
        out_dir = os.path.dirname(os.path.abspath(out_path))
        stem = os.path.splitext(os.path.basename(out_path))[0]
        for path in render_sweep_figures(rows, spec.sweep_variable, out_dir, stem):
            messages.append(f"wrote figure {path}")
    failures = [r for r in rows if r["error"]]
    for row in failures:
        messages.append(
            f"error row: value={_fmt(row['sweep_value'])} strategy={row['strategy']} "
            f"K={row['K']}: {row['error']}"
        )
    if not args.quiet:
        print("\n".join(messages))
    if failures and args.strict:
        return 2
    return 0


def _cmd_oracle(args) -> int:
    if args.config is None:
        config = default_config(element_budget=30, num_surfaces=3)
    else:
        spec = _load_spec(args)
        config = spec.scenario
    placement = place_surfaces(config)
    cnr = link_cnr(placement, config)
    oracle = brute_force_oracle(cnr, config)
    solver = sca_optimize(cnr, config)
    gap = oracle.se - solver.se
    lines = [
        f"instance: K={config.num_surfaces}  M={config.element_budget}  "
        f"P={_fmt(config.power_budget)} W",
        f"oracle elements: {';'.join(str(m) for m in oracle.elements)}",
        f"oracle SE: {_fmt(oracle.se)} bits/s/Hz",
        f"solver elements: {';'.join(str(m) for m in solver.elements)}",
        f"solver SE: {_fmt(solver.se)} bits/s/Hz",
        f"gap (oracle - solver): {_fmt(gap)}",
    ]
    _deliver(lines, args.out, args.quiet)
    return 0


def _cmd_check_props(args) -> int:
    lines = []
    failures = 0

    def record(ok: bool, label: str, detail: str):
        nonlocal failures
        if not ok:
            failures += 1
        lines.append(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")

    # Single vs double surface threshold at the closed-form boundary.
    power, elements = 1.0, 100
    chi = 48.0 / (power * elements**2)
    decision = double_irs_threshold(chi, power, elements)
    boundary_err = max(
        abs(decision.single_rate - math.log2(49.0)),
        abs(decision.double_rate - math.log2(49.0)),
    )
    sign_ok = True
    for q in np.geomspace(1.0, 1e4, 50):
        d = double_irs_threshold(q / (power * elements**2), power, elements)
        if q > 48.0 and d.double_rate <= d.single_rate:
            sign_ok = False
        if q < 48.0 and d.double_rate >= d.single_rate:
            sign_ok = False
    record(
        boundary_err <= 1e-9 and sign_ok,
        "split threshold",
        f"boundary error {boundary_err:.3e}, sign pattern {'ok' if sign_ok else 'wrong'}",
    )

    # Near-equal optimal split at a large element budget.
    k, m_big = 4, 2**14
    config = default_config(num_surfaces=k, element_budget=m_big, power_budget=1.0)
    cnr = np.full(k, 1e-3)
    sca = sca_optimize(cnr, config)
    equal = equal_allocation(cnr, config)
    rel = (sca.se - equal.se) / sca.se
    max_dev = max(abs(m - m_big / k) for m in sca.elements)
    record(
        0.0 <= rel <= 1e-3 and max_dev <= 1.0,
        "equal-split asymptotics",
        f"relative gain {rel:.3e}, max deviation from M/K: {max_dev:.1f}",
    )

    # Rate slopes per budget doubling.
    slope_ok = True
    details = []
    for kk in (1, 2, 4):
        cfg = default_config(num_surfaces=kk, power_budget=1.0)
        cnr_k = np.full(kk, 1e-2)
        rep = scaling_slope(cnr_k, cfg, "elements", [2**12, 2**13, 2**14])
        err = abs(rep.fitted_slope - rep.theoretical_slope) / rep.theoretical_slope
        details.append(f"M-slope K={kk}: {rep.fitted_slope:.4f}")
        slope_ok &= err <= 0.03
    record(slope_ok, "element-doubling slope", ", ".join(details))

    slope_ok = True
    details = []
    for kk in (1, 2, 4):
        cfg = default_config(num_surfaces=kk, element_budget=2400)
        cnr_k = np.full(kk, 1e-2)
        rep = scaling_slope(cnr_k, cfg, "power", [2**10, 2**11, 2**12])
        err = abs(rep.fitted_slope - rep.theoretical_slope) / rep.theoretical_slope
        details.append(f"P-slope K={kk}: {rep.fitted_slope:.4f}")
        slope_ok &= err <= 0.03
    record(slope_ok, "power-doubling slope", ", ".join(details))

    lines.append(f"{4 - failures}/4 checks passed")
    _deliver(lines, args.out, args.quiet)
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="irsmimo",
        description="Multi-surface MIMO placement, beamforming and allocation toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="YAML scenario/sweep document")
        p.add_argument("--out", help="write the output to this path")
        p.add_argument("--quiet", action="store_true", help="suppress stdout")

    p = sub.add_parser("place", help="enumerate candidates and greedy selection")
    common(p)
    p.set_defaults(func=_cmd_place)

    p = sub.add_parser("optimize", help="solve one scenario")
    common(p)
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("sweep", help="run a sweep, write CSV and figures")
    common(p)
    p.add_argument("--strict", action="store_true",
                   help="exit nonzero if any row records an error")
    p.add_argument("--timings", action="store_true",
                   help="record wall_ms per row (output no longer byte-stable)")
    p.add_argument("--no-plots", action="store_true",
                   help="skip rendering the report figures")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("oracle", help="brute-force a small instance")
    common(p)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("check-props", help="run the closed-form proposition checks")
    common(p)
    p.set_defaults(func=_cmd_check_props)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except IrsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
