"""Command-line interface: scenario in, exact results (and figures) out.

Exit codes: 0 success, 2 malformed input, 3 mathematical infeasibility,
4 internal invariant failure.  Outputs are deterministic for a fixed
(scenario, seed, version) triple; every rational is emitted exactly,
decimal renderings are annotations.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from fractions import Fraction


from . import __version__
from .errors import GreentreeError, InfeasibleError, ScenarioError
from .green import mu_inf_total, pairing
from .hilbert_samuel import hs_convergence_run, inequality_suite
from .positivity import classify, distribution, vol, vol_chi
from .randgen import GeneratorParams
from .scenario import Scenario, jsonable, load_scenario, metrised_doc, rational_str

COMMANDS = (
    "classify",
    "pair",
    "volumes",
    "dgt-profile",
    "hs-converge",
    "check-inequalities",
)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(args)
    except ScenarioError as exc:
        _emit_error(args, 2, str(exc))
        return 2
    except InfeasibleError as exc:
        _emit_error(args, 3, str(exc))
        return 3
    except GreentreeError as exc:
        _emit_error(args, 4, str(exc))
        return 4
    except Exception as exc:  # noqa: BLE001 - invariant failure contract
        _emit_error(args, 4, f"internal error: {type(exc).__name__}: {exc}")
        return 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="greentree",
        description="Exact positivity, volumes and Hilbert-Samuel experiments "
        "for metrised divisors on the tree of a curve",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--scenario", required=True, help="path to the scenario JSON")
    parser.add_argument("--out", help="directory for JSON/CSV/figure outputs")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--seed", type=int, help="RNG seed (check-inequalities)")
    parser.add_argument("--trials", type=int, help="trial count (check-inequalities)")
    parser.add_argument("--n", help="comma-separated n list (hs-converge)")
    parser.add_argument(
        "--no-plot", action="store_true", help="skip figure rendering in --out"
    )
    return parser


def run(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    with open(args.scenario, "rb") as handle:
        digest = hashlib.sha256(handle.read()).hexdigest()

    handler = {
        "classify": cmd_classify,
        "pair": cmd_pair,
        "volumes": cmd_volumes,
        "dgt-profile": cmd_dgt_profile,
        "hs-converge": cmd_hs_converge,
        "check-inequalities": cmd_check_inequalities,
    }[args.command]
    outputs, tables, figures = handler(scenario, args)

    bundle = {
        "command": args.command,
        "scenario": os.path.basename(args.scenario),
        "input_sha256": digest,
        "version": __version__,
        "params": jsonable(scenario.params),
        "outputs": jsonable(outputs),
    }
    text = json.dumps(bundle, indent=2, sort_keys=True)

    if args.out:
        os.makedirs(args.out, exist_ok=True)
        stem = args.command.replace("-", "_")
        with open(os.path.join(args.out, f"{stem}.json"), "w") as handle:
            handle.write(text + "\n")
        for name, (header, rows) in tables.items():
            with open(os.path.join(args.out, name), "w", newline="") as handle:
                writer = csv.writer(handle)
                writer.writerow(header)
                writer.writerows(rows)
        if not args.no_plot:
            for render in figures:
                render(args.out)

    if args.format == "csv" and tables:
        buffer = io.StringIO()
        writer = csv.writer(buffer)
        for name, (header, rows) in tables.items():
            writer.writerow([f"# {name}"])
            writer.writerow(header)
            writer.writerows(rows)
        sys.stdout.write(buffer.getvalue())
    else:
        print(text)
    return 0


def _emit_error(args: argparse.Namespace, code: int, message: str) -> None:
    doc = {"error": message, "exit_code": code}
    try:
        doc["command"] = args.command
    except AttributeError:
        pass
    print(json.dumps(doc, indent=2, sort_keys=True), file=sys.stderr)


def _decimal(q: Fraction) -> str:
    return f"{float(q):.6g}"


# ---------------------------------------------------------------------------
# command handlers: each returns (outputs, csv tables, figure writers)
# ---------------------------------------------------------------------------


def cmd_classify(scenario: Scenario, args) -> tuple[dict, dict, list]:
    g = scenario.divisor()
    result = classify(g)
    outputs = {
        "divisor": metrised_doc(g),
        "big": result.big,
        "pseudo_effective": result.pseudo_effective,
        "effective_up_to_rlin": result.effective_up_to_rlin,
        "lambda_ess": result.lambda_ess,
        "mu_inf": result.mu_inf,
        "witness_slopes": result.witness,
    }
    return outputs, {}, []


def cmd_pair(scenario: Scenario, args) -> tuple[dict, dict, list]:
    g1, g2 = scenario.pair()
    value = pairing(g1, g2)
    outputs = {
        "pairing": value,
        "pairing_decimal": _decimal(value),
        "deg1": g1.deg(),
        "deg2": g2.deg(),
    }
    return outputs, {}, []


def cmd_volumes(scenario: Scenario, args) -> tuple[dict, dict, list]:
    g = scenario.divisor()
    chi = vol_chi(g)
    v = vol(g)
    outputs = {
        "deg": g.deg(),
        "vol_chi": chi,
        "vol_chi_decimal": _decimal(chi),
        "vol": v,
        "vol_decimal": _decimal(v),
        "mu_inf": mu_inf_total(g),
    }
    tables: dict = {}
    figures: list = []
    if g.deg() > 0:
        profile = distribution(g)
        tables["dgt_profile.csv"] = _profile_table(profile)
        figures.append(lambda out: _render_profile(profile, out))
    return outputs, tables, figures


def cmd_dgt_profile(scenario: Scenario, args) -> tuple[dict, dict, list]:
    g = scenario.divisor()
    profile = distribution(g)
    grid = scenario.params.get("t_grid") or []
    from .scenario import parse_rational

    grid_rows = []
    for i, t in enumerate(grid):
        tau = parse_rational(t, f"params.t_grid[{i}]")
        grid_rows.append([rational_str(tau), rational_str(profile.value(tau))])
    outputs = {
        "deg": profile.degree,
        "lambda_ess": profile.lambda_threshold,
        "pieces": [
            {"t_lo": a, "t_hi": b, "deg_lo": va, "deg_hi": vb}
            for a, b, va, vb in profile.pieces()
        ],
        "quantile_vertices": profile.quantile_vertices(),
        "grid": [{"t": t, "deg": v} for t, v in grid_rows],
    }
    tables = {"dgt_profile.csv": _profile_table(profile)}
    if grid_rows:
        tables["dgt_grid.csv"] = (["t", "deg"], grid_rows)
    figures = [lambda out: _render_profile(profile, out)]
    return outputs, tables, figures


def cmd_hs_converge(scenario: Scenario, args) -> tuple[dict, dict, list]:
    g = scenario.divisor()
    ns = _n_list(scenario, args)
    report = hs_convergence_run(g, ns)
    rows = [
        [
            row.n,
            rational_str(row.deg),
            rational_str(row.deg_plus),
            rational_str(row.ratio),
            rational_str(report.target_vol_chi),
            rational_str(row.gap),
        ]
        for row in report.rows
    ]
    outputs = {
        "target_pairing": report.target_pairing,
        "target_vol_chi": report.target_vol_chi,
        "target_vol": report.target_vol,
        "rows": report.rows,
        "final_gap": report.rows[-1].gap if report.rows else None,
    }
    tables = {"hs_converge.csv": (["n", "deg", "deg_plus", "ratio", "target", "gap"], rows)}
    figures = [lambda out: _render_hs(report, out)]
    return outputs, tables, figures


def cmd_check_inequalities(scenario: Scenario, args) -> tuple[dict, dict, list]:
    seed = args.seed if args.seed is not None else int(scenario.params.get("seed", 0))
    trials = args.trials if args.trials is not None else int(scenario.params.get("trials", 100))
    report = inequality_suite(seed, trials, GeneratorParams())
    rows = [
        [name, counter.checked, len(counter.violations)]
        for name, counter in report.checks.items()
    ]
    outputs = {
        "seed": seed,
        "trials": trials,
        "violations": report.total_violations,
        "checks": {
            name: {"checked": c.checked, "violations": c.violations}
            for name, c in report.checks.items()
        },
    }
    tables = {"inequalities.csv": (["check", "checked", "violations"], rows)}
    counts = {name: c.checked for name, c in report.checks.items()}
    figures = [lambda out: _render_counts(counts, out)]
    return outputs, tables, figures


def _n_list(scenario: Scenario, args) -> list[int]:
    if args.n:
        try:
            return [int(part) for part in args.n.split(",") if part.strip()]
        except ValueError as exc:
            raise ScenarioError(f"bad --n list: {exc}") from None
    ns = scenario.params.get("n")
    if not ns:
        raise ScenarioError("hs-converge needs --n or params.n")
    if not isinstance(ns, list) or not all(isinstance(k, int) for k in ns):
        raise ScenarioError("params.n must be a list of integers")
    return ns


def _profile_table(profile) -> tuple[list[str], list[list[str]]]:
    rows = [
        [rational_str(a), rational_str(b), rational_str(va), rational_str(vb)]
        for a, b, va, vb in profile.pieces()
    ]
    rows.append(
        [
            rational_str(profile.lambda_threshold),
            "inf",
            "0",
            "0",
        ]
    )
    return ["t_lo", "t_hi", "deg_lo", "deg_hi"], rows


def _render_profile(profile, out: str) -> None:
    from .figures import render_profile

    render_profile(profile, os.path.join(out, "dgt_profile.png"))


def _render_hs(report, out: str) -> None:
    from .figures import render_hs_convergence

    render_hs_convergence(report, os.path.join(out, "hs_converge.png"))


def _render_counts(counts, out: str) -> None:
    from .figures import render_inequality_margins

    render_inequality_margins(counts, os.path.join(out, "inequalities.png"))


if __name__ == "__main__":
    sys.exit(main())
