"""Command-line entry point.

Exit codes: 0 success, 1 a verification check failed, 2 configuration
error, 3 guard violation, 4 inconclusive.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .experiments import (
    ExperimentConfig,
    Inconclusive,
    run_census,
    run_theorem_a,
    run_theorem_b,
    validate_config,
)
from .forms import SIDES, ConfigError, GroupSpec, classify_form, reference_spec, render_form
from .measures import ThetaDist, UnsupportedConfiguration
from .samplers import GENERATORS, SamplerStarvation, SamplerStats, dump_header, make_rng
from .stratify import GuardExceeded

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_GUARD, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="amalgam",
                                description="Normal forms in amalgamated products of free groups")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", type=Path, help="group spec file (default: shipped reference)")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--seed", type=int, help="master seed (required for sampling)")
    common.add_argument("--n-max", type=int, default=6)
    common.add_argument("--k-max", type=int, default=8)
    common.add_argument("--samples", type=int, default=10 ** 4)
    common.add_argument("--radius", type=int, help="loop radius for the stability search")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="lint a spec file")
    sub.add_parser("build", parents=[common], help="fold subgroup graphs, write DOT")
    sub.add_parser("census", parents=[common], help="exact strata and (n, k) grids")
    s = sub.add_parser("sample", parents=[common], help="draw random normal forms")
    s.add_argument("--form", choices=sorted(GENERATORS), default="CNF")
    s.add_argument("--s", type=float, default=1 / 3, help="stop probability of syllable walks")
    s.add_argument("--theta", default="zeta2", choices=("zeta2", "geometric", "uniform"))
    s.add_argument("--theta-param", type=float, default=0.0)
    sub.add_parser("theorem-a", parents=[common], help="negligibility of unstable forms")
    b = sub.add_parser("theorem-b", parents=[common], help="regular languages and F_0 bound")
    b.add_argument("--containment-samples", type=int, default=10 ** 5)
    return p


def _spec(args) -> GroupSpec:
    return reference_spec() if args.spec is None else GroupSpec.from_file(args.spec)


def _config(args, kind: str) -> ExperimentConfig:
    return ExperimentConfig(_spec(args), kind, args.n_max, args.k_max, samples=args.samples,
                            seed=args.seed, radius=args.radius, out=args.out)


def cmd_validate(args) -> int:
    for line in validate_config(_spec(args)):
        print(line)
    return EXIT_OK


def cmd_build(args) -> int:
    spec = _spec(args)
    for side in SIDES:
        G = spec.graph(side)
        T = spec.transversal(side)
        dot = G.to_dot(spec.alpha[side], f"Gamma_{side}")
        reps = "\n".join(spec.alpha[side].render(T.rep[v]) or "1" for v in range(G.num_vertices))
        if args.out is None:
            print(dot, end="")
        else:
            args.out.mkdir(parents=True, exist_ok=True)
            (args.out / f"graph_{side}.dot").write_text(dot)
            (args.out / f"transversal_{side}.txt").write_text(reps + "\n")
        print(f"# {side}: {G.num_vertices} vertices, {G.num_edges} edges", file=sys.stderr)
    return EXIT_OK


def cmd_census(args) -> int:
    res = run_census(_config(args, "census"))
    for rec in res["strata"]:
        print(" ".join(f"{k}={v}" for k, v in rec.items()))
    return EXIT_OK


def cmd_sample(args) -> int:
    cfg = _config(args, "sample-sweep")
    cfg.check(sampling=True)
    domain = "CRF0" if args.form == "CRF" else "N0"
    try:
        theta = ThetaDist(args.theta, args.theta_param, domain)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    rng = make_rng(args.seed)
    spec = cfg.spec
    lines = [dump_header(args.seed, args.s, args.s, theta, spec)]
    stats = SamplerStats()
    for _ in range(args.samples):
        if args.form == "CRF":
            nf = GENERATORS["CRF"](spec, theta, args.s, args.s, rng, stats=stats)
        else:
            nf = GENERATORS[args.form](spec, theta, args.s, args.s, rng)
        cls = classify_form(nf, spec)
        lines.append(f"{nf.k}\t{int(cls.unstable)}\t{render_form(nf, spec)}\n")
    if args.form == "CRF":
        lines.append(f"# acceptance={stats.acceptance_rate:.6g} attempts={stats.attempts}\n")
    text = "".join(lines)
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / f"samples_{args.form}.tsv").write_text(text)
    return EXIT_OK


def cmd_theorem_a(args) -> int:
    rep = run_theorem_a(_config(args, "theorem-a"))
    print(rep.render(), end="")
    ok = all(v["fits_ok"] and v["spread_ok"] for v in rep.form_verdicts().values())
    return EXIT_OK if ok and rep.cesaro_ok() and rep.mc_ok() else EXIT_FAIL


def cmd_theorem_b(args) -> int:
    rep = run_theorem_b(_config(args, "theorem-b"), args.containment_samples)
    print(rep.render(), end="")
    ok = rep.containment_ok() and rep.fit_ok("EF") and rep.fit_ok("RF")
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {"validate": cmd_validate, "build": cmd_build, "census": cmd_census,
            "sample": cmd_sample, "theorem-a": cmd_theorem_a, "theorem-b": cmd_theorem_b}


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, UnsupportedConfiguration) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GuardExceeded as exc:
        print(f"guard violation: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (Inconclusive, SamplerStarvation) as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE


if __name__ == "__main__":
    sys.exit(main())
