"""Command-line interface: batch verification commands with archived,
replayable outputs.

Exit codes: 0 success/certified, 3 not certified, 4 validation error,
5 certificate failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .config import (
    ConfigError,
    RunConfig,
    battery_rng,
    build_context,
    build_fields,
    build_weight_table,
    config_echo,
    context_from_echo,
    echo_parts,
    load_config,
)
from .diagram import CharacterClashError, CoeffVector, DiagramError, twist_identity_check
from .engine import (
    Budget,
    EngineError,
    MalformedTraceError,
    audit_admissibility,
    certify_irreducible,
    default_seed_battery,
    replay_certificate,
)
from .gamma_lab import GammaContext, GammaError, build_principal_series, sweep_s_table, u_invariants
from .gf import FieldError, make_field
from .report import (
    Report,
    canonical_json,
    fig_growth,
    fig_orbits,
    fig_s_values,
    fig_seed_stats,
    write_csv,
)
from .weights import Character, GenericParams, WeightError, delta_orbits, validate_genericity

EXIT_OK = 0
EXIT_NOT_CERTIFIED = 3
EXIT_VALIDATION = 4
EXIT_CERTIFICATE = 5


def _finish(report: Report, out_dir, stem: str, as_json: bool) -> None:
    report.write(out_dir, stem)
    if as_json:
        sys.stdout.write(canonical_json(report.as_dict()))
    else:
        sys.stdout.write(report.text())


def cmd_verify_combinatorics(cfg: RunConfig, out_dir, as_json: bool) -> int:
    t0 = time.time()
    try:
        cfg.validate()
        base, ext = build_fields(cfg)
        params = GenericParams(cfg.p, cfg.f, tuple(cfg.r))
        table = build_weight_table(cfg, params)
    except (ConfigError, FieldError, WeightError) as exc:
        sys.stderr.write(f"validation failed: {exc}\n")
        return EXIT_VALIDATION
    report = Report("verify-combinatorics", echo_parts(cfg, base, ext, table))
    gen = validate_genericity(params, cfg.bounds, table, cfg.special_twist)
    report.add("genericity", {
        "passed": gen.passed,
        "failures": [{"check": n, "detail": d} for n, d in gen.failures()],
    })
    orbits = delta_orbits(cfg.f)
    orbit_lists = [[sorted(J.members) for J in orbit] for orbit in orbits]
    report.add("delta_orbits", {"f": cfg.f, "orbits": orbit_lists})
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "combinatorics_weights.csv",
              ["J_bitmask", "members", "tuple", "twist", "provenance"],
              [[m, "".join(str(j) for j in sorted(w.label.members)) or "-",
                ",".join(str(a) for a in w.values), w.twist, w.provenance]
               for m, w in sorted(table.items())])
    fig_orbits(orbits, out / "combinatorics_orbits.png")
    if not gen.passed:
        report.add("registry", {"skipped": "genericity failed"})
        report.time("total", time.time() - t0)
        _finish(report, out_dir, "combinatorics", as_json)
        sys.stderr.write("genericity validation failed\n")
        return EXIT_VALIDATION
    try:
        ctx = build_context(cfg, need_lambda=True)
    except (CharacterClashError, ConfigError, FieldError, DiagramError) as exc:
        report.add("registry", {"error": str(exc)})
        report.time("total", time.time() - t0)
        _finish(report, out_dir, "combinatorics", as_json)
        sys.stderr.write(f"validation failed: {exc}\n")
        return EXIT_VALIDATION
    report.echo = config_echo(ctx)
    chars = ctx.registry.characters()
    report.add("registry", {
        "characters": [[c.e_a, c.e_d] for c in chars],
        "distinct": len(set(chars)) == len(chars),
        "count": len(chars),
        "cycle_notes": ctx.registry.notes,
    })
    samples = [CoeffVector.unit(ctx.ext, 0),
               CoeffVector.from_items(ctx.ext, [(0, 1), (3, 1)])]
    twist = twist_identity_check(ctx.lam, ctx.registry, samples, ctx.mu)
    report.add("twist_identity", twist.as_dict())
    report.time("total", time.time() - t0)
    _finish(report, out_dir, "combinatorics", as_json)
    if not twist.ok:
        sys.stderr.write("twist identity check failed\n")
        return EXIT_VALIDATION
    return EXIT_OK


def cmd_verify_finite(cfg: RunConfig, out_dir, as_json: bool) -> int:
    t0 = time.time()
    try:
        ctx = build_context(cfg, need_lambda=False)
    except (CharacterClashError, ConfigError, FieldError, DiagramError) as exc:
        sys.stderr.write(f"validation failed: {exc}\n")
        return EXIT_VALIDATION
    report = Report("verify-finite", config_echo(ctx))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not cfg.lab_enabled:
        report.add("lab", {"skipped": "lab disabled in config"})
        _finish(report, out_dir, "finite", as_json)
        return EXIT_OK
    try:
        lab_field = make_field(cfg.lab_p, cfg.lab_f)
        lab = GammaContext(lab_field)
        # internal consistency probe: the fixed space of a sample module is
        # nonzero before committing to the full sweep
        probe = build_principal_series(lab, Character(lab.q - 1, 1, 0))
        if not u_invariants(probe):
            sys.stderr.write("internal inconsistency: empty fixed space\n")
            return EXIT_VALIDATION
        entries, findings = sweep_s_table(lab, cfg.zero_pow_zero)
    except (GammaError, FieldError) as exc:
        sys.stderr.write(f"lab failure: {exc}\n")
        return EXIT_VALIDATION
    oracle = {"q": lab.q, "convention": "0^0=1" if cfg.zero_pow_zero else "0^0=0",
              "entries": entries}
    (out / "finite_oracle_table.json").write_text(canonical_json(oracle),
                                                  encoding="ascii")
    processed = len(entries)
    excluded = sum(1 for e in entries if e.get("excluded"))
    report.add("sweep", {
        "q": lab.q,
        "characters_processed": processed,
        "swap_fixed_excluded": excluded,
        "unique": sum(1 for e in entries if e.get("unique")),
        "findings": findings,
        "finding_count": len(findings),
        "sensitive_entries": sum(1 for e in entries if e.get("sensitive")),
        "note": "sweep runs on principal-series modules, the universal home "
                "of an unipotent-invariant eigenvector; the block modules "
                "themselves are deliberately not constructed",
    })
    report.time("total", time.time() - t0)
    write_csv(out / "finite_s_values.csv",
              ["e_a", "e_d", "s", "unique", "sensitive"],
              [[e["chi"][0], e["chi"][1],
                "-" if e.get("s") is None else e["s"],
                e.get("unique"), e.get("sensitive", "-")] for e in entries])
    fig_s_values(entries, lab.q - 1, out / "finite_s_values.png")
    _finish(report, out_dir, "finite", as_json)
    return EXIT_OK


def cmd_certify(cfg: RunConfig, out_dir, as_json: bool) -> int:
    t0 = time.time()
    try:
        ctx = build_context(cfg, need_lambda=True)
    except (CharacterClashError, ConfigError, FieldError, DiagramError) as exc:
        sys.stderr.write(f"validation failed: {exc}\n")
        return EXIT_VALIDATION
    echo = config_echo(ctx)
    report = Report("certify", echo)
    rng = battery_rng(cfg)
    seeds = default_seed_battery(ctx.registry, ctx.ext, rng,
                                 cfg.seed_count, cfg.seed_max_support,
                                 cfg.target_window)
    budget = Budget(cfg.max_facts, cfg.max_firings)
    try:
        result = certify_irreducible(ctx.registry, ctx.lam, seeds,
                                     cfg.target_window, cfg.scalar_mode,
                                     budget, ctx.mu, config_echo=echo)
    except EngineError as exc:
        sys.stderr.write(f"engine error: {exc}\n")
        return EXIT_VALIDATION
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cert_path = out / "certificate.json"
    cert_path.write_text(canonical_json(result.certificate), encoding="ascii")
    report.add("verdict", result.verdict.as_dict())
    report.add("certificate", {
        "path": cert_path.name,
        "digest": result.certificate["digest"],
        "runs": len(result.runs),
    })
    report.time("total", time.time() - t0)
    write_csv(out / "certify_seed_stats.csv",
              ["seed_index", "covered", "reason", "facts", "descents",
               "boundary_losses"],
              [[r["seed_index"], r["covered"], r["reason"] or "-",
                r["stats"]["facts"], r["stats"]["descent_steps"],
                r["stats"]["boundary_losses"]] for r in result.runs])
    fig_seed_stats(result.runs, out / "certify_seed_stats.png")
    _finish(report, out_dir, "certify", as_json)
    return EXIT_OK if result.certified else EXIT_NOT_CERTIFIED


def cmd_audit(cfg: RunConfig, out_dir, as_json: bool) -> int:
    t0 = time.time()
    try:
        ctx = build_context(cfg, need_lambda=False)
    except (CharacterClashError, ConfigError, FieldError, DiagramError) as exc:
        sys.stderr.write(f"validation failed: {exc}\n")
        return EXIT_VALIDATION
    report = Report("audit", config_echo(ctx))
    res = audit_admissibility(cfg.audit_n_max, ctx.weight_table)
    report.add("growth", res.as_dict())
    report.time("total", time.time() - t0)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "audit_growth.csv", ["N", "bound"],
              [[r["N"], r["bound"]] for r in res.rows])
    if res.rows:
        fig_growth(res.rows, res.slope, out / "audit_growth.png")
    _finish(report, out_dir, "audit", as_json)
    return EXIT_OK


def cmd_replay(cert_path, out_dir, as_json: bool) -> int:
    t0 = time.time()
    try:
        cert = json.loads(Path(cert_path).read_text(encoding="ascii"))
    except (OSError, ValueError) as exc:
        sys.stderr.write(f"cannot read certificate: {exc}\n")
        return EXIT_CERTIFICATE
    try:
        ctx = context_from_echo(cert.get("config", {}))
        if ctx.lam is None:
            raise ConfigError("certificate echo carries no lambda values")
        ok = replay_certificate(cert, ctx.registry, ctx.lam, ctx.mu)
    except (ConfigError, MalformedTraceError, FieldError, DiagramError,
            CharacterClashError, EngineError) as exc:
        sys.stderr.write(f"replay failed: {exc}\n")
        return EXIT_CERTIFICATE
    report = Report("replay", cert.get("config", {}))
    report.add("replay", {"verified": ok, "runs": len(cert.get("runs", [])),
                          "certificate_digest": cert.get("digest")})
    report.time("total", time.time() - t0)
    _finish(report, out_dir, "replay", as_json)
    return EXIT_OK if ok else EXIT_CERTIFICATE


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="diagramlab",
        description="verification workbench for twisted-diagram representation data")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=str, default=None,
                       help="key=value config file (defaults are built in)")
        p.add_argument("--out", type=str, default="out",
                       help="output directory for reports and figures")
        p.add_argument("--seed", type=int, default=None,
                       help="64-bit seed overriding the config")
        p.add_argument("--json", action="store_true",
                       help="print the canonical JSON report to stdout")

    for name in ("verify-combinatorics", "verify-finite", "certify", "audit"):
        common(sub.add_parser(name))
    rp = sub.add_parser("replay")
    rp.add_argument("certificate", type=str, help="certificate JSON to re-verify")
    common(rp)

    args = parser.parse_args(argv)
    if args.command == "replay":
        return cmd_replay(args.certificate, args.out, args.json)
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        if args.seed is not None:
            cfg.seed = args.seed
        cfg.validate()
    except (ConfigError, OSError) as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_VALIDATION
    dispatch = {
        "verify-combinatorics": cmd_verify_combinatorics,
        "verify-finite": cmd_verify_finite,
        "certify": cmd_certify,
        "audit": cmd_audit,
    }
    return dispatch[args.command](cfg, args.out, args.json)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
