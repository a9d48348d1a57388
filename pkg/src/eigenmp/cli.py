"""Config-driven command line front end.

    eigenmp <command> [--config cfg] [--out dir] [--format csv|json|both]
                      [--seed N]

Commands: validate, eigen, mu1, lambda-star, mp, certify, fichera, barrier,
paper.  Exit codes: 0 success, 1 any asserted check failed, 2 config error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time

from . import certify, kernels, zoo
from .boundary import fichera_classify, log_barrier_sweep, verify_log_barrier
from .config import COMMANDS, ConfigError, RunConfig, build_domain, build_operator, load_config
from .domains import build_grid
from .eigen import blowup_eigenvalue, lambda_star_estimate, mu1_estimate, viscous_eigenvalue
from .fixtures import format_table, run_paper_suite
from .mp import mp_test
from .operators import check_degenerate_ellipticity, check_homogeneity
from .report import Report, emit, witness_record
from .scheme import DiscreteScheme, monotonicity_check


def _domain_str(dom):
    return "%s %s%s" % (
        dom.shape,
        " ".join("%g" % p for p in dom.params),
        (" +%g" % dom.inflation) if dom.inflation else "",
    )


def _config_digest(cfg):
    return hashlib.sha256(
        json.dumps(cfg.sections, sort_keys=True, default=str).encode()
    ).hexdigest()[:16]


def _build_certificate(merged, target):
    desc = merged.get("certificate")
    if desc is None:
        raise ConfigError("certify needs a 'certificate = <family> [params...]' key")
    toks = str(desc).split()
    family, params = toks[0], [float(t) for t in toks[1:]]
    region = (
        build_domain(merged["declared_region"]) if "declared_region" in merged else target
    )
    if family == "power":
        return certify.power(params[0], region)
    if family == "two_minus_sqrt":
        return certify.two_minus_sqrt(region)
    if family == "one_plus_sqrt":
        return certify.one_plus_sqrt(region)
    if family == "paraboloid":
        return certify.paraboloid(params[0], region)
    if family == "exp_tilt":
        return certify.exp_tilt(params[0], params[1], params[2:], region)
    if family == "constant":
        return certify.constant(params[0], region)
    raise ConfigError("unknown certificate family %r" % family)


def run(config, command, seed=None):
    """Execute one command; returns (Report, exit_code)."""
    merged = config.resolve(command)
    if seed is not None:
        merged["rng_seed"] = int(seed)
    if merged.get("backend", "auto") != "auto":
        kernels.use_backend(merged["backend"])
    report = Report(command=command, seed=int(merged.get("rng_seed", 0)),
                    backend=kernels.backend_name())
    report.meta["config_digest"] = _config_digest(config)
    code = 0

    if command == "paper":
        rows = run_paper_suite(profile=merged.get("profile", "full"))
        for row in rows:
            report.add(row)
        if any(r["verdict"] == "fail" for r in rows):
            code = 1
        return report, code

    if command == "validate":
        op = merged.get("operator")
        if op is None:
            targets = [(zoo.get(n).spec, zoo.get(n).domain_default) for n in zoo.names()]
        else:
            targets = [build_operator(merged)]
        samples = int(merged.get("samples", 10000))
        any_bad = False
        for spec, entry_domain in targets:
            e_rep = check_degenerate_ellipticity(spec, samples, merged["rng_seed"])
            h_rep = check_homogeneity(spec, samples, merged["rng_seed"])
            rows = [
                ("ellipticity", len(e_rep.violations), None, e_rep.ok),
                ("homogeneity", 0, h_rep.max_relative_error, h_rep.max_relative_error <= 1e-8),
            ]
            try:
                sch = DiscreteScheme(spec, build_grid(entry_domain, entry_domain.inradius / 10))
                m_rep = monotonicity_check(sch, trials=1000, rng_seed=merged["rng_seed"])
                rows.append(("scheme-monotonicity", m_rep["violations"], None,
                             m_rep["violations"] == 0))
            except Exception:
                rows.append(("scheme-monotonicity", 1, None, False))
            for check, viol, err, ok in rows:
                report.add(
                    {"type": "validate", "operator": spec.name, "check": check,
                     "samples": samples, "violations": viol,
                     "max_relative_error": err, "ok": bool(ok)}
                )
                any_bad = any_bad or not ok
        return report, (1 if any_bad else 0)

    spec, domain = build_operator(merged)
    h = float(merged["h"])
    cap = float(merged["lambda_cap"])
    tol = float(merged["tol"])

    if command == "eigen":
        eps = float(merged.get("viscous_eps", 0.0))
        if eps > 0:
            est = viscous_eigenvalue(spec, domain, h, eps, cap, tol)
        else:
            est = blowup_eigenvalue(
                DiscreteScheme(spec, build_grid(domain, h),
                               boundary_clause=merged["boundary_clause"]),
                cap, tol,
            )
        rec = est.to_record()
        rec["domain"] = _domain_str(domain)
        report.add(rec)
    elif command == "mu1":
        est = mu1_estimate(spec, domain, h, merged["eps_list"], cap, tol,
                           boundary_clause=merged["boundary_clause"])
        for p in est.diagnostics["per_eps"]:
            report.add(
                {"type": "eigen", "method": "blowup", "domain": _domain_str(domain),
                 "h": h, "eps": p["eps"], "lambda_lo": p["lambda_lo"],
                 "lambda_hi": p["lambda_hi"], "iterations": None,
                 "capped": p["capped"]}
            )
        rec = est.to_record()
        rec["domain"] = _domain_str(domain)
        report.add(rec)
    elif command == "lambda-star":
        est = lambda_star_estimate(spec, domain, h, merged["eps_list"], cap, tol)
        for p in est.diagnostics["per_eps"]:
            report.add(
                {"type": "eigen", "method": "viscous", "domain": _domain_str(domain),
                 "h": h, "eps": p["eps"], "lambda_lo": p["lambda_lo"],
                 "lambda_hi": p["lambda_hi"], "iterations": None,
                 "dense_oracle": p["dense_oracle"]}
            )
        rec = est.to_record()
        rec["domain"] = _domain_str(domain)
        report.add(rec)
    elif command == "mp":
        sch = DiscreteScheme(spec, build_grid(domain, h),
                             boundary_clause=merged["boundary_clause"])
        verdict = mp_test(sch, cap=float(merged["cap"]), tol=float(merged["mp_tol"]),
                          max_sweeps=int(merged["max_sweeps"]))
        report.add(verdict.to_record())
        if verdict.witness is not None:
            report.add(witness_record(sch.grid, verdict.witness.values))
    elif command == "certify":
        cert = _build_certificate(merged, domain)
        lam = merged.get("lambda")
        samples = int(merged["samples"])
        if lam is None:
            lam = certify.best_lambda(cert, spec, domain, samples) - 1e-9
        rep = certify.verify(cert, spec, domain, float(lam), samples)
        rec = rep.to_record()
        rec["certificate"] = cert.name
        rec["best_lambda"] = certify.best_lambda(cert, spec, domain, samples)
        report.add(rec)
        if not rep.ok:
            code = 1
    elif command == "fichera":
        rep = fichera_classify(spec, domain, int(merged["n_samples"]))
        rec = rep.to_record()
        rec["samples"] = rep.samples
        from .boundary import equivalence_advisory

        rec["advisory"] = equivalence_advisory(rep)
        report.add(rec)
    elif command == "barrier":
        xi = merged.get("xi")
        if xi is None:
            raise ConfigError("barrier needs 'xi = <coords>'")
        band = float(merged["band"])
        if "delta" in merged:
            rep = verify_log_barrier(spec, domain, xi, float(merged["delta"]), band,
                                     int(merged["n_samples"]))
        else:
            rep = log_barrier_sweep(spec, domain, xi, band, int(merged["n_samples"]))
        report.add(rep.to_record())
        if not rep.verified:
            code = 1
    else:
        raise ConfigError("unhandled command %r" % command)
    return report, code


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="eigenmp",
        description="Generalized principal eigenvalues and maximum-principle tests "
        "for degenerate elliptic operators on grids.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd in COMMANDS:
        p = sub.add_parser(cmd)
        p.add_argument("--config", default=None, help="INI or JSON config file")
        p.add_argument("--out", default=None, help="output directory for report files")
        p.add_argument("--format", default="both", choices=["csv", "json", "both"])
        p.add_argument("--seed", type=int, default=None)
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        t0 = time.time()
        report, code = run(cfg, args.command, seed=args.seed)
        elapsed = time.time() - t0
    except (ConfigError, KeyError, FileNotFoundError) as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    if args.command == "paper":
        print(format_table(report.records))
    else:
        print(json.dumps(report.as_dict(), sort_keys=True, indent=1))
    if args.out:
        formats = ("json", "csv") if args.format == "both" else (args.format,)
        for path in emit(report, args.out, formats):
            print("wrote %s" % path, file=sys.stderr)
        if args.command == "validate":
            import os

            catalog_path = os.path.join(args.out, "catalog.txt")
            zoo.write_catalog(catalog_path)
            print("wrote %s" % catalog_path, file=sys.stderr)
    print("done in %.1fs (backend: %s)" % (elapsed, report.backend), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
