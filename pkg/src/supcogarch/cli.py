"""Configuration-driven command line: simulate | analytics | verify | qstats.

Exit codes: 0 success, 1 validation error, 2 verification failure,
3 I/O error.  All subcommands honor --seed/--threads/--out overrides and
are fully deterministic given the effective configuration.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import charexp
from .analysis import (
    extract_q,
    histogram,
    histogram_to_csv,
    jump_tally,
    reports_to_csv,
    run_replications,
)
from .cogarch import (
    CogarchParams,
    MomentDivergesError,
    NonStationaryError,
    cross_cov,
    cross_moment,
    stationary_acov,
    stationary_mean,
    stationary_second_moment,
    stationary_variance,
)
from .config import ConfigError, ExperimentConfig, parse_config, serialize_config
from .levy import jump_path_to_csv, substream
from .price import increment_mean_and_variance, simulate_price, sq_increment_cov_closed, price_to_csv
from .superpos import (
    Variant,
    bundle_to_csv,
    chosen_marks_to_csv,
    simulate_bundle,
    sup1_acov,
    sup1_mean,
    sup1_var,
    sup2_acov,
    sup2_second_moment,
    sup2_var,
    sup3_acov,
    sup3_second_moment,
    sup3_var,
    tail_exponent,
)
from .verify import checks_to_csv, price_rows_to_csv, run_verification

__all__ = ["main", "cmd_simulate", "cmd_analytics", "cmd_verify", "cmd_qstats"]

_FMT = lambda x: format(float(x), ".17g")


def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    if args.config is None:
        cfg = ExperimentConfig()
    else:
        cfg = parse_config(Path(args.config).read_text())
    return cfg.with_overrides(seed=args.seed, threads=args.threads, out_dir=args.out).validate()


def _outdir(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_simulate(cfg: ExperimentConfig) -> int:
    """One seeded path bundle per requested variant, exported as CSV."""
    out = _outdir(cfg)
    model = cfg.model()
    mix = cfg.mixture()
    for vi, variant in enumerate(cfg.variant_list()):
        bundle = simulate_bundle(
            variant, mix, cfg.beta, cfg.eta, model, (0.0, cfg.horizon),
            substream(cfg.seed, 0, vi), cfg.burn_in,
        )
        tag = variant.value
        (out / f"{tag}_bundle.csv").write_text(bundle_to_csv(bundle, cfg.sample_grid_step))
        (out / f"{tag}_price.csv").write_text(price_to_csv(simulate_price(bundle)))
        for i, driver in enumerate(bundle.drivers):
            (out / f"{tag}_driver_{i}.csv").write_text(jump_path_to_csv(driver))
        if variant is Variant.SUP3:
            (out / f"{tag}_chosen_phi.csv").write_text(chosen_marks_to_csv(bundle))
        print(f"wrote {tag} bundle ({len(bundle.aggregate)} events) to {out}")
    (out / "config.cfg").write_text(serialize_config(cfg))
    return 0


def _fmt_or_diverges(fn, *args) -> str:
    try:
        return _FMT(fn(*args))
    except MomentDivergesError:
        return "diverges"


def cmd_analytics(cfg: ExperimentConfig) -> int:
    """Closed-form table: exponent values, boundaries, tail exponents,
    stationary moments, autocovariances, and price second-order values."""
    out = _outdir(cfg)
    model = cfg.model()
    mix = cfg.mixture()
    ctx = charexp.ExponentContext(model, cfg.eta)
    rows: list[tuple[str, str]] = []

    rows.append(("phi_max", _FMT(charexp.phi_max(ctx))))
    for kappa in (0.5, 1.0, 2.0):
        rows.append((f"phi_max_kappa[{kappa:g}]", _FMT(charexp.phi_max_kappa(ctx, kappa))))
    if mix.phi_bar > 0.0:
        rows.append(("kappa_bar", _FMT(charexp.kappa_of_phi(ctx, mix.phi_bar))))
        for variant in cfg.variant_list():
            te = tail_exponent(variant, mix, ctx)
            rows.append((f"{variant.value}.tail_limit", te.limit_kind.value))

    for phi, _ in mix.atoms():
        params = CogarchParams(cfg.beta, cfg.eta, phi)
        p = f"cogarch[{phi:g}]"
        rows.append((f"{p}.log_moment", _FMT(charexp.log_moment(ctx, phi))))
        rows.append((f"{p}.psi1", _FMT(charexp.psi(ctx, 1.0, phi))))
        rows.append((f"{p}.psi2", _FMT(charexp.psi(ctx, 2.0, phi))))
        rows.append((f"{p}.mean", _fmt_or_diverges(stationary_mean, params, model)))
        rows.append((f"{p}.second_moment", _fmt_or_diverges(stationary_second_moment, params, model)))
        rows.append((f"{p}.variance", _fmt_or_diverges(stationary_variance, params, model)))
        for h in cfg.lags:
            rows.append((f"{p}.acov[h={h:g}]", _fmt_or_diverges(stationary_acov, params, model, h)))

    phis = mix.phis
    for i in range(len(phis)):
        for j in range(i + 1, len(phis)):
            pair = f"cross[{phis[i]:g},{phis[j]:g}]"
            rows.append((f"{pair}.moment",
                         _fmt_or_diverges(cross_moment, cfg.beta, cfg.eta, phis[i], phis[j], model)))
            rows.append((f"{pair}.cov",
                         _fmt_or_diverges(cross_cov, cfg.beta, cfg.eta, phis[i], phis[j], model)))

    per_variant = {
        Variant.SUP1: (("mean", sup1_mean), ("variance", sup1_var)),
        Variant.SUP2: (("mean", sup1_mean), ("variance", sup2_var),
                       ("second_moment", sup2_second_moment)),
        Variant.SUP3: (("mean", sup1_mean), ("variance", sup3_var),
                       ("second_moment", sup3_second_moment)),
    }
    acov_fns = {Variant.SUP1: sup1_acov, Variant.SUP2: sup2_acov, Variant.SUP3: sup3_acov}
    for variant in cfg.variant_list():
        tag = variant.value
        for name, fn in per_variant[variant]:
            rows.append((f"{tag}.{name}", _fmt_or_diverges(fn, mix, cfg.beta, cfg.eta, model)))
        for h in cfg.lags:
            rows.append((f"{tag}.acov[h={h:g}]",
                         _fmt_or_diverges(acov_fns[variant], mix, cfg.beta, cfg.eta, model, h)))
        for r in cfg.increments:
            rows.append((f"{tag}.increment_second_moment[r={r:g}]",
                         _fmt_or_diverges(
                             lambda: increment_mean_and_variance(variant, mix, cfg.beta, cfg.eta, model, r)[1]
                         )))
            if variant in (Variant.SUP1, Variant.SUP2):
                for h in cfg.lags:
                    if h >= r:
                        rows.append((
                            f"{tag}.sq_increment_cov[r={r:g};h={h:g}]",
                            _fmt_or_diverges(
                                sq_increment_cov_closed, variant, mix, cfg.beta, cfg.eta, model, r, h
                            ),
                        ))

    lines = ["quantity,value"] + [f"{name},{value}" for name, value in rows]
    (out / "analytics.csv").write_text("\n".join(lines) + "\n")
    print(f"wrote {len(rows)} analytic quantities to {out / 'analytics.csv'}")
    return 0


def cmd_verify(cfg: ExperimentConfig) -> int:
    """Monte Carlo vs analytic battery; exit 0 iff every defined comparison
    and every path-wise check passes."""
    out = _outdir(cfg)
    result = run_verification(cfg)
    (out / "verification.csv").write_text(reports_to_csv(result.reports))
    (out / "verification_checks.csv").write_text(checks_to_csv(result.checks))
    (out / "price_increments.csv").write_text(price_rows_to_csv(result.price_rows))
    for r in result.reports:
        verdict = "PASS" if r.passed else ("SKIP" if r.passed is None else "FAIL")
        print(f"[{verdict}] {r.name}")
    for c in result.checks:
        print(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}")
    n_fail = len(result.failures())
    print(f"verification: {n_fail} failure(s)")
    return 0 if result.passed else 2


def cmd_qstats(cfg: ExperimentConfig) -> int:
    """Jump-ratio samples, jump-type tallies, and log-q histograms."""
    out = _outdir(cfg)
    model = cfg.model()
    mix = cfg.mixture()
    summary = ["variant,n_paths,n_q_samples,common,vol_only,price_only"]
    for vi, variant in enumerate(cfg.variant_list()):
        tag = variant.value

        def one(rep: int, _variant=variant, _vi=vi):
            bundle = simulate_bundle(
                _variant, mix, cfg.beta, cfg.eta, model, (0.0, cfg.horizon),
                substream(cfg.seed, 5, _vi, rep), cfg.burn_in,
            )
            gp = simulate_price(bundle)
            return extract_q(bundle, gp), jump_tally(bundle, gp)

        results = run_replications(one, cfg.q_paths, cfg.threads)
        samples = [s for qs, _ in results for s in qs]
        lines = ["time,q,chosen_phi"]
        for s in samples:
            chosen = "" if s.chosen_phi is None else _FMT(s.chosen_phi)
            lines.append(f"{_FMT(s.time)},{_FMT(s.q)},{chosen}")
        (out / f"{tag}_q.csv").write_text("\n".join(lines) + "\n")
        if samples:
            rows = histogram(np.log([s.q for s in samples]).tolist(), bins=50)
            (out / f"{tag}_logq_hist.csv").write_text(histogram_to_csv(rows))
        common = sum(t.common for _, t in results)
        vol_only = sum(t.vol_only for _, t in results)
        price_only = sum(t.price_only for _, t in results)
        summary.append(f"{tag},{cfg.q_paths},{len(samples)},{common},{vol_only},{price_only}")
        print(f"{tag}: {len(samples)} q samples, {vol_only} volatility-only, "
              f"{price_only} price-only jumps")
    (out / "q_summary.csv").write_text("\n".join(summary) + "\n")
    return 0


_COMMANDS = {
    "simulate": cmd_simulate,
    "analytics": cmd_analytics,
    "verify": cmd_verify,
    "qstats": cmd_qstats,
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="supcogarch",
        description="Simulation and moment verification for superposed COGARCH models",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in _COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__)
        p.add_argument("--config", default=None, help="config file (sectioned key=value)")
        p.add_argument("--seed", type=int, default=None, help="root seed override")
        p.add_argument("--threads", type=int, default=None, help="replication thread count")
        p.add_argument("--out", default=None, help="output directory override")
    args = parser.parse_args(argv)

    try:
        cfg = _load_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3

    try:
        return _COMMANDS[args.command](cfg)
    except (ConfigError, NonStationaryError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
