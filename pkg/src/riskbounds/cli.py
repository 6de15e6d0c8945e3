"""Command-line front end: figure-data tables as CSV/JSON plus validation.

Subcommands: bernoulli, noisy-bernoulli, gaussian, hide-and-seek, validate.
One CSV row is emitted per sample count n; a JSON sidecar next to --out
records the optimizing parameters per point.  RISKBOUNDS_THREADS caps the
number of worker threads used for the per-n sweep.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import math
import os
import sys

import numpy as np

from . import bounds, measures, models, oracle, sdpi
from .distributions import DiscreteJoint, DivergenceKind, DivergenceSpec, MarkovKernel

EST_HEADER = ("n,bound_mi,bound_ml,bound_sibson,bound_hellinger,bound_egz,"
              "bound_sdpi,upper_bound,mc_risk,best_method")
HNS_HEADER = "n,bound_ml,bound_nips,bound_mi,best_method"

_METHOD_ORDER = ("mi", "ml", "sibson", "hellinger", "egz", "sdpi")


def default_alpha_grid():
    """Log-spaced orders: 1 + 10^-2 .. 64, 40 points (log in alpha - 1)."""
    return 1.0 + np.geomspace(1e-2, 63.0, 40)


def default_gamma_zeta_grid():
    g = np.geomspace(1e-2, 32.0, 48)
    return g, g.copy()


def _parse_n_range(text: str) -> list[int]:
    values: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            values.extend(range(int(lo), int(hi) + 1))
        elif part:
            values.append(int(part))
    if not values or any(v < 1 for v in values):
        raise ValueError(f"invalid sample-count range {text!r}")
    return sorted(set(values))


def _fmt(x) -> str:
    if x is None:
        return ""
    return f"{x:.12g}"


def _best(named_values: dict[str, float | None]) -> str:
    best_name = ""
    best_val = -math.inf
    for name in _METHOD_ORDER:
        val = named_values.get(name)
        if val is not None and val > best_val:
            best_name, best_val = name, val
    return best_name


def _sibson_i_alpha(n: int, alpha: float) -> float:
    return alpha / (alpha - 1.0) * math.log(models.bernoulli_sibson(n, alpha))


def _hellinger_div(n: int, p: float) -> float:
    return (models.bernoulli_hellinger(n, p) - 1.0) / (p - 1.0)


def _bernoulli_point(n: int, args) -> tuple[dict, dict]:
    L = models.bernoulli_small_ball()
    info: dict = {}

    mi_res = bounds.mi_baseline_bound(models.bernoulli_mutual_information(n), L)
    ml_res = bounds.ml_bound(models.bernoulli_ml(n).upper, L)
    if args.optimize:
        grid = default_alpha_grid()
        sib_res = bounds.optimize_bound(
            lambda alpha: _sibson_i_alpha(n, alpha), "sibson", {"alpha": grid}, L)
        hel_res = bounds.optimize_bound(
            lambda p: _hellinger_div(n, p), "hellinger", {"p": grid}, L)
        gam, zet = default_gamma_zeta_grid()
        egz_res = bounds.optimize_bound(
            lambda gamma, zeta: models.bernoulli_e_gamma_zeta(n, gamma, zeta),
            "egz", {"gamma": gam, "zeta": zet}, L)
    else:
        sib_res = bounds.sibson_bound(_sibson_i_alpha(n, args.alpha), args.alpha, L)
        hel_res = bounds.hellinger_bound(_hellinger_div(n, args.p), args.p, L)
        egz_res = bounds.hockey_stick_bound(
            models.bernoulli_e_gamma_zeta(n, args.gamma, args.zeta),
            args.gamma, args.zeta, L)

    mc = None
    if args.trials:
        mc = oracle.mc_risk(models.BernoulliUniformModel(n), "posterior-median",
                            args.trials, args.seed).mean
    values = {"mi": mi_res.value, "ml": ml_res.value, "sibson": sib_res.value,
              "hellinger": hel_res.value, "egz": egz_res.value}
    row = dict(values, n=n, sdpi=None, upper=models.bernoulli_upper_bound(n),
               mc=mc, best=_best(values))
    for name, res in (("mi", mi_res), ("ml", ml_res), ("sibson", sib_res),
                      ("hellinger", hel_res), ("egz", egz_res)):
        info[name] = dict(res.params, rho=res.rho_star, value=res.value,
                          vacuous=res.vacuous)
    return row, info


def _noisy_point(n: int, args) -> tuple[dict, dict]:
    model = models.NoisyBernoulliModel(n, args.lam)
    L = models.bernoulli_small_ball()
    hel_res = bounds.hellinger_bound(_hellinger_div(n, 2.0), 2.0, L)
    sdpi_res = models.noisy_bernoulli_bound(model, p=2.0)
    mc = None
    if args.trials:
        mc = oracle.mc_risk(model, "posterior-median", args.trials, args.seed).mean
    values = {"hellinger": hel_res.value, "sdpi": sdpi_res.value}
    row = dict(n=n, mi=None, ml=None, sibson=None, hellinger=hel_res.value,
               egz=None, sdpi=sdpi_res.value,
               upper=models.noisy_bernoulli_upper_bound(model),
               mc=mc, best=_best(values))
    info = {"hellinger": dict(hel_res.params, rho=hel_res.rho_star),
            "sdpi": dict(sdpi_res.params, rho=sdpi_res.rho_star)}
    return row, info


def _gaussian_point(n: int, args) -> tuple[dict, dict]:
    model = models.GaussianModel(n, args.sigma_w2, args.sigma2)
    L = models.gaussian_small_ball(model)
    info: dict = {}

    mi_res = bounds.mi_baseline_bound(models.gaussian_mutual_information(model), L)
    if args.optimize:
        grid = default_alpha_grid()
        sib_res = bounds.optimize_bound(
            lambda alpha: models.gaussian_sibson(model, alpha),
            "sibson", {"alpha": grid}, L)
        hel_res = bounds.optimize_bound(
            lambda p: (models.gaussian_hellinger(model, p) - 1.0) / (p - 1.0),
            "hellinger", {"p": grid}, L)
        gam, _ = default_gamma_zeta_grid()
        # match the figure protocol: gamma optimized, zeta held fixed
        egz_res = bounds.optimize_bound(
            lambda gamma, zeta: models.gaussian_e_gamma_zeta(model, gamma, zeta),
            "egz", {"gamma": gam, "zeta": np.array([args.zeta])}, L)
    else:
        sib_res = bounds.sibson_bound(
            models.gaussian_sibson(model, args.alpha), args.alpha, L)
        hel_res = bounds.hellinger_bound(
            (models.gaussian_hellinger(model, args.p) - 1.0) / (args.p - 1.0),
            args.p, L)
        egz_res = bounds.hockey_stick_bound(
            models.gaussian_e_gamma_zeta(model, args.gamma, args.zeta),
            args.gamma, args.zeta, L)

    mc = None
    if args.trials:
        mc = oracle.mc_risk(model, "posterior-mean", args.trials, args.seed).mean
    values = {"mi": mi_res.value, "sibson": sib_res.value,
              "hellinger": hel_res.value, "egz": egz_res.value}
    row = dict(n=n, mi=mi_res.value, ml=None, sibson=sib_res.value,
               hellinger=hel_res.value, egz=egz_res.value, sdpi=None,
               upper=models.gaussian_upper_bound(model), mc=mc,
               best=_best(values))
    for name, res in (("mi", mi_res), ("sibson", sib_res),
                      ("hellinger", hel_res), ("egz", egz_res)):
        info[name] = dict(res.params, rho=res.rho_star, value=res.value,
                          vacuous=res.vacuous)
    info["ml"] = {"note": "maximal leakage is infinite for a Gaussian parameter"}
    return row, info


def _theta_for(rule: str, n: int) -> float:
    rule = rule.strip()
    if rule.startswith("n^"):
        return float(n) ** float(rule[2:])
    return float(rule)


def _hide_and_seek_point(n: int, args) -> tuple[dict, dict] | None:
    theta = _theta_for(args.theta_rule, n)
    if not 0.0 <= theta < 0.5:
        print(f"skipping n={n}: theta={theta:g} outside [0, 1/2)",
              file=sys.stderr)
        return None
    model = models.HideAndSeekModel(d=args.d, m=args.m, b=args.b,
                                    theta=theta, n=n)
    hb = models.hide_and_seek_bounds(model)
    values = {"ml": hb.ml, "mi": hb.mi}
    best = "ml" if hb.ml >= max(hb.nips, hb.mi) else (
        "nips" if hb.nips >= hb.mi else "mi")
    row = dict(n=n, ml=hb.ml, nips=hb.nips, mi=hb.mi, best=best)
    info = {"theta": theta, "nips_valid": hb.nips_valid, "mi_valid": hb.mi_valid,
            "leakage": models.hide_and_seek_leakage(model)}
    return row, info


def _emit(rows, infos, header, args, setting):
    lines = [header]
    for row in rows:
        if header is EST_HEADER:
            lines.append(",".join([
                str(row["n"]), _fmt(row["mi"]), _fmt(row["ml"]),
                _fmt(row["sibson"]), _fmt(row["hellinger"]), _fmt(row["egz"]),
                _fmt(row["sdpi"]), _fmt(row["upper"]), _fmt(row["mc"]),
                row["best"]]))
        else:
            lines.append(",".join([
                str(row["n"]), _fmt(row["ml"]), _fmt(row["nips"]),
                _fmt(row["mi"]), row["best"]]))
    if args.format == "json":
        payload = json.dumps({"setting": setting, "rows": rows}, indent=2,
                             sort_keys=True, default=float)
        text = payload + "\n"
    else:
        text = "\n".join(lines) + "\n"
    if args.out and args.out != "-":
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
        sidecar = {"setting": setting, "seed": args.seed,
                   "points": {str(n): infos[n] for n in sorted(infos)}}
        with open(args.out + ".params.json", "w") as fh:
            json.dump(sidecar, fh, indent=2, sort_keys=True, default=float)
    else:
        sys.stdout.write(text)


def _sweep(point_fn, n_values, args, setting, header):
    workers = int(os.environ.get("RISKBOUNDS_THREADS", "0")) or (os.cpu_count() or 1)
    rows: dict[int, dict] = {}
    infos: dict[int, dict] = {}

    def one(n):
        return n, point_fn(n, args)

    try:
        if workers > 1 and len(n_values) > 1:
            with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
                for n, result in pool.map(one, n_values):
                    if result is not None:
                        rows[n], infos[n] = result
        else:
            for n in n_values:
                result = point_fn(n, args)
                if result is not None:
                    rows[n], infos[n] = result
    except Exception as exc:  # identify the failing point for exit code 3
        done = set(rows)
        pending = [n for n in n_values if n not in done]
        print(f"numerical failure near n={pending[0] if pending else '?'}: {exc}",
              file=sys.stderr)
        return 3
    _emit([rows[n] for n in sorted(rows)], infos, header, args, setting)
    return 0


# ----------------------------------------------------------------------
# validation suites
# ----------------------------------------------------------------------

def _suite_dpi(seed: int, rounds: int) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    specs = [
        DivergenceSpec(DivergenceKind.KL),
        DivergenceSpec(DivergenceKind.CHI_SQUARE),
        DivergenceSpec(DivergenceKind.HELLINGER_P, p=1.7),
        DivergenceSpec(DivergenceKind.E_GAMMA_ZETA, gamma=1.4, zeta=0.9),
        DivergenceSpec(DivergenceKind.RENYI, alpha=2.5),
    ]
    worst = -math.inf
    for _ in range(rounds):
        k = int(rng.integers(2, 5))
        p = rng.dirichlet(np.ones(k))
        q = rng.dirichlet(np.ones(k))
        kernel = MarkovKernel(rng.dirichlet(np.ones(k), size=k))
        for spec in specs:
            before = sdpi._pair_divergence(p, q, spec)
            after = sdpi._pair_divergence(kernel.push(p), kernel.push(q), spec)
            if math.isinf(before):
                continue
            worst = max(worst, after - before)
    ok = worst <= 1e-10
    return ok, f"max divergence increase across kernels: {worst:.3e}"


def _suite_oracle_agreement(seed: int, rounds: int) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    specs = [
        DivergenceSpec(DivergenceKind.KL),
        DivergenceSpec(DivergenceKind.CHI_SQUARE),
        DivergenceSpec(DivergenceKind.HELLINGER_P, p=2.6),
        DivergenceSpec(DivergenceKind.RENYI, alpha=3.0),
        DivergenceSpec(DivergenceKind.SIBSON_MI, alpha=2.2),
        DivergenceSpec(DivergenceKind.MAX_LEAKAGE),
        DivergenceSpec(DivergenceKind.MUTUAL_INFORMATION),
        DivergenceSpec(DivergenceKind.E_GAMMA_ZETA, gamma=1.2, zeta=1.1),
    ]
    worst = 0.0
    for _ in range(rounds):
        joint = DiscreteJoint(rng.dirichlet(np.ones(16)).reshape(4, 4))
        for spec in specs:
            a = measures.divergence_from_independence(joint, spec)
            b = oracle.brute_force_divergence(joint, spec)
            worst = max(worst, abs(a - b))
    ok = worst <= 1e-10
    if ok:
        gamma_check = abs(models.bernoulli_hellinger(8, 2.0)
                          - (8 + 1) / (2 * 8 + 1) * 4.0 ** 8
                          / math.comb(16, 8))
        quad = measures.divergence_from_independence(
            models.bernoulli_joint(5), DivergenceSpec(DivergenceKind.HELLINGER_P, p=2.0))
        closed = (models.bernoulli_hellinger(5, 2.0) - 1.0)
        gamma_check = max(gamma_check, abs(quad - closed))
        ok = gamma_check <= 1e-6
        return ok, f"max closed-form deviation: {gamma_check:.3e}"
    return ok, f"max measures/brute-force deviation: {worst:.3e}"


def _suite_sandwich(seed: int, trials: int, n_values) -> tuple[bool, str]:
    worst = -math.inf
    for n in n_values:
        L = models.bernoulli_small_ball()
        risk = oracle.mc_risk(models.BernoulliUniformModel(n), "posterior-median",
                              trials, seed)
        limit = risk.mean + 3.0 * risk.std_error
        for value in (
            bounds.ml_bound(models.bernoulli_ml(n).upper, L).value,
            bounds.sibson_bound(_sibson_i_alpha(n, 2.0), 2.0, L).value,
            bounds.hellinger_bound(_hellinger_div(n, 2.0), 2.0, L).value,
            bounds.hockey_stick_bound(
                models.bernoulli_e_gamma_zeta(n, 3.0, 1.5), 3.0, 1.5, L).value,
        ):
            worst = max(worst, value - limit)
        gm = models.GaussianModel(n, 1.0, 2.0)
        g_risk = oracle.mc_risk(gm, "posterior-mean", trials, seed)
        g_limit = g_risk.mean + 3.0 * g_risk.std_error
        gl = models.gaussian_small_ball(gm)
        for value in (
            bounds.sibson_bound(models.gaussian_sibson(gm, 2.0), 2.0, gl).value,
            models.gaussian_hellinger_closed_form_bound(gm),
        ):
            worst = max(worst, value - g_limit)
        nm = models.NoisyBernoulliModel(n, 0.25)
        n_risk = oracle.mc_risk(nm, "posterior-median", trials, seed)
        worst = max(worst, models.noisy_bernoulli_bound(nm).value
                    - (n_risk.mean + 3.0 * n_risk.std_error))
    ok = worst <= 0.0
    return ok, f"max bound excess over MC risk + 3se: {worst:.3e}"


def _suite_ordering(n_values) -> tuple[bool, str]:
    worst = -math.inf
    L = models.bernoulli_small_ball()
    grid = default_alpha_grid()
    gam, zet = default_gamma_zeta_grid()
    for n in n_values:
        mi_v = bounds.mi_baseline_bound(models.bernoulli_mutual_information(n), L).value
        sib_v = bounds.optimize_bound(
            lambda alpha: _sibson_i_alpha(n, alpha), "sibson", {"alpha": grid}, L).value
        hel_v = bounds.optimize_bound(
            lambda p: _hellinger_div(n, p), "hellinger", {"p": grid}, L).value
        egz_v = bounds.optimize_bound(
            lambda gamma, zeta: models.bernoulli_e_gamma_zeta(n, gamma, zeta),
            "egz", {"gamma": gam, "zeta": zet}, L).value
        worst = max(worst, sib_v - egz_v, hel_v - sib_v, mi_v - hel_v,
                    egz_v - models.bernoulli_upper_bound(n))
    ok = worst <= 1e-9
    return ok, f"max ordering violation: {worst:.3e}"


def run_validation_suites(quick: bool = False, seed: int = 0):
    """Run all validation suites; returns a list of (name, ok, detail)."""
    if quick:
        dpi_rounds, agree_rounds, trials = 40, 40, 10 ** 4
        sandwich_n = (1, 5)
        ordering_n = (1, 2, 5, 10)
    else:
        dpi_rounds, agree_rounds, trials = 200, 200, 10 ** 5
        sandwich_n = (1, 2, 5, 10, 25, 50)
        ordering_n = (1, 2, 5, 10, 25, 50)
    results = []
    for name, fn in (
        ("dpi", lambda: _suite_dpi(seed, dpi_rounds)),
        ("oracle-agreement", lambda: _suite_oracle_agreement(seed, agree_rounds)),
        ("sandwich", lambda: _suite_sandwich(seed, trials, sandwich_n)),
        ("ordering", lambda: _suite_ordering(ordering_n)),
    ):
        ok, detail = fn()
        results.append((name, ok, detail))
    return results


def _cmd_validate(args) -> int:
    results = run_validation_suites(quick=args.quick, seed=args.seed)
    failed = 0
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        failed += 0 if ok else 1
    print(f"{len(results) - failed}/{len(results)} suites passed")
    return 0 if failed == 0 else 1


# ----------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------

def _add_common(sub, defaults):
    sub.add_argument("--config", default=None,
                     help="JSON file with defaults; explicit flags win")
    sub.add_argument("--n", default=defaults.get("n", "1..50"),
                     help="sample counts, e.g. '1..50' or '1,2,5'")
    sub.add_argument("--optimize", action="store_true",
                     help="optimize bound parameters over the default grids")
    sub.add_argument("--alpha", type=float, default=defaults.get("alpha", 2.0))
    sub.add_argument("--p", type=float, default=defaults.get("p", 2.0))
    sub.add_argument("--gamma", type=float, default=defaults.get("gamma", 3.0))
    sub.add_argument("--zeta", type=float, default=defaults.get("zeta", 1.5))
    sub.add_argument("--trials", type=int, default=0,
                     help="Monte-Carlo trials for the mc_risk column (0 = skip)")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--out", default="-", help="output path ('-' = stdout)")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riskbounds",
        description="Lower bounds on Bayesian estimation risk as CSV tables.")
    subs = parser.add_subparsers(dest="command", required=True)

    b = subs.add_parser("bernoulli", help="uniform-prior Bernoulli bias")
    _add_common(b, {})

    nb = subs.add_parser("noisy-bernoulli", help="Bernoulli bias through a BSC")
    _add_common(nb, {})
    nb.add_argument("--lambda", dest="lam", type=float, default=0.25,
                    help="BSC crossover probability")

    g = subs.add_parser("gaussian", help="Gaussian mean with Gaussian prior")
    _add_common(g, {"alpha": 2.0, "p": 1.5, "gamma": 2.0, "zeta": 1.5})
    g.add_argument("--sigma-w2", dest="sigma_w2", type=float, default=1.0)
    g.add_argument("--sigma2", dest="sigma2", type=float, default=2.0)

    h = subs.add_parser("hide-and-seek", help="distributed biased-coordinate detection")
    h.add_argument("--config", default=None,
                   help="JSON file with defaults; explicit flags win")
    h.add_argument("--n", default="1..100")
    h.add_argument("--d", type=int, default=512)
    h.add_argument("--m", type=int, default=10)
    h.add_argument("--b", type=float, default=1536.0)
    h.add_argument("--theta-rule", dest="theta_rule", default="n^-2",
                   help="bias rule: a float, or 'n^-2' style power laws")
    h.add_argument("--seed", type=int, default=0)
    h.add_argument("--out", default="-")
    h.add_argument("--format", choices=("csv", "json"), default="csv")

    v = subs.add_parser("validate", help="run the numerical validation suites")
    v.add_argument("--quick", action="store_true")
    v.add_argument("--seed", type=int, default=0)
    parser._command_parsers = {"bernoulli": b, "noisy-bernoulli": nb,
                               "gaussian": g, "hide-and-seek": h,
                               "validate": v}
    return parser


def _apply_config_file(parser, args, argv):
    """Re-parse with file values as defaults: flags > config > defaults."""
    try:
        with open(args.config) as fh:
            loaded = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        parser.exit(2, f"configuration error: cannot read {args.config}: {exc}\n")
    sub = parser._command_parsers[args.command]
    known = {action.dest for action in sub._actions}
    unknown = set(loaded) - known
    if unknown:
        parser.exit(2, f"configuration error: unknown config keys {sorted(unknown)}\n")
    sub.set_defaults(**loaded)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        args = _apply_config_file(parser, args, argv)
    try:
        if args.command == "validate":
            return _cmd_validate(args)
        n_values = _parse_n_range(str(args.n))
        # surface bad model parameters as configuration errors up front
        if args.command == "noisy-bernoulli":
            models.NoisyBernoulliModel(n_values[0], args.lam)
        elif args.command == "gaussian":
            models.GaussianModel(n_values[0], args.sigma_w2, args.sigma2)
    except ValueError as exc:
        parser.exit(2, f"configuration error: {exc}\n")
    if args.command == "bernoulli":
        return _sweep(_bernoulli_point, n_values, args, "bernoulli", EST_HEADER)
    if args.command == "noisy-bernoulli":
        return _sweep(_noisy_point, n_values, args, "noisy-bernoulli", EST_HEADER)
    if args.command == "gaussian":
        return _sweep(_gaussian_point, n_values, args, "gaussian", EST_HEADER)
    if args.command == "hide-and-seek":
        return _sweep(_hide_and_seek_point, n_values, args, "hide-and-seek",
                      HNS_HEADER)
    parser.exit(2, f"unknown command {args.command!r}\n")


if __name__ == "__main__":
    sys.exit(main())
