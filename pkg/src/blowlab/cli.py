"""Command-line surface: classify, iterate, run, sweep, report, selftest.

Every table printed as prose is mirrored by a machine-readable twin: either
an ``@record`` JSON line on stdout or a CSV/JSONL file in the output
directory. The report command also renders the fitted scaling laws as PNG
figures next to the plot-data files.

Exit codes: 0 ok, 2 config error, 3 solver failure, 4 insufficient data.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, load_config
from .iteration import (
    AdmissibilityError,
    OutOfAsymptoticRangeError,
    Variant,
    divergence_onset,
    iterate,
    variant_for,
)
from .odelab import SolverFailure, comparison_problem, integrate_comparison
from .params import ModelParams, Spacetime
from .pdelab import run_until_blowup
from .regimes import Growth, RegimeUnsupportedError, classify, lifespan_bound, theta_log
from .sweep import (
    ENGINE_ODE,
    ENGINE_PDE,
    FitResult,
    InsufficientRecordsError,
    SweepAbortedError,
    SweepPlan,
    SweepRecord,
    compare_to_theory,
    fit_lifespan,
    law_for_regime,
    run_sweep,
    verdict_line,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_NO_DATA = 4


def _json_safe(value):
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, (np.floating, np.integer)):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _emit_record(kind: str, payload: dict):
    print("@record " + json.dumps({"kind": kind, **_json_safe(payload)}, sort_keys=True))


def _fmt(x) -> str:
    if x is None:
        return ""
    return repr(float(x))


def _write_csv(path: Path, header: list[str], rows: list[list]):
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if cell is None:
                cells.append("")
            elif isinstance(cell, bool):
                cells.append("true" if cell else "false")
            elif isinstance(cell, (int, np.integer)):
                cells.append(str(int(cell)))
            elif isinstance(cell, str):
                cells.append(cell)
            else:
                cells.append(_fmt(cell))
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")


def _params_dict(params: ModelParams) -> dict:
    d = asdict(params)
    d["spacetime"] = params.spacetime.value
    return d


def _params_from_dict(d: dict) -> ModelParams:
    return ModelParams(
        n=int(d["n"]), c=d["c"], H=d["H"], b=d["b"], m2=d["m2"], beta=d["beta"],
        p=d["p"], mu=d["mu"], r_exp=d["r_exp"], kappa_poly=d["kappa_poly"],
        spacetime=Spacetime(d["spacetime"]), R=d["R"], epsilon=d["epsilon"],
    )


def cmd_classify(cfg: RunConfig) -> int:
    report = classify(cfg.params)
    print(f"dissipation: {report.dissipation.value}")
    print(f"growth:      {report.growth.value}")
    if report.note:
        print(f"note:        {report.note}")
    for name, value in [
        ("r_crit", report.r_crit), ("kappa_crit", report.kappa_crit),
        ("rho_crit_lin", report.rho_crit_lin), ("rho_crit_v0", report.rho_crit_v0),
        ("N0", report.N0), ("p_tilde", report.p_tilde), ("p0", report.p0),
    ]:
        if value is not None and not (isinstance(value, float) and math.isnan(value)):
            print(f"{name}:{' ' * max(1, 12 - len(name))}{value:.12g}")
    if report.branch is not None:
        print(f"branch:      {report.branch.value}")
    payload = {
        "dissipation": report.dissipation.value, "growth": report.growth.value,
        "r_crit": report.r_crit, "kappa_crit": report.kappa_crit,
        "rho_crit_lin": report.rho_crit_lin, "rho_crit_v0": report.rho_crit_v0,
        "branch": report.branch.value if report.branch else None,
        "N0": report.N0, "p_tilde": report.p_tilde, "p0": report.p0,
        "note": report.note,
    }
    if report.growth is not Growth.BELOW_THRESHOLD:
        bound = lifespan_bound(report, cfg.params)
        print(f"bound:       {bound.family.value}, eps exponent "
              f"{bound.exponent_of_epsilon:.12g}, aux exponent {bound.aux_exponent:.12g}")
        payload["bound_family"] = bound.family.value
        payload["bound_eps_exponent"] = bound.exponent_of_epsilon
        payload["bound_aux_exponent"] = bound.aux_exponent
    _emit_record("classify", payload)
    return EXIT_OK


def cmd_iterate(cfg: RunConfig) -> int:
    variant = variant_for(cfg.params)
    if variant is None:
        print("error: the classified regime has no iteration variant "
              "(below threshold, or the balanced polynomial case that rests "
              "on a cited comparison lemma)", file=sys.stderr)
        return EXIT_CONFIG
    seed = cfg.k1 if variant is Variant.ANTI_DS_EXPONENTIAL else cfg.k0
    try:
        trace = iterate(variant, cfg.params, cfg.j_max, seed_constant=seed,
                        frame_constant=cfg.iterate_frame_c)
    except AdmissibilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    two_step = variant in (Variant.EXPONENTIAL_2STEP, Variant.ANTI_DS_EXPONENTIAL)
    cols = ["j", "L_j", "ln_C_j", "cf_delta"]
    if trace.a is not None:
        cols[2:2] = ["a_j"]
    if trace.b_seq is not None:
        cols.insert(-2, "b_j")
        cols.insert(-2, "beta_j")
    if trace.gamma_seq is not None:
        cols.insert(-2, "gamma_j")
    if trace.d_seq is not None:
        cols.insert(-2, "d_j")

    rows = []
    for j in range(trace.j_max + 1):
        shift = trace.L[2 * j] if two_step else trace.L[j]
        delta = 0.0
        for seq, closed in [(trace.a, trace.a_closed), (trace.b_seq, trace.b_closed),
                            (trace.beta_seq, trace.beta_closed),
                            (trace.gamma_seq, trace.gamma_closed),
                            (trace.d_seq, trace.d_closed)]:
            if seq is not None:
                denom = max(1.0, abs(closed[j]))
                delta = max(delta, abs(seq[j] - closed[j]) / denom)
        row = {"j": j, "L_j": shift, "ln_C_j": trace.ln_C[j], "cf_delta": delta}
        if trace.a is not None:
            row["a_j"] = trace.a[j]
        if trace.b_seq is not None:
            row["b_j"] = trace.b_seq[j]
            row["beta_j"] = trace.beta_seq[j]
        if trace.gamma_seq is not None:
            row["gamma_j"] = trace.gamma_seq[j]
        if trace.d_seq is not None:
            row["d_j"] = trace.d_seq[j]
        rows.append(row)

    print(f"variant: {variant.value}   q = {trace.q:.12g}   "
          f"limit L = {trace.slicing.limit_L:.12g}")
    print("  ".join(f"{c:>12s}" for c in cols))
    for row in rows:
        print("  ".join(f"{row[c]:12.5g}" if c != "j" else f"{row[c]:12d}" for c in cols))
    print(f"start index j* = {trace.start_index}")
    onset = None
    try:
        onset = divergence_onset(trace)
        print(f"divergence onset (lifespan upper bound) at eps = "
              f"{cfg.params.epsilon:g}: {onset:.6g}")
    except OutOfAsymptoticRangeError as exc:
        print(f"divergence onset: out of asymptotic range ({exc})")

    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    _write_csv(cfg.output_dir / "iterate.csv", cols,
               [[row[c] for c in cols] for row in rows])
    _emit_record("iterate", {
        "variant": variant.value, "q": trace.q, "start_index": trace.start_index,
        "limit_L": trace.slicing.limit_L, "onset": onset,
        "case_constant": trace.case_constant, "tilde_constant": trace.tilde_constant,
        "hat_constant": trace.hat_constant, "ln_limit": trace.ln_limit,
        "csv": str(cfg.output_dir / "iterate.csv"),
    })
    return EXIT_OK


def cmd_run(cfg: RunConfig) -> int:
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    try:
        if cfg.engine == "ode":
            problem = comparison_problem(cfg.params, frame_C=cfg.frame_c,
                                         t_max=cfg.ode_horizon)
            est = integrate_comparison(problem, cfg.ode_controls, keep_trace=True)
            rows = [[t, u, lu] for t, u, lu in
                    zip(est.t_samples, est.u_samples, est.log_u_samples)]
            _write_csv(cfg.output_dir / "ode_trace.csv", ["t", "U", "log_U"], rows)
            meta = {
                "engine": "ode", "params": _params_dict(cfg.params),
                "problem": asdict(problem), "blew_up": est.blew_up,
                "T_hat": est.T_hat, "T_low": est.T_low, "steps": est.steps,
                "reason": est.reason, "fit_exponent": est.fit_exponent,
            }
        else:
            run = run_until_blowup(cfg.params, cfg.pde_controls)
            est = run.blowup
            rows = [[t, U, lp, v0, sr] for t, U, lp, v0, sr in
                    zip(run.t, run.U, run.lp_p, run.V0, run.support_radius)]
            _write_csv(cfg.output_dir / "pde_trace.csv",
                       ["t", "U", "lp_p", "V0", "support_radius"], rows)
            meta = {
                "engine": "pde", "params": _params_dict(cfg.params),
                "blew_up": est.blew_up, "T_hat": est.T_hat, "T_low": est.T_low,
                "steps": est.steps, "reason": est.reason,
                "fit_exponent": est.fit_exponent,
                "data_mass0": run.data_mass0, "data_mass1": run.data_mass1,
                "min_undershoot": run.min_undershoot,
                "guard_engaged": run.guard_engaged, **run.metadata,
            }
    except (SolverFailure, RegimeUnsupportedError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    (cfg.output_dir / "run_meta.json").write_text(
        json.dumps(_json_safe(meta), indent=2, sort_keys=True) + "\n")
    if est.blew_up:
        print(f"blow-up detected: T_hat = {est.T_hat:.6g} "
              f"(last integrated t = {est.T_low:.6g}, {est.steps} steps)")
    else:
        print(f"{est.reason} at t = {est.T_low:.6g} ({est.steps} steps)")
    _emit_record("run", meta)
    return EXIT_OK


def _sweep_meta(cfg: RunConfig, engine: str) -> dict:
    return {
        "params": _params_dict(cfg.params), "engine": engine,
        "epsilons": list(cfg.sweep_epsilons), "law": cfg.sweep_law,
        "drop_largest": cfg.sweep_drop_largest,
        "tolerance": cfg.sweep_tolerance, "r2_min": cfg.sweep_r2_min,
        "exploratory": cfg.sweep_exploratory,
        "horizon": cfg.ode_horizon if engine == ENGINE_ODE else cfg.horizon,
        "frame_c": cfg.frame_c,
    }


def cmd_sweep(cfg: RunConfig) -> int:
    engine = ENGINE_ODE if cfg.engine == "ode" else ENGINE_PDE
    try:
        plan = SweepPlan(
            params=cfg.params, epsilons=cfg.sweep_epsilons, engine=engine,
            ode_controls=cfg.ode_controls, pde_controls=cfg.pde_controls,
            frame_C=cfg.frame_c, horizon=cfg.ode_horizon, workers=cfg.sweep_workers,
            exploratory=cfg.sweep_exploratory,
            drop_largest=cfg.sweep_drop_largest,
            tolerance=cfg.sweep_tolerance or 0.15, r2_min=cfg.sweep_r2_min,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    aborted = None
    try:
        records = run_sweep(plan)
    except SweepAbortedError as exc:
        records = exc.partial
        aborted = str(exc)

    _write_csv(cfg.output_dir / "sweep.csv", ["epsilon", "T_hat", "blew_up", "steps"],
               [[r.epsilon, r.t_hat, r.blew_up, r.steps] for r in records])
    with open(cfg.output_dir / "records.jsonl", "w") as fh:
        for r in records:
            fh.write(json.dumps(_json_safe(r.to_dict()), sort_keys=True) + "\n")
    (cfg.output_dir / "sweep_meta.json").write_text(
        json.dumps(_json_safe(_sweep_meta(cfg, engine)), indent=2, sort_keys=True) + "\n")

    for r in records:
        t_txt = f"T_hat = {r.t_hat:.8g}" if r.blew_up else r.reason
        print(f"eps = {r.epsilon:<12.6g} {t_txt}  ({r.steps} steps)")
        _emit_record("sweep-run", r.to_dict())
    if aborted is not None:
        print(f"sweep aborted: {aborted}; partial results written", file=sys.stderr)
        return EXIT_SOLVER
    print(f"sweep complete: {len(records)} runs -> {cfg.output_dir}")
    return EXIT_OK


def _read_sweep_dir(directory: Path) -> tuple[list[SweepRecord], dict]:
    csv_path = directory / "sweep.csv"
    meta_path = directory / "sweep_meta.json"
    if not csv_path.exists() or not meta_path.exists():
        raise FileNotFoundError(f"{directory} holds no sweep outputs")
    meta = json.loads(meta_path.read_text())
    records = []
    jsonl = directory / "records.jsonl"
    if jsonl.exists():
        for line in jsonl.read_text().splitlines():
            d = json.loads(line)
            records.append(SweepRecord(
                epsilon=d["epsilon"], blew_up=d["blew_up"], t_hat=d["t_hat"],
                t_low=d["t_low"], steps=d["steps"], reason=d["reason"],
                fit_exponent=d.get("fit_exponent"),
            ))
    else:
        lines = csv_path.read_text().splitlines()[1:]
        for line in lines:
            eps_s, t_s, blew_s, steps_s = line.split(",")
            records.append(SweepRecord(
                epsilon=float(eps_s), blew_up=blew_s == "true",
                t_hat=float(t_s) if t_s else None, t_low=float(t_s) if t_s else 0.0,
                steps=int(steps_s), reason="", fit_exponent=None,
            ))
    return records, meta


def _render_figures(directory: Path, records: list[SweepRecord], fit: FitResult,
                    q: float, aux: float):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    blow = [r for r in records if r.blew_up and r.t_hat]
    eps = np.array([r.epsilon for r in blow])
    t_hat = np.array([r.t_hat for r in blow])

    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    ax.plot(np.log(eps), np.log(t_hat), "o", ms=4, label="measured")
    ax.set_xlabel(r"$\ln \epsilon$")
    ax.set_ylabel(r"$\ln \hat{T}$")
    ax.set_title("lifespan vs data size")
    ax.legend()
    fig.tight_layout()
    fig.savefig(directory / "report_loglog.png", dpi=150)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    if fit.law == "expLaw":
        x = eps ** (-(q - 1.0))
        y = np.log(t_hat)
        xlabel = rf"$\epsilon^{{-{q - 1.0:g}}}$"
        ylabel = r"$\ln \hat{T}$"
    elif fit.law == "thetaLaw":
        x = np.log(eps)
        y = np.array([theta_log(t, aux) for t in t_hat])
        xlabel = r"$\ln \epsilon$"
        ylabel = r"$\ln \theta(\hat{T})$"
    else:
        x = np.log(eps)
        y = np.log(t_hat)
        xlabel = r"$\ln \epsilon$"
        ylabel = r"$\ln \hat{T}$"
    ax.plot(x, y, "o", ms=4, label="measured")
    order = np.argsort(x)
    coeffs = np.polyfit(x[order][-fit.n_used:], y[order][-fit.n_used:], 1)
    xs = np.linspace(float(np.min(x)), float(np.max(x)), 50)
    ax.plot(xs, coeffs[0] * xs + coeffs[1], "-", lw=1,
            label=f"fit slope {fit.fitted_exponent:.4g}")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(f"{fit.law}: r$^2$ = {fit.r_squared:.4f}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(directory / "report_transformed.png", dpi=150)
    plt.close(fig)


def cmd_report(cfg: RunConfig, directory: Path) -> int:
    try:
        records, meta = _read_sweep_dir(directory)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_DATA
    params = _params_from_dict(meta["params"])
    report = classify(params)
    law = meta.get("law", "auto")
    if cfg.raw.get("sweep.law"):
        law = cfg.raw["sweep.law"]
    exploratory = bool(meta.get("exploratory", False))
    if law == "auto":
        if report.growth is Growth.BELOW_THRESHOLD:
            print("error: below-threshold regime has no law; set sweep.law "
                  "explicitly for an exploratory fit", file=sys.stderr)
            return EXIT_NO_DATA
        law = law_for_regime(report)
    aux = 0.0
    if law == "thetaLaw" and report.growth is Growth.EXPONENTIAL:
        aux = lifespan_bound(report, params).aux_exponent

    drop = meta.get("drop_largest", 2)
    try:
        fit = fit_lifespan(records, law, q=params.q, aux_exponent=aux,
                           drop_largest=drop)
    except InsufficientRecordsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_DATA

    verdict = None
    if not exploratory and report.growth is not Growth.BELOW_THRESHOLD:
        tol = meta.get("tolerance")
        fit = compare_to_theory(fit, report, params, tolerance=tol,
                                r2_min=meta.get("r2_min", 0.98))
        verdict = fit.verdict
        print(verdict_line(fit))
    else:
        print(f"exploratory fit ({law}): slope {fit.fitted_exponent:+.6f}, "
              f"r2 {fit.r_squared:.4f}")

    blow = [r for r in records if r.blew_up and r.t_hat]
    eps = np.array([r.epsilon for r in blow])
    t_hat = np.array([r.t_hat for r in blow])
    _write_csv(directory / "plotdata_loglog.csv", ["ln_eps", "ln_T_hat"],
               [[math.log(e), math.log(t)] for e, t in zip(eps, t_hat)])
    if law == "expLaw":
        rows = [[e ** (-(params.q - 1.0)), math.log(t)] for e, t in zip(eps, t_hat)]
        header = ["eps_pow_neg_qm1", "ln_T_hat"]
    elif law == "thetaLaw":
        rows = [[math.log(e), theta_log(t, aux)] for e, t in zip(eps, t_hat)]
        header = ["ln_eps", "ln_theta_T_hat"]
    else:
        rows = [[math.log(e), math.log(t)] for e, t in zip(eps, t_hat)]
        header = ["ln_eps", "ln_T_hat"]
    _write_csv(directory / "plotdata_transformed.csv", header, rows)
    with open(directory / "verdicts.jsonl", "w") as fh:
        fh.write(json.dumps(_json_safe(fit.to_dict()), sort_keys=True) + "\n")
    _render_figures(directory, records, fit, params.q, aux)
    _emit_record("report", {**fit.to_dict(), "law": law, "directory": str(directory)})
    print(f"report written to {directory} (verdicts.jsonl, plotdata_*.csv, "
          f"report_*.png)")
    return EXIT_OK if verdict is not False else EXIT_OK


def cmd_selftest() -> int:
    from .iteration import iterate as _iterate
    from .odelab import OdeProblem, duhamel_reconstruct
    from .params import damping_roots
    from .regimes import invert_theta
    from .specfun import bessel_ik

    checks = []

    def check(name, fn):
        try:
            ok, detail = fn()
        except Exception as exc:  # a selftest must not crash the harness
            ok, detail = False, f"exception: {exc}"
        checks.append(ok)
        print(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")

    def roots_check():
        r = damping_roots(3.0, 2.0)
        err = abs(r.alpha1 - 1.0) + abs(r.alpha2 - 2.0)
        return err < 1e-14, f"err={err:.2e}"

    def bessel_check():
        val = bessel_ik(0.5, 1.0).value_k
        exact = math.sqrt(math.pi / 2.0) * math.exp(-1.0)
        return abs(val - exact) < 1e-12, f"K_half(1) err={abs(val - exact):.2e}"

    def theta_check():
        tau = invert_theta(1.0, math.e)
        return abs(tau - 1.0) < 1e-9, f"tau={tau:.12f}"

    def ode_check():
        est = integrate_comparison(OdeProblem(b=0, m2=0, q=3, frame_C=2.0,
                                              U0=1.0, U1=1.0, t_max=5.0))
        return (est.blew_up and abs(est.T_hat - 1.0) < 1e-3,
                f"T_hat={est.T_hat:.6f}")

    def duhamel_check():
        t = np.linspace(0, 2, 64)
        rec = duhamel_reconstruct(0, 0, 1.0, 2.0, t, np.full_like(t, 3.0))
        err = float(np.max(np.abs(rec - (1 + 2 * t + 1.5 * t * t))))
        return err < 1e-10, f"err={err:.2e}"

    def iterate_check():
        pm = ModelParams(n=1, b=0, m2=0, beta=0, p=2, r_exp=1.0, epsilon=1e-6)
        tr = _iterate(Variant.EXPONENTIAL_2STEP, pm, 20)
        err = float(np.max(np.abs(tr.a - tr.a_closed)))
        return err < 1e-9, f"closed-form delta={err:.2e}"

    check("damping roots", roots_check)
    check("bessel K_1/2", bessel_check)
    check("theta inversion", theta_check)
    check("ode blow-up oracle", ode_check)
    check("duhamel reconstruction", duhamel_check)
    check("iteration closed forms", iterate_check)
    if all(checks):
        print("selftest: all checks passed")
        return EXIT_OK
    print("selftest: FAILURES detected", file=sys.stderr)
    return EXIT_SOLVER


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blowlab",
        description="Blow-up laboratory for semilinear waves on de Sitter / "
                    "anti-de Sitter backgrounds")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_txt in [
        ("classify", "print regime classification and thresholds"),
        ("iterate", "replay the iteration-frame recursions"),
        ("run", "one ODE or PDE run at the configured epsilon"),
        ("sweep", "epsilon sweep over runs"),
        ("report", "fit scaling laws over a sweep directory and render figures"),
        ("selftest", "quick internal consistency checks"),
    ]:
        p = sub.add_parser(name, help=help_txt)
        if name != "selftest":
            p.add_argument("--config", metavar="FILE", help="config file path")
            p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                           help="override a config key")
            p.add_argument("--output-dir", metavar="DIR", help="output directory")
        if name == "iterate":
            p.add_argument("--j-max", type=int, default=None,
                           help="number of iteration steps to materialize")
        if name == "report":
            p.add_argument("directory", nargs="?", default=None,
                           help="sweep output directory (default: output.dir)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "selftest":
        return cmd_selftest()
    try:
        overrides = list(args.set)
        if args.output_dir:
            overrides.append(f"output.dir={args.output_dir}")
        cfg = load_config(args.config, overrides)
        if args.command == "iterate" and args.j_max is not None:
            if args.j_max < 1:
                raise ConfigError("--j-max must be >= 1")
            cfg.j_max = args.j_max
    except (ConfigError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "classify":
        return cmd_classify(cfg)
    if args.command == "iterate":
        return cmd_iterate(cfg)
    if args.command == "run":
        return cmd_run(cfg)
    if args.command == "sweep":
        return cmd_sweep(cfg)
    if args.command == "report":
        directory = Path(args.directory) if args.directory else cfg.output_dir
        return cmd_report(cfg, directory)
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
