"""Command-line driver.

Every command loads a config file, overlays SPECTRAN_* environment
variables, writes delimited output plus a JSON run summary into --out, and
prints a short human-readable line per result.  The `report` command also
renders figures next to its plot-data files.

Exit codes: 0 success (including an inconclusive trial form), 1 a
certified inequality failed, 2 usage or configuration problems, 3 the
numerics did not converge to the requested accuracy.
"""

import argparse
import os
import sys

from .errors import (
    AccuracyError,
    BracketingError,
    ConfigError,
    ConvergenceError,
    DomainError,
    ParameterError,
    RegimeError,
    ResolutionError,
    ResourceError,
    SearchError,
    SolverError,
    ValidationError,
)

EXIT_OK = 0
EXIT_CERTIFICATE_FAILED = 1
EXIT_USAGE = 2
EXIT_NO_CONVERGENCE = 3

_USAGE_ERRORS = (
    ConfigError,
    ParameterError,
    ValidationError,
    ResolutionError,
    ResourceError,
    RegimeError,
)
_NUMERIC_ERRORS = (
    AccuracyError,
    BracketingError,
    ConvergenceError,
    DomainError,
    SearchError,
    SolverError,
)

_THREAD_VARS = (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
)

COMMANDS = (
    "classify",
    "spectrum1d",
    "critical-lambda",
    "kappa",
    "spectrum2d",
    "quasimode",
    "trial-form",
    "certify",
    "moment-bound",
    "report",
)


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, metavar="PATH", help="run configuration file")
    common.add_argument("--out", default=".", metavar="DIR", help="output directory")
    common.add_argument("--seed", type=int, default=None, help="override solver.seed")
    common.add_argument(
        "--strict",
        action="store_true",
        help="turn the channel-resolution warning into an error",
    )
    common.add_argument(
        "--threads",
        type=int,
        default=None,
        help="BLAS/OpenMP thread count (set before numerics load)",
    )

    parser = argparse.ArgumentParser(
        prog="spectran",
        description="certified spectral checks for the waveguide-in-an-oscillator model",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "classify": "decide the spectral regime from the 1D ground level",
        "spectrum1d": "lowest eigenvalues of the 1D comparison operator",
        "critical-lambda": "coupling where the 1D ground level crosses zero",
        "kappa": "smallest window half-length with Neumann floor >= gamma0/2",
        "spectrum2d": "lowest eigenvalues of the planar operator on one box",
        "quasimode": "oscillating-family norms and residuals over the index list",
        "trial-form": "quadratic-form values of the threshold trial family",
        "certify": "spectral-inclusion certificates on the mu grid",
        "moment-bound": "both sides of the eigenvalue-moment inequality",
        "report": "classification plus rendered convergence figures",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common], help=helps[name])
        if name in ("spectrum1d", "spectrum2d"):
            p.add_argument(
                "--dump-matrix",
                action="store_true",
                help="save the assembled matrix arrays as .npz",
            )
    return parser


def _print(line: str) -> None:
    sys.stdout.write(line + "\n")


def _summary(cfg, outdir: str, command: str, extra: dict, files: list) -> str:
    from .config import config_digest, dump_config
    from .reporting import write_json

    path = os.path.join(outdir, command + ".json")
    payload = {
        "command": command,
        "config_digest": config_digest(cfg),
        "config_canonical": dump_config(cfg),
        "outputs": sorted(files),
    }
    payload.update(extra)
    write_json(payload, path)
    return path


def _ground_state(cfg, params):
    from .analysis1d import gamma0

    return gamma0(params, accuracy=cfg["tol.gamma0"])


def _cmd_classify(args, cfg, outdir) -> int:
    from .analysis1d import classify

    params = cfg.model_params()
    cls = classify(params, accuracy=cfg["tol.gamma0"], regime_tol=cfg["tol.regime"])
    _print(
        "classify: regime=%s gamma0=%.12g (tolerance %g)"
        % (cls.regime, cls.gamma0, cls.tolerance)
    )
    _summary(
        cfg,
        outdir,
        "classify",
        {"regime": cls.regime, "gamma0": cls.gamma0, "tolerance": cls.tolerance},
        [],
    )
    return EXIT_OK


def _cmd_spectrum1d(args, cfg, outdir) -> int:
    import numpy as np

    from .eigensolve import dense_tridiagonal_eigs
    from .grids import assemble_L
    from .reporting import write_spectrum_csv

    params = cfg.model_params()
    grid = cfg.grid1d()
    diag, off = assemble_L(params, grid, strict=args.strict).tridiagonal()
    count = min(cfg["solver.count"], grid.n)
    result = dense_tridiagonal_eigs(diag, off, vectors=count, lowest=count)
    files = [os.path.join(outdir, "spectrum1d.csv")]
    write_spectrum_csv([grid.half_width], [result], files[0])
    if args.dump_matrix:
        mpath = os.path.join(outdir, "spectrum1d_matrix.npz")
        np.savez(mpath, diagonal=diag, offdiagonal=off)
        files.append(mpath)
    _print(
        "spectrum1d: lowest=%.12g (%d eigenvalue(s), half_width=%g, n=%d)"
        % (result.eigenvalues[0], count, grid.half_width, grid.n)
    )
    _summary(
        cfg,
        outdir,
        "spectrum1d",
        {"eigenvalues": result.eigenvalues, "residuals": result.residuals},
        files,
    )
    return EXIT_OK


def _cmd_critical_lambda(args, cfg, outdir) -> int:
    from .analysis1d import critical_lambda

    params = cfg.model_params()
    value = critical_lambda(params.omega, params.potential, bracket_tol=cfg["tol.bracket"])
    _print("critical-lambda: %.17g (bracket tolerance %g)" % (value, cfg["tol.bracket"]))
    _summary(
        cfg,
        outdir,
        "critical-lambda",
        {"critical_lambda": value, "bracket_tol": cfg["tol.bracket"]},
        [],
    )
    return EXIT_OK


def _cmd_kappa(args, cfg, outdir) -> int:
    from .analysis1d import kappa
    from .reporting import write_plot_data

    params = cfg.model_params()
    state = _ground_state(cfg, params)
    if state.gamma0 <= cfg["tol.regime"]:
        raise RegimeError(
            "kappa is defined in the subcritical regime only; gamma0 = %.3g"
            % state.gamma0
        )
    trace: list = []
    value = kappa(params, state.gamma0, trace_out=trace)
    files = [os.path.join(outdir, "kappa_trace.dat")]
    write_plot_data(
        files[0],
        [k for k, _ in trace],
        [f for _, f in trace],
        labels=("half_length", "neumann_floor"),
    )
    _print("kappa: %.17g (gamma0=%.12g, %d floor evaluations)" % (value, state.gamma0, len(trace)))
    _summary(
        cfg,
        outdir,
        "kappa",
        {"kappa": value, "gamma0": state.gamma0, "floor_evaluations": len(trace)},
        files,
    )
    return EXIT_OK


def _cmd_spectrum2d(args, cfg, outdir) -> int:
    import numpy as np

    from .eigensolve import extremal_sparse_eigs
    from .grids import assemble_H
    from .reporting import write_spectrum_csv

    params = cfg.model_params()
    grid = cfg.grid2d()
    op = assemble_H(params, grid, strict=args.strict)
    count = min(cfg["solver.count"], op.dim - 1)
    result = extremal_sparse_eigs(
        op,
        count=count,
        tol=cfg["tol.eig"],
        seed=cfg["solver.seed"],
        max_cycles=cfg["solver.max_cycles"],
    )
    files = [os.path.join(outdir, "spectrum2d.csv")]
    write_spectrum_csv([grid.x_half_width], [result], files[0])
    if args.dump_matrix:
        csr = op.to_csr()
        mpath = os.path.join(outdir, "spectrum2d_matrix.npz")
        np.savez(mpath, data=csr.data, indices=csr.indices, indptr=csr.indptr)
        files.append(mpath)
    _summary(
        cfg,
        outdir,
        "spectrum2d",
        {
            "eigenvalues": result.eigenvalues,
            "residuals": result.residuals,
            "converged": result.converged,
            "iterations": result.iterations,
        },
        files,
    )
    if not result.converged:
        _print(
            "spectrum2d: NOT CONVERGED after %d matrix applications (tol %g)"
            % (result.iterations, cfg["tol.eig"])
        )
        return EXIT_NO_CONVERGENCE
    _print(
        "spectrum2d: lowest=%.12g (%d eigenvalue(s), box %gx%g, %dx%d nodes)"
        % (
            result.eigenvalues[0],
            count,
            grid.x_half_width,
            grid.y_half_width,
            grid.nx,
            grid.ny,
        )
    )
    return EXIT_OK


def _cmd_quasimode(args, cfg, outdir) -> int:
    from .certificates import critical_quasimode_residual, subcritical_quasimode_residual
    from .reporting import write_quasimode_csv

    params = cfg.model_params()
    state = _ground_state(cfg, params)
    regime_tol = cfg["tol.regime"]
    if state.gamma0 < -regime_tol:
        raise RegimeError(
            "no quasimode family is defined in the supercritical regime "
            "(gamma0 = %.3g)" % state.gamma0
        )
    critical = abs(state.gamma0) <= regime_tol

    reports = []
    skipped = []
    for mu in cfg["quasimode.mu_grid"]:
        if critical:
            rep = critical_quasimode_residual(
                params, state, mu, cfg["quasimode.n_list"], regime_tol=regime_tol
            )
        else:
            if mu < params.omega:
                skipped.append(mu)
                _print("quasimode: mu=%g skipped (below the threshold omega=%g)" % (mu, params.omega))
                continue
            rep = subcritical_quasimode_residual(
                params,
                mu,
                cfg["quasimode.k_list"],
                gamma0_value=state.gamma0,
                regime_tol=regime_tol,
            )
        reports.append(rep)
        _print(
            "quasimode: mu=%g radius=%.9g at index %d (structural slope %.3f)"
            % (mu, rep.residuals[-1], int(rep.params_list[-1]), rep.fitted_slope)
        )
    if not reports:
        raise DomainError(
            "no quasimode exists for any mu in the grid; in the subcritical "
            "regime mu must reach the threshold omega"
        )
    files = [os.path.join(outdir, "quasimode.csv")]
    write_quasimode_csv(reports, files[0])
    _summary(
        cfg,
        outdir,
        "quasimode",
        {
            "regime": "critical" if critical else "subcritical",
            "gamma0": state.gamma0,
            "skipped_mu": skipped,
            "fitted_slopes": {str(r.mu): r.fitted_slope for r in reports},
        },
        files,
    )
    return EXIT_OK


def _cmd_trial_form(args, cfg, outdir) -> int:
    from .certificates import trial_form_value
    from .reporting import write_trial_csv

    params = cfg.model_params()
    report = trial_form_value(params, cfg["trial.k_list"])
    files = [os.path.join(outdir, "trial_form.csv")]
    write_trial_csv(report, files[0])
    _print("trial-form: " + report.certificate_statement)
    _summary(
        cfg,
        outdir,
        "trial-form",
        {
            "k_star": report.k_star,
            "margin": report.margin,
            "statement": report.certificate_statement,
        },
        files,
    )
    return EXIT_OK


def _cmd_certify(args, cfg, outdir) -> int:
    from .certificates import spectrum_certificate
    from .config import config_digest
    from .reporting import write_certificates_csv

    params = cfg.model_params()
    reports = spectrum_certificate(
        params,
        cfg["quasimode.mu_grid"],
        index=cfg["certify.index"],
        regime_tol=cfg["tol.regime"],
        accuracy=cfg["tol.gamma0"],
        provenance="config-sha256:%s" % config_digest(cfg)[:16],
    )
    files = [os.path.join(outdir, "certificates.csv")]
    write_certificates_csv(reports, files[0])
    max_radius = cfg["certify.max_radius"]
    failures = []
    for rep in reports:
        _print("certify: mu=%g %s" % (rep.mu, rep.statement))
        if rep.radius is not None and rep.radius > max_radius:
            failures.append(rep.mu)
    _summary(
        cfg,
        outdir,
        "certify",
        {"max_radius": max_radius, "failed_mu": failures},
        files,
    )
    if failures:
        _print(
            "certify: FAILED for mu in %s (radius above the certified maximum %g)"
            % (failures, max_radius)
        )
        return EXIT_CERTIFICATE_FAILED
    return EXIT_OK


def _cmd_moment_bound(args, cfg, outdir) -> int:
    from .eigensolve import extremal_sparse_eigs
    from .grids import assemble_H
    from .momentbound import MomentBoundContext
    from .reporting import write_moment_csv

    params = cfg.model_params()
    grids = cfg.box_ladder()
    results = [
        extremal_sparse_eigs(
            assemble_H(params, g, strict=args.strict),
            count=cfg["solver.count"],
            tol=cfg["tol.eig"],
            seed=cfg["solver.seed"],
            max_cycles=cfg["solver.max_cycles"],
        )
        for g in grids
    ]
    ctx = MomentBoundContext.create(
        params,
        accuracy=cfg["tol.gamma0"],
        regime_tol=cfg["tol.regime"],
        box_ladder=grids,
        ladder_results=results,
        tol_disc=cfg["tol.disc"],
    )
    reports = [ctx.check(sigma) for sigma in cfg["moment.sigma_list"]]
    files = [os.path.join(outdir, "moment_bound.csv")]
    write_moment_csv(reports, files[0])
    unsatisfied = []
    for rep in reports:
        _print(
            "moment-bound: sigma=%g lhs=%.9g rhs=%.9g %s"
            % (
                rep.sigma,
                rep.lhs,
                rep.rhs_total,
                "satisfied" if rep.satisfied else "VIOLATED",
            )
        )
        if not rep.satisfied:
            unsatisfied.append(rep.sigma)
    _summary(
        cfg,
        outdir,
        "moment-bound",
        {
            "kappa": ctx.kappa_value,
            "alpha1": ctx.alpha1_value,
            "alpha1_branch": ctx.alpha1_branch,
            "lhs_source": reports[0].lhs_source if reports else "",
            "violated_sigma": unsatisfied,
        },
        files,
    )
    return EXIT_CERTIFICATE_FAILED if unsatisfied else EXIT_OK


def _cmd_report(args, cfg, outdir) -> int:
    import numpy as np

    from .analysis1d import classify, gamma0
    from .certificates import critical_quasimode_residual, subcritical_quasimode_residual
    from .eigensolve import extremal_sparse_eigs
    from .grids import Grid2D, assemble_H
    from .model import ModelParams
    from .reporting import render_plot, write_plot_data

    params = cfg.model_params()
    state = _ground_state(cfg, params)
    cls = classify(
        params,
        accuracy=cfg["tol.gamma0"],
        regime_tol=cfg["tol.regime"],
        ground_state=state,
    )
    _print("report: regime=%s gamma0=%.12g" % (cls.regime, cls.gamma0))
    if cls.regime == "supercritical":
        raise RegimeError(
            "the report's residual curve needs gamma0 >= 0; gamma0 = %.3g"
            % cls.gamma0
        )
    files: list = []

    # Residual decay of the appropriate oscillating family.
    if cls.regime == "critical":
        mu_grid = np.asarray(cfg["quasimode.mu_grid"], dtype=float)
        mu = float(mu_grid[np.argmin(np.abs(mu_grid - 1.0))])
        qm = critical_quasimode_residual(
            params, state, mu, cfg["quasimode.n_list"], regime_tol=cfg["tol.regime"]
        )
    else:
        above = [m for m in cfg["quasimode.mu_grid"] if m >= params.omega]
        mu = float(above[0]) if above else params.omega
        qm = subcritical_quasimode_residual(
            params,
            mu,
            cfg["quasimode.k_list"],
            gamma0_value=state.gamma0,
            regime_tol=cfg["tol.regime"],
        )
    dat = os.path.join(outdir, "residual_vs_index.dat")
    png = os.path.join(outdir, "residual_vs_index.png")
    write_plot_data(
        dat, qm.params_list, qm.structural_residuals, labels=("index", "structural_residual")
    )
    render_plot(
        png,
        qm.params_list,
        qm.structural_residuals,
        "index",
        "structural residual",
        "residual decay at mu=%g" % mu,
        loglog=True,
    )
    files += [dat, png]

    # Ground-level monotonicity in the coupling.
    lam_top = params.lam if params.lam > 0 else 2.0
    lams = np.linspace(0.0, lam_top, 5)
    gs = []
    hint = None
    for lam in lams:
        stage = gamma0(
            ModelParams(params.omega, float(lam), params.potential),
            accuracy=1e-6,
            half_width_hint=hint,
        )
        hint = stage.grid.half_width
        gs.append(stage.gamma0)
    dat = os.path.join(outdir, "gamma0_vs_lambda.dat")
    png = os.path.join(outdir, "gamma0_vs_lambda.png")
    write_plot_data(dat, lams, gs, labels=("lambda", "gamma0"))
    render_plot(png, lams, gs, "coupling", "ground level", "ground level vs coupling")
    files += [dat, png]

    # Box convergence of the free planar ground level toward the threshold.
    free = ModelParams(params.omega, 0.0, params.potential)
    y_half = 4.5 / float(np.sqrt(params.omega))
    boxes = (3.0, 4.0, 5.0)
    lows = []
    for x_half, nx in zip(boxes, (89, 119, 149)):
        grid = Grid2D(x_half, y_half, nx, 89)
        res = extremal_sparse_eigs(
            assemble_H(free, grid),
            count=1,
            tol=cfg["tol.eig"],
            seed=cfg["solver.seed"],
        )
        lows.append(float(res.eigenvalues[0]))
    dat = os.path.join(outdir, "eigenvalue_vs_box.dat")
    png = os.path.join(outdir, "eigenvalue_vs_box.png")
    write_plot_data(dat, boxes, lows, labels=("x_half_width", "lowest_eigenvalue"))
    render_plot(
        png,
        boxes,
        lows,
        "box half-width",
        "lowest eigenvalue",
        "free ladder vs threshold %g" % params.omega,
    )
    files += [dat, png]

    _summary(
        cfg,
        outdir,
        "report",
        {
            "regime": cls.regime,
            "gamma0": cls.gamma0,
            "residual_mu": mu,
            "gamma0_curve": {"lambda": lams, "gamma0": gs},
            "free_ladder": {"boxes": boxes, "lowest": lows},
        },
        files,
    )
    _print("report: wrote %d files to %s" % (len(files) + 1, outdir))
    return EXIT_OK


_HANDLERS = {
    "classify": _cmd_classify,
    "spectrum1d": _cmd_spectrum1d,
    "critical-lambda": _cmd_critical_lambda,
    "kappa": _cmd_kappa,
    "spectrum2d": _cmd_spectrum2d,
    "quasimode": _cmd_quasimode,
    "trial-form": _cmd_trial_form,
    "certify": _cmd_certify,
    "moment-bound": _cmd_moment_bound,
    "report": _cmd_report,
}


def _run(args) -> int:
    from .config import apply_env, load_config

    cfg = apply_env(load_config(args.config))
    if args.seed is not None:
        cfg = cfg.with_updates({"solver.seed": int(args.seed)})
    os.makedirs(args.out, exist_ok=True)
    return _HANDLERS[args.command](args, cfg, args.out)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.threads is not None:
        if args.threads < 1:
            sys.stderr.write("error: --threads must be at least 1\n")
            return EXIT_USAGE
        for var in _THREAD_VARS:
            os.environ[var] = str(args.threads)
    try:
        return _run(args)
    except _USAGE_ERRORS as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_USAGE
    except _NUMERIC_ERRORS as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_NO_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
