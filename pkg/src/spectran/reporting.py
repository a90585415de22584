"""Report types and their serialization: CSV, JSON, and plot-data files.

All numeric output goes through a single 17-significant-digit formatter so
that identical runs produce identical bytes, independent of locale.
"""

import csv
import json
from dataclasses import dataclass

import numpy as np

CERTIFICATE_KINDS = ("spectral-inclusion", "below-threshold", "moment-bound")


def fmt(value) -> str:
    """Locale-independent shortest-faithful float formatting."""
    return "%.17g" % float(value)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return fmt(value)
    return str(value)


@dataclass(frozen=True)
class CertificateReport:
    """One certified spectral statement with its numeric backing.

    kind is one of CERTIFICATE_KINDS; the statement text restates the
    numeric fields, never the other way around.  provenance carries the
    config hash and fixture identification of the producing run.
    """

    kind: str
    statement: str
    mu: float | None = None
    radius: float | None = None
    margin: float | None = None
    sigma: float | None = None
    provenance: str = "unpinned"

    @property
    def skipped(self) -> bool:
        return self.statement.startswith("skipped:")


def _write_rows(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def write_quasimode_csv(reports, path) -> None:
    if not isinstance(reports, (list, tuple)):
        reports = [reports]
    rows = [
        (
            report.regime,
            report.mu,
            int(report.params_list[i]),
            report.norms[i],
            report.structural_residuals[i],
            report.residuals[i],
        )
        for report in reports
        for i in range(report.params_list.size)
    ]
    _write_rows(
        path,
        ("regime", "mu", "index", "norm", "structural_residual", "total_residual"),
        rows,
    )


def write_certificates_csv(reports, path) -> None:
    rows = [
        (r.kind, r.mu, r.radius, r.margin, r.sigma, r.statement, r.provenance)
        for r in reports
    ]
    _write_rows(
        path,
        ("kind", "mu", "radius", "margin", "sigma", "statement", "provenance"),
        rows,
    )


def write_spectrum_csv(boxes, results, path) -> None:
    """Eigenvalue ladder: one row per (box, eigenvalue index)."""
    rows = []
    for box, res in zip(boxes, results):
        for j, val in enumerate(res.eigenvalues):
            resid = res.residuals[j] if j < len(res.residuals) else None
            rows.append((box, j, val, resid, res.converged))
    _write_rows(path, ("box", "index", "eigenvalue", "residual", "converged"), rows)


def write_moment_csv(reports, path) -> None:
    rows = [
        (
            r.sigma,
            r.kappa,
            r.alpha1,
            r.rhs_series,
            r.rhs_box,
            r.rhs_total,
            r.lhs,
            r.satisfied,
            r.margin,
        )
        for r in reports
    ]
    _write_rows(
        path,
        (
            "sigma",
            "kappa",
            "alpha1",
            "rhs_series",
            "rhs_box",
            "rhs_total",
            "lhs",
            "satisfied",
            "margin",
        ),
        rows,
    )


def write_trial_csv(report, path) -> None:
    rows = [
        (int(report.k_list[i]), report.form_values[i])
        for i in range(report.k_list.size)
    ]
    _write_rows(path, ("k", "form_value"), rows)


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def write_json(payload: dict, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_plot_data(path, xs, ys, labels=("x", "y")) -> None:
    """Two-column plot-ready text file, one point per row."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("# %s %s\n" % labels)
        for x, y in zip(xs, ys):
            fh.write("%s %s\n" % (fmt(x), fmt(y)))


def render_plot(path, xs, ys, xlabel, ylabel, title, loglog=False) -> None:
    """Render the matching figure next to a plot-data file."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5.0, 3.4), dpi=130)
    if loglog:
        ax.loglog(xs, ys, "o-", lw=1.2, ms=4)
    else:
        ax.plot(xs, ys, "o-", lw=1.2, ms=4)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
