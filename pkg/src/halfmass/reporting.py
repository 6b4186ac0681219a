"""Report serialization: JSON payloads, CSV tables, and convergence figures.

Reports are deterministic: identical inputs produce byte-identical files.
Nothing here stamps dates, hostnames, or machine state; figure metadata is
scrubbed for the same reason.  Floats are serialized by their shortest
round-trip representation, so a written report re-parses to equal numbers.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from . import identities
from .catalog import CatalogEntry
from .invariants import CONVENTIONS
from .quadrature import LimitEstimate, QuadratureRule

VERSION = "0.1.0"


def version_string() -> str:
    return f"halfmass-v{VERSION}"


def conventions_payload() -> dict:
    """Sign and orientation choices that every report carries."""
    out = dict(CONVENTIONS)
    out["codazzi"] = identities.CODAZZI_CONVENTION
    out["static_operator"] = identities.STATIC_OPERATOR
    return out


def _float(x) -> float:
    return float(x)


def _estimate_fields(est: LimitEstimate) -> dict:
    return {
        "samples": [{"r": _float(r), "value": _float(v)}
                    for r, v in zip(est.radii, est.samples)],
        "limit": _float(est.limit),
        "error": _float(est.error),
        "rate": None if est.rate is None else _float(est.rate),
        "flags": list(est.flags),
    }


@dataclass
class CurveReport:
    """One functional evaluated on one metric, possibly component-valued."""

    functional: str
    metric: str
    params: dict
    estimates: list[LimitEstimate]
    component_labels: list[str]
    provenance: dict
    seed: int | None = None

    @property
    def flagged(self) -> bool:
        return any(est.flags for est in self.estimates)

    def payload(self) -> dict:
        scalar = len(self.estimates) == 1
        if scalar:
            body = _estimate_fields(self.estimates[0])
        else:
            parts = [_estimate_fields(est) for est in self.estimates]
            radii = self.estimates[0].radii
            body = {
                "samples": [
                    {"r": _float(r),
                     "value": [p["samples"][i]["value"] for p in parts]}
                    for i, r in enumerate(radii)],
                "limit": [p["limit"] for p in parts],
                "error": [p["error"] for p in parts],
                "rate": [p["rate"] for p in parts],
                "flags": sorted({f for p in parts for f in p["flags"]}),
            }
        return {
            "functional": self.functional,
            "metric": self.metric,
            "params": self.params,
            "samples": body["samples"],
            "limit": body["limit"],
            "error": body["error"],
            "rate": body["rate"],
            "conventions": conventions_payload(),
            "seed": self.seed,
            "version": version_string(),
            "provenance": {**self.provenance, "flags": body["flags"],
                           "components": self.component_labels},
        }


def curve_report(functional: str, entry: CatalogEntry, estimates,
                 component_labels=None, rule: QuadratureRule | None = None,
                 radii_spec=None, form: str | None = None,
                 seed: int | None = None) -> CurveReport:
    """Assemble a CurveReport with full provenance for a catalog entry."""
    estimates = list(estimates)
    labels = list(component_labels) if component_labels else [""]
    rule = rule or QuadratureRule.default_for(entry.dim)
    prov = {
        "dim": entry.dim,
        "model": entry.model,
        "backend": entry.metric.backend,
        "quadrature": {"polar": rule.polar, "azimuth": rule.azimuth,
                       "radial": rule.radial},
        "radii": [_float(r) for r in estimates[0].radii],
        "ladder": estimates[0].ladder,
    }
    if radii_spec is not None:
        prov["radii_spec"] = list(radii_spec)
    if form is not None:
        prov["form"] = form
    return CurveReport(functional=functional, metric=entry.name,
                       params=dict(entry.params), estimates=estimates,
                       component_labels=labels, provenance=prov, seed=seed)


# ---- json -------------------------------------------------------------------


def dumps(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def write_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(payload))


def loads(text: str) -> dict:
    return json.loads(text)


# ---- csv --------------------------------------------------------------------


def curve_csv_text(est: LimitEstimate) -> str:
    """Four-column convergence table: r, value, running extrapolant, delta."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["r", "value", "running_extrapolant", "abs_delta"])
    prev = None
    for i, (r, v) in enumerate(zip(est.radii, est.samples)):
        delta = "" if prev is None else repr(float(abs(v - prev)))
        writer.writerow([repr(float(r)), repr(float(v)),
                         repr(float(est.extrapolants[i])), delta])
        prev = v
    return buf.getvalue()


def write_curve_csv(path: str, est: LimitEstimate) -> None:
    with open(path, "w") as fh:
        fh.write(curve_csv_text(est))


def decay_csv_text(report: identities.DecayReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    names = list(report.fits)
    writer.writerow(["r"] + names)
    for i, r in enumerate(report.radii):
        writer.writerow([repr(float(r))]
                        + [repr(float(report.fits[n].magnitudes[i]))
                           for n in names])
    return buf.getvalue()


def identities_csv_text(reports: list[identities.ResidualReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["identity", "max_residual", "rms_residual", "scale",
                     "tolerance", "passed"])
    for rep in reports:
        writer.writerow([rep.identity, repr(float(rep.max_residual)),
                         repr(float(rep.rms_residual)), repr(float(rep.scale)),
                         repr(float(rep.tolerance)), rep.passed])
    return buf.getvalue()


# ---- non-curve payloads -----------------------------------------------------


def identities_payload(entry: CatalogEntry,
                       reports: list[identities.ResidualReport],
                       seed: int | None) -> dict:
    return {
        "functional": "identities",
        "metric": entry.name,
        "params": dict(entry.params),
        "checks": [{
            "identity": rep.identity,
            "max_residual": rep.max_residual,
            "rms_residual": rep.rms_residual,
            "scale": rep.scale,
            "tolerance": rep.tolerance,
            "passed": rep.passed,
            "notes": rep.notes,
        } for rep in reports],
        "passed": all(rep.passed for rep in reports),
        "conventions": conventions_payload(),
        "seed": seed,
        "version": version_string(),
        "provenance": {"dim": entry.dim, "model": entry.model,
                       "backend": entry.metric.backend},
    }


def _fit_payload(fit: identities.QuantityFit) -> dict:
    rate = fit.fitted_rate
    return {
        "magnitudes": [_float(v) for v in fit.magnitudes],
        "slope": None if fit.slope is None else _float(fit.slope),
        "fitted_rate": "inf" if rate == float("inf") else _float(rate),
        "admissible": fit.admissible,
    }


def decay_payload(entry: CatalogEntry, report: identities.DecayReport) -> dict:
    return {
        "functional": "decay",
        "metric": entry.name,
        "params": dict(entry.params),
        "model": report.model,
        "radii": [_float(r) for r in report.radii],
        "threshold": _float(report.threshold),
        "fits": {name: _fit_payload(fit) for name, fit in report.fits.items()},
        "odd_fits": {name: _fit_payload(fit)
                     for name, fit in report.odd_fits.items()},
        "admitted": report.admitted,
        "notes": list(report.notes),
        "conventions": conventions_payload(),
        "seed": report.seed,
        "version": version_string(),
        "provenance": {"dim": entry.dim, "model": entry.model,
                       "backend": entry.metric.backend, "rays": report.rays},
    }


# ---- figures ----------------------------------------------------------------

_PNG_METADATA = {"Software": None, "Creation Time": None}


def render_curve_figure(path: str, report: CurveReport) -> None:
    """Convergence plot: samples per radius with the extrapolated limit."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for est, label in zip(report.estimates, report.component_labels):
        line, = ax.plot(est.radii, est.samples, marker="o",
                        label=label or "samples")
        ax.axhline(est.limit, color=line.get_color(), linestyle="--",
                   linewidth=0.9)
    if report.estimates[0].ladder == "geometric":
        ax.set_xscale("log")
    ax.set_xlabel("radius")
    ax.set_ylabel("value")
    ax.set_title(f"{report.functional} on {report.metric}")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=110, metadata=_PNG_METADATA)
    plt.close(fig)


def render_decay_figure(path: str, report: identities.DecayReport) -> None:
    """Log-magnitude decay plot for every fitted quantity."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    floor = 1e-140
    for name, fit in report.fits.items():
        mags = np.asarray(fit.magnitudes)
        if np.all(mags <= floor):
            continue
        ax.plot(report.radii, np.maximum(mags, floor), marker="o", label=name)
    ax.set_yscale("log")
    if report.model == "flat":
        ax.set_xscale("log")
    ax.set_xlabel("radius" if report.model == "flat" else "reference distance")
    ax.set_ylabel("frame magnitude")
    ax.set_title(f"decay on {report.model} model, threshold {report.threshold}")
    if ax.get_legend_handles_labels()[0]:
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=110, metadata=_PNG_METADATA)
    plt.close(fig)
