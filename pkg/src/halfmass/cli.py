"""Command-line entry points.

Subcommands: mass, center, hypmass, identities, decay, catalog list.
A run is configured by a single JSON document (--config) plus flags; flags
take precedence over config fields, and unknown config keys are rejected.

Exit codes: 0 success, 1 numerical non-convergence or failed checks (the
flagged report is still written), 2 configuration or admission error.

With --out the JSON report is always written; --format csv|both adds the
convergence table and renders a figure next to it.  Without --out the JSON
report goes to stdout.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import identities, invariants, reporting
from .catalog import FAMILIES, CatalogEntry, build
from .errors import (
    AdmissionError,
    ConfigError,
    DegenerateMassError,
    DomainError,
    EvaluationError,
    SingularMetricError,
)
from .quadrature import QuadratureRule, radius_ladder

_CONFIG_KEYS = {"metric", "n", "params", "radii", "quad", "backend", "out",
                "format", "seed", "form", "index"}
_IDENTITY_SEED = 4242
_DECAY_SEED = 7771


# ---- option plumbing --------------------------------------------------------


def _parse_param(text: str):
    if "=" not in text:
        raise ConfigError(f"bad --param {text!r}; expected KEY=VAL")
    key, raw = text.split("=", 1)
    try:
        value = int(raw)
    except ValueError:
        try:
            value = float(raw)
        except ValueError:
            value = raw
    return key.strip(), value


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return doc


def _merged_options(args) -> dict:
    cfg = _load_config(args.config) if args.config else {}

    def pick(flag, key, default=None):
        return flag if flag is not None else cfg.get(key, default)

    params = dict(cfg.get("params", {}))
    for item in args.param:
        key, value = _parse_param(item)
        params[key] = value

    return {
        "metric": pick(args.metric, "metric"),
        "n": int(pick(args.n, "n", 3)),
        "params": params,
        "radii": pick(args.radii, "radii"),
        "quad": pick(args.quad, "quad"),
        "backend": pick(args.backend, "backend", "analytic"),
        "out": pick(args.out, "out"),
        "format": pick(args.format, "format", "json"),
        "seed": pick(args.seed, "seed"),
        "form": pick(getattr(args, "form", None), "form"),
        "index": pick(getattr(args, "index", None), "index"),
    }


def _parse_ladder(spec):
    """START,FACTOR,COUNT (flag string or config list) to a geometric ladder."""
    if spec is None:
        return None, None
    parts = spec.split(",") if isinstance(spec, str) else list(spec)
    if len(parts) != 3:
        raise ConfigError("radii expects START,FACTOR,COUNT")
    try:
        start, factor, count = float(parts[0]), float(parts[1]), int(parts[2])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad radii spec {spec!r}") from exc
    if start <= 0 or factor <= 1 or count < 2:
        raise ConfigError("radii needs START > 0, FACTOR > 1, COUNT >= 2")
    return radius_ladder(start, factor, count), (start, factor, count)


def _parse_quad(spec):
    if spec is None:
        return None
    parts = spec.split(",") if isinstance(spec, str) else list(spec)
    if len(parts) != 3:
        raise ConfigError("quad expects POLAR,AZIMUTH,RADIAL")
    try:
        polar, azimuth, radial = (int(p) for p in parts)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad quad spec {spec!r}") from exc
    if min(polar, azimuth, radial) < 2:
        raise ConfigError("quadrature orders must be at least 2")
    return QuadratureRule(polar=polar, azimuth=azimuth, radial=radial)


def _resolve_entry(opts) -> CatalogEntry:
    if not opts["metric"]:
        raise ConfigError("missing --metric (or a 'metric' config field)")
    seed = opts["seed"]
    return build(opts["metric"], n=opts["n"], params=opts["params"] or None,
                 seed=None if seed is None else int(seed),
                 backend=opts["backend"])


def _require_model(entry: CatalogEntry, model: str, command: str) -> None:
    if entry.model != model:
        hint = "hypmass" if entry.model == "hyperbolic" else "mass or center"
        raise ConfigError(
            f"{command} expects a {model}-model metric; {entry.name} is "
            f"{entry.model}-model (use {hint})")


def _out_base(path: str) -> str:
    root, ext = os.path.splitext(path)
    return root if ext.lower() in (".json", ".csv", ".png") else path


def _emit_payload(payload: dict, opts, csv_writer=None, figure=None) -> None:
    out = opts["out"]
    fmt = opts["format"]
    if fmt not in ("json", "csv", "both"):
        raise ConfigError(f"unknown format {fmt!r}")
    if out is None:
        if fmt in ("csv", "both"):
            raise ConfigError("--format csv requires --out")
        sys.stdout.write(reporting.dumps(payload))
        return
    base = _out_base(out)
    reporting.write_json(base + ".json", payload)
    if fmt in ("csv", "both"):
        if csv_writer is not None:
            csv_writer(base)
        if figure is not None:
            figure(base + ".png")


# ---- subcommands ------------------------------------------------------------


def _run_mass(args) -> int:
    opts = _merged_options(args)
    form = opts["form"] or "charge"
    if form not in ("charge", "geometric", "bulk"):
        raise ConfigError(f"unknown mass form {form!r}")
    entry = _resolve_entry(opts)
    _require_model(entry, "flat", "mass")
    rule = _parse_quad(opts["quad"])
    radii, radii_spec = _parse_ladder(opts["radii"])
    if form == "charge":
        est = invariants.mass_adm(entry, radii, rule)
        functional = "mass_adm"
    elif form == "geometric":
        if radii is None:
            radii = invariants.default_radii(entry, "geometric")
        est = invariants.mass_geometric(entry, radii, rule)
        functional = "mass_geometric"
    else:
        est = invariants.mass_bulk(entry, radii, rule)
        functional = "mass_bulk"
    report = reporting.curve_report(functional, entry, [est], rule=rule,
                                    radii_spec=radii_spec, form=form,
                                    seed=opts["seed"])
    _emit_payload(report.payload(), opts,
                  csv_writer=lambda base: reporting.write_curve_csv(
                      base + ".csv", est),
                  figure=lambda path: reporting.render_curve_figure(path, report))
    return 1 if report.flagged else 0


def _run_center(args) -> int:
    opts = _merged_options(args)
    form = opts["form"] or "charge"
    if form not in ("charge", "geometric"):
        raise ConfigError(f"unknown center form {form!r}")
    entry = _resolve_entry(opts)
    _require_model(entry, "flat", "center")
    rule = _parse_quad(opts["quad"])
    radii, radii_spec = _parse_ladder(opts["radii"])
    if form == "charge":
        result = invariants.center_adm(entry, radii, rule)
        functional = "center_adm"
    else:
        if radii is None:
            radii = invariants.default_radii(entry, "geometric")
        result = invariants.center_geometric(entry, radii, rule)
        functional = "center_geometric"
    labels = [f"a{alpha}" for alpha in range(1, entry.dim)]
    report = reporting.curve_report(functional, entry, result.components,
                                    component_labels=labels, rule=rule,
                                    radii_spec=radii_spec, form=form,
                                    seed=opts["seed"])
    report.provenance["mass_limit"] = float(result.mass.limit)
    report.provenance["mass_flags"] = list(result.mass.flags)

    def write_csvs(base):
        for est, label in zip(result.components, labels):
            reporting.write_curve_csv(f"{base}_{label}.csv", est)

    _emit_payload(report.payload(), opts, csv_writer=write_csvs,
                  figure=lambda path: reporting.render_curve_figure(path, report))
    return 1 if (report.flagged or result.mass.flags) else 0


def _run_hypmass(args) -> int:
    opts = _merged_options(args)
    form = opts["form"] or "charge"
    if form not in ("charge", "geometric"):
        raise ConfigError(f"unknown hypmass form {form!r}")
    entry = _resolve_entry(opts)
    _require_model(entry, "hyperbolic", "hypmass")
    index = 0 if opts["index"] is None else int(opts["index"])
    if not 0 <= index < entry.dim:
        raise ConfigError(f"index must be in [0, {entry.dim - 1}]")
    rule = _parse_quad(opts["quad"])
    radii, radii_spec = _parse_ladder(opts["radii"])
    if form == "charge":
        est = invariants.charge_functional(entry, radii, rule, index=index)
        functional = "hyp_mass_charge"
    else:
        if radii is None:
            radii = invariants.default_radii(entry, "geometric")
        est = invariants.geometric_functional(entry, radii, rule, index=index)
        functional = "hyp_mass_geometric"
    report = reporting.curve_report(functional, entry, [est], rule=rule,
                                    radii_spec=radii_spec, form=form,
                                    seed=opts["seed"])
    report.provenance["index"] = index
    _emit_payload(report.payload(), opts,
                  csv_writer=lambda base: reporting.write_curve_csv(
                      base + ".csv", est),
                  figure=lambda path: reporting.render_curve_figure(path, report))
    return 1 if report.flagged else 0


def _run_identities(args) -> int:
    opts = _merged_options(args)
    entry = _resolve_entry(opts)
    seed = _IDENTITY_SEED if opts["seed"] is None else int(opts["seed"])
    reports = identities.identity_suite(entry, seed=seed)
    payload = reporting.identities_payload(entry, reports, seed)
    _emit_payload(payload, opts,
                  csv_writer=lambda base: _write_text(
                      base + ".csv", reporting.identities_csv_text(reports)))
    return 0 if payload["passed"] else 1


def _run_decay(args) -> int:
    opts = _merged_options(args)
    entry = _resolve_entry(opts)
    seed = _DECAY_SEED if opts["seed"] is None else int(opts["seed"])
    radii, _ = _parse_ladder(opts["radii"])
    report = identities.decay_report(entry, radii=radii, seed=seed)
    payload = reporting.decay_payload(entry, report)
    _emit_payload(payload, opts,
                  csv_writer=lambda base: _write_text(
                      base + ".csv", reporting.decay_csv_text(report)),
                  figure=lambda path: reporting.render_decay_figure(path, report))
    return 0 if report.admitted else 1


def _write_text(path: str, text: str) -> None:
    with open(path, "w") as fh:
        fh.write(text)


def _run_catalog(args) -> int:
    if args.action != "list":
        raise ConfigError(f"unknown catalog action {args.action!r}")
    for info in FAMILIES.values():
        defaults = json.dumps(info.defaults)
        sys.stdout.write(
            f"{info.name:24s} {info.model:11s} defaults={defaults}\n"
            f"{'':24s} {'':11s} {info.doc}\n")
    return 0


# ---- parser -----------------------------------------------------------------


def _add_common(sp) -> None:
    sp.add_argument("--metric", default=None, help="catalog family name")
    sp.add_argument("--param", action="append", default=[], metavar="KEY=VAL",
                    help="metric parameter, repeatable")
    sp.add_argument("--n", type=int, default=None, help="chart dimension")
    sp.add_argument("--radii", default=None, metavar="START,FACTOR,COUNT",
                    help="geometric radius ladder")
    sp.add_argument("--quad", default=None, metavar="POLAR,AZIMUTH,RADIAL",
                    help="quadrature orders")
    sp.add_argument("--backend", choices=["analytic", "fd2", "fd4"],
                    default=None, help="metric derivative backend")
    sp.add_argument("--config", default=None, help="JSON run configuration")
    sp.add_argument("--out", default=None, help="output path base")
    sp.add_argument("--format", choices=["json", "csv", "both"], default=None)
    sp.add_argument("--seed", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="halfmass",
        description="Mass and center functionals for asymptotically flat or "
                    "hyperbolic metrics on the half-space")
    sub = parser.add_subparsers(dest="command", required=True)

    mass = sub.add_parser("mass", help="flat-model mass functional")
    _add_common(mass)
    mass.add_argument("--form", choices=["charge", "geometric", "bulk"],
                      default=None)
    mass.set_defaults(run=_run_mass)

    center = sub.add_parser("center", help="flat-model center of mass")
    _add_common(center)
    center.add_argument("--form", choices=["charge", "geometric"], default=None)
    center.set_defaults(run=_run_center)

    hypmass = sub.add_parser("hypmass", help="hyperbolic-model mass components")
    _add_common(hypmass)
    hypmass.add_argument("--form", choices=["charge", "geometric"], default=None)
    hypmass.add_argument("--index", type=int, default=None,
                         help="static-potential index, 0 is the mass")
    hypmass.set_defaults(run=_run_hypmass)

    idents = sub.add_parser("identities", help="pointwise identity checks")
    _add_common(idents)
    idents.set_defaults(run=_run_identities)

    decay = sub.add_parser("decay", help="decay-rate fits and admission")
    _add_common(decay)
    decay.set_defaults(run=_run_decay)

    cat = sub.add_parser("catalog", help="catalog inspection")
    cat.add_argument("action", choices=["list"])
    cat.set_defaults(run=_run_catalog)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except (ConfigError, AdmissionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DegenerateMassError, SingularMetricError, DomainError,
            EvaluationError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
