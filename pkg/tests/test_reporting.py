"""Report payloads, CSV tables, and figure rendering."""

import json

import numpy as np
import pytest

from halfmass import identities, reporting
from halfmass.quadrature import LimitEstimate

from conftest import cached_entry

EXPECTED_KEYS = {"conventions", "error", "functional", "limit", "metric",
                 "params", "provenance", "rate", "samples", "seed", "version"}


def _estimate(values, radii=None, rate=1.0, flags=()):
    radii = radii if radii is not None else [2.0 ** k for k in range(len(values))]
    return LimitEstimate(radii=list(radii), samples=list(values),
                         limit=float(values[-1]), error=1e-6, rate=rate,
                         ladder="geometric", flags=list(flags),
                         extrapolants=list(values))


@pytest.fixture(scope="module")
def scalar_report():
    entry = cached_entry("euclidean_half", n=3)
    est = _estimate([0.51234567890123, 0.5012, 0.50003])
    return reporting.curve_report("mass", entry, [est], rule=None,
                                  radii_spec=["4", "x8"], form="charge")


def test_payload_has_exactly_the_contract_keys(scalar_report):
    payload = scalar_report.payload()
    assert set(payload) == EXPECTED_KEYS
    assert payload["functional"] == "mass"
    assert payload["metric"] == "euclidean_half"
    assert payload["version"] == reporting.version_string()
    assert payload["seed"] is None


def test_payload_provenance_and_conventions(scalar_report):
    payload = scalar_report.payload()
    prov = payload["provenance"]
    assert prov["dim"] == 3 and prov["model"] == "flat"
    assert prov["backend"] == "analytic"
    assert set(prov["quadrature"]) == {"polar", "azimuth", "radial"}
    assert prov["radii_spec"] == ["4", "x8"]
    assert prov["form"] == "charge"
    assert prov["ladder"] == "geometric"
    assert prov["components"] == [""]
    conv = payload["conventions"]
    assert "codazzi" in conv and "static_operator" in conv
    assert conv["codazzi"] == identities.CODAZZI_CONVENTION


def test_json_round_trip_preserves_floats(scalar_report):
    payload = scalar_report.payload()
    text = reporting.dumps(payload)
    back = reporting.loads(text)
    assert back["limit"] == payload["limit"]
    assert back["samples"][0]["value"] == 0.51234567890123
    assert text.endswith("\n")
    assert reporting.dumps(back) == text


def test_component_valued_payload_stacks_values():
    entry = cached_entry("euclidean_half", n=3)
    e1 = _estimate([0.1, 0.2], radii=[4.0, 8.0])
    e2 = _estimate([0.3, 0.4], radii=[4.0, 8.0], flags=["rate mismatch"])
    rep = reporting.curve_report("center", entry, [e1, e2],
                                 component_labels=["a1", "a2"])
    payload = rep.payload()
    assert payload["limit"] == [0.2, 0.4]
    assert payload["samples"][0] == {"r": 4.0, "value": [0.1, 0.3]}
    assert payload["provenance"]["components"] == ["a1", "a2"]
    assert payload["provenance"]["flags"] == ["rate mismatch"]
    assert rep.flagged


def test_flagged_property_reflects_estimate_flags():
    entry = cached_entry("euclidean_half", n=3)
    clean = reporting.curve_report("mass", entry, [_estimate([0.5, 0.5])])
    assert not clean.flagged
    bad = reporting.curve_report(
        "mass", entry, [_estimate([0.5, 0.6], flags=["non-contracting tail"])])
    assert bad.flagged


def test_curve_csv_layout_and_round_trip():
    est = _estimate([1.0 / 3.0, 0.25, 0.2500001], radii=[4.0, 8.0, 16.0])
    text = reporting.curve_csv_text(est)
    lines = text.strip().split("\n")
    assert lines[0] == "r,value,running_extrapolant,abs_delta"
    assert len(lines) == 4
    first = lines[1].split(",")
    assert first[3] == ""  # no delta before the second sample
    assert float(first[1]) == 1.0 / 3.0
    second = lines[2].split(",")
    assert float(second[3]) == abs(0.25 - 1.0 / 3.0)
    assert "np.float" not in text  # bare reprs only


def test_identities_csv_layout():
    entry = cached_entry("euclidean_half", n=3)
    reports = identities.identity_suite(entry, npoints=10)
    text = reporting.identities_csv_text(reports)
    lines = text.strip().split("\n")
    assert lines[0] == "identity,max_residual,rms_residual,scale,tolerance,passed"
    assert len(lines) == 1 + len(reports)
    assert lines[1].startswith("pohozaev,")
    assert lines[1].endswith(",True")
    assert "np.float" not in text


def test_identities_payload_aggregates_pass_flag():
    entry = cached_entry("euclidean_half", n=3)
    reports = identities.identity_suite(entry, npoints=10)
    payload = reporting.identities_payload(entry, reports, seed=4242)
    assert payload["functional"] == "identities"
    assert payload["passed"] is True
    assert len(payload["checks"]) == len(reports)
    assert payload["checks"][0]["identity"] == "pohozaev"
    assert {"conventions", "version", "provenance"} <= set(payload)
    json.loads(reporting.dumps(payload))  # serializable as-is


def test_decay_payload_serializes_infinite_rates_as_strings():
    entry = cached_entry("schwarzschild_half", n=3)
    rep = identities.decay_report(entry)
    payload = reporting.decay_payload(entry, rep)
    assert payload["admitted"] is True
    assert payload["fits"]["scalar_curvature"]["fitted_rate"] == "inf"
    assert isinstance(payload["fits"]["metric"]["fitted_rate"], float)
    assert payload["odd_fits"]  # flat model carries parity diagnostics
    text = reporting.dumps(payload)
    assert json.loads(text)["threshold"] == 0.5


def test_decay_csv_has_one_column_per_quantity():
    entry = cached_entry("schwarzschild_half", n=3)
    rep = identities.decay_report(entry)
    text = reporting.decay_csv_text(rep)
    lines = text.strip().split("\n")
    header = lines[0].split(",")
    assert header[0] == "r"
    assert set(header[1:]) == set(rep.fits)
    assert len(lines) == 1 + len(rep.radii)


def test_curve_figure_renders_deterministic_png(tmp_path, scalar_report):
    p1, p2 = tmp_path / "a.png", tmp_path / "b.png"
    reporting.render_curve_figure(str(p1), scalar_report)
    reporting.render_curve_figure(str(p2), scalar_report)
    data = p1.read_bytes()
    assert data[:8] == b"\x89PNG\r\n\x1a\n"
    assert data == p2.read_bytes()


def test_decay_figure_renders_png(tmp_path):
    entry = cached_entry("schwarzschild_half", n=3)
    rep = identities.decay_report(entry)
    path = tmp_path / "decay.png"
    reporting.render_decay_figure(str(path), rep)
    assert path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
