"""Shared fixtures: cached catalog entries and a coarse quadrature rule.

Catalog builds are pure functions of (name, n, params, seed), so entries are
cached per session to keep the unit-test modules fast.
"""

import json

import pytest

from halfmass import catalog, jets
from halfmass.charges import flat_reference, hyperbolic_reference
from halfmass.geometry import MetricField
from halfmass.quadrature import QuadratureRule
from halfmass.separable import SeparableField, identity_terms, outer_radial_terms

_ENTRY_CACHE: dict = {}


def cached_entry(name: str, n: int = 3, seed=None, **params):
    key = (name, n, seed, tuple(sorted(params.items())))
    if key not in _ENTRY_CACHE:
        _ENTRY_CACHE[key] = catalog.build(name, n=n, params=params or None,
                                          seed=seed)
    return _ENTRY_CACHE[key]


@pytest.fixture
def get_entry():
    return cached_entry


@pytest.fixture
def coarse_rule():
    # enough nodes for ~1e-7 surface quadrature on the catalog integrands
    return QuadratureRule(polar=20, azimuth=40, radial=12)


@pytest.fixture
def tiny_rule():
    return QuadratureRule(polar=8, azimuth=16, radial=6)


def load_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def synthetic_power_entry(n: int = 3, rate: float = 1.3,
                          amp: float = 1e-3) -> catalog.CatalogEntry:
    """Flat-model entry with a pure-trace tail of exactly known power rate."""
    def prof(r):
        return amp * jets.seed(r) ** (-rate)

    esep = SeparableField(n, 2, identity_terms(n, prof))
    ref = flat_reference(n)
    met = MetricField(dim=n, func=lambda p: ref.metric(p) + esep.value(p),
                      d1func=esep.d1, d2func=esep.d2)
    return catalog.CatalogEntry(
        name="synthetic_power", dim=n, model="flat", params={"rate": rate},
        metric=met, efield=esep, reference=ref, decay_rate=rate, rmin=0.5,
        default_ladder=catalog.FLAT_LADDER)


def synthetic_exponential_entry(n: int = 3, rate: float = 2.2,
                                amp: float = 1e-3) -> catalog.CatalogEntry:
    """Hyperbolic-model entry whose frame magnitudes decay like exp(-rate r)."""
    def prof_f(r):
        rj = jets.seed(r)
        return amp * jets.exp(-rate * rj) * (jets.sinh(rj) / rj) ** 2

    def prof_q(r):
        rj = jets.seed(r)
        f = (jets.sinh(rj) / rj) ** 2
        return amp * jets.exp(-rate * rj) * (1.0 - f) / rj ** 2

    esep = SeparableField(n, 2, identity_terms(n, prof_f)
                          + outer_radial_terms(n, prof_q))
    ref = hyperbolic_reference(n)
    met = MetricField(dim=n, func=lambda p: ref.metric(p) + esep.value(p),
                      d1func=lambda p: ref.d1func(p) + esep.d1(p),
                      d2func=lambda p: ref.d2func(p) + esep.d2(p))
    return catalog.CatalogEntry(
        name="synthetic_exp", dim=n, model="hyperbolic",
        params={"rate": rate}, metric=met, efield=esep, reference=ref,
        decay_rate=rate, rmin=0.5, default_ladder=catalog.HYP_LADDER)
