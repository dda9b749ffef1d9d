import os
import sys

import pytest

# Ensure repo root on sys.path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from core.catalog import (
    FlatMetric,
    catalog_entry,
    catalog_names,
    catalog_system,
    cauchy_riemann,
    conformal_killing_flat,
    conformal_n2,
    killing_cc_dims,
    killing_flat,
    macaulay_plane,
)
from core.errors import JetKitError
from core.system import prolonged_dimension, symbol_dimension


@pytest.mark.parametrize("n, expected", [(2, 3), (3, 6), (4, 10)])
def test_killing_solution_dims(n, expected):
    S = killing_flat(FlatMetric.euclidean(n))
    assert S.rank == n * (n + 1) // 2
    assert prolonged_dimension(S, 1) == expected


def test_minkowski_killing_matches_euclidean_counts():
    S = killing_flat(FlatMetric.minkowski(4))
    assert S.rank == 10
    assert prolonged_dimension(S, 1) == 10


@pytest.mark.parametrize("n, expected", [(3, 10), (4, 15), (5, 21)])
def test_conformal_prolonged_dims(n, expected):
    S = conformal_killing_flat(FlatMetric.euclidean(n))
    assert S.rank == n * (n + 1) // 2 - 1
    assert prolonged_dimension(S, 2) == expected
    assert symbol_dimension(S, 3) == 0


def test_conformal_needs_three_variables():
    with pytest.raises(ValueError):
        conformal_killing_flat(FlatMetric.euclidean(2))


def test_conformal_n2_counts():
    S = conformal_n2()
    assert S.rank == 14
    assert S.solution_dim == 6


def test_cauchy_riemann_is_infinite_type():
    S = cauchy_riemann()
    assert all(symbol_dimension(S, level) == 2 for level in range(1, 5))


def test_macaulay_plane_dims():
    S = macaulay_plane()
    assert S.solution_dim == 4
    assert prolonged_dimension(S, 1) == 4


@pytest.mark.parametrize("n, expected", [(3, (6, 3)), (4, (20, 20)), (5, (50, 75))])
def test_killing_cc_dims(n, expected):
    assert killing_cc_dims(n) == expected


def test_flat_metric_rejects_bad_signature():
    with pytest.raises(ValueError):
        FlatMetric((1, 2))
    with pytest.raises(ValueError):
        FlatMetric(())


def test_catalog_lookup():
    assert "macaulay" in catalog_names()
    assert catalog_system("macaulay4").order == 4
    assert catalog_entry("killing3").unknown_prefix == "xi"


def test_catalog_unknown_name():
    with pytest.raises(JetKitError) as exc_info:
        catalog_system("nope")
    assert exc_info.value.code == "unknown_system"


@pytest.mark.parametrize("name", catalog_names())
def test_every_entry_builds(name):
    S = catalog_system(name)
    assert S.rank > 0
