import os
import sys
from math import comb

import pytest

# Ensure repo root on sys.path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from core.jetspace import (
    JetCoordinate,
    JetFrame,
    MultiIndex,
    SymbolFrame,
    class_count,
    class_of,
    dim_jet,
    dim_symbol,
    exterior_basis,
    jet_label,
    multi_indices,
)


@pytest.mark.parametrize(
    "n, m, q, expected",
    [
        (3, 1, 2, 10),
        (3, 1, 4, 35),
        (2, 2, 3, 20),
        (3, 3, 3, 60),
        (1, 1, 3, 4),
        (4, 4, 1, 20),
    ],
)
def test_dim_jet(n, m, q, expected):
    assert dim_jet(n, m, q) == expected
    assert JetFrame(n, m, q).dim == expected == len(JetFrame(n, m, q).coordinates)


@pytest.mark.parametrize("n, m, q", [(3, 1, 2), (2, 2, 4), (4, 1, 3), (1, 3, 5)])
def test_symbol_dims_sum_to_jet_dim(n, m, q):
    assert sum(dim_symbol(n, m, d) for d in range(q + 1)) == dim_jet(n, m, q)


def test_invalid_frame_rejected():
    with pytest.raises(ValueError):
        JetFrame(0, 1, 1)
    with pytest.raises(ValueError):
        dim_jet(2, 1, -1)


def test_class_of():
    assert class_of((0, 0, 2)) == 3
    assert class_of((1, 0, 2)) == 1
    assert class_of((0, 0, 0)) == 0


@pytest.mark.parametrize("n, q", [(3, 2), (4, 3), (2, 5)])
def test_class_counts_cover_degree(n, q):
    counts = [class_count(n, q, i) for i in range(1, n + 1)]
    assert sum(counts) == comb(n + q - 1, q)
    for i, count in enumerate(counts, start=1):
        assert count == sum(1 for mu in multi_indices(n, q) if mu.cls == i)


def test_frame_order_within_degree():
    # n=2, degree 2: y22, y12, y11
    assert [tuple(mu) for mu in multi_indices(2, 2)] == [(0, 2), (1, 1), (2, 0)]
    # n=3, degree 2: class 3 first, then class 2, then class 1
    assert [mu.cls for mu in multi_indices(3, 2)] == [3, 2, 2, 1, 1, 1]


def test_frame_blocks_are_degree_descending():
    frame = JetFrame(2, 1, 2)
    degrees = [c.index.degree for c in frame.coordinates]
    assert degrees == sorted(degrees, reverse=True)
    assert frame.degree_block(2) == range(0, 3)
    assert frame.degree_block(0) == range(5, 6)
    assert frame.degree_of_column(4) == 1


def test_frame_index_round_trip():
    frame = JetFrame(3, 2, 2)
    for i, coord in enumerate(frame.coordinates):
        assert frame.index(coord) == i
    with pytest.raises(KeyError):
        frame.index(JetCoordinate(0, MultiIndex((3, 0, 0))))


def test_lower_frame_is_suffix():
    small, big = JetFrame(2, 2, 1), JetFrame(2, 2, 3)
    offset = small.offset_into(big)
    assert offset == big.dim - small.dim
    for i, coord in enumerate(small.coordinates):
        assert big.coordinates[offset + i] == coord


def test_offset_into_lower_frame_rejected():
    with pytest.raises(ValueError):
        JetFrame(2, 1, 3).offset_into(JetFrame(2, 1, 2))


def test_symbol_frame_is_top_block():
    sym = SymbolFrame(3, 1, 2)
    assert sym.dim == 6
    assert sym.coordinates == JetFrame(3, 1, 2).coordinates[:6]


def test_multi_index_helpers():
    mu = MultiIndex.from_variables(3, [2, 3, 3])
    assert tuple(mu) == (0, 1, 2)
    assert mu.degree == 3
    assert mu.variables() == [2, 3, 3]
    assert tuple(mu.add(1)) == (1, 1, 2)
    assert tuple(mu.shift((1, 0, 1))) == (1, 1, 3)
    with pytest.raises(IndexError):
        MultiIndex.from_variables(2, [3])
    with pytest.raises(ValueError):
        MultiIndex((1, -1))


def test_exterior_basis():
    assert exterior_basis(3, 2) == [(0, 1), (0, 2), (1, 2)]
    assert exterior_basis(3, 0) == [()]
    assert exterior_basis(3, 4) == []


def test_jet_label():
    assert jet_label(JetCoordinate(0, MultiIndex((1, 0, 2))), ["y"]) == "y(1,3,3)"
    assert jet_label(JetCoordinate(1, MultiIndex((0, 0))), ["u", "v"]) == "v"
