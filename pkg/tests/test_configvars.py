import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvm2d.analytic import equilibrium
from cvm2d.configvars import (
    ConfigCounts, ConfigFractions, EQUIVALENCE_NAMES, check_counts, count,
    count_array, equivalence_residuals, fractions, grid_fractions,
    normalization_sums, summarize_topography,
)
from cvm2d.errors import ConsistencyError
from cvm2d.lattice import A, from_text, new_random, new_uniform
from cvm2d.patterns import load_fixture
from cvm2d.thermo import random_fractions

from .conftest import brute_counts


@st.composite
def grids(draw, max_rows=16, max_cols=16):
    rows = 2 * draw(st.integers(1, max_rows // 2))
    cols = draw(st.integers(2, max_cols))
    bits = draw(st.lists(st.integers(0, 1), min_size=rows * cols, max_size=rows * cols))
    return np.array(bits, dtype=np.uint8).reshape(rows, cols)


def test_all_a_counts():
    c = count(new_uniform(4, 4, A))
    assert c.x == (16, 0) and c.y == (32, 0, 0) and c.w == (16, 0, 0)
    assert c.z == (32, 0, 0, 0, 0, 0)
    fr = fractions(c)
    assert (fr.x1, fr.y1, fr.w1, fr.z1) == (1, 1, 1, 1)
    assert sum(fr.as_tuple()) == 4


def test_two_by_two_rows():
    c = count(from_text("AA\nBB\n"))
    assert c.y == (0, 8, 0)
    assert c.z == (0, 0, 4, 4, 0, 0)


def test_row_stripes():
    fr = grid_fractions(load_fixture("row_stripes_4x4"))
    assert fr.y2 == 0.5 and fr.y1 == 0 and fr.y3 == 0
    # each orientation of every triplet is ABA or BAB
    assert fr.z3 == 0.5 and fr.z4 == 0.5
    assert normalization_sums(fr) == (1, 1, 1, 1)
    topo = summarize_topography(fr)
    assert (topo.y2, topo.z1) == (0.5, 0.0) and topo.z3 == 0.5
    assert "dispersed" in topo.tags and "clustered" not in topo.tags


def test_exhaustive_2x4_against_brute_force():
    for bits in itertools.product((0, 1), repeat=8):
        cells = np.array(bits, dtype=np.uint8).reshape(2, 4)
        c = count_array(cells)
        assert (c.x, c.y, c.w, c.z) == brute_counts(cells)
        h = count_array(cells, horizontal_only=True)
        assert h.z == brute_counts(cells, horizontal_only=True)[3]


@settings(max_examples=200, deadline=None)
@given(grids())
def test_identities_hold_on_random_grids(cells):
    c = count_array(cells)
    fr = fractions(c)
    for v in normalization_sums(fr):
        assert v == pytest.approx(1.0, abs=1e-12)
    for name, r in zip(EQUIVALENCE_NAMES, equivalence_residuals(fr)):
        assert abs(r) <= 1e-12, name


@settings(max_examples=40, deadline=None)
@given(grids(max_rows=6, max_cols=6))
def test_matches_brute_force(cells):
    c = count_array(cells)
    assert (c.x, c.y, c.w, c.z) == brute_counts(cells)


def test_order_invariance():
    # counting a relabeled copy of the grid in shifted traversal order
    g = new_random(8, 8, 30, seed=4)
    shifted = np.roll(np.roll(g.cells, 2, axis=0), 3, axis=1)
    assert count_array(shifted) == count(g)


def test_relabel_symmetry():
    g = new_random(8, 6, 20, seed=5)
    fr = grid_fractions(g)
    flipped = grid_fractions(from_text("".join(
        "".join("B" if v else "A" for v in row) + "\n" for row in g.cells
    )))
    assert flipped == fr.relabeled()


def test_fraction_normalization():
    c = ConfigCounts((8, 8), (8, 12, 12), (4, 8, 4), (4, 6, 4, 6, 6, 6), 32)
    fr = fractions(c)
    assert fr.y2 == 12 / 64 and fr.w2 == 8 / 32 and fr.z2 == 6 / 64 and fr.z1 == 4 / 32


def test_inconsistent_counts():
    with pytest.raises(ConsistencyError):
        check_counts(ConfigCounts((8, 8), (8, 12, 11), (4, 8, 4), (4, 6, 4, 6, 6, 6), 32))
    with pytest.raises(ConsistencyError):
        check_counts(ConfigCounts((8, 8), (8, 12, 12), (4, 8, 4), (4, 6, 4, 6, 6, 5), 32))


def test_residual_of_perturbed_fractions():
    fr = grid_fractions(new_random(8, 8, 32, seed=1))
    bad = fr.replace(y1=fr.y1 + 0.01)
    assert equivalence_residuals(bad)[0] == pytest.approx(0.01, abs=1e-12)


def test_equilibrium_residuals():
    fr = equilibrium(1.2).fractions
    assert max(abs(r) for r in equivalence_residuals(fr)) < 1e-9


def test_random_expectations():
    assert random_fractions(0.5).y2 == 0.25
    assert random_fractions(0.5).z1 == random_fractions(0.5).z3 == 0.125
    assert random_fractions(0.35).y2 == pytest.approx(0.2275, abs=1e-12)


def test_topography_tags():
    t = summarize_topography(grid_fractions(new_uniform(4, 4, A)))
    assert (t.y2, t.z1, t.z3) == (0.0, 1.0, 0.0) and t.tags == ("clustered",)
    means = np.mean(
        [[getattr(grid_fractions(new_random(16, 16, 128, s)), k) for k in ("y2", "z1", "z3")]
         for s in range(20)],
        axis=0,
    )
    assert np.allclose(means, [0.25, 0.125, 0.125], atol=0.02)
    mean_fr = random_fractions(0.5).replace(y2=means[0], z1=means[1], z3=means[2])
    assert summarize_topography(mean_fr).tags == ()


def test_equiprobable_symmetric_relation():
    fr = equilibrium(1.3).fractions
    assert fr.z2 == pytest.approx(0.25 - (fr.z1 + fr.z3) / 2, abs=1e-12)
    # the stripe fixture is A/B symmetric as counted: z1 = z6, z2 = z5, z3 = z4
    s = grid_fractions(load_fixture("row_stripes_4x4"))
    assert s.z2 == pytest.approx(0.25 - (s.z1 + s.z3) / 2, abs=1e-12)


def test_horizontal_only_counts():
    g = new_random(8, 8, 32, seed=2)
    c = count(g, horizontal_only=True)
    assert c.n_triplets == 64 and sum(c.z) == 64
    fr = fractions(c)
    assert normalization_sums(fr)[3] == pytest.approx(1.0)


def test_csv_row():
    fr = random_fractions(0.5)
    assert ConfigFractions.csv_header().split(",")[0] == "x1"
    assert fr.csv_row().split(",")[8] == "0.125000"
    assert len(fr.csv_row().split(",")) == 14


def test_random_grid_y2_is_unbiased():
    # with exactly k of n cells active, E[y2] = (k/n)((n-k)/(n-1))
    y2 = [grid_fractions(new_random(16, 16, 90, seed=s)).y2 for s in range(1000)]
    assert np.mean(y2) == pytest.approx(90 / 256 * 166 / 255, abs=0.001)
