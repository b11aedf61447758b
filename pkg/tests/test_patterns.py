import pytest

from cvm2d.analytic import estimate_h
from cvm2d.configvars import grid_fractions
from cvm2d.errors import GridError
from cvm2d.lattice import to_text
from cvm2d.patterns import (
    FIXTURES, PatternKind, PatternSpec, generate, island_sizes, load_fixture,
)


def test_island_sizes():
    assert island_sizes(64) == [16, 8, 8, 4, 4, 4, 4, 2, 2, 2, 2, 2, 2, 2, 2]
    assert sum(island_sizes(64)) == 64
    assert island_sizes(20) == [16, 4]
    assert island_sizes(0) == []
    assert sum(island_sizes(300)) == 300


@pytest.mark.parametrize("kind", list(PatternKind))
@pytest.mark.parametrize("n_active", [0, 30, 128, 200])
def test_exact_active_count(kind, n_active):
    g = generate(PatternSpec(kind, 16, 16, n_active, seed=3))
    assert g.n_active == n_active


@pytest.mark.parametrize("kind", list(PatternKind))
def test_deterministic(kind):
    spec = PatternSpec(kind, 12, 10, 40, seed=5)
    assert generate(spec) == generate(spec)


def test_spec_validation():
    with pytest.raises(GridError):
        PatternSpec("random", 3, 4, 2)
    with pytest.raises(GridError):
        PatternSpec("random", 4, 4, 17)
    with pytest.raises(ValueError):
        PatternSpec("paisley")


def test_rich_club_signature():
    fr = grid_fractions(generate(PatternSpec(PatternKind.RICH_CLUB)))
    assert fr.z1 > 0.3 and fr.y2 < 0.12


def test_rich_club_wraps_seam():
    cells = generate(PatternSpec(PatternKind.RICH_CLUB, n_active=60)).cells
    assert cells[0, 0] == 1 and cells[-1, -1] == 1


def test_archetype_ordering():
    for seed in range(4):
        sf = grid_fractions(generate(PatternSpec(PatternKind.SCALE_FREE, seed=seed)))
        rc = grid_fractions(generate(PatternSpec(PatternKind.RICH_CLUB, seed=seed)))
        assert sf.z1 < rc.z1 - 0.1
        assert sf.y2 > rc.y2 + 0.1
        assert sf.z3 > rc.z3


def test_scale_free_h_estimate():
    for seed in range(4):
        fr = grid_fractions(generate(PatternSpec(PatternKind.SCALE_FREE, seed=seed)))
        assert 1.3 <= estimate_h(fr) <= 2.2


def test_small_rich_club_block():
    g = generate(PatternSpec(PatternKind.SMALL_RICH_CLUB, n_active=30))
    assert g.x1 == pytest.approx(30 / 256) and round(g.x1, 3) == 0.117
    rows = [r for r in range(16) if g.cells[r].any()]
    cols = [c for c in range(16) if g.cells[:, c].any()]
    assert (len(rows), len(cols)) == (5, 6)


def test_stripes():
    g = generate(PatternSpec(PatternKind.STRIPES, 4, 4, 8))
    assert to_text(g) == "AAAA\nBBBB\nAAAA\nBBBB\n"


def test_fixtures_match_generators():
    assert set(FIXTURES) == {
        "scale_free_16x16", "rich_club_16x16", "small_rich_club_16x16", "row_stripes_4x4",
    }
    assert load_fixture("rich_club_16x16") == generate(PatternSpec(PatternKind.RICH_CLUB))
    assert load_fixture("small_rich_club_16x16") == generate(
        PatternSpec(PatternKind.SMALL_RICH_CLUB, n_active=30)
    )
    sf = load_fixture("scale_free_16x16")
    assert sf.n_active == 128
    assert 1.3 <= estimate_h(grid_fractions(sf)) <= 2.2
    with pytest.raises(KeyError):
        load_fixture("nope")
