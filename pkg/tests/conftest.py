import numpy as np
import pytest

# Lines recorded by the acceptance suite, echoed in the terminal summary.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)


# ---------------------------------------------------------------------------
# Independent brute-force counter.  It shares no code with the package: the
# neighbor rule is written out from coordinates, up-neighbors are found by
# searching for cells whose down-neighbors contain the target, and every
# link is counted from both endpoints and halved.

_Z_OF = {
    "AAA": 0, "AAB": 1, "BAA": 1, "ABA": 2, "BAB": 3, "BBA": 4, "ABB": 4, "BBB": 5,
}


def brute_down(r, c, rows, cols):
    if r % 2 == 0:
        return [((r + 1) % rows, (c - 1) % cols), ((r + 1) % rows, c % cols)]
    return [((r + 1) % rows, c % cols), ((r + 1) % rows, (c + 1) % cols)]


def brute_up(r, c, rows, cols):
    pr = (r - 1) % rows
    found = [(pr, cc) for cc in range(cols) for _ in range(brute_down(pr, cc, rows, cols).count((r, c)))]
    return sorted(found, key=lambda rc: (rc[1] - c + cols // 2) % cols)


def brute_counts(cells, horizontal_only=False):
    cells = np.asarray(cells)
    rows, cols = cells.shape
    ch = lambda rc: "A" if cells[rc] else "B"
    x = [0, 0]
    y = [0, 0, 0]
    w = [0, 0, 0]
    z = [0] * 6
    pair_idx = {"AA": 0, "AB": 1, "BA": 1, "BB": 2}
    for r in range(rows):
        for c in range(cols):
            me = ch((r, c))
            x[0 if me == "A" else 1] += 1
            up = brute_up(r, c, rows, cols)
            down = brute_down(r, c, rows, cols)
            for nb in up + down:
                y[pair_idx[me + ch(nb)]] += 1
            for nb in ((r, (c - 1) % cols), (r, (c + 1) % cols)):
                w[pair_idx[me + ch(nb)]] += 1
            z[_Z_OF[ch(down[0]) + me + ch(down[1])]] += 1
            if not horizontal_only:
                z[_Z_OF[ch(up[0]) + me + ch(up[1])]] += 1
    assert all(v % 2 == 0 for v in y + w)
    return tuple(x), tuple(v // 2 for v in y), tuple(v // 2 for v in w), tuple(z)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
