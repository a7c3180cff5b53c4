import time

import numpy as np
import pytest

from magkerr.sweep import preset, run_sweep


@pytest.fixture(scope="session")
def preset_runs():
    """Every bundled preset run once, serially, with wall-clock timing."""
    out = {}
    for name in ("fig2", "fig3", "fig4"):
        grid = preset(name)
        t0 = time.monotonic()
        records = run_sweep(grid, jobs=1, seed=0)
        out[name] = (grid, records, time.monotonic() - t0)
    return out


def field_array(grid, records, field):
    """Records reshaped to the grid, None mapped to NaN."""
    n1, n2 = grid.shape()
    vals = [getattr(r, field) for r in records]
    arr = np.array([np.nan if v is None else float(v) for v in vals])
    return arr.reshape(n1, n2)
