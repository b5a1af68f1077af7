import numpy as np
import pytest

from weeconomy.rng import StepStream

# first raw outputs of PCG64(SeedSequence(1)); frozen so a numpy upgrade that
# changed the stream would be caught
SEED1_RAW = [9441442522235856127, 17532960557476522086, 2659275481604167885, 17499493567006797778]


def test_raw_stream_is_pinned():
    assert StepStream(1).raw(4).tolist() == SEED1_RAW


def test_step_mapping_from_raw():
    raw = SEED1_RAW[:3]
    u = [(r >> 11) * 2.0**-53 for r in raw]
    i = int(u[0] * 1000)
    j = int(u[1] * 999)
    j += j >= i
    d = -0.1 + 0.2 * u[2]
    ii, jj, dd = StepStream(1).draw_steps(1, 1000, -0.1, 0.1)
    assert (ii[0], jj[0], dd[0]) == (i, j, d)


@pytest.mark.parametrize("chunks", [[1] * 50, [7, 13, 30], [50]])
def test_chunking_does_not_change_draws(chunks):
    ref = StepStream(9).draw_steps(50, 17, -0.1, 0.1)
    s = StepStream(9)
    parts = [s.draw_steps(k, 17, -0.1, 0.1) for k in chunks]
    for whole, pieces in zip(ref, zip(*parts)):
        assert np.concatenate(pieces).tobytes() == whole.tobytes()


def test_pairs_are_distinct_and_uniform():
    n = 4
    i, j, d = StepStream(5).draw_steps(120_000, n, -0.1, 0.1)
    assert np.all(i != j)
    assert i.min() == 0 and i.max() == n - 1 and j.max() == n - 1
    counts = np.bincount(i * n + j, minlength=n * n).reshape(n, n)
    assert np.all(np.diag(counts) == 0)
    off = counts[~np.eye(n, dtype=bool)]
    expected = 120_000 / 12
    chi2 = ((off - expected) ** 2 / expected).sum()
    assert chi2 < 31.3  # 99.9% quantile, 11 dof
    assert d.min() >= -0.1 and d.max() < 0.1


def test_open_uniforms_exclude_endpoints():
    u = StepStream(2).open_uniforms(100_000)
    assert u.min() > 0.0 and u.max() < 1.0


@pytest.mark.parametrize("seed", [-1, 2**64, 1.5])
def test_rejects_bad_seed(seed):
    with pytest.raises(ValueError):
        StepStream(seed)
