import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import pgtemper.runner as runner_mod
from pgtemper.rewards import (
    ColdHistory,
    HistoryRing,
    WindowStats,
    compute_reward,
    reward_esjd,
    reward_neg_acc_std,
    reward_swap_mean_distance,
    swap_mean_distance,
)
from pgtemper.runner import Sampler, Streams
from pgtemper.targets import EggBox
from pgtemper.tempering import PairSwaps, TemperatureLadder, geometric_ladder

rates_st = st.lists(st.floats(0, 1), min_size=1, max_size=12)


def ring_of(points, m=50):
    r = HistoryRing(m)
    for p in points:
        r.push(np.atleast_1d(p))
    return r


def test_omega_zero_when_history_is_y():
    y = np.array([1.0, -2.0])
    assert swap_mean_distance(ring_of([y] * 50), y) == 0.0


def test_omega_partial_ring():
    assert swap_mean_distance(ring_of([0.0, 4.0], m=2), np.array([1.0])) == 2.0


def test_omega_homogeneous():
    pts = np.random.default_rng(0).normal(size=(10, 3))
    y = np.array([0.3, 0.1, -1.0])
    a = swap_mean_distance(ring_of(pts), y)
    assert swap_mean_distance(ring_of(2 * pts), 2 * y) == pytest.approx(2 * a, rel=1e-12)


def test_omega_errors():
    with pytest.raises(ValueError):
        swap_mean_distance(HistoryRing(5), np.zeros(2))
    with pytest.raises(ValueError):
        swap_mean_distance(ring_of([np.zeros(2)]), np.zeros(3))
    with pytest.raises(ValueError):
        HistoryRing(0)


def test_ring_keeps_newest_m_first():
    r = ring_of([1.0, 2.0, 3.0, 4.0], m=3)
    assert [float(x[0]) for x in r] == [4.0, 3.0, 2.0]


@given(
    st.integers(1, 6),
    st.lists(st.tuples(st.integers(0, 2), st.floats(-10, 10), st.floats(-10, 10)), min_size=1, max_size=40),
    st.tuples(st.floats(-10, 10), st.floats(-10, 10)),
)
@settings(max_examples=100, deadline=None)
def test_vector_rings_match_reference(m, pushes, y):
    hist = ColdHistory(3, 2, m)
    rings = [HistoryRing(m) for _ in range(3)]
    for w, a, b in pushes:
        hist.push(np.array([w]), np.array([[a, b]]))
        rings[w].push([a, b])
    y = np.array(y)
    for w in range(3):
        if len(rings[w]):
            got = hist.omega(np.array([w]), y[None])[0]
            assert got == pytest.approx(swap_mean_distance(rings[w], y), rel=1e-12, abs=1e-12)
        else:
            with pytest.raises(ValueError):
                hist.omega(np.array([w]), y[None])


@given(st.tuples(st.floats(-100, 100), st.floats(-100, 100)), st.integers(0, 1000))
@settings(max_examples=50, deadline=None)
def test_omega_translation_invariant(shift, seed):
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(4, 7, 2))
    ys = rng.normal(size=(4, 2))
    shift = np.array(shift)
    a, b = ColdHistory(4, 2, 5), ColdHistory(4, 2, 5)
    for k in range(7):
        a.push_all(pts[:, k])
        b.push_all(pts[:, k] + shift)
    w = np.arange(4)
    np.testing.assert_allclose(b.omega(w, ys + shift), a.omega(w, ys), rtol=1e-9, atol=1e-9)


def stats_with(values, accepted, rejected):
    s = WindowStats(TemperatureLadder(np.array([1.0, 0.5])), rejected=rejected)
    s.omegas.append(np.array(values, dtype=float))
    acc = np.array(accepted, dtype=bool)
    s.cold_attempts.append(PairSwaps(0, np.arange(acc.size), acc, np.zeros((acc.size, 1))))
    return s


def test_reward_mean_of_attempts():
    assert reward_swap_mean_distance(stats_with([1.0, 3.0], [True, True], "zero")) == 2.0
    assert reward_swap_mean_distance(stats_with([1.0, 3.0], [True, False], "proposed")) == 2.0
    # a rejected attempt still counts, but adds no distance
    assert reward_swap_mean_distance(stats_with([1.0, 3.0], [True, False], "zero")) == 0.5


def test_reward_single_attempt_at_history():
    y = np.array([[0.5, 0.5]])
    hist = ColdHistory(1, 2, 3)
    hist.push_all(y)
    s = WindowStats(TemperatureLadder(np.array([1.0, 0.5])))
    s.record_cold_swaps(hist, PairSwaps(0, np.array([0]), np.array([True]), y))
    assert reward_swap_mean_distance(s) == 0.0


def test_reward_needs_attempts():
    with pytest.raises(ValueError):
        reward_swap_mean_distance(WindowStats(TemperatureLadder(np.array([1.0, 0.5]))))
    with pytest.raises(ValueError):
        WindowStats(TemperatureLadder(np.array([1.0, 0.5])), rejected="maybe")


def test_only_pair_zero_feeds_rings():
    s = WindowStats(TemperatureLadder(np.array([1.0, 0.5, 0.2])))
    with pytest.raises(ValueError):
        s.record_cold_swaps(ColdHistory(1, 1, 2), PairSwaps(1, np.array([0]), np.array([True]), np.zeros((1, 1))))


@pytest.mark.parametrize("mode", ["zero", "proposed"])
def test_replay_oracle(monkeypatch, mode):
    """Rebuild every omega from the raw trajectory with plain rings."""
    real_swap = runner_mod.swap_round
    snapshots = []

    def spy(state, rng):
        snapshots.append(state.positions[0].copy())
        out = real_swap(state, rng)
        snapshots.append(out[-1])
        return out

    monkeypatch.setattr(runner_mod, "swap_round", spy)
    target = EggBox(2, 20.0)
    W, m = 5, 4
    ladder = geometric_ladder(3, 0.05)
    sampler = Sampler(target, ladder, W, m, Streams.from_seed(8, 3), omega_rejected=mode)
    stats = sampler.begin_window(ladder)
    for _ in range(30):
        sampler.step(stats)
    sampler.end_window(stats)

    rings = [HistoryRing(m) for _ in range(W)]
    expected = []
    for k in range(0, len(snapshots), 2):
        cold, swaps = snapshots[k], snapshots[k + 1]
        for w in range(W):
            rings[w].push(cold[w])
        for w in range(W):
            om = swap_mean_distance(rings[w], swaps.proposed_states[w])
            expected.append(om if (swaps.accepted[w] or mode == "proposed") else 0.0)
        for w in range(W):
            if swaps.accepted[w]:
                rings[w].push(swaps.proposed_states[w])
    np.testing.assert_allclose(stats.omega_values, expected, rtol=1e-12)
    assert reward_swap_mean_distance(stats) == pytest.approx(np.mean(expected), rel=1e-12)


def test_esjd_examples():
    lad = TemperatureLadder(np.array([1.0, 0.5]))
    assert reward_esjd(lad, [0.4]) == pytest.approx(0.1)
    assert reward_esjd(geometric_ladder(4, 0.1), np.zeros(3)) == 0.0
    with pytest.raises(ValueError):
        reward_esjd(lad, [0.1, 0.2])


def test_neg_acc_std_examples():
    assert reward_neg_acc_std([0.3, 0.3, 0.3]) == 0.0
    assert reward_neg_acc_std([0.0, 1.0]) == -0.5
    with pytest.raises(ValueError):
        reward_neg_acc_std([])


@given(rates_st)
def test_neg_acc_std_properties(rates):
    r = reward_neg_acc_std(rates)
    assert r <= 0
    if np.ptp(rates) == 0:
        assert r == 0
    elif np.ptp(rates) > 1e-9:
        assert r < 0
    assert reward_neg_acc_std(rates[::-1]) == pytest.approx(r, abs=1e-15)


@given(st.lists(st.floats(0.01, 3), min_size=1, max_size=10), st.randoms(use_true_random=False))
def test_esjd_nonnegative_and_relabel_invariant(D, rnd):
    from pgtemper.tempering import ladder_from_log_diffs

    lad = ladder_from_log_diffs(np.array(D))
    rates = np.linspace(0, 1, len(D))
    val = reward_esjd(lad, rates)
    assert val >= 0
    gaps = -np.diff(lad.betas)
    idx = list(range(len(D)))
    rnd.shuffle(idx)
    assert np.mean(gaps[idx] ** 2 * rates[idx]) == pytest.approx(val, rel=1e-12)


def test_compute_reward_dispatch():
    lad = TemperatureLadder(np.array([1.0, 0.5, 0.25]))
    s = WindowStats(lad, rates=np.array([0.2, 0.6]))
    assert compute_reward("neg_acc_std", s) == pytest.approx(-0.2)
    assert compute_reward("esjd", s) == pytest.approx((0.25 * 0.2 + 0.0625 * 0.6) / 2)
    with pytest.raises(ValueError):
        compute_reward("bogus", s)
