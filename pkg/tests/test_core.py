"""Configurations, gap laws, time scales and the random-stream contract."""

from __future__ import annotations

import numpy as np
import pytest

from eastmodel import (
    Boundary,
    Configuration,
    Interval,
    ModelParams,
    RenewalKind,
    RenewalLaw,
    TimeScale,
    constraint,
    dynamics_rng,
    replica_rng,
    sample_bernoulli_product,
    sample_renewal,
    site_rng,
)


# --------------------------------------------------------------------------
# parameters and windows
# --------------------------------------------------------------------------

def test_params_derive_p_and_reject_endpoints():
    assert ModelParams(0.3).p == 0.7
    for bad in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            ModelParams(bad)


def test_interval_basics():
    iv = Interval(-3, 4)
    assert iv.length == 8
    assert -3 in iv and 4 in iv and 5 not in iv and -4 not in iv
    assert list(iv.sites()) == list(range(-3, 5))
    assert Interval(2, 2).length == 1
    with pytest.raises(ValueError):
        Interval(1, 0)


# --------------------------------------------------------------------------
# configurations
# --------------------------------------------------------------------------

def test_occupancy_round_trip_single_word():
    iv = Interval(0, 9)
    occ = np.array([1, 0, 1, 1, 0, 0, 1, 0, 1, 1], np.uint8)
    conf = Configuration.from_occupancy(iv, occ)
    assert np.array_equal(conf.occupancy(), occ)
    assert conf.state_index() == int((occ.astype(np.int64) << np.arange(10)).sum())


def test_occupancy_round_trip_multiword():
    # 130 sites spans three words; exercise the packing across boundaries
    iv = Interval(-7, 122)
    rng = np.random.default_rng(5)
    occ = (rng.random(iv.length) < 0.6).astype(np.uint8)
    conf = Configuration.from_occupancy(iv, occ)
    assert conf.words.shape == (3,)
    assert np.array_equal(conf.occupancy(), occ)
    assert np.array_equal(np.sort(conf.zero_set()), iv.a + np.flatnonzero(occ == 0))


def test_excess_bits_are_masked():
    iv = Interval(0, 4)  # 5 sites, 59 excess bits
    noisy = Configuration(iv, np.array([0b10111 | (1 << 40)], np.uint64))
    clean = Configuration(iv, np.array([0b10111], np.uint64))
    assert noisy == clean
    assert noisy.state_index() == 0b10111


def test_state_index_round_trip_and_limit():
    iv = Interval(3, 8)
    for s in range(1 << iv.length):
        assert Configuration.from_state_index(iv, s).state_index() == s
    wide = Interval(0, 63)  # 64 sites: one word, but index would be ambiguous
    conf = Configuration.from_occupancy(wide, np.ones(64, np.uint8))
    with pytest.raises(ValueError):
        conf.state_index()
    with pytest.raises(ValueError):
        Configuration.from_state_index(wide, 0)
    with pytest.raises(ValueError):
        Configuration.from_state_index(iv, 1 << iv.length)


def test_from_zero_set():
    iv = Interval(10, 17)
    conf = Configuration.from_zero_set(iv, [10, 13, 17])
    assert list(conf.zero_set()) == [10, 13, 17]
    with pytest.raises(ValueError):
        Configuration.from_zero_set(iv, [9])


def test_value_and_boundary_rules():
    iv = Interval(0, 3)
    conf = Configuration.from_zero_set(iv, [1])
    assert conf.value(0) == 1 and conf.value(1) == 0
    # the frozen zero at b+1 exists under either rule
    assert conf.value(4) == 0
    with pytest.raises(IndexError):
        conf.value(5)
    with pytest.raises(IndexError):
        conf.value(-1)
    emb = Configuration.from_zero_set(iv, [1], boundary=Boundary.EMBEDDED_IN_Z)
    assert emb.value(4) == 0  # frozen zero wins over the occupied default
    assert emb.value(5) == 1 and emb.value(-1) == 1


def test_flip_toggles_one_site():
    iv = Interval(0, 70)  # multiword on purpose
    conf = Configuration.from_occupancy(iv, np.zeros(71, np.uint8))
    up = conf.flip(69)
    assert up.value(69) == 1
    assert up.flip(69) == conf
    assert (up.occupancy() != conf.occupancy()).sum() == 1
    with pytest.raises(IndexError):
        conf.flip(71)


def test_constraint_reads_east_neighbour():
    iv = Interval(0, 3)
    full = Configuration.from_occupancy(iv, np.ones(4, np.uint8))
    # rightmost site sees the frozen zero, everyone else is blocked
    assert [constraint(full, x) for x in range(4)] == [0, 0, 0, 1]
    holed = full.flip(2)  # vacancy at 2 frees site 1 only
    assert [constraint(holed, x) for x in range(4)] == [0, 1, 0, 1]
    with pytest.raises(IndexError):
        constraint(full, 4)


# --------------------------------------------------------------------------
# renewal gap laws
# --------------------------------------------------------------------------

def test_point_mass_law():
    mu = RenewalLaw.point_mass(3)
    assert mu.kind is RenewalKind.POINT_MASS
    assert mu.pmf(3) == 1.0 and mu.pmf(2) == 0.0 and mu.pmf(0) == 0.0
    assert mu.d_min == 3 and mu.mean() == 3.0
    assert mu.label == "pointmass(3)"
    with pytest.raises(ValueError):
        RenewalLaw.point_mass(0)


def test_geometric_law_lumps_tail():
    mu = RenewalLaw.geometric(0.5)
    assert abs(mu.table.sum() - 1.0) < 1e-15
    assert abs(mu.mean() - 2.0) < 1e-9
    assert mu.pmf(1) == 0.5 and mu.pmf(3) == 0.125
    assert mu.d_min == 1 and mu.n_d == 0 and mu.c0 == 1.0
    with pytest.raises(ValueError):
        RenewalLaw.geometric(1.0)


def test_pareto_tail_law():
    mu = RenewalLaw.pareto_tail(0.5, cutoff=1000)
    assert abs(mu.table.sum() - 1.0) < 1e-12
    assert mu.c0 == 0.5
    # last entry carries the whole tail mass mu((cutoff, inf)) = cutoff^-alpha
    assert mu.table[-1] == pytest.approx(1000.0 ** -0.5, abs=1e-15)
    assert mu.pmf(1) == pytest.approx(1.0 - 2.0 ** -0.5)
    with pytest.raises(ValueError):
        RenewalLaw.pareto_tail(1.2)


def test_table_pmf_normalizes_and_validates():
    mu = RenewalLaw.table_pmf([0.0, 2.0, 2.0])
    assert mu.pmf(1) == 0.0 and mu.pmf(2) == 0.5 and mu.pmf(3) == 0.5
    assert mu.d_min == 2 and mu.n_d == 1
    with pytest.raises(ValueError):
        RenewalLaw(RenewalKind.TABLE, np.array([0.5, 0.4]))  # mass 0.9
    with pytest.raises(ValueError):
        RenewalLaw(RenewalKind.TABLE, np.array([-0.5, 1.5]))


def test_n_d_bracket():
    # smallest n with d_min in [2^(n-1)+1, 2^n]
    for d, n in ((1, 0), (2, 1), (3, 2), (4, 2), (5, 3), (8, 3), (9, 4)):
        assert RenewalLaw.point_mass(d).n_d == n


def test_sample_gaps_stay_in_support():
    mu = RenewalLaw.table_pmf([0.0, 1.0, 0.0, 1.0])
    gaps = mu.sample_gaps(np.random.default_rng(0), 500)
    assert set(np.unique(gaps)) <= {2, 4}
    assert np.all(RenewalLaw.point_mass(7).sample_gaps(np.random.default_rng(1), 50) == 7)


# --------------------------------------------------------------------------
# time scales
# --------------------------------------------------------------------------

def test_time_ladder_conventions():
    ts = TimeScale(0.1, epsilon=0.1)
    assert ts.t(0) == 1.0 and ts.t_minus(0) == 0.0
    assert ts.t_plus(0) == pytest.approx(10.0 ** 0.1)
    assert ts.t(3) == pytest.approx(1000.0)
    assert ts.t_minus(2) == pytest.approx(100.0 ** 0.9)
    assert ts.t_plus(2) == pytest.approx(100.0 ** 1.1)
    assert ts.active_window(2) == (ts.t_minus(2), ts.t_plus(2))
    assert ts.stalling_window(2) == (ts.t_plus(2), ts.t_minus(3))


def test_time_ladder_ordering_threshold():
    # t_n^+ < t_{n+1}^- for all n <= n_max iff eps (2 n_max + 1) < 1
    ts = TimeScale(0.05, epsilon=0.1)
    assert ts.ordered_up_to(4)
    assert not ts.ordered_up_to(5)
    assert TimeScale(0.05, epsilon=0.3).ordered_up_to(1)
    assert not TimeScale(0.05, epsilon=0.4).ordered_up_to(1)


def test_time_scale_validation():
    with pytest.raises(ValueError):
        TimeScale(0.0)
    for eps in (0.0, 0.5, -0.1):
        with pytest.raises(ValueError):
            TimeScale(0.1, epsilon=eps)


# --------------------------------------------------------------------------
# random streams
# --------------------------------------------------------------------------

def _first_draws(gen, n=4):
    return tuple(gen.integers(1 << 62, size=n).tolist())


def test_streams_are_reproducible():
    assert _first_draws(replica_rng(7, 3)) == _first_draws(replica_rng(7, 3))
    assert _first_draws(dynamics_rng(7, 3)) == _first_draws(dynamics_rng(7, 3))
    assert _first_draws(site_rng(7, 3, -12)) == _first_draws(site_rng(7, 3, -12))


def test_streams_are_pairwise_distinct():
    # initial-state, dynamics and per-site streams of one replica must not
    # alias each other, nor the streams of a neighbouring replica or site
    draws = [
        _first_draws(replica_rng(7, 3)),
        _first_draws(replica_rng(7, 4)),
        _first_draws(dynamics_rng(7, 3)),
        _first_draws(dynamics_rng(7, 4)),
        _first_draws(site_rng(7, 3, 0)),
        _first_draws(site_rng(7, 3, 1)),
        _first_draws(site_rng(7, 4, 0)),
        _first_draws(site_rng(8, 3, 0)),
    ]
    assert len(set(draws)) == len(draws)


def test_site_stream_key_range():
    site_rng(0, 0, -(1 << 31))
    site_rng(0, 0, (1 << 31) - 1)
    with pytest.raises(ValueError):
        site_rng(0, 0, 1 << 31)
    with pytest.raises(ValueError):
        site_rng(0, 0, -(1 << 31) - 1)


# --------------------------------------------------------------------------
# initial-law samplers
# --------------------------------------------------------------------------

def test_bernoulli_product_density():
    iv = Interval(0, 19999)
    conf = sample_bernoulli_product(ModelParams(0.3), iv, replica_rng(0, 0))
    # mean occupancy p = 0.7, se = sqrt(pq/L) ~ 0.0032
    assert abs(conf.occupancy().mean() - 0.7) < 4 * np.sqrt(0.21 / iv.length)
    thin = sample_bernoulli_product(0.1, iv, replica_rng(0, 1))
    assert abs(thin.occupancy().mean() - 0.1) < 4 * np.sqrt(0.09 / iv.length)
    with pytest.raises(ValueError):
        sample_bernoulli_product(1.0, iv, replica_rng(0, 2))


def test_renewal_sampler_point_mass_grid():
    iv = Interval(0, 99)
    conf = sample_renewal(RenewalLaw.point_mass(4), iv, replica_rng(0, 0))
    assert list(conf.zero_set()) == list(range(0, 100, 4))


def test_renewal_sampler_anchors_origin_and_density():
    iv = Interval(0, 49999)
    conf = sample_renewal(RenewalLaw.geometric(0.5), iv, replica_rng(0, 0))
    assert conf.value(0) == 0
    gaps = np.diff(conf.zero_set())
    # gaps are i.i.d. geometric(1/2): mean 2, so vacancy density 1/2
    assert abs(gaps.mean() - 2.0) < 4 * gaps.std(ddof=1) / np.sqrt(gaps.size)
    with pytest.raises(ValueError):
        sample_renewal(RenewalLaw.geometric(0.5), Interval(1, 10), replica_rng(0, 0))
