"""Trajectory simulation by the graphical construction, with a fast path.

Faithful mode realizes the construction literally: site x carries a rate-1
Poisson clock and an i.i.d. coin sequence with P(occupied) = p; at each
ring the site queries its constraint (East neighbour empty, or x the
rightmost site facing the frozen zero) and, when legal, resets to the coin
value.  The per-(replica, site) streams are derived from the global seed
and the absolute site index, so enlarging or shifting the window reuses the
rings and coins of the sites it shares with another run -- the property the
locality and factorization tests exercise.

Rejection-free mode schedules only the state-changing events (unconstrained
occupied sites empty at rate q, unconstrained empty ones fill at rate p)
and is the only practical route to the coarsening horizons t ~ (1/q)^n,
where almost every faithful ring is illegal or a no-op.  It is
distributionally equivalent to faithful mode; the test suite checks the
final-state laws against each other at the 1 percent chi-square level.

Both modes fill the same :class:`TrajectoryStats`.  The distinguished-zero
construction needs every legal ring, including those whose coin leaves the
state unchanged, so it exists in faithful mode only.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import (
    Boundary,
    Configuration,
    Interval,
    ModelParams,
    dynamics_rng,
    replica_rng,
    sample_bernoulli_product,
    site_rng,
)

__all__ = [
    "NO_ZERO",
    "MAX_HORIZON",
    "SimMode",
    "RingEvent",
    "DistinguishedZeroPath",
    "TrajectoryStats",
    "PersistenceCurve",
    "ActivityEstimate",
    "HittingSample",
    "run_graphical",
    "track_distinguished",
    "measure_persistence",
    "measure_activity",
    "hitting_time",
]

NO_ZERO = np.iinfo(np.int64).min  # sentinel in first_zero / second_zero
MAX_HORIZON = 2.0 ** 53  # beyond this, event times lose unit resolution


class SimMode(enum.Enum):
    FAITHFUL = "faithful"
    REJECTION_FREE = "rejection-free"


@dataclass(frozen=True)
class RingEvent:
    """One clock ring: when, where, what the coin showed, and whether the
    constraint was satisfied at that moment."""

    time: float
    site: int
    coin: int
    legal: bool


@dataclass(frozen=True)
class DistinguishedZeroPath:
    """Trajectory of the distinguished zero.

    The label starts on an empty site and advances one step east at every
    legal ring at its current position, whatever the coin shows; legality
    means the landing site is empty, so the label always sits on a vacancy.
    ``jumps`` is the ordered list of (time, new_position); a final position
    of window.b + 1 means absorption at the frozen zero.
    """

    start_site: int
    jumps: tuple

    def position_at(self, t: float) -> int:
        pos = self.start_site
        for when, where in self.jumps:
            if when > t:
                break
            pos = where
        return pos


@dataclass(frozen=True)
class TrajectoryStats:
    """Per-sample-time observables of one trajectory.

    ``snapshots[i]`` is the occupancy over the window at sample_times[i];
    ``flip_counts[i, x]`` counts the value changes of site x on [0, t_i]
    (nondecreasing in i); ``first_zero`` / ``second_zero`` hold the two
    leftmost vacancy positions in absolute site coordinates, or NO_ZERO.
    """

    window: Interval
    sample_times: np.ndarray
    snapshots: np.ndarray
    flip_counts: np.ndarray
    first_zero: np.ndarray
    second_zero: np.ndarray
    total_flips: np.ndarray
    final: Configuration
    events: tuple | None = None

    @property
    def persistence(self) -> np.ndarray:
        """persistence[i, x] = 1 when sigma_s(x) was constant on [0, t_i]."""
        return (self.flip_counts == 0).astype(np.uint8)


@dataclass(frozen=True)
class PersistenceCurve:
    times: np.ndarray
    fraction: np.ndarray  # share of replicas whose probe never changed
    stderr: np.ndarray
    replicas: int
    probe: int
    boundary_margin_ok: bool  # window extends >= 4/q sites east of the probe


@dataclass(frozen=True)
class ActivityEstimate:
    """Per-site per-time flip rates over [1, N]; ``bulk`` excludes the
    boundary site N, whose missing constraint inflates its rate to 2pq."""

    N: int
    horizon: float
    replicas: int
    rate_total: float
    stderr_total: float
    rate_bulk: float
    stderr_bulk: float


@dataclass(frozen=True)
class HittingSample:
    """Empirical first-entry times; censored entries hold +inf."""

    times: np.ndarray
    censored: int
    horizon: float

    def tail(self, t: float) -> tuple[float, float]:
        """P(tau > t) with binomial stderr; t must not exceed the horizon."""
        if t > self.horizon:
            raise ValueError("tail time beyond the censoring horizon")
        ind = self.times > t
        f = float(ind.mean())
        return f, math.sqrt(f * (1.0 - f) / ind.size)


def _as_mode(mode) -> SimMode:
    return mode if isinstance(mode, SimMode) else SimMode(mode)


def _merged_event_stream(
    window: Interval, horizon: float, params: ModelParams, seed: int, replica: int
):
    """Per-site Poisson rings and coins, merged into one time-sorted stream.

    Streams are keyed by absolute site index.  The stable sort of the
    site-ordered concatenation breaks exact float ties (measure zero, but
    possible) by site index.
    """
    times, sites, coins = [], [], []
    for off, x in enumerate(range(window.a, window.b + 1)):
        g = site_rng(seed, replica, x)
        n = int(g.poisson(horizon))
        times.append(g.random(n) * horizon)
        coins.append((g.random(n) < params.p).astype(np.uint8))
        sites.append(np.full(n, off, dtype=np.int64))
    t = np.concatenate(times) if times else np.empty(0)
    order = np.argsort(t, kind="stable")
    return (
        t[order],
        np.concatenate(sites)[order],
        np.concatenate(coins)[order],
    )


def _validate_run(window: Interval, horizon: float, sample_times: np.ndarray) -> None:
    if not horizon > 0.0:
        raise ValueError("horizon must be positive")
    if horizon > MAX_HORIZON:
        raise ValueError(f"horizon beyond {MAX_HORIZON:.0e} loses time resolution")
    if sample_times.size and (sample_times[0] < 0.0 or sample_times[-1] > horizon):
        raise ValueError("sample times must lie in [0, horizon]")
    if np.any(np.diff(sample_times) < 0):
        raise ValueError("sample times must be sorted")


def run_graphical(
    initial: Configuration,
    params: ModelParams,
    horizon: float,
    sample_times,
    seed: int = 0,
    replica: int = 0,
    mode: SimMode | str = SimMode.FAITHFUL,
    record_events: bool = False,
    _track_start: int | None = None,
) -> TrajectoryStats | tuple:
    """Simulate one trajectory; observables are sampled at ``sample_times``.

    A sample at time s reflects every event with time <= s.  In
    rejection-free mode events are not individually reconstructible, so
    ``record_events`` is a faithful-mode feature.
    """
    mode = _as_mode(mode)
    window = initial.window
    sample_times = np.asarray(sample_times, dtype=np.float64)
    _validate_run(window, horizon, sample_times)
    W = window.length
    S = sample_times.size
    bits = np.ascontiguousarray(initial.occupancy())
    occ_snap = np.zeros((S, W), np.uint8)
    flip_snap = np.zeros((S, W), np.int64)
    probe_occ = np.zeros(S, np.uint8)
    probe_never = np.zeros(S, np.uint8)
    x0 = np.full(S, -1, np.int64)
    x1 = np.full(S, -1, np.int64)
    tot = np.zeros(S, np.int64)

    if mode is SimMode.REJECTION_FREE:
        if record_events:
            raise ValueError("event recording needs faithful mode")
        if _track_start is not None:
            raise ValueError(
                "the distinguished zero moves at no-op legal rings too; "
                "track it in faithful mode"
            )
        kernel_seed = int(dynamics_rng(seed, replica).integers(1 << 31))
        _kernels.rf_pass(
            bits, params.q, kernel_seed, sample_times, 0,
            occ_snap, flip_snap, probe_occ, probe_never, x0, x1, tot,
        )
        events = None
        path = None
    else:
        ev_t, ev_s, ev_c = _merged_event_stream(window, horizon, params, seed, replica)
        ev_legal = np.zeros(ev_t.size, np.uint8)
        track = _track_start is not None
        zstart = 0
        if track:
            if _track_start not in window:
                raise ValueError(f"start site {_track_start} outside {window}")
            if initial.value(_track_start) != 0:
                raise ValueError("the distinguished zero must start on an empty site")
            zstart = _track_start - window.a
        zpos = np.zeros(S, np.int64)
        cap = (W - zstart) if track else 0
        jump_t = np.zeros(cap, np.float64)
        jump_x = np.zeros(cap, np.int64)
        nj = _kernels.faithful_pass(
            bits, ev_t, ev_s, ev_c, ev_legal, sample_times, 0,
            track, zstart,
            occ_snap, flip_snap, probe_occ, probe_never, x0, x1, tot,
            zpos, jump_t, jump_x,
        )
        events = (
            tuple(
                RingEvent(float(t), window.a + int(s), int(c), bool(l))
                for t, s, c, l in zip(ev_t, ev_s, ev_c, ev_legal)
            )
            if record_events
            else None
        )
        path = (
            DistinguishedZeroPath(
                start_site=_track_start,
                jumps=tuple(
                    (float(jump_t[i]), window.a + int(jump_x[i])) for i in range(nj)
                ),
            )
            if track
            else None
        )

    stats = TrajectoryStats(
        window=window,
        sample_times=sample_times,
        snapshots=occ_snap,
        flip_counts=flip_snap,
        first_zero=np.where(x0 >= 0, window.a + x0, NO_ZERO),
        second_zero=np.where(x1 >= 0, window.a + x1, NO_ZERO),
        total_flips=tot,
        final=Configuration.from_occupancy(window, bits, initial.boundary),
        events=events,
    )
    return (stats, path) if path is not None else stats


def track_distinguished(
    initial: Configuration,
    start_site: int,
    params: ModelParams,
    horizon: float,
    sample_times,
    seed: int = 0,
    replica: int = 0,
) -> tuple:
    """Faithful run that also follows the distinguished zero from start_site.

    Returns (TrajectoryStats, DistinguishedZeroPath)."""
    return run_graphical(
        initial,
        params,
        horizon,
        sample_times,
        seed=seed,
        replica=replica,
        mode=SimMode.FAITHFUL,
        _track_start=start_site,
    )


def measure_persistence(
    params: ModelParams,
    length: int,
    horizon: float,
    sample_times,
    replicas: int,
    seed: int = 0,
    mode: SimMode | str = SimMode.FAITHFUL,
) -> PersistenceCurve:
    """Equilibrium persistence of the leftmost site.

    F(t) = share of replicas, initialized from pi, whose probe value never
    changed on [0, t].  The probe should sit at least 4/q sites west of the
    frozen boundary for the curve to approximate the infinite chain; runs
    violating that are still meaningful against same-window exact bounds,
    so the result only flags it via ``boundary_margin_ok``.
    """
    mode = _as_mode(mode)
    window = Interval(0, length - 1)
    sample_times = np.asarray(sample_times, dtype=np.float64)
    hits = np.zeros(sample_times.size, dtype=np.int64)
    for r in range(replicas):
        init = sample_bernoulli_product(params, window, replica_rng(seed, r))
        stats = run_graphical(
            init, params, horizon, sample_times, seed=seed, replica=r, mode=mode
        )
        hits += stats.flip_counts[:, 0] == 0
    frac = hits / replicas
    return PersistenceCurve(
        times=sample_times,
        fraction=frac,
        stderr=np.sqrt(frac * (1.0 - frac) / replicas),
        replicas=replicas,
        probe=0,
        boundary_margin_ok=length >= math.ceil(4.0 / params.q),
    )


def measure_activity(
    params: ModelParams,
    N: int,
    horizon: float,
    replicas: int,
    seed: int = 0,
    mode: SimMode | str = SimMode.FAITHFUL,
) -> ActivityEstimate:
    """Empirical flip rate per site and unit time on the window [1, N],
    started from equilibrium."""
    mode = _as_mode(mode)
    window = Interval(1, N)
    t_end = np.array([horizon], dtype=np.float64)
    per_total = np.empty(replicas)
    per_bulk = np.empty(replicas)
    for r in range(replicas):
        init = sample_bernoulli_product(params, window, replica_rng(seed, r))
        stats = run_graphical(
            init, params, horizon, t_end, seed=seed, replica=r, mode=mode
        )
        per_total[r] = stats.total_flips[0] / (N * horizon)
        per_bulk[r] = stats.flip_counts[0, : N - 1].sum() / ((N - 1) * horizon)
    return ActivityEstimate(
        N=N,
        horizon=horizon,
        replicas=replicas,
        rate_total=float(per_total.mean()),
        stderr_total=float(per_total.std(ddof=1) / math.sqrt(replicas)),
        rate_bulk=float(per_bulk.mean()),
        stderr_bulk=float(per_bulk.std(ddof=1) / math.sqrt(replicas)),
    )


def hitting_time(
    window: Interval,
    params: ModelParams,
    target,
    horizon: float,
    replicas: int,
    seed: int = 0,
    initial: Configuration | None = None,
) -> HittingSample:
    """Empirical law of the first time the configuration enters the target set.

    ``target`` is a predicate on :class:`Configuration`; it is tabulated
    over all 2^L states up front (hence L <= 20).  ``initial`` fixes the
    starting state; by default each replica starts from pi.  Replicas still
    outside the set at the horizon are censored at +inf and counted.
    """
    L = window.length
    if L > 20:
        raise ValueError("predicate tabulation is limited to 20-site windows")
    table = np.zeros(1 << L, dtype=np.uint8)
    for s in range(1 << L):
        table[s] = bool(target(Configuration.from_state_index(window, s)))
    times = np.empty(replicas)
    for r in range(replicas):
        conf = (
            initial
            if initial is not None
            else sample_bernoulli_product(params, window, replica_rng(seed, r))
        )
        ev_t, ev_s, ev_c = _merged_event_stream(window, horizon, params, seed, r)
        bits = np.ascontiguousarray(conf.occupancy())
        hit = _kernels.faithful_hitting(bits, ev_t, ev_s, ev_c, table)
        times[r] = hit if hit >= 0.0 else np.inf
    return HittingSample(
        times=times, censored=int(np.isinf(times).sum()), horizon=horizon
    )
