"""Configurations, the product measure, initial-law samplers and time scales.

The East chain lives on a finite window of sites ``[a, b]``.  Each site
carries an occupancy value sigma(x) in {0, 1} (1 = occupied).  Site x may
refresh only when its East neighbour is empty; the window is closed on the
right by a permanently empty "frozen zero" at site b+1, so the rightmost
site is never blocked.  The reversible measure is the product Bernoulli
measure with occupancy probability p = 1 - q.

Everything downstream -- exact generators, simulation kernels, quench
experiments -- shares the types defined here:

* :class:`ModelParams`         the single parameter q (and derived p),
* :class:`Interval`            integer windows [a, b],
* :class:`Configuration`       bit-packed occupancies with a boundary rule,
* :class:`RenewalLaw`          inter-zero gap laws for renewal initial states,
* :class:`TimeScale`           the ladder t_n = (1/q)^n with the active /
                               stalling window endpoints t_n^(1 -+ eps).

Site values are packed 64 per machine word, ascending site index within a
word; for windows of at most 63 sites the packed integer doubles as the
state index used by the spectral module.

Randomness contract: every sampler takes an explicit ``numpy.random.Generator``
and is stateless.  Helpers :func:`replica_rng` and :func:`site_rng` derive
independent streams from (seed, replica) and (seed, replica, site), which
makes replicated runs reproducible independently of scheduling and lets two
simulations share the ring/coin streams of common sites.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Boundary",
    "Configuration",
    "Interval",
    "ModelParams",
    "RenewalKind",
    "RenewalLaw",
    "TimeScale",
    "constraint",
    "dynamics_rng",
    "replica_rng",
    "site_rng",
    "sample_bernoulli_product",
    "sample_renewal",
]


# --------------------------------------------------------------------------
# parameters and windows
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelParams:
    """The vacancy probability q in (0, 1); p = 1 - q is derived, never set."""

    q: float

    def __post_init__(self) -> None:
        if not 0.0 < self.q < 1.0:
            raise ValueError(f"q must lie in (0, 1), got {self.q}")

    @property
    def p(self) -> float:
        return 1.0 - self.q


@dataclass(frozen=True, order=True)
class Interval:
    """Integer interval [a, b], endpoints included."""

    a: int
    b: int

    def __post_init__(self) -> None:
        if self.b < self.a:
            raise ValueError(f"empty interval [{self.a}, {self.b}]")

    @property
    def length(self) -> int:
        return self.b - self.a + 1

    def __contains__(self, x: int) -> bool:
        return self.a <= x <= self.b

    def sites(self) -> np.ndarray:
        return np.arange(self.a, self.b + 1)


class Boundary(enum.Enum):
    """How reads outside the window are resolved.

    FROZEN_ZERO_RIGHT defines only sigma(b+1) = 0; EMBEDDED_IN_Z additionally
    reads every other out-of-window site as occupied.
    """

    FROZEN_ZERO_RIGHT = "frozen-zero-right"
    EMBEDDED_IN_Z = "embedded-in-z"


# --------------------------------------------------------------------------
# configurations
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Configuration:
    """Occupancies on a window, bit-packed 64 sites per word.

    Bit (x - window.a) of word (x - window.a) // 64 stores sigma(x).
    """

    window: Interval
    words: np.ndarray  # uint64, ceil(L / 64) entries, excess bits zero
    boundary: Boundary = Boundary.FROZEN_ZERO_RIGHT

    # the generated __eq__ would compare the word arrays elementwise and
    # hand back an array; spell out value equality instead
    def __eq__(self, other) -> bool:
        if not isinstance(other, Configuration):
            return NotImplemented
        return (
            self.window == other.window
            and self.boundary is other.boundary
            and bool(np.array_equal(self.words, other.words))
        )

    def __hash__(self) -> int:
        return hash((self.window, self.boundary, self.words.tobytes()))

    def __post_init__(self) -> None:
        L = self.window.length
        n_words = (L + 63) // 64
        w = np.ascontiguousarray(self.words, dtype=np.uint64)
        if w.shape != (n_words,):
            raise ValueError(f"expected {n_words} words for {L} sites")
        # mask stray bits beyond L so equal configurations compare equal
        excess = n_words * 64 - L
        if excess:
            w = w.copy()
            w[-1] &= np.uint64((1 << (64 - excess)) - 1)
        object.__setattr__(self, "words", w)
        self.words.setflags(write=False)

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_occupancy(
        cls,
        window: Interval,
        occ: np.ndarray,
        boundary: Boundary = Boundary.FROZEN_ZERO_RIGHT,
    ) -> "Configuration":
        occ = np.asarray(occ, dtype=np.uint8)
        if occ.shape != (window.length,):
            raise ValueError("occupancy length does not match the window")
        bits = np.zeros(((window.length + 63) // 64) * 64, np.uint8)
        bits[: window.length] = occ & 1
        packed = np.packbits(bits, bitorder="little")  # bit i of word -> sigma(a + i)
        words = np.frombuffer(packed.tobytes(), dtype="<u8").astype(np.uint64)
        return cls(window, words, boundary)

    @classmethod
    def from_zero_set(
        cls,
        window: Interval,
        zeros,
        boundary: Boundary = Boundary.FROZEN_ZERO_RIGHT,
    ) -> "Configuration":
        occ = np.ones(window.length, np.uint8)
        for z in zeros:
            if z not in window:
                raise ValueError(f"zero at {z} outside {window}")
            occ[z - window.a] = 0
        return cls.from_occupancy(window, occ, boundary)

    @classmethod
    def from_state_index(
        cls,
        window: Interval,
        index: int,
        boundary: Boundary = Boundary.FROZEN_ZERO_RIGHT,
    ) -> "Configuration":
        if window.length > 63:
            raise ValueError("state indices are defined for at most 63 sites")
        if not 0 <= index < (1 << window.length):
            raise ValueError("state index out of range")
        return cls(window, np.array([index], np.uint64), boundary)

    # -- accessors ---------------------------------------------------------

    def occupancy(self) -> np.ndarray:
        """Unpacked uint8 array, entry i = sigma(window.a + i)."""
        raw = np.frombuffer(self.words.astype("<u8").tobytes(), dtype=np.uint8)
        bits = np.unpackbits(raw, bitorder="little")
        return bits[: self.window.length].astype(np.uint8)

    def value(self, x: int) -> int:
        """sigma(x), resolving out-of-window reads through the boundary rule."""
        if x in self.window:
            i = x - self.window.a
            return int((self.words[i // 64] >> np.uint64(i % 64)) & np.uint64(1))
        if x == self.window.b + 1:
            return 0  # the frozen zero, under either boundary rule
        if self.boundary is Boundary.EMBEDDED_IN_Z:
            return 1
        raise IndexError(
            f"site {x} outside {self.window} has no value under {self.boundary}"
        )

    def zero_set(self) -> np.ndarray:
        """Positions of the empty sites, ascending."""
        return self.window.a + np.flatnonzero(self.occupancy() == 0)

    def state_index(self) -> int:
        """The packed integer (bit x - a = sigma(x)); needs at most 63 sites."""
        if self.window.length > 63:
            raise ValueError("state indices are defined for at most 63 sites")
        return int(self.words[0])

    def flip(self, x: int) -> "Configuration":
        if x not in self.window:
            raise IndexError(f"site {x} outside {self.window}")
        i = x - self.window.a
        words = self.words.copy()
        words[i // 64] ^= np.uint64(1) << np.uint64(i % 64)
        return Configuration(self.window, words, self.boundary)


def constraint(sigma: Configuration, x: int) -> int:
    """1 - sigma(x+1): whether site x is currently allowed to refresh.

    The East neighbour of the rightmost site is the frozen zero, so the
    constraint there is always satisfied.
    """
    if x not in sigma.window:
        raise IndexError(f"site {x} outside {sigma.window}")
    return 1 - sigma.value(x + 1)


# --------------------------------------------------------------------------
# renewal gap laws
# --------------------------------------------------------------------------

class RenewalKind(enum.Enum):
    POINT_MASS = "point-mass"
    GEOMETRIC = "geometric"
    TABLE = "table"
    PARETO_TAIL = "pareto-tail"


@dataclass(frozen=True)
class RenewalLaw:
    """Law mu of the i.i.d. gaps between consecutive zeros, supported on {1, 2, ...}.

    ``c0`` is the universality-class exponent of the coarsening limit laws:
    1 whenever the gap law has finite mean, alpha for an alpha-heavy tail.
    Heavy tails are stored as a truncated table with the tail mass lumped
    into the last entry (simulation windows are finite anyway).
    """

    kind: RenewalKind
    table: np.ndarray  # pmf over gaps 1..len(table)
    c0: float = 1.0
    _label: str = field(default="", repr=False)

    def __post_init__(self) -> None:
        t = np.ascontiguousarray(self.table, dtype=np.float64)
        if t.ndim != 1 or t.size == 0 or np.any(t < 0):
            raise ValueError("pmf table must be a nonnegative 1-d array")
        if abs(t.sum() - 1.0) > 1e-12:
            raise ValueError(f"pmf mass {t.sum()} differs from 1 beyond 1e-12")
        if t[np.argmax(t > 0)] <= 0:
            raise ValueError("pmf has no support")
        if not 0.0 < self.c0 <= 1.0:
            raise ValueError("c0 must lie in (0, 1]")
        object.__setattr__(self, "table", t)
        self.table.setflags(write=False)

    # -- constructors ------------------------------------------------------

    @classmethod
    def point_mass(cls, d: int) -> "RenewalLaw":
        if d < 1:
            raise ValueError("gaps are at least 1")
        t = np.zeros(d)
        t[d - 1] = 1.0
        return cls(RenewalKind.POINT_MASS, t, 1.0, f"pointmass({d})")

    @classmethod
    def geometric(cls, r: float, cutoff: int = 4096) -> "RenewalLaw":
        """Geometric gaps, mu(k) = r (1-r)^(k-1); mean 1/r."""
        if not 0.0 < r < 1.0:
            raise ValueError("success probability must lie in (0, 1)")
        k = np.arange(1, cutoff + 1, dtype=np.float64)
        t = r * (1.0 - r) ** (k - 1.0)
        t[-1] = (1.0 - r) ** (cutoff - 1.0)  # lump the tail
        return cls(RenewalKind.GEOMETRIC, t, 1.0, f"geometric({r})")

    @classmethod
    def table_pmf(cls, weights) -> "RenewalLaw":
        w = np.asarray(weights, dtype=np.float64)
        return cls(RenewalKind.TABLE, w / w.sum(), 1.0, "table")

    @classmethod
    def pareto_tail(cls, alpha: float, cutoff: int = 4096) -> "RenewalLaw":
        """Heavy tail mu((x, infinity)) = x^-alpha: mu(k) = k^-alpha - (k+1)^-alpha.

        Equivalent in law to floor(U^(-1/alpha)) clipped at the cutoff; the
        mass beyond the cutoff sits in the last entry, so the table sums to 1
        exactly.  c0 = alpha.
        """
        if not 0.0 < alpha <= 1.0:
            raise ValueError("tail exponent alpha must lie in (0, 1]")
        k = np.arange(1, cutoff + 1, dtype=np.float64)
        t = k ** -alpha - (k + 1.0) ** -alpha
        t[-1] = cutoff ** -alpha
        return cls(RenewalKind.PARETO_TAIL, t, alpha, f"pareto({alpha})")

    # -- accessors ---------------------------------------------------------

    def pmf(self, k: int) -> float:
        if k < 1:
            return 0.0
        return float(self.table[k - 1]) if k <= self.table.size else 0.0

    @property
    def label(self) -> str:
        """Short printable name, stable enough for config records."""
        return self._label or self.kind.value

    @property
    def d_min(self) -> int:
        """Smallest gap with positive probability."""
        return int(np.argmax(self.table > 0)) + 1

    @property
    def n_d(self) -> int:
        """Smallest n with d_min in [2^(n-1)+1, 2^n]; 0 when d_min = 1."""
        d = self.d_min
        return 0 if d == 1 else math.ceil(math.log2(d))

    def mean(self) -> float:
        k = np.arange(1, self.table.size + 1, dtype=np.float64)
        return float(k @ self.table)

    def sample_gaps(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.choice(self.table.size, size=size, p=self.table) + 1


# --------------------------------------------------------------------------
# time scales
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TimeScale:
    """The ladder t_n = (1/q)^n with soft edges t_n^(1 -+ eps).

    The n-th active window is [t_n^-, t_n^+], the n-th stalling window is
    [t_n^+, t_{n+1}^-].  Conventions: t_0 = 1, t_0^- = 0, t_0^+ = (1/q)^eps.
    The windows are correctly ordered up to level n iff eps (2n + 1) < 1.
    """

    q: float
    epsilon: float = 0.1

    def __post_init__(self) -> None:
        if not 0.0 < self.q < 1.0:
            raise ValueError("q must lie in (0, 1)")
        if not 0.0 < self.epsilon < 0.5:
            raise ValueError("epsilon must lie in (0, 1/2)")

    def t(self, n: int) -> float:
        return (1.0 / self.q) ** n

    def t_minus(self, n: int) -> float:
        return 0.0 if n == 0 else self.t(n) ** (1.0 - self.epsilon)

    def t_plus(self, n: int) -> float:
        return (1.0 / self.q) ** (self.epsilon if n == 0 else n * (1.0 + self.epsilon))

    def active_window(self, n: int) -> tuple[float, float]:
        return self.t_minus(n), self.t_plus(n)

    def stalling_window(self, n: int) -> tuple[float, float]:
        return self.t_plus(n), self.t_minus(n + 1)

    def ordered_up_to(self, n_max: int) -> bool:
        """Whether t_n^- < t_n < t_n^+ < t_{n+1}^- holds for n = 1..n_max."""
        ok = True
        for n in range(1, n_max + 1):
            ok &= self.t_minus(n) < self.t(n) < self.t_plus(n) < self.t_minus(n + 1)
        return ok


# --------------------------------------------------------------------------
# random streams
# --------------------------------------------------------------------------

def replica_rng(seed: int, replica: int) -> np.random.Generator:
    """Independent stream for one replica's initial state, reproducible
    across schedulers."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(replica,))
    )


def dynamics_rng(seed: int, replica: int) -> np.random.Generator:
    """Independent stream for one replica's event-level randomness.

    Distinct from :func:`replica_rng` so that dynamics noise never aliases
    the draws that built the initial state.
    """
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(replica, 1))
    )


_SITE_KEY_SHIFT = 1 << 31  # spawn-key entries are uint32; recenter Z into range


def site_rng(seed: int, replica: int, site: int) -> np.random.Generator:
    """Independent stream for one (replica, site) pair.

    Keyed by the absolute site index, so two windows sharing sites draw the
    same ring times and coins for them -- the property behind the coupling
    and factorization checks.  Sites live in [-2^31, 2^31).
    """
    if not -_SITE_KEY_SHIFT <= site < _SITE_KEY_SHIFT:
        raise ValueError("site index outside the stream-key range")
    return np.random.default_rng(
        np.random.SeedSequence(
            entropy=seed, spawn_key=(replica, 0, site + _SITE_KEY_SHIFT)
        )
    )


# --------------------------------------------------------------------------
# initial-law samplers
# --------------------------------------------------------------------------

def sample_bernoulli_product(
    params_or_density,
    window: Interval,
    rng: np.random.Generator,
    boundary: Boundary = Boundary.FROZEN_ZERO_RIGHT,
) -> Configuration:
    """Product measure: each site independently occupied with the given probability.

    Passing :class:`ModelParams` draws the equilibrium measure (occupancy
    p = 1 - q); passing a float draws occupancy density alpha in (0, 1).
    """
    if isinstance(params_or_density, ModelParams):
        density = params_or_density.p
    else:
        density = float(params_or_density)
        if not 0.0 < density < 1.0:
            raise ValueError(f"occupancy density must lie in (0, 1), got {density}")
    occ = (rng.random(window.length) < density).astype(np.uint8)
    return Configuration.from_occupancy(window, occ, boundary)


def sample_renewal(
    mu: RenewalLaw,
    window: Interval,
    rng: np.random.Generator,
    boundary: Boundary = Boundary.FROZEN_ZERO_RIGHT,
) -> Configuration:
    """Renewal state: zero at the origin, i.i.d. gaps ~ mu, occupied elsewhere.

    The window must start at 0; there are no zeros left of the origin.
    """
    if window.a != 0:
        raise ValueError("renewal initial states are anchored at window.a = 0")
    occ = np.ones(window.length, np.uint8)
    x = 0
    # draw gaps in blocks; expected count is L / mean, pad generously
    block = max(16, int(window.length / max(mu.mean(), 1.0)) + 16)
    while x < window.length:
        occ[x] = 0
        for g in mu.sample_gaps(rng, block):
            x += int(g)
            if x >= window.length:
                break
            occ[x] = 0
        else:
            continue
        break
    return Configuration.from_occupancy(window, occ, boundary)
