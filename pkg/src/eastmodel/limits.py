"""Limit laws of the coarsening rescaling: Laplace transforms and densities.

During the n-th stalling period the zeros of the chain have coalesced down
to a renewal process whose rescaled gap X (domain length over 2^n + 1)
converges, as n grows, to a law on [1, infinity) characterized by

    E exp(-s X) = 1 - exp{ -c0 E1(s) },      E1(s) = int_1^inf e^(-sx)/x dx,

with c0 = 1 for every finite-mean initial gap law and c0 = alpha for an
alpha-heavy tail.  The density expands as an alternating series

    p(x) = sum_k (-1)^(k+1) c0^k / k!  rho_k(x) 1{x >= k},

where rho_k integrates 1/(x1 ... x_{k-1} (x - sum x_i)) over gaps >= 1;
rho_1 = 1/x and rho_2 = (2/x) log(x - 1) are closed forms, rho_3 is a
bounded two-dimensional quadrature (the support keeps every factor >= 1),
and k >= 4 is out of scope: the Laplace transform is the exact, cheap
object and the density a diagnostic.

The companion first-zero rescaling has a formally divergent transform,
1 - exp{-c0 int_0^1 e^(-sx)/x dx}: the integral blows up logarithmically at
0.  :func:`laplace_Y` therefore refuses to evaluate unless asked for the
compensated version, which replaces the integrand by (e^(-sx) - 1)/x,
equal to -Ein(s) = -(gamma + log s + E1(s)); which log-compensation the
original object carries is not something this module guesses.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import exp1

__all__ = [
    "EULER_GAMMA",
    "LimitKind",
    "LimitLaw",
    "exp_integral_E1",
    "laplace_X",
    "laplace_Y",
    "density_p",
    "alternating_differences_ok",
]

EULER_GAMMA = float(np.euler_gamma)
_QUAD_TOL = 1e-6  # absolute budget per density term


def _check_c0(c0: float) -> None:
    if not 0.0 < c0 <= 1.0:
        raise ValueError(f"c0 must lie in (0, 1], got {c0}")


def exp_integral_E1(s):
    """E1(s) = int_1^inf e^(-sx)/x dx for s > 0; scalar in, scalar out."""
    arr = np.asarray(s, dtype=np.float64)
    if np.any(arr <= 0):
        raise ValueError("E1 needs s > 0")
    out = exp1(arr)
    return float(out) if np.isscalar(s) or arr.ndim == 0 else out


def laplace_X(s, c0: float = 1.0):
    """E exp(-s X) = 1 - exp{-c0 E1(s)} of the limiting domain length.

    Defined for s >= 0; the value at 0 is the total mass 1, reached as the
    s -> 0 limit since E1 diverges there.
    """
    _check_c0(c0)
    arr = np.asarray(s, dtype=np.float64)
    if np.any(arr < 0):
        raise ValueError("Laplace variable must be nonnegative")
    out = np.where(arr == 0.0, 1.0, 1.0 - np.exp(-c0 * exp1(np.where(arr > 0, arr, 1.0))))
    return float(out) if np.isscalar(s) or arr.ndim == 0 else out


def laplace_Y(s, c0: float = 1.0, regularized: bool = False):
    """Formal transform of the rescaled first-zero position.

    As written, the defining integral int_0^1 e^(-sx)/x dx diverges, so the
    plain call refuses.  With ``regularized=True`` the compensated integrand
    (e^(-sx) - 1)/x is used instead, giving 1 - exp{c0 Ein(s)} with
    Ein(s) = gamma + log s + E1(s); this differs from the intended law by
    the dropped logarithmic constant and is negative for s > 0 -- it is a
    number for cross-implementation comparison, not a probability.
    """
    _check_c0(c0)
    if not regularized:
        raise ValueError(
            "the first-zero transform diverges as written; "
            "pass regularized=True for the compensated evaluation"
        )
    arr = np.asarray(s, dtype=np.float64)
    if np.any(arr <= 0):
        raise ValueError("the compensated transform needs s > 0")
    ein = EULER_GAMMA + np.log(arr) + exp1(arr)
    out = 1.0 - np.exp(c0 * ein)
    return float(out) if np.isscalar(s) or arr.ndim == 0 else out


def _rho3(x: float) -> float:
    # gaps x1, x2 and the remainder x - x1 - x2 all at least 1, so the
    # integrand 1/(x1 x2 (x - x1 - x2)) is bounded by 1 on the region
    if x < 3.0:
        return 0.0
    val, err = integrate.dblquad(
        lambda x2, x1: 1.0 / (x1 * x2 * (x - x1 - x2)),
        1.0,
        x - 2.0,
        lambda x1: 1.0,
        lambda x1: x - 1.0 - x1,
        epsabs=1e-9,
    )
    if err > _QUAD_TOL:
        raise RuntimeError(f"rho_3 quadrature error {err:.2e} exceeds {_QUAD_TOL:.0e}")
    return val


def density_p(x: float, c0: float = 1.0, K: int = 3) -> float:
    """Truncated density of the limiting domain length at x >= 1.

    Partial sum of the alternating series to order K <= 3; each term is
    evaluated to absolute accuracy 1e-6 or better (rho_1, rho_2 are closed
    forms, rho_3 is quadrature with an enforced error budget).
    """
    _check_c0(c0)
    if x < 1.0:
        raise ValueError("the limiting domain length is supported on [1, infinity)")
    if not 1 <= K <= 3:
        raise ValueError("truncation order K must lie in 1..3")
    total = c0 / x
    if K >= 2 and x >= 2.0:
        total -= (c0 ** 2 / 2.0) * (2.0 / x) * math.log(x - 1.0)
    if K >= 3 and x >= 3.0:
        total += (c0 ** 3 / 6.0) * _rho3(x)
    return total


def alternating_differences_ok(values, orders: int = 4, tol: float = 1e-12) -> bool:
    """Complete-monotonicity fingerprint on an equally spaced grid.

    Checks that the finite differences of orders 1..``orders`` alternate in
    sign, (-1)^m diff^m >= -tol.  Necessary for a completely monotone
    function; used as a sanity gate on Laplace-transform grids.
    """
    v = np.asarray(values, dtype=np.float64)
    for m in range(1, min(orders, v.size - 1) + 1):
        d = np.diff(v, m)
        if np.any((-1.0) ** m * d < -tol):
            return False
    return True


class LimitKind(enum.Enum):
    DOMAIN_LENGTH = "domain-length"
    FIRST_ZERO = "first-zero"


@dataclass(frozen=True)
class LimitLaw:
    """A coarsening limit law: exponent c0, which rescaled variable, and
    whether the divergent first-zero transform may be evaluated in its
    compensated form."""

    c0: float
    kind: LimitKind
    regularized: bool = False

    def __post_init__(self) -> None:
        _check_c0(self.c0)

    def laplace(self, s):
        if self.kind is LimitKind.DOMAIN_LENGTH:
            return laplace_X(s, self.c0)
        return laplace_Y(s, self.c0, regularized=self.regularized)

    def density(self, x: float, K: int = 3) -> float:
        if self.kind is not LimitKind.DOMAIN_LENGTH:
            raise ValueError("only the domain-length law has the series density")
        return density_p(x, self.c0, K)

    def mean(self) -> float:
        """E X for the domain-length law: exp(gamma) at c0 = 1, infinite below.

        From L'(s) = -c0 exp(-c0 E1(s)) e^(-s)/s and E1(s) = -gamma - log s
        + O(s), the derivative at 0 is finite exactly when c0 = 1.
        """
        if self.kind is not LimitKind.DOMAIN_LENGTH:
            raise ValueError("mean is implemented for the domain-length law")
        return math.exp(EULER_GAMMA) if self.c0 == 1.0 else math.inf
