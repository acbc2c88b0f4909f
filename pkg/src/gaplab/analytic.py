"""Special functions and tuple-density constants.

li(x) comes from the rapidly converging series
gamma + log log x + sum_n log^n x / (n * n!), whose terms are all positive,
so no cancellation occurs.  li_k(x) = integral from 2 to x of dt / log^k t
is evaluated through the closed antiderivative obtained by integrating by
parts, expressed with li.  Hardy-Littlewood tuple-density constants use the
singular-series product over primes with an analytic tail correction.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from gaplab.errors import DomainError
from gaplab.kernel import TuplePattern, is_admissible, primes_upto
from gaplab.totients import golubev_phi, pattern_omega

EULER_GAMMA = 0.57721566490153286060651209

_LI_EPS = 1e-17
_LI_MAX_TERMS = 10_000


def li(x: float) -> float:
    """Principal-value logarithmic integral, relative error ~1e-14 on [2, 1e15]."""
    if x <= 1.0:
        raise DomainError(f"li(x) requires x > 1, got {x}")
    L = math.log(x)
    terms = []
    u = 1.0
    total = 0.0
    for n in range(1, _LI_MAX_TERMS):
        u *= L / n
        t = u / n
        terms.append(t)
        total += t
        if t < _LI_EPS * total and n > L:
            break
    return EULER_GAMMA + math.log(L) + math.fsum(terms)


def _f_antideriv(x: float, k: int) -> float:
    # Antiderivative of 1/log^k with the integration constant dropped.
    if k == 1:
        return li(x)
    L = math.log(x)
    s = 0.0
    for j in range(1, k):
        s += math.factorial(k - 1 - j) * L ** (j - 1)
    return (li(x) - x / L ** (k - 1) * s) / math.factorial(k - 1)


@functools.lru_cache(maxsize=None)
def _f_at_2(k: int) -> float:
    return _f_antideriv(2.0, k)


def li_k(x: float, k: int) -> float:
    """Integral of dt / log^k t from 2 to x, for 1 <= k <= 7."""
    if not 1 <= k <= 7:
        raise DomainError(f"li_k supports 1 <= k <= 7, got k={k}")
    if x < 2:
        raise DomainError(f"li_k(x) requires x >= 2, got {x}")
    if x == 2:
        return 0.0
    return _f_antideriv(float(x), k) - _f_at_2(k)


@dataclass
class HLConstant:
    """Truncated singular-series tuple-density constant with its error estimate."""

    pattern: TuplePattern
    value: float
    prime_bound: int
    est_error: float


def hl_constant(pattern: TuplePattern, prime_bound: int = 10**6) -> HLConstant:
    """Tuple-density constant: product over primes of (1 - w(p)/p) / (1 - 1/p)^k.

    Truncated at prime_bound, then corrected by the analytic estimate of the
    log-product tail -(k^2 - k)/2 * sum_{p > bound} 1/p^2 (the 1/p terms
    cancel beyond the pattern span).  est_error is the magnitude of that
    correction on the value scale.
    """
    k = pattern.k
    if k == 1:
        return HLConstant(pattern, 1.0, prime_bound, 0.0)
    if prime_bound < 1000:
        raise DomainError(f"prime_bound must be >= 1000, got {prime_bound}")
    if not is_admissible(pattern):
        raise DomainError(f"pattern {pattern} is not admissible; constant vanishes")
    primes = primes_upto(prime_bound)
    cut = int(np.searchsorted(primes, pattern.span, side="right"))
    log_c = 0.0
    for p in primes[:cut].tolist():
        w = pattern_omega(pattern, p)
        log_c += math.log1p(-w / p) - k * math.log1p(-1.0 / p)
    pf = primes[cut:].astype(np.float64)
    log_c += float(np.sum(np.log1p(-k / pf) - k * np.log1p(-1.0 / pf)))

    # sum_{p > P} p^-2 ~ integral dt / (t^2 log t), expanded asymptotically
    P = float(prime_bound)
    LP = math.log(P)
    s2 = (1.0 / LP - 1.0 / LP**2 + 2.0 / LP**3 - 6.0 / LP**4) / P
    s3 = 1.0 / (2.0 * P**2 * LP)
    tail = -(k * k - k) / 2.0 * s2 - (k**3 - k) / 3.0 * s3
    value = math.exp(log_c + tail)
    return HLConstant(pattern, value, prime_bound, abs(value * tail))


@functools.lru_cache(maxsize=None)
def hl_value(pattern: TuplePattern, prime_bound: int = 10**6) -> float:
    """Cached constant value for trend and threshold formulas."""
    return hl_constant(pattern, prime_bound).value


def expected_sequence_count(
    pattern: TuplePattern, q: int, x: float, prime_bound: int = 10**6
) -> float:
    """Equidistribution estimate of how many sequence elements are <= x:
    constant / pattern-totient * li_k(x)."""
    if x < 2:
        raise DomainError(f"x must be >= 2, got {x}")
    phi = golubev_phi(pattern, q)
    if phi == 0:
        return 0.0
    return hl_value(pattern, prime_bound) / phi * li_k(float(x), pattern.k)
