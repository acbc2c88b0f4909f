"""Euler's totient and Golubev's pattern totients.

Golubev's totient counts residue classes r (mod q) with gcd(r + d, q) = 1
for every offset d of a tuple pattern; it is multiplicative in q, with the
prime-power factor p^(e-1) * (p - w(p)) where w(p) is the number of
distinct forbidden residues -d mod p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from gaplab.kernel import TuplePattern, is_prime


@dataclass
class TotientResult:
    q: int
    pattern: TuplePattern
    value: int
    allowed: list[int] | None = None


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization by trial division, (prime, exponent) pairs."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out: list[tuple[int, int]] = []
    for p in (2, 3):
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e:
            out.append((p, e))
    f = 5
    while f * f <= n:
        if is_prime(n):
            break
        for p in (f, f + 2):
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            if e:
                out.append((p, e))
        f += 6
    if n > 1:
        out.append((n, 1))
    return out


def euler_phi(q: int) -> int:
    """Euler's totient via factorization."""
    phi = 1
    for p, e in factorize(q):
        phi *= p ** (e - 1) * (p - 1)
    return phi


def pattern_omega(pattern: TuplePattern, p: int) -> int:
    """Number of distinct residues -d mod p over the pattern offsets."""
    return len({(-d) % p for d in pattern.offsets})


def golubev_phi(pattern: TuplePattern, q: int) -> int:
    """Pattern totient via the multiplicative prime-power formula."""
    if q == 1:
        return 1
    value = 1
    for p, e in factorize(q):
        w = pattern_omega(pattern, p)
        if w >= p:
            return 0
        value *= p ** (e - 1) * (p - w)
    return value


def golubev_phi_scan(pattern: TuplePattern, q: int) -> int:
    """Pattern totient straight from the definition (independent of factorization)."""
    return len(allowed_residues(pattern, q))


def allowed_residues(pattern: TuplePattern, q: int) -> list[int]:
    """All r in [1, q] with gcd(r + d, q) = 1 for every offset d."""
    if q == 1:
        return [1]
    span = pattern.span
    coprime = np.gcd(np.arange(1, q + span + 1, dtype=np.int64), q) == 1
    ok = coprime[:q].copy()
    for d in pattern.offsets[1:]:
        ok &= coprime[d : q + d]
    return (np.flatnonzero(ok) + 1).tolist()


def totient_result(pattern: TuplePattern, q: int, residues: bool = False) -> TotientResult:
    """Bundle the totient value with (optionally) the allowed residue list."""
    if residues:
        allowed = allowed_residues(pattern, q)
        return TotientResult(q, pattern, len(allowed), allowed)
    return TotientResult(q, pattern, golubev_phi(pattern, q))


def euler_phi_table(limit: int) -> np.ndarray:
    """phi(q) for all q in [0, limit] by a sieve; handy for bulk cross-checks."""
    phi = np.arange(limit + 1, dtype=np.int64)
    for p in range(2, limit + 1):
        if phi[p] == p:  # p prime
            phi[p::p] -= phi[p::p] // p
    return phi


__all__ = [
    "TotientResult",
    "allowed_residues",
    "euler_phi",
    "euler_phi_table",
    "factorize",
    "golubev_phi",
    "golubev_phi_scan",
    "pattern_omega",
    "totient_result",
]
