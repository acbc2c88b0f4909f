"""Primes and prime k-tuples in residue classes.

Deterministic 64-bit primality, segmented sieving, admissible offset
patterns, and enumeration of the sequences everything else is built on:
primes p = r (mod q) such that p + d is prime for every offset d of a
pattern.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from gaplab.errors import InvalidClassError, RangeError

MAX_LIMIT = 2**63 - 1

# Number of odd integers per sieve segment (a segment spans twice as many integers).
DEFAULT_SEGMENT_ODDS = 1 << 20

# Witnesses proving deterministic Miller-Rabin for all n < 3.3e24 > 2^64.
_MR_BASES = (2, 325, 9375, 28178, 450775, 9780504, 1795265022)
_TRIAL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic primality test for 0 <= n < 2**64."""
    if n < 2:
        return False
    for p in _TRIAL_PRIMES:
        if n % p == 0:
            return n == p
    if n >= 1 << 64:
        raise RangeError("is_prime is deterministic only below 2**64")
    d = n - 1
    s = (d & -d).bit_length() - 1
    d >>= s
    for a in _MR_BASES:
        a %= n
        if a == 0:
            continue
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class TuplePattern:
    """Offset pattern (0, d2, ..., dk) defining a prime k-tuple shape."""

    offsets: tuple[int, ...]

    def __post_init__(self) -> None:
        offs = tuple(int(d) for d in self.offsets)
        object.__setattr__(self, "offsets", offs)
        if not offs or offs[0] != 0:
            raise ValueError("pattern offsets must start at 0")
        if any(b <= a for a, b in zip(offs, offs[1:])):
            raise ValueError("pattern offsets must be strictly increasing")
        if offs[-1] < 0:
            raise ValueError("pattern offsets must be non-negative")

    @property
    def k(self) -> int:
        return len(self.offsets)

    @property
    def span(self) -> int:
        return self.offsets[-1]

    def __str__(self) -> str:
        return "(" + ",".join(str(d) for d in self.offsets) + ")"


def is_admissible(pattern: TuplePattern) -> bool:
    """True iff no prime p <= k sees all residue classes among the offsets.

    For p > k the k offsets cannot cover p classes, so only small primes
    need checking.
    """
    for p in range(2, pattern.k + 1):
        if is_prime(p) and len({d % p for d in pattern.offsets}) == p:
            return False
    return True


# Densest admissible patterns for k <= 7; the k = 3, 5, 7 shapes come in
# mirror pairs sharing the same totients and tuple-density constants.
PATTERNS: dict[str, TuplePattern] = {
    "k1": TuplePattern((0,)),
    "twin": TuplePattern((0, 2)),
    "triplet-a": TuplePattern((0, 2, 6)),
    "triplet-b": TuplePattern((0, 4, 6)),
    "quad": TuplePattern((0, 2, 6, 8)),
    "quint-a": TuplePattern((0, 2, 6, 8, 12)),
    "quint-b": TuplePattern((0, 4, 6, 10, 12)),
    "sext": TuplePattern((0, 4, 6, 10, 12, 16)),
    "sept-a": TuplePattern((0, 2, 6, 8, 12, 18, 20)),
    "sept-b": TuplePattern((0, 2, 8, 12, 14, 18, 20)),
}

K1 = PATTERNS["k1"]
TWIN = PATTERNS["twin"]


def parse_pattern(text: str) -> TuplePattern:
    """Parse a named pattern ('twin', 'quad', ...) or a comma list ('0,2,6')."""
    name = text.strip().lower()
    if name in PATTERNS:
        return PATTERNS[name]
    try:
        offsets = tuple(int(part) for part in name.split(","))
    except ValueError:
        raise ValueError(f"unknown pattern {text!r}") from None
    return TuplePattern(offsets)


def is_h_allowed(q: int, r: int, pattern: TuplePattern) -> bool:
    """True iff gcd(r + d, q) == 1 for every offset d."""
    return all(math.gcd(r + d, q) == 1 for d in pattern.offsets)


@dataclass(frozen=True)
class ClassSpec:
    """A residue class r (mod q) together with a tuple pattern.

    The residue is normalized into [1, q]; construction fails unless the
    class is allowed for the pattern (all r + d coprime to q).
    """

    q: int
    r: int
    pattern: TuplePattern = K1

    def __post_init__(self) -> None:
        if self.q < 2:
            raise InvalidClassError(f"modulus must be >= 2, got {self.q}")
        r = self.r % self.q
        if r == 0:
            r = self.q
        object.__setattr__(self, "r", r)
        if not is_h_allowed(self.q, r, self.pattern):
            raise InvalidClassError(
                f"residue {r} (mod {self.q}) is not allowed for pattern {self.pattern}"
            )

    @property
    def k(self) -> int:
        return self.pattern.k


def _simple_sieve(limit: int) -> np.ndarray:
    """All primes <= limit via a plain sieve; used for base primes."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def _check_range(hi: int, span: int = 0) -> None:
    if hi + span > MAX_LIMIT:
        raise RangeError(f"limit {hi} + span {span} exceeds 2**63 - 1")


def prime_blocks(
    lo: int, hi: int, segment_odds: int = DEFAULT_SEGMENT_ODDS
) -> Iterator[np.ndarray]:
    """Yield ascending int64 blocks that together hold every prime in [lo, hi]."""
    _check_range(hi)
    if hi < lo or hi < 2:
        return
    lo = max(lo, 2)
    if lo <= 2:
        yield np.array([2], dtype=np.int64)
    base = _simple_sieve(math.isqrt(hi))
    base_odd = base[1:]
    base_sq = base_odd * base_odd
    a = lo if lo % 2 else lo + 1
    a = max(a, 3)
    span = 2 * segment_odds
    while a <= hi:
        b = min(a + span - 2, hi if hi % 2 else hi - 1)
        n = (b - a) // 2 + 1
        mask = np.ones(n, dtype=bool)
        live = base_odd[base_sq <= b]
        if live.size:
            first = ((a + live - 1) // live) * live
            first = np.maximum(first, live * live)
            first += (first % 2 == 0) * live
            idx = (first - a) >> 1
            for p, i in zip(live.tolist(), idx.tolist()):
                if i < n:
                    mask[i::p] = False
        yield a + 2 * np.flatnonzero(mask).astype(np.int64)
        a = b + 2


def tuple_start_blocks(
    pattern: TuplePattern, lo: int, hi: int, segment_odds: int = DEFAULT_SEGMENT_ODDS
) -> Iterator[np.ndarray]:
    """Yield blocks of all p in [lo, hi] such that p + d is prime for every offset d.

    One sieve pass over [lo, hi + span]; each segment is sieved with a small
    overlap so tuple membership never crosses an unknown boundary.
    """
    if pattern.k == 1:
        yield from prime_blocks(lo, hi, segment_odds)
        return
    if any(d % 2 for d in pattern.offsets[1:]):
        # Odd offsets never form an admissible pattern with offset 0.
        return
    _check_range(hi, pattern.span)
    if hi < lo or hi < 2:
        return
    lo = max(lo, 2)
    shifts = [d >> 1 for d in pattern.offsets]
    dmax = pattern.span
    base = _simple_sieve(math.isqrt(hi + dmax))
    base_odd = base[1:]
    base_sq = base_odd * base_odd
    a = lo if lo % 2 else lo + 1
    a = max(a, 3)
    span = 2 * segment_odds
    while a <= hi:
        b = min(a + span - 2, hi if hi % 2 else hi - 1)
        n = (b - a) // 2 + 1
        m = n + (dmax >> 1)  # sieve past b so p + span is covered
        top = a + 2 * (m - 1)
        mask = np.ones(m, dtype=bool)
        live = base_odd[base_sq <= top]
        if live.size:
            first = ((a + live - 1) // live) * live
            first = np.maximum(first, live * live)
            first += (first % 2 == 0) * live
            idx = (first - a) >> 1
            for p, i in zip(live.tolist(), idx.tolist()):
                if i < m:
                    mask[i::p] = False
        ok = mask[:n].copy()
        for s in shifts[1:]:
            ok &= mask[s : n + s]
        yield a + 2 * np.flatnonzero(ok).astype(np.int64)
        a = b + 2


def sequence_blocks(
    spec: ClassSpec, lo: int, hi: int, segment_odds: int = DEFAULT_SEGMENT_ODDS
) -> Iterator[np.ndarray]:
    """Yield blocks of the class sequence: tuple starts p = r (mod q) in [lo, hi]."""
    r = spec.r % spec.q
    for block in tuple_start_blocks(spec.pattern, lo, hi, segment_odds):
        sel = block[block % spec.q == r]
        if sel.size:
            yield sel


def iter_sequence(
    spec: ClassSpec, lo: int, hi: int, segment_odds: int = DEFAULT_SEGMENT_ODDS
) -> Iterator[int]:
    """Stream the class sequence in [lo, hi] as Python ints, ascending."""
    for block in sequence_blocks(spec, lo, hi, segment_odds):
        yield from block.tolist()


def count_sequence(spec: ClassSpec, x: int, segment_odds: int = DEFAULT_SEGMENT_ODDS) -> int:
    """Exact count of sequence elements <= x."""
    return sum(b.size for b in sequence_blocks(spec, 1, x, segment_odds))


def pmin(q: int, r: int) -> int:
    """Least prime p = r (mod q); rejects classes with gcd(q, r) > 1."""
    if q < 1:
        raise InvalidClassError(f"modulus must be >= 1, got {q}")
    r = r % q or q
    if math.gcd(q, r) != 1:
        raise InvalidClassError(f"gcd({q}, {r}) > 1: class holds at most one prime")
    p = r
    while not is_prime(p):
        p += q
    return p


def first_element(spec: ClassSpec) -> int:
    """Least element of the class sequence (least prime starting the tuple)."""
    p = spec.r
    while not all(is_prime(p + d) for d in spec.pattern.offsets):
        p += spec.q
    return p


_cache_limit = 0
_cache_primes = np.zeros(0, dtype=np.int64)

# primes_upto materializes its result; cap it so callers reach for the
# streaming block API instead of exhausting memory.
MAX_MATERIALIZE = 2_000_000_000


def primes_upto(limit: int) -> np.ndarray:
    """All primes <= limit as one int64 array (cached, grow-only)."""
    global _cache_limit, _cache_primes
    if limit > MAX_MATERIALIZE:
        raise RangeError(f"refusing to materialize primes up to {limit}; use prime_blocks")
    if limit <= _cache_limit:
        arr = _cache_primes
        return arr[: int(np.searchsorted(arr, limit, side="right"))]
    blocks = list(prime_blocks(2, limit))
    arr = np.concatenate(blocks) if blocks else np.zeros(0, dtype=np.int64)
    _cache_limit, _cache_primes = limit, arr
    return arr


def tuple_starts_upto(
    pattern: TuplePattern, limit: int, segment_odds: int = DEFAULT_SEGMENT_ODDS
) -> np.ndarray:
    """All tuple starts <= limit, materialized (cached for the plain-prime pattern)."""
    if pattern.k == 1:
        return primes_upto(limit)
    blocks = list(tuple_start_blocks(pattern, 2, limit, segment_odds))
    return np.concatenate(blocks) if blocks else np.zeros(0, dtype=np.int64)
