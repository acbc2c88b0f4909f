"""Record (maximal) gaps in class sequences.

A gap between consecutive sequence elements is a record when it strictly
exceeds every earlier gap of the same sequence.  Two scanners produce
identical output: a streaming segmented-sieve scan, and a skip-ahead scan
that leaps by the current record and closes the straddling gap with
individual primality tests (fast when records are much longer than the
average gap).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from gaplab.analytic import hl_value
from gaplab.errors import InsufficientDataError, RangeError
from gaplab.kernel import (
    DEFAULT_SEGMENT_ODDS,
    MAX_LIMIT,
    ClassSpec,
    TuplePattern,
    first_element,
    is_prime,
    sequence_blocks,
    tuple_starts_upto,
)
from gaplab.totients import allowed_residues, golubev_phi


@dataclass
class GapRecord:
    """One maximal gap: the n-th record of its class sequence."""

    n: int
    gap: int
    start: int
    end: int
    spec: ClassSpec
    rescaled: dict[str, float] | None = field(default=None, compare=False)


def _records_from_class(values: np.ndarray, spec: ClassSpec, n0: int = 0) -> list[GapRecord]:
    """Running-maximum extraction over one sorted array of sequence elements."""
    if values.size < 2:
        return []
    d = np.diff(values)
    prior = np.maximum.accumulate(np.concatenate(([0], d)))[:-1]
    idx = np.flatnonzero(d > prior)
    return [
        GapRecord(n0 + j + 1, int(d[i]), int(values[i]), int(values[i + 1]), spec)
        for j, i in enumerate(idx.tolist())
    ]


def scan_records(
    spec: ClassSpec,
    limit: int,
    trend=None,
    method: str = "sieve",
    segment_odds: int = DEFAULT_SEGMENT_ODDS,
) -> list[GapRecord]:
    """All maximal gaps with end <= limit, ascending.

    The first candidate gap lies between the first two sequence elements; a
    gap straddling `limit` is excluded.  With `trend` given, each record is
    annotated with its rescaled values where they are defined.
    """
    if limit + spec.pattern.span > MAX_LIMIT:
        raise RangeError(f"limit {limit} too close to 2**63")
    if method == "sieve":
        records = _scan_sieve(spec, limit, segment_odds)
    elif method == "skip":
        records = _scan_skip(spec, limit)
    else:
        raise ValueError(f"unknown scan method {method!r}")
    if trend is not None:
        from gaplab.distfit import attach_rescaled

        attach_rescaled(records, trend)
    return records


def _scan_sieve(spec: ClassSpec, limit: int, segment_odds: int) -> list[GapRecord]:
    records: list[GapRecord] = []
    prev = -1
    cur_max = 0
    for block in sequence_blocks(spec, 1, limit, segment_odds):
        if prev < 0:
            if block.size == 1:
                prev = int(block[0])
                continue
            arr = block
            d = np.diff(arr)
            starts = arr[:-1]
            ends = arr[1:]
        else:
            arr = block
            d = np.diff(np.concatenate(([prev], arr)))
            starts = np.concatenate(([prev], arr[:-1]))
            ends = arr
        prior = np.maximum.accumulate(np.concatenate(([cur_max], d)))[:-1]
        for i in np.flatnonzero(d > prior).tolist():
            records.append(
                GapRecord(len(records) + 1, int(d[i]), int(starts[i]), int(ends[i]), spec)
            )
        cur_max = max(cur_max, int(d.max()))
        prev = int(arr[-1])
    return records


def _scan_skip(spec: ClassSpec, limit: int) -> list[GapRecord]:
    q = spec.q
    offsets = spec.pattern.offsets

    def elem(p: int) -> bool:
        return all(is_prime(p + d) for d in offsets)

    p = first_element(spec)
    if p > limit:
        return []
    records: list[GapRecord] = []
    rec = 0
    while True:
        m0 = p + rec
        pn = m0 + q
        while pn <= limit and not elem(pn):
            pn += q
        if pn > limit:
            break
        m = m0
        while not elem(m):
            m -= q
        g = pn - m
        if g > rec:
            rec = g
            records.append(GapRecord(len(records) + 1, g, m, pn, spec))
        p = pn
    return records


def cramer_ratio(record: GapRecord, prime_bound: int = 10**6) -> float:
    """Gap size divided by the generalized Cramer level phi/C * log^(k+1)(end)."""
    pattern = record.spec.pattern
    phi = golubev_phi(pattern, record.spec.q)
    c = hl_value(pattern, prime_bound)
    return record.gap / (phi / c * math.log(record.end) ** (pattern.k + 1))


# Above this limit the base sequence is not materialized; each modulus is
# re-scanned with bounded memory instead (intended for narrow q ranges).
MATERIALIZE_CAP = 300_000_000


def group_by_residue(values: np.ndarray, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Stable-sort values by residue mod q; returns (sorted values, class bounds).

    Class r occupies sorted[bounds[r]:bounds[r+1]], still ascending.
    """
    residues = values % q
    key = residues.astype(np.int32) if q < 2**31 else residues
    order = np.argsort(key, kind="stable")
    bounds = np.searchsorted(residues[order], np.arange(q + 1))
    return values[order], bounds


def records_by_class(
    pattern: TuplePattern,
    q: int,
    limit: int,
    residues: list[int] | None = None,
    segment_odds: int = DEFAULT_SEGMENT_ODDS,
) -> dict[int, list[GapRecord]]:
    """Record lists for every allowed residue class of one modulus, from a
    single streaming enumeration of the base sequence (memory stays bounded
    regardless of limit)."""
    if residues is None:
        residues = allowed_residues(pattern, q)
    specs = {r: ClassSpec(q, r, pattern) for r in residues}
    wanted = np.zeros(q, dtype=bool)
    for r in residues:
        wanted[r % q] = True
    prev = np.full(q, -1, dtype=np.int64)
    cur_max = np.zeros(q, dtype=np.int64)
    out: dict[int, list[GapRecord]] = {r: [] for r in residues}
    from gaplab.kernel import tuple_start_blocks

    for block in tuple_start_blocks(pattern, 1, limit, segment_odds):
        sorted_v, bounds = group_by_residue(block, q)
        present = np.flatnonzero(np.diff(bounds) > 0)
        for r in present.tolist():
            if not wanted[r]:
                continue
            vals = sorted_v[bounds[r] : bounds[r + 1]]
            if prev[r] >= 0:
                vals = np.concatenate(([prev[r]], vals))
            if vals.size >= 2:
                d = np.diff(vals)
                prior = np.maximum.accumulate(np.concatenate(([cur_max[r]], d)))[:-1]
                recs = out[r]
                for i in np.flatnonzero(d > prior).tolist():
                    recs.append(
                        GapRecord(
                            len(recs) + 1, int(d[i]), int(vals[i]), int(vals[i + 1]), specs[r]
                        )
                    )
                cur_max[r] = max(cur_max[r], int(d.max()))
            prev[r] = int(vals[-1])
    return out


def find_exceptions(
    pattern: TuplePattern,
    q_lo: int,
    q_hi: int,
    limit: int,
    prime_bound: int = 10**6,
    segment_odds: int = DEFAULT_SEGMENT_ODDS,
) -> list[tuple[GapRecord, float]]:
    """Every maximal gap above the generalized Cramer level, over all allowed
    classes for q in [q_lo, q_hi] with end <= limit.

    One base enumeration is shared across moduli (bucketed per q by a stable
    counting sort) as long as it fits in memory; past MATERIALIZE_CAP each
    modulus is scanned from a bounded-memory stream.  Ratios are exact
    float64 (well past 10 significant digits for k=1, where the constant
    is exactly 1).
    """
    c = hl_value(pattern, prime_bound)
    k = pattern.k
    out: list[tuple[GapRecord, float]] = []
    starts = tuple_starts_upto(pattern, limit, segment_odds) if limit <= MATERIALIZE_CAP else None
    for q in range(max(q_lo, 2), q_hi + 1):
        phi = golubev_phi(pattern, q)
        if phi == 0:
            continue
        level_factor = phi / c
        if starts is not None:
            sorted_v, bounds = group_by_residue(starts, q)
            for r in allowed_residues(pattern, q):
                vals = sorted_v[bounds[r] : bounds[r + 1]]
                if vals.size < 2:
                    continue
                d = np.diff(vals)
                prior = np.maximum.accumulate(np.concatenate(([0], d)))[:-1]
                rec_mask = d > prior
                g = d[rec_mask]
                ends = vals[1:][rec_mask]
                level = level_factor * np.log(ends.astype(np.float64)) ** (k + 1)
                exc = g > level
                if not exc.any():
                    continue
                spec = ClassSpec(q, r, pattern)
                rec_n = np.cumsum(rec_mask)[rec_mask]
                starts_rec = vals[:-1][rec_mask]
                for i in np.flatnonzero(exc).tolist():
                    record = GapRecord(
                        int(rec_n[i]), int(g[i]), int(starts_rec[i]), int(ends[i]), spec
                    )
                    out.append((record, float(g[i] / level[i])))
        else:
            per_class = records_by_class(pattern, q, limit, segment_odds=segment_odds)
            for r in sorted(per_class):
                for rec in per_class[r]:
                    level = level_factor * math.log(rec.end) ** (k + 1)
                    if rec.gap > level:
                        out.append((rec, rec.gap / level))
    return out


def inter_record_times(records: list[GapRecord]) -> list[tuple[int, int]]:
    """Distances between start points of consecutive records, as (n, distance)."""
    return [
        (b.n, b.start - a.start) for a, b in zip(records, records[1:])
    ]


def fit_log_slope(records: list[GapRecord], n_min: int = 1) -> float:
    """Least-squares slope of log(start) versus record index n, for n >= n_min."""
    pts = [(r.n, math.log(r.start)) for r in records if r.n >= n_min]
    if len(pts) < 2:
        raise InsufficientDataError(f"{len(pts)} records with n >= {n_min}; need >= 2")
    ns = np.array([p[0] for p in pts], dtype=np.float64)
    ys = np.array([p[1] for p in pts], dtype=np.float64)
    return float(np.polyfit(ns, ys, 1)[0])
