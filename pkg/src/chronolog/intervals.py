"""Exact rational time points, open/closed intervals, and interval sets.

All arithmetic is exact: endpoints are arbitrary-precision rationals
(`fractions.Fraction`) extended with the two symbolic infinities. Interval
sets are kept canonical (sorted, pairwise disjoint, non-adjacent), which
makes structural equality coincide with point-set equality.

The two temporal operator applications live here as well:

* ``diamond_minus_apply(i, rho)`` -- the set ``{t : exists s in i with
  t - s in rho}``, i.e. the Minkowski sum ``i + rho``.
* ``box_minus_apply(i, rho)`` -- the set ``{t : forall s with t - s in
  rho, s in i}``.  Endpoint openness is decided by evaluating the
  pointwise condition at the candidate endpoints rather than by a
  hand-written flag table.
"""

from __future__ import annotations

import math
import re
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Iterator, Union

RationalLike = Union[int, Fraction, str]


@dataclass(frozen=True, slots=True)
class TimePoint:
    """A rational number extended with -inf / +inf.

    ``inf`` is -1, 0, or +1; ``value`` is only meaningful when ``inf == 0``.
    Comparisons are total; arithmetic follows extended-rational rules and
    raises on the undefined combination inf - inf.
    """

    value: Fraction
    inf: int = 0

    def __post_init__(self):
        if self.inf not in (-1, 0, 1):
            raise ValueError(f"invalid infinity sign {self.inf!r}")
        if self.inf != 0 and self.value != 0:
            object.__setattr__(self, "value", Fraction(0))
        if self.inf == 0 and not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", Fraction(self.value))

    @classmethod
    def of(cls, x: TimePoint | RationalLike) -> TimePoint:
        if type(x) is TimePoint:
            return x
        if isinstance(x, str):
            s = x.strip()
            if s in ("inf", "+inf"):
                return POS_INF
            if s == "-inf":
                return NEG_INF
            return cls(Fraction(s))
        return cls(Fraction(x))

    @property
    def is_finite(self) -> bool:
        return self.inf == 0

    def as_fraction(self) -> Fraction:
        if self.inf != 0:
            raise ValueError("infinite time point has no rational value")
        return self.value

    def __str__(self) -> str:
        if self.inf > 0:
            return "inf"
        if self.inf < 0:
            return "-inf"
        return str(self.value)

    def __repr__(self) -> str:
        return f"TimePoint({self})"

    # comparisons are hand-rolled: they sit on the hot path of every
    # interval operation, so avoid total_ordering and ABC dispatch
    def __eq__(self, other):
        if type(other) is not TimePoint:
            if isinstance(other, (int, Fraction)):
                other = TimePoint(Fraction(other))
            else:
                return NotImplemented
        return self.inf == other.inf and self.value == other.value

    def __lt__(self, other):
        if type(other) is not TimePoint:
            if isinstance(other, (int, Fraction)):
                other = TimePoint(Fraction(other))
            else:
                return NotImplemented
        if self.inf != other.inf:
            return self.inf < other.inf
        return self.inf == 0 and self.value < other.value

    def __le__(self, other):
        if type(other) is not TimePoint:
            if isinstance(other, (int, Fraction)):
                other = TimePoint(Fraction(other))
            else:
                return NotImplemented
        if self.inf != other.inf:
            return self.inf < other.inf
        return self.inf != 0 or self.value <= other.value

    def __gt__(self, other):
        le = self.__le__(other)
        return NotImplemented if le is NotImplemented else not le

    def __ge__(self, other):
        lt = self.__lt__(other)
        return NotImplemented if lt is NotImplemented else not lt

    def __hash__(self) -> int:
        return hash((self.inf, self.value))

    def __add__(self, other: TimePoint | RationalLike) -> TimePoint:
        other = TimePoint.of(other)
        if self.inf and other.inf:
            if self.inf != other.inf:
                raise ValueError("undefined sum inf + -inf")
            return self
        if self.inf:
            return self
        if other.inf:
            return other
        return TimePoint(self.value + other.value)

    def __radd__(self, other: RationalLike) -> TimePoint:
        return self + other

    def __neg__(self) -> TimePoint:
        if self.inf:
            return TimePoint(Fraction(0), -self.inf)
        return TimePoint(-self.value)

    def __sub__(self, other: TimePoint | RationalLike) -> TimePoint:
        return self + (-TimePoint.of(other))

    def __mul__(self, other: RationalLike) -> TimePoint:
        k = Fraction(other)
        if self.inf:
            if k == 0:
                raise ValueError("undefined product 0 * inf")
            return TimePoint(Fraction(0), self.inf if k > 0 else -self.inf)
        return TimePoint(self.value * k)


NEG_INF = TimePoint(Fraction(0), -1)
POS_INF = TimePoint(Fraction(0), 1)


@dataclass(frozen=True, slots=True)
class Interval:
    """A non-empty interval over the extended rational line.

    Infinite endpoints are forced open on construction (there is no point
    at infinity to include). Construction of an empty interval raises;
    operations that may produce the empty set return ``None`` instead.
    """

    lo: TimePoint
    hi: TimePoint
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self):
        object.__setattr__(self, "lo", TimePoint.of(self.lo))
        object.__setattr__(self, "hi", TimePoint.of(self.hi))
        if not self.lo.is_finite:
            object.__setattr__(self, "lo_open", True)
        if not self.hi.is_finite:
            object.__setattr__(self, "hi_open", True)
        if self.lo > self.hi or (
            self.lo == self.hi and (self.lo_open or self.hi_open)
        ):
            raise ValueError(f"empty interval {self._render()}")

    @classmethod
    def closed(cls, lo: RationalLike, hi: RationalLike) -> Interval:
        return cls(TimePoint.of(lo), TimePoint.of(hi))

    @classmethod
    def point(cls, t: RationalLike) -> Interval:
        tp = TimePoint.of(t)
        return cls(tp, tp)

    @classmethod
    def ray_from(cls, lo: RationalLike, lo_open: bool = False) -> Interval:
        return cls(TimePoint.of(lo), POS_INF, lo_open, True)

    @classmethod
    def up_to(cls, hi: RationalLike, hi_open: bool = False) -> Interval:
        return cls(NEG_INF, TimePoint.of(hi), True, hi_open)

    @property
    def is_bounded(self) -> bool:
        return self.lo.is_finite and self.hi.is_finite

    @property
    def is_punctual(self) -> bool:
        return self.lo == self.hi

    def length(self) -> TimePoint:
        if not self.is_bounded:
            return POS_INF
        return TimePoint(self.hi.value - self.lo.value)

    def contains(self, t: TimePoint | RationalLike) -> bool:
        t = TimePoint.of(t)
        if t < self.lo or (t == self.lo and self.lo_open):
            return False
        if t > self.hi or (t == self.hi and self.hi_open):
            return False
        return True

    def contains_interval(self, other: Interval) -> bool:
        lo_ok = other.lo > self.lo or (
            other.lo == self.lo and (not self.lo_open or other.lo_open)
        )
        hi_ok = other.hi < self.hi or (
            other.hi == self.hi and (not self.hi_open or other.hi_open)
        )
        return lo_ok and hi_ok

    def intersect(self, other: Interval) -> Interval | None:
        if self.lo > other.lo:
            lo, lo_open = self.lo, self.lo_open
        elif self.lo < other.lo:
            lo, lo_open = other.lo, other.lo_open
        else:
            lo, lo_open = self.lo, self.lo_open or other.lo_open
        if self.hi < other.hi:
            hi, hi_open = self.hi, self.hi_open
        elif self.hi > other.hi:
            hi, hi_open = other.hi, other.hi_open
        else:
            hi, hi_open = self.hi, self.hi_open or other.hi_open
        if lo > hi or (lo == hi and (lo_open or hi_open)):
            return None
        return Interval(lo, hi, lo_open, hi_open)

    def clip(self, window: Interval) -> Interval | None:
        return self.intersect(window)

    def shift(self, d: RationalLike) -> Interval:
        d = Fraction(d)
        return Interval(self.lo + d, self.hi + d, self.lo_open, self.hi_open)

    def minkowski(self, other: Interval) -> Interval:
        """Endpoint-wise sum; an endpoint is closed iff both summands are."""
        return Interval(
            self.lo + other.lo,
            self.hi + other.hi,
            self.lo_open or other.lo_open,
            self.hi_open or other.hi_open,
        )

    def negate(self) -> Interval:
        return Interval(-self.hi, -self.lo, self.hi_open, self.lo_open)

    def overlaps_or_touches(self, other: Interval) -> bool:
        """True when the union of the two intervals is a single interval."""
        a, b = (self, other) if (self.lo, self.lo_open) <= (other.lo, other.lo_open) else (other, self)
        if b.lo < a.hi:
            return True
        if b.lo == a.hi:
            return not (a.hi_open and b.lo_open)
        return False

    def hull(self, other: Interval) -> Interval:
        if (self.lo, self.lo_open) <= (other.lo, other.lo_open):
            lo, lo_open = self.lo, self.lo_open
        else:
            lo, lo_open = other.lo, other.lo_open
        if self.hi > other.hi:
            hi, hi_open = self.hi, self.hi_open
        elif self.hi < other.hi:
            hi, hi_open = other.hi, other.hi_open
        else:
            hi, hi_open = self.hi, self.hi_open and other.hi_open
        return Interval(lo, hi, lo_open, hi_open)

    def _render(self) -> str:
        lb = "(" if self.lo_open else "["
        rb = ")" if self.hi_open else "]"
        return f"{lb}{self.lo},{self.hi}{rb}"

    def __str__(self) -> str:
        return self._render()

    def __repr__(self) -> str:
        return f"Interval({self._render()})"

    def sort_key(self):
        return (self.lo, self.lo_open, self.hi, self.hi_open)

    def _lo_key(self):
        return (self.lo, self.lo_open)


def _lo_of(piece: Interval) -> TimePoint:
    return piece.lo


def _hi_of(piece: Interval) -> TimePoint:
    return piece.hi


def check_operator_range(rho: Interval) -> None:
    """Temporal operator ranges must not reach into the past of the anchor."""
    if rho.lo < TimePoint(Fraction(0)):
        raise ValueError(f"operator range {rho} has a negative left endpoint")


def diamond_minus_apply(i: Interval, rho: Interval) -> Interval:
    """All points that see some point of ``i`` at distance within ``rho``."""
    check_operator_range(rho)
    return i.minkowski(rho)


def _box_holds_at(t: TimePoint, i: Interval, rho: Interval) -> bool:
    # The probe window t - rho must lie entirely inside i.
    lo = NEG_INF if not rho.hi.is_finite else t - rho.hi
    window = Interval(lo, t - rho.lo, rho.hi_open, rho.lo_open)
    return i.contains_interval(window)


def box_minus_apply(i: Interval, rho: Interval) -> Interval | None:
    """All points whose entire lookback window ``t - rho`` lies inside ``i``.

    The candidate endpoints are ``i.lo + rho.hi`` and ``i.hi + rho.lo``;
    whether each is attained is decided by the pointwise condition itself,
    which keeps the openness flags correct for every flag combination.
    """
    check_operator_range(rho)
    if not rho.hi.is_finite:
        if NEG_INF < i.lo:
            return None
        lo = NEG_INF
    else:
        lo = i.lo + rho.hi
    hi = i.hi + rho.lo
    if lo > hi:
        return None
    if lo == hi:
        if lo.is_finite and _box_holds_at(lo, i, rho):
            return Interval(lo, hi)
        return None
    lo_open = True if not lo.is_finite else not _box_holds_at(lo, i, rho)
    hi_open = True if not hi.is_finite else not _box_holds_at(hi, i, rho)
    return Interval(lo, hi, lo_open, hi_open)


@dataclass(frozen=True, slots=True)
class IntervalSet:
    """A canonical union of intervals: sorted, disjoint, non-adjacent.

    Two IntervalSets denote the same point set iff they are equal. The
    empty set is ``IntervalSet.empty()``.
    """

    pieces: tuple[Interval, ...] = ()

    @classmethod
    def empty(cls) -> IntervalSet:
        return _EMPTY

    @classmethod
    def of(cls, *intervals: Interval) -> IntervalSet:
        return cls.from_iterable(intervals)

    @classmethod
    def from_iterable(cls, intervals: Iterable[Interval]) -> IntervalSet:
        items = sorted(intervals, key=Interval.sort_key)
        merged: list[Interval] = []
        for iv in items:
            if merged and merged[-1].overlaps_or_touches(iv):
                merged[-1] = merged[-1].hull(iv)
            else:
                merged.append(iv)
        return cls(tuple(merged))

    @property
    def is_empty(self) -> bool:
        return not self.pieces

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.pieces)

    def __len__(self) -> int:
        return len(self.pieces)

    def __str__(self) -> str:
        return "{" + ", ".join(str(p) for p in self.pieces) + "}"

    def insert(self, iv: Interval) -> IntervalSet:
        new, _ = self.insert_with_piece(iv)
        return new

    def _touch_range(self, iv: Interval) -> tuple[int, int]:
        """Index range of pieces that might overlap or touch ``iv``.

        Pieces are disjoint and sorted, so both their los and his are
        increasing; everything with hi < iv.lo or lo > iv.hi is out.
        """
        start = bisect_left(self.pieces, iv.lo, key=_hi_of)
        stop = bisect_right(self.pieces, iv.hi, key=_lo_of)
        return start, stop

    def insert_with_piece(self, iv: Interval) -> tuple[IntervalSet, Interval | None]:
        """Insert ``iv``; also report the merged piece now covering it.

        Returns ``(set, None)`` when ``iv`` was already fully covered.
        Used by the semi-naive fixpoint to propagate only changed pieces.
        """
        if self.covers_interval(iv):
            return self, None
        start, stop = self._touch_range(iv)
        merged = iv
        lo_idx, hi_idx = start, start
        for idx in range(start, stop):
            piece = self.pieces[idx]
            if piece.overlaps_or_touches(merged):
                merged = merged.hull(piece)
                hi_idx = idx + 1
            elif piece.sort_key() < merged.sort_key():
                lo_idx = hi_idx = idx + 1
            else:
                break
        return (
            IntervalSet(self.pieces[:lo_idx] + (merged,) + self.pieces[hi_idx:]),
            merged,
        )

    def union(self, other: IntervalSet) -> IntervalSet:
        if self.is_empty:
            return other
        if other.is_empty:
            return self
        return IntervalSet.from_iterable(self.pieces + other.pieces)

    def intersect(self, other: IntervalSet) -> IntervalSet:
        a, b = self.pieces, other.pieces
        if not a or not b:
            return _EMPTY
        # iterate the smaller side, bisecting the candidate range in the
        # larger; hits inherit order and separation, no re-sort needed
        if len(a) > len(b):
            a, b = b, a
        out: list[Interval] = []
        for piece in a:
            start = bisect_left(b, piece.lo, key=_hi_of)
            stop = bisect_right(b, piece.hi, key=_lo_of)
            for j in range(start, stop):
                hit = piece.intersect(b[j])
                if hit is not None:
                    out.append(hit)
        return IntervalSet(tuple(out))

    def contains(self, t: TimePoint | RationalLike) -> bool:
        t = TimePoint.of(t)
        idx = bisect_right(self.pieces, t, key=_lo_of) - 1
        return idx >= 0 and self.pieces[idx].contains(t)

    def covers_interval(self, iv: Interval) -> bool:
        # canonical pieces are separated, so a connected set fits one piece;
        # the only candidate is the rightmost piece starting at or before iv
        idx = bisect_right(self.pieces, (iv.lo, iv.lo_open), key=Interval._lo_key) - 1
        return idx >= 0 and self.pieces[idx].contains_interval(iv)

    def covers_set(self, other: IntervalSet) -> bool:
        return all(self.covers_interval(p) for p in other.pieces)

    def clip(self, window: Interval) -> IntervalSet:
        out = []
        for p in self.pieces:
            hit = p.intersect(window)
            if hit is not None:
                out.append(hit)
        return IntervalSet(tuple(out))

    def shift(self, d: RationalLike) -> IntervalSet:
        return IntervalSet(tuple(p.shift(d) for p in self.pieces))

    def diamond_minus(self, rho: Interval) -> IntervalSet:
        return IntervalSet.from_iterable(diamond_minus_apply(p, rho) for p in self.pieces)

    def box_minus(self, rho: Interval) -> IntervalSet:
        hits = (box_minus_apply(p, rho) for p in self.pieces)
        return IntervalSet.from_iterable(h for h in hits if h is not None)


_EMPTY = IntervalSet(())


def insert_coalesce(s: IntervalSet, iv: Interval) -> IntervalSet:
    """Insert an interval into a canonical set, merging where possible."""
    return s.insert(iv)


def lcm_rationals(values: Iterable[Fraction | int]) -> Fraction:
    """Least common multiple of positive rationals.

    ``lcm(a/b, c/d) = lcm(a, c) / gcd(b, d)`` for fractions in lowest
    terms; equivalently, scale to a common denominator, take the integer
    lcm, and divide back. Raises on an empty input.
    """
    fracs = [Fraction(v) for v in values]
    if not fracs:
        raise ValueError("lcm of an empty set is undefined")
    for v in fracs:
        if v <= 0:
            raise ValueError(f"lcm requires positive values, got {v}")
    return reduce(
        lambda a, b: Fraction(
            math.lcm(a.numerator, b.numerator), math.gcd(a.denominator, b.denominator)
        ),
        fracs,
    )


_INTERVAL_RE = re.compile(
    r"^\s*([\[(])\s*([^,\s]+)\s*,\s*([^,\s\])]+)\s*([\])])\s*$"
)


def parse_rational(text: str) -> Fraction:
    """Parse an integer, decimal, or p/q fraction."""
    return Fraction(text.strip())


def parse_interval(text: str) -> Interval:
    """Parse the textual interval forms ``[a,b]``, ``(a,b)``, ``[a,b)``, ``(a,b]``.

    Endpoints may be integers, decimals, ``p/q`` fractions, or ``-inf``/``inf``.
    The rendering produced by ``str(interval)`` round-trips bit-exactly.
    """
    m = _INTERVAL_RE.match(text)
    if not m:
        raise ValueError(f"malformed interval {text!r}")
    lb, lo_s, hi_s, rb = m.groups()
    try:
        lo = TimePoint.of(lo_s)
        hi = TimePoint.of(hi_s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"malformed interval endpoint in {text!r}: {exc}") from exc
    return Interval(lo, hi, lb == "(", rb == ")")
