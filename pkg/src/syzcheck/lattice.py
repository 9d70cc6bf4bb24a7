"""Lattice point configurations, semigroup membership, and multidegree orbits.

A configuration is a finite list of distinct vectors in N^k. The main preset
is the degree-d monomial configuration in n+1 variables (all compositions of
d into n+1 nonnegative parts), which generates the coordinate semigroup of
the degree-d embedding of projective n-space. Everything downstream (divisor
complexes, Betti tables, Koszul weights) is graded by this semigroup.

Point order is lexicographic descending on exponent vectors. Face indices
and matrix indices all derive from that order, so runs are bit-reproducible.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from math import comb, factorial
from typing import Iterator, Sequence

from .errors import CapacityError, UnsupportedConfigError

Vector = tuple[int, ...]

# enumerate_multidegrees refuses total weights above this (k*d guard)
ENUMERATION_WEIGHT_GUARD = 10**6
# full composition listings are refused above this projected count
COMPOSITION_COUNT_CAP = 5 * 10**7


def compositions(total: int, parts: int) -> Iterator[Vector]:
    """Yield all compositions of `total` into `parts` nonnegative parts.

    Order is lexicographic descending: (total, 0, ..., 0) first. This is the
    canonical vector order used throughout the package.
    """
    if parts < 1:
        raise ValueError("parts must be >= 1")
    if parts == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for tail in compositions(total - head, parts - 1):
            yield (head,) + tail


def partitions_into(total: int, max_parts: int, max_part: int | None = None) -> Iterator[Vector]:
    """Yield partitions of `total` into at most `max_parts` parts.

    Each partition is padded with zeros to length `max_parts` (a canonical
    non-increasing vector). Order is lexicographic descending.
    """
    if max_parts < 1:
        raise ValueError("max_parts must be >= 1")
    cap = total if max_part is None else min(max_part, total)
    if max_parts == 1:
        if total <= cap:
            yield (total,)
        return
    # first part down from cap; remaining parts cannot exceed the first
    lo = -(-total // max_parts)  # ceil: first part of a non-increasing vector
    for head in range(cap, lo - 1, -1):
        for tail in partitions_into(total - head, max_parts - 1, head):
            yield (head,) + tail


@dataclass(frozen=True)
class PointConfig:
    """A finite point configuration in N^k.

    Fields:
        kind: "veronese" or "general".
        points: the configuration, distinct vectors with nonnegative entries.
        n, d: for kind "veronese", the ambient projective dimension and the
            embedding degree; None for general configurations.
        homogenizer: optional rational vector w with w.a = 1 for every point.
    """

    kind: str
    points: tuple[Vector, ...]
    n: int | None = None
    d: int | None = None
    homogenizer: tuple[Fraction, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("veronese", "general"):
            raise ValueError(f"unknown configuration kind {self.kind!r}")
        if not self.points:
            raise ValueError("configuration needs at least one point")
        k = len(self.points[0])
        for a in self.points:
            if len(a) != k:
                raise ValueError("all points must share one ambient dimension")
            if any(x < 0 for x in a):
                raise ValueError("points must have nonnegative coordinates")
        if len(set(self.points)) != len(self.points):
            raise ValueError("points must be distinct")
        if self.kind == "veronese":
            if self.n is None or self.d is None:
                raise ValueError("veronese configuration requires n and d")
            if k != self.n + 1 or len(self.points) != comb(self.n + self.d, self.n):
                raise ValueError("inconsistent veronese data")
        if self.homogenizer is not None:
            if len(self.homogenizer) != k:
                raise ValueError("homogenizer has wrong length")
            for a in self.points:
                if sum(w * x for w, x in zip(self.homogenizer, a)) != 1:
                    raise ValueError(f"homogenizer fails on point {a}")

    @property
    def ambient_dim(self) -> int:
        return len(self.points[0])

    def degree_of(self, v: Sequence[int]) -> int:
        """Total degree of a semigroup element (its w-grading)."""
        if self.kind == "veronese":
            s = sum(v)
            if s % self.d != 0:
                raise ValueError(f"{tuple(v)} has coordinate sum not divisible by {self.d}")
            return s // self.d
        if self.homogenizer is None:
            raise UnsupportedConfigError("general configuration without homogenizer is ungraded")
        deg = sum(w * x for w, x in zip(self.homogenizer, v))
        if deg.denominator != 1:
            raise ValueError(f"{tuple(v)} is not homogeneous for this configuration")
        return int(deg)


@dataclass(frozen=True)
class Multidegree:
    """A vector with its total degree (None when the grading does not apply)."""

    coords: Vector
    total_degree: int | None


@dataclass(frozen=True)
class OrbitRep:
    """A coordinate-permutation orbit: canonical sorted form and orbit size."""

    canonical: Multidegree
    orbit_size: int


def veronese_points(n: int, d: int) -> PointConfig:
    """All exponent vectors of degree-d monomials in n+1 variables.

    Args:
        n: projective dimension, n >= 1.
        d: embedding degree, d >= 1.

    Returns:
        PointConfig with C(n+d, n) points in lexicographic descending order
        and homogenizer (1/d, ..., 1/d).
    """
    if n < 1 or d < 1:
        raise ValueError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    pts = tuple(compositions(d, n + 1))
    w = tuple(Fraction(1, d) for _ in range(n + 1))
    return PointConfig(kind="veronese", points=pts, n=n, d=d, homogenizer=w)


def general_config(points: Sequence[Sequence[int]],
                   homogenizer: Sequence[Fraction] | None = None) -> PointConfig:
    """Wrap an explicit point list as a general configuration."""
    pts = tuple(tuple(int(x) for x in a) for a in points)
    w = tuple(homogenizer) if homogenizer is not None else None
    return PointConfig(kind="general", points=pts, homogenizer=w)


def semigroup_contains(config: PointConfig, v: Sequence[int]) -> bool:
    """Decide whether v is a nonnegative integer combination of the points.

    For veronese configurations the closed form applies: all coordinates
    nonnegative and coordinate sum divisible by d (every such vector splits
    greedily into degree-d pieces because the configuration contains all
    compositions). General configurations fall back to a depth-first search
    over residual vectors with memoization; the search is bounded because
    every nonzero point strictly decreases the residual's coordinate sum.
    """
    vv = tuple(int(x) for x in v)
    if len(vv) != config.ambient_dim:
        raise ValueError("vector has wrong length")
    return membership_tester(config)(vv)


def membership_tester(config: PointConfig):
    """A reusable membership predicate with a memo that persists across calls.

    Vectors of any origin may be passed; negative coordinates test False.
    """
    if config.kind == "veronese":
        d = config.d

        def member_closed(v: Sequence[int]) -> bool:
            return all(x >= 0 for x in v) and sum(v) % d == 0

        return member_closed

    points = [a for a in config.points if any(a)]
    memo: dict[Vector, bool] = {}

    def member_dfs(v: Sequence[int]) -> bool:
        vv = tuple(v)
        if any(x < 0 for x in vv):
            return False
        if not any(vv):
            return True
        hit = memo.get(vv)
        if hit is not None:
            return hit
        ok = False
        for a in points:
            if all(x >= y for x, y in zip(vv, a)):
                if member_dfs(tuple(x - y for x, y in zip(vv, a))):
                    ok = True
                    break
        memo[vv] = ok
        return ok

    return member_dfs


def multidegree(config: PointConfig, coords: Sequence[int]) -> Multidegree:
    """Validated constructor: coords must lie in the configuration's semigroup."""
    cc = tuple(int(x) for x in coords)
    if not semigroup_contains(config, cc):
        raise ValueError(f"{cc} is not in the semigroup of this configuration")
    return Multidegree(coords=cc, total_degree=config.degree_of(cc))


def orbit_size_of(coords: Sequence[int]) -> int:
    """Number of distinct coordinate permutations of a vector."""
    k = len(coords)
    size = factorial(k)
    for mult in Counter(coords).values():
        size //= factorial(mult)
    return size


def canonical_rep(b: Multidegree) -> OrbitRep:
    """Sort coordinates non-increasingly and attach the orbit size."""
    canon = tuple(sorted(b.coords, reverse=True))
    return OrbitRep(canonical=Multidegree(coords=canon, total_degree=b.total_degree),
                    orbit_size=orbit_size_of(canon))


def orbit_expansion(coords: Sequence[int]) -> list[Vector]:
    """All distinct coordinate permutations, lexicographically descending."""
    cc = tuple(int(x) for x in coords)
    return sorted({p for p in permutations(cc)}, reverse=True)


def enumerate_multidegrees(config: PointConfig, total_degree: int,
                           up_to_symmetry: bool = False) -> list[Multidegree] | list[OrbitRep]:
    """All semigroup elements of the given total degree.

    For a veronese configuration these are the vectors in N^{n+1} with
    coordinate sum total_degree * d. With up_to_symmetry, one non-increasing
    representative per coordinate-permutation orbit is returned, with its
    orbit size. Order is lexicographic descending in both modes.

    Raises:
        UnsupportedConfigError: for general configurations (enumeration has
            no termination bound without a grading).
        CapacityError: when total_degree * d exceeds the weight guard, or a
            full (non-symmetric) listing would exceed the count cap.
    """
    if config.kind != "veronese":
        raise UnsupportedConfigError("multidegree enumeration needs a veronese configuration")
    if total_degree < 0:
        raise ValueError("total_degree must be >= 0")
    total = total_degree * config.d
    if total > ENUMERATION_WEIGHT_GUARD:
        raise CapacityError(f"coordinate sum {total} exceeds guard {ENUMERATION_WEIGHT_GUARD}")
    k = config.ambient_dim
    if up_to_symmetry:
        return [OrbitRep(canonical=Multidegree(coords=part, total_degree=total_degree),
                         orbit_size=orbit_size_of(part))
                for part in partitions_into(total, k)]
    count = comb(total + k - 1, k - 1)
    if count > COMPOSITION_COUNT_CAP:
        raise CapacityError(f"{count} multidegrees exceed cap {COMPOSITION_COUNT_CAP}")
    return [Multidegree(coords=c, total_degree=total_degree)
            for c in compositions(total, k)]


def config_to_json(config: PointConfig) -> dict:
    """JSON-ready dict {kind, n, d, points}."""
    return {
        "kind": config.kind,
        "n": config.n,
        "d": config.d,
        "points": [list(a) for a in config.points],
    }


def config_from_json(data: dict) -> PointConfig:
    """Inverse of config_to_json."""
    if data.get("kind") == "veronese":
        cfg = veronese_points(int(data["n"]), int(data["d"]))
        if [list(a) for a in cfg.points] != data["points"]:
            raise ValueError("point list does not match the veronese preset")
        return cfg
    return general_config(data["points"])


def parse_points_text(text: str) -> PointConfig:
    """Parse a general configuration: one point per line, whitespace-separated
    integers; blank lines and '#' comments ignored."""
    pts = []
    for line in text.splitlines():
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        pts.append(tuple(int(tok) for tok in body.split()))
    if not pts:
        raise ValueError("no points found")
    return general_config(pts)
