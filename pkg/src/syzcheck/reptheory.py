"""Decomposing symmetric weight characters into Schur functor pieces.

The Tor slices computed by the Koszul module are GL-representations, so
their weight multiplicities are permutation-symmetric and decompose
uniquely into Schur characters. The decomposition here is the classical
greedy one: peel off the lexicographically largest surviving weight, whose
multiplicity is the coefficient of that Schur term, subtract, repeat. Any
negative intermediate multiplicity means the input was not a genuine
character and is reported as a hard error, never clamped.

Kostka numbers (weight multiplicities of a single Schur character) are
computed by peeling the largest tableau entry as a horizontal strip, with
memoisation across calls.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations
from math import comb
from typing import Iterable

from .errors import CapacityError, MismatchError
from .koszul import DEFAULT_BASIS_GUARD, monomial_basis, tor_dimension
from .lattice import Vector, partitions_into


@dataclass(frozen=True, order=True)
class Partition:
    """Non-increasing tuple of positive parts; trailing zeros are stripped
    on construction so the same shape compares equal at every v_dim."""

    parts: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(x <= 0 for x in self.parts):
            raise ValueError("parts must be positive (zeros are stripped by partition())")
        if any(a < b for a, b in zip(self.parts, self.parts[1:])):
            raise ValueError("parts must be non-increasing")

    @property
    def size(self) -> int:
        return sum(self.parts)

    @property
    def rows(self) -> int:
        return len(self.parts)

    def to_json(self) -> list[int]:
        return list(self.parts)


def partition(parts: Iterable[int]) -> Partition:
    return Partition(tuple(int(x) for x in parts if int(x) != 0))


@dataclass(eq=True)
class WeightCharacter:
    """Finite weight multiset on Z^{v_dim}, stored as nonzero multiplicities."""

    v_dim: int
    mults: dict[Vector, int]

    def __post_init__(self) -> None:
        clean = {}
        for w, m in self.mults.items():
            if len(w) != self.v_dim:
                raise ValueError("weight length does not match v_dim")
            if m:
                clean[tuple(int(x) for x in w)] = int(m)
        self.mults = clean

    @property
    def total_dim(self) -> int:
        return sum(self.mults.values())

    def is_symmetric(self) -> bool:
        for w, m in self.mults.items():
            for ww in permutations(w):
                if self.mults.get(ww, 0) != m:
                    return False
        return True


@dataclass(eq=True)
class SchurDecomposition:
    v_dim: int
    terms: dict[Partition, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.terms = {lam: int(m) for lam, m in self.terms.items() if m}

    def to_json(self) -> list[dict]:
        ordered = sorted(self.terms.items(), key=lambda kv: kv[0].parts, reverse=True)
        return [{"partition": lam.to_json(), "mult": m} for lam, m in ordered]


def weight_character(p: int, q: int, d: int, v_dim: int, *,
                     max_basis: int = DEFAULT_BASIS_GUARD) -> WeightCharacter:
    """Weight multiplicities of wedge^p Sym^d V (x) Sym^{qd} V."""
    if p < 0 or q < 0 or d < 1 or v_dim < 1:
        raise ValueError(f"need p, q >= 0, d >= 1, v_dim >= 1, got {(p, q, d, v_dim)}")
    mon = monomial_basis(d, v_dim)
    sym = monomial_basis(q * d, v_dim)
    if comb(mon.size, p) * sym.size > max_basis:
        raise CapacityError(f"character support exceeds guard {max_basis}")
    mults: Counter[Vector] = Counter()
    for wedge in combinations(mon.exponents, p):
        base = [0] * v_dim
        for e in wedge:
            for k in range(v_dim):
                base[k] += e[k]
        for s in sym.exponents:
            mults[tuple(b + x for b, x in zip(base, s))] += 1
    return WeightCharacter(v_dim=v_dim, mults=dict(mults))


@lru_cache(maxsize=None)
def _strip_predecessors(lam: tuple[int, ...], size: int) -> tuple[tuple[int, ...], ...]:
    """All partitions obtained from lam by removing a horizontal strip of
    the given size: at most one cell per column, so row i may not drop
    below row i+1 of the original shape."""
    n = len(lam)
    out: list[tuple[int, ...]] = []

    def rec(i: int, remaining: int, acc: list[int]) -> None:
        if remaining < 0:
            return
        if i == n:
            if remaining == 0:
                out.append(tuple(x for x in acc if x))
            return
        low = lam[i + 1] if i + 1 < n else 0
        for v in range(low, lam[i] + 1):
            acc.append(v)
            rec(i + 1, remaining - (lam[i] - v), acc)
            acc.pop()

    rec(0, size, [])
    return tuple(out)


@lru_cache(maxsize=None)
def _kostka_sorted(lam: tuple[int, ...], mu: tuple[int, ...]) -> int:
    if not mu:
        return 1 if not lam else 0
    return sum(_kostka_sorted(prev, mu[:-1])
               for prev in _strip_predecessors(lam, mu[-1]))


def kostka(shape: Partition | Iterable[int], content: Iterable[int]) -> int:
    """Number of semistandard tableaux of the given shape and content.

    Invariant under permuting the content, so it is sorted once and the
    recursion memoised on the sorted form.
    """
    lam = shape if isinstance(shape, Partition) else partition(shape)
    mu = tuple(int(c) for c in content)
    if any(c < 0 for c in mu):
        raise ValueError("content entries must be nonnegative")
    if sum(mu) != lam.size:
        raise ValueError(f"content sums to {sum(mu)}, shape has size {lam.size}")
    return _kostka_sorted(lam.parts, tuple(sorted((c for c in mu if c), reverse=True)))


def schur_character(shape: Partition | Iterable[int], v_dim: int) -> WeightCharacter:
    """Weight multiplicities of one Schur functor applied to a v_dim-dim
    space: Kostka numbers, spread over all permutations of each content."""
    lam = shape if isinstance(shape, Partition) else partition(shape)
    mults: dict[Vector, int] = {}
    for mu in partitions_into(lam.size, v_dim):
        k = kostka(lam, mu)
        if k:
            for w in set(permutations(mu)):
                mults[w] = k
    return WeightCharacter(v_dim=v_dim, mults=mults)


def schur_decompose(char: WeightCharacter) -> SchurDecomposition:
    """Greedy peeling of the lex-largest weight. Requires a symmetric
    character; a negative multiplicity at any stage is a hard error."""
    if not char.is_symmetric():
        raise ValueError("character is not symmetric under coordinate permutations")
    work = dict(char.mults)
    terms: dict[Partition, int] = {}
    while work:
        top = max(work)
        c = work[top]
        if c < 0:
            raise MismatchError(f"negative multiplicity {c} at weight {top}")
        # In a symmetric character the lex-max weight is non-increasing:
        # otherwise its sorted permutation would be lex-larger and present.
        lam = partition(top)
        terms[lam] = terms.get(lam, 0) + c
        for w, k in schur_character(lam, char.v_dim).mults.items():
            left = work.get(w, 0) - c * k
            if left < 0:
                raise MismatchError(
                    f"subtracting {c} copies of Schur {lam.parts} drives weight "
                    f"{w} to {left}; input was not a genuine character")
            if left:
                work[w] = left
            else:
                work.pop(w, None)
    return SchurDecomposition(v_dim=char.v_dim, terms=terms)


def reconstruct_character(decomp: SchurDecomposition) -> WeightCharacter:
    mults: Counter[Vector] = Counter()
    for lam, c in decomp.terms.items():
        for w, k in schur_character(lam, decomp.v_dim).mults.items():
            mults[w] += c * k
    return WeightCharacter(v_dim=decomp.v_dim, mults=dict(mults))


def tor_schur_decomposition(p: int, q: int, d: int, v_dim: int, *,
                            strategy: str = "modular_first") -> SchurDecomposition:
    """Schur decomposition of one graded Tor piece.

    Requires v_dim >= p + 1 so that no row of the stable answer is cut off
    by the dimension of the underlying space.
    """
    if v_dim < p + 1:
        raise ValueError(f"need v_dim >= p + 1, got v_dim={v_dim}, p={p}")
    tor = tor_dimension(p, q, v_dim - 1, d, strategy=strategy)
    char = WeightCharacter(v_dim=v_dim, mults=dict(tor.weights))
    return schur_decompose(char)
