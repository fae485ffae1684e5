"""Enforcements: partial maps from colours to ranks, and up-closed sets of them.

An enforcement over ``k`` colours is stored as a length-``k`` tuple whose
entries are ranks or ``None`` (undefined). Two orders matter:

* ``precede`` is the total order ``... 5, 3, 1, 0, 2, 4 ...`` on ranks, smaller
  meaning worse for player E;
* ``enf_leq`` is the pointwise order on enforcements: ``P ⊑ Q`` when ``Q`` is
  defined wherever ``P`` is and takes a value no better for E there.

Sets of enforcements that are upward closed under ``⊑`` are kept as their
antichain of minimal elements (:class:`EnforcementSet`). The dense
``(d+1)**k`` bit-vector form, with digit ``d`` meaning undefined, is available
for circuits and for cross-checking.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from operator import le
from typing import Iterable, Iterator, Sequence

import numpy as np

from .core import Player

DENSE_LIMIT = 2**20

# Ranks are 16-bit, so this keeps every position strictly positive.
_OFFSET = 2**17


def _key(p: int) -> int:
    return p if p % 2 == 0 else -p


def precede(p: int, q: int) -> bool:
    """True iff ``p`` strictly precedes ``q`` in ``... 3 ≺ 1 ≺ 0 ≺ 2 ...``."""
    return _key(p) < _key(q)


def preceq(p: int, q: int) -> bool:
    return p == q or _key(p) < _key(q)


def min_preceq(p: int | None, q: int | None) -> int | None:
    """``≺``-minimum where an undefined argument yields the other one."""
    if p is None:
        return q
    if q is None:
        return p
    return p if _key(p) <= _key(q) else q


class Enforcement(tuple):
    """Partial function from colour ids ``0..k-1`` to ranks (``None`` = undefined)."""

    __slots__ = ()

    def __new__(cls, values: Iterable[int | None] = ()):
        return super().__new__(cls, values)

    @classmethod
    def from_map(cls, mapping: dict[int, int], k: int) -> Enforcement:
        for c in mapping:
            if not 0 <= c < k:
                raise ValueError(f"colour {c} outside palette of size {k}")
        return cls(mapping.get(c) for c in range(k))

    @classmethod
    def empty(cls, k: int) -> Enforcement:
        return cls((None,) * k)

    @property
    def k(self) -> int:
        return len(self)

    @property
    def domain(self) -> frozenset[int]:
        return frozenset(c for c, x in enumerate(self) if x is not None)

    def as_map(self) -> dict[int, int]:
        return {c: x for c, x in enumerate(self) if x is not None}

    def without(self, c: int) -> Enforcement:
        return Enforcement(None if i == c else x for i, x in enumerate(self))

    def updated(self, c: int, r: int | None) -> Enforcement:
        return Enforcement(r if i == c else x for i, x in enumerate(self))

    def index(self, d: int) -> int:
        """Mixed-radix index; colour 0 is the least significant digit."""
        idx = 0
        for x in reversed(self):
            idx = idx * (d + 1) + (d if x is None else x)
        return idx

    @classmethod
    def from_index(cls, idx: int, d: int, k: int) -> Enforcement:
        vals = []
        for _ in range(k):
            idx, digit = divmod(idx, d + 1)
            vals.append(None if digit == d else digit)
        return cls(vals)

    def render(self, names: Sequence[str] | None = None) -> str:
        label = (lambda c: names[c]) if names is not None else str
        inner = ", ".join(f"{label(c)}↦{x}" for c, x in enumerate(self) if x is not None)
        return "{" + inner + "}"

    def __repr__(self) -> str:
        return f"Enforcement({self.render()})"


def _check_same(p: Enforcement, q: Enforcement) -> None:
    if len(p) != len(q):
        raise ValueError(f"enforcements over different palettes ({len(p)} vs {len(q)} colours)")


def enf_leq(p: Enforcement, q: Enforcement) -> bool:
    """``p ⊑ q``: ``q`` is defined wherever ``p`` is, with values ``⪯`` those of ``p``."""
    _check_same(p, q)
    for a, b in zip(p, q):
        if a is not None and (b is None or _key(b) > _key(a)):
            return False
    return True


def enf_loop(p: Enforcement, c: int, palette: Sequence[Player]) -> Enforcement | None:
    """Redirect stops at colour ``c`` back to the start; ``None`` when undefined."""
    if palette[c] is not Player.E:
        return None
    if p[c] is None:
        return p
    if p[c] % 2 == 0:
        return p.without(c)
    return None


def enf_lift(q: Enforcement, r: int) -> Enforcement:
    return Enforcement(None if x is None else max(x, r) for x in q)


def enf_union(p: Enforcement, q: Enforcement) -> Enforcement:
    _check_same(p, q)
    return Enforcement(min_preceq(a, b) for a, b in zip(p, q))


def enf_merge(side: Player, p: Enforcement, c: int, q: Enforcement) -> Enforcement:
    """Continue the plays summarised by ``p`` at colour ``c`` with those of ``q``.

    ``side`` is the player ``c`` is treated as belonging to.
    """
    pc = p[c]
    if pc is None:
        return p
    head = p if side is Player.O else p.without(c)
    return enf_union(head, enf_lift(q, pc))


# --- antichains -------------------------------------------------------------


def _pos(p: Sequence[int | None]) -> tuple[int, ...]:
    # Monotone encoding: p ⊑ q  iff  _pos(p) <= _pos(q) componentwise.
    return tuple(0 if x is None else _OFFSET - (x if x % 2 == 0 else -x) for x in p)


def minimize(candidates: Iterable[Enforcement]) -> frozenset[Enforcement]:
    """The ``⊑``-minimal elements of a finite collection."""
    uniq = set(candidates)
    if len(uniq) <= 1:
        return frozenset(uniq)
    decorated = sorted(((_pos(p), p) for p in uniq), key=lambda t: sum(t[0]))
    kept: list[tuple[int, ...]] = []
    out = []
    for pp, p in decorated:
        for kp in kept:
            if all(map(le, kp, pp)):
                break
        else:
            kept.append(pp)
            out.append(p)
    return frozenset(out)


def check_dense_size(d: int, k: int) -> int:
    size = (d + 1) ** k
    if size > DENSE_LIMIT:
        raise ValueError(
            f"dense enforcement space (d+1)^k = {d + 1}^{k} = {size} exceeds limit {DENSE_LIMIT}"
        )
    return size


def all_enforcements(d: int, k: int) -> Iterator[Enforcement]:
    """Every enforcement over ``k`` colours and ranks ``0..d-1``, in index order."""
    check_dense_size(d, k)
    digits = list(range(d)) + [None]
    for combo in product(digits, repeat=k):
        yield Enforcement(reversed(combo))


@lru_cache(maxsize=None)
def _chain_order(d: int) -> tuple[int, ...]:
    # Digit values of one coordinate listed bottom-up in ⊑.
    return (d,) + tuple(sorted(range(d), key=lambda r: -_key(r)))


def dense_up_closure(bits: np.ndarray, d: int, k: int) -> np.ndarray:
    """Upward closure of a dense membership vector, one prefix-OR per colour axis."""
    size = check_dense_size(d, k)
    if bits.shape != (size,):
        raise ValueError(f"expected {size} bits, got shape {bits.shape}")
    if k == 0:
        return bits.astype(bool).copy()
    arr = bits.astype(bool).reshape((d + 1,) * k, order="F")
    order = np.array(_chain_order(d))
    inverse = np.argsort(order)
    for axis in range(k):
        arr = np.take(arr, order, axis=axis)
        arr = np.logical_or.accumulate(arr, axis=axis)
        arr = np.take(arr, inverse, axis=axis)
    return arr.reshape(-1, order="F")


@dataclass(frozen=True)
class EnforcementSet:
    """An up-closed set of enforcements, held as its minimal antichain.

    Build instances with :func:`up_closure` or :meth:`from_bits`; the
    ``minimal`` field is trusted to already be an antichain.
    """

    d: int
    k: int
    minimal: frozenset[Enforcement]

    @classmethod
    def empty(cls, d: int, k: int) -> EnforcementSet:
        return cls(d, k, frozenset())

    @classmethod
    def full(cls, d: int, k: int) -> EnforcementSet:
        return cls(d, k, frozenset([Enforcement.empty(k)]))

    @classmethod
    def from_bits(cls, bits: np.ndarray, d: int, k: int) -> EnforcementSet:
        bits = np.asarray(bits, dtype=bool)
        if not np.array_equal(dense_up_closure(bits, d, k), bits):
            raise ValueError("bit vector is not up-closed")
        members = [Enforcement.from_index(int(i), d, k) for i in np.flatnonzero(bits)]
        return cls(d, k, minimize(members))

    def __contains__(self, p: Enforcement) -> bool:
        pp = _pos(p)
        return any(all(map(le, _pos(m), pp)) for m in self.minimal)

    def to_bits(self) -> np.ndarray:
        size = check_dense_size(self.d, self.k)
        seeds = np.zeros(size, dtype=bool)
        for m in self.minimal:
            seeds[m.index(self.d)] = True
        return dense_up_closure(seeds, self.d, self.k)

    def __iter__(self) -> Iterator[Enforcement]:
        for i in np.flatnonzero(self.to_bits()):
            yield Enforcement.from_index(int(i), self.d, self.k)

    def __len__(self) -> int:
        return int(self.to_bits().sum())

    def __bool__(self) -> bool:
        return bool(self.minimal)

    def _compatible(self, other: EnforcementSet) -> None:
        if (self.d, self.k) != (other.d, other.k):
            raise ValueError("enforcement sets over different (d, k)")

    def __or__(self, other: EnforcementSet) -> EnforcementSet:
        self._compatible(other)
        return EnforcementSet(self.d, self.k, minimize(self.minimal | other.minimal))

    def __and__(self, other: EnforcementSet) -> EnforcementSet:
        # enf_union is the ⊑-join, so Up(A) ∩ Up(B) = Up({a ⊔ b}).
        self._compatible(other)
        joins = (enf_union(a, b) for a in self.minimal for b in other.minimal)
        return EnforcementSet(self.d, self.k, minimize(joins))

    def issubset(self, other: EnforcementSet) -> bool:
        return all(m in other for m in self.minimal)

    def sorted_minimal(self) -> list[Enforcement]:
        return sorted(self.minimal, key=lambda p: p.index(self.d))

    def render(self, names: Sequence[str] | None = None) -> str:
        return "Up(" + ", ".join(p.render(names) for p in self.sorted_minimal()) + ")"


def up_closure(seeds: Iterable[Enforcement], d: int, k: int) -> EnforcementSet:
    seeds = list(seeds)
    for p in seeds:
        if len(p) != k:
            raise ValueError(f"seed {p!r} is not over {k} colours")
        if any(x is not None and not 0 <= x < d for x in p):
            raise ValueError(f"seed {p!r} has a value outside 0..{d - 1}")
    return EnforcementSet(d, k, minimize(seeds))
