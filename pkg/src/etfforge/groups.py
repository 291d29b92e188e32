"""Finite abelian groups as products of cyclic factors, and their duals.

A group ``Z_{n_1} x ... x Z_{n_r}`` is identified with its dual by letting
``s`` act as the character ``t -> exp(2 pi i sum_i s_i t_i / n_i)``.  Phases
are kept as exact :class:`~fractions.Fraction` values in ``[0, 1)``; turning
them into complex numbers is left to :mod:`etfforge.frames`.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, DuplicateElements, NotASubgroup, ShapeMismatch

Element = tuple[int, ...]


@dataclass(frozen=True)
class AbelianGroup:
    orders: tuple[int, ...]

    def __post_init__(self):
        orders = tuple(int(n) for n in self.orders)
        if not orders or any(n < 1 for n in orders):
            raise DomainError(f"cyclic factor orders must be positive, got {self.orders}")
        object.__setattr__(self, "orders", orders)

    @classmethod
    def cyclic(cls, n: int) -> AbelianGroup:
        return cls((n,))

    @property
    def order(self) -> int:
        return prod(self.orders)

    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def identity(self) -> Element:
        return (0,) * self.rank

    def __len__(self):
        return self.order

    def __str__(self):
        return " x ".join(f"Z_{n}" for n in self.orders)

    def element(self, g) -> Element:
        """Reduce an int (cyclic groups only) or an integer tuple into the group."""
        if isinstance(g, (int, np.integer)):
            g = (int(g),)
        g = tuple(int(c) for c in g)
        if len(g) != self.rank:
            raise ShapeMismatch(f"element {g} has {len(g)} coordinates, group has rank {self.rank}")
        return tuple(c % n for c, n in zip(g, self.orders))

    def elements(self) -> list[Element]:
        """All elements in lexicographic coordinate order."""
        return list(itertools.product(*(range(n) for n in self.orders)))

    def index(self, g: Element) -> int:
        """Position of ``g`` in :meth:`elements` (mixed radix)."""
        i = 0
        for c, n in zip(g, self.orders):
            i = i * n + c
        return i

    def add(self, a: Element, b: Element) -> Element:
        return tuple((x + y) % n for x, y, n in zip(a, b, self.orders))

    def sub(self, a: Element, b: Element) -> Element:
        return tuple((x - y) % n for x, y, n in zip(a, b, self.orders))

    def neg(self, a: Element) -> Element:
        return tuple((-x) % n for x, n in zip(a, self.orders))

    def scale(self, c: int, a: Element) -> Element:
        return tuple((c * x) % n for x, n in zip(a, self.orders))

    def subgroup(self, generators: Iterable) -> Subgroup:
        gens = tuple(self.element(g) for g in generators)
        return Subgroup(self, gens, _closure(self, gens))

    def trivial_subgroup(self) -> Subgroup:
        return self.subgroup([])

    def whole(self) -> Subgroup:
        n = self.rank
        return self.subgroup([tuple(int(i == j) for j in range(n)) for i in range(n)])


def _closure(group: AbelianGroup, gens: Sequence[Element]) -> tuple[Element, ...]:
    seen = {group.identity}
    frontier = [group.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = group.add(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return tuple(sorted(seen))


@dataclass(frozen=True)
class Subgroup:
    group: AbelianGroup
    generators: tuple[Element, ...]
    elements: tuple[Element, ...]

    @classmethod
    def from_elements(cls, group: AbelianGroup, elements: Iterable) -> Subgroup:
        elems = tuple(sorted({group.element(e) for e in elements}))
        if group.identity not in elems:
            raise NotASubgroup("subset does not contain the identity")
        members = set(elems)
        for a in elems:
            for b in elems:
                if group.add(a, b) not in members:
                    raise NotASubgroup(f"{a} + {b} leaves the subset")
        return cls(group, elems, elems)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, g) -> bool:
        return g in self._members

    @property
    def _members(self) -> frozenset:
        cached = self.__dict__.get("_members_cache")
        if cached is None:
            cached = frozenset(self.elements)
            object.__setattr__(self, "_members_cache", cached)
        return cached

    def issubset(self, other: Subgroup) -> bool:
        return all(e in other for e in self.elements)


def char_phase(group: AbelianGroup, s: Sequence[int], t: Sequence[int]) -> Fraction:
    """Phase of the character ``s`` at ``t``: ``sum s_i t_i / n_i mod 1``."""
    if len(s) != group.rank or len(t) != group.rank:
        raise ShapeMismatch("character and element must match the group rank")
    total = Fraction(0)
    for si, ti, n in zip(s, t, group.orders):
        total += Fraction((si * ti) % n, n)
    return total - (total.numerator // total.denominator)


def phase_matrix(group: AbelianGroup, rows: Sequence[Element], cols: Sequence[Element]):
    """Phases ``char_phase(col, row)`` as a pair ``(numerators, common denominator)``.

    Using one denominator ``L = lcm(orders)`` keeps everything in integers; the
    phase of entry ``(i, j)`` is ``num[i, j] / L``.
    """
    L = int(np.lcm.reduce(np.array(group.orders, dtype=np.int64)))
    mult = np.array([L // n for n in group.orders], dtype=np.int64)
    R = np.asarray(rows, dtype=np.int64).reshape(len(rows), group.rank)
    C = np.asarray(cols, dtype=np.int64).reshape(len(cols), group.rank)
    num = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for i, n in enumerate(group.orders):
        num += ((R[:, i, None] * C[None, :, i]) % n) * mult[i]
    return num % L, L


def character_table(group: AbelianGroup) -> np.ndarray:
    """Complex ``G x G`` matrix with entry ``(g, gamma) = gamma(g)``."""
    elems = group.elements()
    num, L = phase_matrix(group, elems, elems)
    return np.exp(2j * np.pi * num / L)


def dft(group: AbelianGroup, values: np.ndarray) -> np.ndarray:
    """``(Gamma^* y)(gamma) = sum_g conj(gamma(g)) y(g)``, indexed like :meth:`elements`."""
    return character_table(group).conj().T @ np.asarray(values)


def indicator(group: AbelianGroup, subset: Iterable[Element]) -> np.ndarray:
    v = np.zeros(group.order)
    for g in subset:
        v[group.index(g)] = 1.0
    return v


def annihilator(group: AbelianGroup, H: Subgroup) -> Subgroup:
    """Characters trivial on ``H``, as a subgroup of the (self-identified) dual."""
    gens = H.generators or (group.identity,)
    elems = group.elements()
    num, _ = phase_matrix(group, gens, elems)
    members = tuple(s for s, trivial in zip(elems, (num == 0).all(axis=0)) if trivial)
    perp = Subgroup(group, members, members)
    assert perp.order * H.order == group.order
    return perp


def transversal(dual: AbelianGroup, Hperp: Subgroup) -> list[Element]:
    """One representative per coset of ``Hperp``, first-seen in lexicographic order."""
    seen: set[Element] = set()
    reps = []
    for s in dual.elements():
        if s in seen:
            continue
        reps.append(s)
        seen.update(dual.add(s, h) for h in Hperp.elements)
    assert len(reps) * Hperp.order == dual.order
    return reps


def autocorrelation(group: AbelianGroup, subset: Sequence) -> Counter:
    """``result[g] = #{(d, d') : g = d - d'}``; missing keys count zero."""
    elems = [group.element(d) for d in subset]
    if len(set(elems)) != len(elems):
        raise DuplicateElements("subset has repeated elements")
    counts: Counter = Counter()
    for d in elems:
        for e in elems:
            counts[group.sub(d, e)] += 1
    return counts


# -- quotients -----------------------------------------------------------------

def _smith(A: list[list[int]]):
    """Smith normal form ``U A V = diag`` with unimodular ``U``; returns ``(diag, U)``.

    Only the row transform is tracked since quotient coordinates need nothing
    else.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    A = [row[:] for row in A]
    U = [[int(i == j) for j in range(m)] for i in range(m)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, c):  # row dst += c * row src
        A[dst] = [a + c * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + c * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, c):
        for row in A:
            row[dst] += c * row[src]

    for t in range(min(m, n)):
        while True:
            nz = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
            if not nz:
                break
            _, i, j = min(nz)
            swap_rows(t, i)
            swap_cols(t, j)
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // A[t][t]))
                    done = done and A[i][t] == 0
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // A[t][t]))
                    done = done and A[t][j] == 0
            if not done:
                continue
            bad = [(i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % A[t][t]]
            if not bad:
                break
            add_row(t, bad[0][0], 1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-u for u in U[t]]
    diag = [A[i][i] if i < n else 0 for i in range(m)]
    return diag, U


@dataclass(frozen=True)
class GroupQuotient:
    """``source / K`` realized as a cyclic-product group.

    The image of ``g`` has coordinates ``(U g)_i mod e_i`` over the nontrivial
    invariant factors ``e_i`` of the relation matrix ``[diag(n) | gens(K)]``.
    For a cyclic source this is plain reduction ``g mod (n / |K|)``.
    """

    source: AbelianGroup
    kernel: Subgroup
    target: AbelianGroup
    rows: tuple[tuple[int, ...], ...]

    def image(self, g) -> Element:
        g = self.source.element(g)
        return tuple(sum(u * c for u, c in zip(row, g)) % n
                     for row, n in zip(self.rows, self.target.orders))


def quotient_group(group: AbelianGroup, K: Subgroup) -> GroupQuotient:
    r = group.rank
    cols = [[int(i == j) * n for j in range(r)] for i, n in enumerate(group.orders)]
    cols += [list(g) for g in K.generators]
    rel = [[col[i] for col in cols] for i in range(r)]
    diag, U = _smith(rel)
    keep = [i for i, e in enumerate(diag) if e != 1]
    if not keep:
        # trivial quotient; keep one factor of order 1
        target = AbelianGroup((1,))
        rows = ((0,) * r,)
    else:
        target = AbelianGroup(tuple(diag[i] for i in keep))
        rows = tuple(tuple(U[i]) for i in keep)
    assert target.order * K.order == group.order
    return GroupQuotient(group, K, target, rows)
