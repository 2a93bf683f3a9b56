"""Finite group backends with dense integer element ids.

Every group exposes elements ``0 .. order-1`` with ``0`` the identity.  Up to
``TABLE_LIMIT`` elements the full multiplication table is materialized as a
numpy array and all bulk algorithms index into it; larger groups multiply on
demand through their backend representation.

Supported spec strings::

    Sn, An, Cn, Dn (dihedral of order 2n), Q8, PSL2(p),
    products joined by ``x`` (e.g. ``C2xC2``), and ``table:<path>``.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import BudgetExceeded, GroupSpecError, NotAGroupError

TABLE_LIMIT = 4096
DEFAULT_AUT_CAP = 200_000
_ASSOC_EXHAUSTIVE = 200
_MAX_PERM_DEGREE = 15

Perm = tuple[int, ...]


@dataclass(frozen=True)
class Automorphism:
    """A bijection of element ids that respects the product."""

    image: tuple[int, ...]

    def __call__(self, g: int) -> int:
        return self.image[g]

    def apply(self, elements: Iterable[int]) -> tuple[int, ...]:
        return tuple(self.image[g] for g in elements)

    def then(self, other: "Automorphism") -> "Automorphism":
        """Apply ``self`` first, then ``other``."""
        return Automorphism(tuple(other.image[x] for x in self.image))

    def inverse(self) -> "Automorphism":
        inv = [0] * len(self.image)
        for x, y in enumerate(self.image):
            inv[y] = x
        return Automorphism(tuple(inv))


class FiniteGroup:
    """A finite group with elements ``0..order-1``; ``0`` is the identity.

    Instances are immutable from the caller's point of view.  Derived data
    (automorphisms, subgroup lattice, pair-generation matrix) is computed
    lazily and cached on the instance.
    """

    def __init__(
        self,
        spec: str,
        kind: str,
        order: int,
        *,
        table: np.ndarray | None = None,
        reps: Sequence | None = None,
        mul: Callable | None = None,
        rep_index: dict | None = None,
    ):
        self.spec = spec
        self.kind = kind
        self.order = order
        self._table = table
        self._reps = reps
        self._mul = mul
        self._rep_index = rep_index
        if table is not None:
            self._inverses = np.argmin(table, axis=1).astype(np.int32)
        else:
            self._inverses = np.array(
                [self._slow_inverse(g) for g in range(order)], dtype=np.int32
            )
        self._orders: np.ndarray | None = None
        self._auts: np.ndarray | None = None
        self._aut_gens: tuple[int, ...] | None = None
        self._aut_key: dict | None = None
        self._aut_compose: np.ndarray | None = None
        self._lattice: SubgroupLattice | None = None
        self._pair_gen: np.ndarray | None = None
        self._gen_tuple: tuple[int, ...] | None = None
        self.class_tables: dict = {}

    def __repr__(self) -> str:
        return f"FiniteGroup({self.spec!r}, order={self.order})"

    # -- arithmetic -------------------------------------------------------

    @property
    def has_table(self) -> bool:
        return self._table is not None

    @property
    def table(self) -> np.ndarray:
        if self._table is None:
            raise BudgetExceeded(
                f"{self.spec}: order {self.order} exceeds the table limit {TABLE_LIMIT}"
            )
        return self._table

    @property
    def inverses(self) -> np.ndarray:
        return self._inverses

    def product(self, a: int, b: int) -> int:
        if self._table is not None:
            return int(self._table[a, b])
        return self._rep_index[self._mul(self._reps[a], self._reps[b])]

    def inverse(self, a: int) -> int:
        return int(self._inverses[a])

    def _slow_inverse(self, a: int) -> int:
        x = a
        prev = 0
        while x != 0:
            prev = x
            x = self._rep_index[self._mul(self._reps[x], self._reps[a])]
        return prev

    def multiply_all(self, elements: Iterable[int]) -> int:
        acc = 0
        for g in elements:
            acc = self.product(acc, g)
        return acc

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inverse(a), -k
        acc = 0
        for _ in range(k):
            acc = self.product(acc, a)
        return acc

    def conjugate(self, a: int, by: int) -> int:
        """``by * a * by^-1``."""
        return self.product(self.product(by, a), self.inverse(by))

    @property
    def element_orders(self) -> np.ndarray:
        if self._orders is None:
            orders = np.zeros(self.order, dtype=np.int64)
            if self._table is not None:
                ids = np.arange(self.order)
                cur = ids.copy()
                k = 1
                while (orders == 0).any():
                    orders[(cur == 0) & (orders == 0)] = k
                    cur = self._table[cur, ids]
                    k += 1
            else:
                for g in range(self.order):
                    x, k = g, 1
                    while x != 0:
                        x, k = self.product(x, g), k + 1
                    orders[g] = k
            self._orders = orders
        return self._orders

    def element_order(self, a: int) -> int:
        return int(self.element_orders[a])

    # -- representations --------------------------------------------------

    def rep(self, a: int):
        """Backend representation of element ``a`` (permutation, matrix or id)."""
        if self._reps is None:
            return a
        return self._reps[a]

    def id_of(self, rep) -> int:
        if self._rep_index is None:
            return int(rep)
        try:
            return self._rep_index[tuple(rep)]
        except KeyError:
            raise ValueError(f"{rep!r} is not an element of {self.spec}") from None

    def id_from_cycles(self, cycles: str) -> int:
        """Element id of a permutation written in cycle notation, e.g. ``"(0 1 2)(3 4)"``."""
        if self.kind != "permutation":
            raise ValueError("cycle notation needs a permutation backend")
        degree = len(self._reps[0])
        return self.id_of(perm_from_cycles(degree, cycles))

    # -- subgroups --------------------------------------------------------

    @property
    def lattice(self) -> "SubgroupLattice":
        if self._lattice is None:
            self._lattice = SubgroupLattice(self)
        return self._lattice

    def generates(self, elements: Iterable[int]) -> bool:
        lat = self.lattice
        sid = lat.trivial
        for g in elements:
            sid = lat.join(sid, int(g))
        return sid == lat.full

    @property
    def pair_generates(self) -> np.ndarray:
        """Boolean matrix ``M[a, b] = <a, b> == G``."""
        if self._pair_gen is None:
            lat = self.lattice
            cyc = [lat.cyclic(a) for a in range(self.order)]
            rows = {}
            out = np.zeros((self.order, self.order), dtype=bool)
            for a in range(self.order):
                sid = cyc[a]
                if sid not in rows:
                    rows[sid] = lat.join_row(sid) == lat.full
                out[a] = rows[sid]
            self._pair_gen = out
        return self._pair_gen

    def generating_tuple(self) -> tuple[int, ...]:
        """The id-lexicographically first generating tuple of minimal length."""
        if self._gen_tuple is None:
            self._gen_tuple = _first_generating_tuple(self)
        return self._gen_tuple

    @property
    def rank(self) -> int:
        """d(G), the minimal number of generators."""
        return len(self.generating_tuple())

    # -- automorphisms ----------------------------------------------------

    def automorphisms(self, cap: int = DEFAULT_AUT_CAP) -> list[Automorphism]:
        return [Automorphism(tuple(int(x) for x in row)) for row in self.aut_array_capped(cap)]

    def aut_array_capped(self, cap: int = DEFAULT_AUT_CAP) -> np.ndarray:
        if self._auts is None:
            self._auts = _enumerate_automorphisms(self, cap)
            gens = self.generating_tuple()
            self._aut_gens = gens
            self._aut_key = {
                tuple(int(x) for x in row[list(gens)]): i for i, row in enumerate(self._auts)
            }
        return self._auts

    @property
    def aut_array(self) -> np.ndarray:
        """All automorphisms as an ``(|Aut|, order)`` array; row 0 is the identity."""
        return self.aut_array_capped()

    @property
    def aut_count(self) -> int:
        return len(self.aut_array)

    def aut_index(self, image: Sequence[int] | np.ndarray) -> int:
        """Index of the automorphism whose full image list is ``image``."""
        gens = self._aut_gens_checked()
        return self._aut_key[tuple(int(image[g]) for g in gens)]

    def _aut_gens_checked(self) -> tuple[int, ...]:
        self.aut_array
        return self._aut_gens

    def aut_compose(self, s: int, t: int) -> int:
        """Index of the automorphism "apply ``s`` first, then ``t``"."""
        return int(self.aut_composition[s, t])

    @property
    def aut_composition(self) -> np.ndarray:
        if self._aut_compose is None:
            auts = self.aut_array
            gens = list(self._aut_gens_checked())
            m = len(auts)
            comp = np.zeros((m, m), dtype=np.int32)
            for s in range(m):
                # (s then t)(g) = t(s(g)); only generator images are needed
                imgs = auts[:, auts[s, gens]] if gens else np.zeros((m, 0), dtype=auts.dtype)
                for t in range(m):
                    comp[s, t] = self._aut_key[tuple(int(x) for x in imgs[t])]
            self._aut_compose = comp
        return self._aut_compose

    def aut_inverse(self, s: int) -> int:
        row = self.aut_array[s]
        inv = np.empty_like(row)
        inv[row] = np.arange(self.order, dtype=row.dtype)
        return self.aut_index(inv)

    def auts_mapping(self, src: Sequence[int], dst: Sequence[int]) -> np.ndarray:
        """Indices of all automorphisms sending ``src[i]`` to ``dst[i]`` for every i."""
        auts = self.aut_array
        mask = np.ones(len(auts), dtype=bool)
        for a, b in zip(src, dst):
            mask &= auts[:, a] == b
        return np.nonzero(mask)[0]

    # -- structure --------------------------------------------------------

    def is_abelian(self) -> bool:
        t = self.table
        return bool((t == t.T).all())

    def conjugacy_classes(self) -> list[list[int]]:
        t = self.table
        inv = self._inverses
        seen = np.zeros(self.order, dtype=bool)
        classes = []
        for g in range(self.order):
            if seen[g]:
                continue
            conj = np.unique(t[t[np.arange(self.order), g], inv])
            seen[conj] = True
            classes.append([int(x) for x in conj])
        return classes

    def normal_closure(self, g: int) -> frozenset[int]:
        t = self.table
        conj = np.unique(t[t[np.arange(self.order), g], self._inverses])
        return closure(self, conj.tolist())

    def is_simple_nonabelian(self) -> bool:
        """Exhaustive normal-closure scan over conjugacy class representatives."""
        if self.order == 1 or self.is_abelian():
            return False
        for cls in self.conjugacy_classes():
            if cls[0] == 0:
                continue
            if len(self.normal_closure(cls[0])) != self.order:
                return False
        return True


class SubgroupLattice:
    """Interned subgroups with a memoized ``join(subgroup, element)``.

    Subgroups are stored as boolean membership masks and identified by small
    integer ids; the trivial subgroup and the whole group are always present.
    """

    def __init__(self, group: FiniteGroup):
        self.group = group
        self.masks: list[np.ndarray] = []
        self.gens: list[tuple[int, ...]] = []
        self.sizes: list[int] = []
        self._index: dict[bytes, int] = {}
        self._join: dict[tuple[int, int], int] = {}
        self._rows: dict[int, np.ndarray] = {}
        triv = np.zeros(group.order, dtype=bool)
        triv[0] = True
        self.trivial = self._intern(triv, ())
        self.full = self._intern(np.ones(group.order, dtype=bool), ())
        # generators of the full group are filled lazily
        self._full_gens_known = False

    def _intern(self, mask: np.ndarray, gens: tuple[int, ...]) -> int:
        key = np.packbits(mask).tobytes()
        sid = self._index.get(key)
        if sid is None:
            sid = len(self.masks)
            self._index[key] = sid
            self.masks.append(mask)
            self.gens.append(gens)
            self.sizes.append(int(mask.sum()))
        return sid

    def size(self, sid: int) -> int:
        return self.sizes[sid]

    def contains(self, sid: int, g: int) -> bool:
        return bool(self.masks[sid][g])

    def cyclic(self, g: int) -> int:
        return self.join(self.trivial, g)

    def join(self, sid: int, g: int) -> int:
        if self.masks[sid][g]:
            return sid
        key = (sid, g)
        out = self._join.get(key)
        if out is None:
            gens = self.gens[sid] + (g,)
            mask = _closure_mask(self.group, gens)
            out = self._intern(mask, gens)
            self._join[key] = out
        return out

    def join_row(self, sid: int) -> np.ndarray:
        """``join(sid, g)`` for every element ``g`` as an int array."""
        row = self._rows.get(sid)
        if row is None:
            row = np.array([self.join(sid, g) for g in range(self.group.order)], dtype=np.int32)
            self._rows[sid] = row
        return row


def _closure_mask(G: FiniteGroup, gens: Sequence[int]) -> np.ndarray:
    seen = np.zeros(G.order, dtype=bool)
    seen[0] = True
    gens = sorted(set(int(g) for g in gens))
    if not gens:
        return seen
    if G.has_table:
        t = G.table
        gen_arr = np.array(gens)
        frontier = np.array([0])
        while frontier.size:
            nxt = t[frontier][:, gen_arr].ravel()
            nxt = np.unique(nxt[~seen[nxt]])
            seen[nxt] = True
            frontier = nxt
    else:
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = G.product(x, g)
                    if not seen[y]:
                        seen[y] = True
                        nxt.append(y)
            frontier = nxt
    return seen


def closure(G: FiniteGroup, gens: Iterable[int]) -> frozenset[int]:
    """The subgroup generated by ``gens`` (the trivial subgroup for no gens)."""
    gens = list(gens)
    for g in gens:
        if not 0 <= int(g) < G.order:
            raise ValueError(f"invalid element id {g} for {G.spec}")
    return frozenset(int(x) for x in np.nonzero(_closure_mask(G, gens))[0])


def _first_generating_tuple(G: FiniteGroup) -> tuple[int, ...]:
    if G.order == 1:
        return ()
    lat = G.lattice
    for a in range(G.order):
        if lat.cyclic(a) == lat.full:
            return (a,)
    pg = G.pair_generates
    hits = np.argwhere(pg)
    if len(hits):
        a, b = hits[0]
        return (int(a), int(b))
    # beyond rank 2: first lexicographic triple, then greedy extension
    if G.order ** 3 <= 2_000_000:
        for a in range(G.order):
            sa = lat.cyclic(a)
            for b in range(a, G.order):
                sab = lat.join(sa, b)
                row = lat.join_row(sab)
                full = np.nonzero(row == lat.full)[0]
                if len(full):
                    return (a, b, int(full[0]))
    gens: list[int] = []
    sid = lat.trivial
    while sid != lat.full:
        best = min(range(G.order), key=lambda g: (-lat.size(lat.join(sid, g)), g))
        gens.append(best)
        sid = lat.join(sid, best)
    return tuple(gens)


def _enumerate_automorphisms(G: FiniteGroup, cap: int) -> np.ndarray:
    gens = G.generating_tuple()
    order = G.order
    if not gens:
        return np.zeros((1, order), dtype=np.int32)
    t = G.table
    orders = G.element_orders

    # BFS spanning tree over the generating tuple, processed layer by layer
    parent = np.full(order, -1, dtype=np.int64)
    via = np.full(order, -1, dtype=np.int64)
    parent[0] = 0
    layers = []
    frontier = np.array([0])
    while frontier.size:
        nxt_p, nxt_g, nxt = [], [], []
        for j, g in enumerate(gens):
            cand = t[frontier, g]
            fresh = parent[cand] == -1
            # first writer wins inside a layer
            for x, p in zip(cand[fresh].tolist(), frontier[fresh].tolist()):
                if parent[x] == -1:
                    parent[x] = p
                    via[x] = j
                    nxt.append(x)
        frontier = np.array(nxt, dtype=np.int64)
        if frontier.size:
            layers.append(frontier)

    cands = [np.nonzero(orders == orders[g])[0] for g in gens]
    prod_orders = {
        (i, j): orders[t[gens[i], gens[j]]] for i in range(len(gens)) for j in range(len(gens)) if i < j
    }
    found = []

    def extend(chosen: list[int]) -> None:
        i = len(chosen)
        if i == len(gens):
            img = np.zeros(order, dtype=np.int64)
            for layer in layers:
                img[layer] = t[img[parent[layer]], np.array(chosen)[via[layer]]]
            if len(np.unique(img)) != order:
                return
            for j, g in enumerate(gens):
                if not np.array_equal(img[t[:, g]], t[img, chosen[j]]):
                    return
            found.append(img.astype(np.int32))
            if len(found) > cap:
                raise BudgetExceeded(f"{G.spec}: more than {cap} automorphisms")
            return
        for c in cands[i]:
            c = int(c)
            if any(orders[t[chosen[h], c]] != prod_orders[(h, i)] for h in range(i)):
                continue
            extend(chosen + [c])

    extend([])
    found.sort(key=lambda row: row.tolist())
    return np.array(found, dtype=np.int32)


# -- backends --------------------------------------------------------------


def perm_from_cycles(degree: int, cycles: str) -> Perm:
    img = list(range(degree))
    for cyc in re.findall(r"\(([^()]*)\)", cycles):
        pts = [int(x) for x in cyc.replace(",", " ").split()]
        for a, b in zip(pts, pts[1:] + pts[:1]):
            img[a] = b
    return tuple(img)


def _perm_closure(gens: Sequence[Perm], degree: int) -> list[Perm]:
    ident = tuple(range(degree))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = tuple(g[p[i]] for i in range(degree))
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    return sorted(seen)


def _compose(p: Perm, q: Perm) -> Perm:
    # apply p, then q
    return tuple(q[i] for i in p)


def permutation_group(spec: str, gens: Sequence[Perm], degree: int) -> FiniteGroup:
    if degree > _MAX_PERM_DEGREE:
        raise GroupSpecError(f"{spec}: permutation degree {degree} > {_MAX_PERM_DEGREE}")
    elements = _perm_closure(gens, degree)
    order = len(elements)
    index = {p: i for i, p in enumerate(elements)}
    if order > TABLE_LIMIT:
        return FiniteGroup(spec, "permutation", order, reps=elements, mul=_compose, rep_index=index)
    P = np.array(elements, dtype=np.int64).reshape(order, degree)
    weights = degree ** np.arange(degree - 1, -1, -1, dtype=np.int64)
    codes = P @ weights
    table = np.empty((order, order), dtype=np.int32)
    for g in range(order):
        # row h of P[:, P[g]] is "g then h"
        table[g] = np.searchsorted(codes, P[:, P[g]] @ weights)
    return FiniteGroup(spec, "permutation", order, table=table, reps=elements, mul=_compose, rep_index=index)


def _symmetric_gens(n: int) -> list[Perm]:
    if n < 2:
        return []
    gens = [perm_from_cycles(n, "(0 1)")]
    if n > 2:
        gens.append(perm_from_cycles(n, "(" + " ".join(map(str, range(n))) + ")"))
    return gens


def _alternating_gens(n: int) -> list[Perm]:
    return [perm_from_cycles(n, f"({i} {i + 1} {i + 2})") for i in range(n - 2)]


def _cyclic_gens(n: int) -> list[Perm]:
    return [perm_from_cycles(n, "(" + " ".join(map(str, range(n))) + ")")] if n > 1 else []


def _dihedral_gens(n: int) -> list[Perm]:
    refl = tuple((-i) % n for i in range(n))
    return _cyclic_gens(n) + [refl]


def _q8_gens() -> list[Perm]:
    # regular representation on the units ±1, ±i, ±j, ±k
    names = ["1", "i", "j", "k"]
    table = {
        ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
        ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
        ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
        ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1"),
    }
    units = [(s, u) for s in (1, -1) for u in names]
    pos = {u: i for i, u in enumerate(units)}

    def right_mult(g):
        out = []
        for s, u in units:
            s2, v = table[(u, g[1])]
            out.append(pos[(s * s2 * g[0], v)])
        return tuple(out)

    return [right_mult((1, "i")), right_mult((1, "j"))]


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, math.isqrt(p) + 1))


def _psl2_normalize(m: tuple[int, int, int, int], p: int) -> tuple[int, int, int, int]:
    first = next(x for x in m if x)
    if p - first < first:
        return tuple((-x) % p for x in m)
    return m


def psl2(spec: str, p: int) -> FiniteGroup:
    if not _is_prime(p):
        raise GroupSpecError(f"{spec}: PSL2(p) needs p prime, got {p}")
    mats = set()
    for a, b, c, d in itertools.product(range(p), repeat=4):
        if (a * d - b * c) % p == 1:
            mats.add(_psl2_normalize((a, b, c, d), p))
    ident = (1, 0, 0, 1)
    mats.discard(ident)
    elements = [ident] + sorted(mats)
    order = len(elements)
    index = {m: i for i, m in enumerate(elements)}

    def mul(x, y):
        a, b, c, d = x
        e, f, g, h = y
        return _psl2_normalize(
            ((a * e + b * g) % p, (a * f + b * h) % p, (c * e + d * g) % p, (c * f + d * h) % p), p
        )

    if order > TABLE_LIMIT:
        return FiniteGroup(spec, "psl2", order, reps=elements, mul=mul, rep_index=index)
    M = np.array(elements, dtype=np.int64)
    w = np.array([p**3, p**2, p, 1], dtype=np.int64)
    codes = M @ w
    lookup = np.full(p**4, -1, dtype=np.int32)
    lookup[codes] = np.arange(order, dtype=np.int32)
    a, b, c, d = (M[:, i] for i in range(4))
    table = np.empty((order, order), dtype=np.int32)
    for x in range(order):
        xa, xb, xc, xd = M[x]
        prod = np.stack(
            [(xa * a + xb * c) % p, (xa * b + xb * d) % p, (xc * a + xd * c) % p, (xc * b + xd * d) % p],
            axis=1,
        )
        first = np.where(prod[:, 0] != 0, prod[:, 0], np.where(prod[:, 1] != 0, prod[:, 1], prod[:, 2]))
        flip = (p - first) < first
        prod[flip] = (-prod[flip]) % p
        table[x] = lookup[prod @ w]
    return FiniteGroup(spec, "psl2", order, table=table, reps=elements, mul=mul, rep_index=index)


def validate_table(table: np.ndarray, *, rng: np.random.Generator | None = None) -> None:
    """Raise :class:`NotAGroupError` unless ``table`` is a group table with identity 0."""
    m = table.shape[0]
    if table.shape != (m, m) or m == 0:
        raise NotAGroupError("table must be square and non-empty")
    if table.min() < 0 or table.max() >= m:
        raise NotAGroupError("table entries out of range")
    ids = np.arange(m)
    if not (np.array_equal(table[0], ids) and np.array_equal(table[:, 0], ids)):
        raise NotAGroupError("element 0 is not the identity")
    srt_rows = np.sort(table, axis=1)
    srt_cols = np.sort(table, axis=0)
    if not (np.array_equal(srt_rows, np.broadcast_to(ids, (m, m)))
            and np.array_equal(srt_cols, np.broadcast_to(ids[:, None], (m, m)))):
        raise NotAGroupError("table is not a Latin square (inverses fail)")
    if m <= _ASSOC_EXHAUSTIVE:
        for a in range(m):
            # (a b) c == a (b c) for all b, c
            if not np.array_equal(table[table[a]], table[a][table]):
                raise NotAGroupError("product is not associative")
    else:
        rng = rng or np.random.default_rng(0)
        a, b, c = rng.integers(0, m, size=(3, 200_000))
        if not np.array_equal(table[table[a, b], c], table[a, table[b, c]]):
            raise NotAGroupError("product is not associative")


def read_table_file(path: str | Path) -> np.ndarray:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise GroupSpecError(f"cannot read table file {path}: {exc}") from exc
    tokens = text.split()
    try:
        nums = [int(x) for x in tokens]
    except ValueError as exc:
        raise NotAGroupError(f"{path}: non-integer token") from exc
    if not nums:
        raise NotAGroupError(f"{path}: empty file")
    m = nums[0]
    if m <= 0 or len(nums) != 1 + m * m:
        raise NotAGroupError(f"{path}: expected {m} rows of {m} entries")
    return np.array(nums[1:], dtype=np.int32).reshape(m, m)


def table_group(spec: str, table: np.ndarray) -> FiniteGroup:
    table = np.ascontiguousarray(table, dtype=np.int32)
    validate_table(table)
    return FiniteGroup(spec, "table", table.shape[0], table=table)


def _direct_product(spec: str, factors: list[FiniteGroup]) -> FiniteGroup:
    if all(f.kind == "permutation" for f in factors):
        gens, offset = [], 0
        degrees = [len(f.rep(0)) for f in factors]
        total = sum(degrees)
        for f, deg in zip(factors, degrees):
            for g in f.generating_tuple():
                p = f.rep(g)
                img = list(range(total))
                for i in range(deg):
                    img[offset + i] = offset + p[i]
                gens.append(tuple(img))
            offset += deg
        return permutation_group(spec, gens, total)
    table = factors[0].table
    for f in factors[1:]:
        m, k = table.shape[0], f.order
        big = table[:, None, :, None] * k + f.table[None, :, None, :]
        table = big.reshape(m * k, m * k)
        if table.shape[0] > TABLE_LIMIT:
            raise BudgetExceeded(f"{spec}: product order exceeds {TABLE_LIMIT}")
    return table_group(spec, table)


_SIMPLE = re.compile(r"^(S|A|C|D)(\d+)$")
_PSL = re.compile(r"^PSL2\((\d+)\)$")


def _split_product(spec: str) -> list[str]:
    parts, depth, cur = [], 0, ""
    for ch in spec:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "x" and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    return parts


def load_group(spec: str) -> FiniteGroup:
    """Parse ``spec`` and build the group; see the module docstring for syntax."""
    spec = spec.strip()
    if spec.startswith("table:"):
        return table_group(spec, read_table_file(spec[len("table:"):]))
    parts = _split_product(spec)
    if len(parts) > 1:
        if any(not p for p in parts):
            raise GroupSpecError(f"cannot parse group spec {spec!r}")
        return _direct_product(spec, [load_group(p) for p in parts])
    if spec == "Q8":
        return permutation_group(spec, _q8_gens(), 8)
    m = _PSL.match(spec)
    if m:
        return psl2(spec, int(m.group(1)))
    m = _SIMPLE.match(spec)
    if not m:
        raise GroupSpecError(f"cannot parse group spec {spec!r}")
    family, n = m.group(1), int(m.group(2))
    if n < 1:
        raise GroupSpecError(f"{spec}: parameter must be positive")
    if family == "S":
        return permutation_group(spec, _symmetric_gens(n), n)
    if family == "A":
        return permutation_group(spec, _alternating_gens(n), n)
    if family == "C":
        return permutation_group(spec, _cyclic_gens(n), n)
    if n < 3:
        raise GroupSpecError(f"{spec}: dihedral groups need n >= 3")
    return permutation_group(spec, _dihedral_gens(n), n)
