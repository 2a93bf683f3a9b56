"""The induced permutation action of Nielsen moves on class ids.

Every elementary move is turned into a permutation of ``{0..N-1}`` by moving
each class representative and re-canonicalizing.  On top of that: orbits,
k-transitivity by BFS over ordered k-tuples, and a Sym/Alt certification.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import BudgetExceeded, InternalInconsistency
from .tuples import ClassTable, canonical_codes
from .words import MoveSequence, NielsenMove

DEFAULT_KTRANS_BUDGET = 60_000_000
_CHUNK = 65_536


def generator_moves(n: int) -> list[NielsenMove]:
    """All elementary moves of rank ``n`` in a fixed order: R, L, P, I."""
    moves = []
    for kind in "RL":
        for i, j in itertools.permutations(range(1, n + 1), 2):
            for s in (1, -1):
                moves.append(NielsenMove(kind, i, j, s, n))
    for i, j in itertools.combinations(range(1, n + 1), 2):
        moves.append(NielsenMove("P", i, j, rank=n))
    for i in range(1, n + 1):
        moves.append(NielsenMove("I", i, rank=n))
    return moves


@dataclass
class InducedAction:
    """Permutations of class ids, one per elementary move."""

    size: int
    moves: list[NielsenMove]
    perms: np.ndarray  # (len(moves), size)
    table: ClassTable | None = field(default=None, repr=False)

    def perm(self, move: NielsenMove) -> np.ndarray:
        return self.perms[self.moves.index(move)]

    def permutation_of(self, seq: MoveSequence) -> np.ndarray:
        """Induced permutation of a whole move sequence, computed on representatives."""
        if self.table is None:
            perm = np.arange(self.size)
            for mv in seq.moves:
                perm = self.perm(mv)[perm]
            return perm
        moved = seq.apply_array(self.table.reps, self.table.group)
        return _lookup(self.table, moved)


def _lookup(table: ClassTable, tuples: np.ndarray) -> np.ndarray:
    ids = table.classes_of(tuples)
    if (ids < 0).any():
        raise InternalInconsistency("a Nielsen move produced a non-generating tuple")
    return ids


def induced_generators(table: ClassTable, samples: int = 200, seed: int = 0) -> InducedAction:
    """Build the action and spot-check independence of the representative."""
    G = table.group
    reps = table.reps
    moves = generator_moves(table.rank)
    perms = np.stack([_lookup(table, mv.apply_array(reps, G)) for mv in moves])
    action = InducedAction(len(table), moves, perms, table)
    rng = np.random.default_rng(seed)
    auts = G.aut_array
    for _ in range(samples if len(table) else 0):
        c = int(rng.integers(len(table)))
        s = int(rng.integers(len(auts)))
        m = int(rng.integers(len(moves)))
        other = auts[s][reps[c]]
        img = _lookup(table, moves[m].apply_array(other[None], G))[0]
        if img != perms[m, c]:
            raise InternalInconsistency(f"move {moves[m]} not well defined on class {c}")
    return action


def orbit_partition(action: InducedAction) -> list[list[int]]:
    """Orbits as sorted lists, ordered by their least class id."""
    N = action.size
    if N == 0:
        return []
    rows = np.tile(np.arange(N), len(action.perms))
    cols = action.perms.ravel()
    graph = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(N, N))
    _, labels = connected_components(graph, directed=True, connection="weak")
    orbits: dict[int, list[int]] = {}
    for x, lab in enumerate(labels.tolist()):
        orbits.setdefault(lab, []).append(x)
    return sorted(orbits.values(), key=lambda o: o[0])


@dataclass(frozen=True)
class KTransitivity:
    k: int
    transitive: bool
    orbit_count: int
    states: int


def k_transitivity(action: InducedAction, k: int, budget: int = DEFAULT_KTRANS_BUDGET) -> KTransitivity:
    """Orbits of the diagonal action on ordered k-tuples of distinct points."""
    N = action.size
    if k < 1:
        raise ValueError("k must be positive")
    if k > N:
        raise ValueError(f"k = {k} exceeds the number of points {N}")
    total = N**k
    if total > budget:
        raise BudgetExceeded(f"{N}^{k} = {total} tuple states exceed budget {budget}")
    weights = N ** np.arange(k - 1, -1, -1, dtype=np.int64)
    codes = np.arange(total, dtype=np.int64)
    digits = (codes[:, None] // weights[None, :]) % N
    valid = np.ones(total, dtype=bool)
    for a, b in itertools.combinations(range(k), 2):
        valid &= digits[:, a] != digits[:, b]
    del digits, codes
    states = int(valid.sum())
    seen = ~valid
    perms = action.perms
    orbit_count = 0
    start = 0
    while True:
        rest = np.nonzero(~seen[start:])[0]
        if not len(rest):
            break
        start += int(rest[0])
        orbit_count += 1
        seen[start] = True
        frontier = np.array([start], dtype=np.int64)
        while len(frontier):
            fresh = []
            for lo in range(0, len(frontier), _CHUNK):
                block = frontier[lo:lo + _CHUNK]
                dig = (block[:, None] // weights[None, :]) % N
                images = (perms[:, dig] @ weights).ravel()  # (gens * M,)
                images = np.unique(images[~seen[images]])
                seen[images] = True
                fresh.append(images)
            frontier = np.concatenate(fresh)
    return KTransitivity(k, orbit_count == 1, orbit_count, states)


# -- permutation group certification -------------------------------------


def _compose(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Apply ``a`` first, then ``b``."""
    return b[a]


def _invert(a: np.ndarray) -> np.ndarray:
    inv = np.empty_like(a)
    inv[a] = np.arange(len(a))
    return inv


def cycle_type(p: np.ndarray) -> list[int]:
    seen = np.zeros(len(p), dtype=bool)
    lengths = []
    for x in range(len(p)):
        if seen[x]:
            continue
        n = 0
        y = x
        while not seen[y]:
            seen[y] = True
            y = p[y]
            n += 1
        lengths.append(n)
    return lengths


def is_odd(p: np.ndarray) -> bool:
    return (len(p) - len(cycle_type(p))) % 2 == 1


class BSGS:
    """Deterministic Schreier-Sims: base, strong generators and transversals."""

    def __init__(self, gens: Sequence[np.ndarray], degree: int):
        self.degree = degree
        ident = np.arange(degree)
        self.base: list[int] = []
        self.strong: list[np.ndarray] = [np.asarray(g) for g in gens if not np.array_equal(g, ident)]
        self.trans: list[dict[int, np.ndarray]] = []
        for g in self.strong:
            if all(g[b] == b for b in self.base):
                self.base.append(int(np.nonzero(g != ident)[0][0]))
        self._run()

    def _level_gens(self, i: int) -> list[np.ndarray]:
        fixed = self.base[:i]
        return [g for g in self.strong if all(g[b] == b for b in fixed)]

    def _orbit(self, i: int) -> dict[int, np.ndarray]:
        b = self.base[i]
        trans = {b: np.arange(self.degree)}
        queue = [b]
        gens = self._level_gens(i)
        while queue:
            p = queue.pop(0)
            for s in gens:
                q = int(s[p])
                if q not in trans:
                    trans[q] = _compose(trans[p], s)
                    queue.append(q)
        return trans

    def sift(self, g: np.ndarray, start: int = 0) -> tuple[np.ndarray, int]:
        for lvl in range(start, len(self.base)):
            x = int(g[self.base[lvl]])
            u = self.trans[lvl].get(x)
            if u is None:
                return g, lvl
            g = _compose(g, _invert(u))
        return g, len(self.base)

    def _run(self) -> None:
        ident = np.arange(self.degree)
        self.trans = [dict() for _ in self.base]
        for lvl in range(len(self.base) - 1, -1, -1):
            self.trans[lvl] = self._orbit(lvl)
        i = len(self.base) - 1
        while i >= 0:
            self.trans[i] = self._orbit(i)
            restarted = False
            for p, u in list(self.trans[i].items()):
                for s in self._level_gens(i):
                    schreier = _compose(_compose(u, s), _invert(self.trans[i][int(s[p])]))
                    h, j = self.sift(schreier, i + 1)
                    if j < len(self.base) or not np.array_equal(h, ident):
                        self.strong.append(h)
                        if j == len(self.base):
                            self.base.append(int(np.nonzero(h != ident)[0][0]))
                            self.trans.append({self.base[-1]: ident.copy()})
                        for lvl in range(j, i, -1):
                            self.trans[lvl] = self._orbit(lvl)
                        i = j
                        restarted = True
                        break
                if restarted:
                    break
            if not restarted:
                i -= 1

    @property
    def order(self) -> int:
        return math.prod(len(t) for t in self.trans)

    def contains(self, g: np.ndarray) -> bool:
        h, j = self.sift(np.asarray(g))
        return j == len(self.base) and np.array_equal(h, np.arange(self.degree))


@dataclass(frozen=True)
class Certification:
    verdict: str  # "Sym", "Alt", "Other" or "Unknown"
    method: str
    degree: int
    order: int | None = None
    jordan_prime: int | None = None
    note: str = ""

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "method": self.method,
            "degree": self.degree,
            "order": str(self.order) if self.order is not None else None,
            "jordan_prime": self.jordan_prime,
            "note": self.note,
        }


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, math.isqrt(p) + 1))


def _jordan_element(gens: list[np.ndarray], N: int, rng: np.random.Generator, trials: int):
    """Search random products for an element with a power that is a p-cycle, p prime <= N-3."""
    state = [g.copy() for g in gens] * max(1, 10 // max(1, len(gens)))
    for _ in range(trials):
        # product replacement on a small pool
        a, b = rng.choice(len(state), size=2, replace=False) if len(state) > 1 else (0, 0)
        state[a] = _compose(state[a], state[b] if rng.random() < 0.5 else _invert(state[b]))
        g = state[a]
        lengths = cycle_type(g)
        for p in sorted(set(lengths), reverse=True):
            if p > N - 3 or not _is_prime(p) or lengths.count(p) != 1:
                continue
            if any(L % p == 0 for L in lengths if L != p):
                continue
            m = math.lcm(*[L for L in lengths if L != p]) if len(lengths) > 1 else 1
            power = np.arange(N)
            base = g.copy()
            e = m
            while e:
                if e & 1:
                    power = _compose(power, base)
                base = _compose(base, base)
                e >>= 1
            ct = cycle_type(power)
            if sorted(ct) == [1] * (N - p) + [p]:
                return p
    return None


def certify_alt_or_sym(
    action: InducedAction,
    *,
    bsgs_degree_limit: int = 120,
    ktrans_budget: int = DEFAULT_KTRANS_BUDGET,
    trials: int = 20_000,
    seed: int = 0,
) -> Certification:
    """Decide whether the generated group is the full Sym or Alt on the points.

    Small degrees get an exact Schreier-Sims order.  Above the limit a
    2-transitive group is certified through Jordan's theorem: a primitive
    group containing a p-cycle, p prime and p <= N-3, contains Alt(N).
    """
    N = action.size
    gens = [p for p in action.perms]
    if N <= 1:
        return Certification("Sym", "trivial", N, order=1)
    if len(orbit_partition(action)) != 1:
        return Certification("Other", "orbits", N, note="intransitive")
    any_odd = any(is_odd(g) for g in gens)
    if N <= bsgs_degree_limit:
        order = BSGS(gens, N).order
        full = math.factorial(N)
        if order == full:
            verdict = "Sym"
        elif 2 * order == full and not any_odd:
            verdict = "Alt"
        else:
            verdict = "Other"
        return Certification(verdict, "bsgs", N, order=order)
    if N >= 4:
        try:
            two = k_transitivity(action, 2, budget=ktrans_budget)
        except BudgetExceeded:
            return Certification("Unknown", "jordan", N, note="2-transitivity beyond budget")
        if not two.transitive:
            return Certification("Other", "jordan", N, note="not 2-transitive")
    p = _jordan_element(gens, N, np.random.default_rng(seed), trials)
    if p is None:
        return Certification("Unknown", "jordan", N, note=f"no prime cycle found in {trials} trials")
    verdict = "Sym" if any_odd else "Alt"
    return Certification(verdict, "jordan", N, jordan_prime=p)
