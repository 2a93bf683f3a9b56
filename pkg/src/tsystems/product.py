"""Breadth-first search in direct powers ``G^c`` of a tabled group.

A state is a ``c``-vector of element ids packed into one integer
``sum(s_i * order**i)``.  Generators act by right multiplication, so the
word read along a BFS path evaluates, coordinatewise, to the reached state.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import BudgetExceeded, Unreachable
from .groups import FiniteGroup

DENSE_LIMIT = 1 << 27
DEFAULT_BUDGET = 50_000_000
DEFAULT_MITM_THRESHOLD = 5_000_000


class ProductSpace:
    def __init__(self, G: FiniteGroup, width: int):
        self.G = G
        self.width = width
        self.order = G.order
        self.size = G.order ** width
        if self.size >= 1 << 62:
            raise BudgetExceeded(f"{G.spec}^{width} does not fit packed 64-bit states")
        self.weights = (G.order ** np.arange(width, dtype=np.int64)).astype(np.int64)

    def encode(self, states: np.ndarray) -> np.ndarray:
        return states.astype(np.int64) @ self.weights

    def decode(self, codes: np.ndarray) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        out = np.empty(codes.shape + (self.width,), dtype=np.int64)
        rest = codes.copy()
        for i in range(self.width):
            out[..., i] = rest % self.order
            rest //= self.order
        return out

    def step(self, states: np.ndarray, gens: np.ndarray) -> np.ndarray:
        """``(M, c)`` states times ``(g, c)`` generators -> ``(M, g, c)``."""
        return self.G.table[states[:, None, :], gens[None, :, :]]


def _as_gens(G: FiniteGroup, gens: Sequence[Sequence[int]]) -> np.ndarray:
    arr = np.asarray(gens, dtype=np.int64)
    if arr.size == 0:
        return arr.reshape(0, arr.shape[-1] if arr.ndim == 2 else 0)
    if arr.ndim != 2:
        raise ValueError("generators must be a 2-d array of element ids")
    return arr


def closure_size(G: FiniteGroup, gens: Sequence[Sequence[int]], budget: int = DEFAULT_BUDGET) -> int:
    """Order of the subgroup of ``G^c`` generated by the given ``c``-vectors."""
    gens = _as_gens(G, gens)
    if gens.shape[0] == 0:
        return 1
    space = ProductSpace(G, gens.shape[1])
    if space.size > budget:
        raise BudgetExceeded(f"closure in {G.spec}^{space.width} ({space.size} states) exceeds budget {budget}")
    visited = np.zeros(space.size, dtype=bool)
    visited[0] = True
    frontier = np.zeros((1, space.width), dtype=np.int64)
    count = 1
    while len(frontier):
        nxt = space.step(frontier, gens).reshape(-1, space.width)
        codes = space.encode(nxt)
        fresh = ~visited[codes]
        codes, idx = np.unique(codes[fresh], return_index=True)
        visited[codes] = True
        count += len(codes)
        frontier = nxt[fresh][idx]
    return count


def _reconstruct(space: ProductSpace, via: dict | np.ndarray, code: int, inv_gens: np.ndarray) -> list[int]:
    path = []
    state = space.decode(np.array([code]))[0]
    t = space.G.table
    while True:
        c = int(space.encode(state[None])[0])
        g = int(via[c]) - 1
        if g < 0:
            break
        path.append(g)
        state = t[state, inv_gens[g]]
    path.reverse()
    return path


def shortest_word(
    G: FiniteGroup,
    gens: Sequence[Sequence[int]],
    target: Sequence[int],
    *,
    budget: int = DEFAULT_BUDGET,
    mitm_threshold: int = DEFAULT_MITM_THRESHOLD,
) -> list[int]:
    """Generator indices of a shortest word reaching ``target`` from the identity.

    Plain BFS returns the lexicographically least shortest word (generators
    compared by index).  Above ``mitm_threshold`` states a bidirectional
    search is used, which still returns a shortest word but only breaks ties
    deterministically.  Raises :class:`Unreachable` when BFS exhausts the
    generated subgroup without meeting the target.
    """
    gens = _as_gens(G, gens)
    target = np.asarray(target, dtype=np.int64)
    space = ProductSpace(G, len(target))
    if gens.size and gens.shape[1] != space.width:
        raise ValueError("generator width does not match target width")
    if not target.any():
        return []
    if len(gens) == 0:
        raise Unreachable("no generators", subgroup_size=1)
    inv_gens = G.inverses[gens]
    if space.size > mitm_threshold:
        return _bidirectional(space, gens, inv_gens, target, budget)
    if space.size > budget:
        raise BudgetExceeded(f"word search in {G.spec}^{space.width} exceeds budget {budget}")
    goal = int(space.encode(target[None])[0])
    ng = len(gens)
    via = np.zeros(space.size, dtype=np.int16)
    seen = np.zeros(space.size, dtype=bool)
    seen[0] = True
    frontier = np.zeros((1, space.width), dtype=np.int64)
    count = 1
    while len(frontier):
        nxt = space.step(frontier, gens)  # (M, g, c)
        codes = space.encode(nxt.reshape(-1, space.width))
        fresh_mask = ~seen[codes]
        order_idx = np.nonzero(fresh_mask)[0]
        uniq, first = np.unique(codes[order_idx], return_index=True)
        keep = np.sort(order_idx[first])  # first occurrence in (frontier, generator) order
        new_codes = codes[keep]
        seen[new_codes] = True
        via[new_codes] = (keep % ng) + 1
        count += len(new_codes)
        if seen[goal]:
            return _reconstruct(space, via, goal, inv_gens)
        frontier = nxt.reshape(-1, space.width)[keep]
    raise Unreachable(
        f"target not in the generated subgroup of {G.spec}^{space.width}", subgroup_size=count
    )


def _bidirectional(space, gens, inv_gens, target, budget) -> list[int]:
    t = space.G.table
    width = space.width
    ng = len(gens)
    goal = int(space.encode(target[None])[0])
    # forward: state reached by word u; backward: state s with s * v == target
    fwd = {0: 0}
    bwd = {goal: 0}
    fdepth = {0: 0}
    bdepth = {goal: 0}
    ffront = np.zeros((1, width), dtype=np.int64)
    bfront = target[None].copy()
    depth_f = depth_b = 0
    total = 2
    while len(ffront) and len(bfront):
        forward = len(ffront) <= len(bfront)
        front, table_gens = (ffront, gens) if forward else (bfront, inv_gens)
        seen, depth_map = (fwd, fdepth) if forward else (bwd, bdepth)
        nxt = t[front[:, None, :], table_gens[None, :, :]].reshape(-1, width)
        codes = space.encode(nxt)
        new_states, new_codes = [], []
        depth = (depth_f if forward else depth_b) + 1
        for idx, c in enumerate(codes.tolist()):
            if c not in seen:
                seen[c] = idx % ng + 1
                depth_map[c] = depth
                new_codes.append(c)
                new_states.append(idx)
        total += len(new_codes)
        if total > budget:
            raise BudgetExceeded(f"bidirectional search exceeded budget {budget}")
        if forward:
            depth_f = depth
            ffront = nxt[new_states]
        else:
            depth_b = depth
            bfront = nxt[new_states]
        other, other_depth = (bwd, bdepth) if forward else (fwd, fdepth)
        meets = [c for c in new_codes if c in other]
        if meets:
            best = min(meets, key=lambda c: (depth + other_depth[c], c))
            return _join_paths(space, fwd, bwd, best, gens, inv_gens, goal)
    size = len(fwd) if not len(ffront) else len(bwd)
    raise Unreachable("target not in the generated subgroup", subgroup_size=size)


def _join_paths(space, fwd, bwd, meet, gens, inv_gens, goal) -> list[int]:
    t = space.G.table
    left = _reconstruct(space, _DictVia(fwd), meet, inv_gens)
    right = []
    state = space.decode(np.array([meet]))[0]
    c = meet
    while c != goal:
        g = bwd[c] - 1
        # backward step was s' = s * gen^-1, so undo with * gen
        right.append(g)
        state = t[state, gens[g]]
        c = int(space.encode(state[None])[0])
    return left + right


class _DictVia:
    def __init__(self, d: dict):
        self.d = d

    def __getitem__(self, code: int) -> int:
        return self.d[code]
