"""Generating tuples, their Aut(G)-classes, and generation of direct powers.

Covers enumeration of ``V_n(G)``, the class table ``V_n(G)/Aut(G)``, the
Hall-style criterion for a matrix to generate ``G^k`` through its rows, spread
witnesses, ``d(G^k)``, and two matrix constructions: constant-row matrices
with a distinct last row, and the greedy column-by-column matrix whose
entries pairwise generate while no two columns are related by an
automorphism on any three rows.
"""

from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from . import __version__
from .errors import BudgetExceeded, InternalInconsistency, MatrixExhausted, NotSimpleError
from .groups import FiniteGroup, load_group
from .product import closure_size

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 50_000_000
_CANON_CHUNK = 1 << 22


# -- packing -------------------------------------------------------------


def encode(tuples: np.ndarray, order: int) -> np.ndarray:
    """Big-endian packing: integer order matches lexicographic tuple order."""
    tuples = np.asarray(tuples, dtype=np.int64)
    n = tuples.shape[-1]
    w = order ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return tuples @ w


def decode(codes: np.ndarray, order: int, n: int) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64)
    out = np.empty(codes.shape + (n,), dtype=np.int64)
    rest = codes.copy()
    for i in range(n - 1, -1, -1):
        out[..., i] = rest % order
        rest //= order
    return out


# -- V_n(G) --------------------------------------------------------------


def _generating_codes(G: FiniteGroup, n: int, budget: int) -> np.ndarray:
    if n < 1:
        raise ValueError("rank must be at least 1")
    if G.order ** n > budget:
        raise BudgetExceeded(f"|{G.spec}|^{n} = {G.order ** n} exceeds budget {budget}")
    lat = G.lattice
    sids = np.array([lat.cyclic(a) for a in range(G.order)], dtype=np.int32)
    for _ in range(n - 1):
        uniq, inv = np.unique(sids, return_inverse=True)
        rows = np.stack([lat.join_row(int(s)) for s in uniq])
        sids = rows[inv].ravel()
    return np.nonzero(sids == lat.full)[0].astype(np.int64)


def enumerate_generating_tuples(G: FiniteGroup, n: int, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """All generating ``n``-tuples as an ``(M, n)`` array in lexicographic order."""
    return decode(_generating_codes(G, n, budget), G.order, n)


def count_generating_tuples(G: FiniteGroup, n: int, budget: int = DEFAULT_BUDGET) -> int:
    return len(_generating_codes(G, n, budget))


def iter_generating_tuples(G: FiniteGroup, n: int, budget: int = DEFAULT_BUDGET) -> Iterator[tuple[int, ...]]:
    codes = _generating_codes(G, n, budget)
    for start in range(0, len(codes), 65536):
        for row in decode(codes[start:start + 65536], G.order, n).tolist():
            yield tuple(row)


# -- canonical forms -----------------------------------------------------


def canonical_codes(G: FiniteGroup, tuples: np.ndarray) -> np.ndarray:
    """Packed lexicographically least member of each tuple's Aut(G)-orbit."""
    tuples = np.atleast_2d(np.asarray(tuples, dtype=np.int64))
    auts = G.aut_array
    n = tuples.shape[1]
    w = G.order ** np.arange(n - 1, -1, -1, dtype=np.int64)
    out = np.empty(len(tuples), dtype=np.int64)
    chunk = max(1, _CANON_CHUNK // max(1, len(auts) * n))
    for start in range(0, len(tuples), chunk):
        block = tuples[start:start + chunk]
        images = auts[:, block].astype(np.int64)  # (A, M, n)
        out[start:start + chunk] = (images @ w).min(axis=0)
    return out


def canonical(G: FiniteGroup, g: Sequence[int]) -> tuple[int, ...]:
    code = canonical_codes(G, np.array([g]))[0]
    return tuple(int(x) for x in decode(np.array([code]), G.order, len(g))[0])


@dataclass
class ClassTable:
    """Aut(G)-classes of generating ``n``-tuples with canonical representatives.

    ``reps[c]`` is the lexicographically least tuple of class ``c`` and class
    ids follow the sorted order of representatives.
    """

    group: FiniteGroup
    rank: int
    codes: np.ndarray
    generating_count: int

    @property
    def reps(self) -> np.ndarray:
        return decode(self.codes, self.group.order, self.rank)

    def __len__(self) -> int:
        return len(self.codes)

    @property
    def free_action(self) -> bool:
        return len(self.codes) * self.group.aut_count == self.generating_count

    def rep(self, c: int) -> tuple[int, ...]:
        return tuple(int(x) for x in decode(self.codes[c:c + 1], self.group.order, self.rank)[0])

    def classes_of(self, tuples: np.ndarray) -> np.ndarray:
        """Class id of each row; ``-1`` for tuples that do not generate."""
        canon = canonical_codes(self.group, tuples)
        idx = np.searchsorted(self.codes, canon)
        idx = np.minimum(idx, len(self.codes) - 1)
        return np.where(self.codes[idx] == canon, idx, -1)

    def class_of(self, g: Sequence[int]) -> int:
        c = int(self.classes_of(np.array([g]))[0])
        if c < 0:
            raise ValueError(f"{tuple(g)} does not generate {self.group.spec}")
        return c

    def dump(self, path: str | Path) -> None:
        lines = [
            "# tsystems class table",
            f"group {self.group.spec}",
            f"rank {self.rank}",
            f"version {__version__}",
            f"generating {self.generating_count}",
            f"classes {len(self)}",
        ]
        for c, row in enumerate(self.reps.tolist()):
            lines.append(f"{c} " + " ".join(map(str, row)))
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path: str | Path, group: FiniteGroup | None = None) -> "ClassTable":
        header: dict[str, str] = {}
        rows = []
        for line in Path(path).read_text().splitlines():
            if not line or line.startswith("#"):
                continue
            head, _, rest = line.partition(" ")
            if head.isdigit():
                rows.append([int(x) for x in rest.split()])
            else:
                header[head] = rest
        if header.get("version") != __version__:
            raise ValueError(f"{path}: cache written by version {header.get('version')}")
        G = group or load_group(header["group"])
        if G.spec != header["group"]:
            raise ValueError(f"{path}: cache is for {header['group']}, not {G.spec}")
        n = int(header["rank"])
        reps = np.array(rows, dtype=np.int64).reshape(-1, n)
        return cls(G, n, encode(reps, G.order), int(header["generating"]))


def class_table(G: FiniteGroup, n: int, budget: int = DEFAULT_BUDGET) -> ClassTable:
    """Build (or fetch from the group's in-memory cache) the class table."""
    table = G.class_tables.get(n)
    if table is None:
        codes = _generating_codes(G, n, budget)
        tuples = decode(codes, G.order, n)
        canon = canonical_codes(G, tuples)
        table = ClassTable(G, n, np.unique(canon), len(codes))
        if not table.free_action:
            log.warning("%s: Aut(G) does not act freely on V_%d", G.spec, n)
        G.class_tables[n] = table
    return table


# -- matrices ------------------------------------------------------------


@dataclass
class GenMatrix:
    """An ``n x k`` matrix over ``G``; columns are meant to be generating ``n``-tuples."""

    entries: np.ndarray
    group: FiniteGroup

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=np.int64)
        if self.entries.ndim != 2:
            raise ValueError("matrix entries must be 2-dimensional")

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def k(self) -> int:
        return self.entries.shape[1]

    def column(self, i: int) -> tuple[int, ...]:
        return tuple(int(x) for x in self.entries[:, i])

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(i) for i in range(self.k)]

    def rows(self, which: Sequence[int] | None = None) -> "GenMatrix":
        which = range(self.n) if which is None else list(which)
        return GenMatrix(self.entries[list(which)], self.group)

    def to_json(self) -> str:
        return json.dumps(
            {"group": self.group.spec, "n": self.n, "k": self.k, "entries": self.entries.ravel().tolist()}
        )

    @classmethod
    def from_json(cls, text: str, group: FiniteGroup | None = None) -> "GenMatrix":
        data = json.loads(text)
        G = group or load_group(data["group"])
        entries = np.array(data["entries"], dtype=np.int64).reshape(data["n"], data["k"])
        return cls(entries, G)


@dataclass(frozen=True)
class HallReport:
    columns_generate: bool
    classes_distinct: bool
    diagonal_surjective: bool
    closure_size: int
    target_size: int

    def as_dict(self) -> dict:
        return {
            "columns_generate": self.columns_generate,
            "classes_distinct": self.classes_distinct,
            "diagonal_surjective": self.diagonal_surjective,
            "closure_size": self.closure_size,
            "target_size": self.target_size,
        }


def classes_distinct(A: GenMatrix) -> bool:
    canon = canonical_codes(A.group, A.entries.T)
    return len(np.unique(canon)) == A.k


def hall_check(A: GenMatrix, budget: int = DEFAULT_BUDGET) -> HallReport:
    """Compare class-distinctness of the columns with generation of ``G^k`` by the rows.

    When every column generates the two must agree; a disagreement raises
    :class:`InternalInconsistency`.
    """
    G = A.group
    cols_gen = all(G.generates(col) for col in A.columns())
    distinct = classes_distinct(A)
    size = closure_size(G, A.entries, budget=budget)
    target = G.order ** A.k
    surjective = size == target
    if cols_gen and distinct != surjective:
        raise InternalInconsistency(
            f"class distinctness ({distinct}) disagrees with diagonal surjectivity ({surjective})"
        )
    return HallReport(cols_gen, distinct, surjective, size, target)


def spread_witness(G: FiniteGroup, gs: Sequence[int]) -> int | None:
    """Least ``h`` with ``<h, g> = G`` for every ``g`` in ``gs``, or ``None``.

    Cyclic groups never have a witness: spread is only defined for
    noncyclic ``G``.
    """
    if G.rank <= 1:
        return None
    pg = G.pair_generates
    ok = np.ones(G.order, dtype=bool)
    for g in gs:
        ok &= pg[:, g]
    hits = np.nonzero(ok)[0]
    return int(hits[0]) if len(hits) else None


def d_power(G: FiniteGroup, k: int, budget: int = DEFAULT_BUDGET) -> int:
    """Minimal number of generators of ``G^k`` for finite simple nonabelian ``G``.

    Uses ``d(G^k) = min{n : |V_n(G)/Aut(G)| >= k}``.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if not G.is_simple_nonabelian():
        raise NotSimpleError(f"{G.spec} is not simple nonabelian")
    n = G.rank
    while len(class_table(G, n, budget)) < k:
        n += 1
    return n


def diagonal_pair_matrix(G: FiniteGroup, a: int, b: int, cs: Sequence[int]) -> GenMatrix:
    """Rows ``(a,..,a)``, ``(b,..,b)``, ``(c_1,..,c_k)``: columns are pairwise class-distinct."""
    if not G.generates((a, b)):
        raise ValueError(f"<{a}, {b}> is not all of {G.spec}")
    if len(set(cs)) != len(cs):
        raise ValueError("the last row must have pairwise distinct entries")
    k = len(cs)
    return GenMatrix(np.array([[a] * k, [b] * k, list(cs)]), G)


# -- relation ledger and the greedy matrix -------------------------------


@dataclass
class RelationLedger:
    """Automorphisms relating matrix columns.

    ``near[(i, j)]`` lists ``(sigma, s, t)``: rows ``s < t`` of column ``j``
    are the image under ``sigma`` of the same rows of column ``i``.
    ``xi[(i, j)]`` holds every composite along a chain of near columns from
    ``i`` to ``j`` (first step applied first).  Both are kept for ordered
    pairs, so ``sigma in xi[(i, j)]`` iff ``sigma^-1 in xi[(j, i)]``.
    """

    near: dict[tuple[int, int], set[tuple[int, int, int]]] = field(default_factory=dict)
    xi: dict[tuple[int, int], frozenset[int]] = field(default_factory=dict)

    def related(self, i: int, j: int) -> frozenset[int]:
        return self.xi.get((i, j), frozenset())

    def as_dict(self) -> dict:
        return {
            "near": {f"{i},{j}": sorted(v) for (i, j), v in sorted(self.near.items())},
            "xi": {f"{i},{j}": sorted(v) for (i, j), v in sorted(self.xi.items())},
        }


def near_relations(G: FiniteGroup, entries: np.ndarray) -> dict[tuple[int, int], set[tuple[int, int, int]]]:
    """Near relations of a (possibly partial, ``-1`` = empty) matrix."""
    n, k = entries.shape
    near: dict[tuple[int, int], set[tuple[int, int, int]]] = {}
    for i, j in itertools.permutations(range(k), 2):
        for s, t in itertools.combinations(range(n), 2):
            src = entries[[s, t], i]
            dst = entries[[s, t], j]
            if (src < 0).any() or (dst < 0).any():
                continue
            for sigma in G.auts_mapping(src, dst).tolist():
                near.setdefault((i, j), set()).add((sigma, s, t))
    return near


def related_sets(G: FiniteGroup, near: dict, k: int) -> dict[tuple[int, int], frozenset[int]]:
    """Compose near automorphisms along simple column chains."""
    edges: dict[int, list[tuple[int, int]]] = {}
    for (i, j), ws in near.items():
        for sigma in sorted({w[0] for w in ws}):
            edges.setdefault(i, []).append((j, sigma))
    xi: dict[tuple[int, int], set[int]] = {}
    for start in range(k):
        stack = [(start, 0, frozenset([start]))]
        while stack:
            node, acc, used = stack.pop()
            for nxt, sigma in edges.get(node, []):
                if nxt in used:
                    continue
                comp = G.aut_compose(acc, sigma)
                xi.setdefault((start, nxt), set()).add(comp)
                stack.append((nxt, comp, used | {nxt}))
    return {key: frozenset(v) for key, v in xi.items()}


def build_ledger(G: FiniteGroup, entries: np.ndarray) -> RelationLedger:
    near = near_relations(G, entries)
    return RelationLedger(near, related_sets(G, near, entries.shape[1]))


def _clique_bound(G: FiniteGroup, need: int) -> None:
    if G.order > 200:
        return
    import networkx as nx

    pg = G.pair_generates
    graph = nx.Graph()
    graph.add_nodes_from(range(G.order))
    graph.add_edges_from(zip(*np.nonzero(np.triu(pg, 1))))
    clique, _ = nx.max_weight_clique(graph, weight=None)
    if len(clique) < need:
        raise MatrixExhausted(
            f"{G.spec}: at most {len(clique)} elements pairwise generate, "
            f"but the matrix has {need} entries and every two of them must generate"
        )


def build_matrix(
    G: FiniteGroup,
    n: int,
    k: int,
    seed: int = 0,
    *,
    node_budget: int = 200_000,
    check_clique: bool = True,
) -> tuple[GenMatrix, RelationLedger]:
    """Fill an ``n x k`` matrix column by column so that

    1. every two entries generate ``G``;
    2. every three rows generate ``G^k``;
    3. no 4x4 minor carries the cyclic configuration of four columns that
       agree, up to automorphisms, with a single virtual column off a
       diagonal.

    Each new entry avoids the images of the entry in the same row of every
    earlier column under all automorphisms relating that column to the
    current one.  Candidates are tried in a seed-shuffled order and the search
    backtracks when a cell has no candidate left.  The result is re-verified
    before it is returned.
    """
    if n < 4:
        raise ValueError("n must be at least 4")
    if k < 1:
        raise ValueError("k must be positive")
    if G.generating_tuple() and len(G.generating_tuple()) == 1 or G.order == 1:
        raise ValueError(f"{G.spec} is cyclic")
    if check_clique:
        _clique_bound(G, n * k)
    pg = G.pair_generates
    auts = G.aut_array
    rng = np.random.default_rng(seed)
    order = rng.permutation(G.order)
    entries = np.full((n, k), -1, dtype=np.int64)
    cells = [(l, m) for m in range(k) for l in range(n)]
    nodes = 0

    def candidates(pos: int) -> list[int]:
        l, m = cells[pos]
        placed = entries[entries >= 0]
        ok = np.ones(G.order, dtype=bool)
        ok[0] = False
        for e in placed:
            ok &= pg[:, e]
        if m > 0 and l >= 2:
            xi = related_sets(G, near_relations(G, entries[:, : m + 1]), m + 1)
            for i in range(m):
                for sigma in xi.get((i, m), ()):
                    ok[auts[sigma, entries[l, i]]] = False
        return [int(x) for x in order if ok[x]]

    def search(pos: int) -> bool:
        nonlocal nodes
        if pos == len(cells):
            return True
        remaining = len(cells) - pos
        for x in candidates(pos):
            nodes += 1
            if nodes > node_budget:
                raise MatrixExhausted(f"{G.spec}: node budget {node_budget} exhausted")
            l, m = cells[pos]
            entries[l, m] = x
            # every later cell must still have a pairwise-generating candidate
            if remaining > 1:
                pool = np.ones(G.order, dtype=bool)
                for e in entries[entries >= 0]:
                    pool &= pg[:, e]
                if pool.sum() < remaining - 1:
                    entries[l, m] = -1
                    continue
            if search(pos + 1):
                return True
            entries[l, m] = -1
        return False

    if not search(0):
        raise MatrixExhausted(f"{G.spec}: no {n}x{k} matrix satisfies the constraints")
    A = GenMatrix(entries.copy(), G)
    report = verify_matrix_properties(A)
    if not report.ok:
        raise InternalInconsistency(f"greedy matrix failed re-verification: {report}")
    return A, build_ledger(G, entries)


@dataclass(frozen=True)
class MatrixReport:
    pairs_generate: bool
    entries_distinct: bool
    bad_row_triples: tuple[tuple[int, int, int], ...]
    forbidden: tuple[tuple, ...]

    @property
    def ok(self) -> bool:
        return self.pairs_generate and self.entries_distinct and not self.bad_row_triples and not self.forbidden


def find_forbidden_configurations(A: GenMatrix, limit: int | None = 1) -> list[tuple]:
    """Scan 4x4 minors for the cyclic configuration.

    A hit is four rows ``r0..r3`` and four distinct columns ``c0..c3`` such
    that some virtual column ``x`` (values on the four rows) and automorphisms
    ``s_t`` satisfy ``A[r, c_t] = s_t(x[r])`` for every ``r != r_t``.  Row and
    column order inside the minor is arbitrary.  Returns ``(rows, columns)``
    witnesses, at most ``limit`` of them.
    """
    G = A.group
    E = A.entries
    n, k = E.shape
    auts = G.aut_array
    hits: list[tuple] = []
    if n < 4 or k < 4:
        return hits
    for rows in itertools.combinations(range(n), 4):
        for cols in itertools.permutations(range(k), 4):
            r0, r1, r2, r3 = rows
            c0, c1, c2, c3 = cols
            # normalize s_0 = id: x agrees with column c0 off row r0
            x = {r1: E[r1, c0], r2: E[r2, c0], r3: E[r3, c0]}
            found = False
            for s1 in G.auts_mapping([x[r2], x[r3]], [E[r2, c1], E[r3, c1]]).tolist():
                # s1(x[r0]) = E[r0, c1] determines the missing value
                x0 = int(np.nonzero(auts[s1] == E[r0, c1])[0][0])
                xx = dict(x)
                xx[r0] = x0
                ok2 = len(G.auts_mapping([xx[r0], xx[r1], xx[r3]], [E[r0, c2], E[r1, c2], E[r3, c2]])) > 0
                ok3 = len(G.auts_mapping([xx[r0], xx[r1], xx[r2]], [E[r0, c3], E[r1, c3], E[r2, c3]])) > 0
                if ok2 and ok3:
                    found = True
                    break
            if found:
                hits.append((rows, cols))
                if limit is not None and len(hits) >= limit:
                    return hits
    return hits


def verify_matrix_properties(A: GenMatrix, budget: int = DEFAULT_BUDGET) -> MatrixReport:
    """Direct re-verification of the three matrix properties."""
    G = A.group
    flat = A.entries.ravel()
    pg = G.pair_generates
    pairs = all(pg[a, b] for a, b in itertools.combinations(flat.tolist(), 2))
    distinct = len(set(flat.tolist())) == len(flat)
    bad = []
    for tri in itertools.combinations(range(A.n), 3):
        rep = hall_check(A.rows(tri), budget=budget)
        if not rep.diagonal_surjective:
            bad.append(tri)
    forbidden = find_forbidden_configurations(A)
    return MatrixReport(pairs, distinct, tuple(bad), tuple(forbidden))
