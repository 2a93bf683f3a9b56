"""Word search in direct powers and explicit Nielsen pipelines between tuples.

:func:`find_word` looks for a free word that evaluates to prescribed targets
on several tuples at once.  The two pipelines chain such words into move
sequences: :func:`connect_basis` carries one generating tuple to another, and
:func:`connect_stabilizing` does the same for the last column of a matrix
while leaving every other column untouched.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    NoGeneratingPair,
    NoSpreadWitness,
    RankMismatch,
    VerificationFailed,
)
from .groups import FiniteGroup
from .product import DEFAULT_BUDGET, DEFAULT_MITM_THRESHOLD, shortest_word
from .tuples import (
    GenMatrix,
    canonical,
    find_forbidden_configurations,
    hall_check,
    spread_witness,
    verify_matrix_properties,
)
from .words import MoveSequence, NielsenMove, Word, evaluate


@dataclass(frozen=True)
class WordConstraint:
    """``w(tuple) == target``."""

    tuple: tuple[int, ...]
    target: int

    def __post_init__(self):
        object.__setattr__(self, "tuple", tuple(int(x) for x in self.tuple))
        object.__setattr__(self, "target", int(self.target))


def _letter(index: int) -> int:
    # generator order x1, x1^-1, x2, x2^-1, ...
    a = index // 2 + 1
    return a if index % 2 == 0 else -a


def find_word(
    G: FiniteGroup,
    constraints: Sequence[WordConstraint],
    *,
    budget: int = DEFAULT_BUDGET,
    mitm_threshold: int = DEFAULT_MITM_THRESHOLD,
) -> Word:
    """Shortest word ``w`` with ``w(c.tuple) == c.target`` for every constraint.

    The search runs in ``G^c`` (one coordinate per constraint) over the
    diagonal images of ``x1, x1^-1, x2, x2^-1, ...``.  Below
    ``mitm_threshold`` states the answer is the least shortest word in that
    letter order.  The result is replayed before it is returned.
    """
    if not constraints:
        raise ValueError("need at least one constraint")
    m = len(constraints[0].tuple)
    if any(len(c.tuple) != m for c in constraints):
        raise RankMismatch("constraint tuples must share one rank")
    cols = np.array([c.tuple for c in constraints], dtype=np.int64).T  # (m, c)
    gens = np.empty((2 * m, len(constraints)), dtype=np.int64)
    gens[0::2] = cols
    gens[1::2] = G.inverses[cols]
    target = [c.target for c in constraints]
    path = shortest_word(G, gens, target, budget=budget, mitm_threshold=mitm_threshold)
    w = Word(tuple(_letter(i) for i in path), max(m, 1))
    for c in constraints:
        if evaluate(w, c.tuple, G) != c.target:
            raise VerificationFailed(f"word {w} misses constraint {c}")
    return w


@dataclass(frozen=True)
class Stage:
    name: str
    start: int
    stop: int
    tuple: tuple[int, ...]

    def as_dict(self) -> dict:
        return {"stage": self.name, "start": self.start, "stop": self.stop, "tuple": list(self.tuple)}


@dataclass
class ConnectResult:
    source: tuple[int, ...]
    target: tuple[int, ...]
    moves: MoveSequence
    stages: list[Stage]
    verified: bool
    fixed: list[tuple[int, ...]] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {
                "source": list(self.source),
                "target": list(self.target),
                "moves": str(self.moves),
                "stages": [s.as_dict() for s in self.stages],
                "fixed": [list(c) for c in self.fixed],
                "verified": self.verified,
                "info": self.info,
            }
        )


def _first_generating_pair(G: FiniteGroup, g: Sequence[int]) -> tuple[int, int] | None:
    pg = G.pair_generates
    for a, b in itertools.combinations(range(len(g)), 2):
        if pg[g[a], g[b]]:
            return a, b
    return None


def _front_pair_moves(a: int, b: int, n: int) -> MoveSequence:
    """P-moves bringing 0-based slots ``a < b`` to slots 1 and 2."""
    moves = []
    pos = list(range(n))
    for slot, want in ((0, a), (1, b)):
        cur = pos.index(want)
        if cur != slot:
            moves.append(NielsenMove("P", slot + 1, cur + 1, rank=n))
            pos[slot], pos[cur] = pos[cur], pos[slot]
    return MoveSequence(tuple(moves), n)


def _permutation_moves(perm: Sequence[int]) -> MoveSequence:
    """P-moves sending ``g`` to ``(g[perm[0]], g[perm[1]], ...)``."""
    n = len(perm)
    moves = []
    cur = list(range(n))
    for slot in range(n):
        src = cur.index(perm[slot])
        if src != slot:
            moves.append(NielsenMove("P", slot + 1, src + 1, rank=n))
            cur[slot], cur[src] = cur[src], cur[slot]
    return MoveSequence(tuple(moves), n)


class _Builder:
    """Accumulates stage words while tracking the moving tuples."""

    def __init__(self, G: FiniteGroup, columns: list[tuple[int, ...]], prefix: MoveSequence, budget, mitm):
        self.G = G
        self.n = prefix.rank
        self.moves = prefix
        self.columns = [prefix.apply(c, G) for c in columns]
        self.stages: list[Stage] = []
        self.budget = budget
        self.mitm = mitm

    @property
    def current(self) -> tuple[int, ...]:
        return self.columns[-1]

    def write(self, slot: int, sources: Sequence[int], value: int) -> None:
        """Right-multiply ``slot`` by a word in ``sources`` so it becomes ``value``.

        Every other column must stay fixed, so each contributes an identity
        constraint.
        """
        G = self.G
        cons = [WordConstraint([c[s - 1] for s in sources], 0) for c in self.columns[:-1]]
        cur = self.current
        need = G.product(G.inverse(cur[slot - 1]), value)
        cons.append(WordConstraint([cur[s - 1] for s in sources], need))
        w = find_word(G, cons, budget=self.budget, mitm_threshold=self.mitm)
        seq = MoveSequence.from_word(w, slot, sources, self.n)
        self.moves = self.moves + seq
        self.columns = [seq.apply(c, G) for c in self.columns]

    def stage(self, name: str, body) -> None:
        start = len(self.moves)
        body()
        self.stages.append(Stage(name, start, len(self.moves), self.current))


def _check_tuple(G: FiniteGroup, g: Sequence[int], n: int | None = None) -> tuple[int, ...]:
    g = tuple(int(x) for x in g)
    if n is not None and len(g) != n:
        raise RankMismatch(f"expected a {n}-tuple, got {len(g)} entries")
    if any(not 0 <= x < G.order for x in g):
        raise ValueError("element id out of range")
    if not G.generates(g):
        raise ValueError(f"{g} does not generate {G.spec}")
    return g


def connect_basis(
    G: FiniteGroup,
    g: Sequence[int],
    h: Sequence[int],
    *,
    budget: int = DEFAULT_BUDGET,
    mitm_threshold: int = DEFAULT_MITM_THRESHOLD,
) -> ConnectResult:
    """Moves carrying ``g`` to ``h`` exactly.

    With ``<g1, g2> = G`` and ``<h1, h2> = G`` (after P-move reordering) and
    ``z`` generating with both ``g2`` and ``h1``, the stages are::

        (g1,g2,g3,..) -> (g1,g2,z,..) -> (h1,g2,z,..) -> (h1,h2,z,..) -> h
    """
    g = _check_tuple(G, g)
    n = len(g)
    h = _check_tuple(G, h, n)
    if n < 3:
        raise ValueError("connect_basis needs n >= 3")
    if g == h:
        return ConnectResult(g, h, MoveSequence.empty(n), [], True)
    pg_ = _first_generating_pair(G, g)
    ph_ = _first_generating_pair(G, h)
    if pg_ is None:
        raise NoGeneratingPair(f"no two entries of {g} generate {G.spec}")
    if ph_ is None:
        raise NoGeneratingPair(f"no two entries of {h} generate {G.spec}")
    pre = _front_pair_moves(*pg_, n)
    post = _front_pair_moves(*ph_, n)
    hh = post.apply(h, G)
    b = _Builder(G, [g], pre, budget, mitm_threshold)
    g2 = b.current[1]
    z = spread_witness(G, (g2, hh[0]))
    if z is None:
        raise NoSpreadWitness(f"no z generates {G.spec} with both {g2} and {hh[0]}")
    b.stage("slot3<-z", lambda: b.write(3, (1, 2), z))
    b.stage("slot1<-h1", lambda: b.write(1, (2, 3), hh[0]))
    b.stage("slot2<-h2", lambda: b.write(2, (1, 3), hh[1]))

    def rest():
        for s in range(3, n + 1):
            b.write(s, (1, 2), hh[s - 1])

    b.stage("slots3..n<-h", rest)
    moves = b.moves + post.inverse()
    verified = moves.apply(g, G) == h
    info = {"z": z, "prefix": str(pre), "suffix": str(post.inverse())}
    return ConnectResult(g, h, moves, b.stages, verified, info=info)


def _class_distinct_last(G: FiniteGroup, cols: np.ndarray, last: Sequence[int]) -> bool:
    """Whether ``last`` generates and lies in no class of the ``cols`` columns."""
    if not G.generates(last):
        return False
    mine = canonical(G, last)
    return all(canonical(G, tuple(c)) != mine for c in cols.T.tolist())


def _bad_z(G: FiniteGroup, rows: np.ndarray, a: int, b: int) -> set[int]:
    """Values ``z`` putting ``(a, b, z)`` in the class of an earlier column.

    ``rows`` is the ``3 x (k-1)`` block of earlier columns.  Column ``i`` is
    hit exactly when some automorphism ``sigma`` sends its first two entries
    to ``(a, b)``, and then ``z = sigma(third entry)``.
    """
    auts = G.aut_array
    bad: set[int] = set()
    for i in range(rows.shape[1]):
        for s in G.auts_mapping(rows[:2, i], (a, b)).tolist():
            bad.add(int(auts[s, rows[2, i]]))
    return bad


def connect_stabilizing(
    A: GenMatrix,
    h: Sequence[int],
    *,
    check_matrix: bool = True,
    budget: int = DEFAULT_BUDGET,
    mitm_threshold: int = DEFAULT_MITM_THRESHOLD,
    max_permutations: int = 5040,
) -> ConnectResult:
    """Moves sending the last column of ``A`` to ``h`` and fixing every other column.

    The rows are first rearranged by P-moves (least permutation in lex order
    for which ``<h1, h2> = G`` and the three-row matrix closing with
    ``(h1, h2, h3)`` generates ``G^k``), and rearranged back at the end.
    ``z`` is the least element outside the bad sets of the three auxiliary
    matrices, and each of the five stages is one word search with identity
    constraints on the fixed columns.
    """
    G = A.group
    n, k = A.n, A.k
    if n < 4:
        raise ValueError("connect_stabilizing needs n >= 4")
    h = _check_tuple(G, h, n)
    for c in A.columns():
        if not G.generates(c):
            raise VerificationFailed(f"column {c} does not generate {G.spec}")
    if check_matrix:
        report = verify_matrix_properties(A, budget=budget)
        if not report.ok:
            raise VerificationFailed(f"matrix fails the three matrix properties: {report}")
    E = A.entries
    pg = G.pair_generates
    chosen = None
    for count, perm in enumerate(itertools.permutations(range(n))):
        if count >= max_permutations:
            break
        hp = [h[p] for p in perm]
        if not pg[hp[0], hp[1]]:
            continue
        Ep = E[list(perm)]
        if not _class_distinct_last(G, Ep[:3, :-1], hp[:3]):
            continue
        chosen = perm
        break
    if chosen is None:
        obstruction = find_forbidden_configurations(A)
        raise VerificationFailed(
            f"no row rearrangement makes the final three-row matrix generate; "
            f"forbidden configurations: {obstruction}"
        )
    perm = list(chosen)
    Ep = E[perm]
    hp = tuple(h[p] for p in perm)
    g = Ep[:, -1].tolist()
    fixed = Ep[:, :-1]
    # auxiliary matrices: rows (2,3,4), (1,3,4), (1,2,4) with last column
    # (g2,g3,z), (h1,g3,z), (h1,h2,z)
    aux = [((1, 2, 3), (g[1], g[2])), ((0, 2, 3), (hp[0], g[2])), ((0, 1, 3), (hp[0], hp[1]))]
    bad: set[int] = set()
    for rows, (a, b) in aux:
        bad |= _bad_z(G, fixed[list(rows)], a, b)
    z = None
    for cand in range(G.order):
        if cand in bad:
            continue
        if all(G.generates((a, b, cand)) for _, (a, b) in aux):
            z = cand
            break
    if z is None:
        raise NoSpreadWitness(f"every z is excluded for the auxiliary matrices of {G.spec}")
    a3_case = "generating" if pg[hp[0], g[2]] else "cyclic"
    for rows, (a, b) in aux:
        sub = np.concatenate([fixed[list(rows)], np.array([[a], [b], [z]])], axis=1)
        rep = hall_check(GenMatrix(sub, G), budget=budget)
        if not rep.diagonal_surjective:
            raise VerificationFailed(f"auxiliary matrix on rows {rows} does not generate G^{k}")

    pre = _permutation_moves(perm)
    bld = _Builder(G, A.columns(), pre, budget, mitm_threshold)
    bld.stage("slot4<-z", lambda: bld.write(4, (1, 2, 3), z))
    bld.stage("slot1<-h1", lambda: bld.write(1, (2, 3, 4), hp[0]))
    bld.stage("slot2<-h2", lambda: bld.write(2, (1, 3, 4), hp[1]))
    bld.stage("slot3<-h3", lambda: bld.write(3, (1, 2, 4), hp[2]))

    def rest():
        for s in range(4, n + 1):
            bld.write(s, (1, 2, 3), hp[s - 1])

    bld.stage("slots4..n<-h", rest)
    moves = bld.moves + pre.inverse()
    cols = A.columns()
    after = [moves.apply(c, G) for c in cols]
    verified = after[-1] == h and all(after[i] == cols[i] for i in range(k - 1))
    info = {"z": z, "rows": perm, "a3_case": a3_case, "matrix_checked": check_matrix}
    return ConnectResult(cols[-1], h, moves, bld.stages, verified, fixed=cols[:-1], info=info)
