"""Two-letter laws and the word-level constructions around them.

Words in F2 are enumerated by length, then lexicographically in the letter
order x1 < x1^-1 < x2 < x2^-1.  Evaluation is vectorized over every pair of
elements of the group at once.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded, InternalInconsistency, RankMismatch
from .groups import FiniteGroup
from .words import MoveSequence, Word, basis, is_inner, symbolic_images

LETTER_ORDER = (1, -1, 2, -2)
DEFAULT_EXHAUSTIVE_LIMIT = 2_000_000


@dataclass(frozen=True)
class LawReport:
    group: str
    word: Word
    domain: str
    checked: int
    max_len: int

    def as_dict(self) -> dict:
        return {
            "group": self.group,
            "word": str(self.word),
            "pretty": self.word.pretty(),
            "length": len(self.word),
            "domain": self.domain,
            "checked": self.checked,
            "max_len": self.max_len,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict())


def _pairs(G: FiniteGroup, domain: str) -> tuple[np.ndarray, np.ndarray]:
    a, b = np.meshgrid(np.arange(G.order), np.arange(G.order), indexing="ij")
    a, b = a.ravel(), b.ravel()
    if domain == "all_pairs":
        return a, b
    if domain == "generating_pairs":
        keep = G.pair_generates[a, b]
        return a[keep], b[keep]
    raise ValueError(f"unknown domain {domain!r}")


def iter_words_f2(max_len: int):
    """Reduced words of F2 of length 1..max_len in the fixed order, grouped by length."""
    level = [()]
    for _ in range(max_len):
        nxt = []
        for w in level:
            for a in LETTER_ORDER:
                if not w or w[-1] != -a:
                    nxt.append(w + (a,))
        level = nxt
        yield level


def vanishing_words(G: FiniteGroup, max_len: int, domain: str = "all_pairs", first_only: bool = False) -> list[Word]:
    """Reduced words of length ``<= max_len`` vanishing on the domain, in order."""
    a, b = _pairs(G, domain)
    t = G.table
    values = {1: a, -1: G.inverses[a], 2: b, -2: G.inverses[b]}
    found: list[Word] = []
    prev = np.zeros((1, len(a)), dtype=t.dtype)
    prev_words: list[tuple[int, ...]] = [()]
    for L in range(1, max_len + 1):
        words, rows = [], []
        for pi, w in enumerate(prev_words):
            for x in LETTER_ORDER:
                if w and w[-1] == -x:
                    continue
                words.append(w + (x,))
                rows.append((pi, x))
        par = np.array([r[0] for r in rows], dtype=np.int64)
        cur = np.empty((len(rows), len(a)), dtype=t.dtype)
        for x in LETTER_ORDER:
            sel = np.nonzero(np.array([r[1] == x for r in rows]))[0]
            if len(sel):
                cur[sel] = t[prev[par[sel]], values[x][None, :]]
        zero = np.nonzero(~cur.any(axis=1))[0]
        for i in zero.tolist():
            found.append(Word(words[i], 2))
            if first_only:
                return found
        prev, prev_words = cur, words
    return found


def find_two_letter_law(G: FiniteGroup, max_len: int, domain: str = "all_pairs") -> LawReport | None:
    """First reduced word of F2 (length, then letter order) vanishing on the domain."""
    if max_len < 1:
        return None
    hits = vanishing_words(G, max_len, domain, first_only=True)
    if not hits:
        return None
    w = hits[0]
    count = verify_law(G, w, domain)
    return LawReport(G.spec, w, domain, count, max_len)


def verify_law(G: FiniteGroup, w: Word, domain: str = "all_pairs") -> int:
    """Exhaustively re-evaluate ``w`` on the domain; returns the number of pairs."""
    a, b = _pairs(G, domain)
    acc = np.zeros(len(a), dtype=np.int64)
    t = G.table
    for x in w.letters:
        col = a if abs(x) == 1 else b
        if abs(x) > 2:
            raise RankMismatch("law words must use x1 and x2 only")
        acc = t[acc, col if x > 0 else G.inverses[col]]
    if acc.any():
        raise InternalInconsistency(f"{w} does not vanish on {domain} of {G.spec}")
    return len(a)


def strengthen_on_generating_pairs(w: Word) -> Word:
    """``v = w z w^-1 z^-1`` with ``z`` the first letter of x1, x1^-1, x2, x2^-1
    that differs from ``z1^-1``, ``zn`` and ``zn^-1``.

    No cancellation occurs at any junction, so ``v`` is reduced of length
    ``2|w| + 2``.
    """
    if not w.letters:
        raise ValueError("w must be nontrivial")
    if any(abs(a) > 2 for a in w.letters):
        raise RankMismatch("w must lie in F2")
    first, last = w.letters[0], w.letters[-1]
    z = next(a for a in LETTER_ORDER if a not in (-first, last, -last))
    zw = Word((z,), 2)
    v = w.with_rank(2) * zw * w.inverse().with_rank(2) * zw.inverse()
    if len(v) != 2 * len(w) + 2:
        raise InternalInconsistency(f"unexpected cancellation in {v}")
    return v


@dataclass(frozen=True)
class Reduction:
    word: Word
    images: tuple[Word, ...]
    trials: int


def _random_word(rng: np.random.Generator, max_len: int) -> Word:
    L = int(rng.integers(0, max_len + 1))
    return Word(tuple(int(x) for x in rng.choice(LETTER_ORDER, size=L)), 2)


def reduce_law_to_two_letters(
    w: Word, trials: int = 10_000, max_sub_len: int = 3, seed: int = 0
) -> Reduction | None:
    """Find ``phi: F_m -> F2`` with ``phi(w)`` nontrivial.

    The projection ``x1, x2 -> x1, x2`` (other letters to 1) is tried first,
    then random substitutions by words of length ``<= max_sub_len``.
    ``None`` means the search failed, not that no such ``phi`` exists.
    """
    if not w.letters:
        raise ValueError("w must be nontrivial")
    m = max(w.rank, max(abs(a) for a in w.letters))
    if m <= 2:
        return Reduction(w.with_rank(2), basis(2)[:m], 0)
    proj = tuple(Word.gen(i, 2) if i <= 2 else Word.identity(2) for i in range(1, m + 1))
    image = w.substitute(proj, 2)
    if image.letters:
        return Reduction(image, proj, 0)
    rng = np.random.default_rng(seed)
    for t in range(1, trials + 1):
        images = tuple(_random_word(rng, max_sub_len) for _ in range(m))
        image = w.substitute(images, 2)
        if image.letters:
            return Reduction(image, images, t)
    return None


@dataclass(frozen=True)
class KernelReport:
    moves: MoveSequence
    symbolic: tuple[Word, ...]
    non_inner: bool
    acts_trivially: bool
    checked: int
    exhaustive: bool

    def as_dict(self) -> dict:
        return {
            "moves": str(self.moves),
            "symbolic": [str(x) for x in self.symbolic],
            "non_inner": self.non_inner,
            "acts_trivially": self.acts_trivially,
            "checked": self.checked,
            "exhaustive": self.exhaustive,
        }


def kernel_element(
    w: Word,
    n: int,
    G: FiniteGroup,
    *,
    limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
    samples: int = 100_000,
    seed: int = 0,
) -> KernelReport:
    """``w(R(n,1), R(n,2))``: sends ``x_n`` to ``x_n w(x1, x2)`` and fixes the rest.

    ``acts_trivially`` checks every tuple of ``G^n`` when there are at most
    ``limit`` of them, and a random sample otherwise (``exhaustive`` False).
    """
    if not w.letters:
        raise ValueError("w must be nontrivial")
    if any(abs(a) > 2 for a in w.letters):
        raise RankMismatch("w must lie in F2")
    if n <= 2:
        raise ValueError("n must exceed 2")
    moves = MoveSequence.from_word(w, n, (1, 2), n)
    sym = symbolic_images(moves)
    xs = basis(n)
    expected = xs[:-1] + (xs[-1] * w.substitute(xs[:2], n),)
    if sym != expected:
        raise InternalInconsistency(f"symbolic images {sym} differ from the closed form")
    non_inner = not is_inner(sym)
    total = G.order**n
    exhaustive = total <= limit
    if exhaustive:
        grid = np.array(list(itertools.product(range(G.order), repeat=n)), dtype=np.int64)
    else:
        rng = np.random.default_rng(seed)
        grid = rng.integers(0, G.order, size=(samples, n))
    if len(grid) * n > 4 * limit:
        raise BudgetExceeded("tuple grid too large")
    out = moves.apply_array(grid, G)
    trivial = bool((out == grid).all())
    return KernelReport(moves, sym, non_inner, trivial, len(grid), exhaustive)


def permuted_law_words(images: Sequence[Word], u: Word) -> tuple[Word, Word, Word]:
    """The words ``(w1^u, w2^u, w3^u)`` in F2 = <x, y>, with ``U = u(x, y)``::

        w3 = u(a1(x,y,U), a2(x,y,U)) a3(x,y,U)^-1
        w2 = u(a1(x,U,y), a3(x,U,y)) a2(x,U,y)^-1
        w1 = u(a2(U,x,y), a3(U,x,y)) a1(U,x,y)^-1

    Letters beyond x3 in the images are sent to 1.
    """
    if len(images) != 3:
        raise RankMismatch("need exactly three images")
    if any(abs(a) > 2 for a in u.letters):
        raise RankMismatch("u must lie in F2")
    x, y = basis(2)
    U = u.with_rank(2)
    m = max(3, max((img.rank for img in images), default=3))
    ident = Word.identity(2)

    def at(args: tuple[Word, Word, Word]) -> tuple[Word, ...]:
        full = tuple(args) + (ident,) * (m - 3)
        return tuple(img.substitute(full, 2) for img in images)

    def uu(p: Word, q: Word) -> Word:
        return u.substitute((p, q), 2) if u.letters else ident

    a = at((x, y, U))
    w3 = uu(a[0], a[1]) * a[2].inverse()
    a = at((x, U, y))
    w2 = uu(a[0], a[2]) * a[1].inverse()
    a = at((U, x, y))
    w1 = uu(a[1], a[2]) * a[0].inverse()
    return w1, w2, w3
