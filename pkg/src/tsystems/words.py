"""Free-group words and the Nielsen-move calculus.

Words are flat tuples of signed letter indices: ``3`` is x3, ``-3`` is x3^-1.
Nielsen moves act on tuples of group elements and, symbolically, on tuples of
words (the images of the basis x1..xn).  A :class:`MoveSequence` applies its
moves left to right, so ``w(R(3,1), R(3,2))`` built from a word ``w`` sends
``g3`` to ``g3 * w(g1, g2)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import RankMismatch
from .groups import FiniteGroup


def normalize(letters: Iterable[int], rank: int | None = None) -> tuple[int, ...]:
    """Freely reduce a letter sequence."""
    out: list[int] = []
    for a in letters:
        a = int(a)
        if a == 0 or (rank is not None and abs(a) > rank):
            raise RankMismatch(f"letter {a} outside rank {rank}")
        if out and out[-1] == -a:
            out.pop()
        else:
            out.append(a)
    return tuple(out)


@dataclass(frozen=True)
class Word:
    letters: tuple[int, ...]
    rank: int

    def __post_init__(self):
        object.__setattr__(self, "letters", normalize(self.letters, self.rank))

    @classmethod
    def identity(cls, rank: int) -> "Word":
        return cls((), rank)

    @classmethod
    def gen(cls, i: int, rank: int) -> "Word":
        return cls((i,), rank)

    @classmethod
    def parse(cls, text: str, rank: int | None = None) -> "Word":
        """Parse the whitespace-separated signed-integer format (``"1 -2 3"``)."""
        try:
            letters = [int(x) for x in text.replace(",", " ").split()]
        except ValueError as exc:
            raise ValueError(f"bad word text {text!r}") from exc
        if rank is None:
            rank = max((abs(a) for a in letters), default=1)
        return cls(tuple(letters), rank)

    def __str__(self) -> str:
        return " ".join(str(a) for a in self.letters)

    def pretty(self) -> str:
        if not self.letters:
            return "1"
        return " ".join(f"x{a}" if a > 0 else f"x{-a}^-1" for a in self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return multiply(self, other)

    def inverse(self) -> "Word":
        return invert(self)

    def __pow__(self, k: int) -> "Word":
        base = self if k >= 0 else self.inverse()
        return Word(base.letters * abs(k), self.rank)

    def with_rank(self, rank: int) -> "Word":
        return Word(self.letters, rank)

    def substitute(self, images: Sequence["Word"], rank: int | None = None) -> "Word":
        """Image under the homomorphism ``x_i -> images[i-1]``."""
        if len(images) < self.rank:
            raise RankMismatch(f"need {self.rank} images, got {len(images)}")
        if rank is None:
            rank = images[0].rank if images else self.rank
        out: list[int] = []
        for a in self.letters:
            img = images[abs(a) - 1].letters
            out.extend(img if a > 0 else [-b for b in reversed(img)])
        return Word(tuple(out), rank)


def multiply(u: Word, v: Word) -> Word:
    return Word(u.letters + v.letters, max(u.rank, v.rank))


def invert(w: Word) -> Word:
    return Word(tuple(-a for a in reversed(w.letters)), w.rank)


def commutator(u: Word, v: Word) -> Word:
    """``[u, v] = u v u^-1 v^-1``."""
    return u * v * u.inverse() * v.inverse()


def cyclic_reduce(w: Word) -> Word:
    letters = w.letters
    i, j = 0, len(letters) - 1
    while i < j and letters[i] == -letters[j]:
        i += 1
        j -= 1
    return Word(letters[i:j + 1], w.rank)


def translation_length(w: Word) -> int:
    """Displacement of ``w`` on the Cayley tree: its cyclically reduced length."""
    return len(cyclic_reduce(w))


def evaluate(w: Word, g: Sequence[int], G: FiniteGroup) -> int:
    """Image of ``w`` under ``x_i -> g[i-1]``."""
    if len(g) != w.rank:
        raise RankMismatch(f"word of rank {w.rank} evaluated on {len(g)} elements")
    acc = 0
    for a in w.letters:
        x = g[a - 1] if a > 0 else G.inverse(g[-a - 1])
        acc = G.product(acc, x)
    return acc


def evaluate_many(w: Word, tuples: Sequence[Sequence[int]], G: FiniteGroup) -> tuple[int, ...]:
    """Componentwise evaluation into ``G^k`` for ``k`` tuples."""
    return tuple(evaluate(w, g, G) for g in tuples)


def evaluate_array(w: Word, columns: Sequence[np.ndarray], G: FiniteGroup) -> np.ndarray:
    """Vectorized evaluation: ``columns[i]`` holds the values of ``x_{i+1}``."""
    if len(columns) != w.rank:
        raise RankMismatch(f"word of rank {w.rank} evaluated on {len(columns)} columns")
    t, inv = G.table, G.inverses
    shape = np.broadcast(*columns).shape if columns else ()
    acc = np.zeros(shape, dtype=np.int32)
    for a in w.letters:
        x = columns[a - 1] if a > 0 else inv[columns[-a - 1]]
        acc = t[acc, x]
    return acc


# -- Nielsen moves ---------------------------------------------------------

_MOVE_RE = re.compile(r"^\s*([RLPI])\s*\(\s*([^)]*)\)\s*$")


@dataclass(frozen=True)
class NielsenMove:
    """One elementary Nielsen move; indices are 1-based.

    ``R(i,j,s)``: g_i <- g_i g_j^s;  ``L(i,j,s)``: g_i <- g_j^s g_i;
    ``P(i,j)``: swap g_i, g_j;  ``I(i)``: g_i <- g_i^-1.
    """

    kind: str
    i: int
    j: int | None = None
    sign: int | None = None
    rank: int = 0

    def __post_init__(self):
        if self.kind not in "RLPI" or len(self.kind) != 1:
            raise ValueError(f"unknown move kind {self.kind!r}")
        if not 1 <= self.i <= self.rank:
            raise RankMismatch(f"index {self.i} outside rank {self.rank}")
        if self.kind == "I":
            if self.j is not None or self.sign is not None:
                raise ValueError("I takes a single index")
            return
        if self.j is None or not 1 <= self.j <= self.rank or self.j == self.i:
            raise ValueError(f"bad second index {self.j} for {self.kind}")
        if self.kind == "P":
            if self.sign is not None:
                raise ValueError("P takes no sign")
        elif self.sign not in (1, -1):
            raise ValueError(f"{self.kind} needs sign +1 or -1")

    def inverse(self) -> "NielsenMove":
        if self.kind in "RL":
            return NielsenMove(self.kind, self.i, self.j, -self.sign, self.rank)
        return self

    def __str__(self) -> str:
        if self.kind == "I":
            return f"I({self.i})"
        if self.kind == "P":
            return f"P({self.i},{self.j})"
        return f"{self.kind}({self.i},{self.j},{'+' if self.sign > 0 else '-'})"

    @classmethod
    def parse(cls, text: str, rank: int) -> "NielsenMove":
        m = _MOVE_RE.match(text)
        if not m:
            raise ValueError(f"bad move text {text!r}")
        kind, args = m.group(1), [a.strip() for a in m.group(2).split(",")]
        try:
            if kind == "I":
                (i,) = args
                return cls("I", int(i), rank=rank)
            if kind == "P":
                i, j = args
                return cls("P", int(i), int(j), rank=rank)
            i, j, s = args
        except ValueError as exc:
            raise ValueError(f"bad move text {text!r}") from exc
        if s not in ("+", "-"):
            raise ValueError(f"bad sign in {text!r}")
        return cls(kind, int(i), int(j), 1 if s == "+" else -1, rank)

    def apply(self, g: Sequence[int], G: FiniteGroup) -> tuple[int, ...]:
        if len(g) != self.rank:
            raise RankMismatch(f"move of rank {self.rank} applied to {len(g)}-tuple")
        out = list(g)
        i = self.i - 1
        if self.kind == "I":
            out[i] = G.inverse(g[i])
            return tuple(out)
        j = self.j - 1
        if self.kind == "P":
            out[i], out[j] = g[j], g[i]
            return tuple(out)
        gj = g[j] if self.sign > 0 else G.inverse(g[j])
        out[i] = G.product(g[i], gj) if self.kind == "R" else G.product(gj, g[i])
        return tuple(out)

    def apply_array(self, tuples: np.ndarray, G: FiniteGroup) -> np.ndarray:
        """Apply to every row of an ``(M, n)`` array of tuples."""
        if tuples.shape[-1] != self.rank:
            raise RankMismatch(f"move of rank {self.rank} applied to {tuples.shape[-1]}-tuples")
        out = tuples.copy()
        i = self.i - 1
        if self.kind == "I":
            out[..., i] = G.inverses[tuples[..., i]]
            return out
        j = self.j - 1
        if self.kind == "P":
            out[..., i], out[..., j] = tuples[..., j], tuples[..., i]
            return out
        gj = tuples[..., j] if self.sign > 0 else G.inverses[tuples[..., j]]
        t = G.table
        out[..., i] = t[tuples[..., i], gj] if self.kind == "R" else t[gj, tuples[..., i]]
        return out

    def apply_words(self, images: Sequence[Word]) -> tuple[Word, ...]:
        out = list(images)
        i = self.i - 1
        if self.kind == "I":
            out[i] = images[i].inverse()
            return tuple(out)
        j = self.j - 1
        if self.kind == "P":
            out[i], out[j] = images[j], images[i]
            return tuple(out)
        wj = images[j] if self.sign > 0 else images[j].inverse()
        out[i] = images[i] * wj if self.kind == "R" else wj * images[i]
        return tuple(out)


@dataclass(frozen=True)
class MoveSequence:
    """Moves applied left to right (first listed move acts first)."""

    moves: tuple[NielsenMove, ...]
    rank: int

    def __post_init__(self):
        object.__setattr__(self, "moves", tuple(self.moves))
        for mv in self.moves:
            if mv.rank != self.rank:
                raise RankMismatch(f"move {mv} has rank {mv.rank}, sequence has {self.rank}")

    @classmethod
    def empty(cls, rank: int) -> "MoveSequence":
        return cls((), rank)

    @classmethod
    def parse(cls, text: str, rank: int) -> "MoveSequence":
        parts = re.findall(r"[RLPI]\s*\([^)]*\)", text)
        rest = re.sub(r"[RLPI]\s*\([^)]*\)", "", text).replace(",", "").strip()
        if rest:
            raise ValueError(f"bad move sequence text {text!r}")
        return cls(tuple(NielsenMove.parse(p, rank) for p in parts), rank)

    @classmethod
    def from_word(cls, w: Word, target: int, sources: Sequence[int], rank: int) -> "MoveSequence":
        """``w(R(target, sources[0]), R(target, sources[1]), ...)``.

        Letter ``x_a`` becomes ``R(target, sources[a-1], +)`` and ``x_a^-1``
        becomes the ``-`` move, so slot ``target`` is right-multiplied by
        ``w`` evaluated on the source slots.
        """
        if len(sources) < w.rank and w.letters:
            if max(abs(a) for a in w.letters) > len(sources):
                raise RankMismatch("word uses more letters than source slots")
        moves = tuple(
            NielsenMove("R", target, sources[abs(a) - 1], 1 if a > 0 else -1, rank) for a in w.letters
        )
        return cls(moves, rank)

    def __str__(self) -> str:
        return ",".join(str(m) for m in self.moves)

    def __len__(self) -> int:
        return len(self.moves)

    def __add__(self, other: "MoveSequence") -> "MoveSequence":
        if other.rank != self.rank:
            raise RankMismatch("cannot concatenate sequences of different rank")
        return MoveSequence(self.moves + other.moves, self.rank)

    def inverse(self) -> "MoveSequence":
        return MoveSequence(tuple(m.inverse() for m in reversed(self.moves)), self.rank)

    def apply(self, g: Sequence[int], G: FiniteGroup) -> tuple[int, ...]:
        if len(g) != self.rank:
            raise RankMismatch(f"sequence of rank {self.rank} applied to {len(g)}-tuple")
        g = tuple(g)
        for mv in self.moves:
            g = mv.apply(g, G)
        return g

    def apply_array(self, tuples: np.ndarray, G: FiniteGroup) -> np.ndarray:
        for mv in self.moves:
            tuples = mv.apply_array(tuples, G)
        return tuples


def apply_move(mv: NielsenMove | MoveSequence, g: Sequence[int], G: FiniteGroup) -> tuple[int, ...]:
    return mv.apply(g, G)


def basis(n: int) -> tuple[Word, ...]:
    return tuple(Word.gen(i, n) for i in range(1, n + 1))


def symbolic_images(s: MoveSequence | NielsenMove) -> tuple[Word, ...]:
    """Images of the basis ``(x1..xn)`` under the moves."""
    moves = s.moves if isinstance(s, MoveSequence) else (s,)
    images = basis(s.rank)
    for mv in moves:
        images = mv.apply_words(images)
    return images


def _split_conjugate(w: Word, letter: int) -> tuple[int, ...] | None:
    """If ``w`` is ``u x u^-1`` (reduced, x = letter) return ``u``."""
    ls = w.letters
    if len(ls) % 2 == 0:
        return None
    mid = len(ls) // 2
    if ls[mid] != letter:
        return None
    u = ls[:mid]
    if ls[mid + 1:] != tuple(-a for a in reversed(u)):
        return None
    return u


def is_inner(images: Sequence[Word]) -> bool:
    """Whether some ``c`` satisfies ``images[i] == c x_{i+1} c^-1`` for all i.

    ``images[0]`` pins ``c`` down to ``u x1^k``; ``images[1]`` then fixes the
    exponent ``k``; the remaining coordinates are checked directly.
    """
    n = len(images)
    if n == 0:
        return True
    rank = max(w.rank for w in images)
    u = _split_conjugate(images[0], 1)
    if u is None:
        return False
    if n == 1:
        return True
    uw = Word(u, rank)
    # u^-1 images[1] u must be x1^k x2 x1^-k
    core = (uw.inverse() * images[1] * uw).letters
    v = _split_conjugate(Word(core, rank), 2)
    if v is None or any(a != v[0] for a in v) or (v and abs(v[0]) != 1):
        return False
    c = uw * Word(v, rank)
    for i, img in enumerate(images):
        x = Word.gen(i + 1, rank)
        if c * x * c.inverse() != img.with_rank(rank):
            return False
    return True
