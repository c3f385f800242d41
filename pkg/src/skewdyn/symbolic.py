"""Eventually periodic words of the one-sided shift on N letters.

A :class:`Word` is ``prefix . cycle . cycle . ...`` with 1-based letters and a
canonical form (primitive cycle, nothing absorbable at the end of the
prefix), so structural equality is word equality.

:class:`WordBatch` stores many words compactly as a short per-row head of
explicit letters followed by one of a few shared tail words; preimage trees
produce exactly that shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


def _primitive(cycle: tuple[int, ...]) -> tuple[int, ...]:
    n = len(cycle)
    for p in range(1, n + 1):
        if n % p == 0 and cycle == cycle[:p] * (n // p):
            return cycle[:p]
    return cycle


@dataclass(frozen=True)
class Word:
    prefix: tuple[int, ...]
    cycle: tuple[int, ...]

    def __post_init__(self):
        prefix = tuple(int(v) for v in self.prefix)
        cycle = tuple(int(v) for v in self.cycle)
        if not cycle:
            raise ValueError("cycle must be nonempty")
        if any(v < 1 for v in prefix + cycle):
            raise ValueError("letters are 1-based")
        cycle = _primitive(cycle)
        while prefix and prefix[-1] == cycle[-1]:
            prefix = prefix[:-1]
            cycle = (cycle[-1],) + cycle[:-1]
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "cycle", cycle)

    @classmethod
    def periodic(cls, cycle: Sequence[int]) -> "Word":
        return cls((), tuple(cycle))

    @classmethod
    def parse(cls, text: str) -> "Word":
        """Parse ``"p1 p2 | c1 c2"``."""
        if "|" not in text:
            raise ValueError(f"word {text!r} lacks the '|' separator")
        head, tail = text.split("|", 1)
        return cls(tuple(int(t) for t in head.split()), tuple(int(t) for t in tail.split()))

    def __str__(self) -> str:
        head = " ".join(map(str, self.prefix))
        tail = " ".join(map(str, self.cycle))
        return f"{head} | {tail}" if head else f"| {tail}"

    @property
    def is_periodic(self) -> bool:
        return not self.prefix

    def letter(self, i: int) -> int:
        """0-based letter access into the infinite word."""
        if i < len(self.prefix):
            return self.prefix[i]
        return self.cycle[(i - len(self.prefix)) % len(self.cycle)]

    def head(self, s: int) -> tuple[int, ...]:
        return tuple(self.letter(i) for i in range(s))

    def max_letter(self) -> int:
        return max(self.prefix + self.cycle)


def shift(w: Word) -> Word:
    if w.prefix:
        return Word(w.prefix[1:], w.cycle)
    return Word((), w.cycle[1:] + w.cycle[:1])


def prepend(letters: Sequence[int], w: Word) -> Word:
    return Word(tuple(letters) + w.prefix, w.cycle)


def first_disagreement(w1: Word, w2: Word) -> int | None:
    """1-based index of the first differing letter, ``None`` for equal words."""
    if w1 == w2:
        return None
    bound = max(len(w1.prefix), len(w2.prefix)) + math.lcm(len(w1.cycle), len(w2.cycle))
    for i in range(bound):
        if w1.letter(i) != w2.letter(i):
            return i + 1
    # canonical forms are unique, so this is unreachable
    raise AssertionError("distinct canonical words agree on the comparison window")


def word_distance(w1: Word, w2: Word) -> float:
    n = first_disagreement(w1, w2)
    return 0.0 if n is None else 2.0 ** (-n)


@dataclass(frozen=True)
class Cylinder:
    letters: tuple[int, ...]

    def __post_init__(self):
        letters = tuple(int(v) for v in self.letters)
        if not letters or any(v < 1 for v in letters):
            raise ValueError("cylinder letters must be nonempty and 1-based")
        object.__setattr__(self, "letters", letters)

    def __len__(self):
        return len(self.letters)


def in_cylinder(w: Word, c: Cylinder) -> bool:
    return w.head(len(c)) == c.letters


def all_words(N: int, length: int) -> list[tuple[int, ...]]:
    """All letter tuples of a given length, lexicographic."""
    out: list[tuple[int, ...]] = [()]
    for _ in range(length):
        out = [w + (v,) for w in out for v in range(1, N + 1)]
    return out


@dataclass(frozen=True, eq=False)
class WordBatch:
    """Words ``heads[i, :lengths[i]] + tails[tail_index[i]]``."""

    heads: np.ndarray
    lengths: np.ndarray
    tails: tuple[Word, ...]
    tail_index: np.ndarray

    def __len__(self) -> int:
        return int(self.lengths.shape[0])

    @classmethod
    def from_words(cls, words: Iterable[Word]) -> "WordBatch":
        words = list(words)
        uniq: dict[Word, int] = {}
        idx = np.array([uniq.setdefault(w, len(uniq)) for w in words], dtype=np.int64)
        return cls(np.zeros((len(words), 0), dtype=np.int8),
                   np.zeros(len(words), dtype=np.int64), tuple(uniq), idx)

    @classmethod
    def uniform(cls, heads: np.ndarray, tail: Word) -> "WordBatch":
        heads = np.asarray(heads, dtype=np.int8)
        M = heads.shape[0]
        return cls(heads, np.full(M, heads.shape[1], dtype=np.int64), (tail,),
                   np.zeros(M, dtype=np.int64))

    def word(self, i: int) -> Word:
        return prepend(self.heads[i, : self.lengths[i]].tolist(),
                       self.tails[self.tail_index[i]])

    def words(self) -> list[Word]:
        return [self.word(i) for i in range(len(self))]

    def leading(self, s: int) -> np.ndarray:
        """First ``s`` letters of every word, shape ``(M, s)``."""
        M = len(self)
        out = np.zeros((M, s), dtype=np.int8)
        if s == 0:
            return out
        tail_lead = np.array([t.head(s) for t in self.tails], dtype=np.int8).reshape(-1, s)
        H = self.heads.shape[1]
        for j in range(s):
            from_head = j < self.lengths
            k = np.clip(j - self.lengths, 0, s - 1)
            tl = tail_lead[self.tail_index, k] if len(self.tails) else 0
            hv = self.heads[:, j] if j < H else 0
            out[:, j] = np.where(from_head, hv, tl)
        return out

    def take(self, idx) -> "WordBatch":
        idx = np.asarray(idx)
        return WordBatch(self.heads[idx], self.lengths[idx], self.tails, self.tail_index[idx])

    @staticmethod
    def concat(batches: Sequence["WordBatch"]) -> "WordBatch":
        H = max(b.heads.shape[1] for b in batches)
        tails: list[Word] = []
        pos: dict[Word, int] = {}
        heads, lengths, tidx = [], [], []
        for b in batches:
            remap = np.array([pos.setdefault(t, len(pos)) for t in b.tails], dtype=np.int64)
            h = np.zeros((len(b), H), dtype=np.int8)
            h[:, : b.heads.shape[1]] = b.heads
            heads.append(h)
            lengths.append(b.lengths)
            tidx.append(remap[b.tail_index] if len(b) else b.tail_index)
        tails = list(pos)
        return WordBatch(np.concatenate(heads), np.concatenate(lengths), tuple(tails),
                         np.concatenate(tidx))

    def strings(self) -> list[str]:
        return [str(w) for w in self.words()]
