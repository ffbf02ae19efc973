"""Reduced words in the free fundamental group and their action on the cover tree."""

from __future__ import annotations

from dataclasses import dataclass

from .metric_graph import MetricGraph, Path_, concat, reduce_path, reverse_path


@dataclass(frozen=True)
class Word:
    """Freely reduced word; letter ``k`` is generator ``k-1``, ``-k`` its inverse."""

    letters: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", _reduce_letters(self.letters))

    @classmethod
    def parse(cls, text: str) -> "Word":
        """Parse ``"abA"``-style text: lowercase letters are generators, uppercase inverses.

        ``"e"``, ``"1"`` and the empty string denote the identity.
        """
        text = text.strip()
        if text in ("", "1", "e"):
            return cls()
        letters = []
        for ch in text:
            if not ch.isalpha():
                raise ValueError(f"bad word {text!r}")
            k = ord(ch.lower()) - ord("a") + 1
            letters.append(k if ch.islower() else -k)
        return cls(tuple(letters))

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple(-x for x in reversed(self.letters)))

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return self.inverse() ** (-n)
        return Word(self.letters * n)

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        if not self.letters:
            return "e"
        return "".join(
            chr(ord("a") + abs(x) - 1) if x > 0 else chr(ord("A") + abs(x) - 1)
            for x in self.letters
        )

    def loop(self, g: MetricGraph) -> Path_:
        """Reduced closed path at the base vertex representing this element."""
        path: Path_ = ()
        for x in self.letters:
            path = concat(path, g.generator_loop(x))
        return path

    def act(self, g: MetricGraph, path: Path_) -> Path_:
        """Image of the tree vertex addressed by ``path`` under this deck transformation."""
        return concat(self.loop(g), path)


def _reduce_letters(letters) -> tuple[int, ...]:
    out: list[int] = []
    for x in letters:
        if x == 0:
            raise ValueError("letter 0 is not a generator")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def word_of_path(g: MetricGraph, path: Path_) -> tuple[Word, int]:
    """Address ``(word, quotient vertex)`` of the tree vertex reached by ``path``."""
    letters = []
    for d in path:
        i = d >> 1
        if i in g.generator_index:
            k = g.generator_index[i] + 1
            letters.append(-k if d & 1 else k)
    end = g.head(path[-1]) if path else 0
    return Word(tuple(letters)), end


def path_of_word(g: MetricGraph, word: Word, vertex: int = 0) -> Path_:
    """Reduced path from the base vertex to the lift ``word . vertex``."""
    return concat(word.loop(g), g.tree_paths[vertex])


def cyclic_reduction(path: Path_) -> tuple[Path_, Path_]:
    """Split a reduced closed path as ``c + k + reverse(c)`` with ``k`` cyclically reduced."""
    n = len(path)
    i = 0
    while 2 * i < n - 1 and path[i] == path[n - 1 - i] ^ 1:
        i += 1
    return path[:i], path[i : n - i]


def enumerate_words(rank: int, max_len: int):
    """All reduced words of length <= ``max_len`` in breadth-first order."""
    frontier = [Word()]
    yield Word()
    alphabet = [k for k in range(1, rank + 1)] + [-k for k in range(1, rank + 1)]
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            last = w.letters[-1] if w.letters else 0
            for x in alphabet:
                if x != -last:
                    nw = Word(w.letters + (x,))
                    nxt.append(nw)
                    yield nw
        frontier = nxt


__all__ = [
    "Word",
    "word_of_path",
    "path_of_word",
    "cyclic_reduction",
    "enumerate_words",
    "reduce_path",
    "reverse_path",
]
