"""Words over a finite alphabet, linear functionals, concatenation and shuffles.

Letters are 0-based integers. A word is a plain tuple of letters; the empty
tuple is the empty word. For a market factor path the channel convention is
0 = time, 1..d = assets, d+1..d+N = factors.

The canonical flattening order used everywhere in the package is graded
lexicographic: words sorted by length, then lexicographically by letters.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from types import MappingProxyType
from typing import Iterable, Mapping

from .errors import AlphabetMismatchError, CapacityError, OrderError

Word = tuple[int, ...]

EMPTY: Word = ()
WORD_ORDER_TAG = "graded-lex"
DEFAULT_WORD_CAP = 10**7


@dataclass(frozen=True)
class Alphabet:
    size: int

    def __post_init__(self):
        if int(self.size) != self.size or self.size < 1:
            raise ValueError(f"alphabet size must be a positive integer, got {self.size!r}")

    def check(self, word: Word) -> Word:
        for a in word:
            if not 0 <= a < self.size:
                raise AlphabetMismatchError(
                    f"letter {a} outside alphabet of size {self.size} in word {word}")
        return word


def as_word(letters: Iterable[int], alphabet: int | None = None) -> Word:
    w = tuple(int(a) for a in letters)
    if alphabet is not None:
        Alphabet(alphabet).check(w)
    return w


def word_str(w: Word) -> str:
    if not w:
        return "∅"
    sep = "" if max(w) < 10 else ","
    return sep.join(str(a) for a in w)


def concat(w: Word, v: Word, alphabet: int | None = None) -> Word:
    """Concatenation ``wv``. Validates letters when an alphabet size is given."""
    if alphabet is not None:
        A = Alphabet(alphabet)
        A.check(w)
        A.check(v)
    return tuple(w) + tuple(v)


@lru_cache(maxsize=None)
def _shuffle_cached(u: Word, v: Word) -> tuple[tuple[Word, int], ...]:
    # ua ⧢ vb = (u ⧢ vb) a + (ua ⧢ v) b
    if not u:
        return ((v, 1),)
    if not v:
        return ((u, 1),)
    out: dict[Word, int] = {}
    a, b = u[-1], v[-1]
    for w, c in _shuffle_items(u[:-1], v):
        key = w + (a,)
        out[key] = out.get(key, 0) + c
    for w, c in _shuffle_items(u, v[:-1]):
        key = w + (b,)
        out[key] = out.get(key, 0) + c
    return tuple(sorted(out.items(), key=lambda kv: (len(kv[0]), kv[0])))


def _shuffle_items(u: Word, v: Word) -> tuple[tuple[Word, int], ...]:
    # shuffle is commutative, so one cache entry serves both argument orders
    if (len(u), u) > (len(v), v):
        u, v = v, u
    return _shuffle_cached(u, v)


def shuffle_items(u: Word, v: Word) -> tuple[tuple[Word, int], ...]:
    """Shuffle product as ``((word, multiplicity), ...)`` in canonical word order."""
    return _shuffle_items(tuple(u), tuple(v))


def shuffle(w: Word, v: Word, alphabet: int | None = None) -> "LinearFunctional":
    """Shuffle product of two words with exact integer multiplicities."""
    w, v = tuple(w), tuple(v)
    if alphabet is None:
        alphabet = max(w + v, default=0) + 1
    A = Alphabet(alphabet)
    A.check(w)
    A.check(v)
    return LinearFunctional(alphabet, dict(shuffle_items(w, v)))


def count_words(alphabet: int, order: int) -> int:
    if alphabet == 1:
        return order + 1
    return (alphabet ** (order + 1) - 1) // (alphabet - 1)


def level_offset(alphabet: int, length: int) -> int:
    """Index of the first word of the given length in the canonical order."""
    return count_words(alphabet, length - 1) if length > 0 else 0


def word_index(w: Word, alphabet: int) -> int:
    idx = 0
    for a in w:
        idx = idx * alphabet + a
    return level_offset(alphabet, len(w)) + idx


def enumerate_words(alphabet: int, order: int, cap: int = DEFAULT_WORD_CAP) -> list[Word]:
    """All words of length <= order in canonical graded-lex order."""
    if order < 0:
        raise ValueError("order must be >= 0")
    Alphabet(alphabet)
    n = count_words(alphabet, order)
    if n > cap:
        raise CapacityError(
            f"{n} words over alphabet {alphabet} up to order {order} exceeds the cap of {cap}")
    out: list[Word] = []
    for k in range(order + 1):
        out.extend(itertools.product(range(alphabet), repeat=k))
    return out


def sort_words(words: Iterable[Word]) -> list[Word]:
    return sorted(set(words), key=lambda w: (len(w), w))


@dataclass(frozen=True)
class LinearFunctional:
    """Finite linear combination of words: an element of the dual tensor algebra."""

    alphabet: int
    terms: Mapping[Word, float] = field(default_factory=dict)

    def __post_init__(self):
        A = Alphabet(self.alphabet)
        clean = {}
        for w, c in dict(self.terms).items():
            w = A.check(tuple(w))
            if c != 0:
                clean[w] = clean.get(w, 0) + c
        clean = {w: c for w, c in clean.items() if c != 0}
        object.__setattr__(self, "terms", MappingProxyType(clean))

    @classmethod
    def word(cls, w: Word, alphabet: int, coeff: float = 1.0) -> "LinearFunctional":
        return cls(alphabet, {tuple(w): coeff})

    @classmethod
    def from_vector(cls, coeffs, words: list[Word], alphabet: int) -> "LinearFunctional":
        return cls(alphabet, {w: float(c) for w, c in zip(words, coeffs)})

    @property
    def max_length(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def to_vector(self, words: list[Word]):
        import numpy as np

        index = {w: i for i, w in enumerate(words)}
        out = np.zeros(len(words))
        for w, c in self.terms.items():
            if w not in index:
                raise OrderError(f"word {word_str(w)} is not in the target word list")
            out[index[w]] = c
        return out

    def _check(self, other: "LinearFunctional"):
        if self.alphabet != other.alphabet:
            raise AlphabetMismatchError(
                f"alphabet sizes differ: {self.alphabet} vs {other.alphabet}")

    def __add__(self, other: "LinearFunctional") -> "LinearFunctional":
        self._check(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return LinearFunctional(self.alphabet, out)

    def __sub__(self, other):
        return self + (-1) * other

    def __mul__(self, scalar: float) -> "LinearFunctional":
        return LinearFunctional(self.alphabet, {w: scalar * c for w, c in self.terms.items()})

    __rmul__ = __mul__

    def concat(self, v: Word) -> "LinearFunctional":
        """Right concatenation ``ℓv``: every word w becomes wv."""
        v = Alphabet(self.alphabet).check(tuple(v))
        return LinearFunctional(self.alphabet, {w + v: c for w, c in self.terms.items()})

    def isclose(self, other: "LinearFunctional", rel=1e-12, abs_=1e-12) -> bool:
        self._check(other)
        keys = set(self.terms) | set(other.terms)
        return all(math.isclose(self.terms.get(k, 0), other.terms.get(k, 0),
                                rel_tol=rel, abs_tol=abs_) for k in keys)

    def __repr__(self):
        if not self.terms:
            return f"LinearFunctional({self.alphabet}: 0)"
        body = " + ".join(f"{c:g}·{word_str(w)}" for w, c in
                          sorted(self.terms.items(), key=lambda kv: (len(kv[0]), kv[0])))
        return f"LinearFunctional({self.alphabet}: {body})"


def shuffle_functionals(a: LinearFunctional, b: LinearFunctional) -> LinearFunctional:
    """Bilinear extension of the shuffle product."""
    a._check(b)
    out: dict[Word, float] = {}
    for w, cw in a.terms.items():
        for v, cv in b.terms.items():
            for u, k in shuffle_items(w, v):
                out[u] = out.get(u, 0) + cw * cv * k
    return LinearFunctional(a.alphabet, out)


def pair(ell: LinearFunctional, sig) -> float:
    """``<ℓ, S> = Σ_w ℓ_w S^w`` for any signature-like object.

    ``sig`` needs ``channels``, ``order`` and ``coeff(word)``. Words longer than
    the signature's order are rejected rather than truncated.
    """
    if ell.alphabet != sig.channels:
        raise AlphabetMismatchError(
            f"functional alphabet {ell.alphabet} != signature channels {sig.channels}")
    total = 0.0
    for w, c in ell.terms.items():
        if len(w) > sig.order:
            raise OrderError(
                f"word {word_str(w)} has length {len(w)} > signature order {sig.order}")
        total += c * sig.coeff(w)
    return float(total)
