import itertools
import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sigtrade.errors import AlphabetMismatchError, CapacityError, OrderError
from sigtrade.signature import signature_of_path
from sigtrade.words import (LinearFunctional, concat, count_words, enumerate_words, pair,
                            shuffle, shuffle_functionals, word_index)


def brute_shuffle(u, v):
    """All interleavings by choosing the positions taken by u."""
    n = len(u) + len(v)
    out = Counter()
    for pos in itertools.combinations(range(n), len(u)):
        it_u, it_v = iter(u), iter(v)
        out[tuple(next(it_u) if i in pos else next(it_v) for i in range(n))] += 1
    return dict(out)


def words(alpha=4, max_len=3):
    return st.lists(st.integers(0, alpha - 1), max_size=max_len).map(tuple)


def test_concat_examples():
    assert concat((1, 2), (3, 4)) == (1, 2, 3, 4)
    assert concat((), (2, 1)) == (2, 1)
    with pytest.raises(AlphabetMismatchError):
        concat((1, 5), (0,), alphabet=4)


def test_functional_concat():
    a0, a1, a2 = 0.5, -2.0, 3.0
    ell = LinearFunctional(5, {(1,): a0, (2,): a1, (1, 2): a2})
    got = ell.concat((3, 4))
    assert dict(got.terms) == {(1, 3, 4): a0, (2, 3, 4): a1, (1, 2, 3, 4): a2}


def test_shuffle_worked_example():
    got = shuffle((1, 2), (3, 4))
    assert dict(got.terms) == {w: 1 for w in [(1, 2, 3, 4), (1, 3, 2, 4), (1, 3, 4, 2),
                                              (3, 1, 2, 4), (3, 1, 4, 2), (3, 4, 1, 2)]}


def test_shuffle_empty_and_repeat():
    assert dict(shuffle((2, 0), ()).terms) == {(2, 0): 1}
    assert dict(shuffle((), (2, 0)).terms) == {(2, 0): 1}
    assert dict(shuffle((1,), (1,)).terms) == {(1, 1): 2}


def test_shuffle_alphabet_mismatch():
    with pytest.raises(AlphabetMismatchError):
        shuffle((0, 3), (1,), alphabet=3)
    with pytest.raises(AlphabetMismatchError):
        LinearFunctional(2, {(0,): 1}) + LinearFunctional(3, {(0,): 1})


@given(words(), words())
def test_shuffle_matches_brute_force(u, v):
    assert dict(shuffle(u, v, alphabet=4).terms) == brute_shuffle(u, v)


@given(words(max_len=4), words(max_len=4))
def test_shuffle_mass(u, v):
    total = sum(shuffle(u, v, alphabet=4).terms.values())
    assert total == math.comb(len(u) + len(v), len(u))


@given(words(), words(), words())
def test_shuffle_commutative_associative(a, b, c):
    A = lambda w: LinearFunctional.word(w, 4)
    assert dict(shuffle(a, b, 4).terms) == dict(shuffle(b, a, 4).terms)
    left = shuffle_functionals(shuffle(a, b, 4), A(c))
    right = shuffle_functionals(A(a), shuffle(b, c, 4))
    assert dict(left.terms) == dict(right.terms)


def test_shuffle_functionals_examples():
    s = shuffle_functionals(LinearFunctional(4, {(): 2}), LinearFunctional(4, {(): 3}))
    assert dict(s.terms) == {(): 6}
    s = shuffle_functionals(LinearFunctional(4, {(1,): 1}), LinearFunctional(4, {(2,): 1, (3,): 1}))
    assert dict(s.terms) == {(1, 2): 1, (2, 1): 1, (1, 3): 1, (3, 1): 1}


@st.composite
def functionals(draw, alpha=3):
    terms = draw(st.dictionaries(words(alpha, 2), st.floats(-3, 3, allow_nan=False), max_size=4))
    return LinearFunctional(alpha, terms)


@given(functionals(), functionals())
def test_shuffle_functionals_commutative(a, b):
    assert shuffle_functionals(a, b).isclose(shuffle_functionals(b, a))


def test_enumerate_words_examples():
    w = enumerate_words(4, 2)
    assert len(w) == 21 and w[:5] == [(), (0,), (1,), (2,), (3,)]
    assert enumerate_words(1, 3) == [(), (0,), (0, 0), (0, 0, 0)]
    assert enumerate_words(3, 0) == [()]
    with pytest.raises(CapacityError):
        enumerate_words(10, 7)


@given(st.integers(1, 5), st.integers(0, 4))
def test_enumerate_words_bijection(A, M):
    w = enumerate_words(A, M)
    assert len(w) == len(set(w)) == sum(A ** k for k in range(M + 1)) == count_words(A, M)
    assert all(word_index(x, A) == i for i, x in enumerate(w))
    assert w == sorted(w, key=lambda x: (len(x), x))


def test_pair_basics(rng):
    S = signature_of_path(rng.standard_normal((6, 3)), 3)
    assert pair(LinearFunctional(3, {(): 2.5}), S) == 2.5
    assert pair(LinearFunctional.word((2, 0), 3), S) == S.coeff((2, 0))
    with pytest.raises(OrderError):
        pair(LinearFunctional.word((0, 0, 0, 1), 3), S)
    with pytest.raises(AlphabetMismatchError):
        pair(LinearFunctional.word((0,), 4), S)


@given(functionals(), functionals(), st.floats(-2, 2), st.floats(-2, 2))
def test_pair_linear(l1, l2, a, b):
    S = signature_of_path(np.array([[0, 0, 0], [1.0, -0.5, 0.3], [0.2, 0.4, 1.1]]), 2)
    lhs = pair(a * l1 + b * l2, S)
    assert lhs == pytest.approx(a * pair(l1, S) + b * pair(l2, S), rel=1e-12, abs=1e-12)


def test_zero_terms_dropped():
    ell = LinearFunctional(2, {(0,): 0.0, (1,): 1.0}) + LinearFunctional(2, {(1,): -1.0})
    assert dict(ell.terms) == {}
