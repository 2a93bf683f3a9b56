import itertools

import pytest
from hypothesis import given, strategies as st

from tsystems.laws import (
    LETTER_ORDER, find_two_letter_law, iter_words_f2, kernel_element, permuted_law_words,
    reduce_law_to_two_letters, strengthen_on_generating_pairs, vanishing_words,
)
from tsystems.words import Word, basis, commutator, evaluate

from conftest import group

reduced_f2 = st.lists(st.sampled_from(LETTER_ORDER), min_size=1, max_size=10).map(
    lambda ls: Word(tuple(ls), 2)).filter(lambda w: len(w) > 0)


def naive_first_law(G, max_len):
    for L in range(1, max_len + 1):
        for ls in itertools.product(LETTER_ORDER, repeat=L):
            if any(a == -b for a, b in zip(ls, ls[1:])):
                continue
            w = Word(ls, 2)
            if all(evaluate(w, (a, b), G) == 0 for a in range(G.order) for b in range(G.order)):
                return w
    return None


@pytest.mark.parametrize("spec,max_len", [("S3", 6), ("C2xC2", 4), ("Q8", 5), ("C3", 4), ("D4", 5)])
def test_first_law_matches_naive(spec, max_len):
    G = group(spec)
    rep = find_two_letter_law(G, max_len)
    ref = naive_first_law(G, max_len)
    assert (rep.word if rep else None) == ref


def test_law_examples():
    assert find_two_letter_law(group("C1"), 3).word.letters == (1,)
    rep = find_two_letter_law(group("C2xC2"), 4)
    assert rep.word.letters == (1, 1) and rep.checked == 16
    assert find_two_letter_law(group("A5"), 5) is None


def test_word_order():
    level2 = list(iter_words_f2(2))[1]
    assert level2[:4] == [(1, 1), (1, 2), (1, -2), (-1, -1)]
    assert len(level2) == 12


def test_generating_pairs_domain():
    G = group("S3")
    rep = find_two_letter_law(G, 6, domain="generating_pairs")
    assert rep is not None
    for a in range(6):
        for b in range(6):
            if G.pair_generates[a, b]:
                assert evaluate(rep.word, (a, b), G) == 0


def test_strengthen_examples():
    x1, x2 = basis(2)
    assert str(strengthen_on_generating_pairs(x1)) == "1 2 -1 -2"
    assert str(strengthen_on_generating_pairs(x1 * x2)) == "1 2 1 -2 -1 -1"
    with pytest.raises(ValueError):
        strengthen_on_generating_pairs(Word.identity(2))


@given(reduced_f2)
def test_strengthen_structure(w):
    v = strengthen_on_generating_pairs(w)
    assert len(v) == 2 * len(w) + 2
    assert v.letters[: len(w)] == w.letters
    z = v.letters[len(w)]
    assert z not in (-w.letters[0], w.letters[-1], -w.letters[-1])


def test_strengthen_property_s3():
    G = group("S3")
    words = vanishing_words(G, 6, "generating_pairs")
    assert words
    for w in words:
        v = strengthen_on_generating_pairs(w)
        assert all(evaluate(v, (a, b), G) == 0 for a in range(6) for b in range(6))


def test_reduce_law():
    x = basis(3)
    w2 = commutator(*basis(2))
    assert reduce_law_to_two_letters(w2).word == w2
    r = reduce_law_to_two_letters(commutator(x[0], x[1]))
    assert r.trials == 0 and r.word == w2
    r = reduce_law_to_two_letters(commutator(commutator(x[0], x[1]), commutator(x[0], x[2])), trials=10_000)
    assert r is not None and len(r.word) > 0
    assert r.word == commutator(commutator(x[0], x[1]), commutator(x[0], x[2])).substitute(r.images, 2)


def test_kernel_examples():
    x1, x2 = basis(2)
    rep = kernel_element(commutator(x1, x2), 4, group("C2xC2"))
    x = basis(4)
    assert rep.symbolic == (x[0], x[1], x[2], x[3] * commutator(x[0], x[1]))
    assert rep.non_inner and rep.acts_trivially and rep.checked == 256 and rep.exhaustive
    assert kernel_element(x1 ** 6, 3, group("S3")).acts_trivially
    assert kernel_element(x1 ** 3, 3, group("C3")).acts_trivially
    assert not kernel_element(commutator(x1, x2), 3, group("A5")).acts_trivially
    sampled = kernel_element(commutator(x1, x2), 4, group("A5"), limit=1000, samples=500)
    assert not sampled.exhaustive and sampled.checked == 500


def test_permuted_identity_images_trivial():
    x = basis(3)
    for level in iter_words_f2(6):
        for ls in level:
            assert all(not w.letters for w in permuted_law_words(x, Word(ls, 2)))
    assert all(not w.letters for w in permuted_law_words(x, Word.identity(2)))


def test_permuted_example():
    x = basis(3)
    images = (x[0], x[1], x[2] * commutator(x[0], x[1]))
    w1, w2, w3 = permuted_law_words(images, Word((1,), 2))
    assert str(w3) == "1 2 1 -2 -1 -1"
