import numpy as np
import pytest
from hypothesis import given, strategies as st

from tesserae.symbolic import (
    ABB_BAB,
    CHACON,
    FIBONACCI,
    SIERPINSKI,
    Alphabet,
    GridRule,
    SymbolicRule1D,
    UnknownLetterError,
    grid_patch,
)


def test_fibonacci_words():
    assert "".join(FIBONACCI.level_block("a", 4)) == "abaababa"
    assert [len(FIBONACCI.level_block("a", n)) for n in range(6)] == [1, 2, 3, 5, 8, 13]


def test_matrix_convention_counts_types_in_images():
    # column j lists the letter counts of the image of letter j
    assert CHACON.substitution_matrix().rows == ((3, 0), (1, 1))
    assert ABB_BAB.substitution_matrix().rows == ((1, 1), (2, 2))


@st.composite
def rules(draw):
    k = draw(st.integers(1, 4))
    letters = "abcd"[:k]
    images = {a: "".join(draw(st.lists(st.sampled_from(letters), min_size=1, max_size=3))) for a in letters}
    return SymbolicRule1D.from_strings(images)


@given(rules(), st.integers(0, 5))
def test_block_lengths_match_expansion(rule, n):
    exact = rule.block_lengths(n)
    for a in rule.alphabet:
        assert exact[a] == len(rule.level_block(a, n))


@given(rules(), st.integers(0, 4))
def test_letter_counts_follow_matrix_power(rule, n):
    M = rule.substitution_matrix().to_numpy(dtype=object)
    Mn = np.linalg.matrix_power(M.astype(np.int64), n)
    for j, a in enumerate(rule.alphabet):
        word = rule.level_block(a, n)
        counts = [word.count(b) for b in rule.alphabet]
        assert counts == list(Mn[:, j])


def test_unknown_letter_rejected():
    with pytest.raises(UnknownLetterError):
        SymbolicRule1D(Alphabet(("a",)), {"a": ("a", "c")})
    with pytest.raises(UnknownLetterError):
        FIBONACCI.apply("abz")


def test_grid_block_and_labels():
    block = SIERPINSKI.letter_block("2", 1)
    assert block == [["2", "2", "2"], ["2", "1", "2"], ["2", "2", "2"]]
    assert SIERPINSKI.substitution_matrix().rows == ((9, 1), (0, 8))
    p = grid_patch(SIERPINSKI, "2", 2)
    assert len(p) == 81
    assert {pr.label for pr in p.prototiles} == {"white", "blue"}


def test_grid_rejects_wrong_shape():
    with pytest.raises(ValueError):
        GridRule(Alphabet(("a",)), 2, {"a": (("a", "a"),)})


@given(st.integers(0, 4))
def test_grid_counts_are_matrix_powers(n):
    block = SIERPINSKI.level_block("2", n)
    assert int((block == 1).sum()) == 8**n
