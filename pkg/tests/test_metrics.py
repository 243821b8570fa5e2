from __future__ import annotations

import pytest

from maskstego import (
    ReferenceLM,
    Token,
    TokenSequence,
    UndefinedPayloadError,
    payload_bpw,
    pseudo_perplexity,
)

from .conftest import load_fixture

# stego row of the worked f=2 comparison: 31 words plus final punctuation,
# with seven positions annotated as carrying 1+3+3+3+1+1+3 = 15 bits
ROW_F2_TEXT = (
    "Gerson and Walter contend there are multiple approaches to solving a "
    "given problem and users should be encouraged to find their own way by "
    "solving problems different from the real one ."
)
ROW_F2_CODES = ["1", "001", "100", "000", "1", "1", "000"]


class TestPayloadBpw:
    def test_thirteen_bits_over_thirty_one_words(self):
        text = TokenSequence.from_surfaces(["word"] * 31 + ["."])
        stats = payload_bpw(text, 13)
        assert stats.countable_words == 31
        assert f"{stats.bpw:.2f}" == "0.42"

    def test_zero_bits_gives_zero(self):
        text = TokenSequence.from_surfaces(["a", "b", "."])
        assert payload_bpw(text, 0).bpw == 0.0

    def test_worked_comparison_row(self):
        text = TokenSequence.from_surfaces(ROW_F2_TEXT.split())
        assert len(text) == 32
        bits = sum(len(c) for c in ROW_F2_CODES)
        assert bits == 15
        stats = payload_bpw(text, bits)
        assert stats.countable_words == 31
        assert f"{stats.bpw:.2f}" == "0.48"

    def test_no_countable_words_raises(self):
        with pytest.raises(UndefinedPayloadError):
            payload_bpw(TokenSequence.from_surfaces([".", ","]), 4)

    def test_alphanumeric_tokens_count(self):
        # bracketed page markers contain digits, so they count as words
        text = TokenSequence.from_surfaces(["[186]", "word", "."])
        assert payload_bpw(text, 2).countable_words == 2

    def test_punctuation_insertion_never_changes_bpw(self):
        base = TokenSequence.from_surfaces(["a", "b", "c"])
        more = TokenSequence.from_surfaces(["a", ",", "b", "c", ".", "!"])
        assert payload_bpw(base, 7).bpw == payload_bpw(more, 7).bpw


class TestPseudoPerplexity:
    def test_single_token_vocab_gives_one(self):
        lm = ReferenceLM([Token("word")], seed=5)
        text = TokenSequence.from_surfaces(["word"] * 6)
        assert pseudo_perplexity(lm, text) == pytest.approx(1.0)

    def test_finite_positive_for_text_and_scramble(self, reference_lm):
        text = reference_lm.tokenize("the little city near the river .")
        scramble = reference_lm.tokenize("river the near little the city .")
        for t in (text, scramble):
            with pytest.warns(RuntimeWarning):
                value = pseudo_perplexity(reference_lm, t)
            assert value > 0.0
            assert value != float("inf")

    def test_in_vocab_text_needs_no_flooring(self, reference_lm, recwarn):
        text = reference_lm.tokenize("city town village harbor market .")
        value = pseudo_perplexity(reference_lm, text)
        assert value > 0.0
        assert not any(isinstance(w.message, RuntimeWarning) for w in recwarn.list)

    def test_golden_fixture(self, vocab64):
        fx = load_fixture("pseudo_perplexity.json")
        lm = ReferenceLM(vocab64, seed=fx["seed"])
        text = TokenSequence.from_surfaces(fx["text"])
        with pytest.warns(RuntimeWarning):
            value = pseudo_perplexity(lm, text)
        assert value == pytest.approx(fx["value"], rel=1e-12)

    def test_no_maskable_tokens_raises(self, reference_lm):
        with pytest.raises(ValueError):
            pseudo_perplexity(reference_lm, TokenSequence.from_surfaces([".", ","]))
