import numpy as np
import pytest

from sentindex import LexiconLoadError, OutOfVocabularyError
from sentindex.lexicon import (
    SentimentLexicon,
    LexiconEntry,
    expand_negative,
    load_lexicon,
    save_lexicon,
)


def write_lexicon(tmp_path, text, name="lex.tsv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoad:
    def test_numeric_and_named_labels(self, tmp_path):
        path = write_lexicon(tmp_path, "good\t2\nbad\t-1\nup\tPOS\ndown\tNEG\n")
        lex = load_lexicon(path)
        assert lex.positives == {"good", "up"}
        assert lex.negatives == {"bad", "down"}

    def test_neutral_entries_dropped(self, tmp_path):
        path = write_lexicon(tmp_path, "meh\t0\nso\tNEUT\nbad\t-2\n")
        lex = load_lexicon(path)
        assert lex.positives == frozenset()
        assert lex.negatives == {"bad"}

    def test_three_column_round_trip(self, tmp_path):
        path = write_lexicon(tmp_path, "good\t1\tbase\nawful\t-1\texpanded\n")
        lex = load_lexicon(path)
        assert lex.provenance_of("awful") == "expanded"
        out = tmp_path / "saved.tsv"
        save_lexicon(lex, out)
        assert out.read_text(encoding="utf-8") == path.read_text(encoding="utf-8")

    def test_all_problems_reported_together(self, tmp_path):
        path = write_lexicon(tmp_path, "onlyword\nx\t9\ny\tPOS\ny\tNEG\n\t1\n")
        with pytest.raises(LexiconLoadError) as err:
            load_lexicon(path)
        message = str(err.value)
        assert "line 1" in message        # wrong field count
        assert "line 2" in message        # polarity out of range
        assert "conflicting polarity" in message and "y" in message
        assert "line 5" in message        # empty word

    def test_same_sign_duplicate_first_wins(self, tmp_path):
        path = write_lexicon(tmp_path, "bad\t-1\nbad\t-2\n")
        lex = load_lexicon(path)
        assert len(lex.entries) == 1
        assert lex.entries[0].polarity_label == "-1"

    def test_multiword_skipped_with_warning(self, tmp_path, caplog):
        path = write_lexicon(tmp_path, "not good\t-1\nbad\t-1\n")
        with caplog.at_level("WARNING"):
            lex = load_lexicon(path)
        assert lex.negatives == {"bad"}
        assert lex.multiword_skipped == 1
        assert any("multi-word" in rec.getMessage() for rec in caplog.records)

    def test_bad_provenance_rejected(self, tmp_path):
        path = write_lexicon(tmp_path, "bad\t-1\tguessed\n")
        with pytest.raises(LexiconLoadError, match="provenance"):
            load_lexicon(path)

    def test_word_in_both_sets_rejected_at_construction(self):
        entries = (LexiconEntry("x", "1", 1, "base"),
                   LexiconEntry("x", "-1", -1, "base"))
        with pytest.raises(LexiconLoadError):
            SentimentLexicon(entries)


class TestExpand:
    def test_n_zero_is_identity(self, tiny_model, fixtures_dir):
        base = load_lexicon(fixtures_dir / "tiny_lexicon.tsv")
        expanded, report = expand_negative(tiny_model, "crisis", 0, base)
        assert expanded.entries == base.entries
        assert report.added == 0
        assert report.candidates_examined == 0
        assert report.added_words == ()

    def test_n_zero_skips_vocabulary_check(self, tiny_model, fixtures_dir):
        base = load_lexicon(fixtures_dir / "tiny_lexicon.tsv")
        expanded, report = expand_negative(tiny_model, "notaword", 0, base)
        assert expanded.entries == base.entries

    def test_expansion_bookkeeping(self, tiny_model, fixtures_dir):
        from sentindex.embedding import top_k_similar

        base = load_lexicon(fixtures_dir / "tiny_lexicon.tsv")
        n = 12
        expanded, report = expand_negative(tiny_model, "crisis", n, base)
        ranked = top_k_similar(tiny_model, "crisis", n)
        expected_added = [w for w, _ in ranked
                          if w not in base.negatives and w not in base.positives]
        assert [w for w, _ in report.added_words] == expected_added
        assert report.added == len(expected_added)
        assert report.candidates_examined == n
        assert report.overlaps_excluded == n - report.added
        assert report.overlaps_excluded == (report.overlaps_negative
                                            + report.overlaps_positive)
        assert len(expanded.negatives) - len(base.negatives) == report.added
        assert expanded.positives == base.positives
        assert not report.clamped

    def test_added_entries_are_marked_expanded(self, tiny_model, fixtures_dir):
        base = load_lexicon(fixtures_dir / "tiny_lexicon.tsv")
        expanded, report = expand_negative(tiny_model, "crisis", 5, base)
        new = expanded.entries[len(base.entries):]
        assert all(e.provenance == "expanded" and e.sign == -1 for e in new)
        assert {e.word for e in new} == {w for w, _ in report.added_words}

    def test_similarities_descend(self, tiny_model, fixtures_dir):
        base = load_lexicon(fixtures_dir / "tiny_lexicon.tsv")
        _, report = expand_negative(tiny_model, "crisis", 15, base)
        sims = [s for _, s in report.added_words]
        assert sims == sorted(sims, reverse=True)

    def test_clamp_beyond_vocabulary(self, tiny_model, fixtures_dir):
        base = load_lexicon(fixtures_dir / "tiny_lexicon.tsv")
        huge = 10 * len(tiny_model.vocab)
        expanded, report = expand_negative(tiny_model, "crisis", huge, base)
        assert report.clamped
        assert report.candidates_examined == len(tiny_model.vocab) - 1
        # every non-lexicon vocabulary word ends up negative
        vocab_words = set(tiny_model.vocab.words)
        expected = {w for w in vocab_words - {"crisis"}
                    if w not in base.positives and w not in base.negatives}
        assert {w for w, _ in report.added_words} == expected

    def test_oov_seed_raises(self, tiny_model, fixtures_dir):
        base = load_lexicon(fixtures_dir / "tiny_lexicon.tsv")
        with pytest.raises(OutOfVocabularyError) as err:
            expand_negative(tiny_model, "notaword", 3, base)
        assert err.value.word == "notaword"

    def test_negative_n_rejected(self, tiny_model, fixtures_dir):
        base = load_lexicon(fixtures_dir / "tiny_lexicon.tsv")
        with pytest.raises(ValueError):
            expand_negative(tiny_model, "crisis", -1, base)

    def test_negative_share(self, tiny_model, fixtures_dir):
        base = load_lexicon(fixtures_dir / "tiny_lexicon.tsv")
        expanded, report = expand_negative(tiny_model, "crisis", 10, base)
        n_neg, n_pos = len(expanded.negatives), len(expanded.positives)
        assert report.negative_share == pytest.approx(n_neg / (n_neg + n_pos))

    def test_report_json_is_deterministic(self, tiny_model, fixtures_dir):
        base = load_lexicon(fixtures_dir / "tiny_lexicon.tsv")
        _, r1 = expand_negative(tiny_model, "crisis", 8, base)
        _, r2 = expand_negative(tiny_model, "crisis", 8, base)
        assert r1.to_json() == r2.to_json()
