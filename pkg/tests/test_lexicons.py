import pytest

from voidscope.lexicons import (
    EmptyLexiconError,
    LexiconMatcher,
    load_lexicons,
    tag_lexicons,
)
from voidscope.queries import normalize_query

LEXICONS = load_lexicons()
MATCHER = LexiconMatcher(LEXICONS)


def tag(text: str):
    return MATCHER.tag(normalize_query(text).text)


def test_conspiracy_query_tagged():
    tags = tag("9/11 inside job proof")
    assert tags.conspiracy
    assert not tags.political


def test_excluded_hashtag_never_matches():
    tags = tag("mountain dew")
    assert not tags.conspiracy
    tags = tag("#dew coverup")
    assert not tags.conspiracy


def test_empty_query_matches_nothing():
    tags = tag("")
    assert not tags.political and not tags.conspiracy
    assert tags.matched_terms == ()


def test_case_insensitive():
    assert tag("QAnon Storm").conspiracy
    assert tag("TRUMP rally").political
    assert tag("qanon storm").matched_terms == tag("QANON STORM").matched_terms


def test_hashtag_matches_all_variants():
    assert tag("#vaccineskill").conspiracy
    assert tag("vaccineskill").conspiracy
    assert tag("vaccines kill").conspiracy


def test_phrase_requires_word_boundaries():
    # "maga" must not fire inside "image"
    assert not tag("image search").political
    assert tag("maga hat").political


def test_both_families_can_fire():
    tags = tag("trump chemtrails evidence")
    assert tags.political and tags.conspiracy


def test_matched_terms_carry_lexicon_ids():
    tags = tag("vril lizard droning")
    assert any(lex_id == "conspiracy_queries" for lex_id, _ in tags.matched_terms)


def test_empty_lexicon_is_configuration_error(tmp_path):
    empty = tmp_path / "lex.csv"
    empty.write_text("lexicon_id,family,category,term,spaced_form,excluded\n")
    with pytest.raises(EmptyLexiconError):
        load_lexicons(empty)


def test_tag_lexicons_entry_point():
    q = normalize_query("flat earth proof")
    assert tag_lexicons(q, LEXICONS).conspiracy
