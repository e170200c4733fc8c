import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from termrank.corpus import (
    Statement,
    _split_sentences,
    segment_policy,
    statement_length_summary,
)
from termrank.errors import InvalidDocument


def seg(text):
    return [s.text for s in segment_policy("p1", "http://x", text).statements]


class TestSentenceSplitting:
    def test_three_terminators(self):
        assert seg("A. B? C!") == ["A.", "B?", "C!"]

    def test_abbreviations_do_not_split(self):
        assert seg("Ship within 3 business days. No P.O. boxes.") == [
            "Ship within 3 business days.",
            "No P.O. boxes.",
        ]

    def test_decimal_numbers_do_not_split(self):
        assert seg("Fees are 2.5 percent of the total. Taxes are extra.") == [
            "Fees are 2.5 percent of the total.",
            "Taxes are extra.",
        ]

    def test_terminator_runs_collapse(self):
        assert seg("Really?! Yes.") == ["Really?!", "Yes."]

    def test_closing_quote_stays_attached(self):
        out = seg('We may refuse "any order." Refunds take 5 days.')
        assert out == ['We may refuse "any order."', "Refunds take 5 days."]

    def test_eg_guarded(self):
        out = seg("Some items (e.g. gift cards) are final sale. Others are not.")
        assert out == [
            "Some items (e.g. gift cards) are final sale.",
            "Others are not.",
        ]


class TestDocumentStructure:
    def test_blank_lines_always_split(self):
        out = seg("First clause without period\n\nSecond clause")
        assert out == ["First clause without period", "Second clause"]

    def test_wrapped_lines_join(self):
        out = seg("This clause continues\nonto the next line. Second one.")
        assert out == ["This clause continues onto the next line.", "Second one."]

    def test_list_markers_split(self):
        out = seg("Rules:\n- no refunds on sale items\n- shipping is extra")
        assert out == ["Rules:", "no refunds on sale items", "shipping is extra"]

    def test_numbered_list_markers(self):
        out = seg("1. First rule applies.\n2. Second rule applies.")
        assert out == ["First rule applies.", "Second rule applies."]

    def test_bullet_characters(self):
        out = seg("Terms:\n• one\n• two")
        assert out == ["Terms:", "one", "two"]

    def test_whitespace_normalized(self):
        assert seg("Spaces,\tmany   spaces.") == ["Spaces, many spaces."]


class TestStatementRecords:
    def test_ids_and_indexes(self):
        doc = segment_policy("shop", "http://x", "One. Two. Three.")
        assert [s.statement_id for s in doc.statements] == [
            "shop-s000",
            "shop-s001",
            "shop-s002",
        ]
        assert [s.index for s in doc.statements] == [0, 1, 2]
        # lexicographic id order equals index order
        ids = [s.statement_id for s in doc.statements]
        assert sorted(ids) == ids

    def test_word_counts(self):
        doc = segment_policy("p", "", "We ship worldwide. Fees apply.")
        assert [s.word_count for s in doc.statements] == [3, 2]

    def test_empty_document_rejected(self):
        with pytest.raises(InvalidDocument):
            segment_policy("p", "", "")
        with pytest.raises(InvalidDocument):
            segment_policy("p", "", "   \n\n  ...  ")

    def test_statements_have_content(self):
        doc = segment_policy("p", "", "Hello. !!! World.")
        assert all(any(ch.isalnum() for ch in s.text) for s in doc.statements)


class TestLengthSummary:
    def test_worked_quartiles(self):
        from termrank.corpus import PolicyDocument

        statements = [
            Statement(f"p-s{i:03d}", "p", i, ("x " * n).strip(), n)
            for i, n in enumerate([1, 14, 22, 32, 59])
        ]
        doc = PolicyDocument("p", "", "irrelevant", statements)
        out = statement_length_summary(doc)
        assert out == {"min": 1, "q1": 7.5, "median": 22, "q3": 45.5, "max": 59}


@settings(max_examples=60, deadline=None)
@given(st.text(alphabet=st.characters(codec="utf-8"), max_size=400))
def test_segmentation_never_crashes_and_is_deterministic(text):
    try:
        doc = segment_policy("p", "", text)
    except InvalidDocument:
        return
    again = segment_policy("p", "", text)
    assert [s.text for s in doc.statements] == [s.text for s in again.statements]
    assert all(s.text.strip() == s.text and s.text for s in doc.statements)
    assert all(any(ch.isalnum() for ch in s.text) for s in doc.statements)


@settings(max_examples=40, deadline=None)
@given(
    st.lists(
        st.text(alphabet="abcdefg ", min_size=1, max_size=30).filter(
            lambda t: any(c.isalnum() for c in t)
        ),
        min_size=1,
        max_size=8,
    )
)
def test_blank_line_chunks_map_to_statements(chunks):
    # chunks without terminators map one-to-one onto statements
    doc = segment_policy("p", "", "\n\n".join(chunks))
    normalized = [" ".join(c.split()) for c in chunks if any(ch.isalnum() for ch in c)]
    assert [s.text for s in doc.statements] == normalized


def test_split_sentences_no_trailing_terminator():
    assert _split_sentences("no terminator at all") == ["no terminator at all"]
