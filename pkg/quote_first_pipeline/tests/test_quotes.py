import random
import string

import pytest

from quote_first_pipeline.errors import NonVerbatimError, QuoteContractError, QuoteFormatError, QuoteParseError
from quote_first_pipeline.quotes import (
    BEGIN_MARKER,
    END_MARKER,
    Quote,
    QuoteSet,
    parse_quote_block,
    render_quote_block,
    verify_quote_set,
    verify_verbatim,
)
from quote_first_pipeline.tests.conftest import (
    DOWNEASTER_QUOTES,
    EMIL_CONTEXT,
    EMIL_GOLD,
    RUGAO_CONTEXT,
    RUGAO_QUOTE,
    RUGAO_TEACHER_OUTPUT,
)

ALPHABET = string.ascii_letters + string.digits + " ,.'\"()-\n\t#é"


def _random_text(rng):
    while True:
        text = "".join(rng.choice(ALPHABET) for _ in range(rng.randint(1, 40))).strip()
        if text and BEGIN_MARKER not in text and END_MARKER not in text:
            return text


def test_render_rugao():
    qs = QuoteSet.from_texts(["Rugao () is a county-level city under the administration of Nantong"])
    assert render_quote_block(qs) == (
        "##begin_quote## Rugao () is a county-level city under the administration of Nantong ##end_quote##"
    )


def test_render_two_quotes_in_order():
    block = render_quote_block(QuoteSet.from_texts(["second", "first"]))
    assert block.splitlines() == ["##begin_quote## second ##end_quote##", "##begin_quote## first ##end_quote##"]


def test_render_rejects_empty_and_marker_text():
    with pytest.raises(QuoteFormatError):
        render_quote_block(QuoteSet())
    with pytest.raises(QuoteFormatError):
        render_quote_block(QuoteSet.from_texts(["a ##end_quote## b"]))


def test_surrounding_whitespace_is_trimmed_once():
    quote = Quote("  Nantong is a city \n")
    assert quote.text == "Nantong is a city"
    qs = QuoteSet([quote, Quote("\tsecond ")])
    assert parse_quote_block(render_quote_block(qs)) == qs
    assert parse_quote_block(render_quote_block(qs)).texts() == ["Nantong is a city", "second"]


def test_round_trip_generated_sets():
    rng = random.Random(2024)
    for _ in range(1000):
        qs = QuoteSet.from_texts(_random_text(rng) for _ in range(rng.randint(1, 8)))
        assert parse_quote_block(render_quote_block(qs)) == qs
        assert parse_quote_block(render_quote_block(qs), mode="strict") == qs


def test_parse_downeaster_block():
    raw = (
        "##begin_quote## The Downeaster is a 145 mi\nregional passenger train service ##end_quote##\n"
        "##begin_quote## The West Amesbury Branch \nRailroad was a railroad ##end_quote##"
    )
    qs = parse_quote_block(raw)
    assert len(qs) == 2
    assert qs[0].text.startswith("The Downeaster is a 145 mi")
    assert qs[1].text.startswith("The West Amesbury Branch")


def test_parse_empty_is_empty_set():
    assert parse_quote_block("").is_empty
    assert parse_quote_block("I could not find anything relevant.").is_empty


def test_parse_stray_text_by_mode():
    raw = "noise ##begin_quote## a ##end_quote## noise"
    assert parse_quote_block(raw, mode="lenient").texts() == ["a"]
    with pytest.raises(QuoteContractError):
        parse_quote_block(raw, mode="strict")


def test_parse_accepts_unspaced_markers():
    assert parse_quote_block("##begin_quote##quote##end_quote##").texts() == ["quote"]


@pytest.mark.parametrize(
    "raw, offset",
    [
        ("x ##begin_quote## a ##begin_quote## b ##end_quote##", 20),
        ("a ##end_quote##", 2),
        ("é ##begin_quote## open", 3),
    ],
)
def test_parse_unbalanced_reports_byte_offset(raw, offset):
    for mode in ("lenient", "strict"):
        with pytest.raises(QuoteParseError) as err:
            parse_quote_block(raw, mode=mode)
        assert err.value.offset == offset


def test_parse_empty_quote_by_mode():
    raw = "##begin_quote##   ##end_quote## ##begin_quote## b ##end_quote##"
    assert parse_quote_block(raw).texts() == ["b"]
    with pytest.raises(QuoteContractError):
        parse_quote_block(raw, mode="strict")


def test_parse_deduplicates_keeping_first():
    raw = "##begin_quote## a  b ##end_quote## ##begin_quote## c ##end_quote## ##begin_quote## a b ##end_quote##"
    assert parse_quote_block(raw).texts() == ["a  b", "c"]


def test_parse_is_prefix_stable():
    block = render_quote_block(QuoteSet.from_texts(DOWNEASTER_QUOTES))
    before = parse_quote_block(block)
    after = parse_quote_block(block + "\nSome trailing commentary ##begin_quote## extra ##end_quote##")
    assert after.texts()[: len(before)] == before.texts()


def test_verify_exact_match_first_occurrence():
    quote = verify_verbatim(Quote("Nantong"), RUGAO_CONTEXT)
    expected = RUGAO_CONTEXT.index("Nantong")
    assert quote.match == (expected, expected + len("Nantong"))
    assert quote.normalized is False


def test_verify_whole_context():
    context = "abc def"
    assert verify_verbatim(Quote(context), context).match == (0, len(context))


def test_verify_miss_carries_prefix():
    with pytest.raises(NonVerbatimError) as err:
        verify_verbatim(Quote("not in text"), "abc")
    assert err.value.matched_prefix == ""
    with pytest.raises(NonVerbatimError) as err:
        verify_verbatim(Quote("abc xyz"), "abc abd")
    assert err.value.matched_prefix == "abc "
    assert err.value.context_position == 0


def test_verify_rewrapped_teacher_quote():
    quote = verify_verbatim(Quote(RUGAO_QUOTE), RUGAO_CONTEXT)
    assert quote.normalized is True
    start, end = quote.match
    assert " ".join(RUGAO_CONTEXT[start:end].split()) == " ".join(RUGAO_QUOTE.split())


def test_verbatim_closure_on_teacher_outputs():
    for raw, context in (
        (RUGAO_TEACHER_OUTPUT, RUGAO_CONTEXT),
        (render_quote_block(QuoteSet.from_texts(EMIL_GOLD)), EMIL_CONTEXT),
    ):
        parsed = parse_quote_block(raw)
        kept, dropped = verify_quote_set(parsed, context)
        assert dropped == []
        assert len(kept) == len(parsed)


def test_verify_quote_set_drops_fabrications(caplog):
    qs = QuoteSet.from_texts(["Nantong", "Shanghai is the capital"])
    kept, dropped = verify_quote_set(qs, RUGAO_CONTEXT, "x1")
    assert kept.texts() == ["Nantong"]
    assert [q.text for q in dropped] == ["Shanghai is the capital"]
    assert "x1" in caplog.text
