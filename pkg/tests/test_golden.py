"""Golden files: translator output against checked-in Coq, and the checked-in
Coq against the published listings once annotated completions are undone."""

import pytest

from helpers import GOLDEN, annotations, as_listing, coq_tokens, emit_text

CASES = sorted(p.stem for p in GOLDEN.glob("*.sml"))
LISTED = sorted(p.stem for p in GOLDEN.glob("*.listing"))

# files whose listing is cut off or differs, and so must carry annotations
ANNOTATED = {"contract", "mutual", "modules", "infix", "hd", "hd_sum_pair"}


@pytest.mark.parametrize("name", CASES)
def test_output_matches_golden(name):
    src = (GOLDEN / f"{name}.sml").read_text()
    golden = (GOLDEN / f"{name}.v").read_text()
    assert coq_tokens(emit_text(src)) == coq_tokens(golden)


@pytest.mark.parametrize("name", LISTED)
def test_golden_matches_listing(name):
    golden = (GOLDEN / f"{name}.v").read_text()
    listing = (GOLDEN / f"{name}.listing").read_text()
    assert coq_tokens(as_listing(golden)) == coq_tokens(listing)


@pytest.mark.parametrize("name", sorted(ANNOTATED))
def test_truncated_listings_are_annotated(name):
    assert annotations((GOLDEN / f"{name}.v").read_text()) > 0


def test_every_golden_has_a_source():
    assert {p.stem for p in GOLDEN.glob("*.v")} == set(CASES)
